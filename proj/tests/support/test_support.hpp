#pragma once

#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "cfpq/grammar.hpp"
#include "cfpq/graph.hpp"

namespace cfpq::testing {

inline Grammar grammar_from_text(const std::string& text) {
  return normalize_to_cnf(parse_grammar(text)).grammar;
}

// The worked-example query: q -> "friendOf" | q q.
inline Grammar social_grammar() {
  return grammar_from_text("q -> \"friendOf\" | q q\n");
}

// Doubling chain: a0 -> "s", aj -> a(j-1) a(j-1). Minimum lengths are powers
// of two.
inline Grammar chain_grammar(unsigned nonterminals, const std::string& label = "s") {
  GrammarBuilder b;
  b.terminal_rule("a0", label);
  for (unsigned j = 1; j < nonterminals; ++j) {
    b.binary_rule("a" + std::to_string(j), "a" + std::to_string(j - 1),
                  "a" + std::to_string(j - 1));
  }
  return b.build();
}

// The unary-cycle family: a0 -> "s" | a0 a0, aj -> a(j-1) a(j-1).
inline Grammar cycle_family_grammar(unsigned nonterminals, const std::string& label = "s") {
  GrammarBuilder b;
  b.terminal_rule("a0", label);
  b.binary_rule("a0", "a0", "a0");
  for (unsigned j = 1; j < nonterminals; ++j) {
    b.binary_rule("a" + std::to_string(j), "a" + std::to_string(j - 1),
                  "a" + std::to_string(j - 1));
  }
  return b.build();
}

// Matched-pair query over two labels: q derives s1^k s2^k.
inline Grammar matched_grammar(const std::string& l1 = "s1", const std::string& l2 = "s2") {
  GrammarBuilder b;
  b.binary_rule("q", "a", "q'");
  b.binary_rule("q'", "q", "b");
  b.binary_rule("q", "a", "b");
  b.terminal_rule("a", l1);
  b.terminal_rule("b", l2);
  return b.build();
}

// Matched-pair query extended with one doubling level: b1 -> q q.
inline Grammar matched_grammar_doubled() {
  GrammarBuilder b;
  b.binary_rule("q", "a", "q'");
  b.binary_rule("q'", "q", "b");
  b.binary_rule("q", "a", "b");
  b.terminal_rule("a", "s1");
  b.terminal_rule("b", "s2");
  b.binary_rule("b1", "q", "q");
  return b.build();
}

// ---------------------------------------------------------------------------
// Seeded random instances for the property sweeps.
// ---------------------------------------------------------------------------

inline Graph random_graph(std::mt19937& rng, unsigned max_nodes = 6,
                          unsigned max_edges = 8) {
  const unsigned nodes = 1 + rng() % max_nodes;
  const unsigned edges = 1 + rng() % max_edges;
  static const std::vector<std::string> labels = {"x", "y"};
  GraphBuilder b;
  for (unsigned i = 0; i < nodes; ++i) b.node("v" + std::to_string(i));
  for (unsigned i = 0; i < edges; ++i) {
    b.edge("v" + std::to_string(rng() % nodes), labels[rng() % 2],
           "v" + std::to_string(rng() % nodes));
  }
  return b.build();
}

// Random CNF grammar over terminals {x, y}; nonterminals A..D. Empty
// languages and unreachable symbols are allowed on purpose.
inline Grammar random_cnf_grammar(std::mt19937& rng, unsigned max_nts = 4,
                                  unsigned max_rules = 10) {
  const unsigned nts = 1 + rng() % max_nts;
  const unsigned rules = 1 + rng() % max_rules;
  static const std::vector<std::string> labels = {"x", "y"};
  auto nt = [&](unsigned i) { return std::string(1, static_cast<char>('A' + i)); };
  GrammarBuilder b;
  for (unsigned i = 0; i < nts; ++i) b.nonterminal(nt(i));
  for (unsigned i = 0; i < rules; ++i) {
    if (rng() % 100 < 40) {
      b.terminal_rule(nt(rng() % nts), labels[rng() % 2]);
    } else {
      b.binary_rule(nt(rng() % nts), nt(rng() % nts), nt(rng() % nts));
    }
  }
  return b.build();
}

// Random unrestricted grammar (epsilon bodies and long bodies included) for
// the normalization property tests.
inline RawGrammar random_raw_grammar(std::mt19937& rng, unsigned max_nts = 4,
                                     unsigned max_rules = 8) {
  const unsigned nts = 1 + rng() % max_nts;
  const unsigned rules = 1 + rng() % max_rules;
  static const std::vector<std::string> labels = {"x", "y"};
  auto nt = [&](unsigned i) { return std::string(1, static_cast<char>('A' + i)); };
  RawGrammar raw;
  for (unsigned i = 0; i < rules; ++i) {
    RawRule rule;
    rule.head = nt(rng() % nts);
    const unsigned len = rng() % 4;  // 0 = epsilon
    for (unsigned j = 0; j < len; ++j) {
      if (rng() % 100 < 45) {
        rule.body.push_back({true, labels[rng() % 2]});
      } else {
        rule.body.push_back({false, nt(rng() % nts)});
      }
    }
    raw.add_rule(std::move(rule));
  }
  return raw;
}

// ---------------------------------------------------------------------------
// Hand-rolled derivability search on raw grammars, used as the language
// oracle for normalization. Recursive with all split points; a derivation
// that revisits the same (nonterminal, span) on one spine can always be
// shortened, so cutting those recursions loses nothing. Only positive
// results are memoized (negative ones can depend on the active spine).
// ---------------------------------------------------------------------------

class RawMatcher {
 public:
  explicit RawMatcher(const RawGrammar& raw) : raw_(raw) {}

  bool derives(const std::string& start, const std::vector<std::string>& word) {
    word_ = &word;
    proven_.clear();
    active_.clear();
    steps_ = 0;
    return derives_nt(start, 0, word.size());
  }

 private:
  using Key = std::tuple<std::string, std::size_t, std::size_t>;

  bool derives_nt(const std::string& nt, std::size_t i, std::size_t j) {
    if (++steps_ > 5'000'000) {
      throw std::runtime_error("raw rewriting search exceeded its budget");
    }
    const Key key{nt, i, j};
    if (proven_.count(key)) return true;
    if (!active_.insert(key).second) return false;  // spine revisit, cut
    bool ok = false;
    for (const RawRule& rule : raw_.rules()) {
      if (rule.head != nt) continue;
      if (derives_seq(rule.body, 0, i, j)) {
        ok = true;
        break;
      }
    }
    active_.erase(key);
    if (ok) proven_.insert(key);
    return ok;
  }

  bool derives_seq(const std::vector<RawSymbol>& body, std::size_t idx, std::size_t i,
                   std::size_t j) {
    if (idx == body.size()) return i == j;
    const RawSymbol& sym = body[idx];
    if (sym.is_terminal) {
      return i < j && (*word_)[i] == sym.text && derives_seq(body, idx + 1, i + 1, j);
    }
    for (std::size_t split = i; split <= j; ++split) {
      if (derives_nt(sym.text, i, split) && derives_seq(body, idx + 1, split, j)) {
        return true;
      }
    }
    return false;
  }

  const RawGrammar& raw_;
  const std::vector<std::string>* word_ = nullptr;
  std::set<Key> proven_;
  std::set<Key> active_;
  std::size_t steps_ = 0;
};

}  // namespace cfpq::testing
