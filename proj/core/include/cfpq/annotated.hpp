#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfpq/grammar.hpp"
#include "cfpq/graph.hpp"
#include "cfpq/recognizer.hpp"

namespace cfpq {

struct AnnotatedNonterminal {
  std::string nt;
  std::string from;
  std::string to;

  friend bool operator==(const AnnotatedNonterminal&, const AnnotatedNonterminal&) = default;
};

struct AnnotatedRule {
  AnnotatedNonterminal head;
  bool is_terminal = false;
  std::string label;  // terminal case
  AnnotatedNonterminal left, right;  // binary case; endpoints chain through a mid node
};

// The grammar over triples (a, m, n) whose derivations spell exactly the
// paths from m to n with a trace in L(G; a). The nonterminal set is the
// recognizer result; rules are defined by two comprehensions over the rule
// set and the edge set, so they are kept implicit and generated on demand:
// materializing all of them costs up to |rules| * |V|^3 entries.
class AnnotatedGrammar {
 public:
  const Grammar& grammar() const { return grammar_; }
  const Graph& graph() const { return graph_; }
  const ReachSet& reach() const { return reach_; }

  bool contains(std::uint32_t nt, std::uint32_t from, std::uint32_t to) const {
    return reach_.contains(nt, from, to);
  }
  bool contains(const AnnotatedNonterminal& sym) const;

  std::size_t nonterminal_count() const { return reach_.size(); }
  std::size_t terminal_rule_count() const { return terminal_rule_count_; }
  std::size_t binary_rule_count() const { return binary_rule_count_; }

  // Explicit rule listing in deterministic order: worked-example scale only.
  std::vector<AnnotatedRule> materialize_rules() const;

  // The same grammar with triples mangled into plain nonterminal names
  // `a(m,n)`; the dual route for checking the in-place minimization.
  Grammar as_plain_grammar() const;

 private:
  friend AnnotatedGrammar build_annotated(const Grammar& g, const Graph& graph);

  Grammar grammar_;
  Graph graph_;
  ReachSet reach_{0, 0};
  std::size_t terminal_rule_count_ = 0;
  std::size_t binary_rule_count_ = 0;
};

// Runs the recognizer and counts both rule comprehensions. The size bounds
// |N^| <= |N||V|^2, binary rules <= |P||V|^3, terminal rules <=
// min(|N|,|P|)|E| are checked on every construction.
AnnotatedGrammar build_annotated(const Grammar& g, const Graph& graph);

// All-path query semantics, best-first: paths from' start.from to start.to
// with trace in L(G; start.nt), emitted in nondecreasing length order, ties
// broken by node names then labels; no duplicates. Stops after max_paths
// paths or once every remaining derivation exceeds max_len edges. Empty when
// the start triple is not in the annotated grammar.
std::vector<Path> enumerate_paths(const AnnotatedGrammar& ag,
                                  const AnnotatedNonterminal& start,
                                  std::size_t max_paths, std::size_t max_len);

// A derivation tree over annotated nonterminals; leaves are terminal rules in
// left-to-right order and spell a path.
struct PathDerivation {
  struct Node {
    std::uint32_t nt, from, to;
    bool is_terminal = false;
    std::uint32_t label = kNone;  // graph label id (leaf)
    std::uint32_t left = kNone;   // child indexes (inner)
    std::uint32_t right = kNone;
  };
  std::vector<Node> nodes;
  std::uint32_t root = kNone;

  std::size_t leaf_count() const;
  // (from, label, to) per leaf, left to right.
  std::vector<std::array<std::uint32_t, 3>> leaf_edges() const;
  Path to_path(const Graph& g) const;
};

// Parses the given path against the annotated grammar: succeeds iff the
// endpoints match and the trace is in the nonterminal's language. The
// derivation picks the smallest split point, then the first rule, at every
// level.
std::optional<PathDerivation> derive_specific_path(const AnnotatedGrammar& ag,
                                                   const AnnotatedNonterminal& start,
                                                   const Path& p);

}  // namespace cfpq
