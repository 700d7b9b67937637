#include "cfpq/grammar.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

namespace cfpq {

namespace {

struct Token {
  enum class Kind { kBare, kTerminal, kPipe, kArrow };
  Kind kind;
  std::string text;
};

// Tokenizes one line. Comments have already been stripped.
std::vector<Token> tokenize_line(std::string_view line, int line_no) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    if (c == '"') {
      std::size_t close = line.find('"', i + 1);
      if (close == std::string_view::npos) {
        throw ParseError(line_no, "unterminated terminal");
      }
      tokens.push_back({Token::Kind::kTerminal,
                        std::string(line.substr(i + 1, close - i - 1))});
      if (tokens.back().text.empty()) {
        throw ParseError(line_no, "empty terminal");
      }
      i = close + 1;
      continue;
    }
    if (c == '|') {
      tokens.push_back({Token::Kind::kPipe, "|"});
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' &&
           line[end] != '"' && line[end] != '|') {
      ++end;
    }
    std::string text(line.substr(i, end - i));
    tokens.push_back({text == "->" ? Token::Kind::kArrow : Token::Kind::kBare,
                      std::move(text)});
    i = end;
  }
  return tokens;
}

// Cuts a `#` comment, ignoring `#` inside quoted terminals.
std::string_view strip_comment(std::string_view line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quote = !in_quote;
    if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

}  // namespace

void RawGrammar::note_symbol(const std::string& name, bool is_terminal, int line) {
  auto [it, inserted] = kind_.try_emplace(name, is_terminal);
  if (inserted) {
    (is_terminal ? terminals_ : nonterminals_).push_back(name);
  } else if (it->second != is_terminal) {
    throw ParseError(line, "token '" + name + "' used as both terminal and nonterminal");
  }
}

void RawGrammar::add_rule(RawRule rule) {
  note_symbol(rule.head, false, rule.line);
  for (const RawSymbol& sym : rule.body) {
    note_symbol(sym.text, sym.is_terminal, rule.line);
  }
  rules_.push_back(std::move(rule));
}

RawGrammar parse_grammar(std::string_view text) {
  RawGrammar raw;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    line = strip_comment(line);

    std::vector<Token> tokens = tokenize_line(line, line_no);
    if (tokens.empty()) continue;

    if (tokens[0].kind != Token::Kind::kBare) {
      throw ParseError(line_no, "rule must start with a nonterminal head");
    }
    if (tokens.size() < 2 || tokens[1].kind != Token::Kind::kArrow) {
      throw ParseError(line_no, "expected '->' after rule head");
    }

    RawRule rule;
    rule.head = tokens[0].text;
    rule.line = line_no;
    for (std::size_t t = 2; t <= tokens.size(); ++t) {
      if (t == tokens.size() || tokens[t].kind == Token::Kind::kPipe) {
        raw.add_rule(rule);
        rule.body.clear();
        continue;
      }
      if (tokens[t].kind == Token::Kind::kArrow) {
        throw ParseError(line_no, "unexpected '->' in rule body");
      }
      rule.body.push_back({tokens[t].kind == Token::Kind::kTerminal, tokens[t].text});
    }
  }
  return raw;
}

// ---------------------------------------------------------------------------
// Grammar / GrammarBuilder
// ---------------------------------------------------------------------------

std::optional<std::uint32_t> Grammar::find_nonterminal(std::string_view name) const {
  auto it = nt_ids_.find(std::string(name));
  if (it == nt_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Grammar::find_terminal(std::string_view name) const {
  auto it = term_ids_.find(std::string(name));
  if (it == term_ids_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t Grammar::nonterminal_id(std::string_view name) const {
  if (auto id = find_nonterminal(name)) return *id;
  throw UnknownSymbolError("unknown nonterminal: " + std::string(name));
}

std::string Grammar::rule_text(std::uint32_t rule_index) const {
  const CnfRule& r = rules_.at(rule_index);
  if (r.is_terminal) {
    return nt_names_[r.head] + " -> \"" + term_names_[r.terminal] + "\"";
  }
  return nt_names_[r.head] + " -> " + nt_names_[r.left] + " " + nt_names_[r.right];
}

std::uint32_t GrammarBuilder::nonterminal(const std::string& name) {
  auto [it, inserted] = g_.nt_ids_.try_emplace(
      name, static_cast<std::uint32_t>(g_.nt_names_.size()));
  if (inserted) g_.nt_names_.push_back(name);
  return it->second;
}

std::uint32_t GrammarBuilder::terminal(const std::string& name) {
  auto [it, inserted] = g_.term_ids_.try_emplace(
      name, static_cast<std::uint32_t>(g_.term_names_.size()));
  if (inserted) g_.term_names_.push_back(name);
  return it->second;
}

void GrammarBuilder::terminal_rule(const std::string& head, const std::string& label) {
  CnfRule r;
  r.head = nonterminal(head);
  r.is_terminal = true;
  r.terminal = terminal(label);
  g_.rules_.push_back(r);
}

void GrammarBuilder::binary_rule(const std::string& head, const std::string& left,
                                 const std::string& right) {
  CnfRule r;
  r.head = nonterminal(head);
  r.is_terminal = false;
  r.left = nonterminal(left);
  r.right = nonterminal(right);
  g_.rules_.push_back(r);
}

Grammar GrammarBuilder::build() {
  for (const auto& name : g_.nt_names_) {
    if (g_.term_ids_.count(name)) {
      throw std::invalid_argument("symbol '" + name +
                                  "' declared as both terminal and nonterminal");
    }
  }
  g_.by_first_.assign(g_.nt_names_.size(), {});
  g_.by_second_.assign(g_.nt_names_.size(), {});
  g_.by_terminal_.assign(g_.term_names_.size(), {});
  g_.terminal_rules_.clear();
  for (std::uint32_t i = 0; i < g_.rules_.size(); ++i) {
    const CnfRule& r = g_.rules_[i];
    if (r.is_terminal) {
      g_.by_terminal_[r.terminal].push_back(i);
      g_.terminal_rules_.push_back(i);
    } else {
      g_.by_first_[r.left].push_back(i);
      g_.by_second_[r.right].push_back(i);
    }
  }
  return std::move(g_);
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

namespace {

using Body = std::vector<RawSymbol>;

struct WorkRule {
  std::string head;
  Body body;
};

std::string rule_key(const WorkRule& r) {
  std::string key = r.head;
  for (const RawSymbol& s : r.body) {
    key += s.is_terminal ? '\x01' : '\x02';
    key += s.text;
  }
  return key;
}

std::set<std::string> compute_nullable(std::span<const RawRule> rules) {
  std::set<std::string> nullable;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const RawRule& r : rules) {
      if (nullable.count(r.head)) continue;
      bool all = true;
      for (const RawSymbol& s : r.body) {
        if (s.is_terminal || !nullable.count(s.text)) {
          all = false;
          break;
        }
      }
      if (all) {
        nullable.insert(r.head);
        changed = true;
      }
    }
  }
  return nullable;
}

}  // namespace

NormalizeResult normalize_to_cnf(const RawGrammar& raw) {
  const std::set<std::string> nullable = compute_nullable(raw.rules());

  // Epsilon elimination: every way of dropping nullable body symbols, the
  // undropped variant first. Bodies that vanish entirely encode epsilon and
  // are excluded.
  std::vector<WorkRule> rules;
  std::set<std::string> seen;
  for (const RawRule& r : raw.rules()) {
    std::vector<std::size_t> nullable_pos;
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (!r.body[i].is_terminal && nullable.count(r.body[i].text)) {
        nullable_pos.push_back(i);
      }
    }
    if (nullable_pos.size() > 20) {
      throw ParseError(r.line, "too many nullable symbols in one rule body");
    }
    const std::size_t variants = std::size_t{1} << nullable_pos.size();
    for (std::size_t mask = 0; mask < variants; ++mask) {
      WorkRule w;
      w.head = r.head;
      std::size_t np = 0;
      for (std::size_t i = 0; i < r.body.size(); ++i) {
        bool drop = false;
        if (np < nullable_pos.size() && nullable_pos[np] == i) {
          drop = (mask >> np) & 1;
          ++np;
        }
        if (!drop) w.body.push_back(r.body[i]);
      }
      if (w.body.empty()) continue;
      if (seen.insert(rule_key(w)).second) rules.push_back(std::move(w));
    }
  }

  // Unit elimination. Closure lists follow rule order so the output is
  // deterministic.
  {
    auto is_unit = [](const WorkRule& r) {
      return r.body.size() == 1 && !r.body[0].is_terminal;
    };
    std::unordered_map<std::string, std::vector<std::string>> unit_edges;
    std::unordered_map<std::string, std::vector<const WorkRule*>> non_unit_by_head;
    for (const WorkRule& r : rules) {
      if (is_unit(r)) {
        unit_edges[r.head].push_back(r.body[0].text);
      } else {
        non_unit_by_head[r.head].push_back(&r);
      }
    }
    auto unit_closure = [&](const std::string& start) {
      std::vector<std::string> order{start};
      std::set<std::string> visited{start};
      for (std::size_t i = 0; i < order.size(); ++i) {
        auto it = unit_edges.find(order[i]);
        if (it == unit_edges.end()) continue;
        for (const std::string& next : it->second) {
          if (visited.insert(next).second) order.push_back(next);
        }
      }
      return order;
    };

    std::vector<WorkRule> expanded;
    std::set<std::string> seen2;
    for (const WorkRule& r : rules) {
      if (!is_unit(r)) {
        if (seen2.insert(rule_key(r)).second) expanded.push_back(r);
        continue;
      }
      for (const std::string& target : unit_closure(r.body[0].text)) {
        auto it = non_unit_by_head.find(target);
        if (it == non_unit_by_head.end()) continue;
        for (const WorkRule* src : it->second) {
          WorkRule w{r.head, src->body};
          if (seen2.insert(rule_key(w)).second) expanded.push_back(std::move(w));
        }
      }
    }
    rules = std::move(expanded);
  }

  // Terminal lifting and binarization. Fresh names are chosen deterministically
  // and never collide with declared symbols.
  std::set<std::string> used_names;
  for (const auto& n : raw.nonterminals()) used_names.insert(n);
  for (const auto& n : raw.terminals()) used_names.insert(n);

  std::unordered_map<std::string, std::string> lift_name;  // label -> fresh nt
  std::vector<WorkRule> helpers;
  std::uint32_t binarize_counter = 1;

  auto lifted = [&](const std::string& label) {
    auto it = lift_name.find(label);
    if (it != lift_name.end()) return it->second;
    std::string name = "_t" + label;
    for (int suffix = 2; used_names.count(name); ++suffix) {
      name = "_t" + label + std::to_string(suffix);
    }
    used_names.insert(name);
    lift_name.emplace(label, name);
    helpers.push_back({name, {RawSymbol{true, label}}});
    return name;
  };
  auto fresh_binary = [&]() {
    std::string name = "_b" + std::to_string(binarize_counter++);
    while (used_names.count(name)) {
      name = "_b" + std::to_string(binarize_counter++);
    }
    used_names.insert(name);
    return name;
  };

  std::vector<WorkRule> finals;
  for (WorkRule& r : rules) {
    if (r.body.size() == 1) {
      assert(r.body[0].is_terminal);
      finals.push_back(std::move(r));
      continue;
    }
    for (RawSymbol& s : r.body) {
      if (s.is_terminal) s = RawSymbol{false, lifted(s.text)};
    }
    while (r.body.size() > 2) {
      std::string rest = fresh_binary();
      Body tail(r.body.begin() + 1, r.body.end());
      r.body = {r.body[0], RawSymbol{false, rest}};
      finals.push_back(std::move(r));
      r = WorkRule{std::move(rest), std::move(tail)};
    }
    finals.push_back(std::move(r));
  }
  for (WorkRule& h : helpers) finals.push_back(std::move(h));

  GrammarBuilder builder;
  for (const auto& n : raw.nonterminals()) builder.nonterminal(n);
  for (const auto& t : raw.terminals()) builder.terminal(t);
  for (const WorkRule& r : finals) {
    if (r.body.size() == 1) {
      builder.terminal_rule(r.head, r.body[0].text);
    } else {
      assert(r.body.size() == 2);
      builder.binary_rule(r.head, r.body[0].text, r.body[1].text);
    }
  }

  NormalizeResult result{builder.build(), {}};

  if (!nullable.empty()) {
    // Productive = derives at least one terminal string in the final grammar.
    std::vector<bool> productive(result.grammar.nonterminal_count(), false);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const CnfRule& r : result.grammar.rules()) {
        if (productive[r.head]) continue;
        if (r.is_terminal || (productive[r.left] && productive[r.right])) {
          productive[r.head] = true;
          changed = true;
        }
      }
    }
    GrammarDiagnostic d;
    d.code = GrammarDiagnostic::Code::kNullableNonterminals;
    for (const auto& n : raw.nonterminals()) {
      if (nullable.count(n)) d.symbols.push_back(n);
    }
    d.message = "nullable nonterminal(s); the empty string is excluded from every language";
    result.diagnostics.push_back(std::move(d));

    GrammarDiagnostic e;
    e.code = GrammarDiagnostic::Code::kEpsilonOnlyLanguage;
    for (const auto& n : raw.nonterminals()) {
      if (nullable.count(n) && !productive[*result.grammar.find_nonterminal(n)]) {
        e.symbols.push_back(n);
      }
    }
    if (!e.symbols.empty()) {
      e.message = "language was {epsilon} and becomes empty after normalization";
      result.diagnostics.push_back(std::move(e));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// CYK
// ---------------------------------------------------------------------------

bool cyk_member(const Grammar& g, std::uint32_t nt, std::span<const std::string> word) {
  if (nt >= g.nonterminal_count()) {
    throw UnknownSymbolError("unknown nonterminal id");
  }
  const std::size_t n = word.size();
  if (n == 0) return false;

  std::vector<std::uint32_t> term_ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto id = g.find_terminal(word[i]);
    if (!id) return false;  // token outside the alphabet never matches
    term_ids[i] = *id;
  }

  const std::size_t nn = g.nonterminal_count();
  // chart[(len-1)*n + i] holds the nonterminals deriving word[i, i+len).
  std::vector<std::uint8_t> chart(n * n * nn, 0);
  auto cell = [&](std::size_t i, std::size_t len) {
    return chart.data() + ((len - 1) * n + i) * nn;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t rid : g.rules_with_terminal(term_ids[i])) {
      cell(i, 1)[g.rules()[rid].head] = 1;
    }
  }
  for (std::size_t len = 2; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      std::uint8_t* out = cell(i, len);
      for (std::size_t split = 1; split < len; ++split) {
        const std::uint8_t* lhs = cell(i, split);
        const std::uint8_t* rhs = cell(i + split, len - split);
        for (const CnfRule& r : g.rules()) {
          if (!r.is_terminal && lhs[r.left] && rhs[r.right]) out[r.head] = 1;
        }
      }
    }
  }
  return cell(0, n)[nt] != 0;
}

bool cyk_member(const Grammar& g, std::string_view nt, std::span<const std::string> word) {
  return cyk_member(g, g.nonterminal_id(nt), word);
}

std::string serialize_grammar(const Grammar& g) {
  std::string out;
  for (std::uint32_t i = 0; i < g.rules().size(); ++i) {
    out += g.rule_text(i);
    out += '\n';
  }
  return out;
}

}  // namespace cfpq
