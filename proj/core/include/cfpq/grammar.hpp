#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cfpq/errors.hpp"

namespace cfpq {

inline constexpr std::uint32_t kNone = UINT32_MAX;

// ---------------------------------------------------------------------------
// Raw (unrestricted) grammars, as read from grammar files.
//
// File format: one rule per line, `head -> body (| body)*`. Terminals are
// written in double quotes, nonterminals bare. `#` starts a comment, blank
// lines are ignored. An empty body derives the empty string.
// ---------------------------------------------------------------------------

struct RawSymbol {
  bool is_terminal = false;
  std::string text;

  friend bool operator==(const RawSymbol&, const RawSymbol&) = default;
};

struct RawRule {
  std::string head;
  std::vector<RawSymbol> body;  // empty = epsilon
  int line = 0;
};

class RawGrammar {
 public:
  std::span<const RawRule> rules() const { return rules_; }
  // First-mention order.
  const std::vector<std::string>& nonterminals() const { return nonterminals_; }
  const std::vector<std::string>& terminals() const { return terminals_; }

  void add_rule(RawRule rule);

 private:
  void note_symbol(const std::string& name, bool is_terminal, int line);

  std::vector<RawRule> rules_;
  std::vector<std::string> nonterminals_;
  std::vector<std::string> terminals_;
  std::unordered_map<std::string, bool> kind_;  // name -> is_terminal
};

RawGrammar parse_grammar(std::string_view text);

// ---------------------------------------------------------------------------
// Grammars in Chomsky Normal Form: every rule is `a -> sigma` or `a -> b c`.
// Symbols are interned; ids are dense and follow declaration order. The rule
// sequence order is stable and used for tie-breaking downstream.
// ---------------------------------------------------------------------------

struct CnfRule {
  std::uint32_t head = kNone;
  bool is_terminal = false;
  std::uint32_t terminal = kNone;  // terminal id when is_terminal
  std::uint32_t left = kNone;      // nonterminal ids otherwise
  std::uint32_t right = kNone;

  friend bool operator==(const CnfRule&, const CnfRule&) = default;
};

class Grammar {
 public:
  std::uint32_t nonterminal_count() const { return static_cast<std::uint32_t>(nt_names_.size()); }
  std::uint32_t terminal_count() const { return static_cast<std::uint32_t>(term_names_.size()); }
  const std::string& nonterminal_name(std::uint32_t id) const { return nt_names_.at(id); }
  const std::string& terminal_name(std::uint32_t id) const { return term_names_.at(id); }
  std::optional<std::uint32_t> find_nonterminal(std::string_view name) const;
  std::optional<std::uint32_t> find_terminal(std::string_view name) const;
  // Throws UnknownSymbolError.
  std::uint32_t nonterminal_id(std::string_view name) const;

  std::span<const CnfRule> rules() const { return rules_; }
  // Rule ids (indexes into rules()), each list in rule order.
  std::span<const std::uint32_t> rules_with_first(std::uint32_t nt) const { return by_first_.at(nt); }
  std::span<const std::uint32_t> rules_with_second(std::uint32_t nt) const { return by_second_.at(nt); }
  std::span<const std::uint32_t> rules_with_terminal(std::uint32_t term) const { return by_terminal_.at(term); }
  std::span<const std::uint32_t> terminal_rule_ids() const { return terminal_rules_; }

  std::string rule_text(std::uint32_t rule_index) const;

 private:
  friend class GrammarBuilder;

  std::vector<std::string> nt_names_;
  std::vector<std::string> term_names_;
  std::unordered_map<std::string, std::uint32_t> nt_ids_;
  std::unordered_map<std::string, std::uint32_t> term_ids_;
  std::vector<CnfRule> rules_;
  std::vector<std::vector<std::uint32_t>> by_first_;
  std::vector<std::vector<std::uint32_t>> by_second_;
  std::vector<std::vector<std::uint32_t>> by_terminal_;
  std::vector<std::uint32_t> terminal_rules_;
};

class GrammarBuilder {
 public:
  std::uint32_t nonterminal(const std::string& name);
  std::uint32_t terminal(const std::string& name);
  void terminal_rule(const std::string& head, const std::string& label);
  void binary_rule(const std::string& head, const std::string& left, const std::string& right);
  // Validates namespace disjointness and builds the lookup indexes.
  Grammar build();

 private:
  Grammar g_;
};

// ---------------------------------------------------------------------------
// Normalization to CNF.
//
// For every nonterminal a of the input, the normalized grammar satisfies
// L(G'; a) = L(g; a) \ {epsilon}. The empty string is never part of a query
// answer, so nullable nonterminals are reported as diagnostics rather than
// silently dropped. Fresh helper nonterminals use the reserved `_` prefix:
// `_t<label>` for lifted terminals and `_b<k>` for binarization, with
// deterministic counters so repeated runs produce byte-identical output.
// ---------------------------------------------------------------------------

struct GrammarDiagnostic {
  enum class Code {
    kNullableNonterminals,  // some nonterminals can derive the empty string
    kEpsilonOnlyLanguage,   // language was {epsilon}; it becomes empty
  };
  Code code;
  std::vector<std::string> symbols;
  std::string message;
};

struct NormalizeResult {
  Grammar grammar;
  std::vector<GrammarDiagnostic> diagnostics;
};

NormalizeResult normalize_to_cnf(const RawGrammar& raw);

// CYK membership: true iff the nonterminal derives the word. The word is a
// sequence of terminal tokens; tokens outside the alphabet simply never
// match. The empty word is never a member (epsilon is excluded throughout).
bool cyk_member(const Grammar& g, std::uint32_t nt, std::span<const std::string> word);
bool cyk_member(const Grammar& g, std::string_view nt, std::span<const std::string> word);

// Rules in grammar-file syntax, one per line, in rule order.
std::string serialize_grammar(const Grammar& g);

}  // namespace cfpq
