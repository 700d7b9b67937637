#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfpq/grammar.hpp"

namespace cfpq {

// Minimum string lengths can reach 2^(|nonterminals|-1), so costs are
// arbitrary-precision. Always >= 1: epsilon is excluded from every language.
using Cost = boost::multiprecision::cpp_int;

// The rule chosen for a head in a deterministic non-recursive set.
struct ChosenRule {
  bool is_terminal = false;
  std::uint32_t terminal = kNone;    // terminal id when is_terminal
  std::uint32_t left = kNone;        // nonterminal ids otherwise
  std::uint32_t right = kNone;
  std::uint32_t rule_index = kNone;  // index into Grammar::rules(), when known
};

// Counters kept by every minimize run; cheap enough to stay on permanently.
// extractions_monotone mirrors the nondecreasing extract-min guarantee and
// single_insertion the at-most-one-queue-add-per-head guarantee.
struct MinimizeStats {
  bool extractions_monotone = true;
  bool single_insertion = true;
  std::size_t extractions = 0;
  std::size_t produce_calls = 0;
  std::size_t queue_pushes = 0;
};

// One chosen rule and cost per head. Heads absent from the mapping have an
// empty language. For a chosen binary rule a -> b c the invariants are
// cost[a] = cost[b] + cost[c], cost[a] > cost[b], cost[a] > cost[c].
class MinimizingSet {
 public:
  explicit MinimizingSet(std::uint32_t nonterminal_count)
      : entries_(nonterminal_count) {}

  bool contains(std::uint32_t nt) const {
    return nt < entries_.size() && entries_[nt].has_value();
  }
  const Cost& cost(std::uint32_t nt) const { return entries_.at(nt).value().second; }
  const ChosenRule& chosen(std::uint32_t nt) const { return entries_.at(nt).value().first; }
  // First-cost order.
  std::span<const std::uint32_t> domain() const { return domain_; }

  // Also the hook for hand-built sets in tests; replaces any previous entry.
  void set(std::uint32_t nt, ChosenRule rule, Cost cost);

  const MinimizeStats& stats() const { return stats_; }
  MinimizeStats& stats() { return stats_; }

 private:
  std::vector<std::optional<std::pair<ChosenRule, Cost>>> entries_;
  std::vector<std::uint32_t> domain_;
  MinimizeStats stats_;
};

// Builds a minimizing deterministic non-recursive rule set: for every
// nonterminal with a nonempty language, cost equals the minimum length over
// its language and the chosen rules derive a string of exactly that length.
// Priority queue realized as a binary heap with lazy deletion; ties are broken
// by rule order (produce) and by nonterminal id (extraction).
MinimizingSet minimize(const Grammar& g);

// Expands the chosen rules iteratively; the result has length cost[nt].
// Empty when nt is outside the domain.
std::optional<std::vector<std::string>> derive_min_string(const Grammar& g,
                                                          const MinimizingSet& ms,
                                                          std::string_view nt);

// Offline verifier: determinism, non-recursion, cost equations, and agreement
// of every cost with an independent fixpoint recomputation of minimum lengths.
// Returns human-readable violations; empty means the set is minimizing.
std::vector<std::string> check_minimizing(const Grammar& g, const MinimizingSet& ms);

// TSV `head \t cost \t chosen-rule`, in first-cost order.
std::string minimizing_set_tsv(const Grammar& g, const MinimizingSet& ms);

}  // namespace cfpq
