#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "cfpq/graph.hpp"
#include "cfpq/shortest.hpp"

namespace cfpq {

// A triple (nonterminal, from, to) packed into one dense integer
// (nt * |V| + from) * |V| + to. Flat indexed storage keeps the cost table
// workable at tens of millions of entries.
struct AnnotatedKey {
  std::uint32_t nt;
  std::uint32_t from;
  std::uint32_t to;

  friend bool operator==(const AnnotatedKey&, const AnnotatedKey&) = default;
};

// Chosen rule for an annotated head: rule_index identifies the grammar rule;
// mid is the intermediate node for binary rules.
struct ChosenAnnotated {
  std::uint32_t rule_index = kNone;
  std::uint32_t mid = kNone;
};

// Minimizing deterministic non-recursive rule set over the annotated grammar,
// derived in place from the grammar and the graph. For every triple whose
// intersection language is nonempty, cost is the minimum length of a matching
// path; the triple is absent otherwise. Costs live in a fixed-width table and
// spill to arbitrary precision only when a sum overflows.
class AnnotatedMinimizingSet {
 public:
  static constexpr std::uint64_t kAbsent = UINT64_MAX;

  std::uint32_t nonterminal_count() const { return nts_; }
  std::uint32_t node_count() const { return nodes_; }
  bool narrow() const { return std::holds_alternative<NarrowCosts>(costs_); }

  std::uint64_t pack(std::uint32_t nt, std::uint32_t from, std::uint32_t to) const {
    return (static_cast<std::uint64_t>(nt) * nodes_ + from) * nodes_ + to;
  }
  AnnotatedKey unpack(std::uint64_t key) const {
    const std::uint32_t to = static_cast<std::uint32_t>(key % nodes_);
    key /= nodes_;
    return {static_cast<std::uint32_t>(key / nodes_),
            static_cast<std::uint32_t>(key % nodes_), to};
  }

  bool contains(std::uint32_t nt, std::uint32_t from, std::uint32_t to) const;
  Cost cost(std::uint32_t nt, std::uint32_t from, std::uint32_t to) const;
  Cost cost_of_key(std::uint64_t key) const;
  ChosenAnnotated chosen(std::uint64_t key) const {
    return {rule_[key], mid_[key]};
  }

  // Packed keys in first-cost order.
  std::span<const std::uint64_t> domain() const { return domain_; }

  struct NtStats {
    std::size_t pairs = 0;
    Cost max_cost;
    Cost sum_cost;
    std::uint64_t argmax_key = kAbsent;  // smallest key reaching max_cost
  };
  NtStats nt_stats(std::uint32_t nt) const;
  // (from, to) pairs for one nonterminal, sorted by id.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs(std::uint32_t nt) const;

  const MinimizeStats& stats() const { return stats_; }

 private:
  template <class Arith>
  friend AnnotatedMinimizingSet minimize_annotated_impl(const Grammar&, const Graph&);

  struct NarrowCosts {
    std::vector<std::uint64_t> values;  // kAbsent = no entry
  };
  struct WideCosts {
    std::vector<Cost> values;
    std::vector<std::uint8_t> present;
  };

  std::uint32_t nts_ = 0;
  std::uint32_t nodes_ = 0;
  std::variant<NarrowCosts, WideCosts> costs_;
  std::vector<std::uint32_t> rule_;
  std::vector<std::uint32_t> mid_;
  std::vector<std::uint64_t> domain_;
  MinimizeStats stats_;
};

AnnotatedMinimizingSet minimize_annotated(const Grammar& g, const Graph& graph);

using EdgeSink = std::function<void(std::uint32_t from, std::uint32_t label, std::uint32_t to)>;

// Streams the minimum-length path for one triple, edge by edge, by iterative
// expansion of the chosen-rule DAG. False when the triple is not in the set.
bool visit_shortest_path(const Grammar& g, const Graph& graph,
                         const AnnotatedMinimizingSet& ms, std::uint32_t nt,
                         std::uint32_t from, std::uint32_t to, const EdgeSink& sink);

std::optional<Path> extract_shortest_path(const Grammar& g, const Graph& graph,
                                          const AnnotatedMinimizingSet& ms,
                                          std::uint32_t nt, std::uint32_t from,
                                          std::uint32_t to);

// Single-path query semantics: one path of minimum length whose trace is in
// the nonterminal's language, or nothing when no such path exists.
std::optional<Path> shortest_path(const Grammar& g, std::string_view nt,
                                  const Graph& graph, std::string_view from,
                                  std::string_view to);

using PairPathSink =
    std::function<bool(const std::string& from, const std::string& to, const Path& path)>;

// One minimum-length path per (from, to) pair in the nonterminal's domain,
// streamed in lexicographic node-name order. Stops early if the sink returns
// false.
void shortest_path_all_pairs(const Grammar& g, std::string_view nt, const Graph& graph,
                             const PairPathSink& sink);
void shortest_path_all_pairs(const Grammar& g, const Graph& graph,
                             const AnnotatedMinimizingSet& ms, std::uint32_t nt,
                             const PairPathSink& sink);

}  // namespace cfpq
