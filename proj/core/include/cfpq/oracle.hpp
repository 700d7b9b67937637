#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfpq/grammar.hpp"
#include "cfpq/graph.hpp"

namespace cfpq {

// Brute-force references used by property tests and for reproducing derived
// expected values. Correct and exhaustive within their bounds, never fast.

struct BoundedPathSet {
  // Sorted by length, then node names, then labels. Includes the zero-edge
  // path at the start node (unless a target filter excludes it).
  std::vector<Path> paths;
  // The state budget ran out before max_len; the listing is incomplete.
  bool truncated = false;
};

// Every path of length <= max_len starting at `from` (ending at `to` when
// given), by breadth-first extension.
BoundedPathSet enum_paths(const Graph& g, std::string_view from, std::size_t max_len,
                          const std::optional<std::string>& to = std::nullopt,
                          std::size_t max_states = 1'000'000);

// Minimum length <= bound of a path from -> to whose trace the nonterminal
// accepts; conclusive within the bound. Throws if the path count explodes.
std::optional<std::uint64_t> brute_min_path(const Grammar& g, std::string_view nt,
                                            const Graph& graph, std::string_view from,
                                            std::string_view to, std::size_t bound);

// Minimum matching path lengths <= bound for all triples at once, by walking
// the trie of label strings with an incremental reach relation and CYK chart.
// Requires at most 64 nonterminals and 64 nodes.
class BruteMinTable {
 public:
  BruteMinTable(std::uint32_t nonterminals, std::uint32_t nodes)
      : nts_(nonterminals), nodes_(nodes),
        min_(static_cast<std::size_t>(nonterminals) * nodes * nodes, kAbsent) {}

  std::optional<std::uint64_t> get(std::uint32_t nt, std::uint32_t from,
                                   std::uint32_t to) const {
    const std::uint64_t v = min_[index(nt, from, to)];
    if (v == kAbsent) return std::nullopt;
    return v;
  }
  void update(std::uint32_t nt, std::uint32_t from, std::uint32_t to, std::uint64_t len) {
    std::uint64_t& v = min_[index(nt, from, to)];
    if (len < v) v = len;
  }
  std::size_t entries() const;

 private:
  static constexpr std::uint64_t kAbsent = UINT64_MAX;
  std::size_t index(std::uint32_t nt, std::uint32_t from, std::uint32_t to) const {
    return (static_cast<std::size_t>(nt) * nodes_ + from) * nodes_ + to;
  }
  std::uint32_t nts_, nodes_;
  std::vector<std::uint64_t> min_;
};

BruteMinTable brute_min_table(const Grammar& g, const Graph& graph, std::size_t bound);

// Minimum |w| <= bound with nt =>* w, by breadth-first search over sentential
// forms in length layers (leftmost rewriting).
std::optional<std::uint64_t> brute_min_string(const Grammar& g, std::string_view nt,
                                              std::size_t bound);

// The reach relation by naive fixpoint iteration: recomputed from scratch each
// round, no worklist, no indexes. Conclusive, and independent of the
// recognizer's machinery. Triples (nt, from, to), sorted.
std::vector<std::array<std::uint32_t, 3>> naive_reach(const Grammar& g,
                                                      const Graph& graph);

}  // namespace cfpq
