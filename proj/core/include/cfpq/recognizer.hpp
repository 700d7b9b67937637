#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfpq/grammar.hpp"
#include "cfpq/graph.hpp"

namespace cfpq {

// The set of triples (nonterminal, from, to) whose grammar language meets the
// graph language between the two nodes. Backed by a 3-dimensional bit index
// plus a per-nonterminal pair listing; the two views always agree.
class ReachSet {
 public:
  ReachSet(std::uint32_t nonterminals, std::uint32_t nodes);

  bool contains(std::uint32_t nt, std::uint32_t from, std::uint32_t to) const;
  // False if already present.
  bool insert(std::uint32_t nt, std::uint32_t from, std::uint32_t to);

  // Insertion order.
  std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs(std::uint32_t nt) const {
    return pairs_.at(nt);
  }
  std::size_t size() const { return size_; }
  std::uint32_t nonterminal_count() const { return nts_; }
  std::uint32_t node_count() const { return nodes_; }

 private:
  std::uint32_t nts_ = 0;
  std::uint32_t nodes_ = 0;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> pairs_;
};

// Bottom-up worklist closure: seed from terminal rules joined with edges,
// then close under binary rules until fixpoint. Exact for CNF grammars.
ReachSet recognize(const Grammar& g, const Graph& graph);

// Node-name pairs for one query nonterminal, sorted lexicographically.
std::vector<std::pair<std::string, std::string>> eval_relational(
    const Grammar& g, std::string_view nt, const Graph& graph);

bool eval_boolean(const Grammar& g, std::string_view nt, const Graph& graph);

}  // namespace cfpq
