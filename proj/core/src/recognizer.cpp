#include "cfpq/recognizer.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace cfpq {

ReachSet::ReachSet(std::uint32_t nonterminals, std::uint32_t nodes)
    : nts_(nonterminals), nodes_(nodes) {
  const std::size_t total =
      static_cast<std::size_t>(nonterminals) * nodes * nodes;
  bits_.assign((total + 63) / 64, 0);
  pairs_.assign(nonterminals, {});
}

bool ReachSet::contains(std::uint32_t nt, std::uint32_t from, std::uint32_t to) const {
  const std::size_t idx =
      (static_cast<std::size_t>(nt) * nodes_ + from) * nodes_ + to;
  return (bits_[idx >> 6] >> (idx & 63)) & 1;
}

bool ReachSet::insert(std::uint32_t nt, std::uint32_t from, std::uint32_t to) {
  const std::size_t idx =
      (static_cast<std::size_t>(nt) * nodes_ + from) * nodes_ + to;
  std::uint64_t& word = bits_[idx >> 6];
  const std::uint64_t mask = std::uint64_t{1} << (idx & 63);
  if (word & mask) return false;
  word |= mask;
  pairs_[nt].emplace_back(from, to);
  ++size_;
  return true;
}

ReachSet recognize(const Grammar& g, const Graph& graph) {
  const std::uint32_t nn = g.nonterminal_count();
  const std::uint32_t nv = graph.node_count();
  ReachSet reach(nn, nv);
  if (nv == 0) return reach;

  // Adjacency between discovered triples, keyed by (nonterminal, node):
  // out_idx lists targets o of triples (nt, node, o), in_idx lists sources.
  std::vector<std::vector<std::uint32_t>> out_idx(static_cast<std::size_t>(nn) * nv);
  std::vector<std::vector<std::uint32_t>> in_idx(static_cast<std::size_t>(nn) * nv);
  std::vector<std::array<std::uint32_t, 3>> queue;

  auto add = [&](std::uint32_t nt, std::uint32_t from, std::uint32_t to) {
    if (!reach.insert(nt, from, to)) return;
    out_idx[static_cast<std::size_t>(nt) * nv + from].push_back(to);
    in_idx[static_cast<std::size_t>(nt) * nv + to].push_back(from);
    queue.push_back({nt, from, to});
  };

  for (std::uint32_t rid : g.terminal_rule_ids()) {
    const CnfRule& rule = g.rules()[rid];
    auto label = graph.find_label(g.terminal_name(rule.terminal));
    if (!label) continue;
    for (auto [m, n] : graph.edges_with_label(*label)) {
      add(rule.head, m, n);
    }
  }

  // FIFO closure; every join pair is seen when its later side is dequeued,
  // with the earlier side already listed in the adjacency index.
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [b, m, n] = queue[head];
    for (std::uint32_t rid : g.rules_with_first(b)) {
      const CnfRule& rule = g.rules()[rid];
      const auto& targets = out_idx[static_cast<std::size_t>(rule.right) * nv + n];
      const std::size_t count = targets.size();  // snapshot: growth is re-joined later
      for (std::size_t i = 0; i < count; ++i) {
        add(rule.head, m, targets[i]);
      }
    }
    for (std::uint32_t rid : g.rules_with_second(b)) {
      const CnfRule& rule = g.rules()[rid];
      const auto& sources = in_idx[static_cast<std::size_t>(rule.left) * nv + m];
      const std::size_t count = sources.size();
      for (std::size_t i = 0; i < count; ++i) {
        add(rule.head, sources[i], n);
      }
    }
  }

  assert(reach.size() <= static_cast<std::size_t>(nn) * nv * nv);
  return reach;
}

std::vector<std::pair<std::string, std::string>> eval_relational(
    const Grammar& g, std::string_view nt, const Graph& graph) {
  const std::uint32_t id = g.nonterminal_id(nt);
  ReachSet reach = recognize(g, graph);
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(reach.pairs(id).size());
  for (auto [m, n] : reach.pairs(id)) {
    out.emplace_back(graph.node_name(m), graph.node_name(n));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool eval_boolean(const Grammar& g, std::string_view nt, const Graph& graph) {
  const std::uint32_t id = g.nonterminal_id(nt);
  return !recognize(g, graph).pairs(id).empty();
}

}  // namespace cfpq
