#include "cfpq/singlepath.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <stdexcept>

namespace cfpq {

namespace {

struct OverflowSignal {};

// Fixed-width fast path. Sums that would no longer fit (or collide with the
// absent sentinel) raise OverflowSignal and the whole run is redone wide.
struct NarrowArith {
  using Value = std::uint64_t;
  static Value one() { return 1; }
  static Value add(Value a, Value b) {
    Value sum;
    if (__builtin_add_overflow(a, b, &sum) || sum >= AnnotatedMinimizingSet::kAbsent) {
      throw OverflowSignal{};
    }
    return sum;
  }
};

struct WideArith {
  using Value = Cost;
  static Value one() { return Cost(1); }
  static Value add(const Value& a, const Value& b) { return a + b; }
};

template <class Arith>
struct CostTable;

template <>
struct CostTable<NarrowArith> {
  std::vector<std::uint64_t> values;

  void init(std::size_t n) { values.assign(n, AnnotatedMinimizingSet::kAbsent); }
  bool present(std::uint64_t key) const {
    return values[key] != AnnotatedMinimizingSet::kAbsent;
  }
  const std::uint64_t& get(std::uint64_t key) const { return values[key]; }
  void put(std::uint64_t key, std::uint64_t value) { values[key] = value; }
};

template <>
struct CostTable<WideArith> {
  std::vector<Cost> values;
  std::vector<std::uint8_t> mask;

  void init(std::size_t n) {
    values.assign(n, Cost());
    mask.assign(n, 0);
  }
  bool present(std::uint64_t key) const { return mask[key]; }
  const Cost& get(std::uint64_t key) const { return values[key]; }
  void put(std::uint64_t key, Cost value) {
    values[key] = std::move(value);
    mask[key] = 1;
  }
};

// Grammar terminal id -> graph label id (kNone when the label is absent).
std::vector<std::uint32_t> label_mapping(const Grammar& g, const Graph& graph) {
  std::vector<std::uint32_t> map(g.terminal_count(), kNone);
  for (std::uint32_t t = 0; t < g.terminal_count(); ++t) {
    if (auto id = graph.find_label(g.terminal_name(t))) map[t] = *id;
  }
  return map;
}

}  // namespace

template <class Arith>
AnnotatedMinimizingSet minimize_annotated_impl(const Grammar& g, const Graph& graph) {
  using Value = typename Arith::Value;

  const std::uint32_t nn = g.nonterminal_count();
  const std::uint32_t nv = graph.node_count();

  AnnotatedMinimizingSet ms;
  ms.nts_ = nn;
  ms.nodes_ = nv;
  if (nn == 0 || nv == 0) {
    ms.costs_ = AnnotatedMinimizingSet::NarrowCosts{};
    return ms;
  }
  if (static_cast<std::uint64_t>(nn) > UINT64_MAX / nv / nv) {
    throw std::length_error("annotated cost table would not be indexable");
  }
  const std::uint64_t total = static_cast<std::uint64_t>(nn) * nv * nv;

  CostTable<Arith> cost;
  cost.init(total);
  ms.rule_.assign(total, kNone);
  ms.mid_.assign(total, kNone);

  // Costed-triple adjacency, keyed by (nonterminal, node): targets of triples
  // leaving a node, sources of triples entering one. Appended at first cost.
  std::vector<std::vector<std::uint32_t>> out_idx(static_cast<std::size_t>(nn) * nv);
  std::vector<std::vector<std::uint32_t>> in_idx(static_cast<std::size_t>(nn) * nv);

  struct Entry {
    Value priority;
    std::uint64_t key;
    bool operator>(const Entry& other) const {
      if (priority != other.priority) return priority > other.priority;
      return key > other.key;  // deterministic extraction among equal priorities
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  MinimizeStats& stats = ms.stats_;

  auto first_cost = [&](std::uint64_t key, Value value, std::uint32_t rule_index,
                        std::uint32_t mid, std::uint32_t nt, std::uint32_t from,
                        std::uint32_t to) {
    if (cost.present(key)) {
      stats.single_insertion = false;
      return;
    }
    cost.put(key, value);
    ms.rule_[key] = rule_index;
    ms.mid_[key] = mid;
    ms.domain_.push_back(key);
    out_idx[static_cast<std::size_t>(nt) * nv + from].push_back(to);
    in_idx[static_cast<std::size_t>(nt) * nv + to].push_back(from);
    queue.push({std::move(value), key});
    ++stats.queue_pushes;
  };

  for (std::uint32_t rid : g.terminal_rule_ids()) {
    const CnfRule& rule = g.rules()[rid];
    auto label = graph.find_label(g.terminal_name(rule.terminal));
    if (!label) continue;
    for (auto [m, n] : graph.edges_with_label(*label)) {
      const std::uint64_t key = ms.pack(rule.head, m, n);
      if (!cost.present(key)) {
        first_cost(key, Arith::one(), rid, kNone, rule.head, m, n);
      }
    }
  }

  auto produce = [&](std::uint32_t rule_index, std::uint32_t head, std::uint32_t from,
                     std::uint32_t mid, std::uint32_t to, const Value& left_cost,
                     const Value& right_cost) {
    ++stats.produce_calls;
    Value sum = Arith::add(left_cost, right_cost);
    const std::uint64_t key = ms.pack(head, from, to);
    if (!cost.present(key)) {
      first_cost(key, std::move(sum), rule_index, mid, head, from, to);
    } else if (cost.get(key) > sum) {
      cost.put(key, sum);
      ms.rule_[key] = rule_index;
      ms.mid_[key] = mid;
      queue.push({std::move(sum), key});
      ++stats.queue_pushes;
    }
  };

  Value last_extracted{};
  while (!queue.empty()) {
    Entry top = queue.top();
    queue.pop();
    if (cost.get(top.key) != top.priority) continue;  // stale after a decrease
    if (stats.extractions > 0 && top.priority < last_extracted) {
      stats.extractions_monotone = false;
    }
    last_extracted = std::move(top.priority);
    ++stats.extractions;

    const AnnotatedKey extracted = ms.unpack(top.key);
    const Value extracted_cost = cost.get(top.key);

    // Rules with the extracted nonterminal first: join with costed triples of
    // the sibling leaving the extracted target. Sizes are snapshotted; growth
    // during the loop is rejoined when the new triple itself is extracted.
    for (std::uint32_t rid : g.rules_with_first(extracted.nt)) {
      const CnfRule& rule = g.rules()[rid];
      const auto& targets =
          out_idx[static_cast<std::size_t>(rule.right) * nv + extracted.to];
      const std::size_t count = targets.size();
      for (std::size_t i = 0; i < count; ++i) {
        const std::uint32_t o = targets[i];
        produce(rid, rule.head, extracted.from, extracted.to, o, extracted_cost,
                cost.get(ms.pack(rule.right, extracted.to, o)));
      }
    }
    for (std::uint32_t rid : g.rules_with_second(extracted.nt)) {
      const CnfRule& rule = g.rules()[rid];
      const auto& sources =
          in_idx[static_cast<std::size_t>(rule.left) * nv + extracted.from];
      const std::size_t count = sources.size();
      for (std::size_t i = 0; i < count; ++i) {
        const std::uint32_t o = sources[i];
        produce(rid, rule.head, o, extracted.from, extracted.to,
                cost.get(ms.pack(rule.left, o, extracted.from)), extracted_cost);
      }
    }
  }

  if constexpr (std::is_same_v<Arith, NarrowArith>) {
    ms.costs_ = AnnotatedMinimizingSet::NarrowCosts{std::move(cost.values)};
  } else {
    ms.costs_ =
        AnnotatedMinimizingSet::WideCosts{std::move(cost.values), std::move(cost.mask)};
  }
  return ms;
}

AnnotatedMinimizingSet minimize_annotated(const Grammar& g, const Graph& graph) {
  try {
    return minimize_annotated_impl<NarrowArith>(g, graph);
  } catch (const OverflowSignal&) {
    return minimize_annotated_impl<WideArith>(g, graph);
  }
}

bool AnnotatedMinimizingSet::contains(std::uint32_t nt, std::uint32_t from,
                                      std::uint32_t to) const {
  if (nt >= nts_ || from >= nodes_ || to >= nodes_) return false;
  const std::uint64_t key = pack(nt, from, to);
  if (const auto* narrow = std::get_if<NarrowCosts>(&costs_)) {
    return narrow->values[key] != kAbsent;
  }
  return std::get<WideCosts>(costs_).present[key] != 0;
}

Cost AnnotatedMinimizingSet::cost(std::uint32_t nt, std::uint32_t from,
                                  std::uint32_t to) const {
  if (!contains(nt, from, to)) {
    throw std::out_of_range("triple has no cost (empty intersection)");
  }
  return cost_of_key(pack(nt, from, to));
}

Cost AnnotatedMinimizingSet::cost_of_key(std::uint64_t key) const {
  if (const auto* narrow = std::get_if<NarrowCosts>(&costs_)) {
    return Cost(narrow->values[key]);
  }
  return std::get<WideCosts>(costs_).values[key];
}

AnnotatedMinimizingSet::NtStats AnnotatedMinimizingSet::nt_stats(std::uint32_t nt) const {
  NtStats stats;
  stats.max_cost = 0;
  stats.sum_cost = 0;
  for (std::uint64_t key : domain_) {
    if (unpack(key).nt != nt) continue;
    Cost c = cost_of_key(key);
    ++stats.pairs;
    stats.sum_cost += c;
    if (stats.argmax_key == kAbsent || c > stats.max_cost ||
        (c == stats.max_cost && key < stats.argmax_key)) {
      stats.max_cost = std::move(c);
      stats.argmax_key = key;
    }
  }
  return stats;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> AnnotatedMinimizingSet::pairs(
    std::uint32_t nt) const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint64_t key : domain_) {
    const AnnotatedKey k = unpack(key);
    if (k.nt == nt) out.emplace_back(k.from, k.to);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool visit_shortest_path(const Grammar& g, const Graph& graph,
                         const AnnotatedMinimizingSet& ms, std::uint32_t nt,
                         std::uint32_t from, std::uint32_t to, const EdgeSink& sink) {
  if (!ms.contains(nt, from, to)) return false;
  const std::vector<std::uint32_t> labels = label_mapping(g, graph);

  std::vector<std::uint64_t> stack{ms.pack(nt, from, to)};
  while (!stack.empty()) {
    const std::uint64_t key = stack.back();
    stack.pop_back();
    const AnnotatedKey k = ms.unpack(key);
    const ChosenAnnotated choice = ms.chosen(key);
    const CnfRule& rule = g.rules()[choice.rule_index];
    if (rule.is_terminal) {
      sink(k.from, labels[rule.terminal], k.to);
    } else {
      stack.push_back(ms.pack(rule.right, choice.mid, k.to));
      stack.push_back(ms.pack(rule.left, k.from, choice.mid));
    }
  }
  return true;
}

std::optional<Path> extract_shortest_path(const Grammar& g, const Graph& graph,
                                          const AnnotatedMinimizingSet& ms,
                                          std::uint32_t nt, std::uint32_t from,
                                          std::uint32_t to) {
  std::vector<std::uint32_t> nodes{from};
  std::vector<std::uint32_t> labels;
  const bool found = visit_shortest_path(
      g, graph, ms, nt, from, to,
      [&](std::uint32_t step_from, std::uint32_t label, std::uint32_t step_to) {
        assert(nodes.back() == step_from);
        (void)step_from;
        labels.push_back(label);
        nodes.push_back(step_to);
      });
  if (!found) return std::nullopt;
  return Path(graph, std::move(nodes), std::move(labels));
}

std::optional<Path> shortest_path(const Grammar& g, std::string_view nt,
                                  const Graph& graph, std::string_view from,
                                  std::string_view to) {
  const std::uint32_t id = g.nonterminal_id(nt);
  const std::uint32_t m = graph.node_id(from);
  const std::uint32_t n = graph.node_id(to);
  const AnnotatedMinimizingSet ms = minimize_annotated(g, graph);
  return extract_shortest_path(g, graph, ms, id, m, n);
}

void shortest_path_all_pairs(const Grammar& g, const Graph& graph,
                             const AnnotatedMinimizingSet& ms, std::uint32_t nt,
                             const PairPathSink& sink) {
  auto id_pairs = ms.pairs(nt);
  std::vector<std::pair<std::string, std::string>> names;
  names.reserve(id_pairs.size());
  std::vector<std::size_t> order(id_pairs.size());
  for (std::size_t i = 0; i < id_pairs.size(); ++i) {
    names.emplace_back(graph.node_name(id_pairs[i].first),
                       graph.node_name(id_pairs[i].second));
    order[i] = i;
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
  for (std::size_t i : order) {
    auto path = extract_shortest_path(g, graph, ms, nt, id_pairs[i].first,
                                      id_pairs[i].second);
    assert(path.has_value());
    if (!sink(names[i].first, names[i].second, *path)) return;
  }
}

void shortest_path_all_pairs(const Grammar& g, std::string_view nt, const Graph& graph,
                             const PairPathSink& sink) {
  const std::uint32_t id = g.nonterminal_id(nt);
  const AnnotatedMinimizingSet ms = minimize_annotated(g, graph);
  shortest_path_all_pairs(g, graph, ms, id, sink);
}

}  // namespace cfpq
