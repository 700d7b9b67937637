#include "cfpq/annotated.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "cfpq/singlepath.hpp"

namespace cfpq {

namespace {

// Sorted target lists per (nonterminal, source node), from the reach set.
std::vector<std::vector<std::uint32_t>> reach_targets(const ReachSet& reach) {
  const std::uint32_t nn = reach.nonterminal_count();
  const std::uint32_t nv = reach.node_count();
  std::vector<std::vector<std::uint32_t>> out(static_cast<std::size_t>(nn) * nv);
  for (std::uint32_t nt = 0; nt < nn; ++nt) {
    for (auto [m, n] : reach.pairs(nt)) {
      out[static_cast<std::size_t>(nt) * nv + m].push_back(n);
    }
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

// Rule ids in rule order with duplicate (head, body) rules dropped, split by
// shape. The annotated rule set has set semantics, so duplicates must not be
// double counted.
struct DedupedRules {
  std::vector<std::uint32_t> terminal;
  std::vector<std::uint32_t> binary;
};

DedupedRules dedup_rules(const Grammar& g) {
  DedupedRules out;
  std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t, bool>> seen;
  for (std::uint32_t rid = 0; rid < g.rules().size(); ++rid) {
    const CnfRule& r = g.rules()[rid];
    const auto key = r.is_terminal
                         ? std::make_tuple(r.head, r.terminal, kNone, true)
                         : std::make_tuple(r.head, r.left, r.right, false);
    if (!seen.insert(key).second) continue;
    (r.is_terminal ? out.terminal : out.binary).push_back(rid);
  }
  return out;
}

}  // namespace

bool AnnotatedGrammar::contains(const AnnotatedNonterminal& sym) const {
  auto nt = grammar_.find_nonterminal(sym.nt);
  auto from = graph_.find_node(sym.from);
  auto to = graph_.find_node(sym.to);
  return nt && from && to && reach_.contains(*nt, *from, *to);
}

AnnotatedGrammar build_annotated(const Grammar& g, const Graph& graph) {
  AnnotatedGrammar ag;
  ag.grammar_ = g;
  ag.graph_ = graph;
  ag.reach_ = recognize(ag.grammar_, ag.graph_);

  const DedupedRules rules = dedup_rules(ag.grammar_);

  for (std::uint32_t rid : rules.terminal) {
    const CnfRule& r = ag.grammar_.rules()[rid];
    if (auto label = ag.graph_.find_label(ag.grammar_.terminal_name(r.terminal))) {
      ag.terminal_rule_count_ += ag.graph_.edges_with_label(*label).size();
    }
  }

  const std::uint32_t nn = ag.grammar_.nonterminal_count();
  const std::uint32_t nv = ag.graph_.node_count();
  std::vector<std::uint64_t> out_count(static_cast<std::size_t>(nn) * nv, 0);
  std::vector<std::uint64_t> in_count(static_cast<std::size_t>(nn) * nv, 0);
  for (std::uint32_t nt = 0; nt < nn; ++nt) {
    for (auto [m, n] : ag.reach_.pairs(nt)) {
      ++out_count[static_cast<std::size_t>(nt) * nv + m];
      ++in_count[static_cast<std::size_t>(nt) * nv + n];
    }
  }
  for (std::uint32_t rid : rules.binary) {
    const CnfRule& r = ag.grammar_.rules()[rid];
    for (std::uint32_t o = 0; o < nv; ++o) {
      ag.binary_rule_count_ += in_count[static_cast<std::size_t>(r.left) * nv + o] *
                               out_count[static_cast<std::size_t>(r.right) * nv + o];
    }
  }

  // Size bounds hold by construction; a violation means a bug upstream.
  const std::uint64_t v2 = static_cast<std::uint64_t>(nv) * nv;
  if (ag.reach_.size() > static_cast<std::uint64_t>(nn) * v2 ||
      ag.binary_rule_count_ > g.rules().size() * v2 * nv ||
      ag.terminal_rule_count_ >
          static_cast<std::uint64_t>(std::min<std::size_t>(nn, g.rules().size())) *
              ag.graph_.edge_count()) {
    throw std::logic_error("annotated grammar exceeds its size bounds");
  }
  return ag;
}

std::vector<AnnotatedRule> AnnotatedGrammar::materialize_rules() const {
  std::vector<AnnotatedRule> out;
  const DedupedRules rules = dedup_rules(grammar_);
  const auto targets = reach_targets(reach_);
  const std::uint32_t nv = graph_.node_count();

  auto sym = [&](std::uint32_t nt, std::uint32_t m, std::uint32_t n) {
    return AnnotatedNonterminal{grammar_.nonterminal_name(nt), graph_.node_name(m),
                                graph_.node_name(n)};
  };

  for (std::uint32_t rid : rules.terminal) {
    const CnfRule& r = grammar_.rules()[rid];
    auto label = graph_.find_label(grammar_.terminal_name(r.terminal));
    if (!label) continue;
    for (auto [m, n] : graph_.edges_with_label(*label)) {
      AnnotatedRule rule;
      rule.head = sym(r.head, m, n);
      rule.is_terminal = true;
      rule.label = graph_.label_name(*label);
      out.push_back(std::move(rule));
    }
  }
  for (std::uint32_t rid : rules.binary) {
    const CnfRule& r = grammar_.rules()[rid];
    for (std::uint32_t m = 0; m < nv; ++m) {
      for (std::uint32_t o : targets[static_cast<std::size_t>(r.left) * nv + m]) {
        for (std::uint32_t n : targets[static_cast<std::size_t>(r.right) * nv + o]) {
          AnnotatedRule rule;
          rule.head = sym(r.head, m, n);
          rule.left = sym(r.left, m, o);
          rule.right = sym(r.right, o, n);
          out.push_back(std::move(rule));
        }
      }
    }
  }
  return out;
}

Grammar AnnotatedGrammar::as_plain_grammar() const {
  GrammarBuilder builder;
  const std::uint32_t nv = graph_.node_count();
  const auto targets = reach_targets(reach_);

  auto mangle = [&](std::uint32_t nt, std::uint32_t m, std::uint32_t n) {
    return grammar_.nonterminal_name(nt) + "(" + graph_.node_name(m) + "," +
           graph_.node_name(n) + ")";
  };

  for (std::uint32_t nt = 0; nt < grammar_.nonterminal_count(); ++nt) {
    for (std::uint32_t m = 0; m < nv; ++m) {
      for (std::uint32_t n : targets[static_cast<std::size_t>(nt) * nv + m]) {
        builder.nonterminal(mangle(nt, m, n));
      }
    }
  }

  const DedupedRules rules = dedup_rules(grammar_);
  for (std::uint32_t rid : rules.terminal) {
    const CnfRule& r = grammar_.rules()[rid];
    auto label = graph_.find_label(grammar_.terminal_name(r.terminal));
    if (!label) continue;
    for (auto [m, n] : graph_.edges_with_label(*label)) {
      builder.terminal_rule(mangle(r.head, m, n), graph_.label_name(*label));
    }
  }
  for (std::uint32_t rid : rules.binary) {
    const CnfRule& r = grammar_.rules()[rid];
    for (std::uint32_t m = 0; m < nv; ++m) {
      for (std::uint32_t o : targets[static_cast<std::size_t>(r.left) * nv + m]) {
        for (std::uint32_t n : targets[static_cast<std::size_t>(r.right) * nv + o]) {
          builder.binary_rule(mangle(r.head, m, n), mangle(r.left, m, o),
                              mangle(r.right, o, n));
        }
      }
    }
  }
  return builder.build();
}

// ---------------------------------------------------------------------------
// Best-first path enumeration
// ---------------------------------------------------------------------------

namespace {

struct EnumItem {
  bool is_edge;
  std::uint32_t from;
  std::uint32_t to;
  std::uint32_t sym;  // graph label id for edges, nonterminal id otherwise
};

struct EnumState {
  std::vector<EnumItem> items;
  std::uint64_t bound = 0;   // admissible lower bound on the final edge count
  std::uint32_t next = 0;    // leftmost nonterminal item; items.size() = complete
};

constexpr std::uint64_t kHuge = UINT64_MAX / 4;

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t sum;
  if (__builtin_add_overflow(a, b, &sum) || sum > kHuge) return kHuge;
  return sum;
}

}  // namespace

std::vector<Path> enumerate_paths(const AnnotatedGrammar& ag,
                                  const AnnotatedNonterminal& start,
                                  std::size_t max_paths, std::size_t max_len) {
  const Grammar& g = ag.grammar();
  const Graph& graph = ag.graph();

  const std::uint32_t nt = g.nonterminal_id(start.nt);
  const auto from = graph.find_node(start.from);
  const auto to = graph.find_node(start.to);
  if (!from || !to || !ag.contains(nt, *from, *to) || max_paths == 0) return {};

  // Minimum completion lengths double as admissible estimates.
  const AnnotatedMinimizingSet ms = minimize_annotated(g, graph);
  auto estimate = [&](std::uint32_t a, std::uint32_t m, std::uint32_t n) -> std::uint64_t {
    Cost c = ms.cost(a, m, n);
    return c > kHuge ? kHuge : static_cast<std::uint64_t>(c);
  };

  const auto targets = reach_targets(ag.reach());
  const std::uint32_t nv = graph.node_count();

  std::vector<std::vector<std::uint32_t>> term_by_head(g.nonterminal_count());
  std::vector<std::vector<std::uint32_t>> binary_by_head(g.nonterminal_count());
  for (std::uint32_t rid = 0; rid < g.rules().size(); ++rid) {
    const CnfRule& r = g.rules()[rid];
    (r.is_terminal ? term_by_head : binary_by_head)[r.head].push_back(rid);
  }

  auto state_bound = [&](const EnumState& s) {
    std::uint64_t bound = 0;
    for (const EnumItem& item : s.items) {
      bound = saturating_add(bound, item.is_edge ? 1 : estimate(item.sym, item.from, item.to));
    }
    return bound;
  };

  auto compare = [](const EnumState& a, const EnumState& b) { return a.bound > b.bound; };
  std::priority_queue<EnumState, std::vector<EnumState>, decltype(compare)> queue(compare);

  EnumState root;
  root.items = {EnumItem{false, *from, *to, nt}};
  root.bound = state_bound(root);
  root.next = 0;
  if (root.bound <= max_len) queue.push(std::move(root));

  using PathKey = std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>;
  std::map<std::size_t, std::set<PathKey>> pending;  // length -> paths
  std::vector<Path> result;
  std::size_t expansions = 0;

  auto flush_below = [&](std::uint64_t bound) {
    while (!pending.empty() && pending.begin()->first < bound) {
      std::vector<Path> batch;
      for (const PathKey& key : pending.begin()->second) {
        batch.emplace_back(graph, key.first, key.second);
      }
      std::sort(batch.begin(), batch.end(), path_order_less);
      for (Path& p : batch) {
        result.push_back(std::move(p));
        if (result.size() >= max_paths) return true;
      }
      pending.erase(pending.begin());
    }
    return false;
  };

  while (!queue.empty()) {
    EnumState state = queue.top();
    queue.pop();
    if (state.bound > max_len) break;
    if (flush_below(state.bound)) return result;

    if (state.next == state.items.size()) {
      PathKey key;
      key.first.reserve(state.items.size() + 1);
      key.first.push_back(state.items.front().from);
      for (const EnumItem& item : state.items) {
        key.first.push_back(item.to);
        key.second.push_back(item.sym);
      }
      pending[state.items.size()].insert(std::move(key));
      continue;
    }

    if (++expansions > 1'000'000) {
      throw std::runtime_error("path enumeration exceeded its state budget");
    }

    const EnumItem item = state.items[state.next];
    auto push_child = [&](EnumState child) {
      child.bound = state_bound(child);
      while (child.next < child.items.size() && child.items[child.next].is_edge) {
        ++child.next;
      }
      if (child.bound <= max_len) queue.push(std::move(child));
    };

    for (std::uint32_t rid : term_by_head[item.sym]) {
      const CnfRule& r = g.rules()[rid];
      auto label = graph.find_label(g.terminal_name(r.terminal));
      if (!label || !graph.has_edge(item.from, *label, item.to)) continue;
      EnumState child = state;
      child.items[state.next] = EnumItem{true, item.from, item.to, *label};
      push_child(std::move(child));
    }
    for (std::uint32_t rid : binary_by_head[item.sym]) {
      const CnfRule& r = g.rules()[rid];
      for (std::uint32_t o : targets[static_cast<std::size_t>(r.left) * nv + item.from]) {
        if (!ag.contains(r.right, o, item.to)) continue;
        EnumState child = state;
        child.items[state.next] = EnumItem{false, item.from, o, r.left};
        child.items.insert(child.items.begin() + state.next + 1,
                           EnumItem{false, o, item.to, r.right});
        push_child(std::move(child));
      }
    }
  }
  flush_below(UINT64_MAX);
  return result;
}

// ---------------------------------------------------------------------------
// Specific-path derivation
// ---------------------------------------------------------------------------

std::size_t PathDerivation::leaf_count() const { return leaf_edges().size(); }

std::vector<std::array<std::uint32_t, 3>> PathDerivation::leaf_edges() const {
  std::vector<std::array<std::uint32_t, 3>> out;
  if (root == kNone) return out;
  std::vector<std::uint32_t> stack{root};
  while (!stack.empty()) {
    const Node& node = nodes[stack.back()];
    stack.pop_back();
    if (node.is_terminal) {
      out.push_back({node.from, node.label, node.to});
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
  return out;
}

Path PathDerivation::to_path(const Graph& g) const {
  const auto leaves = leaf_edges();
  if (leaves.empty()) throw std::logic_error("empty derivation");
  std::vector<std::uint32_t> path_nodes{leaves.front()[0]};
  std::vector<std::uint32_t> labels;
  for (const auto& e : leaves) {
    labels.push_back(e[1]);
    path_nodes.push_back(e[2]);
  }
  return Path(g, std::move(path_nodes), std::move(labels));
}

std::optional<PathDerivation> derive_specific_path(const AnnotatedGrammar& ag,
                                                   const AnnotatedNonterminal& start,
                                                   const Path& p) {
  const Grammar& g = ag.grammar();
  const Graph& graph = ag.graph();

  const std::uint32_t nt = g.nonterminal_id(start.nt);
  const auto from = graph.find_node(start.from);
  const auto to = graph.find_node(start.to);
  if (!from || !to) return std::nullopt;

  const auto nodes = p.node_ids();
  const auto labels = p.label_ids();
  const std::size_t n = p.length();
  if (n == 0 || nodes.front() != *from || nodes.back() != *to) return std::nullopt;
  if (!validate_path(graph, p)) return std::nullopt;

  // Positioned CYK over the path: cell (i, len) holds, per nonterminal, the
  // chosen rule and split. Splits are aligned with path positions, which is
  // exactly the annotated-rule chaining constraint.
  struct Back {
    std::uint32_t rule = kNone;
    std::uint32_t split = 0;
    bool set = false;
  };
  const std::uint32_t nn = g.nonterminal_count();
  std::vector<Back> chart(n * n * nn);
  auto cell = [&](std::size_t i, std::size_t len) {
    return chart.data() + ((len - 1) * n + i) * nn;
  };

  for (std::size_t i = 0; i < n; ++i) {
    auto term = g.find_terminal(graph.label_name(labels[i]));
    if (!term) continue;
    for (std::uint32_t rid : g.rules_with_terminal(*term)) {
      Back& b = cell(i, 1)[g.rules()[rid].head];
      if (!b.set) b = Back{rid, 0, true};
    }
  }
  for (std::size_t len = 2; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      Back* out = cell(i, len);
      for (std::size_t split = 1; split < len; ++split) {
        const Back* lhs = cell(i, split);
        const Back* rhs = cell(i + split, len - split);
        for (std::uint32_t rid = 0; rid < g.rules().size(); ++rid) {
          const CnfRule& r = g.rules()[rid];
          if (r.is_terminal || out[r.head].set) continue;
          if (lhs[r.left].set && rhs[r.right].set) {
            out[r.head] = Back{rid, static_cast<std::uint32_t>(split), true};
          }
        }
      }
    }
  }
  if (!cell(0, n)[nt].set) return std::nullopt;

  PathDerivation derivation;
  // Iterative tree construction; children are filled in after both subtrees
  // exist.
  struct Frame {
    std::size_t i, len;
    std::uint32_t nt;
    std::uint32_t parent;  // node index to patch, kNone for root
    bool left_child;
  };
  std::vector<Frame> stack{{0, n, nt, kNone, false}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const Back& b = cell(f.i, f.len)[f.nt];
    assert(b.set);
    const CnfRule& rule = g.rules()[b.rule];

    PathDerivation::Node node;
    node.nt = f.nt;
    node.from = nodes[f.i];
    node.to = nodes[f.i + f.len];
    const std::uint32_t index = static_cast<std::uint32_t>(derivation.nodes.size());
    if (rule.is_terminal) {
      node.is_terminal = true;
      node.label = labels[f.i];
    }
    derivation.nodes.push_back(node);
    if (f.parent == kNone) {
      derivation.root = index;
    } else if (f.left_child) {
      derivation.nodes[f.parent].left = index;
    } else {
      derivation.nodes[f.parent].right = index;
    }
    if (!rule.is_terminal) {
      stack.push_back({f.i + b.split, f.len - b.split, rule.right, index, false});
      stack.push_back({f.i, static_cast<std::size_t>(b.split), rule.left, index, true});
    }
  }
  return derivation;
}

}  // namespace cfpq
