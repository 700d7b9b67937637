#include "cfpq/oracle.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace cfpq {

namespace {

struct RawPath {
  std::vector<std::uint32_t> nodes;
  std::vector<std::uint32_t> labels;
};

}  // namespace

BoundedPathSet enum_paths(const Graph& g, std::string_view from, std::size_t max_len,
                          const std::optional<std::string>& to,
                          std::size_t max_states) {
  const std::uint32_t start = g.node_id(from);
  std::optional<std::uint32_t> target;
  if (to) target = g.node_id(*to);

  BoundedPathSet out;
  std::size_t states = 1;
  std::vector<RawPath> frontier{{{start}, {}}};

  auto collect = [&](const RawPath& p) {
    if (target && p.nodes.back() != *target) return;
    out.paths.emplace_back(g, p.nodes, p.labels);
  };

  collect(frontier.front());
  for (std::size_t len = 1; len <= max_len && !frontier.empty(); ++len) {
    std::vector<RawPath> next;
    for (const RawPath& p : frontier) {
      for (const Edge& e : g.out_edges(p.nodes.back())) {
        if (++states > max_states) {
          out.truncated = true;
          std::sort(out.paths.begin(), out.paths.end(), path_order_less);
          return out;
        }
        RawPath extended = p;
        extended.nodes.push_back(e.to);
        extended.labels.push_back(e.label);
        collect(extended);
        next.push_back(std::move(extended));
      }
    }
    frontier = std::move(next);
  }
  std::sort(out.paths.begin(), out.paths.end(), path_order_less);
  return out;
}

std::optional<std::uint64_t> brute_min_path(const Grammar& g, std::string_view nt,
                                            const Graph& graph, std::string_view from,
                                            std::string_view to, std::size_t bound) {
  const std::uint32_t id = g.nonterminal_id(nt);
  const std::uint32_t start = graph.node_id(from);
  const std::uint32_t target = graph.node_id(to);

  std::vector<RawPath> frontier{{{start}, {}}};
  for (std::size_t len = 1; len <= bound && !frontier.empty(); ++len) {
    std::vector<RawPath> next;
    for (const RawPath& p : frontier) {
      for (const Edge& e : graph.out_edges(p.nodes.back())) {
        RawPath extended = p;
        extended.nodes.push_back(e.to);
        extended.labels.push_back(e.label);
        next.push_back(std::move(extended));
      }
    }
    if (next.size() > 5'000'000) {
      throw std::runtime_error("brute_min_path: path count explosion");
    }
    for (const RawPath& p : next) {
      if (p.nodes.back() != target) continue;
      std::vector<std::string> trace;
      trace.reserve(p.labels.size());
      for (std::uint32_t l : p.labels) trace.push_back(graph.label_name(l));
      if (cyk_member(g, id, trace)) return len;
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

std::size_t BruteMinTable::entries() const {
  std::size_t n = 0;
  for (std::uint64_t v : min_) n += (v != kAbsent);
  return n;
}

BruteMinTable brute_min_table(const Grammar& g, const Graph& graph, std::size_t bound) {
  const std::uint32_t nn = g.nonterminal_count();
  const std::uint32_t nv = graph.node_count();
  if (nn > 64 || nv > 64) {
    throw std::invalid_argument("brute_min_table supports at most 64 nonterminals and nodes");
  }
  BruteMinTable table(nn, nv);
  if (nn == 0 || nv == 0 || bound == 0) return table;

  // Per-label successor bitrows.
  std::vector<std::vector<std::uint64_t>> step(graph.label_count(),
                                               std::vector<std::uint64_t>(nv, 0));
  for (const Edge& e : graph.edges()) {
    step[e.label][e.from] |= std::uint64_t{1} << e.to;
  }
  // Labels that no terminal rule produces can never appear in a trace.
  std::vector<std::uint32_t> live_labels;
  for (std::uint32_t l = 0; l < graph.label_count(); ++l) {
    auto term = g.find_terminal(graph.label_name(l));
    if (term && !g.rules_with_terminal(*term).empty()) live_labels.push_back(l);
  }

  // DFS over label strings. reach[d] is the per-source reach relation of the
  // current depth-d prefix; chart(i, len) its CYK nonterminal masks.
  std::vector<std::vector<std::uint64_t>> reach(bound + 1,
                                                std::vector<std::uint64_t>(nv, 0));
  for (std::uint32_t m = 0; m < nv; ++m) reach[0][m] = std::uint64_t{1} << m;
  std::vector<std::uint64_t> chart(bound * bound, 0);
  auto cell = [&](std::size_t i, std::size_t len) -> std::uint64_t& {
    return chart[(len - 1) * bound + i];
  };

  std::vector<std::uint32_t> binary_rules;
  for (std::uint32_t rid = 0; rid < g.rules().size(); ++rid) {
    if (!g.rules()[rid].is_terminal) binary_rules.push_back(rid);
  }

  auto dfs = [&](auto&& self, std::size_t depth) -> void {
    if (depth == bound) return;
    const std::size_t d = depth + 1;
    for (std::uint32_t label : live_labels) {
      for (std::uint32_t m = 0; m < nv; ++m) {
        std::uint64_t row = 0;
        std::uint64_t sources = reach[depth][m];
        while (sources) {
          const int bit = __builtin_ctzll(sources);
          sources &= sources - 1;
          row |= step[label][bit];
        }
        reach[d][m] = row;
      }

      const std::uint32_t term = *g.find_terminal(graph.label_name(label));
      std::uint64_t base = 0;
      for (std::uint32_t rid : g.rules_with_terminal(term)) {
        base |= std::uint64_t{1} << g.rules()[rid].head;
      }
      cell(d - 1, 1) = base;
      for (std::size_t len = 2; len <= d; ++len) {
        const std::size_t i = d - len;
        std::uint64_t mask = 0;
        for (std::size_t split = 1; split < len; ++split) {
          const std::uint64_t lhs = cell(i, split);
          const std::uint64_t rhs = cell(i + split, len - split);
          for (std::uint32_t rid : binary_rules) {
            const CnfRule& r = g.rules()[rid];
            if ((lhs >> r.left & 1) && (rhs >> r.right & 1)) {
              mask |= std::uint64_t{1} << r.head;
            }
          }
        }
        cell(i, len) = mask;
      }

      std::uint64_t accepted = cell(0, d);
      while (accepted) {
        const std::uint32_t nt = static_cast<std::uint32_t>(__builtin_ctzll(accepted));
        accepted &= accepted - 1;
        for (std::uint32_t m = 0; m < nv; ++m) {
          std::uint64_t dests = reach[d][m];
          while (dests) {
            const int n = __builtin_ctzll(dests);
            dests &= dests - 1;
            table.update(nt, m, static_cast<std::uint32_t>(n), d);
          }
        }
      }
      self(self, d);
    }
  };
  dfs(dfs, 0);
  return table;
}

std::optional<std::uint64_t> brute_min_string(const Grammar& g, std::string_view nt,
                                              std::size_t bound) {
  const std::uint32_t start = g.nonterminal_id(nt);
  const std::uint32_t nt_offset = g.terminal_count();
  using Form = std::vector<std::uint32_t>;  // terminal ids, then nt_offset + nt ids

  auto leftmost_nt = [&](const Form& form) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < form.size(); ++i) {
      if (form[i] >= nt_offset) return i;
    }
    return std::nullopt;
  };

  std::set<Form> layer{{nt_offset + start}};
  for (std::size_t len = 1; len <= bound; ++len) {
    std::set<Form> next_layer;
    // Close the layer under length-preserving (terminal) rewrites; collect the
    // length-growing (binary) rewrites for the next layer.
    std::vector<Form> worklist(layer.begin(), layer.end());
    std::set<Form> seen = std::move(layer);
    while (!worklist.empty()) {
      Form form = std::move(worklist.back());
      worklist.pop_back();
      auto pos = leftmost_nt(form);
      if (!pos) return len;  // all terminals: a minimum-length witness
      const std::uint32_t head = form[*pos] - nt_offset;
      for (std::uint32_t rid = 0; rid < g.rules().size(); ++rid) {
        const CnfRule& r = g.rules()[rid];
        if (r.head != head) continue;
        Form next = form;
        if (r.is_terminal) {
          next[*pos] = r.terminal;
          if (seen.insert(next).second) {
            if (seen.size() > 2'000'000) {
              throw std::runtime_error("brute_min_string: form explosion");
            }
            worklist.push_back(std::move(next));
          }
        } else {
          next[*pos] = nt_offset + r.left;
          next.insert(next.begin() + static_cast<std::ptrdiff_t>(*pos) + 1,
                      nt_offset + r.right);
          next_layer.insert(std::move(next));
        }
      }
    }
    layer = std::move(next_layer);
  }
  return std::nullopt;
}

std::vector<std::array<std::uint32_t, 3>> naive_reach(const Grammar& g,
                                                      const Graph& graph) {
  const std::uint32_t nn = g.nonterminal_count();
  const std::uint32_t nv = graph.node_count();
  std::vector<std::uint8_t> reach(static_cast<std::size_t>(nn) * nv * nv, 0);
  auto at = [&](std::uint32_t a, std::uint32_t m, std::uint32_t n) -> std::uint8_t& {
    return reach[(static_cast<std::size_t>(a) * nv + m) * nv + n];
  };

  for (std::uint32_t rid : g.terminal_rule_ids()) {
    const CnfRule& r = g.rules()[rid];
    if (auto label = graph.find_label(g.terminal_name(r.terminal))) {
      for (auto [m, n] : graph.edges_with_label(*label)) at(r.head, m, n) = 1;
    }
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (const CnfRule& r : g.rules()) {
      if (r.is_terminal) continue;
      for (std::uint32_t m = 0; m < nv; ++m) {
        for (std::uint32_t o = 0; o < nv; ++o) {
          if (!at(r.left, m, o)) continue;
          for (std::uint32_t n = 0; n < nv; ++n) {
            if (at(r.right, o, n) && !at(r.head, m, n)) {
              at(r.head, m, n) = 1;
              changed = true;
            }
          }
        }
      }
    }
  }

  std::vector<std::array<std::uint32_t, 3>> out;
  for (std::uint32_t a = 0; a < nn; ++a) {
    for (std::uint32_t m = 0; m < nv; ++m) {
      for (std::uint32_t n = 0; n < nv; ++n) {
        if (at(a, m, n)) out.push_back({a, m, n});
      }
    }
  }
  return out;
}

}  // namespace cfpq
