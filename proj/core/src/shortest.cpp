#include "cfpq/shortest.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

namespace cfpq {

void MinimizingSet::set(std::uint32_t nt, ChosenRule rule, Cost cost) {
  if (nt >= entries_.size()) {
    throw UnknownSymbolError("nonterminal id out of range");
  }
  if (!entries_[nt].has_value()) domain_.push_back(nt);
  entries_[nt] = std::make_pair(rule, std::move(cost));
}

namespace {

ChosenRule chosen_from(const Grammar& g, std::uint32_t rule_index) {
  const CnfRule& r = g.rules()[rule_index];
  ChosenRule c;
  c.is_terminal = r.is_terminal;
  c.terminal = r.terminal;
  c.left = r.left;
  c.right = r.right;
  c.rule_index = rule_index;
  return c;
}

struct HeapEntry {
  Cost priority;
  std::uint32_t nt;

  bool operator>(const HeapEntry& other) const {
    if (priority != other.priority) return priority > other.priority;
    return nt > other.nt;
  }
};

}  // namespace

MinimizingSet minimize(const Grammar& g) {
  const std::uint32_t nn = g.nonterminal_count();
  MinimizingSet ms(nn);
  MinimizeStats& stats = ms.stats();

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> queue;
  std::vector<std::uint32_t> inserts(nn, 0);

  // Seed: every head of a terminal rule costs 1; the first such rule wins.
  for (std::uint32_t rid : g.terminal_rule_ids()) {
    const std::uint32_t head = g.rules()[rid].head;
    if (ms.contains(head)) continue;
    ms.set(head, chosen_from(g, rid), 1);
    queue.push({Cost(1), head});
    ++stats.queue_pushes;
    ++inserts[head];
  }

  auto produce = [&](std::uint32_t rid) {
    ++stats.produce_calls;
    const CnfRule& rule = g.rules()[rid];
    Cost sum = ms.cost(rule.left) + ms.cost(rule.right);
    if (!ms.contains(rule.head)) {
      ms.set(rule.head, chosen_from(g, rid), sum);
      queue.push({std::move(sum), rule.head});
      ++stats.queue_pushes;
      ++inserts[rule.head];
    } else if (ms.cost(rule.head) > sum) {
      // Decrease-key as re-insert; the stale higher entry is skipped later.
      ms.set(rule.head, chosen_from(g, rid), sum);
      queue.push({std::move(sum), rule.head});
      ++stats.queue_pushes;
    }
  };

  Cost last_extracted(0);
  while (!queue.empty()) {
    HeapEntry top = queue.top();
    queue.pop();
    if (ms.cost(top.nt) != top.priority) continue;  // stale
    ++stats.extractions;
    if (top.priority < last_extracted) stats.extractions_monotone = false;
    last_extracted = top.priority;

    const std::uint32_t extracted = top.nt;
    for (std::uint32_t rid : g.rules_with_first(extracted)) {
      if (ms.contains(g.rules()[rid].right)) produce(rid);
    }
    for (std::uint32_t rid : g.rules_with_second(extracted)) {
      if (ms.contains(g.rules()[rid].left)) produce(rid);
    }
  }

  for (std::uint32_t nt = 0; nt < nn; ++nt) {
    if (inserts[nt] > 1) stats.single_insertion = false;
  }
  return ms;
}

std::optional<std::vector<std::string>> derive_min_string(const Grammar& g,
                                                          const MinimizingSet& ms,
                                                          std::string_view nt) {
  const std::uint32_t start = g.nonterminal_id(nt);
  if (!ms.contains(start)) return std::nullopt;

  std::vector<std::string> out;
  std::vector<std::uint32_t> stack{start};
  while (!stack.empty()) {
    const std::uint32_t cur = stack.back();
    stack.pop_back();
    const ChosenRule& rule = ms.chosen(cur);
    if (rule.is_terminal) {
      out.push_back(g.terminal_name(rule.terminal));
    } else {
      stack.push_back(rule.right);
      stack.push_back(rule.left);
    }
  }
  return out;
}

std::vector<std::string> check_minimizing(const Grammar& g, const MinimizingSet& ms) {
  std::vector<std::string> violations;
  const std::uint32_t nn = g.nonterminal_count();

  auto name = [&](std::uint32_t nt) { return g.nonterminal_name(nt); };

  for (std::uint32_t nt : ms.domain()) {
    const ChosenRule& rule = ms.chosen(nt);
    const Cost& cost = ms.cost(nt);
    if (cost < 1) {
      violations.push_back("cost[" + name(nt) + "] < 1");
    }
    if (rule.is_terminal) {
      if (cost != 1) {
        violations.push_back("terminal rule for " + name(nt) + " has cost " +
                             cost.str() + ", expected 1");
      }
      continue;
    }
    if (!ms.contains(rule.left) || !ms.contains(rule.right)) {
      violations.push_back("chosen rule for " + name(nt) +
                           " references a head outside the domain");
      continue;
    }
    if (ms.cost(rule.left) + ms.cost(rule.right) != cost) {
      violations.push_back("cost[" + name(nt) + "] = " + cost.str() +
                           " != cost[" + name(rule.left) + "] + cost[" +
                           name(rule.right) + "]");
    }
    if (cost <= ms.cost(rule.left) || cost <= ms.cost(rule.right)) {
      violations.push_back("cost[" + name(nt) + "] not strictly above its parts");
    }
  }

  // Non-recursion: the chosen-rule graph head -> body heads must be acyclic.
  {
    std::vector<int> state(nn, 0);  // 0 unvisited, 1 on stack, 2 done
    std::vector<std::uint32_t> cycle_at;
    for (std::uint32_t root : ms.domain()) {
      if (state[root] != 0) continue;
      std::vector<std::pair<std::uint32_t, int>> stack{{root, 0}};
      state[root] = 1;
      while (!stack.empty()) {
        const std::uint32_t cur = stack.back().first;
        const ChosenRule& rule = ms.chosen(cur);
        const std::uint32_t children[2] = {rule.left, rule.right};
        bool pushed = false;
        while (!rule.is_terminal && stack.back().second < 2) {
          const std::uint32_t child = children[stack.back().second++];
          if (!ms.contains(child)) continue;
          if (state[child] == 1) {
            cycle_at.push_back(child);
            continue;
          }
          if (state[child] == 0) {
            state[child] = 1;
            stack.emplace_back(child, 0);
            pushed = true;
            break;
          }
        }
        if (pushed) continue;
        state[cur] = 2;
        stack.pop_back();
      }
    }
    for (std::uint32_t nt : cycle_at) {
      violations.push_back("chosen rules are recursive through " + name(nt));
    }
  }

  // Independent recomputation of minimum lengths by fixpoint relaxation over
  // the full grammar, no queue involved. Converges within |nonterminals|
  // rounds because every round settles at least one more nonterminal.
  {
    std::vector<std::optional<Cost>> best(nn);
    for (std::uint32_t round = 0; round <= nn; ++round) {
      bool changed = false;
      for (const CnfRule& r : g.rules()) {
        std::optional<Cost> candidate;
        if (r.is_terminal) {
          candidate = Cost(1);
        } else if (best[r.left] && best[r.right]) {
          candidate = *best[r.left] + *best[r.right];
        }
        if (candidate && (!best[r.head] || *candidate < *best[r.head])) {
          best[r.head] = std::move(candidate);
          changed = true;
        }
      }
      if (!changed) break;
    }
    for (std::uint32_t nt = 0; nt < nn; ++nt) {
      const bool in_domain = ms.contains(nt);
      if (in_domain && !best[nt]) {
        violations.push_back(name(nt) + " is costed but its language is empty");
      } else if (!in_domain && best[nt]) {
        violations.push_back(name(nt) + " has minimum length " + best[nt]->str() +
                             " but is missing from the domain");
      } else if (in_domain && ms.cost(nt) != *best[nt]) {
        violations.push_back("cost[" + name(nt) + "] = " + ms.cost(nt).str() +
                             " > minimum length " + best[nt]->str());
      }
    }
  }

  return violations;
}

std::string minimizing_set_tsv(const Grammar& g, const MinimizingSet& ms) {
  std::string out;
  for (std::uint32_t nt : ms.domain()) {
    const ChosenRule& rule = ms.chosen(nt);
    out += g.nonterminal_name(nt);
    out += '\t';
    out += ms.cost(nt).str();
    out += '\t';
    if (rule.rule_index != kNone) {
      out += g.rule_text(rule.rule_index);
    } else if (rule.is_terminal) {
      out += g.nonterminal_name(nt) + " -> \"" + g.terminal_name(rule.terminal) + "\"";
    } else {
      out += g.nonterminal_name(nt) + " -> " + g.nonterminal_name(rule.left) + " " +
             g.nonterminal_name(rule.right);
    }
    out += '\n';
  }
  return out;
}

}  // namespace cfpq
