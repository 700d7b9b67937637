#include "cfpq/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace cfpq {

std::optional<std::uint32_t> Graph::find_node(std::string_view name) const {
  auto it = node_ids_.find(std::string(name));
  if (it == node_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Graph::find_label(std::string_view name) const {
  auto it = label_ids_.find(std::string(name));
  if (it == label_ids_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t Graph::node_id(std::string_view name) const {
  if (auto id = find_node(name)) return *id;
  throw UnknownSymbolError("unknown node: " + std::string(name));
}

std::span<const Edge> Graph::out_edges(std::uint32_t node) const {
  return {edges_.data() + out_offsets_.at(node),
          edges_.data() + out_offsets_.at(node + 1)};
}

std::span<const Edge> Graph::in_edges(std::uint32_t node) const {
  return {in_sorted_.data() + in_offsets_.at(node),
          in_sorted_.data() + in_offsets_.at(node + 1)};
}

bool Graph::has_edge(std::uint32_t from, std::uint32_t label, std::uint32_t to) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{from, label, to});
}

std::uint32_t GraphBuilder::node(const std::string& name) {
  auto [it, inserted] = g_.node_ids_.try_emplace(
      name, static_cast<std::uint32_t>(g_.node_names_.size()));
  if (inserted) g_.node_names_.push_back(name);
  return it->second;
}

std::uint32_t GraphBuilder::label(const std::string& name) {
  auto [it, inserted] = g_.label_ids_.try_emplace(
      name, static_cast<std::uint32_t>(g_.label_names_.size()));
  if (inserted) g_.label_names_.push_back(name);
  return it->second;
}

void GraphBuilder::edge(const std::string& from, const std::string& label_name,
                        const std::string& to) {
  g_.edges_.push_back(Edge{node(from), label(label_name), node(to)});
}

Graph GraphBuilder::build() {
  for (const auto& n : g_.node_names_) {
    if (g_.label_ids_.count(n)) {
      throw std::invalid_argument("'" + n + "' used as both node and edge label");
    }
  }
  std::sort(g_.edges_.begin(), g_.edges_.end());
  g_.edges_.erase(std::unique(g_.edges_.begin(), g_.edges_.end()), g_.edges_.end());

  g_.in_sorted_ = g_.edges_;
  std::sort(g_.in_sorted_.begin(), g_.in_sorted_.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.to, a.label, a.from) < std::tie(b.to, b.label, b.from);
  });

  const std::uint32_t n = g_.node_count();
  g_.out_offsets_.assign(n + 1, 0);
  g_.in_offsets_.assign(n + 1, 0);
  for (const Edge& e : g_.edges_) g_.out_offsets_[e.from + 1]++;
  for (const Edge& e : g_.in_sorted_) g_.in_offsets_[e.to + 1]++;
  for (std::uint32_t i = 0; i < n; ++i) {
    g_.out_offsets_[i + 1] += g_.out_offsets_[i];
    g_.in_offsets_[i + 1] += g_.in_offsets_[i];
  }

  g_.by_label_.assign(g_.label_count(), {});
  for (const Edge& e : g_.edges_) g_.by_label_[e.label].emplace_back(e.from, e.to);

  return std::move(g_);
}

Graph load_graph(std::string_view text) {
  GraphBuilder builder;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.emplace_back(line.substr(start, tab == std::string_view::npos
                                                 ? line.size() - start
                                                 : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields.size() == 2 && fields[0] == "node") {
      if (fields[1].empty()) throw ParseError(line_no, "empty node id");
      builder.node(fields[1]);
      continue;
    }
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw ParseError(line_no, "empty field in edge line");
    }
    builder.edge(fields[0], fields[1], fields[2]);
  }
  try {
    return builder.build();
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
}

std::string serialize_graph(const Graph& g) {
  std::string out;
  std::vector<bool> mentioned(g.node_count(), false);
  for (const Edge& e : g.edges()) {
    out += g.node_name(e.from);
    out += '\t';
    out += g.label_name(e.label);
    out += '\t';
    out += g.node_name(e.to);
    out += '\n';
    mentioned[e.from] = true;
    mentioned[e.to] = true;
  }
  for (std::uint32_t n = 0; n < g.node_count(); ++n) {
    if (!mentioned[n]) {
      out += "node\t";
      out += g.node_name(n);
      out += '\n';
    }
  }
  return out;
}

Graph gen_cycle(std::size_t n, const std::string& label) {
  if (n == 0) throw std::invalid_argument("cycle size must be at least 1");
  GraphBuilder builder;
  for (std::size_t i = 0; i < n; ++i) {
    builder.edge("n" + std::to_string(i), label, "n" + std::to_string((i + 1) % n));
  }
  return builder.build();
}

Graph gen_double_cycle(std::size_t u, std::size_t v, const std::string& label1,
                       const std::string& label2) {
  if (u == 0 || v == 0) throw std::invalid_argument("cycle sizes must be at least 1");
  GraphBuilder builder;
  auto ring = [&](std::size_t len, const std::string& label, const std::string& prefix) {
    std::string prev = "c";
    for (std::size_t i = 1; i < len; ++i) {
      std::string next = prefix + std::to_string(i);
      builder.edge(prev, label, next);
      prev = std::move(next);
    }
    builder.edge(prev, label, "c");
  };
  ring(u, label1, "m");
  ring(v, label2, "n");
  return builder.build();
}

Graph gen_social_network() {
  GraphBuilder builder;
  builder.edge("Alice", "friendOf", "Bob");
  builder.edge("Alice", "friendOf", "Craig");
  builder.edge("Bob", "friendOf", "Dan");
  builder.edge("Craig", "friendOf", "Eve");
  builder.edge("Dan", "friendOf", "Eve");
  builder.node("Faythe");
  return builder.build();
}

Path::Path(const Graph& g, std::vector<std::uint32_t> nodes,
           std::vector<std::uint32_t> labels)
    : graph_(&g), nodes_(std::move(nodes)), labels_(std::move(labels)) {
  if (nodes_.empty() || nodes_.size() != labels_.size() + 1) {
    throw std::invalid_argument("path needs k+1 nodes for k labels");
  }
}

Path Path::from_names(const Graph& g, const std::vector<std::string>& nodes,
                      const std::vector<std::string>& labels) {
  std::vector<std::uint32_t> node_ids, label_ids;
  node_ids.reserve(nodes.size());
  label_ids.reserve(labels.size());
  for (const auto& n : nodes) node_ids.push_back(g.node_id(n));
  for (const auto& l : labels) {
    auto id = g.find_label(l);
    if (!id) throw UnknownSymbolError("unknown edge label: " + l);
    label_ids.push_back(*id);
  }
  return Path(g, std::move(node_ids), std::move(label_ids));
}

std::vector<std::string> Path::trace() const {
  std::vector<std::string> out;
  out.reserve(labels_.size());
  for (std::uint32_t l : labels_) out.push_back(graph_->label_name(l));
  return out;
}

std::string Path::to_string() const {
  std::string out = graph_->node_name(nodes_[0]);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    out += " -[";
    out += graph_->label_name(labels_[i]);
    out += "]-> ";
    out += graph_->node_name(nodes_[i + 1]);
  }
  return out;
}

bool validate_path(const Graph& g, const Path& p) {
  if (&p.graph() != &g) return false;
  auto nodes = p.node_ids();
  auto labels = p.label_ids();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!g.has_edge(nodes[i], labels[i], nodes[i + 1])) return false;
  }
  return true;
}

bool path_order_less(const Path& a, const Path& b) {
  if (a.length() != b.length()) return a.length() < b.length();
  for (std::size_t i = 0; i < a.node_ids().size(); ++i) {
    const std::string& an = a.node_name(i);
    const std::string& bn = b.node_name(i);
    if (an != bn) return an < bn;
  }
  for (std::size_t i = 0; i < a.label_ids().size(); ++i) {
    const std::string& al = a.graph().label_name(a.label_ids()[i]);
    const std::string& bl = b.graph().label_name(b.label_ids()[i]);
    if (al != bl) return al < bl;
  }
  return false;
}

}  // namespace cfpq
