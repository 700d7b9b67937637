#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cfpq/errors.hpp"

namespace cfpq {

// Edge of an edge-labeled directed graph, all three fields interned ids.
struct Edge {
  std::uint32_t from;
  std::uint32_t label;
  std::uint32_t to;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable after construction; safe to share between threads.
//
// File format (TSV): `source \t label \t target` per edge, `node \t <id>`
// declares an isolated node, `#` starts a comment line.
class Graph {
 public:
  std::uint32_t node_count() const { return static_cast<std::uint32_t>(node_names_.size()); }
  std::uint32_t label_count() const { return static_cast<std::uint32_t>(label_names_.size()); }
  const std::string& node_name(std::uint32_t id) const { return node_names_.at(id); }
  const std::string& label_name(std::uint32_t id) const { return label_names_.at(id); }
  std::optional<std::uint32_t> find_node(std::string_view name) const;
  std::optional<std::uint32_t> find_label(std::string_view name) const;
  // Throws UnknownSymbolError.
  std::uint32_t node_id(std::string_view name) const;

  std::size_t edge_count() const { return edges_.size(); }
  // Deduplicated, sorted by (from, label, to).
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Edge> out_edges(std::uint32_t node) const;
  // Sorted by (to, label, from).
  std::span<const Edge> in_edges(std::uint32_t node) const;
  // (from, to) pairs, sorted.
  std::span<const std::pair<std::uint32_t, std::uint32_t>> edges_with_label(std::uint32_t label) const {
    return by_label_.at(label);
  }
  bool has_edge(std::uint32_t from, std::uint32_t label, std::uint32_t to) const;

 private:
  friend class GraphBuilder;

  std::vector<std::string> node_names_;
  std::vector<std::string> label_names_;
  std::unordered_map<std::string, std::uint32_t> node_ids_;
  std::unordered_map<std::string, std::uint32_t> label_ids_;
  std::vector<Edge> edges_;                // sorted by (from, label, to)
  std::vector<Edge> in_sorted_;            // sorted by (to, label, from)
  std::vector<std::uint32_t> out_offsets_; // per node into edges_
  std::vector<std::uint32_t> in_offsets_;  // per node into in_sorted_
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> by_label_;
};

class GraphBuilder {
 public:
  std::uint32_t node(const std::string& name);
  std::uint32_t label(const std::string& name);
  void edge(const std::string& from, const std::string& label, const std::string& to);
  // Deduplicates edges, checks node/label namespace disjointness, builds indexes.
  Graph build();

 private:
  Graph g_;
};

Graph load_graph(std::string_view text);
std::string serialize_graph(const Graph& g);

// One directed cycle n0 -> n1 -> ... -> n(n-1) -> n0, every edge the same label.
Graph gen_cycle(std::size_t n, const std::string& label);

// Two cycles sharing node c: one of u edges labeled label1 through
// c, m1, ..., m(u-1), one of v edges labeled label2 through c, n1, ..., n(v-1).
// u + v - 1 nodes, u + v edges.
Graph gen_double_cycle(std::size_t u, std::size_t v, const std::string& label1,
                       const std::string& label2);

// The six-person friendOf network used as the worked example throughout.
Graph gen_social_network();

// Alternating node/label sequence; length() is the edge count. A single node
// is a valid zero-edge path.
class Path {
 public:
  Path(const Graph& g, std::vector<std::uint32_t> nodes, std::vector<std::uint32_t> labels);
  // Throws UnknownSymbolError for names missing from the graph.
  static Path from_names(const Graph& g, const std::vector<std::string>& nodes,
                         const std::vector<std::string>& labels);

  std::size_t length() const { return labels_.size(); }
  std::span<const std::uint32_t> node_ids() const { return nodes_; }
  std::span<const std::uint32_t> label_ids() const { return labels_; }
  const std::string& node_name(std::size_t i) const { return graph_->node_name(nodes_.at(i)); }
  std::vector<std::string> trace() const;
  const Graph& graph() const { return *graph_; }

  // `n1 -[l1]-> n2 -[l2]-> n3`; a zero-edge path is just the node name.
  std::string to_string() const;

  friend bool operator==(const Path& a, const Path& b) {
    return a.graph_ == b.graph_ && a.nodes_ == b.nodes_ && a.labels_ == b.labels_;
  }

 private:
  const Graph* graph_;
  std::vector<std::uint32_t> nodes_;
  std::vector<std::uint32_t> labels_;
};

// True iff every consecutive (node, label, node) triple is an edge of g.
bool validate_path(const Graph& g, const Path& p);

// Repo-wide display order: shorter first, then node names, then labels.
bool path_order_less(const Path& a, const Path& b);

}  // namespace cfpq
