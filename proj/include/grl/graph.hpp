#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "grl/common.hpp"

namespace grl {

class DistanceIndex;

using Edge = std::pair<NodeId, NodeId>;

/// Immutable undirected, unweighted graph in CSR form.
///
/// Neighbor lists are sorted, symmetric and free of self-loops and
/// duplicates.  Every node carries the identifier it had in the input file;
/// dense ids follow the order of those original identifiers (numeric order
/// when both are integers, lexicographic otherwise).
class Graph {
 public:
  Graph() = default;

  /// Builds a graph on nodes [0, n).  Self-loops are dropped, duplicate and
  /// reversed edges merged.  `original_ids` defaults to "0".."n-1".
  static Graph from_edges(std::size_t n, std::span<const Edge> edges,
                          std::vector<std::string> original_ids = {});

  /// Builds from raw CSR arrays; validates symmetry and sortedness.
  static Graph from_csr(std::vector<std::uint64_t> offsets, std::vector<NodeId> adjacency,
                        std::vector<std::string> original_ids = {});

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  /// Undirected edge count m.
  std::size_t num_edges() const { return adjacency_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(NodeId u, NodeId v) const;

  const std::vector<std::uint64_t>& offsets() const { return offsets_; }
  const std::vector<NodeId>& adjacency() const { return adjacency_; }

  const std::vector<std::string>& original_ids() const { return original_ids_; }
  const std::string& original_id(NodeId v) const { return original_ids_[v]; }
  std::optional<NodeId> find(const std::string& original_id) const;

  /// Every undirected edge once, as (u, v) with u < v.
  std::vector<Edge> edge_list() const;

 private:
  void index_ids();

  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<std::string> original_ids_;
  std::unordered_map<std::string, NodeId> id_lookup_;
};

/// Orders textual node ids numerically when both parse as integers.
bool original_id_less(const std::string& a, const std::string& b);

/// Parses a whitespace-separated "u v" edge list; '#' lines are comments.
/// Extra columns after the first two are ignored.
Graph load_edge_list(const std::filesystem::path& path);
void write_edge_list(const std::filesystem::path& path, const Graph& g);

/// Component id per node, numbered in order of each component's smallest node.
struct Components {
  std::vector<NodeId> component_of;
  std::vector<std::size_t> sizes;
  std::size_t count() const { return sizes.size(); }
};
Components connected_components(const Graph& g);

/// Induced subgraph on the node subset, renumbered densely in input order.
Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

/// Largest component, ties broken by the smallest original id it contains.
Graph largest_connected_component(const Graph& g);

/// Node -> class ids.  Class ids index `class_names`.
struct Labels {
  std::vector<std::vector<int>> classes;
  std::vector<std::string> class_names;

  std::size_t num_classes() const { return class_names.size(); }
  bool has_label(NodeId v) const { return !classes[v].empty(); }
  bool multi_label() const;
  /// Single-label view; -1 for unlabeled nodes.  Throws for multi-label data.
  std::vector<int> primary() const;
};

/// Reads "node_id label [label...]" rows.  Rows naming nodes absent from the
/// graph are skipped (they fall outside the extracted component).
Labels load_labels(const std::filesystem::path& path, const Graph& g);
void write_labels(const std::filesystem::path& path, const Graph& g, const Labels& labels);
/// Labels from integer classes 0..k-1 (-1 = unlabeled).
Labels labels_from_classes(std::span<const int> classes);

struct StatsReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t num_classes = 0;
  double average_degree = 0.0;
  std::optional<unsigned> d_max;

  /// Ordered adjacency entries (2m); the "edges" column of common benchmark tables.
  std::size_t directed_edges() const { return 2 * m; }
  std::string to_string() const;
};

StatsReport graph_stats(const Graph& g, const DistanceIndex* dist = nullptr,
                        const Labels* labels = nullptr);

/// "GRLG" binary cache: magic, u32 version, u64 n, u64 m, u64 offsets[n+1],
/// u32 neighbors[2m].  Original ids go to a sidecar text file.
void write_graph_cache(const std::filesystem::path& path, const Graph& g);
Graph read_graph_cache(const std::filesystem::path& path);
std::filesystem::path id_table_path(const std::filesystem::path& graph_cache);

}  // namespace grl
