#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "grl/common.hpp"
#include "grl/graph.hpp"

namespace grl {

/// Exact all-pairs hop distances with per-node distance sums.
class DistanceIndex {
 public:
  DistanceIndex() = default;
  DistanceIndex(std::size_t n, std::vector<Distance> dist);

  std::size_t num_nodes() const { return n_; }
  Distance operator()(NodeId i, NodeId j) const { return dist_[static_cast<std::size_t>(i) * n_ + j]; }
  std::span<const Distance> row(NodeId i) const { return {dist_.data() + static_cast<std::size_t>(i) * n_, n_}; }

  /// D(i) = sum over s of d(s, i).
  std::uint64_t row_sum(NodeId i) const { return row_sum_[i]; }
  const std::vector<std::uint64_t>& row_sums() const { return row_sum_; }
  /// Mean of the row sums.
  double mean_row_sum() const { return mean_row_sum_; }
  unsigned d_max() const { return d_max_; }

  /// Number of ordered pairs (i, j) at each distance d in [0, d_max].
  std::vector<std::uint64_t> distance_histogram() const;

  const std::vector<Distance>& matrix() const { return dist_; }

 private:
  std::size_t n_ = 0;
  std::vector<Distance> dist_;
  std::vector<std::uint64_t> row_sum_;
  double mean_row_sum_ = 0.0;
  unsigned d_max_ = 0;
};

/// One BFS per source; rows are filled concurrently when workers > 1.
/// Throws DataError naming an unreachable pair for disconnected graphs.
DistanceIndex all_pairs_bfs(const Graph& g, unsigned workers = 1);

/// Hop distances from one source (kUnreachable where not reachable).
std::vector<Distance> bfs_distances(const Graph& g, NodeId source);

/// The ceil(fraction * n) highest-degree nodes, ties to the smaller id,
/// returned in that rank order.
std::vector<NodeId> select_popular(const Graph& g, double fraction);

/// Smallest degree among the selected nodes, i.e. the induced degree threshold.
std::size_t popular_degree_threshold(const Graph& g, std::span<const NodeId> popular);

/// Landmark ("popular node") compression of the distance matrix.
class LandmarkIndex {
 public:
  LandmarkIndex() = default;
  LandmarkIndex(std::size_t n, std::vector<NodeId> popular, std::vector<std::uint32_t> assigned,
                std::vector<Distance> assigned_distance, std::vector<Distance> p2p);

  std::size_t num_nodes() const { return assigned_.size(); }
  std::size_t num_popular() const { return popular_.size(); }
  const std::vector<NodeId>& popular() const { return popular_; }

  /// Rank (index into popular()) of the landmark node v is assigned to.
  std::uint32_t landmark_of(NodeId v) const { return assigned_[v]; }
  Distance distance_to_landmark(NodeId v) const { return assigned_distance_[v]; }
  /// Exact distance between landmarks of ranks a and b.
  Distance p2p(std::uint32_t a, std::uint32_t b) const { return p2p_[static_cast<std::size_t>(a) * popular_.size() + b]; }
  std::span<const Distance> p2p_row(std::uint32_t a) const {
    return {p2p_.data() + static_cast<std::size_t>(a) * popular_.size(), popular_.size()};
  }
  const std::vector<NodeId>& cluster(std::uint32_t rank) const { return clusters_[rank]; }

  /// Distance of the i -> landmark(i) -> landmark(j) -> j path; always >= the exact distance.
  unsigned approx_distance(NodeId i, NodeId j) const {
    const unsigned a = assigned_[i];
    const unsigned b = assigned_[j];
    return static_cast<unsigned>(assigned_distance_[i]) + assigned_distance_[j] + (a == b ? 0u : p2p(a, b));
  }

  const std::vector<std::uint32_t>& assignments() const { return assigned_; }
  const std::vector<Distance>& assignment_distances() const { return assigned_distance_; }
  const std::vector<Distance>& p2p_matrix() const { return p2p_; }

 private:
  std::vector<NodeId> popular_;
  std::vector<std::uint32_t> assigned_;
  std::vector<Distance> assigned_distance_;
  std::vector<Distance> p2p_;
  std::vector<std::vector<NodeId>> clusters_;
};

/// Multi-source BFS for the node assignments (equidistant ties go to the
/// smaller landmark id) plus one BFS per landmark for the p2p matrix.
LandmarkIndex build_landmark_index(const Graph& g, std::span<const NodeId> popular, unsigned workers = 1);

/// "GRLD" cache: magic, u32 version, u64 n, u16 dist[n*n] row-major, u64 row_sum[n].
void write_distance_cache(const std::filesystem::path& path, const DistanceIndex& idx);
DistanceIndex read_distance_cache(const std::filesystem::path& path);
std::uint64_t distance_cache_size(std::uint64_t n);

/// "GRLL" cache: magic, u32 version, u64 n, u64 p, u32 popular[p],
/// u32 assigned_rank[n], u16 assigned_distance[n], u16 p2p[p*p] row-major.
void write_landmark_cache(const std::filesystem::path& path, const LandmarkIndex& idx);
LandmarkIndex read_landmark_cache(const std::filesystem::path& path);
std::uint64_t landmark_cache_size(std::uint64_t n, std::uint64_t p);

}  // namespace grl
