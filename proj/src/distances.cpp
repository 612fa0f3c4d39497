#include "grl/distances.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "grl/binary_io.hpp"
#include "grl/parallel.hpp"

namespace grl {

namespace {

constexpr std::uint32_t kCacheVersion = 1;
const binio::Magic kDistanceMagic = binio::make_magic("GRLD");
const binio::Magic kLandmarkMagic = binio::make_magic("GRLL");

// BFS into `dist` (pre-filled with kUnreachable); stops once `targets_left`
// marked targets are settled when `is_target` is given.
void bfs_fill(const Graph& g, NodeId source, std::span<Distance> dist, std::vector<NodeId>& queue,
              const std::vector<char>* is_target = nullptr, std::size_t targets_left = 0) {
  queue.clear();
  queue.push_back(source);
  dist[source] = 0;
  if (is_target && (*is_target)[source] && --targets_left == 0) return;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    const unsigned next = dist[u] + 1u;
    if (next >= kUnreachable) throw DataError("graph diameter exceeds the 16-bit distance range");
    for (NodeId w : g.neighbors(u)) {
      if (dist[w] != kUnreachable) continue;
      dist[w] = static_cast<Distance>(next);
      queue.push_back(w);
      if (is_target && (*is_target)[w] && --targets_left == 0) return;
    }
  }
}

}  // namespace

DistanceIndex::DistanceIndex(std::size_t n, std::vector<Distance> dist)
    : n_(n), dist_(std::move(dist)), row_sum_(n, 0) {
  if (dist_.size() != n * n) throw DataError("distance matrix size mismatch");
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const Distance d = dist_[i * n + j];
      s += d;
      d_max_ = std::max<unsigned>(d_max_, d);
    }
    row_sum_[i] = s;
    total += s;
  }
  mean_row_sum_ = n == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n);
}

std::vector<std::uint64_t> DistanceIndex::distance_histogram() const {
  std::vector<std::uint64_t> h(d_max_ + 1, 0);
  for (Distance d : dist_) ++h[d];
  return h;
}

std::vector<Distance> bfs_distances(const Graph& g, NodeId source) {
  std::vector<Distance> dist(g.num_nodes(), kUnreachable);
  std::vector<NodeId> queue;
  queue.reserve(g.num_nodes());
  bfs_fill(g, source, dist, queue);
  return dist;
}

DistanceIndex all_pairs_bfs(const Graph& g, unsigned workers) {
  const std::size_t n = g.num_nodes();
  std::vector<Distance> dist(n * n, kUnreachable);
  parallel_blocks(n, workers, [&](unsigned, std::size_t begin, std::size_t end) {
    std::vector<NodeId> queue;
    queue.reserve(n);
    for (std::size_t s = begin; s < end; ++s) {
      std::span<Distance> row(dist.data() + s * n, n);
      bfs_fill(g, static_cast<NodeId>(s), row, queue);
      if (queue.size() != n) {
        const auto missing = std::find(row.begin(), row.end(), kUnreachable) - row.begin();
        throw DataError("graph is disconnected: node " + g.original_id(static_cast<NodeId>(s)) +
                        " cannot reach node " + g.original_id(static_cast<NodeId>(missing)));
      }
    }
  });
  return DistanceIndex(n, std::move(dist));
}

std::vector<NodeId> select_popular(const Graph& g, double fraction) {
  const std::size_t n = g.num_nodes();
  if (!(fraction > 0.0 && fraction <= 1.0)) throw UsageError("popular fraction must lie in (0, 1]");
  // Guard against 0.1 * 19717 = 1971.7000000000003 style round-up noise.
  const auto p = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  if (p < 1) throw UsageError("popular fraction selects no nodes");
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return g.degree(a) > g.degree(b); });
  order.resize(std::min(p, n));
  return order;
}

std::size_t popular_degree_threshold(const Graph& g, std::span<const NodeId> popular) {
  std::size_t t = std::numeric_limits<std::size_t>::max();
  for (NodeId v : popular) t = std::min(t, g.degree(v));
  return popular.empty() ? 0 : t;
}

LandmarkIndex::LandmarkIndex(std::size_t n, std::vector<NodeId> popular, std::vector<std::uint32_t> assigned,
                             std::vector<Distance> assigned_distance, std::vector<Distance> p2p)
    : popular_(std::move(popular)),
      assigned_(std::move(assigned)),
      assigned_distance_(std::move(assigned_distance)),
      p2p_(std::move(p2p)),
      clusters_(popular_.size()) {
  const std::size_t p = popular_.size();
  if (p == 0) throw DataError("landmark index needs at least one popular node");
  if (assigned_.size() != n || assigned_distance_.size() != n || p2p_.size() != p * p) {
    throw DataError("landmark index arrays have inconsistent sizes");
  }
  for (NodeId v = 0; v < n; ++v) {
    if (assigned_[v] >= p) throw DataError("landmark assignment out of range");
    clusters_[assigned_[v]].push_back(v);
  }
}

LandmarkIndex build_landmark_index(const Graph& g, std::span<const NodeId> popular, unsigned workers) {
  const std::size_t n = g.num_nodes();
  const std::size_t p = popular.size();
  if (p == 0) throw UsageError("build_landmark_index: empty popular set");

  std::vector<std::uint32_t> rank_of(n, std::numeric_limits<std::uint32_t>::max());
  for (std::size_t r = 0; r < p; ++r) {
    if (popular[r] >= n || rank_of[popular[r]] != std::numeric_limits<std::uint32_t>::max()) {
      throw UsageError("popular set contains an invalid or repeated node");
    }
    rank_of[popular[r]] = static_cast<std::uint32_t>(r);
  }

  // Multi-source BFS.  Level order guarantees that every candidate landmark
  // of a node is offered before the node is expanded.
  std::vector<Distance> near(n, kUnreachable);
  std::vector<NodeId> owner(n, 0);  // landmark node id
  std::vector<NodeId> queue;
  queue.reserve(n);
  std::vector<NodeId> sorted_popular(popular.begin(), popular.end());
  std::sort(sorted_popular.begin(), sorted_popular.end());
  for (NodeId s : sorted_popular) {
    near[s] = 0;
    owner[s] = s;
    queue.push_back(s);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    const unsigned next = near[u] + 1u;
    for (NodeId w : g.neighbors(u)) {
      if (near[w] == kUnreachable) {
        near[w] = static_cast<Distance>(next);
        owner[w] = owner[u];
        queue.push_back(w);
      } else if (near[w] == next && owner[u] < owner[w]) {
        owner[w] = owner[u];
      }
    }
  }
  if (queue.size() != n) throw DataError("graph is disconnected: some nodes reach no popular node");

  std::vector<std::uint32_t> assigned(n);
  for (NodeId v = 0; v < n; ++v) assigned[v] = rank_of[owner[v]];

  std::vector<char> is_target(n, 0);
  for (NodeId s : popular) is_target[s] = 1;
  std::vector<Distance> p2p(p * p);
  parallel_blocks(p, workers, [&](unsigned, std::size_t begin, std::size_t end) {
    std::vector<Distance> dist(n, kUnreachable);
    std::vector<NodeId> bfs_queue;
    bfs_queue.reserve(n);
    for (std::size_t a = begin; a < end; ++a) {
      std::fill(dist.begin(), dist.end(), kUnreachable);
      bfs_fill(g, popular[a], dist, bfs_queue, &is_target, p);
      for (std::size_t b = 0; b < p; ++b) {
        if (dist[popular[b]] == kUnreachable) throw DataError("graph is disconnected between popular nodes");
        p2p[a * p + b] = dist[popular[b]];
      }
    }
  });
  return LandmarkIndex(n, std::vector<NodeId>(popular.begin(), popular.end()), std::move(assigned),
                       std::move(near), std::move(p2p));
}

std::uint64_t distance_cache_size(std::uint64_t n) {
  return 4 + 4 + 8 + n * n * sizeof(Distance) + n * sizeof(std::uint64_t);
}

void write_distance_cache(const std::filesystem::path& path, const DistanceIndex& idx) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  binio::write_magic(out, kDistanceMagic);
  binio::write<std::uint32_t>(out, kCacheVersion);
  binio::write<std::uint64_t>(out, idx.num_nodes());
  binio::write_array<Distance>(out, idx.matrix());
  binio::write_array<std::uint64_t>(out, idx.row_sums());
  if (!out) throw DataError("write failed: " + path.string());
}

DistanceIndex read_distance_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open distance cache " + path.string());
  binio::expect_magic(in, kDistanceMagic, path.string());
  if (binio::read<std::uint32_t>(in, "version") != kCacheVersion) {
    throw DataError(path.string() + ": unsupported GRLD version");
  }
  const auto n = binio::read<std::uint64_t>(in, "n");
  auto dist = binio::read_array<Distance>(in, n * n, "distance matrix");
  const auto sums = binio::read_array<std::uint64_t>(in, n, "row sums");
  DistanceIndex idx(n, std::move(dist));
  if (sums != idx.row_sums()) throw DataError(path.string() + ": stored row sums disagree with the matrix");
  return idx;
}

std::uint64_t landmark_cache_size(std::uint64_t n, std::uint64_t p) {
  return 4 + 4 + 8 + 8 + p * sizeof(NodeId) + n * (sizeof(std::uint32_t) + sizeof(Distance)) +
         p * p * sizeof(Distance);
}

void write_landmark_cache(const std::filesystem::path& path, const LandmarkIndex& idx) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  binio::write_magic(out, kLandmarkMagic);
  binio::write<std::uint32_t>(out, kCacheVersion);
  binio::write<std::uint64_t>(out, idx.num_nodes());
  binio::write<std::uint64_t>(out, idx.num_popular());
  binio::write_array<NodeId>(out, idx.popular());
  binio::write_array<std::uint32_t>(out, idx.assignments());
  binio::write_array<Distance>(out, idx.assignment_distances());
  binio::write_array<Distance>(out, idx.p2p_matrix());
  if (!out) throw DataError("write failed: " + path.string());
}

LandmarkIndex read_landmark_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open landmark cache " + path.string());
  binio::expect_magic(in, kLandmarkMagic, path.string());
  if (binio::read<std::uint32_t>(in, "version") != kCacheVersion) {
    throw DataError(path.string() + ": unsupported GRLL version");
  }
  const auto n = binio::read<std::uint64_t>(in, "n");
  const auto p = binio::read<std::uint64_t>(in, "p");
  auto popular = binio::read_array<NodeId>(in, p, "popular nodes");
  auto assigned = binio::read_array<std::uint32_t>(in, n, "assignments");
  auto near = binio::read_array<Distance>(in, n, "assignment distances");
  auto p2p = binio::read_array<Distance>(in, p * p, "p2p matrix");
  return LandmarkIndex(n, std::move(popular), std::move(assigned), std::move(near), std::move(p2p));
}

}  // namespace grl
