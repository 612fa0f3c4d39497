#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "grl/common.hpp"
#include "grl/distances.hpp"
#include "grl/graph.hpp"
#include "grl/rng.hpp"

namespace grl {

struct WalkConfig {
  std::size_t walks_per_node = 50;
  std::size_t walk_length = 40;  // nodes per walk
  std::size_t window = 4;
  double p_return = 1.0;
  double q_inout = 4.0;
  std::uint64_t seed = 1;

  void validate() const;
};

enum class WalkModel { kDeepWalk, kNode2Vec };
WalkModel parse_walk_model(std::string_view name);
std::string_view walk_model_name(WalkModel model);

/// Fixed-length walks stored row-major; ordered by start node, then walk index.
struct WalkSet {
  std::size_t walk_length = 0;
  std::vector<NodeId> nodes;

  std::size_t size() const { return walk_length == 0 ? 0 : nodes.size() / walk_length; }
  std::span<const NodeId> walk(std::size_t r) const { return {nodes.data() + r * walk_length, walk_length}; }
};

/// Uniform first-order walks.  Walk r from node v uses stream (v, r), so the
/// result does not depend on `workers`.
WalkSet deepwalk_walks(const Graph& g, const WalkConfig& cfg, unsigned workers = 1);
/// Second-order walks with return parameter p and in-out parameter q.
WalkSet node2vec_walks(const Graph& g, const WalkConfig& cfg, unsigned workers = 1);
WalkSet generate_walks(WalkModel model, const Graph& g, const WalkConfig& cfg, unsigned workers = 1);

/// Transition probabilities over neighbors(cur) after arriving from prev.
std::vector<double> node2vec_transition(const Graph& g, NodeId prev, NodeId cur, double p, double q);

/// Positive (source, context) pairs, grouped into segments (one per walk).
struct PositiveCorpus {
  std::vector<Edge> pairs;
  std::vector<std::size_t> segment_offsets{0};

  std::size_t size() const { return pairs.size(); }
  std::size_t num_segments() const { return segment_offsets.size() - 1; }
  std::span<const Edge> segment(std::size_t s) const {
    return {pairs.data() + segment_offsets[s], segment_offsets[s + 1] - segment_offsets[s]};
  }
};

/// For each position t emits (walk[t], walk[u]) for every u within window of t,
/// u != t, skipping repeats of the same node.  Windows truncate at walk ends.
PositiveCorpus context_pairs(const WalkSet& walks, std::size_t window);

/// "GRLW" cache: magic, u32 version, u64 pair count, u64 segment count,
/// u64 segment_offsets[segments+1], then u32 (source, context) pairs.
void write_corpus_cache(const std::filesystem::path& path, const PositiveCorpus& corpus);
PositiveCorpus read_corpus_cache(const std::filesystem::path& path);

/// Monte-Carlo estimate of the fraction of window pairs at each graph
/// distance, indexed 0..window.  Mass beyond the window is impossible and is
/// checked.
std::vector<double> estimate_pi_d(const Graph& g, const DistanceIndex& dist, const WalkConfig& cfg,
                                  std::size_t samples, WalkModel model = WalkModel::kDeepWalk);

}  // namespace grl
