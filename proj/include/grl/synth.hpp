#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "grl/graph.hpp"

namespace grl {

struct SynthConfig {
  std::size_t n = 2000;
  double exponent = 2.5;
  std::size_t classes = 7;
  std::uint64_t seed = 1;

  void validate() const;
};

enum class SynthPreset { kSparse, kModerate, kDense };

SynthPreset parse_synth_preset(std::string_view name);
std::string_view preset_name(SynthPreset preset);
/// Average degree (2m/n) each preset is calibrated to hit.
double preset_target_degree(SynthPreset preset);
/// Shipped configuration: n=2000, calibrated exponent, 7/5/4 classes.
SynthConfig preset_config(SynthPreset preset, std::uint64_t seed = 1);

/// Continuous power law with minimum 1, clamped at n - 1 and rounded to the
/// nearest integer.
std::vector<std::uint64_t> powerlaw_degree_sequence(std::size_t n, double exponent, std::uint64_t seed);

/// Chung-Lu: each pair i<j is an edge with probability min(1, w_i w_j / sum w).
Graph expected_degree_graph(std::span<const double> weights, std::uint64_t seed);

/// Chains one uniformly chosen node per component, in component order.
Graph connect_components(const Graph& g, std::uint64_t seed);

struct LabelPropagation {
  std::vector<int> classes;
  std::vector<NodeId> seeds;      // seeds[c] carries class c
  std::vector<unsigned> round;    // 0 for seeds
};

/// k distinct uniform seeds, then synchronous frontier rounds; a node reached
/// by several classes in the same round takes the smallest class id.
LabelPropagation propagate_labels(const Graph& g, std::size_t k, std::uint64_t seed);
LabelPropagation propagate_labels_from_seeds(const Graph& g, std::span<const NodeId> seeds);

struct SynthGraph {
  Graph graph;
  Labels labels;
  LabelPropagation propagation;
};

SynthGraph generate_synthetic(const SynthConfig& cfg);

/// Average degree of the connected Chung-Lu graph the pipeline produces.
double synthetic_average_degree(std::size_t n, double exponent, std::uint64_t seed);

/// Bisection over the exponent for a target average degree (2m/n).
double calibrate_exponent(std::size_t n, double target_degree, std::uint64_t seed, double lo = 1.5,
                          double hi = 8.0, int iterations = 40);

}  // namespace grl
