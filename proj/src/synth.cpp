#include "grl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "grl/rng.hpp"

namespace grl {

namespace {

constexpr std::uint64_t kDegreeDomain = 0x44454752ULL;  // "DEGR"
constexpr std::uint64_t kEdgeDomain = 0x45444745ULL;    // "EDGE"
constexpr std::uint64_t kJoinDomain = 0x4A4F494EULL;    // "JOIN"
constexpr std::uint64_t kSeedDomain = 0x53454544ULL;    // "SEED"

// Found with calibrate_exponent(2000, target, 1); tests re-run the search.
constexpr double kSparseExponent = 3.1379065420785537;
constexpr double kModerateExponent = 2.0654250666109419;
constexpr double kDenseExponent = 1.6900764521703877;

}  // namespace

void SynthConfig::validate() const {
  if (classes == 0 || classes > n) throw UsageError("need 1 <= classes <= n");
  if (!(exponent > 1.0)) throw UsageError("power-law exponent must exceed 1");
}

SynthPreset parse_synth_preset(std::string_view name) {
  if (name == "sparse") return SynthPreset::kSparse;
  if (name == "moderate") return SynthPreset::kModerate;
  if (name == "dense") return SynthPreset::kDense;
  throw UsageError("unknown preset '" + std::string(name) + "' (sparse, moderate, dense)");
}

std::string_view preset_name(SynthPreset preset) {
  switch (preset) {
    case SynthPreset::kSparse: return "sparse";
    case SynthPreset::kModerate: return "moderate";
    case SynthPreset::kDense: return "dense";
  }
  return "?";
}

double preset_target_degree(SynthPreset preset) {
  switch (preset) {
    case SynthPreset::kSparse: return 2.49;
    case SynthPreset::kModerate: return 6.03;
    case SynthPreset::kDense: return 15.24;
  }
  return 0.0;
}

SynthConfig preset_config(SynthPreset preset, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  switch (preset) {
    case SynthPreset::kSparse:
      cfg.exponent = kSparseExponent;
      cfg.classes = 7;
      break;
    case SynthPreset::kModerate:
      cfg.exponent = kModerateExponent;
      cfg.classes = 5;
      break;
    case SynthPreset::kDense:
      cfg.exponent = kDenseExponent;
      cfg.classes = 4;
      break;
  }
  return cfg;
}

std::vector<std::uint64_t> powerlaw_degree_sequence(std::size_t n, double exponent, std::uint64_t seed) {
  if (!(exponent > 1.0)) throw UsageError("power-law exponent must exceed 1");
  CounterRng rng(seed ^ kDegreeDomain, 0);
  std::vector<std::uint64_t> out(n);
  const double inv = -1.0 / (exponent - 1.0);
  // A simple graph on n nodes has no degree above n - 1.
  const double cap = static_cast<double>(std::max<std::size_t>(n, 2) - 1);
  for (auto& d : out) {
    const double x = std::pow(1.0 - rng.uniform(), inv);
    d = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(std::min(x, cap))));
  }
  return out;
}

Graph expected_degree_graph(std::span<const double> weights, std::uint64_t seed) {
  const std::size_t n = weights.size();
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw UsageError("expected-degree weights must be finite and nonnegative");
    total += w;
  }
  std::vector<Edge> edges;
  if (total > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (weights[i] == 0.0) continue;
      CounterRng rng(seed ^ kEdgeDomain, i);
      const double wi = weights[i] / total;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double p = std::min(1.0, wi * weights[j]);
        if (rng.uniform() < p) edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
      }
    }
  }
  return Graph::from_edges(n, edges);
}

Graph connect_components(const Graph& g, std::uint64_t seed) {
  const Components comps = connected_components(g);
  if (comps.count() <= 1) return g;
  std::vector<std::vector<NodeId>> members(comps.count());
  for (NodeId v = 0; v < g.num_nodes(); ++v) members[comps.component_of[v]].push_back(v);
  CounterRng rng(seed ^ kJoinDomain, 0);
  std::vector<NodeId> chosen;
  chosen.reserve(members.size());
  for (const auto& mem : members) chosen.push_back(mem[rng.below(mem.size())]);
  std::vector<Edge> edges = g.edge_list();
  for (std::size_t c = 0; c + 1 < chosen.size(); ++c) edges.emplace_back(chosen[c], chosen[c + 1]);
  return Graph::from_edges(g.num_nodes(), edges, g.original_ids());
}

LabelPropagation propagate_labels_from_seeds(const Graph& g, std::span<const NodeId> seeds) {
  const std::size_t n = g.num_nodes();
  LabelPropagation out;
  out.classes.assign(n, -1);
  out.round.assign(n, 0);
  out.seeds.assign(seeds.begin(), seeds.end());
  for (std::size_t c = 0; c < seeds.size(); ++c) {
    if (seeds[c] >= n) throw UsageError("seed node out of range");
    if (out.classes[seeds[c]] != -1) throw UsageError("seed nodes must be distinct");
    out.classes[seeds[c]] = static_cast<int>(c);
  }
  std::vector<NodeId> frontier(seeds.begin(), seeds.end());
  std::size_t labeled = seeds.size();
  std::vector<int> incoming(n, -1);
  for (unsigned r = 1; labeled < n; ++r) {
    std::vector<NodeId> next;
    for (const NodeId u : frontier) {
      for (const NodeId v : g.neighbors(u)) {
        if (out.classes[v] != -1) continue;
        if (incoming[v] == -1) next.push_back(v);
        if (incoming[v] == -1 || out.classes[u] < incoming[v]) incoming[v] = out.classes[u];
      }
    }
    if (next.empty()) throw DataError("label propagation needs a connected graph with at least one seed");
    for (const NodeId v : next) {
      out.classes[v] = incoming[v];
      out.round[v] = r;
    }
    labeled += next.size();
    frontier = std::move(next);
  }
  return out;
}

LabelPropagation propagate_labels(const Graph& g, std::size_t k, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  if (k == 0 || k > n) throw UsageError("need 1 <= k <= n seed classes");
  // Partial Fisher-Yates for k distinct nodes.
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  CounterRng rng(seed ^ kSeedDomain, 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(perm[i], perm[j]);
  }
  perm.resize(k);
  return propagate_labels_from_seeds(g, perm);
}

namespace {

Graph connected_chung_lu(std::size_t n, double exponent, std::uint64_t seed) {
  const auto degrees = powerlaw_degree_sequence(n, exponent, seed);
  const std::vector<double> weights(degrees.begin(), degrees.end());
  return connect_components(expected_degree_graph(weights, seed), seed);
}

}  // namespace

SynthGraph generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  SynthGraph out;
  out.graph = connected_chung_lu(cfg.n, cfg.exponent, cfg.seed);
  out.propagation = propagate_labels(out.graph, cfg.classes, cfg.seed);
  out.labels = labels_from_classes(out.propagation.classes);
  return out;
}

double synthetic_average_degree(std::size_t n, double exponent, std::uint64_t seed) {
  const Graph g = connected_chung_lu(n, exponent, seed);
  return n ? 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(n) : 0.0;
}

double calibrate_exponent(std::size_t n, double target_degree, std::uint64_t seed, double lo, double hi,
                          int iterations) {
  // Average degree falls as the exponent grows.
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (synthetic_average_degree(n, mid, seed) > target_degree) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace grl
