#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grl/alias_table.hpp"
#include "grl/common.hpp"
#include "grl/distances.hpp"
#include "grl/graph.hpp"
#include "grl/rng.hpp"

namespace grl {

enum class SamplerKind { kUns, kUnsDeg, kDns, kDnsMin, kDnsMax, kDnsApprox, kDnsScalable };

std::string_view sampler_name(SamplerKind kind);
/// Accepts the CLI spellings: uns, uns-deg, dns, dns-min, dns-max, dns-approx, dns-scalable.
SamplerKind parse_sampler_kind(std::string_view name);
bool needs_distance_index(SamplerKind kind);
bool needs_landmark_index(SamplerKind kind);

/// Worker-local state for samplers that materialize per-source profiles.
struct SamplerScratch {
  static constexpr NodeId kNone = std::numeric_limits<NodeId>::max();
  NodeId source = kNone;
  AliasTable table;
  std::vector<double> weights;
  std::size_t profiles_built = 0;

  /// Drops the cached profile (called at minibatch boundaries).
  void reset() { source = kNone; }
};

/// A family of per-source negative-sampling distributions P(k | source).
class NegativeSampler {
 public:
  virtual ~NegativeSampler() = default;

  virtual SamplerKind kind() const = 0;
  virtual std::size_t num_nodes() const = 0;
  /// Exact analytic probability of drawing k as a negative for `source`.
  virtual double prob(NodeId source, NodeId k) const = 0;
  /// Fills `out` with independent draws for `source`.
  virtual void draw(NodeId source, CounterRng& rng, std::span<NodeId> out, SamplerScratch& scratch) const = 0;

  /// Distance exponent for the DNS family, 0 for unigram samplers.
  virtual double gamma() const { return 0.0; }
  std::string name() const { return std::string(sampler_name(kind())); }

  /// Full row P(. | source); O(n) prob() calls.
  std::vector<double> distribution(NodeId source) const;
};

std::unique_ptr<NegativeSampler> build_uns(const Graph& g);
std::unique_ptr<NegativeSampler> build_uns_deg(const Graph& g);
/// P(k|i) = d(k,i)^gamma / sum_s d(s,i)^gamma with the self pair weighted 0.
std::unique_ptr<NegativeSampler> build_dns(std::shared_ptr<const DistanceIndex> dist, double gamma = 1.0);
/// Per-source min/max of the DNS probability and 1/n, renormalized; self excluded.
std::unique_ptr<NegativeSampler> build_dns_min(std::shared_ptr<const DistanceIndex> dist);
std::unique_ptr<NegativeSampler> build_dns_max(std::shared_ptr<const DistanceIndex> dist);
/// Weights from landmark-reconstructed distances, rebuilt per source on demand.
std::unique_ptr<NegativeSampler> build_dns_approx(std::shared_ptr<const LandmarkIndex> lmk);
/// Reconstructed profile of one source: P(k|i) proportional to approx_distance(i, k), k != i.
std::vector<double> dns_approx_profile(const LandmarkIndex& lmk, NodeId source);
/// Two-stage draw: landmark t != landmark(i) by p2p distance, then uniform within t's cluster.
std::unique_ptr<NegativeSampler> build_dns_scalable(std::shared_ptr<const LandmarkIndex> lmk);

struct SamplerSpec {
  SamplerKind kind = SamplerKind::kUns;
  double gamma = 1.0;
};

std::unique_ptr<NegativeSampler> make_sampler(const SamplerSpec& spec, const Graph& g,
                                              std::shared_ptr<const DistanceIndex> dist,
                                              std::shared_ptr<const LandmarkIndex> lmk);

}  // namespace grl
