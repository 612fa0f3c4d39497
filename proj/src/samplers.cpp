#include "grl/samplers.hpp"

#include <cmath>

#include "grl/parallel.hpp"

namespace grl {

std::string_view sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kUns: return "uns";
    case SamplerKind::kUnsDeg: return "uns-deg";
    case SamplerKind::kDns: return "dns";
    case SamplerKind::kDnsMin: return "dns-min";
    case SamplerKind::kDnsMax: return "dns-max";
    case SamplerKind::kDnsApprox: return "dns-approx";
    case SamplerKind::kDnsScalable: return "dns-scalable";
  }
  return "unknown";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  for (auto kind : {SamplerKind::kUns, SamplerKind::kUnsDeg, SamplerKind::kDns, SamplerKind::kDnsMin,
                    SamplerKind::kDnsMax, SamplerKind::kDnsApprox, SamplerKind::kDnsScalable}) {
    if (sampler_name(kind) == name) return kind;
  }
  throw UsageError("unknown sampler '" + std::string(name) + "'");
}

bool needs_distance_index(SamplerKind kind) {
  return kind == SamplerKind::kDns || kind == SamplerKind::kDnsMin || kind == SamplerKind::kDnsMax;
}

bool needs_landmark_index(SamplerKind kind) {
  return kind == SamplerKind::kDnsApprox || kind == SamplerKind::kDnsScalable;
}

std::vector<double> NegativeSampler::distribution(NodeId source) const {
  std::vector<double> p(num_nodes());
  for (NodeId k = 0; k < p.size(); ++k) p[k] = prob(source, k);
  return p;
}

namespace {

class UniformSampler final : public NegativeSampler {
 public:
  explicit UniformSampler(std::size_t n) : n_(n) {
    if (n == 0) throw UsageError("sampler needs a nonempty graph");
  }
  SamplerKind kind() const override { return SamplerKind::kUns; }
  std::size_t num_nodes() const override { return n_; }
  double prob(NodeId, NodeId) const override { return 1.0 / static_cast<double>(n_); }
  void draw(NodeId, CounterRng& rng, std::span<NodeId> out, SamplerScratch&) const override {
    for (NodeId& k : out) k = static_cast<NodeId>(rng.below(n_));
  }

 private:
  std::size_t n_;
};

class DegreeSampler final : public NegativeSampler {
 public:
  explicit DegreeSampler(const Graph& g) : p_(g.num_nodes()) {
    if (p_.empty()) throw UsageError("sampler needs a nonempty graph");
    double total = 0.0;
    for (NodeId v = 0; v < p_.size(); ++v) total += (p_[v] = std::pow(static_cast<double>(g.degree(v)), 0.75));
    if (total == 0.0) {  // edgeless graph: the unigram limit is uniform
      std::fill(p_.begin(), p_.end(), 1.0);
      total = static_cast<double>(p_.size());
    }
    table_.assign(p_);
    for (double& v : p_) v /= total;
  }
  SamplerKind kind() const override { return SamplerKind::kUnsDeg; }
  std::size_t num_nodes() const override { return p_.size(); }
  double prob(NodeId, NodeId k) const override { return p_[k]; }
  void draw(NodeId, CounterRng& rng, std::span<NodeId> out, SamplerScratch&) const override {
    for (NodeId& k : out) k = table_.sample(rng);
  }

 private:
  std::vector<double> p_;
  AliasTable table_;
};

// Per-source tables over an exact distance index; the row weight function
// distinguishes plain/gamma DNS from the min/max ablations.
class DistanceRowSampler final : public NegativeSampler {
 public:
  DistanceRowSampler(SamplerKind kind, std::shared_ptr<const DistanceIndex> dist, double gamma)
      : kind_(kind), gamma_(gamma), dist_(std::move(dist)) {
    if (!dist_) throw UsageError(std::string(sampler_name(kind)) + " sampler needs a distance index");
    const std::size_t n = dist_->num_nodes();
    if (n < 2) throw UsageError("distance-aware samplers need at least two nodes");
    if (!(gamma_ >= 0.0)) throw UsageError("gamma must be nonnegative");
    power_.resize(dist_->d_max() + 1);
    power_[0] = 0.0;  // self pair excluded, including 0^0 at gamma = 0
    for (unsigned d = 1; d < power_.size(); ++d) power_[d] = std::pow(static_cast<double>(d), gamma_);

    normalizer_.resize(n);
    tables_.resize(n);
    parallel_blocks(n, worker_count(), [&](unsigned, std::size_t begin, std::size_t end) {
      std::vector<double> w(n);
      for (std::size_t i = begin; i < end; ++i) {
        double total = 0.0;
        for (NodeId k = 0; k < n; ++k) total += (w[k] = raw_weight(static_cast<NodeId>(i), k));
        normalizer_[i] = total;
        tables_[i].assign(w);
      }
    });
  }

  SamplerKind kind() const override { return kind_; }
  std::size_t num_nodes() const override { return tables_.size(); }
  double gamma() const override { return gamma_; }
  double prob(NodeId source, NodeId k) const override { return raw_weight(source, k) / normalizer_[source]; }
  void draw(NodeId source, CounterRng& rng, std::span<NodeId> out, SamplerScratch&) const override {
    const AliasTable& t = tables_[source];
    for (NodeId& k : out) k = t.sample(rng);
  }

 private:
  // Basic (gamma = 1) DNS probability, the reference for the min/max ablations.
  double dns_prob(NodeId source, NodeId k) const {
    return static_cast<double>((*dist_)(source, k)) / static_cast<double>(dist_->row_sum(source));
  }

  double raw_weight(NodeId source, NodeId k) const {
    const Distance d = (*dist_)(source, k);
    if (d == 0) return 0.0;
    const double uniform = 1.0 / static_cast<double>(tables_.size());
    switch (kind_) {
      case SamplerKind::kDnsMin: return std::min(dns_prob(source, k), uniform);
      case SamplerKind::kDnsMax: return std::max(dns_prob(source, k), uniform);
      default: return power_[d];
    }
  }

  SamplerKind kind_;
  double gamma_;
  std::shared_ptr<const DistanceIndex> dist_;
  std::vector<double> power_;
  std::vector<double> normalizer_;
  std::vector<AliasTable> tables_;
};

class ApproxSampler final : public NegativeSampler {
 public:
  explicit ApproxSampler(std::shared_ptr<const LandmarkIndex> lmk) : lmk_(std::move(lmk)) {
    if (!lmk_) throw UsageError("dns-approx sampler needs a landmark index");
    const std::size_t n = lmk_->num_nodes();
    if (n < 2) throw UsageError("distance-aware samplers need at least two nodes");
    const std::size_t p = lmk_->num_popular();
    for (NodeId v = 0; v < n; ++v) offset_sum_ += lmk_->distance_to_landmark(v);
    cluster_weight_.assign(p, 0.0);
    for (std::uint32_t s = 0; s < p; ++s) {
      const auto row = lmk_->p2p_row(s);
      for (std::uint32_t t = 0; t < p; ++t) {
        cluster_weight_[s] += static_cast<double>(row[t]) * static_cast<double>(lmk_->cluster(t).size());
      }
    }
  }

  SamplerKind kind() const override { return SamplerKind::kDnsApprox; }
  std::size_t num_nodes() const override { return lmk_->num_nodes(); }
  double gamma() const override { return 1.0; }

  // Closed-form normalizer: (n-2) a_i + sum_k a_k + sum_t |C_t| p2p(L_i, t).
  double normalizer(NodeId i) const {
    const double n = static_cast<double>(lmk_->num_nodes());
    return (n - 2.0) * lmk_->distance_to_landmark(i) + offset_sum_ + cluster_weight_[lmk_->landmark_of(i)];
  }
  double prob(NodeId source, NodeId k) const override {
    if (source == k) return 0.0;
    return static_cast<double>(lmk_->approx_distance(source, k)) / normalizer(source);
  }

  void draw(NodeId source, CounterRng& rng, std::span<NodeId> out, SamplerScratch& scratch) const override {
    if (scratch.source != source) {
      const std::size_t n = lmk_->num_nodes();
      scratch.weights.resize(n);
      for (NodeId k = 0; k < n; ++k) {
        scratch.weights[k] = k == source ? 0.0 : static_cast<double>(lmk_->approx_distance(source, k));
      }
      scratch.table.assign(scratch.weights);
      scratch.source = source;
      ++scratch.profiles_built;
    }
    for (NodeId& k : out) k = scratch.table.sample(rng);
  }

 private:
  std::shared_ptr<const LandmarkIndex> lmk_;
  double offset_sum_ = 0.0;
  std::vector<double> cluster_weight_;
};

class ScalableSampler final : public NegativeSampler {
 public:
  explicit ScalableSampler(std::shared_ptr<const LandmarkIndex> lmk) : lmk_(std::move(lmk)) {
    if (!lmk_) throw UsageError("dns-scalable sampler needs a landmark index");
    const std::size_t p = lmk_->num_popular();
    if (p < 2) throw UsageError("dns-scalable needs at least two popular nodes (no negative-popular candidates)");
    tables_.resize(p);
    row_total_.resize(p);
    std::vector<double> w(p);
    for (std::uint32_t s = 0; s < p; ++s) {
      const auto row = lmk_->p2p_row(s);
      double total = 0.0;
      for (std::uint32_t t = 0; t < p; ++t) total += (w[t] = t == s ? 0.0 : static_cast<double>(row[t]));
      row_total_[s] = total;
      tables_[s].assign(w);
    }
  }

  SamplerKind kind() const override { return SamplerKind::kDnsScalable; }
  std::size_t num_nodes() const override { return lmk_->num_nodes(); }
  double gamma() const override { return 1.0; }
  double prob(NodeId source, NodeId k) const override {
    const std::uint32_t s = lmk_->landmark_of(source);
    const std::uint32_t t = lmk_->landmark_of(k);
    if (s == t) return 0.0;
    return static_cast<double>(lmk_->p2p(s, t)) / row_total_[s] / static_cast<double>(lmk_->cluster(t).size());
  }
  void draw(NodeId source, CounterRng& rng, std::span<NodeId> out, SamplerScratch&) const override {
    const AliasTable& t = tables_[lmk_->landmark_of(source)];
    for (NodeId& k : out) {
      const auto& members = lmk_->cluster(t.sample(rng));
      k = members[members.size() == 1 ? 0 : rng.below(members.size())];
    }
  }

 private:
  std::shared_ptr<const LandmarkIndex> lmk_;
  std::vector<AliasTable> tables_;
  std::vector<double> row_total_;
};

}  // namespace

std::unique_ptr<NegativeSampler> build_uns(const Graph& g) { return std::make_unique<UniformSampler>(g.num_nodes()); }

std::unique_ptr<NegativeSampler> build_uns_deg(const Graph& g) { return std::make_unique<DegreeSampler>(g); }

std::unique_ptr<NegativeSampler> build_dns(std::shared_ptr<const DistanceIndex> dist, double gamma) {
  return std::make_unique<DistanceRowSampler>(SamplerKind::kDns, std::move(dist), gamma);
}

std::unique_ptr<NegativeSampler> build_dns_min(std::shared_ptr<const DistanceIndex> dist) {
  return std::make_unique<DistanceRowSampler>(SamplerKind::kDnsMin, std::move(dist), 1.0);
}

std::unique_ptr<NegativeSampler> build_dns_max(std::shared_ptr<const DistanceIndex> dist) {
  return std::make_unique<DistanceRowSampler>(SamplerKind::kDnsMax, std::move(dist), 1.0);
}

std::unique_ptr<NegativeSampler> build_dns_approx(std::shared_ptr<const LandmarkIndex> lmk) {
  return std::make_unique<ApproxSampler>(std::move(lmk));
}

std::vector<double> dns_approx_profile(const LandmarkIndex& lmk, NodeId source) {
  std::vector<double> p(lmk.num_nodes(), 0.0);
  double total = 0.0;
  for (NodeId k = 0; k < p.size(); ++k) {
    if (k != source) total += (p[k] = static_cast<double>(lmk.approx_distance(source, k)));
  }
  for (double& v : p) v /= total;
  return p;
}

std::unique_ptr<NegativeSampler> build_dns_scalable(std::shared_ptr<const LandmarkIndex> lmk) {
  return std::make_unique<ScalableSampler>(std::move(lmk));
}

std::unique_ptr<NegativeSampler> make_sampler(const SamplerSpec& spec, const Graph& g,
                                              std::shared_ptr<const DistanceIndex> dist,
                                              std::shared_ptr<const LandmarkIndex> lmk) {
  switch (spec.kind) {
    case SamplerKind::kUns: return build_uns(g);
    case SamplerKind::kUnsDeg: return build_uns_deg(g);
    case SamplerKind::kDns: return build_dns(std::move(dist), spec.gamma);
    case SamplerKind::kDnsMin: return build_dns_min(std::move(dist));
    case SamplerKind::kDnsMax: return build_dns_max(std::move(dist));
    case SamplerKind::kDnsApprox: return build_dns_approx(std::move(lmk));
    case SamplerKind::kDnsScalable: return build_dns_scalable(std::move(lmk));
  }
  throw UsageError("unknown sampler kind");
}

}  // namespace grl
