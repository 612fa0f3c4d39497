#include <cmath>

#include "grl/eval.hpp"
#include "grl/rng.hpp"

namespace grl {

namespace {

constexpr std::uint64_t kXiDomain = 0x5849ULL;  // "XI"

double pair_similarity(const EmbeddingMatrix& z, NodeId i, NodeId j) {
  const auto a = z.row(i);
  const auto b = z.row(j);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += static_cast<double>(a[k]) * static_cast<double>(b[k]);
  return sigmoid(s);
}

}  // namespace

XiCurve xi_curve(const EmbeddingMatrix& z, const DistanceIndex& dist, std::size_t exact_limit,
                 std::size_t samples_per_bucket, std::uint64_t seed) {
  const std::size_t n = dist.num_nodes();
  if (z.rows() != n) throw UsageError("embedding rows do not match the distance index");
  const unsigned dmax = dist.d_max();
  XiCurve out;
  std::vector<double> sums(dmax + 1, 0.0);
  out.pairs.assign(dmax + 1, 0);
  if (n <= exact_limit) {
    for (NodeId i = 0; i < n; ++i) {
      const auto row = dist.row(i);
      for (NodeId j = i + 1; j < n; ++j) {
        const Distance d = row[j];
        sums[d] += pair_similarity(z, i, j);
        ++out.pairs[d];
      }
    }
  } else {
    out.exact = false;
    CounterRng rng(seed ^ kXiDomain, 0);
    const std::uint64_t budget = static_cast<std::uint64_t>(samples_per_bucket) * std::max(1u, dmax);
    std::size_t full = 0;
    for (std::uint64_t t = 0; t < budget && full < dmax; ++t) {
      const auto i = static_cast<NodeId>(rng.below(n));
      const auto j = static_cast<NodeId>(rng.below(n));
      if (i == j) continue;
      const Distance d = dist(i, j);
      if (out.pairs[d] >= samples_per_bucket) continue;
      sums[d] += pair_similarity(z, i, j);
      if (++out.pairs[d] == samples_per_bucket) ++full;
    }
  }
  out.xi.assign(dmax + 1, 0.0);
  for (unsigned d = 1; d <= dmax; ++d) {
    out.xi[d] = out.pairs[d] ? sums[d] / static_cast<double>(out.pairs[d]) : std::nan("");
  }
  return out;
}

SeparationReport separation_power(const NegativeSampler& sampler, const DistanceIndex& dist, std::size_t K,
                                  std::size_t C) {
  const std::size_t n = dist.num_nodes();
  if (sampler.num_nodes() != n) throw UsageError("sampler and distance index cover different graphs");
  const unsigned dmax = dist.d_max();
  const double kc = static_cast<double>(K) * static_cast<double>(C);
  SeparationReport out;
  out.beta.assign(dmax + 1, 0.0);
  if (dmax == 0) return out;

  if (sampler.kind() == SamplerKind::kUns) {
    for (unsigned d = 1; d <= dmax; ++d) out.beta[d] = kc / static_cast<double>(n);
    out.power = 1.0;
    return out;
  }
  if (sampler.kind() == SamplerKind::kDns) {
    const double g = sampler.gamma();
    double normalizer = dist.mean_row_sum();
    if (g != 1.0) {
      double total = 0.0;
      for (NodeId i = 0; i < n; ++i) {
        for (const Distance d : dist.row(i)) {
          if (d) total += std::pow(static_cast<double>(d), g);
        }
      }
      normalizer = total / static_cast<double>(n);
    }
    std::vector<double> shape(dmax + 1, 0.0);
    for (unsigned d = 1; d <= dmax; ++d) {
      shape[d] = g == 1.0 ? static_cast<double>(d) : std::pow(static_cast<double>(d), g);
      out.beta[d] = kc * shape[d] / normalizer;
    }
    out.power = shape[dmax] / shape[1];
    return out;
  }

  out.closed_form = false;
  std::vector<double> sums(dmax + 1, 0.0);
  std::vector<std::uint64_t> counts(dmax + 1, 0);
  for (NodeId i = 0; i < n; ++i) {
    const auto row = dist.row(i);
    for (NodeId k = 0; k < n; ++k) {
      if (k == i) continue;
      sums[row[k]] += sampler.prob(i, k);
      ++counts[row[k]];
    }
  }
  for (unsigned d = 1; d <= dmax; ++d) {
    out.beta[d] = counts[d] ? kc * sums[d] / static_cast<double>(counts[d]) : 0.0;
  }
  out.power = out.beta[1] > 0.0 ? out.beta[dmax] / out.beta[1] : std::nan("");
  return out;
}

std::vector<AlphaBetaRow> alpha_beta_report(std::span<const double> pi, const DistanceIndex& dist, std::size_t K,
                                            std::size_t C) {
  const double n = static_cast<double>(dist.num_nodes());
  const double kc = static_cast<double>(K) * static_cast<double>(C);
  const double da = dist.mean_row_sum();
  std::vector<AlphaBetaRow> rows;
  for (unsigned d = 1; d <= dist.d_max(); ++d) {
    AlphaBetaRow r;
    r.d = d;
    r.alpha = d < pi.size() ? pi[d] : 0.0;
    r.beta_uns = kc / n;
    r.beta_dns = kc * static_cast<double>(d) / da;
    r.ratio_uns = r.alpha / r.beta_uns;
    r.ratio_dns = r.alpha / r.beta_dns;
    r.holds = r.ratio_uns < r.ratio_dns;
    r.condition = n < da / static_cast<double>(d);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace grl
