#include "grl/walks.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string>

#include "grl/binary_io.hpp"
#include "grl/parallel.hpp"

namespace grl {

namespace {

constexpr std::uint64_t kWalkDomain = 0x57414C4B53ULL;  // "WALKS"
constexpr std::uint32_t kCorpusVersion = 1;
const binio::Magic kCorpusMagic = binio::make_magic("GRLW");

NodeId uniform_step(const Graph& g, NodeId cur, CounterRng& rng) {
  const auto nbrs = g.neighbors(cur);
  if (nbrs.empty()) return cur;
  return nbrs[nbrs.size() == 1 ? 0 : rng.below(nbrs.size())];
}

NodeId biased_step(const Graph& g, NodeId prev, NodeId cur, double inv_p, double inv_q, CounterRng& rng,
                   std::vector<double>& cumulative) {
  const auto nbrs = g.neighbors(cur);
  if (nbrs.empty()) return cur;
  cumulative.resize(nbrs.size());
  double total = 0.0;
  for (std::size_t k = 0; k < nbrs.size(); ++k) {
    const NodeId x = nbrs[k];
    total += x == prev ? inv_p : (g.has_edge(x, prev) ? 1.0 : inv_q);
    cumulative[k] = total;
  }
  const double u = rng.uniform() * total;
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return nbrs[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), nbrs.size() - 1)];
}

template <typename WalkOne>
WalkSet generate(const Graph& g, const WalkConfig& cfg, unsigned workers, WalkOne&& walk_one) {
  cfg.validate();
  const std::size_t n = g.num_nodes();
  WalkSet walks;
  walks.walk_length = cfg.walk_length;
  walks.nodes.resize(n * cfg.walks_per_node * cfg.walk_length);
  parallel_blocks(n, workers, [&](unsigned, std::size_t begin, std::size_t end) {
    std::vector<double> scratch;
    for (std::size_t v = begin; v < end; ++v) {
      for (std::size_t r = 0; r < cfg.walks_per_node; ++r) {
        const std::size_t index = v * cfg.walks_per_node + r;
        CounterRng rng(cfg.seed ^ kWalkDomain, index);
        std::span<NodeId> out(walks.nodes.data() + index * cfg.walk_length, cfg.walk_length);
        walk_one(static_cast<NodeId>(v), rng, out, scratch);
      }
    }
  });
  return walks;
}

}  // namespace

void WalkConfig::validate() const {
  if (walks_per_node < 1) throw UsageError("walks_per_node must be at least 1");
  if (window < 1) throw UsageError("window must be at least 1");
  if (walk_length <= window) throw UsageError("walk_length must exceed the context window");
  if (!(p_return > 0.0) || !(q_inout > 0.0)) throw UsageError("node2vec p and q must be positive");
}

WalkModel parse_walk_model(std::string_view name) {
  if (name == "deepwalk") return WalkModel::kDeepWalk;
  if (name == "node2vec") return WalkModel::kNode2Vec;
  throw UsageError("unknown walk model '" + std::string(name) + "'");
}

std::string_view walk_model_name(WalkModel model) {
  return model == WalkModel::kDeepWalk ? "deepwalk" : "node2vec";
}

WalkSet deepwalk_walks(const Graph& g, const WalkConfig& cfg, unsigned workers) {
  return generate(g, cfg, workers, [&](NodeId start, CounterRng& rng, std::span<NodeId> out, std::vector<double>&) {
    out[0] = start;
    for (std::size_t t = 1; t < out.size(); ++t) out[t] = uniform_step(g, out[t - 1], rng);
  });
}

WalkSet node2vec_walks(const Graph& g, const WalkConfig& cfg, unsigned workers) {
  const double inv_p = 1.0 / cfg.p_return;
  const double inv_q = 1.0 / cfg.q_inout;
  return generate(g, cfg, workers,
                  [&](NodeId start, CounterRng& rng, std::span<NodeId> out, std::vector<double>& scratch) {
                    out[0] = start;
                    out[1] = uniform_step(g, start, rng);
                    for (std::size_t t = 2; t < out.size(); ++t) {
                      out[t] = biased_step(g, out[t - 2], out[t - 1], inv_p, inv_q, rng, scratch);
                    }
                  });
}

WalkSet generate_walks(WalkModel model, const Graph& g, const WalkConfig& cfg, unsigned workers) {
  return model == WalkModel::kDeepWalk ? deepwalk_walks(g, cfg, workers) : node2vec_walks(g, cfg, workers);
}

std::vector<double> node2vec_transition(const Graph& g, NodeId prev, NodeId cur, double p, double q) {
  const auto nbrs = g.neighbors(cur);
  std::vector<double> w(nbrs.size());
  double total = 0.0;
  for (std::size_t k = 0; k < nbrs.size(); ++k) {
    const NodeId x = nbrs[k];
    total += (w[k] = x == prev ? 1.0 / p : (g.has_edge(x, prev) ? 1.0 : 1.0 / q));
  }
  for (double& v : w) v /= total;
  return w;
}

PositiveCorpus context_pairs(const WalkSet& walks, std::size_t window) {
  if (window < 1 || window >= walks.walk_length) throw UsageError("window must lie in [1, walk_length)");
  PositiveCorpus corpus;
  const std::size_t L = walks.walk_length;
  corpus.pairs.reserve(walks.size() * 2 * window * L);
  corpus.segment_offsets.reserve(walks.size() + 1);
  for (std::size_t r = 0; r < walks.size(); ++r) {
    const auto walk = walks.walk(r);
    for (std::size_t t = 0; t < L; ++t) {
      const std::size_t lo = t >= window ? t - window : 0;
      const std::size_t hi = std::min(L - 1, t + window);
      for (std::size_t u = lo; u <= hi; ++u) {
        if (u != t && walk[u] != walk[t]) corpus.pairs.emplace_back(walk[t], walk[u]);
      }
    }
    corpus.segment_offsets.push_back(corpus.pairs.size());
  }
  corpus.pairs.shrink_to_fit();
  return corpus;
}

void write_corpus_cache(const std::filesystem::path& path, const PositiveCorpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  binio::write_magic(out, kCorpusMagic);
  binio::write<std::uint32_t>(out, kCorpusVersion);
  binio::write<std::uint64_t>(out, corpus.size());
  binio::write<std::uint64_t>(out, corpus.num_segments());
  for (std::size_t off : corpus.segment_offsets) binio::write<std::uint64_t>(out, off);
  for (const auto& [a, b] : corpus.pairs) {
    binio::write<std::uint32_t>(out, a);
    binio::write<std::uint32_t>(out, b);
  }
  if (!out) throw DataError("write failed: " + path.string());
}

PositiveCorpus read_corpus_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus cache " + path.string());
  binio::expect_magic(in, kCorpusMagic, path.string());
  if (binio::read<std::uint32_t>(in, "version") != kCorpusVersion) {
    throw DataError(path.string() + ": unsupported GRLW version");
  }
  const auto count = binio::read<std::uint64_t>(in, "pair count");
  const auto segments = binio::read<std::uint64_t>(in, "segment count");
  PositiveCorpus corpus;
  const auto offsets = binio::read_array<std::uint64_t>(in, segments + 1, "segment offsets");
  corpus.segment_offsets.assign(offsets.begin(), offsets.end());
  if (corpus.segment_offsets.front() != 0 || corpus.segment_offsets.back() != count) {
    throw DataError(path.string() + ": inconsistent segment offsets");
  }
  const auto flat = binio::read_array<std::uint32_t>(in, 2 * count, "pairs");
  corpus.pairs.resize(count);
  for (std::size_t i = 0; i < count; ++i) corpus.pairs[i] = {flat[2 * i], flat[2 * i + 1]};
  return corpus;
}

std::vector<double> estimate_pi_d(const Graph& g, const DistanceIndex& dist, const WalkConfig& cfg,
                                  std::size_t samples, WalkModel model) {
  cfg.validate();
  if (g.num_nodes() != dist.num_nodes()) throw UsageError("distance index does not match the graph");
  std::vector<std::uint64_t> counts(cfg.window + 1, 0);
  std::uint64_t total = 0;
  CounterRng starts(cfg.seed ^ kWalkDomain, ~std::uint64_t{0});
  WalkSet one;
  one.walk_length = cfg.walk_length;
  one.nodes.resize(cfg.walk_length);
  std::vector<double> scratch;
  const double inv_p = 1.0 / cfg.p_return;
  const double inv_q = 1.0 / cfg.q_inout;
  for (std::uint64_t w = 0; total < samples; ++w) {
    CounterRng rng(cfg.seed ^ kWalkDomain ^ 0xE57ULL, w);
    one.nodes[0] = static_cast<NodeId>(starts.below(g.num_nodes()));
    for (std::size_t t = 1; t < cfg.walk_length; ++t) {
      one.nodes[t] = (model == WalkModel::kNode2Vec && t >= 2)
                         ? biased_step(g, one.nodes[t - 2], one.nodes[t - 1], inv_p, inv_q, rng, scratch)
                         : uniform_step(g, one.nodes[t - 1], rng);
    }
    const PositiveCorpus pairs = context_pairs(one, cfg.window);
    for (const auto& [a, b] : pairs.pairs) {
      const Distance d = dist(a, b);
      if (d > cfg.window) throw std::logic_error("window pair beyond the context window distance");
      ++counts[d];
      ++total;
    }
    if (pairs.size() == 0 && w > 1000) break;  // edgeless graph
  }
  std::vector<double> pi(counts.size(), 0.0);
  if (total > 0) {
    for (std::size_t d = 0; d < counts.size(); ++d) pi[d] = static_cast<double>(counts[d]) / static_cast<double>(total);
  }
  return pi;
}

}  // namespace grl
