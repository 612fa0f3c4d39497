#include "grl/trainer.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <string>
#include <type_traits>

#include <Eigen/Core>

#include "grl/binary_io.hpp"
#include "grl/parallel.hpp"
#include "grl/rng.hpp"

namespace grl {

namespace {

constexpr std::uint64_t kInitDomain = 0x494E4954ULL;     // "INIT"
constexpr std::uint64_t kShuffleDomain = 0x53485546ULL;  // "SHUF"
constexpr std::uint64_t kNegDomain = 0x4E454753ULL;      // "NEGS"
const binio::Magic kEmbeddingMagic = binio::make_magic("GRLE");

template <typename T>
inline T dot_generic(const T* __restrict a, const T* __restrict b, std::size_t l) {
  T s = 0;
#pragma omp simd reduction(+ : s)
  for (std::size_t k = 0; k < l; ++k) s += a[k] * b[k];
  return s;
}

template <typename T>
inline void axpy_generic(T a, const T* __restrict x, T* __restrict y, std::size_t l) {
#pragma omp simd
  for (std::size_t k = 0; k < l; ++k) y[k] += a * x[k];
}

// 16-lane float blocks; the compiler maps them onto whatever vector width the
// target has.  Used when the row length is a multiple of 16.
typedef float f16 __attribute__((vector_size(64), aligned(4)));

inline f16 load16(const float* p) { return *reinterpret_cast<const f16*>(p); }
inline void store16(float* p, f16 v) { *reinterpret_cast<f16*>(p) = v; }

inline float hsum16(f16 v) {
  typedef float f8 __attribute__((vector_size(32), aligned(4)));
  typedef float f4 __attribute__((vector_size(16), aligned(4)));
  f8 lo, hi;
  std::memcpy(&lo, &v, sizeof lo);
  std::memcpy(&hi, reinterpret_cast<const char*>(&v) + sizeof lo, sizeof hi);
  lo += hi;
  f4 a, b;
  std::memcpy(&a, &lo, sizeof a);
  std::memcpy(&b, reinterpret_cast<const char*>(&lo) + sizeof a, sizeof b);
  a += b;
  return (a[0] + a[2]) + (a[1] + a[3]);
}

template <typename T>
inline T dot(const T* a, const T* b, std::size_t l) {
  if constexpr (std::is_same_v<T, float>) {
    if (l % 16 == 0) {
      f16 s0 = {}, s1 = {};
      std::size_t k = 0;
      for (; k + 32 <= l; k += 32) {
        s0 += load16(a + k) * load16(b + k);
        s1 += load16(a + k + 16) * load16(b + k + 16);
      }
      if (k < l) s0 += load16(a + k) * load16(b + k);
      return hsum16(s0 + s1);
    }
  }
  return dot_generic(a, b, l);
}

template <typename T>
inline void axpy(T c, const T* x, T* y, std::size_t l) {
  if constexpr (std::is_same_v<T, float>) {
    if (l % 16 == 0) {
      for (std::size_t k = 0; k < l; k += 16) store16(y + k, load16(y + k) + c * load16(x + k));
      return;
    }
  }
  axpy_generic(c, x, y, l);
}

// y += sum_q c[q] * rows[q]
template <typename T>
inline void combine(std::span<const T> c, std::span<const T* const> rows, T* y, std::size_t l) {
  if constexpr (std::is_same_v<T, float>) {
    if (l % 16 == 0) {
      const std::size_t cnt = rows.size();
      for (std::size_t k = 0; k < l; k += 16) {
        f16 a0 = load16(y + k), a1 = {};
        std::size_t q = 0;
        for (; q + 2 <= cnt; q += 2) {
          a0 += c[q] * load16(rows[q] + k);
          a1 += c[q + 1] * load16(rows[q + 1] + k);
        }
        if (q < cnt) a0 += c[q] * load16(rows[q] + k);
        store16(y + k, a0 + a1);
      }
      return;
    }
  }
  for (std::size_t q = 0; q < rows.size(); ++q) axpy_generic(c[q], rows[q], y, l);
}

// exp(-|y|).  The float version is a short polynomial so that loops over it
// vectorize; relative error is around 2e-7.
inline float exp_neg_abs(float y) {
  const float x = std::max(-std::abs(y), -87.0f);
  const float k = std::floor(x * 1.44269504088896341f + 0.5f);
  const float r = (x - k * 0.693359375f) + k * 2.12194440e-4f;
  float p = 1.9875691500e-4f;
  p = p * r + 1.3981999507e-3f;
  p = p * r + 8.3334519073e-3f;
  p = p * r + 4.1665795894e-2f;
  p = p * r + 1.6666665459e-1f;
  p = p * r + 5.0000001201e-1f;
  p = p * r * r + r + 1.0f;
  return p * std::bit_cast<float>((static_cast<std::int32_t>(k) + 127) << 23);
}
inline double exp_neg_abs(double y) { return std::exp(-std::abs(y)); }

// Running sum of log s(y) = min(y, 0) - log(1 + exp(-|y|)).  The logs go
// through a product of factors in (1, 2], flushed well before it can overflow.
class LogSigmoidSum {
 public:
  // `product` covers at most 64 factors.
  void add(double linear, double product) {
    linear_ += linear;
    product_ *= product;
    if (product_ > 1e200) flush();
  }
  double value() {
    flush();
    return linear_ - logged_;
  }

 private:
  void flush() {
    logged_ += std::log(product_);
    product_ = 1.0;
  }
  double linear_ = 0.0;
  double logged_ = 0.0;
  double product_ = 1.0;
};

// Scores one pair: y[0] = z_i.z_j, y[q] = -z_i.z_k.  Writes dF/d(z_i.z_q)
// into c and feeds the objective terms to the accumulators.
template <typename T>
void score_pair(const T* y, T* t, T* c, std::size_t cnt, LogSigmoidSum& pos, LogSigmoidSum& neg) {
#pragma omp simd
  for (std::size_t q = 0; q < cnt; ++q) t[q] = exp_neg_abs(y[q]);
#pragma omp simd
  for (std::size_t q = 0; q < cnt; ++q) {
    const T one = T{1} / (T{1} + t[q]);
    c[q] = -(y[q] >= 0 ? t[q] * one : one);  // 1 - s(y), negated for y = -x
  }
  c[0] = -c[0];
  pos.add(std::min(static_cast<double>(y[0]), 0.0), 1.0 + static_cast<double>(t[0]));
  for (std::size_t q0 = 1; q0 < cnt; q0 += 64) {
    const std::size_t q1 = std::min(cnt, q0 + 64);
    T linear = 0, product = 1;
#pragma omp simd reduction(+ : linear) reduction(* : product)
    for (std::size_t q = q0; q < q1; ++q) {
      linear += std::min(y[q], T{0});
      product *= T{1} + t[q];
    }
    neg.add(static_cast<double>(linear), static_cast<double>(product));
  }
}

// Gradient of every pair sharing one source.  Each term's gradient w.r.t. a
// context or negative row is a multiple of z_i, so those rows only collect a
// scalar until end(), which adds coef * z_i once per distinct row.
template <typename T>
class GroupKernel {
 public:
  GroupKernel(const Matrix<T>& z, Matrix<T>& grad)
      : z_(z), grad_(grad), coef_(z.rows(), T{0}), stamp_(z.rows(), 0), gi_(z.cols(), T{0}) {}

  void begin(NodeId i) {
    i_ = i;
    ++group_;
    touched_.clear();
    std::fill(gi_.begin(), gi_.end(), T{0});
  }

  void add(NodeId j, std::span<const NodeId> negatives) {
    const std::size_t l = z_.cols();
    const std::size_t cnt = negatives.size() + 1;
    if (rows_.size() != cnt) {
      rows_.resize(cnt);
      ids_.resize(cnt);
      y_.resize(cnt);
      t_.resize(cnt);
      c_.resize(cnt);
    }
    ids_[0] = j;
    std::copy(negatives.begin(), negatives.end(), ids_.begin() + 1);
    const T* zi = z_.row(i_).data();
    for (std::size_t q = 0; q < cnt; ++q) {
      rows_[q] = z_.row(ids_[q]).data();
      const T x = dot(zi, rows_[q], l);
      y_[q] = q == 0 ? x : -x;
    }
    score_pair(y_.data(), t_.data(), c_.data(), cnt, positive_, negative_);
    combine<T>(c_, rows_, gi_.data(), l);
    for (std::size_t q = 0; q < cnt; ++q) {
      const NodeId r = ids_[q];
      if (stamp_[r] != group_) {
        stamp_[r] = group_;
        coef_[r] = T{0};
        touched_.push_back(r);
      }
      coef_[r] += c_[q];
    }
  }

  void end() {
    const std::size_t l = z_.cols();
    const T* zi = z_.row(i_).data();
    for (const NodeId r : touched_) axpy(coef_[r], zi, grad_.row(r).data(), l);
    axpy(T{1}, gi_.data(), grad_.row(i_).data(), l);
  }

  /// Terms of every pair added so far.
  PairTerms terms() { return {positive_.value(), negative_.value()}; }

 private:
  const Matrix<T>& z_;
  Matrix<T>& grad_;
  std::vector<T> coef_;
  std::vector<std::uint64_t> stamp_;
  std::vector<NodeId> touched_;
  std::vector<T> gi_;
  std::vector<const T*> rows_;
  std::vector<NodeId> ids_;
  std::vector<T> y_, t_, c_;
  LogSigmoidSum positive_, negative_;
  NodeId i_ = 0;
  std::uint64_t group_ = 0;
};

using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Adds C^T to C in place, so C becomes C + C^T.
void symmetrize(RowMatrix& c, unsigned workers) {
  constexpr std::size_t kTile = 64;
  const auto n = static_cast<std::size_t>(c.rows());
  const std::size_t tiles = (n + kTile - 1) / kTile;
  parallel_blocks(tiles, workers, [&](unsigned, std::size_t t0, std::size_t t1) {
    for (std::size_t bi = t0; bi < t1; ++bi) {
      const std::size_t i0 = bi * kTile, i1 = std::min(n, i0 + kTile);
      for (std::size_t j0 = i0; j0 < n; j0 += kTile) {
        const std::size_t j1 = std::min(n, j0 + kTile);
        for (std::size_t i = i0; i < i1; ++i) {
          for (std::size_t j = std::max(j0, i); j < j1; ++j) {
            const float v = c(i, j) + c(j, i);
            c(i, j) = v;
            c(j, i) = v;
          }
        }
      }
    }
  });
}

bool dense_batches(const TrainConfig& cfg, std::size_t n, const PositiveCorpus& corpus) {
  switch (cfg.kernel) {
    case GradientKernel::kSparse: return false;
    case GradientKernel::kDense: return true;
    case GradientKernel::kAuto: break;
  }
  if (n > 4096 || corpus.num_segments() == 0) return false;
  const double batch_pairs = static_cast<double>(corpus.size()) *
                             static_cast<double>(std::min(cfg.minibatch, corpus.num_segments())) /
                             static_cast<double>(corpus.num_segments());
  // The dense path costs about 1.5 n^2 l multiply-adds per batch but runs them
  // as GEMMs; the sparse one costs 3 (K+1) l per pair on scattered rows.
  return static_cast<double>(n) * static_cast<double>(n) <= 4.0 * static_cast<double>(cfg.negatives + 1) * batch_pairs;
}

}  // namespace

template <typename T>
PairTerms accumulate_sgns(const Matrix<T>& z, NodeId i, NodeId j, std::span<const NodeId> negatives,
                          Matrix<T>& grad) {
  GroupKernel<T> kernel(z, grad);
  kernel.begin(i);
  kernel.add(j, negatives);
  kernel.end();
  return kernel.terms();
}

template <typename T>
double sgns_objective(const Matrix<T>& z, std::span<const Edge> pairs, std::span<const NodeId> negatives) {
  if (pairs.empty()) return 0.0;
  if (negatives.size() % pairs.size() != 0) throw std::invalid_argument("negatives must hold K draws per pair");
  const std::size_t k = negatives.size() / pairs.size();
  const std::size_t l = z.cols();
  double total = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    total += log_sigmoid(static_cast<double>(dot_generic(z.row(i).data(), z.row(j).data(), l)));
    for (std::size_t r = 0; r < k; ++r) {
      const NodeId neg = negatives[p * k + r];
      total += log_sigmoid(-static_cast<double>(dot_generic(z.row(i).data(), z.row(neg).data(), l)));
    }
  }
  return total;
}

template <typename T>
std::vector<std::pair<NodeId, std::vector<T>>> sgns_gradient(const Matrix<T>& z, Edge pair,
                                                             std::span<const NodeId> negatives) {
  const std::size_t l = z.cols();
  std::vector<NodeId> touched{pair.first, pair.second};
  touched.insert(touched.end(), negatives.begin(), negatives.end());
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  Matrix<T> grad(z.rows(), l);
  accumulate_sgns(z, pair.first, pair.second, negatives, grad);
  std::vector<std::pair<NodeId, std::vector<T>>> out;
  for (const NodeId r : touched) {
    const auto g = grad.row(r);
    out.emplace_back(r, std::vector<T>(g.begin(), g.end()));
  }
  return out;
}

template PairTerms accumulate_sgns<float>(const Matrix<float>&, NodeId, NodeId, std::span<const NodeId>,
                                          Matrix<float>&);
template PairTerms accumulate_sgns<double>(const Matrix<double>&, NodeId, NodeId, std::span<const NodeId>,
                                           Matrix<double>&);
template double sgns_objective<float>(const Matrix<float>&, std::span<const Edge>, std::span<const NodeId>);
template double sgns_objective<double>(const Matrix<double>&, std::span<const Edge>, std::span<const NodeId>);
template std::vector<std::pair<NodeId, std::vector<float>>> sgns_gradient<float>(const Matrix<float>&, Edge,
                                                                                 std::span<const NodeId>);
template std::vector<std::pair<NodeId, std::vector<double>>> sgns_gradient<double>(const Matrix<double>&, Edge,
                                                                                   std::span<const NodeId>);

void TrainConfig::validate() const {
  if (dim == 0) throw UsageError("embedding dimension must be positive");
  if (negatives == 0) throw UsageError("negatives per pair must be positive");
  if (epochs == 0) throw UsageError("epochs must be positive");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) throw UsageError("learning rate must be positive");
  if (minibatch == 0) throw UsageError("minibatch must be positive");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) throw UsageError("Adam betas must be in [0, 1)");
  if (!(epsilon > 0)) throw UsageError("Adam epsilon must be positive");
  if (workers == 0) throw UsageError("workers must be positive");
}

void LossReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "epoch,positive,negative,objective,mean_per_pair\n" << std::setprecision(12);
  const double denom = pairs_per_epoch ? static_cast<double>(pairs_per_epoch) : 1.0;
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    out << e << ',' << epochs[e].positive << ',' << epochs[e].negative << ',' << epochs[e].objective() << ','
        << epochs[e].objective() / denom << '\n';
  }
}

EmbeddingMatrix initial_embeddings(std::size_t n, std::size_t dim, std::uint64_t seed) {
  EmbeddingMatrix z(n, dim);
  CounterRng rng(seed ^ kInitDomain, 0);
  const double half = 0.5 / static_cast<double>(dim);
  for (float& v : z.data()) v = static_cast<float>((rng.uniform() * 2.0 - 1.0) * half);
  return z;
}

TrainResult train(const Graph& g, const PositiveCorpus& corpus, const NegativeSampler& sampler,
                  const TrainConfig& cfg) {
  cfg.validate();
  const std::size_t n = g.num_nodes();
  if (sampler.num_nodes() != n) throw UsageError("sampler was built for a different graph");
  const std::size_t l = cfg.dim;
  const std::size_t K = cfg.negatives;

  TrainResult result{initial_embeddings(n, l, cfg.seed), {}};
  EmbeddingMatrix& z = result.embeddings;
  result.loss.pairs_per_epoch = corpus.size();

  std::vector<float> m1(n * l, 0.0f);
  std::vector<float> m2(n * l, 0.0f);
  EmbeddingMatrix grad(n, l);

  const unsigned workers = std::max(1u, cfg.workers);
  const bool dense = dense_batches(cfg, n, corpus);
  std::vector<EmbeddingMatrix> worker_grads(workers > 1 && !dense ? workers : 0);
  for (auto& wg : worker_grads) wg = EmbeddingMatrix(n, l);
  std::vector<SamplerScratch> scratch(workers);
  std::vector<PairTerms> worker_terms(workers);
  RowMatrix scores, coef;
  if (dense) {
    scores.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    coef.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  }

  std::vector<std::size_t> order(corpus.num_segments());
  std::vector<std::size_t> batch_pairs;  // global pair indices grouped by source
  std::vector<std::size_t> bucket(n + 1);
  std::vector<std::size_t> group_starts;
  std::uint64_t step = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t s = 0; s < order.size(); ++s) order[s] = s;
    CounterRng shuffle_rng(cfg.seed ^ kShuffleDomain, epoch);
    shuffle(order.begin(), order.end(), shuffle_rng);
    EpochLoss loss;

    for (std::size_t b0 = 0; b0 < order.size(); b0 += cfg.minibatch) {
      const std::size_t b1 = std::min(order.size(), b0 + cfg.minibatch);
      // Counting sort of the batch's pairs by source.
      std::fill(bucket.begin(), bucket.end(), 0);
      std::size_t total = 0;
      for (std::size_t s = b0; s < b1; ++s) {
        for (const auto& [i, j] : corpus.segment(order[s])) ++bucket[i + 1];
        total += corpus.segment_offsets[order[s] + 1] - corpus.segment_offsets[order[s]];
      }
      if (total == 0) continue;
      for (std::size_t v = 0; v < n; ++v) bucket[v + 1] += bucket[v];
      batch_pairs.resize(total);
      group_starts.clear();
      for (std::size_t v = 0; v < n; ++v) {
        if (bucket[v + 1] > bucket[v]) group_starts.push_back(bucket[v]);
      }
      group_starts.push_back(total);
      for (std::size_t s = b0; s < b1; ++s) {
        const std::size_t off = corpus.segment_offsets[order[s]];
        const auto seg = corpus.segment(order[s]);
        for (std::size_t q = 0; q < seg.size(); ++q) batch_pairs[bucket[seg[q].first]++] = off + q;
      }

      const std::size_t groups = group_starts.size() - 1;
      auto source_of = [&](std::size_t gr) { return corpus.pairs[batch_pairs[group_starts[gr]]].first; };
      auto draw = [&](NodeId i, std::size_t q, std::span<NodeId> out, SamplerScratch& sc) {
        CounterRng rng(cfg.seed ^ kNegDomain, epoch * corpus.size() + q);
        sampler.draw(i, rng, out, sc);
      };
      std::fill(worker_terms.begin(), worker_terms.end(), PairTerms{});

      if (dense) {
        // Same batch gradient through n x n matrices:
        // scores S = Z Z^T, coef C[i][k] = sum of dF/d(z_i.z_k), grad = (C + C^T) Z.
        const Eigen::Map<const RowMatrix> zm(z.data().data(), static_cast<Eigen::Index>(n),
                                             static_cast<Eigen::Index>(l));
        parallel_blocks(n, workers, [&](unsigned, std::size_t r0, std::size_t r1) {
          const auto rows = static_cast<Eigen::Index>(r1 - r0);
          scores.middleRows(static_cast<Eigen::Index>(r0), rows).noalias() =
              zm.middleRows(static_cast<Eigen::Index>(r0), rows) * zm.transpose();
          coef.middleRows(static_cast<Eigen::Index>(r0), rows).setZero();
        });
        parallel_blocks(groups, workers, [&](unsigned w, std::size_t g0, std::size_t g1) {
          SamplerScratch& sc = scratch[w];
          sc.reset();
          std::vector<NodeId> ids(K + 1);
          std::vector<float> y(K + 1), t(K + 1), c(K + 1);
          LogSigmoidSum pos, neg;
          for (std::size_t gr = g0; gr < g1; ++gr) {
            const NodeId i = source_of(gr);
            const float* srow = &scores(i, 0);
            float* crow = &coef(i, 0);
            for (std::size_t p = group_starts[gr]; p < group_starts[gr + 1]; ++p) {
              const std::size_t q = batch_pairs[p];
              ids[0] = corpus.pairs[q].second;
              draw(i, q, std::span<NodeId>(ids).subspan(1), sc);
              y[0] = srow[ids[0]];
              for (std::size_t r = 1; r <= K; ++r) y[r] = -srow[ids[r]];
              score_pair(y.data(), t.data(), c.data(), K + 1, pos, neg);
              for (std::size_t r = 0; r <= K; ++r) crow[ids[r]] += c[r];
            }
          }
          worker_terms[w] = {pos.value(), neg.value()};
        });
        symmetrize(coef, workers);
        parallel_blocks(n, workers, [&](unsigned, std::size_t r0, std::size_t r1) {
          const auto rows = static_cast<Eigen::Index>(r1 - r0);
          Eigen::Map<RowMatrix> gm(grad.data().data() + r0 * l, rows, static_cast<Eigen::Index>(l));
          gm.noalias() = coef.middleRows(static_cast<Eigen::Index>(r0), rows) * zm;
        });
      } else {
        parallel_blocks(groups, workers, [&](unsigned w, std::size_t g0, std::size_t g1) {
          EmbeddingMatrix& out = workers > 1 ? worker_grads[w] : grad;
          std::fill(out.data().begin(), out.data().end(), 0.0f);
          SamplerScratch& sc = scratch[w];
          sc.reset();
          GroupKernel<float> kernel(z, out);
          std::vector<NodeId> negs(K);
          for (std::size_t gr = g0; gr < g1; ++gr) {
            const NodeId i = source_of(gr);
            kernel.begin(i);
            for (std::size_t p = group_starts[gr]; p < group_starts[gr + 1]; ++p) {
              const std::size_t q = batch_pairs[p];
              draw(i, q, negs, sc);
              kernel.add(corpus.pairs[q].second, negs);
            }
            kernel.end();
          }
          worker_terms[w] = kernel.terms();
        });
        if (workers > 1) {
          std::fill(grad.data().begin(), grad.data().end(), 0.0f);
          for (const auto& wg : worker_grads) axpy(1.0f, wg.data().data(), grad.data().data(), n * l);
        }
      }
      PairTerms batch_terms;
      for (const auto& t : worker_terms) {
        batch_terms.positive += t.positive;
        batch_terms.negative += t.negative;
      }
      if (!std::isfinite(batch_terms.positive) || !std::isfinite(batch_terms.negative)) {
        throw NumericError("non-finite objective in epoch " + std::to_string(epoch) + ", minibatch starting at walk " +
                           std::to_string(b0));
      }
      loss.positive += batch_terms.positive;
      loss.negative += batch_terms.negative;

      // Adam ascent on the batch-mean gradient.
      ++step;
      const auto inv = static_cast<float>(1.0 / static_cast<double>(total));
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      const auto b1f = static_cast<float>(cfg.beta1);
      const auto b2f = static_cast<float>(cfg.beta2);
      const auto lr_t = static_cast<float>(cfg.learning_rate / bc1);
      const auto sqrt_bc2 = static_cast<float>(std::sqrt(bc2));
      const auto eps = static_cast<float>(cfg.epsilon);
      float* __restrict zd = z.data().data();
      const float* __restrict gd = grad.data().data();
      float* __restrict m1d = m1.data();
      float* __restrict m2d = m2.data();
      const std::size_t len = n * l;
#pragma omp simd
      for (std::size_t x = 0; x < len; ++x) {
        const float gx = gd[x] * inv;
        m1d[x] = b1f * m1d[x] + (1.0f - b1f) * gx;
        m2d[x] = b2f * m2d[x] + (1.0f - b2f) * gx * gx;
        zd[x] += lr_t * m1d[x] / (std::sqrt(m2d[x]) / sqrt_bc2 + eps);
      }
      for (const float v : z.data()) {
        if (!std::isfinite(v)) throw NumericError("non-finite embedding after epoch " + std::to_string(epoch));
      }
    }
    result.loss.epochs.push_back(loss);
  }
  return result;
}

void write_embeddings_binary(const std::filesystem::path& path, const EmbeddingMatrix& z) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  binio::write_magic(out, kEmbeddingMagic);
  binio::write<std::uint64_t>(out, z.rows());
  binio::write<std::uint64_t>(out, z.cols());
  binio::write_array<float>(out, z.data());
  if (!out) throw DataError("failed writing " + path.string());
}

EmbeddingMatrix read_embeddings_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  binio::expect_magic(in, kEmbeddingMagic, path.string());
  const auto n = binio::read<std::uint64_t>(in, "row count");
  const auto l = binio::read<std::uint64_t>(in, "column count");
  if (l == 0 || n > (std::uint64_t{1} << 32) || l > (std::uint64_t{1} << 20)) {
    throw DataError(path.string() + ": implausible embedding shape");
  }
  EmbeddingMatrix z(n, l);
  z.data() = binio::read_array<float>(in, n * l, "embedding values");
  return z;
}

void write_embeddings_tsv(const std::filesystem::path& path, const Graph& g, const EmbeddingMatrix& z) {
  if (z.rows() != g.num_nodes()) throw UsageError("embedding rows do not match the graph");
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << std::setprecision(9);
  for (NodeId v = 0; v < z.rows(); ++v) {
    out << g.original_id(v);
    for (const float x : z.row(v)) out << '\t' << x;
    out << '\n';
  }
}

}  // namespace grl
