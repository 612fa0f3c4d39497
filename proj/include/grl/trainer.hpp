#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "grl/common.hpp"
#include "grl/graph.hpp"
#include "grl/samplers.hpp"
#include "grl/walks.hpp"

namespace grl {

/// Dense row-major matrix of node embeddings.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{0}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  T operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using EmbeddingMatrix = Matrix<float>;

inline double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}
/// log(sigmoid(x)) without overflow.
inline double log_sigmoid(double x) { return std::min(x, 0.0) - std::log1p(std::exp(-std::abs(x))); }

struct PairTerms {
  double positive = 0.0;
  double negative = 0.0;
};

/// Adds the ascent gradient of
///   log s(z_i.z_j) + sum_k log s(-z_i.z_k)
/// into `grad` and returns the two terms.
template <typename T>
PairTerms accumulate_sgns(const Matrix<T>& z, NodeId i, NodeId j, std::span<const NodeId> negatives,
                          Matrix<T>& grad);

/// Objective summed over pairs; negatives holds K draws per pair, pair-major.
template <typename T>
double sgns_objective(const Matrix<T>& z, std::span<const Edge> pairs, std::span<const NodeId> negatives);

/// Ascent gradient of one pair's objective as (row, gradient) entries,
/// one per distinct touched row, sorted by row.
template <typename T>
std::vector<std::pair<NodeId, std::vector<T>>> sgns_gradient(const Matrix<T>& z, Edge pair,
                                                             std::span<const NodeId> negatives);

/// How a minibatch gradient is computed.  The dense form goes through n x n
/// score/coefficient matrices and pays off when batches touch most rows.
enum class GradientKernel { kAuto, kSparse, kDense };

struct TrainConfig {
  std::size_t dim = 128;
  std::size_t negatives = 20;
  double learning_rate = 0.01;
  std::size_t epochs = 30;
  std::size_t minibatch = 512;  // corpus segments (walks) per optimizer step
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  GradientKernel kernel = GradientKernel::kAuto;

  void validate() const;
};

struct EpochLoss {
  double positive = 0.0;
  double negative = 0.0;
  double objective() const { return positive + negative; }
};

/// Per-epoch objective, each term evaluated at the parameters its minibatch saw.
struct LossReport {
  std::vector<EpochLoss> epochs;
  std::size_t pairs_per_epoch = 0;

  void write_csv(const std::filesystem::path& path) const;
};

struct TrainResult {
  EmbeddingMatrix embeddings;
  LossReport loss;
};

/// Initial embeddings: uniform in (-0.5/l, 0.5/l) per entry.
EmbeddingMatrix initial_embeddings(std::size_t n, std::size_t dim, std::uint64_t seed);

/// Skip-gram negative sampling with minibatch Adam.  Each epoch visits the
/// corpus segments in a freshly shuffled order, `minibatch` segments per step;
/// a pair's K negatives depend only on (seed, epoch, pair index).  Output is
/// bit-identical for a given seed and worker count.
TrainResult train(const Graph& g, const PositiveCorpus& corpus, const NegativeSampler& sampler,
                  const TrainConfig& cfg);

/// "GRLE": magic, u64 n, u64 l, n*l little-endian float32 row-major.
void write_embeddings_binary(const std::filesystem::path& path, const EmbeddingMatrix& z);
EmbeddingMatrix read_embeddings_binary(const std::filesystem::path& path);
/// One row per node: original id, a tab, then tab-separated values.
void write_embeddings_tsv(const std::filesystem::path& path, const Graph& g, const EmbeddingMatrix& z);

}  // namespace grl
