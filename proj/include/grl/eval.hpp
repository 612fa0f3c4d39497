#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "grl/distances.hpp"
#include "grl/graph.hpp"
#include "grl/samplers.hpp"
#include "grl/trainer.hpp"

namespace grl {

// ---- splits and metrics ----

struct SplitMask {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;

  /// Throws DataError on overlap or out-of-range nodes.
  void validate(std::size_t n) const;
};

/// Seeded shuffle of `candidates` cut into train/val/test by fraction
/// (floor of each fraction times the candidate count).
SplitMask random_split(std::span<const NodeId> candidates, double train_fraction, double val_fraction,
                       double test_fraction, std::uint64_t seed);
/// Labeled nodes of `labels`, split 10/40/40.
SplitMask default_split(const Labels& labels, std::uint64_t seed);

/// Three lines of whitespace-separated original node ids: train, val, test.
/// Ids outside the graph are skipped.
SplitMask load_mask(const std::filesystem::path& path, const Graph& g);
void write_mask(const std::filesystem::path& path, const Graph& g, const SplitMask& mask);

/// Mean per-class F1 over the classes (ids >= 0) that occur in truth or
/// predictions.  A class with P + R = 0 scores 0.
double f1_macro(std::span<const int> pred, std::span<const int> truth);
/// Per-label binary F1 averaged over labels 0..num_labels-1.
double f1_macro_multilabel(std::span<const std::vector<int>> pred, std::span<const std::vector<int>> truth,
                           std::size_t num_labels);

/// Spearman rank correlation with average ranks for ties; NaN when either
/// side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};
MeanStd mean_std(std::span<const double> values);

// ---- classifier ----

struct ClassifierConfig {
  double c = 1.0;  // inverse L2 strength: minimize 0.5|W|^2 + c * sum of losses
  int max_iterations = 150;
  double gradient_tolerance = 1e-4;
};

struct ClassifierModel {
  std::size_t dim = 0;
  std::size_t classes = 0;
  bool multi_label = false;
  /// (dim + 1) x classes, row-major; the last row is the bias.
  std::vector<double> weights;
  /// Objective per iteration (all heads summed for one-vs-rest), starting at
  /// the zero initialization.
  std::vector<double> objective_trace;
  int iterations = 0;

  std::vector<double> logits(std::span<const float> x) const;
  /// Argmax class, ties to the smaller id.
  int predict(std::span<const float> x) const;
  /// Classes whose head scores above 0.5.
  std::vector<int> predict_multi(std::span<const float> x) const;
};

/// Multinomial logistic regression, or one binary head per label for
/// multi-label data, fitted full-batch by BFGS from zero.
ClassifierModel train_classifier(const EmbeddingMatrix& z, const Labels& labels, std::span<const NodeId> train,
                                 const ClassifierConfig& cfg = {});

/// Fits on mask.train and scores F1-macro on `nodes` (normally mask.test).
double evaluate_f1(const EmbeddingMatrix& z, const Labels& labels, const SplitMask& mask,
                   std::span<const NodeId> nodes, const ClassifierConfig& cfg = {});

// ---- embedding-space diagnostics ----

struct XiCurve {
  /// Index d in [0, d_max]; entry 0 is unused (0 pairs).
  std::vector<double> xi;
  std::vector<std::uint64_t> pairs;
  bool exact = true;
};

/// Mean sigma(z_i . z_j) over unordered pairs at each distance.  Exact for
/// n <= exact_limit, otherwise uniform random pairs with at most
/// samples_per_bucket kept per distance.
XiCurve xi_curve(const EmbeddingMatrix& z, const DistanceIndex& dist, std::size_t exact_limit = 5000,
                 std::size_t samples_per_bucket = 1'000'000, std::uint64_t seed = 1);

struct SeparationReport {
  /// beta[d] for d in [0, d_max]; beta[0] = 0.
  std::vector<double> beta;
  double power = 1.0;
  /// False when beta comes from prob() averaged per distance bucket.
  bool closed_form = true;
};

/// Dissimilarity weights of a sampler with K negatives and window C.
/// UNS: KC/n.  DNS with exponent g: KC d^g / mean_i sum_s d(s,i)^g.  Other
/// kinds: KC times the mean prob(k|i) over ordered pairs at distance d.
SeparationReport separation_power(const NegativeSampler& sampler, const DistanceIndex& dist, std::size_t K,
                                  std::size_t C);

struct AlphaBetaRow {
  unsigned d = 0;
  double alpha = 0.0;
  double beta_uns = 0.0;
  double beta_dns = 0.0;
  double ratio_uns = 0.0;
  double ratio_dns = 0.0;
  /// ratio_uns < ratio_dns.
  bool holds = false;
  /// The sufficient condition n < D(A)/d.
  bool condition = false;
};

/// Rows for d in [1, d_max]; pi[d] is the walk-pair distance mass (indices
/// past pi.size() count as 0).
std::vector<AlphaBetaRow> alpha_beta_report(std::span<const double> pi, const DistanceIndex& dist, std::size_t K,
                                            std::size_t C);

// ---- outliers ----

struct OutlierResult {
  Graph graph;
  Labels labels;
  std::vector<NodeId> attached_to;  // per added node
};

/// Appends `count` degree-1 nodes, each attached to a uniform original node
/// and given the class whose nearest member is farthest from that node.
OutlierResult inject_outliers(const Graph& g, const Labels& labels, std::size_t count, std::uint64_t seed);

}  // namespace grl
