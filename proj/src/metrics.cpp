#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include "grl/eval.hpp"
#include "grl/rng.hpp"

namespace grl {

namespace {

constexpr std::uint64_t kSplitDomain = 0x53504C54ULL;  // "SPLT"

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double binary_f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 || tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

}  // namespace

void SplitMask::validate(std::size_t n) const {
  std::vector<char> seen(n, 0);
  for (const auto* part : {&train, &val, &test}) {
    for (const NodeId v : *part) {
      if (v >= n) throw DataError("split mask names node " + std::to_string(v) + " outside the graph");
      if (seen[v]) throw DataError("split mask lists node " + std::to_string(v) + " more than once");
      seen[v] = 1;
    }
  }
}

SplitMask random_split(std::span<const NodeId> candidates, double train_fraction, double val_fraction,
                       double test_fraction, std::uint64_t seed) {
  if (train_fraction < 0 || val_fraction < 0 || test_fraction < 0 ||
      train_fraction + val_fraction + test_fraction > 1.0 + 1e-12) {
    throw UsageError("split fractions must be nonnegative and sum to at most 1");
  }
  std::vector<NodeId> order(candidates.begin(), candidates.end());
  CounterRng rng(seed ^ kSplitDomain, 0);
  shuffle(order.begin(), order.end(), rng);
  const auto count = static_cast<double>(order.size());
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * count + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(val_fraction * count + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(test_fraction * count + 1e-9));
  SplitMask mask;
  auto it = order.begin();
  mask.train.assign(it, it + static_cast<std::ptrdiff_t>(n_train));
  it += static_cast<std::ptrdiff_t>(n_train);
  mask.val.assign(it, it + static_cast<std::ptrdiff_t>(n_val));
  it += static_cast<std::ptrdiff_t>(n_val);
  mask.test.assign(it, it + static_cast<std::ptrdiff_t>(n_test));
  return mask;
}

SplitMask default_split(const Labels& labels, std::uint64_t seed) {
  std::vector<NodeId> labeled;
  for (NodeId v = 0; v < labels.classes.size(); ++v) {
    if (labels.has_label(v)) labeled.push_back(v);
  }
  return random_split(labeled, 0.1, 0.4, 0.4, seed);
}

SplitMask load_mask(const std::filesystem::path& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open mask file " + path.string());
  SplitMask mask;
  std::vector<NodeId>* parts[] = {&mask.train, &mask.val, &mask.test};
  std::string line;
  std::size_t part = 0;
  std::size_t line_no = 0;
  while (part < 3 && std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string::npos && line[first] == '#') continue;
    std::istringstream fields(line);
    std::string id;
    while (fields >> id) {
      if (auto v = g.find(id)) parts[part]->push_back(*v);
    }
    ++part;
  }
  if (part < 3) throw ParseError(path.string(), line_no, "expected three lines: train, val, test");
  mask.validate(g.num_nodes());
  return mask;
}

void write_mask(const std::filesystem::path& path, const Graph& g, const SplitMask& mask) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto* part : {&mask.train, &mask.val, &mask.test}) {
    for (std::size_t i = 0; i < part->size(); ++i) out << (i ? " " : "") << g.original_id((*part)[i]);
    out << '\n';
  }
}

double f1_macro(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw UsageError("prediction and truth lengths differ");
  if (truth.empty()) throw UsageError("f1_macro needs at least one sample");
  struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0;
  };
  std::map<int, Counts> per_class;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] >= 0) per_class[pred[i]];
    if (truth[i] >= 0) per_class[truth[i]];
    if (pred[i] == truth[i]) {
      if (pred[i] >= 0) ++per_class[pred[i]].tp;
    } else {
      if (pred[i] >= 0) ++per_class[pred[i]].fp;
      if (truth[i] >= 0) ++per_class[truth[i]].fn;
    }
  }
  if (per_class.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [c, k] : per_class) total += binary_f1(k.tp, k.fp, k.fn);
  return total / static_cast<double>(per_class.size());
}

double f1_macro_multilabel(std::span<const std::vector<int>> pred, std::span<const std::vector<int>> truth,
                           std::size_t num_labels) {
  if (pred.size() != truth.size()) throw UsageError("prediction and truth lengths differ");
  if (num_labels == 0) throw UsageError("f1_macro_multilabel needs at least one label");
  std::vector<std::size_t> tp(num_labels), fp(num_labels), fn(num_labels);
  std::vector<char> in_pred(num_labels), in_truth(num_labels);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    std::fill(in_pred.begin(), in_pred.end(), 0);
    std::fill(in_truth.begin(), in_truth.end(), 0);
    for (const int c : pred[i]) in_pred.at(static_cast<std::size_t>(c)) = 1;
    for (const int c : truth[i]) in_truth.at(static_cast<std::size_t>(c)) = 1;
    for (std::size_t c = 0; c < num_labels; ++c) {
      tp[c] += in_pred[c] && in_truth[c];
      fp[c] += in_pred[c] && !in_truth[c];
      fn[c] += !in_pred[c] && in_truth[c];
    }
  }
  double total = 0.0;
  for (std::size_t c = 0; c < num_labels; ++c) total += binary_f1(tp[c], fp[c], fn[c]);
  return total / static_cast<double>(num_labels);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw UsageError("spearman needs equal-length inputs");
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mean = 0.5 * static_cast<double>(x.size() + 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  for (const double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (const double v : values) var += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(var / static_cast<double>(values.size()));
  return out;
}

}  // namespace grl
