#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "grl/eval.hpp"

namespace grl {

namespace {

// Full-batch problem over row-major features x (rows x dim).
struct Problem {
  const double* x = nullptr;
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::size_t classes = 0;   // softmax width; 1 for a binary head
  const int* y = nullptr;    // class id, or 0/1 for a binary head
  double c = 1.0;
};

double softmax_fdf(const Problem& p, const double* w, double* grad) {
  const std::size_t k = p.classes;
  const std::size_t d = p.dim;
  double f = 0.0;
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t j = 0; j < k; ++j) f += 0.5 * w[r * k + j] * w[r * k + j];
  }
  if (grad) {
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t j = 0; j < k; ++j) grad[r * k + j] = w[r * k + j];
    }
    for (std::size_t j = 0; j < k; ++j) grad[d * k + j] = 0.0;
  }
  std::vector<double> s(k);
  double loss = 0.0;
  for (std::size_t i = 0; i < p.rows; ++i) {
    const double* xi = p.x + i * d;
    for (std::size_t j = 0; j < k; ++j) s[j] = w[d * k + j];
    for (std::size_t r = 0; r < d; ++r) {
      const double xr = xi[r];
      const double* wr = w + r * k;
      for (std::size_t j = 0; j < k; ++j) s[j] += xr * wr[j];
    }
    const double top = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += std::exp(s[j] - top);
    const double lse = top + std::log(z);
    const auto yi = static_cast<std::size_t>(p.y[i]);
    loss += lse - s[yi];
    if (grad) {
      for (std::size_t j = 0; j < k; ++j) s[j] = std::exp(s[j] - lse) - (j == yi ? 1.0 : 0.0);
      for (std::size_t r = 0; r < d; ++r) {
        const double xr = p.c * xi[r];
        double* gr = grad + r * k;
        for (std::size_t j = 0; j < k; ++j) gr[j] += xr * s[j];
      }
      for (std::size_t j = 0; j < k; ++j) grad[d * k + j] += p.c * s[j];
    }
  }
  return f + p.c * loss;
}

double binary_fdf(const Problem& p, const double* w, double* grad) {
  const std::size_t d = p.dim;
  double f = 0.0;
  for (std::size_t r = 0; r < d; ++r) f += 0.5 * w[r] * w[r];
  if (grad) {
    for (std::size_t r = 0; r < d; ++r) grad[r] = w[r];
    grad[d] = 0.0;
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < p.rows; ++i) {
    const double* xi = p.x + i * d;
    double s = w[d];
    for (std::size_t r = 0; r < d; ++r) s += xi[r] * w[r];
    const double t = p.y[i] ? s : -s;
    loss -= std::min(t, 0.0) - std::log1p(std::exp(-std::abs(t)));  // -log sigma(t)
    if (grad) {
      const double g = p.c * (sigmoid(s) - (p.y[i] ? 1.0 : 0.0));
      for (std::size_t r = 0; r < d; ++r) grad[r] += g * xi[r];
      grad[d] += g;
    }
  }
  return f + p.c * loss;
}

double eval_fdf(const Problem& p, const gsl_vector* w, gsl_vector* grad) {
  const double* wd = w->data;
  double* gd = grad ? grad->data : nullptr;
  return p.classes == 1 ? binary_fdf(p, wd, gd) : softmax_fdf(p, wd, gd);
}

double gsl_f(const gsl_vector* w, void* params) { return eval_fdf(*static_cast<Problem*>(params), w, nullptr); }
void gsl_df(const gsl_vector* w, void* params, gsl_vector* g) { eval_fdf(*static_cast<Problem*>(params), w, g); }
void gsl_fdf(const gsl_vector* w, void* params, double* f, gsl_vector* g) {
  *f = eval_fdf(*static_cast<Problem*>(params), w, g);
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fdfminimizer* s) const { gsl_multimin_fdfminimizer_free(s); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

// Minimizes from zero; appends objective values to `trace`, returns iterations used.
int minimize(Problem& p, std::vector<double>& out, std::vector<double>& trace, const ClassifierConfig& cfg) {
  const std::size_t width = p.classes == 1 ? 1 : p.classes;
  const std::size_t size = (p.dim + 1) * width;
  gsl_set_error_handler_off();
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_calloc(size));
  std::unique_ptr<gsl_multimin_fdfminimizer, MinimizerDeleter> s(
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, size));
  if (!x || !s) throw NumericError("cannot allocate classifier optimizer");
  gsl_multimin_function_fdf fn{&gsl_f, &gsl_df, &gsl_fdf, size, &p};
  gsl_multimin_fdfminimizer_set(s.get(), &fn, x.get(), 0.1, 0.1);
  trace.push_back(s->f);
  int it = 0;
  while (it < cfg.max_iterations) {
    if (gsl_multimin_test_gradient(s->gradient, cfg.gradient_tolerance) == GSL_SUCCESS) break;
    const int status = gsl_multimin_fdfminimizer_iterate(s.get());
    if (status != GSL_SUCCESS) break;  // no further progress possible along the line search
    ++it;
    trace.push_back(s->f);
  }
  if (!std::isfinite(s->f)) throw NumericError("classifier objective became non-finite");
  out.assign(s->x->data, s->x->data + size);
  return it;
}

std::vector<double> gather_features(const EmbeddingMatrix& z, std::span<const NodeId> nodes) {
  std::vector<double> x(nodes.size() * z.cols());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto row = z.row(nodes[i]);
    std::copy(row.begin(), row.end(), x.begin() + static_cast<std::ptrdiff_t>(i * z.cols()));
  }
  return x;
}

}  // namespace

std::vector<double> ClassifierModel::logits(std::span<const float> x) const {
  if (x.size() != dim) throw UsageError("feature dimension does not match the classifier");
  std::vector<double> s(classes);
  if (multi_label) {
    for (std::size_t j = 0; j < classes; ++j) {
      const double* w = weights.data() + j * (dim + 1);
      double v = w[dim];
      for (std::size_t r = 0; r < dim; ++r) v += w[r] * x[r];
      s[j] = v;
    }
  } else {
    for (std::size_t j = 0; j < classes; ++j) s[j] = weights[dim * classes + j];
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t j = 0; j < classes; ++j) s[j] += x[r] * weights[r * classes + j];
    }
  }
  return s;
}

int ClassifierModel::predict(std::span<const float> x) const {
  const auto s = logits(x);
  return static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
}

std::vector<int> ClassifierModel::predict_multi(std::span<const float> x) const {
  const auto s = logits(x);
  std::vector<int> out;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] > 0.0) out.push_back(static_cast<int>(j));
  }
  return out;
}

ClassifierModel train_classifier(const EmbeddingMatrix& z, const Labels& labels, std::span<const NodeId> train,
                                 const ClassifierConfig& cfg) {
  if (labels.classes.size() != z.rows()) throw DataError("labels and embeddings cover different node counts");
  if (!(cfg.c > 0.0)) throw UsageError("classifier C must be positive");
  std::vector<NodeId> nodes;
  for (const NodeId v : train) {
    if (v >= z.rows()) throw DataError("training node outside the embedding matrix");
    if (labels.has_label(v)) nodes.push_back(v);
  }
  if (nodes.empty()) throw DataError("training split has no labeled nodes");

  ClassifierModel model;
  model.dim = z.cols();
  model.classes = labels.num_classes();
  model.multi_label = labels.multi_label();
  const std::vector<double> x = gather_features(z, nodes);
  Problem p{x.data(), nodes.size(), z.cols(), 0, nullptr, cfg.c};

  if (!model.multi_label) {
    std::vector<int> y(nodes.size());
    std::set<int> present;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      y[i] = labels.classes[nodes[i]][0];
      present.insert(y[i]);
    }
    if (present.size() < 2) throw DataError("training split contains a single class");
    p.classes = model.classes;
    p.y = y.data();
    model.iterations = minimize(p, model.weights, model.objective_trace, cfg);
    return model;
  }

  // One-vs-rest: head j stored as a contiguous (dim + 1) block.
  model.weights.assign((model.dim + 1) * model.classes, 0.0);
  std::vector<int> y(nodes.size());
  std::vector<double> head;
  std::vector<std::vector<double>> traces(model.classes);
  for (std::size_t j = 0; j < model.classes; ++j) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& cls = labels.classes[nodes[i]];
      y[i] = std::find(cls.begin(), cls.end(), static_cast<int>(j)) != cls.end() ? 1 : 0;
    }
    p.classes = 1;
    p.y = y.data();
    model.iterations = std::max(model.iterations, minimize(p, head, traces[j], cfg));
    std::copy(head.begin(), head.end(), model.weights.begin() + static_cast<std::ptrdiff_t>(j * (model.dim + 1)));
  }
  // Per-iteration objective of the sum, holding finished heads at their last value.
  for (int it = 0; it <= model.iterations; ++it) {
    double total = 0.0;
    for (const auto& t : traces) total += t[std::min<std::size_t>(static_cast<std::size_t>(it), t.size() - 1)];
    model.objective_trace.push_back(total);
  }
  return model;
}

double evaluate_f1(const EmbeddingMatrix& z, const Labels& labels, const SplitMask& mask,
                   std::span<const NodeId> nodes, const ClassifierConfig& cfg) {
  const ClassifierModel model = train_classifier(z, labels, mask.train, cfg);
  if (model.multi_label) {
    std::vector<std::vector<int>> pred, truth;
    for (const NodeId v : nodes) {
      if (!labels.has_label(v)) continue;
      pred.push_back(model.predict_multi(z.row(v)));
      truth.push_back(labels.classes[v]);
    }
    if (truth.empty()) throw DataError("evaluation split has no labeled nodes");
    return f1_macro_multilabel(pred, truth, model.classes);
  }
  std::vector<int> pred, truth;
  for (const NodeId v : nodes) {
    if (!labels.has_label(v)) continue;
    pred.push_back(model.predict(z.row(v)));
    truth.push_back(labels.classes[v][0]);
  }
  if (truth.empty()) throw DataError("evaluation split has no labeled nodes");
  return f1_macro(pred, truth);
}

}  // namespace grl
