#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "grl/distances.hpp"
#include "grl/eval.hpp"
#include "grl/samplers.hpp"

namespace grl {
namespace {

double oracle_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
  std::set<int> classes;
  for (int c : pred)
    if (c >= 0) classes.insert(c);
  for (int c : truth)
    if (c >= 0) classes.insert(c);
  double total = 0;
  for (int c : classes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      tp += pred[i] == c && truth[i] == c;
      fp += pred[i] == c && truth[i] != c;
      fn += pred[i] != c && truth[i] == c;
    }
    total += tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
  }
  return total / static_cast<double>(classes.size());
}

// Class c rows sit near the unit vector on axis c mod dim.
EmbeddingMatrix blob_embeddings(const std::vector<int>& cls, std::size_t dim, std::uint64_t seed) {
  EmbeddingMatrix z(cls.size(), dim);
  CounterRng rng(seed);
  for (std::size_t v = 0; v < cls.size(); ++v) {
    for (std::size_t k = 0; k < dim; ++k) z(v, k) = static_cast<float>(0.3 * (rng.uniform() - 0.5));
    z(v, static_cast<std::size_t>(cls[v]) % dim) += 1.0f;
  }
  return z;
}

std::vector<NodeId> iota_nodes(std::size_t n) {
  std::vector<NodeId> v(n);
  std::iota(v.begin(), v.end(), NodeId{0});
  return v;
}

TEST(F1Macro, HandExamples) {
  EXPECT_DOUBLE_EQ(f1_macro(std::vector<int>{0, 1, 2, 1}, std::vector<int>{0, 1, 2, 1}), 1.0);
  EXPECT_DOUBLE_EQ(f1_macro(std::vector<int>{0, 0, -1, -1}, std::vector<int>{0, 0, 1, 1}), 0.5);
  // Class 0: P=2/3 R=1; class 1: P=1 R=1/2.
  EXPECT_NEAR(f1_macro(std::vector<int>{0, 0, 0, 1}, std::vector<int>{0, 0, 1, 1}), (0.8 + 2.0 / 3.0) / 2, 1e-15);
  EXPECT_THROW(f1_macro(std::vector<int>{0}, std::vector<int>{0, 1}), UsageError);
  EXPECT_THROW(f1_macro(std::vector<int>{}, std::vector<int>{}), UsageError);
}

TEST(F1Macro, MatchesConfusionOracle) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CounterRng rng(seed);
    const std::size_t n = 1 + rng.below(30);
    const std::size_t k = 1 + rng.below(5);
    std::vector<int> pred(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = static_cast<int>(rng.below(k));
      truth[i] = static_cast<int>(rng.below(k));
    }
    const double f = f1_macro(pred, truth);
    EXPECT_DOUBLE_EQ(f, oracle_f1(pred, truth)) << seed;
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
}

TEST(F1Macro, Multilabel) {
  const std::vector<std::vector<int>> truth{{0, 1}, {1}, {}};
  EXPECT_DOUBLE_EQ(f1_macro_multilabel(truth, truth, 2), 1.0);
  const std::vector<std::vector<int>> pred{{0}, {1}, {1}};
  // Label 0: tp 1 -> F1 1.  Label 1: tp 1, fp 1, fn 1 -> F1 0.5.
  EXPECT_DOUBLE_EQ(f1_macro_multilabel(pred, truth, 2), 0.75);
  EXPECT_THROW(f1_macro_multilabel(pred, truth, 0), UsageError);
}

TEST(Spearman, KnownValues) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(spearman(x, std::vector<double>{2, 4, 6, 8, 100}), 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, std::vector<double>{5, 4, 3, 2, 1}), -1.0);
  // y ranks with a tie: {1, 2.5, 2.5, 4, 5}.
  const double r = spearman(x, std::vector<double>{1, 3, 3, 4, 5});
  EXPECT_NEAR(r, 9.5 / std::sqrt(10.0 * 9.5), 1e-12);
  EXPECT_TRUE(std::isnan(spearman(x, std::vector<double>{1, 1, 1, 1, 1})));
  EXPECT_THROW(spearman(x, std::vector<double>{1, 2}), UsageError);
}

TEST(MeanStd, Population) {
  const MeanStd m = mean_std(std::vector<double>{1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_DOUBLE_EQ(m.std, std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(mean_std(std::vector<double>{7}).std, 0.0);
}

TEST(Splits, RandomSplitSizesAndDisjoint) {
  const auto nodes = iota_nodes(95);
  const SplitMask m = random_split(nodes, 0.1, 0.4, 0.4, 3);
  EXPECT_EQ(m.train.size(), 9u);
  EXPECT_EQ(m.val.size(), 38u);
  EXPECT_EQ(m.test.size(), 38u);
  EXPECT_NO_THROW(m.validate(95));
  const SplitMask again = random_split(nodes, 0.1, 0.4, 0.4, 3);
  EXPECT_EQ(m.train, again.train);
  EXPECT_NE(m.train, random_split(nodes, 0.1, 0.4, 0.4, 4).train);
  EXPECT_THROW(random_split(nodes, 0.5, 0.4, 0.4, 1), UsageError);
}

TEST(Splits, DefaultSplitUsesLabeledNodes) {
  std::vector<int> cls(100, 0);
  for (int v = 0; v < 100; v += 5) cls[v] = -1;
  const Labels labels = labels_from_classes(cls);
  const SplitMask m = default_split(labels, 1);
  EXPECT_EQ(m.train.size(), 8u);
  EXPECT_EQ(m.val.size(), 32u);
  for (const auto* part : {&m.train, &m.val, &m.test})
    for (NodeId v : *part) EXPECT_TRUE(labels.has_label(v));
}

TEST(Splits, ValidateRejectsOverlapAndRange) {
  SplitMask m{{0, 1}, {2}, {1}};
  EXPECT_THROW(m.validate(5), DataError);
  m.test = {7};
  EXPECT_THROW(m.validate(5), DataError);
}

TEST(Splits, MaskFileRoundTrip) {
  test::TempDir dir;
  const Graph g = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}}, {"a", "b", "c", "d"});
  const SplitMask m{{0}, {3, 1}, {2}};
  write_mask(dir / "m.txt", g, m);
  EXPECT_EQ(test::read_file(dir / "m.txt"), "a\nd b\nc\n");
  const SplitMask r = load_mask(dir / "m.txt", g);
  EXPECT_EQ(r.train, m.train);
  EXPECT_EQ(r.val, m.val);
  EXPECT_EQ(r.test, m.test);
  dir.write("unknown.txt", "a zz\nb\nc d\n");
  EXPECT_EQ(load_mask(dir / "unknown.txt", g).train, std::vector<NodeId>{0});
  dir.write("short.txt", "a\nb\n");
  EXPECT_THROW(load_mask(dir / "short.txt", g), ParseError);
  dir.write("dup.txt", "a\na\nc\n");
  EXPECT_THROW(load_mask(dir / "dup.txt", g), DataError);
}

TEST(Classifier, SeparableTrainingAccuracy) {
  std::vector<int> cls(60);
  for (std::size_t v = 0; v < 60; ++v) cls[v] = static_cast<int>(v % 2);
  const EmbeddingMatrix z = blob_embeddings(cls, 4, 1);
  const Labels labels = labels_from_classes(cls);
  const auto nodes = iota_nodes(60);
  const ClassifierModel model = train_classifier(z, labels, nodes);
  EXPECT_EQ(model.classes, 2u);
  EXPECT_EQ(model.weights.size(), 5u * 2u);
  for (NodeId v = 0; v < 60; ++v) EXPECT_EQ(model.predict(z.row(v)), cls[v]);
  EXPECT_LE(model.iterations, 150);
  for (std::size_t t = 1; t < model.objective_trace.size(); ++t) {
    EXPECT_LE(model.objective_trace[t], model.objective_trace[t - 1] + 1e-12);
  }
  EXPECT_NEAR(model.objective_trace.front(), 60 * std::log(2.0), 1e-9);
}

TEST(Classifier, MultiClassAndEvaluateF1) {
  std::vector<int> cls(200);
  for (std::size_t v = 0; v < 200; ++v) cls[v] = static_cast<int>(v % 4);
  const EmbeddingMatrix z = blob_embeddings(cls, 8, 2);
  const Labels labels = labels_from_classes(cls);
  const SplitMask mask = random_split(iota_nodes(200), 0.1, 0.4, 0.4, 1);
  EXPECT_DOUBLE_EQ(evaluate_f1(z, labels, mask, mask.test), 1.0);
}

TEST(Classifier, PermutationInvariant) {
  std::vector<int> cls(80);
  CounterRng rng(4);
  for (auto& c : cls) c = static_cast<int>(rng.below(3));
  EmbeddingMatrix z(80, 6);
  for (float& v : z.data()) v = static_cast<float>(rng.uniform() - 0.5);
  const Labels labels = labels_from_classes(cls);
  auto nodes = iota_nodes(80);
  const ClassifierModel a = train_classifier(z, labels, nodes);
  std::reverse(nodes.begin(), nodes.end());
  shuffle(nodes.begin(), nodes.end(), rng);
  const ClassifierModel b = train_classifier(z, labels, nodes);
  ASSERT_EQ(a.weights.size(), b.weights.size());
  for (std::size_t k = 0; k < a.weights.size(); ++k) EXPECT_NEAR(a.weights[k], b.weights[k], 1e-6);
  const ClassifierModel c = train_classifier(z, labels, nodes);
  EXPECT_EQ(b.weights, c.weights);
}

TEST(Classifier, Errors) {
  const std::vector<int> cls{0, 0, 0, 1};
  const EmbeddingMatrix z = blob_embeddings(cls, 2, 1);
  const Labels labels = labels_from_classes(cls);
  EXPECT_THROW(train_classifier(z, labels, std::vector<NodeId>{0, 1, 2}), DataError);
  EXPECT_THROW(train_classifier(z, labels, std::vector<NodeId>{}), DataError);
  EXPECT_THROW(train_classifier(EmbeddingMatrix(3, 2), labels, std::vector<NodeId>{0, 3}), DataError);
  ClassifierConfig bad;
  bad.c = 0;
  EXPECT_THROW(train_classifier(z, labels, std::vector<NodeId>{0, 3}, bad), UsageError);
}

TEST(Classifier, MultiLabelHeads) {
  // Label 0 follows axis 0, label 1 follows axis 1, independently.
  const std::size_t n = 120;
  EmbeddingMatrix z(n, 2);
  Labels labels;
  labels.class_names = {"x", "y"};
  labels.classes.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    const bool a = v % 2, b = (v / 2) % 2;
    z(v, 0) = a ? 1.0f : -1.0f;
    z(v, 1) = b ? 1.0f : -1.0f;
    if (a) labels.classes[v].push_back(0);
    if (b) labels.classes[v].push_back(1);
  }
  const auto nodes = iota_nodes(n);
  const ClassifierModel m = train_classifier(z, labels, nodes);
  EXPECT_TRUE(m.multi_label);
  for (NodeId v = 0; v < n; ++v) EXPECT_EQ(m.predict_multi(z.row(v)), labels.classes[v]);
  const SplitMask mask{nodes, {}, nodes};
  EXPECT_DOUBLE_EQ(evaluate_f1(z, labels, mask, mask.test), 1.0);
}

TEST(XiCurve, ZeroEmbeddingsGiveHalf) {
  const DistanceIndex d = all_pairs_bfs(test::path_graph(6));
  const XiCurve xi = xi_curve(EmbeddingMatrix(6, 4), d);
  ASSERT_EQ(xi.xi.size(), 6u);
  for (unsigned k = 1; k <= 5; ++k) {
    EXPECT_DOUBLE_EQ(xi.xi[k], 0.5);
    EXPECT_EQ(xi.pairs[k], 6u - k);
  }
  EXPECT_TRUE(xi.exact);
}

TEST(XiCurve, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = test::random_connected_graph(60 + 60 * seed, 40, seed);
    const DistanceIndex d = all_pairs_bfs(g);
    EmbeddingMatrix z(g.num_nodes(), 8);
    CounterRng rng(seed);
    for (float& v : z.data()) v = static_cast<float>(rng.uniform() - 0.5);
    std::vector<double> sum(d.d_max() + 1, 0.0), cnt(d.d_max() + 1, 0.0);
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      for (NodeId j = 0; j < g.num_nodes(); ++j) {
        if (i == j) continue;
        double s = 0;
        for (std::size_t k = 0; k < 8; ++k) s += double(z(i, k)) * z(j, k);
        sum[d(i, j)] += 1.0 / (1.0 + std::exp(-s));
        cnt[d(i, j)] += 1;
      }
    }
    const XiCurve xi = xi_curve(z, d);
    for (unsigned k = 1; k <= d.d_max(); ++k) EXPECT_NEAR(xi.xi[k], sum[k] / cnt[k], 1e-12);
  }
}

TEST(XiCurve, SampledModeApproximatesExact) {
  const Graph g = test::random_connected_graph(300, 100, 9);
  const DistanceIndex d = all_pairs_bfs(g);
  EmbeddingMatrix z(300, 4);
  CounterRng rng(1);
  for (float& v : z.data()) v = static_cast<float>(rng.uniform() - 0.5);
  const XiCurve exact = xi_curve(z, d);
  const XiCurve sampled = xi_curve(z, d, 100, 20000, 3);
  EXPECT_FALSE(sampled.exact);
  for (unsigned k = 1; k <= d.d_max(); ++k) {
    EXPECT_LE(sampled.pairs[k], 20000u);
    if (sampled.pairs[k] >= 5000) EXPECT_NEAR(sampled.xi[k], exact.xi[k], 0.01);
  }
  EXPECT_THROW(xi_curve(EmbeddingMatrix(5, 4), d), UsageError);
}

TEST(SeparationPower, ClosedForms) {
  const Graph g = test::random_connected_graph(120, 30, 2);
  const auto dist = std::make_shared<DistanceIndex>(all_pairs_bfs(g));
  const std::size_t K = 20, C = 4;
  const auto uns = separation_power(*build_uns(g), *dist, K, C);
  EXPECT_EQ(uns.power, 1.0);
  for (unsigned d = 1; d <= dist->d_max(); ++d) EXPECT_DOUBLE_EQ(uns.beta[d], 80.0 / 120.0);
  const auto dns = separation_power(*build_dns(dist), *dist, K, C);
  EXPECT_EQ(dns.power, static_cast<double>(dist->d_max()));
  for (unsigned d = 1; d <= dist->d_max(); ++d) {
    EXPECT_NEAR(dns.beta[d], 80.0 * d / dist->mean_row_sum(), 1e-15);
  }
  const auto sq = separation_power(*build_dns(dist, 2.0), *dist, K, C);
  EXPECT_NEAR(sq.power, std::pow(dist->d_max(), 2.0), 1e-9);
  EXPECT_TRUE(sq.closed_form);
}

TEST(SeparationPower, DnsClosedFormMatchesBucketAverage) {
  const Graph g = test::random_connected_graph(80, 20, 3);
  const auto dist = std::make_shared<DistanceIndex>(all_pairs_bfs(g));
  const auto closed = separation_power(*build_dns(dist), *dist, 5, 2);
  const auto lmk = std::make_shared<LandmarkIndex>(build_landmark_index(g, select_popular(g, 1.0)));
  const auto empirical = separation_power(*build_dns_approx(lmk), *dist, 5, 2);
  EXPECT_FALSE(empirical.closed_form);
  EXPECT_NEAR(empirical.power / closed.power, 1.0, 0.5);
  for (unsigned d = 1; d <= dist->d_max(); ++d) EXPECT_GT(empirical.beta[d], 0.0);
}

TEST(AlphaBeta, SparsePathHoldsAtDistanceOne) {
  const DistanceIndex d = all_pairs_bfs(test::path_graph(30));
  const std::vector<double> pi{0.0, 0.6, 0.4};
  const auto rows = alpha_beta_report(pi, d, 20, 2);
  ASSERT_EQ(rows.size(), 29u);
  EXPECT_TRUE(rows[0].condition);
  EXPECT_TRUE(rows[0].holds);
  EXPECT_DOUBLE_EQ(rows[0].alpha, 0.6);
  EXPECT_DOUBLE_EQ(rows[0].beta_uns, 40.0 / 30.0);
  for (std::size_t r = 2; r < rows.size(); ++r) {
    EXPECT_EQ(rows[r].alpha, 0.0);
    EXPECT_EQ(rows[r].ratio_uns, 0.0);
    EXPECT_EQ(rows[r].ratio_dns, 0.0);
    EXPECT_FALSE(rows[r].holds);
  }
}

TEST(AlphaBeta, CompleteGraphFails) {
  const DistanceIndex d = all_pairs_bfs(test::complete_graph(10));
  const auto rows = alpha_beta_report(std::vector<double>{0.0, 1.0}, d, 20, 4);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].condition);
  EXPECT_FALSE(rows[0].holds);
  EXPECT_DOUBLE_EQ(rows[0].beta_dns, 80.0 / 9.0);
}

TEST(Outliers, ZeroIsIdentity) {
  const Graph g = test::path_graph(5);
  const Labels labels = labels_from_classes(std::vector<int>{0, 0, 1, 1, 1});
  const OutlierResult r = inject_outliers(g, labels, 0, 1);
  EXPECT_EQ(r.graph.edge_list(), g.edge_list());
  EXPECT_EQ(r.labels.classes, labels.classes);
  EXPECT_TRUE(r.attached_to.empty());
}

TEST(Outliers, LeavesWithFarthestClass) {
  const Graph g = test::path_graph(8);
  const Labels labels = labels_from_classes(std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1});
  const OutlierResult r = inject_outliers(g, labels, 10, 2);
  ASSERT_EQ(r.graph.num_nodes(), 18u);
  EXPECT_EQ(r.graph.num_edges(), 7u + 10u);
  ASSERT_EQ(r.attached_to.size(), 10u);
  for (std::size_t t = 0; t < 10; ++t) {
    const auto v = static_cast<NodeId>(8 + t);
    const NodeId anchor = r.attached_to[t];
    EXPECT_EQ(r.graph.degree(v), 1u);
    EXPECT_TRUE(r.graph.has_edge(v, anchor));
    EXPECT_EQ(r.labels.classes[v], std::vector<int>{anchor < 4 ? 1 : 0});
  }
  EXPECT_EQ(r.labels.classes.size(), 18u);
}

}  // namespace
}  // namespace grl
