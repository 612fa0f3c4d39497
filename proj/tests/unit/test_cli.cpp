#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <sstream>

#include "fixtures.hpp"
#include "grl/cli.hpp"

namespace grl {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "grl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Toy path 0-1-2-3 with two classes, plus an isolated edge that preprocess drops.
struct ToyData {
  test::TempDir dir;
  std::string data;

  ToyData() {
    dir.write("edges.txt", "0 1\n1 2\n2 3\n8 9\n");
    dir.write("labels.txt", "0 a\n1 a\n2 b\n3 b\n8 a\n");
    dir.write("mask.txt", "0 3\n\n1 2\n");
    data = (dir / "prep").string();
  }

  Outcome preprocess(const std::string& out_dir, std::vector<std::string> extra = {}) const {
    std::vector<std::string> args{"preprocess", "--edges", (dir / "edges.txt").string(), "--labels",
                                  (dir / "labels.txt").string(), "--out-dir", out_dir};
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  }

  std::vector<std::string> train_args(const std::string& prefix, const std::string& sampler) const {
    return {"train", "--data", data, "--sampler", sampler, "--out", (dir / prefix).string(),
            "--walks-per-node", "4", "--walk-length", "6", "--window", "2", "--dim", "8",
            "--negatives", "2", "--epochs", "2", "--minibatch", "4"};
  }
};

TEST(Cli, ToyPipelineUnderOneSecond) {
  const auto start = std::chrono::steady_clock::now();
  ToyData toy;
  Outcome pre = toy.preprocess(toy.data, {"--popular-fraction", "0.5"});
  ASSERT_EQ(pre.code, 0) << pre.err;
  EXPECT_NE(pre.out.find("kept 4 of 6 nodes"), std::string::npos);
  EXPECT_NE(pre.out.find("n=4 m=3 directed_edges=6"), std::string::npos) << pre.out;
  for (const char* f : {"graph.grlg", "edges.txt", "labels.txt", "distances.grld", "landmarks.grll", "stats.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(toy.dir / "prep" / f)) << f;
  }

  Outcome tr = run(toy.train_args("emb/dw", "uns"));
  ASSERT_EQ(tr.code, 0) << tr.err;
  EXPECT_NE(tr.out.find("deepwalk-uns: 2 epochs"), std::string::npos) << tr.out;
  for (const char* ext : {".grle", ".tsv", ".loss.csv"}) {
    EXPECT_TRUE(std::filesystem::exists((toy.dir / "emb").string() + "/dw" + ext)) << ext;
  }

  Outcome ev = run({"eval", "--data", toy.data, "--embeddings", (toy.dir / "emb/dw.grle").string(), "--masks",
                    (toy.dir / "mask.txt").string(), "--report", (toy.dir / "f1.csv").string()});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_NE(ev.out.find("f1_macro"), std::string::npos);
  EXPECT_NE(ev.out.find("over 1 runs"), std::string::npos) << ev.out;

  Outcome an = run({"analyze", "--data", toy.data, "--embeddings", (toy.dir / "emb/dw.grle").string(),
                    "--report-dir", (toy.dir / "reports").string(), "--samplers", "uns,dns,dns-approx",
                    "--window", "2", "--pi-samples", "2000"});
  ASSERT_EQ(an.code, 0) << an.err;
  EXPECT_NE(an.out.find("separation power uns: 1"), std::string::npos) << an.out;
  EXPECT_NE(an.out.find("separation power dns: 3"), std::string::npos) << an.out;
  for (const char* f : {"xi.csv", "pi.csv", "beta.csv", "separation.csv", "alpha_beta.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(toy.dir / "reports" / f)) << f;
  }
  // pi has no mass beyond the window.
  EXPECT_EQ(test::read_file(toy.dir / "reports/pi.csv").substr(0, 9), "d,pi\n0,0\n");

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(seconds, 1.0);
}

TEST(Cli, PreprocessIsIdempotent) {
  ToyData toy;
  ASSERT_EQ(toy.preprocess((toy.dir / "a").string(), {"--popular-fraction", "0.5"}).code, 0);
  ASSERT_EQ(toy.preprocess((toy.dir / "b").string(), {"--popular-fraction", "0.5"}).code, 0);
  ASSERT_EQ(toy.preprocess((toy.dir / "a").string(), {"--popular-fraction", "0.5"}).code, 0);
  for (const char* f : {"graph.grlg", "distances.grld", "landmarks.grll", "edges.txt", "labels.txt"}) {
    EXPECT_EQ(test::read_file(toy.dir / "a" / f), test::read_file(toy.dir / "b" / f)) << f;
  }
}

TEST(Cli, TrainDeterministicAndGammaDefault) {
  ToyData toy;
  ASSERT_EQ(toy.preprocess(toy.data).code, 0);
  ASSERT_EQ(run(toy.train_args("a", "dns")).code, 0);
  ASSERT_EQ(run(toy.train_args("b", "dns")).code, 0);
  auto with_gamma = toy.train_args("c", "dns");
  with_gamma.insert(with_gamma.end(), {"--gamma", "1"});
  ASSERT_EQ(run(with_gamma).code, 0);
  const std::string a = test::read_file(toy.dir / "a.grle");
  EXPECT_EQ(a, test::read_file(toy.dir / "b.grle"));
  EXPECT_EQ(a, test::read_file(toy.dir / "c.grle"));
  auto other_seed = toy.train_args("d", "dns");
  other_seed.insert(other_seed.end(), {"--seed", "7"});
  ASSERT_EQ(run(other_seed).code, 0);
  EXPECT_NE(a, test::read_file(toy.dir / "d.grle"));
}

TEST(Cli, Node2VecAndCacheHungrySamplers) {
  ToyData toy;
  ASSERT_EQ(toy.preprocess(toy.data, {"--popular-fraction", "0.5"}).code, 0);
  for (const char* s : {"uns-deg", "dns-min", "dns-max", "dns-approx", "dns-scalable"}) {
    EXPECT_EQ(run(toy.train_args(std::string("s_") + s, s)).code, 0) << s;
  }
  auto n2v = toy.train_args("n2v", "uns");
  n2v.insert(n2v.end(), {"--model", "node2vec", "-p", "1", "-q", "4"});
  const Outcome r = run(n2v);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("node2vec-uns"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  ToyData toy;
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"preprocess", "--edges", "x"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);

  const Outcome missing = toy.preprocess(toy.data + "/../nowhere", {});
  EXPECT_EQ(missing.code, kExitOk);  // writable output directory is created
  const Outcome no_edges = run({"preprocess", "--edges", (toy.dir / "absent.txt").string(), "--out-dir", toy.data});
  EXPECT_EQ(no_edges.code, kExitData);
  EXPECT_NE(no_edges.err.find("absent.txt"), std::string::npos);

  toy.dir.write("bad.txt", "0 1\n1\n");
  const Outcome parse = run({"preprocess", "--edges", (toy.dir / "bad.txt").string(), "--out-dir", toy.data});
  EXPECT_EQ(parse.code, kExitData);
  EXPECT_NE(parse.err.find("bad.txt:2"), std::string::npos) << parse.err;

  ASSERT_EQ(toy.preprocess(toy.data, {"--skip-distances"}).code, 0);
  const Outcome no_cache = run(toy.train_args("x", "dns"));
  EXPECT_EQ(no_cache.code, kExitData);
  EXPECT_NE(no_cache.err.find("distance cache"), std::string::npos) << no_cache.err;
  EXPECT_EQ(run(toy.train_args("x", "uns")).code, kExitOk);

  EXPECT_EQ(run(toy.train_args("x", "nope")).code, kExitUsage);
  auto bad_window = toy.train_args("x", "uns");
  bad_window.insert(bad_window.end(), {"--window", "9"});
  EXPECT_EQ(run(bad_window).code, kExitUsage);

  auto diverge = toy.train_args("x", "uns");
  diverge.insert(diverge.end(), {"--lr", "1e36"});
  EXPECT_EQ(run(diverge).code, kExitNumeric);

  const Outcome wrong_rows =
      run({"eval", "--data", toy.data, "--embeddings", (toy.dir / "x.grle").string(), "--runs", "0"});
  EXPECT_EQ(wrong_rows.code, kExitUsage);
}

TEST(Cli, EvalRejectsMismatchedEmbeddings) {
  ToyData toy;
  ASSERT_EQ(toy.preprocess(toy.data).code, 0);
  write_embeddings_binary(toy.dir / "big.grle", EmbeddingMatrix(9, 4));
  const Outcome r = run({"eval", "--data", toy.data, "--embeddings", (toy.dir / "big.grle").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("9 rows"), std::string::npos) << r.err;
}

TEST(Cli, ConfigFileDefaultsAndFlagPrecedence) {
  ToyData toy;
  ASSERT_EQ(toy.preprocess(toy.data).code, 0);
  toy.dir.write("train.conf", "epochs=3\nsampler=uns\n");
  auto args = toy.train_args("cfg", "uns");
  // Strip --epochs and --sampler so the config supplies them.
  std::vector<std::string> trimmed;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--epochs" || args[i] == "--sampler") {
      ++i;
      continue;
    }
    trimmed.push_back(args[i]);
  }
  trimmed.insert(trimmed.end(), {"--config", (toy.dir / "train.conf").string()});
  Outcome r = run(trimmed);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("deepwalk-uns: 3 epochs"), std::string::npos) << r.out;
  trimmed.insert(trimmed.end(), {"--epochs", "1"});
  r = run(trimmed);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(": 1 epochs"), std::string::npos) << r.out;

  // Sectioned files work when given before the subcommand.
  toy.dir.write("sectioned.conf", "[train]\nepochs=3\n");
  std::vector<std::string> front{"--config", (toy.dir / "sectioned.conf").string()};
  front.insert(front.end(), args.begin(), args.end());
  front.erase(std::find(front.begin(), front.end(), "--epochs"), std::find(front.begin(), front.end(), "--epochs") + 2);
  r = run(front);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(": 3 epochs"), std::string::npos) << r.out;

  toy.dir.write("typo.conf", "epoch=3\n");
  trimmed.back() = "1";
  trimmed.insert(trimmed.end(), {"--config", (toy.dir / "typo.conf").string()});
  EXPECT_EQ(run(trimmed).code, kExitUsage);
  toy.dir.write("typo.conf", "epochs=3\n");
  r = run(trimmed);  // both files are read, the flag still wins
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(": 1 epochs"), std::string::npos) << r.out;
}

TEST(Cli, SynthWritesGraphAndLabels) {
  test::TempDir dir;
  const Outcome r = run({"synth", "--preset", "sparse", "--nodes", "300", "--seed", "3", "--out-edges",
                         (dir / "e.txt").string(), "--out-labels", (dir / "l.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("n=300"), std::string::npos) << r.out;
  const Graph g = load_edge_list(dir / "e.txt");
  EXPECT_EQ(g.num_nodes(), 300u);
  EXPECT_EQ(connected_components(g).count(), 1u);
  EXPECT_EQ(load_labels(dir / "l.txt", g).num_classes(), 7u);
  EXPECT_EQ(run({"synth", "--out-edges", (dir / "x.txt").string()}).code, kExitUsage);
  EXPECT_EQ(run({"synth", "--preset", "galaxy", "--out-edges", (dir / "x.txt").string()}).code, kExitUsage);
}

TEST(Cli, SweepRowsPerGridPoint) {
  test::TempDir dir;
  ASSERT_EQ(run({"synth", "--preset", "sparse", "--nodes", "120", "--classes", "3", "--out-edges",
                 (dir / "e.txt").string(), "--out-labels", (dir / "l.txt").string()})
                .code,
            0);
  const std::string data = (dir / "prep").string();
  ASSERT_EQ(run({"preprocess", "--edges", (dir / "e.txt").string(), "--labels", (dir / "l.txt").string(),
                 "--out-dir", data})
                .code,
            0);
  const std::vector<std::string> common{"--data", data, "--walks-per-node", "2", "--walk-length", "10", "--dim",
                                        "8", "--negatives", "2", "--epochs", "1", "--runs", "1"};
  std::vector<std::string> win{"sweep", "--windows", "2,4,6,8", "--report", (dir / "w.csv").string()};
  win.insert(win.end(), common.begin(), common.end());
  Outcome r = run(win);
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream w(test::read_file(dir / "w.csv"));
  std::string line;
  std::getline(w, line);
  EXPECT_EQ(line, "window,uns_mean,uns_std,dns_mean,dns_std,dns_minus_uns,status");
  int rows = 0;
  while (std::getline(w, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.size() - 3), ",ok") << line;
  }
  EXPECT_EQ(rows, 4);

  std::vector<std::string> gam{"sweep", "--gammas", "0,0.25,0.5,0.75,1,1.25", "--report",
                               (dir / "g.csv").string()};
  gam.insert(gam.end(), common.begin(), common.end());
  r = run(gam);
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream g(test::read_file(dir / "g.csv"));
  std::getline(g, line);
  EXPECT_EQ(line, "gamma,dns_mean,dns_std,status");
  rows = 0;
  while (std::getline(g, line)) ++rows;
  EXPECT_EQ(rows, 6);

  std::vector<std::string> both{"sweep", "--gammas", "1", "--windows", "2", "--report", (dir / "x.csv").string()};
  both.insert(both.end(), common.begin(), common.end());
  EXPECT_EQ(run(both).code, kExitUsage);
}

TEST(Cli, SweepRecordsFailedPoints) {
  test::TempDir dir;
  ASSERT_EQ(run({"synth", "--preset", "sparse", "--nodes", "80", "--classes", "2", "--out-edges",
                 (dir / "e.txt").string(), "--out-labels", (dir / "l.txt").string()})
                .code,
            0);
  const std::string data = (dir / "prep").string();
  ASSERT_EQ(run({"preprocess", "--edges", (dir / "e.txt").string(), "--labels", (dir / "l.txt").string(),
                 "--out-dir", data})
                .code,
            0);
  // Window 12 is not below the walk length, so that point fails and the next still runs.
  const Outcome r = run({"sweep", "--data", data, "--windows", "12,2", "--walk-length", "10", "--walks-per-node",
                         "2", "--dim", "8", "--epochs", "1", "--runs", "1", "--report", (dir / "w.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = test::read_file(dir / "w.csv");
  EXPECT_NE(csv.find("12,,,,,,error: "), std::string::npos) << csv;
  EXPECT_NE(csv.find(",ok\n"), std::string::npos) << csv;
}

}  // namespace
}  // namespace grl
