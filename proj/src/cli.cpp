#include "grl/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>

#include "grl/parallel.hpp"
#include "grl/synth.hpp"

namespace grl {

namespace {

void require_file(const std::filesystem::path& path, const std::string& hint) {
  if (!std::filesystem::exists(path)) throw DataError(path.string() + " not found; " + hint);
}

std::ofstream open_report(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << std::setprecision(10);
  return out;
}

// Unsectioned keys in a --config file belong to the subcommand it was given to.
class SubcommandConfig : public CLI::ConfigINI {
 public:
  std::string subcommand;

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    if (subcommand.empty()) return items;
    for (auto& item : items) {
      if (item.parents.empty() && item.name != "++" && item.name != "--") item.parents.push_back(subcommand);
    }
    return items;
  }
};

// CLI11 only reads config files registered on the top-level app, so a
// subcommand's --config is moved in front of the subcommand.
std::vector<std::string> hoist_config(int argc, const char* const* argv, const CLI::App& app,
                                      std::string& subcommand) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto sub = std::find_if(args.begin(), args.end(),
                          [&](const std::string& a) { return app.get_subcommand_no_throw(a) != nullptr; });
  if (sub == args.end()) return args;
  subcommand = *sub;
  const auto sub_at = static_cast<std::size_t>(sub - args.begin());
  std::vector<std::string> moved;
  for (std::size_t i = sub_at + 1; i < args.size();) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      moved.insert(moved.end(), {args[i], args[i + 1]});
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
    } else if (args[i].rfind("--config=", 0) == 0) {
      moved.push_back(args[i]);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_at), moved.begin(), moved.end());
  return args;
}

std::vector<SamplerKind> parse_sampler_list(const std::vector<std::string>& names) {
  std::vector<SamplerKind> kinds;
  for (const auto& n : names) kinds.push_back(parse_sampler_kind(n));
  return kinds;
}

// Options shared by train and sweep.
struct TrainOptions {
  std::string data;
  std::string model = "deepwalk";
  std::string sampler = "dns";
  ModelSpec spec;

  void add(CLI::App* app, bool with_sampler) {
    app->add_option("--data", data, "Directory written by preprocess")->required();
    app->add_option("--model", model, "Walk model: deepwalk or node2vec")->capture_default_str();
    if (with_sampler) {
      app->add_option("--sampler", sampler, "uns, uns-deg, dns, dns-min, dns-max, dns-approx, dns-scalable")
          ->capture_default_str();
      app->add_option("--gamma", spec.sampler.gamma, "Distance exponent of the dns sampler")->capture_default_str();
    }
    app->add_option("--walks-per-node", spec.walk.walks_per_node)->capture_default_str();
    app->add_option("--walk-length", spec.walk.walk_length, "Nodes per walk")->capture_default_str();
    app->add_option("--window", spec.walk.window, "Context window C")->capture_default_str();
    app->add_option("-p,--return-p", spec.walk.p_return, "node2vec return parameter")->capture_default_str();
    app->add_option("-q,--inout-q", spec.walk.q_inout, "node2vec in-out parameter")->capture_default_str();
    app->add_option("--dim", spec.train.dim, "Embedding dimension")->capture_default_str();
    app->add_option("--negatives", spec.train.negatives, "Negatives per positive pair (K)")->capture_default_str();
    app->add_option("--lr", spec.train.learning_rate, "Adam learning rate")->capture_default_str();
    app->add_option("--epochs", spec.train.epochs)->capture_default_str();
    app->add_option("--minibatch", spec.train.minibatch, "Walks per optimizer step")->capture_default_str();
    app->add_option("--seed", spec.train.seed, "Seed for walks, negatives and initialization")
        ->capture_default_str();
  }

  ModelSpec resolve() const {
    ModelSpec s = spec;
    s.model = parse_walk_model(model);
    s.sampler.kind = parse_sampler_kind(sampler);
    s.walk.seed = s.train.seed;
    s.train.workers = worker_count();
    return s;
  }
};

int cmd_preprocess(const std::string& edges, const std::string& labels_path, const std::string& out_dir,
                   double popular_fraction, bool skip_distances, std::ostream& out) {
  const Graph full = load_edge_list(edges);
  const Graph g = largest_connected_component(full);
  const DataLayout layout{out_dir};
  std::filesystem::create_directories(layout.dir);
  write_graph_cache(layout.graph(), g);
  write_edge_list(layout.edges(), g);

  std::optional<Labels> labels;
  if (!labels_path.empty()) {
    labels = load_labels(labels_path, g);
    write_labels(layout.labels(), g, *labels);
  }
  const unsigned workers = worker_count();
  std::optional<DistanceIndex> dist;
  if (!skip_distances) {
    dist = all_pairs_bfs(g, workers);
    write_distance_cache(layout.distances(), *dist);
  }
  if (popular_fraction > 0.0) {
    const auto popular = select_popular(g, popular_fraction);
    write_landmark_cache(layout.landmarks(), build_landmark_index(g, popular, workers));
  }
  const StatsReport stats = graph_stats(g, dist ? &*dist : nullptr, labels ? &*labels : nullptr);
  std::ofstream(layout.stats()) << stats.to_string() << '\n';
  out << "kept " << g.num_nodes() << " of " << full.num_nodes() << " nodes (largest component)\n"
      << stats.to_string() << '\n';
  return kExitOk;
}

int cmd_synth(const std::string& preset, std::size_t nodes, double exponent, std::size_t classes,
              std::uint64_t seed, const std::string& out_edges, const std::string& out_labels, std::ostream& out) {
  SynthConfig cfg;
  if (!preset.empty()) {
    cfg = preset_config(parse_synth_preset(preset), seed);
  } else if (exponent <= 0.0) {
    throw UsageError("synth needs --preset or --exponent");
  }
  if (nodes) cfg.n = nodes;
  if (exponent > 0.0) cfg.exponent = exponent;
  if (classes) cfg.classes = classes;
  cfg.seed = seed;
  const SynthGraph s = generate_synthetic(cfg);
  write_edge_list(out_edges, s.graph);
  if (!out_labels.empty()) write_labels(out_labels, s.graph, s.labels);
  out << graph_stats(s.graph, nullptr, &s.labels).to_string() << " exponent=" << cfg.exponent << '\n';
  return kExitOk;
}

int cmd_train(const TrainOptions& opts, const std::string& out_prefix, bool tsv, std::ostream& out) {
  const ModelSpec spec = opts.resolve();
  const Artifacts data = load_artifacts({opts.data}, needs_distance_index(spec.sampler.kind),
                                        needs_landmark_index(spec.sampler.kind), false);
  const TrainResult result = train_model(data, spec);
  const std::filesystem::path prefix(out_prefix);
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
  write_embeddings_binary(prefix.string() + ".grle", result.embeddings);
  if (tsv) write_embeddings_tsv(prefix.string() + ".tsv", data.graph, result.embeddings);
  result.loss.write_csv(prefix.string() + ".loss.csv");
  const auto& e = result.loss.epochs;
  out << walk_model_name(spec.model) << '-' << sampler_name(spec.sampler.kind) << ": " << e.size()
      << " epochs, objective " << (e.empty() ? 0.0 : e.front().objective()) << " -> "
      << (e.empty() ? 0.0 : e.back().objective()) << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& data_dir, const std::vector<std::string>& embeddings, const std::string& mask_path,
             std::size_t runs, std::uint64_t seed, double c, const std::string& report, std::ostream& out) {
  const Artifacts data = load_artifacts({data_dir}, false, false, true);
  std::optional<SplitMask> mask;
  if (!mask_path.empty()) mask = load_mask(mask_path, data.graph);
  if (runs == 0) throw UsageError("--runs must be positive");
  ClassifierConfig cc;
  cc.c = c;
  std::vector<double> scores;
  std::ofstream csv;
  if (!report.empty()) {
    csv = open_report(report);
    csv << "embeddings,run,f1_macro\n";
  }
  for (const auto& path : embeddings) {
    const EmbeddingMatrix z = read_embeddings_binary(path);
    if (z.rows() != data.graph.num_nodes()) {
      throw DataError(path + " has " + std::to_string(z.rows()) + " rows but the graph has " +
                      std::to_string(data.graph.num_nodes()) + " nodes");
    }
    // A fixed mask leaves nothing to vary between runs, so it is scored once.
    const std::size_t r_count = mask ? 1 : runs;
    for (std::size_t r = 0; r < r_count; ++r) {
      const double f1 = score_embeddings(z, *data.labels, mask, seed + r, cc);
      scores.push_back(f1);
      if (csv) csv << path << ',' << r << ',' << f1 << '\n';
    }
  }
  const MeanStd ms = mean_std(scores);
  out << std::fixed << std::setprecision(4) << "f1_macro " << ms.mean << " +- " << ms.std << " over "
      << scores.size() << " runs\n";
  return kExitOk;
}

int cmd_analyze(const std::string& data_dir, const std::string& embeddings, const std::string& report_dir,
                const std::vector<std::string>& sampler_names, std::size_t window, std::size_t negatives,
                std::size_t pi_samples, std::uint64_t seed, std::ostream& out) {
  const auto kinds = parse_sampler_list(sampler_names);
  bool need_lmk = false;
  for (const auto k : kinds) need_lmk |= needs_landmark_index(k);
  const Artifacts data = load_artifacts({data_dir}, true, need_lmk, false);
  const DistanceIndex& dist = *data.dist;
  const std::filesystem::path dir(report_dir);
  std::filesystem::create_directories(dir);

  if (!embeddings.empty()) {
    const EmbeddingMatrix z = read_embeddings_binary(embeddings);
    const XiCurve xi = xi_curve(z, dist, 5000, 1'000'000, seed);
    auto csv = open_report(dir / "xi.csv");
    csv << "d,xi,pairs\n";
    std::vector<double> ds, xs;
    for (unsigned d = 1; d <= dist.d_max(); ++d) {
      csv << d << ',' << xi.xi[d] << ',' << xi.pairs[d] << '\n';
      if (d > window && xi.pairs[d]) {
        ds.push_back(d);
        xs.push_back(xi.xi[d]);
      }
    }
    out << "xi spearman over d > " << window << ": " << spearman(ds, xs) << '\n';
  }

  WalkConfig wc;
  wc.window = window;
  wc.seed = seed;
  const auto pi = estimate_pi_d(data.graph, dist, wc, pi_samples);
  {
    auto csv = open_report(dir / "pi.csv");
    csv << "d,pi\n";
    for (std::size_t d = 0; d < pi.size(); ++d) csv << d << ',' << pi[d] << '\n';
  }

  {
    auto beta_csv = open_report(dir / "beta.csv");
    auto power_csv = open_report(dir / "separation.csv");
    power_csv << "sampler,power,closed_form\n";
    std::vector<SeparationReport> reports;
    beta_csv << 'd';
    for (const auto k : kinds) {
      const auto sampler = make_sampler({k, 1.0}, data.graph, data.dist, data.landmarks);
      reports.push_back(separation_power(*sampler, dist, negatives, window));
      beta_csv << ',' << sampler_name(k);
      power_csv << sampler_name(k) << ',' << reports.back().power << ',' << (reports.back().closed_form ? 1 : 0)
                << '\n';
      out << "separation power " << sampler_name(k) << ": " << reports.back().power << '\n';
    }
    beta_csv << '\n';
    for (unsigned d = 1; d <= dist.d_max(); ++d) {
      beta_csv << d;
      for (const auto& r : reports) beta_csv << ',' << r.beta[d];
      beta_csv << '\n';
    }
  }

  auto csv = open_report(dir / "alpha_beta.csv");
  csv << "d,alpha,beta_uns,beta_dns,ratio_uns,ratio_dns,holds,condition\n";
  for (const auto& r : alpha_beta_report(pi, dist, negatives, window)) {
    csv << r.d << ',' << r.alpha << ',' << r.beta_uns << ',' << r.beta_dns << ',' << r.ratio_uns << ','
        << r.ratio_dns << ',' << (r.holds ? 1 : 0) << ',' << (r.condition ? 1 : 0) << '\n';
  }
  out << "reports written to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_sweep(const TrainOptions& opts, const std::vector<std::size_t>& windows, const std::vector<double>& gammas,
              const std::vector<std::string>& sampler_names, const std::string& mask_path, std::size_t runs,
              const std::string& report, std::ostream& out) {
  if (windows.empty() == gammas.empty()) throw UsageError("sweep needs exactly one of --windows or --gammas");
  if (runs == 0) throw UsageError("--runs must be positive");
  const ModelSpec base = opts.resolve();
  const bool gamma_sweep = !gammas.empty();
  const auto kinds = gamma_sweep ? std::vector<SamplerKind>{SamplerKind::kDns} : parse_sampler_list(sampler_names);
  bool need_dist = false, need_lmk = false;
  for (const auto k : kinds) {
    need_dist |= needs_distance_index(k);
    need_lmk |= needs_landmark_index(k);
  }
  const Artifacts data = load_artifacts({opts.data}, need_dist, need_lmk, true);
  std::optional<SplitMask> mask;
  if (!mask_path.empty()) mask = load_mask(mask_path, data.graph);

  auto csv = open_report(report);
  csv << (gamma_sweep ? "gamma" : "window");
  for (const auto k : kinds) csv << ',' << sampler_name(k) << "_mean," << sampler_name(k) << "_std";
  const bool has_gap = !gamma_sweep && std::find(kinds.begin(), kinds.end(), SamplerKind::kUns) != kinds.end() &&
                       std::find(kinds.begin(), kinds.end(), SamplerKind::kDns) != kinds.end();
  if (has_gap) csv << ",dns_minus_uns";
  csv << ",status\n";

  const std::size_t points = gamma_sweep ? gammas.size() : windows.size();
  for (std::size_t pt = 0; pt < points; ++pt) {
    std::ostringstream row;
    row << std::setprecision(10);
    if (gamma_sweep) {
      row << gammas[pt];
    } else {
      row << windows[pt];
    }
    std::string status = "ok";
    std::vector<double> means;
    // Partial failures are recorded and the sweep moves on.
    try {
      for (const auto k : kinds) {
        ModelSpec spec = base;
        spec.sampler.kind = k;
        if (gamma_sweep) spec.sampler.gamma = gammas[pt];
        if (!gamma_sweep) spec.walk.window = windows[pt];
        std::vector<double> f1;
        for (std::size_t r = 0; r < runs; ++r) {
          spec.train.seed = base.train.seed + r;
          spec.walk.seed = spec.train.seed;
          const TrainResult res = train_model(data, spec);
          f1.push_back(score_embeddings(res.embeddings, *data.labels, mask, base.train.seed));
        }
        const MeanStd ms = mean_std(f1);
        means.push_back(ms.mean);
        row << ',' << ms.mean << ',' << ms.std;
      }
    } catch (const Error& e) {
      status = std::string("error: ") + e.what();
      for (std::size_t k = means.size(); k < kinds.size(); ++k) row << ",,";
    }
    if (has_gap) {
      if (means.size() == kinds.size()) {
        const auto at = [&](SamplerKind k) {
          return means[static_cast<std::size_t>(std::find(kinds.begin(), kinds.end(), k) - kinds.begin())];
        };
        row << ',' << at(SamplerKind::kDns) - at(SamplerKind::kUns);
      } else {
        row << ',';
      }
    }
    // Commas would split the status column.
    std::replace(status.begin(), status.end(), ',', ';');
    row << ',' << status;
    csv << row.str() << '\n';
    csv.flush();
    out << row.str() << '\n';
  }
  return kExitOk;
}

}  // namespace

Artifacts load_artifacts(const DataLayout& layout, bool need_distances, bool need_landmarks, bool need_labels) {
  require_file(layout.graph(), "run 'grl preprocess --out-dir " + layout.dir.string() + "' first");
  Artifacts a;
  a.graph = read_graph_cache(layout.graph());
  if (need_distances) {
    require_file(layout.distances(), "this sampler needs the distance cache; rerun preprocess without --skip-distances");
    auto dist = std::make_shared<DistanceIndex>(read_distance_cache(layout.distances()));
    if (dist->num_nodes() != a.graph.num_nodes()) throw DataError("distance cache does not match the graph cache");
    a.dist = std::move(dist);
  }
  if (need_landmarks) {
    require_file(layout.landmarks(), "this sampler needs the landmark cache; rerun preprocess with --popular-fraction");
    auto lmk = std::make_shared<LandmarkIndex>(read_landmark_cache(layout.landmarks()));
    if (lmk->num_nodes() != a.graph.num_nodes()) throw DataError("landmark cache does not match the graph cache");
    a.landmarks = std::move(lmk);
  }
  if (need_labels) {
    require_file(layout.labels(), "preprocess with --labels to evaluate");
    a.labels = load_labels(layout.labels(), a.graph);
  }
  return a;
}

TrainResult train_model(const Artifacts& data, const ModelSpec& spec) {
  spec.walk.validate();
  spec.train.validate();
  const unsigned workers = std::max(1u, spec.train.workers);
  const WalkSet walks = generate_walks(spec.model, data.graph, spec.walk, workers);
  const PositiveCorpus corpus = context_pairs(walks, spec.walk.window);
  const auto sampler = make_sampler(spec.sampler, data.graph, data.dist, data.landmarks);
  return train(data.graph, corpus, *sampler, spec.train);
}

double score_embeddings(const EmbeddingMatrix& z, const Labels& labels, const std::optional<SplitMask>& mask,
                        std::uint64_t split_seed, const ClassifierConfig& cfg) {
  const SplitMask m = mask ? *mask : default_split(labels, split_seed);
  return evaluate_f1(z, labels, m, m.test, cfg);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Skip-gram graph embeddings with pluggable negative samplers"};
  app.require_subcommand(1);
  auto config_format = std::make_shared<SubcommandConfig>();
  app.config_formatter(config_format);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "key=value file of option defaults (may also follow the subcommand)");

  std::string edges, labels_path, out_dir;
  double popular_fraction = 0.0;
  bool skip_distances = false;
  auto* pre = app.add_subcommand("preprocess", "Extract the largest component and build distance caches");
  pre->add_option("--config", "key=value file of option defaults");
  pre->add_option("--edges", edges, "Edge list file")->required();
  pre->add_option("--labels", labels_path, "Label file (node label [label...])");
  pre->add_option("--out-dir", out_dir, "Output directory")->required();
  pre->add_option("--popular-fraction", popular_fraction, "Also build a landmark index over this fraction of nodes");
  pre->add_flag("--skip-distances", skip_distances, "Do not build the all-pairs distance cache");

  std::string preset, out_edges, out_labels;
  std::size_t synth_nodes = 0, synth_classes = 0;
  double synth_exponent = 0.0;
  std::uint64_t synth_seed = 1;
  auto* syn = app.add_subcommand("synth", "Generate a power-law graph with propagated labels");
  syn->add_option("--config", "key=value file of option defaults");
  syn->add_option("--preset", preset, "sparse, moderate or dense");
  syn->add_option("--nodes", synth_nodes, "Node count (presets use 2000)");
  syn->add_option("--exponent", synth_exponent, "Power-law exponent");
  syn->add_option("--classes", synth_classes, "Number of label seeds");
  syn->add_option("--seed", synth_seed)->capture_default_str();
  syn->add_option("--out-edges", out_edges)->required();
  syn->add_option("--out-labels", out_labels);

  TrainOptions train_opts;
  std::string out_prefix;
  bool no_tsv = false;
  auto* tr = app.add_subcommand("train", "Train embeddings");
  tr->add_option("--config", "key=value file of option defaults");
  train_opts.add(tr, true);
  tr->add_option("--out", out_prefix, "Output prefix for .grle, .tsv and .loss.csv")->required();
  tr->add_flag("--no-tsv", no_tsv, "Skip the text export");

  std::string eval_data, mask_path, eval_report;
  std::vector<std::string> embedding_files;
  std::size_t eval_runs = 5;
  std::uint64_t eval_seed = 1;
  double eval_c = 1.0;
  auto* ev = app.add_subcommand("eval", "Node classification F1-macro");
  ev->add_option("--config", "key=value file of option defaults");
  ev->add_option("--data", eval_data, "Directory written by preprocess")->required();
  ev->add_option("--embeddings", embedding_files, "Embedding file (.grle); repeat for several training runs")
      ->required();
  ev->add_option("--masks", mask_path, "Split file: train, val, test lines of node ids");
  ev->add_option("--runs", eval_runs, "Random splits per embedding when no mask is given")->capture_default_str();
  ev->add_option("--seed", eval_seed, "Seed of the first random split")->capture_default_str();
  ev->add_option("--c", eval_c, "Inverse L2 regularization strength")->capture_default_str();
  ev->add_option("--report", eval_report, "CSV of per-run scores");

  std::string an_data, an_embeddings, report_dir = "reports";
  std::vector<std::string> an_samplers{"uns", "dns"};
  std::size_t an_window = 4, an_negatives = 20, pi_samples = 200000;
  std::uint64_t an_seed = 1;
  auto* an = app.add_subcommand("analyze", "Similarity curve, pi_d, beta_d and separation power tables");
  an->add_option("--config", "key=value file of option defaults");
  an->add_option("--data", an_data, "Directory written by preprocess")->required();
  an->add_option("--embeddings", an_embeddings, "Embedding file for the similarity curve");
  an->add_option("--report-dir", report_dir)->capture_default_str();
  an->add_option("--samplers", an_samplers)->delimiter(',')->capture_default_str();
  an->add_option("--window", an_window)->capture_default_str();
  an->add_option("--negatives", an_negatives)->capture_default_str();
  an->add_option("--pi-samples", pi_samples, "Walk pairs sampled for pi_d")->capture_default_str();
  an->add_option("--seed", an_seed)->capture_default_str();

  TrainOptions sweep_opts;
  std::vector<std::size_t> windows;
  std::vector<double> gammas;
  std::vector<std::string> sweep_samplers{"uns", "dns"};
  std::string sweep_mask, sweep_report;
  std::size_t sweep_runs = 5;
  auto* sw = app.add_subcommand("sweep", "Train and evaluate over a grid of windows or gamma values");
  sw->add_option("--config", "key=value file of option defaults");
  sweep_opts.add(sw, false);
  sw->add_option("--windows", windows)->delimiter(',');
  sw->add_option("--gammas", gammas)->delimiter(',');
  sw->add_option("--samplers", sweep_samplers, "Samplers compared in a window sweep")
      ->delimiter(',')
      ->capture_default_str();
  sw->add_option("--masks", sweep_mask);
  sw->add_option("--runs", sweep_runs, "Training seeds per grid point")->capture_default_str();
  sw->add_option("--report", sweep_report, "Output CSV")->required();

  try {
    auto args = hoist_config(argc, argv, app, config_format->subcommand);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (pre->parsed()) return cmd_preprocess(edges, labels_path, out_dir, popular_fraction, skip_distances, out);
    if (syn->parsed()) {
      return cmd_synth(preset, synth_nodes, synth_exponent, synth_classes, synth_seed, out_edges, out_labels, out);
    }
    if (tr->parsed()) return cmd_train(train_opts, out_prefix, !no_tsv, out);
    if (ev->parsed()) {
      return cmd_eval(eval_data, embedding_files, mask_path, eval_runs, eval_seed, eval_c, eval_report, out);
    }
    if (an->parsed()) {
      return cmd_analyze(an_data, an_embeddings, report_dir, an_samplers, an_window, an_negatives, pi_samples,
                         an_seed, out);
    }
    if (sw->parsed()) {
      return cmd_sweep(sweep_opts, windows, gammas, sweep_samplers, sweep_mask, sweep_runs, sweep_report, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace grl
