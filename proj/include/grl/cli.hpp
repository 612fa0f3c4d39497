#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "grl/distances.hpp"
#include "grl/eval.hpp"
#include "grl/graph.hpp"
#include "grl/samplers.hpp"
#include "grl/trainer.hpp"
#include "grl/walks.hpp"

namespace grl {

/// Exit codes of the command line tool.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitData = 3, kExitNumeric = 4 };

/// File names inside a preprocess output directory.
struct DataLayout {
  std::filesystem::path dir;

  std::filesystem::path graph() const { return dir / "graph.grlg"; }
  std::filesystem::path edges() const { return dir / "edges.txt"; }
  std::filesystem::path labels() const { return dir / "labels.txt"; }
  std::filesystem::path distances() const { return dir / "distances.grld"; }
  std::filesystem::path landmarks() const { return dir / "landmarks.grll"; }
  std::filesystem::path stats() const { return dir / "stats.txt"; }
};

struct Artifacts {
  Graph graph;
  std::shared_ptr<const DistanceIndex> dist;
  std::shared_ptr<const LandmarkIndex> landmarks;
  std::optional<Labels> labels;
};

/// Loads what a preprocess run left in `dir`; the distance and landmark
/// caches are read only when requested (and must then exist).
Artifacts load_artifacts(const DataLayout& layout, bool need_distances, bool need_landmarks, bool need_labels);

struct ModelSpec {
  WalkModel model = WalkModel::kDeepWalk;
  WalkConfig walk;
  TrainConfig train;
  SamplerSpec sampler{SamplerKind::kDns, 1.0};
};

/// Walks, positive corpus, sampler, training.
TrainResult train_model(const Artifacts& data, const ModelSpec& spec);

/// Test F1 of one embedding: on `mask` when given, otherwise on the default
/// 10/40/40 split drawn with `split_seed`.
double score_embeddings(const EmbeddingMatrix& z, const Labels& labels, const std::optional<SplitMask>& mask,
                        std::uint64_t split_seed, const ClassifierConfig& cfg = {});

/// Runs the command line tool; argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace grl
