#include <string>

#include "grl/eval.hpp"
#include "grl/rng.hpp"

namespace grl {

namespace {
constexpr std::uint64_t kOutlierDomain = 0x4F55544CULL;  // "OUTL"
}

OutlierResult inject_outliers(const Graph& g, const Labels& labels, std::size_t count, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  if (labels.classes.size() != n) throw UsageError("labels do not match the graph");
  if (labels.multi_label()) throw UsageError("outlier injection needs single-label data");
  OutlierResult out;
  if (count == 0) {
    out.graph = g;
    out.labels = labels;
    return out;
  }
  if (n == 0) throw UsageError("cannot attach outliers to an empty graph");
  const std::vector<int> cls = labels.primary();

  std::vector<Edge> edges = g.edge_list();
  std::vector<std::string> ids = g.original_ids();
  out.labels = labels;
  CounterRng rng(seed ^ kOutlierDomain, 0);
  for (std::size_t t = 0; t < count; ++t) {
    const auto anchor = static_cast<NodeId>(rng.below(n));
    // Nearest member of every class, by hops from the anchor in the original graph.
    const auto hops = bfs_distances(g, anchor);
    std::vector<unsigned> nearest(labels.num_classes(), kUnreachable);
    for (NodeId v = 0; v < n; ++v) {
      if (cls[v] >= 0 && hops[v] < nearest[static_cast<std::size_t>(cls[v])]) {
        nearest[static_cast<std::size_t>(cls[v])] = hops[v];
      }
    }
    int pick = -1;
    for (std::size_t c = 0; c < nearest.size(); ++c) {
      if (nearest[c] == kUnreachable) continue;
      if (pick < 0 || nearest[c] > nearest[static_cast<std::size_t>(pick)]) pick = static_cast<int>(c);
    }
    const auto node = static_cast<NodeId>(n + t);
    edges.emplace_back(anchor, node);
    std::string id = "outlier_" + std::to_string(t);
    while (g.find(id)) id += "_";
    ids.push_back(std::move(id));
    out.labels.classes.push_back(pick >= 0 ? std::vector<int>{pick} : std::vector<int>{});
    out.attached_to.push_back(anchor);
  }
  out.graph = Graph::from_edges(n + count, edges, std::move(ids));
  return out;
}

}  // namespace grl
