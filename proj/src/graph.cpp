#include "grl/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

#include "grl/binary_io.hpp"
#include "grl/distances.hpp"

namespace grl {

namespace {

constexpr std::uint32_t kGraphCacheVersion = 1;
const binio::Magic kGraphMagic = binio::make_magic("GRLG");

std::optional<long long> parse_integer(const std::string& s) {
  long long v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::vector<std::string> default_ids(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return ids;
}

}  // namespace

bool original_id_less(const std::string& a, const std::string& b) {
  const auto ia = parse_integer(a);
  const auto ib = parse_integer(b);
  if (ia && ib) return *ia < *ib;
  if (ia != ib && (ia || ib)) return ia.has_value();  // integers sort before names
  return a < b;
}

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges,
                        std::vector<std::string> original_ids) {
  if (n > std::numeric_limits<NodeId>::max()) throw DataError("graph too large for 32-bit node ids");
  std::vector<std::uint64_t> degree(n + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) throw DataError("edge endpoint out of range");
    if (u == v) continue;
    ++degree[u + 1];
    ++degree[v + 1];
  }
  std::partial_sum(degree.begin(), degree.end(), degree.begin());
  std::vector<NodeId> adjacency(degree.back());
  std::vector<std::uint64_t> cursor(degree.begin(), degree.end() - 1);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    adjacency[cursor[u]++] = v;
    adjacency[cursor[v]++] = u;
  }
  // Sort and deduplicate each row, compacting in place.
  std::vector<std::uint64_t> offsets(n + 1, 0);
  std::uint64_t out = 0;
  for (std::size_t v = 0; v < n; ++v) {
    auto first = adjacency.begin() + static_cast<std::ptrdiff_t>(degree[v]);
    auto last = adjacency.begin() + static_cast<std::ptrdiff_t>(degree[v + 1]);
    std::sort(first, last);
    last = std::unique(first, last);
    for (auto it = first; it != last; ++it) adjacency[out++] = *it;
    offsets[v + 1] = out;
  }
  adjacency.resize(out);
  adjacency.shrink_to_fit();

  Graph g;
  g.offsets_ = std::move(offsets);
  g.adjacency_ = std::move(adjacency);
  g.original_ids_ = original_ids.empty() ? default_ids(n) : std::move(original_ids);
  if (g.original_ids_.size() != n) throw DataError("original id table size mismatch");
  g.index_ids();
  return g;
}

Graph Graph::from_csr(std::vector<std::uint64_t> offsets, std::vector<NodeId> adjacency,
                      std::vector<std::string> original_ids) {
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != adjacency.size()) {
    throw DataError("inconsistent CSR offsets");
  }
  const std::size_t n = offsets.size() - 1;
  Graph g;
  g.offsets_ = std::move(offsets);
  g.adjacency_ = std::move(adjacency);
  for (std::size_t v = 0; v < n; ++v) {
    if (g.offsets_[v] > g.offsets_[v + 1]) throw DataError("CSR offsets not monotone");
    const auto row = g.neighbors(static_cast<NodeId>(v));
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] >= n || row[k] == v || (k > 0 && row[k - 1] >= row[k])) {
        throw DataError("CSR row " + std::to_string(v) + " is not a sorted simple neighbor list");
      }
      if (!g.has_edge(row[k], static_cast<NodeId>(v))) throw DataError("CSR adjacency is not symmetric");
    }
  }
  g.original_ids_ = original_ids.empty() ? default_ids(n) : std::move(original_ids);
  if (g.original_ids_.size() != n) throw DataError("original id table size mismatch");
  g.index_ids();
  return g;
}

void Graph::index_ids() {
  id_lookup_.clear();
  id_lookup_.reserve(original_ids_.size());
  for (std::size_t v = 0; v < original_ids_.size(); ++v) {
    if (!id_lookup_.emplace(original_ids_[v], static_cast<NodeId>(v)).second) {
      throw DataError("duplicate original node id '" + original_ids_[v] + "'");
    }
  }
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

std::optional<NodeId> Graph::find(const std::string& original_id) const {
  auto it = id_lookup_.find(original_id);
  if (it == id_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> edges;
  edges.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) edges.emplace_back(u, v);
    }
  }
  return edges;
}

Graph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list " + path.string());
  std::vector<std::pair<std::string, std::string>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string u, v;
    if (!(fields >> u >> v)) throw ParseError(path.string(), line_no, "expected two node ids");
    raw.emplace_back(std::move(u), std::move(v));
  }
  if (raw.empty()) throw DataError(path.string() + ": empty graph (no edges)");

  std::vector<std::string> ids;
  ids.reserve(2 * raw.size());
  for (const auto& [u, v] : raw) {
    ids.push_back(u);
    ids.push_back(v);
  }
  std::sort(ids.begin(), ids.end(), original_id_less);
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::unordered_map<std::string, NodeId> dense;
  dense.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) dense.emplace(ids[i], static_cast<NodeId>(i));

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [u, v] : raw) edges.emplace_back(dense.at(u), dense.at(v));
  const std::size_t n = ids.size();
  Graph g = Graph::from_edges(n, edges, std::move(ids));
  if (g.num_edges() == 0) throw DataError(path.string() + ": empty graph (only self-loops)");
  return g;
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [u, v] : g.edge_list()) out << g.original_id(u) << ' ' << g.original_id(v) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

Components connected_components(const Graph& g) {
  const std::size_t n = g.num_nodes();
  Components c;
  c.component_of.assign(n, std::numeric_limits<NodeId>::max());
  std::vector<NodeId> queue;
  queue.reserve(n);
  for (NodeId s = 0; s < n; ++s) {
    if (c.component_of[s] != std::numeric_limits<NodeId>::max()) continue;
    const auto id = static_cast<NodeId>(c.sizes.size());
    queue.clear();
    queue.push_back(s);
    c.component_of[s] = id;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (NodeId w : g.neighbors(queue[head])) {
        if (c.component_of[w] == std::numeric_limits<NodeId>::max()) {
          c.component_of[w] = id;
          queue.push_back(w);
        }
      }
    }
    c.sizes.push_back(queue.size());
  }
  return c;
}

Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<NodeId> remap(g.num_nodes(), std::numeric_limits<NodeId>::max());
  std::vector<std::string> ids;
  ids.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    remap[nodes[i]] = static_cast<NodeId>(i);
    ids.push_back(g.original_id(nodes[i]));
  }
  std::vector<Edge> edges;
  for (NodeId u : nodes) {
    for (NodeId v : g.neighbors(u)) {
      if (u < v && remap[v] != std::numeric_limits<NodeId>::max()) edges.emplace_back(remap[u], remap[v]);
    }
  }
  return Graph::from_edges(nodes.size(), edges, std::move(ids));
}

Graph largest_connected_component(const Graph& g) {
  if (g.num_nodes() == 0) throw DataError("largest_connected_component: empty graph");
  const Components c = connected_components(g);
  if (c.count() == 1) return g;
  // Ties go to the component holding the smallest original id.
  std::vector<NodeId> min_member(c.count(), std::numeric_limits<NodeId>::max());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    NodeId& m = min_member[c.component_of[v]];
    if (m == std::numeric_limits<NodeId>::max() || original_id_less(g.original_id(v), g.original_id(m))) m = v;
  }
  NodeId best = 0;
  for (NodeId k = 1; k < c.count(); ++k) {
    if (c.sizes[k] > c.sizes[best] ||
        (c.sizes[k] == c.sizes[best] && original_id_less(g.original_id(min_member[k]), g.original_id(min_member[best])))) {
      best = k;
    }
  }
  std::vector<NodeId> members;
  members.reserve(c.sizes[best]);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (c.component_of[v] == best) members.push_back(v);
  }
  return induced_subgraph(g, members);
}

bool Labels::multi_label() const {
  return std::any_of(classes.begin(), classes.end(), [](const auto& c) { return c.size() > 1; });
}

std::vector<int> Labels::primary() const {
  if (multi_label()) throw DataError("single-label view requested for multi-label data");
  std::vector<int> out(classes.size(), -1);
  for (std::size_t v = 0; v < classes.size(); ++v) {
    if (!classes[v].empty()) out[v] = classes[v].front();
  }
  return out;
}

Labels load_labels(const std::filesystem::path& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label file " + path.string());
  std::vector<std::pair<NodeId, std::vector<std::string>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string node, label;
    fields >> node;
    std::vector<std::string> names;
    while (fields >> label) names.push_back(label);
    if (names.empty()) throw ParseError(path.string(), line_no, "expected 'node label [label...]'");
    if (auto v = g.find(node)) rows.emplace_back(*v, std::move(names));
  }
  std::vector<std::string> names;
  for (const auto& row : rows) names.insert(names.end(), row.second.begin(), row.second.end());
  std::sort(names.begin(), names.end(), original_id_less);
  names.erase(std::unique(names.begin(), names.end()), names.end());

  Labels labels;
  labels.classes.resize(g.num_nodes());
  for (auto& [v, row] : rows) {
    auto& cls = labels.classes[v];
    for (const auto& name : row) {
      const auto id = static_cast<int>(
          std::lower_bound(names.begin(), names.end(), name, original_id_less) - names.begin());
      if (std::find(cls.begin(), cls.end(), id) == cls.end()) cls.push_back(id);
    }
    std::sort(cls.begin(), cls.end());
  }
  labels.class_names = std::move(names);
  return labels;
}

void write_labels(const std::filesystem::path& path, const Graph& g, const Labels& labels) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (labels.classes[v].empty()) continue;
    out << g.original_id(v);
    for (int c : labels.classes[v]) out << ' ' << labels.class_names[static_cast<std::size_t>(c)];
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

Labels labels_from_classes(std::span<const int> classes) {
  Labels labels;
  labels.classes.resize(classes.size());
  int max_class = -1;
  for (std::size_t v = 0; v < classes.size(); ++v) {
    if (classes[v] >= 0) {
      labels.classes[v] = {classes[v]};
      max_class = std::max(max_class, classes[v]);
    }
  }
  for (int c = 0; c <= max_class; ++c) labels.class_names.push_back(std::to_string(c));
  return labels;
}

std::string StatsReport::to_string() const {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << "n=" << n << " m=" << m << " directed_edges=" << directed_edges()
    << " avg_degree=" << average_degree << " classes=" << num_classes;
  if (d_max) s << " d_max=" << *d_max;
  return s.str();
}

StatsReport graph_stats(const Graph& g, const DistanceIndex* dist, const Labels* labels) {
  StatsReport r;
  r.n = g.num_nodes();
  r.m = g.num_edges();
  r.average_degree = r.n == 0 ? 0.0 : 2.0 * static_cast<double>(r.m) / static_cast<double>(r.n);
  if (labels != nullptr) r.num_classes = labels->num_classes();
  if (dist != nullptr) r.d_max = dist->d_max();
  return r;
}

std::filesystem::path id_table_path(const std::filesystem::path& graph_cache) {
  auto p = graph_cache;
  p += ".ids";
  return p;
}

void write_graph_cache(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  binio::write_magic(out, kGraphMagic);
  binio::write<std::uint32_t>(out, kGraphCacheVersion);
  binio::write<std::uint64_t>(out, g.num_nodes());
  binio::write<std::uint64_t>(out, g.num_edges());
  binio::write_array<std::uint64_t>(out, g.offsets());
  binio::write_array<NodeId>(out, g.adjacency());
  if (!out) throw DataError("write failed: " + path.string());

  std::ofstream ids(id_table_path(path));
  for (const auto& id : g.original_ids()) ids << id << '\n';
  if (!ids) throw DataError("write failed: " + id_table_path(path).string());
}

Graph read_graph_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open graph cache " + path.string());
  binio::expect_magic(in, kGraphMagic, path.string());
  const auto version = binio::read<std::uint32_t>(in, "version");
  if (version != kGraphCacheVersion) throw DataError(path.string() + ": unsupported GRLG version");
  const auto n = binio::read<std::uint64_t>(in, "n");
  const auto m = binio::read<std::uint64_t>(in, "m");
  auto offsets = binio::read_array<std::uint64_t>(in, n + 1, "offsets");
  auto adjacency = binio::read_array<NodeId>(in, 2 * m, "neighbors");

  std::vector<std::string> ids;
  std::ifstream id_file(id_table_path(path));
  if (id_file) {
    std::string line;
    while (std::getline(id_file, line)) ids.push_back(line);
  }
  return Graph::from_csr(std::move(offsets), std::move(adjacency), std::move(ids));
}

}  // namespace grl
