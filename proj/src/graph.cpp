#include "tasgnn/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "tasgnn/error.hpp"

namespace tasgnn {
namespace {

struct PairHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& p) const noexcept {
    return std::hash<std::int64_t>{}(p.first) * 1000003u ^ std::hash<std::int64_t>{}(p.second);
  }
};

template <typename T>
bool parse_number(std::string_view field, T& value) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
  if (field.empty()) return false;
  const char* first = field.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), value);
  return ec == std::errc() && ptr == field.data() + field.size();
}

struct RawRow {
  std::int64_t source;
  std::int64_t target;
  int rating;
  std::int64_t timestamp;
};

}  // namespace

SignedGraph SignedGraph::from_edges(std::size_t num_nodes, std::vector<EdgeRecord> edges,
                                    std::vector<std::int64_t> external_ids) {
  SignedGraph g;
  g.num_nodes_ = num_nodes;
  if (external_ids.empty()) {
    external_ids.resize(num_nodes);
    for (std::size_t i = 0; i < num_nodes; ++i) external_ids[i] = static_cast<std::int64_t>(i);
  }
  if (external_ids.size() != num_nodes)
    fail(ErrorCategory::kValidation, "external id table does not match node count");

  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& rec = edges[e];
    if (rec.source >= num_nodes || rec.target >= num_nodes)
      fail(ErrorCategory::kValidation, "edge " + std::to_string(e) + " references a node >= N");
    if (rec.source == rec.target)
      fail(ErrorCategory::kValidation, "edge " + std::to_string(e) + " is a self loop");
    if (rec.raw_rating == 0 || rec.raw_rating < -10 || rec.raw_rating > 10)
      fail(ErrorCategory::kValidation,
           "edge " + std::to_string(e) + " has rating " + std::to_string(rec.raw_rating));
    if (rec.raw_rating > 0) ++g.num_positive_;
  }
  g.edges_ = std::move(edges);
  g.external_ids_ = std::move(external_ids);

  auto build = [&](Sign sign, Direction direction, Adjacency& adj) {
    adj.offsets.assign(num_nodes + 1, 0);
    for (const auto& rec : g.edges_) {
      if (rec.sign() != sign) continue;
      const NodeId key = direction == Direction::kIn ? rec.target : rec.source;
      ++adj.offsets[key + 1];
    }
    for (std::size_t i = 0; i < num_nodes; ++i) adj.offsets[i + 1] += adj.offsets[i];
    adj.entries.resize(adj.offsets[num_nodes]);
    std::vector<std::size_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
    for (std::size_t e = 0; e < g.edges_.size(); ++e) {
      const auto& rec = g.edges_[e];
      if (rec.sign() != sign) continue;
      const NodeId key = direction == Direction::kIn ? rec.target : rec.source;
      const NodeId other = direction == Direction::kIn ? rec.source : rec.target;
      adj.entries[cursor[key]++] = Neighbor{other, rec.weight(), e};
    }
    for (std::size_t i = 0; i < num_nodes; ++i) {
      auto begin = adj.entries.begin() + static_cast<std::ptrdiff_t>(adj.offsets[i]);
      auto end = adj.entries.begin() + static_cast<std::ptrdiff_t>(adj.offsets[i + 1]);
      std::sort(begin, end, [](const Neighbor& a, const Neighbor& b) {
        return a.node != b.node ? a.node < b.node : a.edge < b.edge;
      });
    }
  };
  build(Sign::kPositive, Direction::kIn, g.pos_in_);
  build(Sign::kPositive, Direction::kOut, g.pos_out_);
  build(Sign::kNegative, Direction::kIn, g.neg_in_);
  build(Sign::kNegative, Direction::kOut, g.neg_out_);

  std::vector<std::size_t> seen(num_nodes, 0);
  for (std::size_t v = 0; v < num_nodes; ++v)
    for (const Adjacency* adj : {&g.pos_out_, &g.neg_out_})
      for (std::size_t i = adj->offsets[v]; i < adj->offsets[v + 1]; ++i) {
        const NodeId t = adj->entries[i].node;
        if (seen[t] == v + 1)
          fail(ErrorCategory::kValidation, "duplicate edge (" + std::to_string(v) + ", " +
                                               std::to_string(t) + ")");
        seen[t] = v + 1;
      }
  return g;
}

const SignedGraph::Adjacency& SignedGraph::adjacency(Sign sign, Direction direction) const {
  if (sign == Sign::kPositive) return direction == Direction::kIn ? pos_in_ : pos_out_;
  return direction == Direction::kIn ? neg_in_ : neg_out_;
}

std::span<const Neighbor> SignedGraph::neighbors(NodeId node, Sign sign,
                                                 Direction direction) const {
  if (node >= num_nodes_)
    fail(ErrorCategory::kIndex, "node " + std::to_string(node) + " out of range (N=" +
                                    std::to_string(num_nodes_) + ")");
  const auto& adj = adjacency(sign, direction);
  return {adj.entries.data() + adj.offsets[node], adj.offsets[node + 1] - adj.offsets[node]};
}

SignedGraph parse_edge_list(std::istream& in, const IngestConfig& config, IngestAudit* audit) {
  IngestAudit local;
  std::vector<RawRow> rows;
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::size_t, PairHash> first_seen;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line_no == 1 && line.front() == '\xEF') line.erase(0, 3);  // UTF-8 BOM

    std::string_view view(line);
    std::string_view fields[4];
    std::size_t count = 0;
    while (count < 4) {
      const auto comma = view.find(',');
      fields[count++] = view.substr(0, comma);
      if (comma == std::string_view::npos) {
        view = {};
        break;
      }
      view.remove_prefix(comma + 1);
    }
    const bool extra = !view.empty() || (count == 4 && line.back() == ',');

    RawRow row{};
    double time = 0.0;
    const bool ok = count == 4 && !extra && parse_number(fields[0], row.source) &&
                    parse_number(fields[1], row.target) && parse_number(fields[2], row.rating) &&
                    parse_number(fields[3], time) && std::isfinite(time);
    if (!ok) {
      if (config.allow_header && rows.empty() && local.rows_read == 0) continue;
      fail(ErrorCategory::kParse,
           "line " + std::to_string(line_no) + ": expected SOURCE,TARGET,RATING,TIME");
    }
    row.timestamp = static_cast<std::int64_t>(std::floor(time));
    ++local.rows_read;
    if (row.rating == 0 || row.rating < -10 || row.rating > 10)
      fail(ErrorCategory::kValidation, "line " + std::to_string(line_no) + ": rating " +
                                           std::to_string(row.rating) +
                                           " outside [-10,10] or zero");
    if (row.source == row.target) {
      ++local.self_loops_dropped;
      continue;
    }
    const auto key = std::make_pair(row.source, row.target);
    auto [it, inserted] = first_seen.try_emplace(key, rows.size());
    if (inserted) {
      rows.push_back(row);
    } else {
      ++local.duplicates_collapsed;
      auto& kept = rows[it->second];
      if (row.timestamp >= kept.timestamp) kept = row;
    }
  }
  if (rows.empty()) fail(ErrorCategory::kEmptyGraph, "edge list contains no usable rows");

  std::unordered_map<std::int64_t, NodeId> dense;
  std::vector<std::int64_t> external;
  auto remap = [&](std::int64_t id) {
    auto [it, inserted] = dense.try_emplace(id, static_cast<NodeId>(external.size()));
    if (inserted) external.push_back(id);
    return it->second;
  };
  std::vector<EdgeRecord> edges;
  edges.reserve(rows.size());
  for (const auto& row : rows) {
    const NodeId s = remap(row.source);
    const NodeId t = remap(row.target);
    edges.push_back(EdgeRecord{s, t, row.rating, row.timestamp});
  }
  if (audit) *audit = local;
  const std::size_t n = external.size();
  return SignedGraph::from_edges(n, std::move(edges), std::move(external));
}

SignedGraph load_edge_list(const std::filesystem::path& path, const IngestConfig& config,
                           IngestAudit* audit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::kIo, "cannot open edge list " + path.string());
  return parse_edge_list(in, config, audit);
}

void write_edge_list(std::ostream& out, const SignedGraph& graph) {
  const auto& ids = graph.external_ids();
  for (const auto& e : graph.edges())
    out << ids[e.source] << ',' << ids[e.target] << ',' << e.raw_rating << ',' << e.timestamp
        << '\n';
}

void save_edge_list(const std::filesystem::path& path, const SignedGraph& graph) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::kIo, "cannot write " + path.string());
  write_edge_list(out, graph);
}

SignedGraph positive_subgraph(const SignedGraph& graph) {
  std::vector<EdgeRecord> kept;
  for (const auto& e : graph.edges())
    if (e.raw_rating > 0) kept.push_back(e);
  return SignedGraph::from_edges(graph.num_nodes(), std::move(kept), graph.external_ids());
}

std::vector<Neighbor> neighbors_signed(const SignedGraph& graph, NodeId node, Sign sign,
                                       Direction direction) {
  const auto span = graph.neighbors(node, sign, direction);
  return {span.begin(), span.end()};
}

GraphAudit audit_graph(const SignedGraph& graph, const IngestAudit& ingest) {
  GraphAudit a;
  a.num_nodes = graph.num_nodes();
  a.num_edges = graph.num_edges();
  a.num_positive = graph.num_positive();
  a.num_negative = graph.num_negative();
  const double n = static_cast<double>(a.num_nodes);
  a.density = n > 1 ? static_cast<double>(a.num_edges) / (n * (n - 1)) : 0.0;
  a.ingest = ingest;
  return a;
}

std::string format_audit(const GraphAudit& a) {
  std::ostringstream os;
  os << "nodes            " << a.num_nodes << '\n'
     << "rows read        " << a.ingest.rows_read << '\n'
     << "self loops       " << a.ingest.self_loops_dropped << " dropped\n"
     << "duplicates       " << a.ingest.duplicates_collapsed << " collapsed\n"
     << "edges            " << a.num_edges << '\n'
     << "positive edges   " << a.num_positive << '\n'
     << "negative edges   " << a.num_negative << '\n'
     << "density          " << a.density * 100.0 << "%\n";
  return os.str();
}

}  // namespace tasgnn
