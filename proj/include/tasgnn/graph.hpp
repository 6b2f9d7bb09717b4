#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tasgnn {

using NodeId = std::uint32_t;

enum class Sign { kPositive, kNegative };
enum class Direction { kIn, kOut };

struct EdgeRecord {
  NodeId source = 0;
  NodeId target = 0;
  int raw_rating = 0;
  std::int64_t timestamp = 0;

  // Ratings live on [-10, 10]; the model and the labeler work on rating / 10.
  double weight() const noexcept { return static_cast<double>(raw_rating) / 10.0; }
  Sign sign() const noexcept { return raw_rating > 0 ? Sign::kPositive : Sign::kNegative; }

  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

struct Neighbor {
  NodeId node = 0;
  double weight = 0.0;
  std::size_t edge = 0;  // index into SignedGraph::edges()

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct IngestConfig {
  // Skip a leading non-numeric line. SNAP files have no header.
  bool allow_header = false;
};

struct IngestAudit {
  std::size_t rows_read = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_collapsed = 0;
};

// Immutable signed directed graph. Node ids are dense 0..N-1; the ids found
// in the source file are kept in external_ids() for export.
class SignedGraph {
 public:
  SignedGraph() = default;

  // Validates every edge and builds the four sign/direction adjacency indices.
  // Edges must already be free of self loops and duplicate (source, target)
  // pairs. external_ids may be empty, in which case ids map to themselves.
  static SignedGraph from_edges(std::size_t num_nodes, std::vector<EdgeRecord> edges,
                                std::vector<std::int64_t> external_ids = {});

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::size_t num_positive() const noexcept { return num_positive_; }
  std::size_t num_negative() const noexcept { return edges_.size() - num_positive_; }

  const std::vector<EdgeRecord>& edges() const noexcept { return edges_; }
  const EdgeRecord& edge(std::size_t e) const { return edges_[e]; }
  double weight(std::size_t e) const { return edges_[e].weight(); }

  const std::vector<std::int64_t>& external_ids() const noexcept { return external_ids_; }

  // Ordered by ascending neighbor id, then edge index. Throws kIndex when
  // node >= num_nodes().
  std::span<const Neighbor> neighbors(NodeId node, Sign sign, Direction direction) const;

  std::size_t degree(NodeId node, Sign sign, Direction direction) const {
    return neighbors(node, sign, direction).size();
  }

  friend bool operator==(const SignedGraph& a, const SignedGraph& b) {
    return a.num_nodes_ == b.num_nodes_ && a.edges_ == b.edges_ &&
           a.external_ids_ == b.external_ids_;
  }

 private:
  struct Adjacency {
    std::vector<std::size_t> offsets;
    std::vector<Neighbor> entries;
  };
  const Adjacency& adjacency(Sign sign, Direction direction) const;

  std::size_t num_nodes_ = 0;
  std::size_t num_positive_ = 0;
  std::vector<EdgeRecord> edges_;
  std::vector<std::int64_t> external_ids_;
  Adjacency pos_in_, pos_out_, neg_in_, neg_out_;
};

// Parses `SOURCE,TARGET,RATING,TIME` rows (no header, LF or CRLF).
// Duplicate (source, target) pairs keep the latest timestamp at the position
// of their first occurrence; self loops are dropped and counted. Dense ids
// follow first occurrence in the cleaned edge order.
SignedGraph parse_edge_list(std::istream& in, const IngestConfig& config = {},
                            IngestAudit* audit = nullptr);
SignedGraph load_edge_list(const std::filesystem::path& path, const IngestConfig& config = {},
                           IngestAudit* audit = nullptr);

// Canonical dump in the ingest format using external ids. Reloading the
// output reproduces the graph exactly.
void write_edge_list(std::ostream& out, const SignedGraph& graph);
void save_edge_list(const std::filesystem::path& path, const SignedGraph& graph);

SignedGraph positive_subgraph(const SignedGraph& graph);

std::vector<Neighbor> neighbors_signed(const SignedGraph& graph, NodeId node, Sign sign,
                                       Direction direction);

struct GraphAudit {
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  std::size_t num_positive = 0;
  std::size_t num_negative = 0;
  double density = 0.0;
  IngestAudit ingest;
};

GraphAudit audit_graph(const SignedGraph& graph, const IngestAudit& ingest = {});
std::string format_audit(const GraphAudit& audit);

}  // namespace tasgnn
