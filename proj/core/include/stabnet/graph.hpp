#pragma once

// Finite directed multigraphs and the path bases they generate.
//
// Every Hilbert-space basis in the library is indexed by paths enumerated
// here, so the enumeration order is part of the public contract: paths are
// ordered lexicographically site by site, comparing (target vertex, edge
// index) of each step.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace stabnet {

using Vertex = std::size_t;
using CountMatrix = std::vector<std::vector<std::uint64_t>>;

struct Edge {
  Vertex source = 0;
  Vertex target = 0;
  std::size_t index = 0;  ///< which of the N[source][target] parallel edges

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Path {
  Vertex start = 0;
  std::vector<Edge> edges;

  std::size_t length() const { return edges.size(); }
  Vertex end() const { return edges.empty() ? start : edges.back().target; }
  friend bool operator==(const Path&, const Path&) = default;
};

/// Closed integer interval [lo, hi] of lattice sites.
struct Interval {
  long lo = 0;
  long hi = 0;

  Interval() = default;
  Interval(long lo_, long hi_);

  std::size_t length() const { return static_cast<std::size_t>(hi - lo + 1); }
  bool contains(long site) const { return lo <= site && site <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
  /// The R-ball around the interval.
  Interval enlarged(long radius) const { return {lo - radius, hi + radius}; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

class Graph {
 public:
  /// Validates shape and contents; throws InputError on bad data.
  Graph(std::size_t vertices, CountMatrix multiplicities);

  static Graph from_json_text(const std::string& text);
  static Graph load(const std::filesystem::path& file);
  /// One vertex carrying `loops` self-loops: the tensor-product spin chain of local dimension `loops`.
  static Graph single_vertex(std::size_t loops);

  std::size_t vertex_count() const { return vertices_; }
  std::uint64_t multiplicity(Vertex i, Vertex j) const { return mult_.at(i).at(j); }
  const CountMatrix& multiplicities() const { return mult_; }
  bool is_symmetric() const;
  std::size_t edge_count() const { return edge_offset_.back(); }
  /// Dense id of an edge in [0, edge_count()).
  std::size_t edge_id(const Edge& e) const;

  /// N^length with overflow detection.
  CountMatrix power(std::size_t length) const;

  std::string to_json_text() const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.mult_ == b.mult_; }

 private:
  std::size_t vertices_;
  CountMatrix mult_;
  std::vector<std::size_t> edge_offset_;  // prefix sums over (source, target) pairs
};

/// Smallest m <= max_m with N^m and N^(m+1) entrywise positive (hence N^l > 0 for all l >= m).
/// max_m == 0 selects the default bound 2 t^2. Throws NotUniformlyConnected otherwise.
std::size_t uniform_reach(const Graph& g, std::size_t max_m = 0);

std::uint64_t path_count(const Graph& g, std::size_t length, Vertex i, Vertex j);

std::vector<Path> enumerate_paths(const Graph& g, std::size_t length, Vertex i, Vertex j);

/// All paths of a fixed length, grouped by boundary pair, with O(1) rank lookup.
class PathTable {
 public:
  PathTable(const Graph& g, std::size_t length);

  std::size_t length() const { return length_; }
  const std::vector<Path>& paths(Vertex i, Vertex j) const { return paths_[i * t_ + j]; }
  std::size_t count(Vertex i, Vertex j) const { return paths_[i * t_ + j].size(); }
  /// Position of `edges` (a path of this length from i to j) in paths(i, j).
  std::size_t rank(Vertex i, Vertex j, const std::vector<Edge>& edges) const;

 private:
  const Graph* graph_;
  std::size_t t_;
  std::size_t length_;
  std::vector<std::vector<Path>> paths_;
  std::vector<std::unordered_map<std::string, std::size_t>> ranks_;
  std::string key(const std::vector<Edge>& edges, std::size_t from, std::size_t to) const;

 public:
  /// Rank of the sub-path edges[from, to).
  std::size_t rank(Vertex i, Vertex j, const std::vector<Edge>& edges, std::size_t from,
                   std::size_t to) const;
};

}  // namespace stabnet
