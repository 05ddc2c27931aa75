#include "stabnet/graph.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "stabnet/errors.hpp"

namespace stabnet {

namespace {

std::uint64_t checked_mul_add(std::uint64_t acc, std::uint64_t a, std::uint64_t b) {
  std::uint64_t prod = 0;
  std::uint64_t sum = 0;
  if (__builtin_mul_overflow(a, b, &prod) || __builtin_add_overflow(acc, prod, &sum)) {
    throw DomainError("path count overflows 64 bits");
  }
  return sum;
}

CountMatrix multiply(const CountMatrix& a, const CountMatrix& b) {
  const std::size_t t = a.size();
  CountMatrix c(t, std::vector<std::uint64_t>(t, 0));
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t k = 0; k < t; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < t; ++j) c[i][j] = checked_mul_add(c[i][j], a[i][k], b[k][j]);
    }
  return c;
}

using Support = std::vector<std::vector<bool>>;

Support bool_multiply(const Support& a, const Support& b) {
  const std::size_t t = a.size();
  Support c(t, std::vector<bool>(t, false));
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t k = 0; k < t; ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < t; ++j)
          if (b[k][j]) c[i][j] = true;
  return c;
}

bool all_true(const Support& s) {
  for (const auto& row : s)
    for (bool x : row)
      if (!x) return false;
  return true;
}

void check_vertex(const Graph& g, Vertex v) {
  if (v >= g.vertex_count()) {
    throw DomainError("vertex " + std::to_string(v) + " out of range (graph has " +
                      std::to_string(g.vertex_count()) + " vertices)");
  }
}

}  // namespace

Interval::Interval(long lo_, long hi_) : lo(lo_), hi(hi_) {
  if (lo > hi) throw DomainError("interval requires lo <= hi");
}

Graph::Graph(std::size_t vertices, CountMatrix multiplicities)
    : vertices_(vertices), mult_(std::move(multiplicities)) {
  if (vertices_ == 0) throw InputError("graph needs at least one vertex");
  if (mult_.size() != vertices_) throw InputError("multiplicity matrix has wrong number of rows");
  bool any = false;
  for (const auto& row : mult_) {
    if (row.size() != vertices_) throw InputError("multiplicity matrix row has wrong length");
    for (auto x : row) any = any || x > 0;
  }
  if (!any) throw InputError("no edges");
  edge_offset_.assign(vertices_ * vertices_ + 1, 0);
  for (std::size_t p = 0; p < vertices_ * vertices_; ++p)
    edge_offset_[p + 1] = edge_offset_[p] + mult_[p / vertices_][p % vertices_];
}

Graph Graph::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("graph file parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("multiplicities"))
    throw InputError("graph file needs \"vertices\" and \"multiplicities\"");
  if (!doc["vertices"].is_number_integer() || doc["vertices"].get<long long>() <= 0)
    throw InputError("\"vertices\" must be a positive integer");
  const auto t = static_cast<std::size_t>(doc["vertices"].get<long long>());
  const auto& rows = doc["multiplicities"];
  if (!rows.is_array() || rows.size() != t) throw InputError("dimension mismatch in multiplicities");
  CountMatrix n(t);
  for (std::size_t i = 0; i < t; ++i) {
    if (!rows[i].is_array() || rows[i].size() != t)
      throw InputError("dimension mismatch in multiplicities row " + std::to_string(i));
    for (const auto& x : rows[i]) {
      if (!x.is_number_integer()) throw InputError("multiplicities must be integers");
      if (x.get<long long>() < 0) throw InputError("negative multiplicity");
      n[i].push_back(static_cast<std::uint64_t>(x.get<long long>()));
    }
  }
  return Graph(t, std::move(n));
}

Graph Graph::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot read graph file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

Graph Graph::single_vertex(std::size_t loops) { return Graph(1, CountMatrix{{loops}}); }

bool Graph::is_symmetric() const {
  for (std::size_t i = 0; i < vertices_; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (mult_[i][j] != mult_[j][i]) return false;
  return true;
}

std::size_t Graph::edge_id(const Edge& e) const {
  return edge_offset_[e.source * vertices_ + e.target] + e.index;
}

CountMatrix Graph::power(std::size_t length) const {
  CountMatrix result(vertices_, std::vector<std::uint64_t>(vertices_, 0));
  for (std::size_t i = 0; i < vertices_; ++i) result[i][i] = 1;
  for (std::size_t l = 0; l < length; ++l) result = multiply(result, mult_);
  return result;
}

std::string Graph::to_json_text() const {
  nlohmann::json doc;
  doc["vertices"] = vertices_;
  doc["multiplicities"] = mult_;
  return doc.dump();
}

std::size_t uniform_reach(const Graph& g, std::size_t max_m) {
  const std::size_t t = g.vertex_count();
  if (max_m == 0) max_m = 2 * t * t;
  Support base(t, std::vector<bool>(t, false));
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < t; ++j) base[i][j] = g.multiplicity(i, j) > 0;
  Support current = base;
  bool previous_positive = all_true(current);
  for (std::size_t m = 1; m <= max_m; ++m) {
    Support next = bool_multiply(current, base);
    const bool next_positive = all_true(next);
    if (previous_positive && next_positive) return m;
    current = std::move(next);
    previous_positive = next_positive;
  }
  throw NotUniformlyConnected("no uniform reach m <= " + std::to_string(max_m) +
                              " (graph is reducible or periodic)");
}

std::uint64_t path_count(const Graph& g, std::size_t length, Vertex i, Vertex j) {
  check_vertex(g, i);
  check_vertex(g, j);
  return g.power(length)[i][j];
}

std::vector<Path> enumerate_paths(const Graph& g, std::size_t length, Vertex i, Vertex j) {
  check_vertex(g, i);
  check_vertex(g, j);
  const std::size_t t = g.vertex_count();
  // reach[r][v]: some path of length r leads from v to j
  std::vector<std::vector<bool>> reach(length + 1, std::vector<bool>(t, false));
  reach[0][j] = true;
  for (std::size_t r = 1; r <= length; ++r)
    for (std::size_t v = 0; v < t; ++v)
      for (std::size_t w = 0; w < t; ++w)
        if (g.multiplicity(v, w) > 0 && reach[r - 1][w]) {
          reach[r][v] = true;
          break;
        }

  std::vector<Path> out;
  if (!reach[length][i]) return out;
  Path current{i, {}};
  current.edges.reserve(length);
  // depth-first, children visited in (target, edge index) order
  auto recurse = [&](auto&& self, Vertex at) -> void {
    const std::size_t remaining = length - current.edges.size();
    if (remaining == 0) {
      out.push_back(current);
      return;
    }
    for (std::size_t w = 0; w < t; ++w) {
      if (!reach[remaining - 1][w]) continue;
      for (std::size_t q = 0; q < g.multiplicity(at, w); ++q) {
        current.edges.push_back({at, w, q});
        self(self, w);
        current.edges.pop_back();
      }
    }
  };
  recurse(recurse, i);
  return out;
}

PathTable::PathTable(const Graph& g, std::size_t length)
    : graph_(&g), t_(g.vertex_count()), length_(length) {
  paths_.resize(t_ * t_);
  ranks_.resize(t_ * t_);
  for (std::size_t i = 0; i < t_; ++i)
    for (std::size_t j = 0; j < t_; ++j) {
      auto& list = paths_[i * t_ + j];
      list = enumerate_paths(g, length, i, j);
      auto& ranks = ranks_[i * t_ + j];
      ranks.reserve(list.size());
      for (std::size_t r = 0; r < list.size(); ++r)
        ranks.emplace(key(list[r].edges, 0, list[r].edges.size()), r);
    }
}

std::string PathTable::key(const std::vector<Edge>& edges, std::size_t from, std::size_t to) const {
  std::string k;
  k.reserve((to - from) * sizeof(std::uint32_t));
  for (std::size_t s = from; s < to; ++s) {
    const auto id = static_cast<std::uint32_t>(graph_->edge_id(edges[s]));
    k.append(reinterpret_cast<const char*>(&id), sizeof(id));
  }
  return k;
}

std::size_t PathTable::rank(Vertex i, Vertex j, const std::vector<Edge>& edges) const {
  return rank(i, j, edges, 0, edges.size());
}

std::size_t PathTable::rank(Vertex i, Vertex j, const std::vector<Edge>& edges, std::size_t from,
                            std::size_t to) const {
  if (to - from != length_) throw DomainError("path length does not match table");
  const auto& ranks = ranks_[i * t_ + j];
  auto it = ranks.find(key(edges, from, to));
  if (it == ranks.end()) throw DomainError("path not found in table");
  return it->second;
}

}  // namespace stabnet
