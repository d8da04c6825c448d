#include "exwalk/lattice.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

namespace exwalk {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw RangeError("dimension must lie in [1, " + std::to_string(kMaxDim) +
                     "], got " + std::to_string(dim));
  }
}

void check_coord(std::int64_t v) {
  if (v <= -kCoordLimit || v >= kCoordLimit) {
    throw CoordinateOverflow("coordinate magnitude reaches 2^62: " + std::to_string(v));
  }
}

}  // namespace

Site::Site(int dim) {
  check_dim(dim);
  dim_ = static_cast<std::uint8_t>(dim);
}

Site::Site(std::initializer_list<std::int64_t> coords) {
  check_dim(static_cast<int>(coords.size()));
  dim_ = static_cast<std::uint8_t>(coords.size());
  int i = 0;
  for (auto v : coords) {
    check_coord(v);
    c_[i++] = v;
  }
}

std::strong_ordering operator<=>(const Site& a, const Site& b) {
  if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
  for (int i = 0; i < a.dim_; ++i) {
    if (auto c = a.c_[i] <=> b.c_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::string Site::to_string() const {
  std::string out = "(";
  for (int i = 0; i < dim_; ++i) {
    if (i) out += ",";
    out += std::to_string(c_[i]);
  }
  return out + ")";
}

std::string direction_name(Direction dir) {
  static const char* kAxes = "xyzwabcd";
  std::string s = dir.sign < 0 ? "-" : "+";
  s += kAxes[dir.axis];
  return s;
}

Site Edge::high() const {
  Site h = low;
  h[axis] += 1;
  return h;
}

std::strong_ordering operator<=>(const Edge& a, const Edge& b) {
  if (auto c = a.low <=> b.low; c != 0) return c;
  return a.axis <=> b.axis;
}

const char* edge_state_name(EdgeState s) {
  switch (s) {
    case EdgeState::Present: return "present";
    case EdgeState::Absent: return "absent";
    case EdgeState::Unrevealed: return "unrevealed";
  }
  return "?";
}

Site neighbor(const Site& s, Direction dir) {
  if (dir.axis >= s.dim()) {
    throw DimensionMismatch("direction axis " + std::to_string(dir.axis) +
                            " outside dimension " + std::to_string(s.dim()));
  }
  Site out = s;
  out[dir.axis] += dir.sign;
  check_coord(out[dir.axis]);
  return out;
}

Edge canonical_edge(const Site& s, Direction dir) {
  Site other = neighbor(s, dir);
  return dir.sign > 0 ? Edge{s, dir.axis} : Edge{other, dir.axis};
}

// ---------------------------------------------------------------------------
// Box

Box::Box(Site lo, Site hi) : lo_(lo), hi_(hi) {
  if (lo.dim() != hi.dim()) throw DimensionMismatch("box corners differ in dimension");
  count_ = 1;
  for (int a = 0; a < lo.dim(); ++a) {
    if (hi[a] < lo[a]) throw RangeError("empty box on axis " + std::to_string(a));
    count_ *= static_cast<std::size_t>(hi[a] - lo[a] + 1);
  }
}

Box Box::cube(int dim, std::int64_t radius) {
  Site lo(dim), hi(dim);
  for (int a = 0; a < dim; ++a) {
    lo[a] = -radius;
    hi[a] = radius;
  }
  return Box(lo, hi);
}

bool Box::contains(const Site& s) const {
  if (s.dim() != dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    if (s[a] < lo_[a] || s[a] > hi_[a]) return false;
  }
  return true;
}

bool Box::contains(const Edge& e) const {
  return contains(e.low) && e.low[e.axis] + 1 <= hi_[e.axis];
}

std::size_t Box::index_of(const Site& s) const {
  // Last axis varies fastest, so index order equals lexicographic order.
  std::size_t idx = 0;
  for (int a = 0; a < dim(); ++a) {
    idx = idx * static_cast<std::size_t>(extent(a)) +
          static_cast<std::size_t>(s[a] - lo_[a]);
  }
  return idx;
}

Site Box::site_at(std::size_t index) const {
  Site s(dim());
  for (int a = dim() - 1; a >= 0; --a) {
    const auto ext = static_cast<std::size_t>(extent(a));
    s[a] = lo_[a] + static_cast<std::int64_t>(index % ext);
    index /= ext;
  }
  return s;
}

// ---------------------------------------------------------------------------
// ExplicitFinite

ExplicitFinite::ExplicitFinite(Box box)
    : box_(std::move(box)),
      states_(box_.site_count() * static_cast<std::size_t>(box_.dim()), EdgeState::Absent) {}

void ExplicitFinite::set(const Edge& e, EdgeState state) {
  if (!box_.contains(e)) {
    throw RangeError("edge " + e.low.to_string() + "+axis" + std::to_string(e.axis) +
                     " lies outside the finite box");
  }
  states_[box_.index_of(e.low) * box_.dim() + e.axis] = state;
}

EdgeState ExplicitFinite::query(const Edge& e) const {
  if (!box_.contains(e)) return EdgeState::Absent;
  return states_[box_.index_of(e.low) * box_.dim() + e.axis];
}

int ExplicitFinite::degree(const Site& s) const {
  int deg = 0;
  for (unsigned i = 0; i < 2u * static_cast<unsigned>(dim()); ++i) {
    const Direction d = Direction::from_index(i);
    if (query(canonical_edge(s, d)) == EdgeState::Present) ++deg;
  }
  return deg;
}

std::vector<Edge> ExplicitFinite::box_edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < box_.site_count(); ++i) {
    const Site s = box_.site_at(i);
    for (int a = 0; a < dim(); ++a) {
      Edge e{s, static_cast<std::uint8_t>(a)};
      if (box_.contains(e)) out.push_back(e);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SubgraphOracle

int SubgraphOracle::dim() const {
  return std::visit(
      [](const auto& o) -> int {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, ExplicitFinite>) {
          return o.dim();
        } else {
          return o.dim;
        }
      },
      impl_);
}

EdgeState SubgraphOracle::query(const Edge& e) const {
  return std::visit(
      [&](const auto& o) -> EdgeState {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, FullLattice>) {
          return EdgeState::Present;
        } else {
          return o.query(e);
        }
      },
      impl_);
}

EdgeState SubgraphOracle::resolve(const Site& pos, Direction dir) {
  if (auto* h = std::get_if<AdaptiveHandle>(&impl_)) return h->resolve(pos, dir);
  return query(canonical_edge(pos, dir));
}

// ---------------------------------------------------------------------------
// Breadth-first search

namespace {

template <typename Visit>
void bfs(const SubgraphOracle& oracle, const Site& origin, const Box& box, Visit visit) {
  if (!box.contains(origin)) throw RangeError("origin lies outside the box");
  const unsigned letters = 2u * static_cast<unsigned>(box.dim());
  std::vector<std::int64_t> dist(box.site_count(), -1);
  // Each BFS layer is expanded in lexicographic order.
  std::vector<Site> layer{origin};
  dist[box.index_of(origin)] = 0;
  std::int64_t depth = 0;
  while (!layer.empty()) {
    std::sort(layer.begin(), layer.end());
    std::vector<Site> next;
    for (const Site& s : layer) {
      visit(s, depth);
      for (unsigned i = 0; i < letters; ++i) {
        const Direction d = Direction::from_index(i);
        const Site t = neighbor(s, d);
        if (!box.contains(t)) continue;
        const EdgeState st = oracle.query(canonical_edge(s, d));
        if (st == EdgeState::Unrevealed) {
          throw UnrevealedEdge("unrevealed edge at " + s.to_string() + " " +
                               direction_name(d) + " inside the search box");
        }
        if (st != EdgeState::Present) continue;
        auto& slot = dist[box.index_of(t)];
        if (slot < 0) {
          slot = depth + 1;
          next.push_back(t);
        }
      }
    }
    layer = std::move(next);
    ++depth;
  }
}

}  // namespace

std::vector<Site> reachable_sites(const SubgraphOracle& oracle, const Site& origin,
                                  const Box& box) {
  std::vector<Site> out;
  bfs(oracle, origin, box, [&](const Site& s, std::int64_t) { out.push_back(s); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::int64_t> graph_distances(const SubgraphOracle& oracle,
                                          const Site& origin, const Box& box) {
  std::vector<std::int64_t> dist(box.site_count(), -1);
  bfs(oracle, origin, box,
      [&](const Site& s, std::int64_t depth) { dist[box.index_of(s)] = depth; });
  return dist;
}

// ---------------------------------------------------------------------------
// Snapshots

std::string format_snapshot_line(const Edge& e, EdgeState state) {
  std::string line;
  const Site hi = e.high();
  for (int a = 0; a < e.low.dim(); ++a) {
    line += std::to_string(e.low[a]);
    line += ' ';
  }
  for (int a = 0; a < hi.dim(); ++a) {
    line += std::to_string(hi[a]);
    line += ' ';
  }
  line += edge_state_name(state);
  return line;
}

void write_snapshot(std::ostream& out, const EdgeSnapshot& snap) {
  std::vector<std::string> lines;
  lines.reserve(snap.edges.size());
  for (const auto& [e, st] : snap.edges) {
    if (st == EdgeState::Unrevealed) continue;
    lines.push_back(format_snapshot_line(e, st));
  }
  std::sort(lines.begin(), lines.end());
  out << "exwalk-edges v1 d=" << snap.dim << '\n';
  for (const auto& l : lines) out << l << '\n';
}

void write_snapshot_file(const std::string& path, const EdgeSnapshot& snap) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open snapshot file for writing: " + path);
  write_snapshot(f, snap);
  if (!f) throw IoError("write failed: " + path);
}

EdgeSnapshot read_snapshot(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("exwalk-edges v1 d=", 0) != 0) {
    throw FormatError("missing exwalk-edges v1 header");
  }
  EdgeSnapshot snap;
  snap.dim = std::stoi(header.substr(18));
  check_dim(snap.dim);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Site a(snap.dim), b(snap.dim);
    for (int i = 0; i < snap.dim; ++i) ls >> a[i];
    for (int i = 0; i < snap.dim; ++i) ls >> b[i];
    std::string word;
    ls >> word;
    if (!ls) throw FormatError("malformed snapshot line: " + line);
    int axis = -1;
    for (int i = 0; i < snap.dim; ++i) {
      const auto diff = b[i] - a[i];
      if (diff == 1 && axis < 0) {
        axis = i;
      } else if (diff != 0) {
        axis = -2;
      }
    }
    if (axis < 0) throw FormatError("endpoints are not a canonical unit edge: " + line);
    EdgeState st;
    if (word == "present") {
      st = EdgeState::Present;
    } else if (word == "absent") {
      st = EdgeState::Absent;
    } else {
      throw FormatError("unknown edge state: " + word);
    }
    snap.edges.emplace_back(Edge{a, static_cast<std::uint8_t>(axis)}, st);
  }
  return snap;
}

ExplicitFinite snapshot_to_finite(const EdgeSnapshot& snap) {
  if (snap.edges.empty()) return ExplicitFinite(Box(Site(snap.dim), Site(snap.dim)));
  Site lo = snap.edges.front().first.low, hi = lo;
  for (const auto& [e, st] : snap.edges) {
    const Site h = e.high();
    for (int a = 0; a < snap.dim; ++a) {
      lo[a] = std::min(lo[a], e.low[a]);
      hi[a] = std::max(hi[a], h[a]);
    }
  }
  ExplicitFinite g(Box(lo, hi));
  for (const auto& [e, st] : snap.edges) g.set(e, st);
  return g;
}

}  // namespace exwalk
