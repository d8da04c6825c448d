#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "exwalk/errors.hpp"

namespace exwalk {

inline constexpr int kMaxDim = 8;
// Every coordinate must stay strictly inside (-kCoordLimit, kCoordLimit).
inline constexpr std::int64_t kCoordLimit = std::int64_t{1} << 62;

class Site {
 public:
  Site() = default;
  explicit Site(int dim);
  Site(std::initializer_list<std::int64_t> coords);

  static Site origin(int dim) { return Site(dim); }

  int dim() const { return dim_; }
  std::int64_t operator[](int axis) const { return c_[axis]; }
  std::int64_t& operator[](int axis) { return c_[axis]; }

  friend bool operator==(const Site& a, const Site& b) {
    return a.dim_ == b.dim_ && a.c_ == b.c_;
  }
  friend std::strong_ordering operator<=>(const Site& a, const Site& b);

  std::string to_string() const;

 private:
  std::array<std::int64_t, kMaxDim> c_{};
  std::uint8_t dim_ = 0;
};

// A unit lattice direction. For d = 2, index 0..3 is x, -x, y, -y.
struct Direction {
  std::uint8_t axis = 0;
  std::int8_t sign = 1;

  constexpr std::uint8_t index() const {
    return static_cast<std::uint8_t>(2 * axis + (sign < 0 ? 1 : 0));
  }
  static constexpr Direction from_index(unsigned idx) {
    return Direction{static_cast<std::uint8_t>(idx / 2),
                     static_cast<std::int8_t>(idx % 2 == 0 ? 1 : -1)};
  }
  constexpr Direction opposite() const {
    return Direction{axis, static_cast<std::int8_t>(-sign)};
  }
  friend constexpr bool operator==(Direction a, Direction b) {
    return a.axis == b.axis && a.sign == b.sign;
  }
};

inline constexpr Direction kPlusX{0, 1};
inline constexpr Direction kMinusX{0, -1};
inline constexpr Direction kPlusY{1, 1};
inline constexpr Direction kMinusY{1, -1};

std::string direction_name(Direction dir);

// Undirected unit edge joining `low` and `low + unit(axis)`.
struct Edge {
  Site low;
  std::uint8_t axis = 0;

  Site high() const;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend std::strong_ordering operator<=>(const Edge& a, const Edge& b);
};

enum class EdgeState : std::uint8_t { Present, Absent, Unrevealed };

const char* edge_state_name(EdgeState s);

Site neighbor(const Site& s, Direction dir);
Edge canonical_edge(const Site& s, Direction dir);

// Closed axis-aligned box [lo, hi] (inclusive on every axis).
class Box {
 public:
  Box() = default;
  Box(Site lo, Site hi);
  static Box cube(int dim, std::int64_t radius);

  int dim() const { return lo_.dim(); }
  const Site& lo() const { return lo_; }
  const Site& hi() const { return hi_; }
  bool contains(const Site& s) const;
  bool contains(const Edge& e) const;
  std::size_t site_count() const { return count_; }
  std::size_t index_of(const Site& s) const;
  Site site_at(std::size_t index) const;
  std::int64_t extent(int axis) const { return hi_[axis] - lo_[axis] + 1; }

 private:
  Site lo_;
  Site hi_;
  std::size_t count_ = 0;
};

struct FullLattice {
  int dim = 2;
};

// Finite edge set inside a box; every edge not fully inside the box is Absent.
class ExplicitFinite {
 public:
  explicit ExplicitFinite(Box box);

  const Box& box() const { return box_; }
  int dim() const { return box_.dim(); }

  void set(const Edge& e, EdgeState state);
  void set_present(const Site& a, Direction dir) {
    set(canonical_edge(a, dir), EdgeState::Present);
  }
  EdgeState query(const Edge& e) const;
  int degree(const Site& s) const;

  // Every edge whose endpoints both lie in the box, in canonical order.
  std::vector<Edge> box_edges() const;

 private:
  Box box_;
  std::vector<EdgeState> states_;  // site index * dim + axis
};

// Revelation policy plugged in by adaptive constructions.
struct AdaptiveHandle {
  int dim = 2;
  std::function<EdgeState(const Edge&)> query;
  std::function<EdgeState(const Site&, Direction)> resolve;
};

class SubgraphOracle {
 public:
  SubgraphOracle(FullLattice f) : impl_(f) {}
  SubgraphOracle(ExplicitFinite f) : impl_(std::move(f)) {}
  SubgraphOracle(AdaptiveHandle h) : impl_(std::move(h)) {}

  int dim() const;
  EdgeState query(const Edge& e) const;
  // State of the edge leaving `pos` along `dir`; adaptive policies may reveal it.
  EdgeState resolve(const Site& pos, Direction dir);

  bool is_full_lattice() const { return std::holds_alternative<FullLattice>(impl_); }
  const ExplicitFinite* finite() const { return std::get_if<ExplicitFinite>(&impl_); }

 private:
  std::variant<FullLattice, ExplicitFinite, AdaptiveHandle> impl_;
};

// Breadth-first closure of `origin` under Present edges with both endpoints in
// `box`. Returned in lexicographic order.
std::vector<Site> reachable_sites(const SubgraphOracle& oracle, const Site& origin,
                                  const Box& box);

// Graph distances from `origin` inside `box`, indexed by Box::index_of; -1 for
// unreachable sites.
std::vector<std::int64_t> graph_distances(const SubgraphOracle& oracle,
                                          const Site& origin, const Box& box);

// Text edge snapshot: `exwalk-edges v1 d=<d>` header, one edge per line,
// lines sorted bytewise, Unrevealed edges omitted.
struct EdgeSnapshot {
  int dim = 2;
  std::vector<std::pair<Edge, EdgeState>> edges;
};

std::string format_snapshot_line(const Edge& e, EdgeState state);
void write_snapshot(std::ostream& out, const EdgeSnapshot& snap);
void write_snapshot_file(const std::string& path, const EdgeSnapshot& snap);
EdgeSnapshot read_snapshot(std::istream& in);
// Bounding box of every listed endpoint; listed edges keep their state.
ExplicitFinite snapshot_to_finite(const EdgeSnapshot& snap);

}  // namespace exwalk
