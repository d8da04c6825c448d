#include "exwalk/greedy_path.hpp"

#include <algorithm>

namespace exwalk {

std::optional<Direction> GreedyPath::forward(std::int64_t k) const {
  if (k >= 0) {
    if (k < ne_length()) return ne_arm[static_cast<std::size_t>(k)];
    return std::nullopt;
  }
  if (-k - 1 < sw_length()) return sw_arm[static_cast<std::size_t>(-k - 1)].opposite();
  return std::nullopt;
}

std::optional<Direction> GreedyPath::backward(std::int64_t k) const {
  if (k > 0) {
    if (k - 1 < ne_length()) return ne_arm[static_cast<std::size_t>(k - 1)].opposite();
    return std::nullopt;
  }
  if (-k < sw_length()) return sw_arm[static_cast<std::size_t>(-k)];
  return std::nullopt;
}

std::vector<Site> GreedyPath::sites() const {
  std::vector<Site> sw{Site{0, 0}};
  for (auto d : sw_arm) sw.push_back(neighbor(sw.back(), d));
  std::vector<Site> out(sw.rbegin(), sw.rend());
  for (auto d : ne_arm) out.push_back(neighbor(out.back(), d));
  return out;
}

std::vector<Edge> GreedyPath::edges() const {
  const auto s = sites();
  std::vector<Edge> out;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const int axis = s[i + 1][0] != s[i][0] ? 0 : 1;
    out.push_back(Edge{s[i], static_cast<std::uint8_t>(axis)});
  }
  return out;
}

GreedyRun run_greedy_path(StreamSeed seed, std::uint64_t horizon_letters,
                          std::optional<std::uint64_t> accepted_target) {
  GreedyRun run{GreedyPath{}, WalkTranscript(Site{0, 0}, seed)};
  auto& p = run.path;
  LetterStream stream(seed, 2);
  std::int64_t k = 0;
  std::uint64_t accepted = 0;
  for (std::uint64_t t = 0; t < horizon_letters; ++t) {
    if (accepted_target && accepted >= *accepted_target) break;
    const unsigned l = stream.next_letter_index();
    const Direction d = Direction::from_index(l);
    const bool at_ne = k == p.ne_length();
    if (at_ne) ++run.leaf_letters;
    bool acc = true;
    if (at_ne && d.sign > 0) {
      p.ne_arm.push_back(d);
      p.ne_leaf = neighbor(p.ne_leaf, d);
      ++run.leaf_extensions;
      ++k;
    } else if (k == -p.sw_length() && d.sign < 0) {
      p.sw_arm.push_back(d);
      p.sw_leaf = neighbor(p.sw_leaf, d);
      --k;
    } else if (p.forward(k) == d) {
      ++k;
    } else if (p.backward(k) == d) {
      --k;
    } else {
      acc = false;
    }
    if (acc) ++accepted;
    run.transcript.push_index(l, acc);
  }
  return run;
}

std::optional<std::int64_t> UnrolledTranscript::position_after_moves(std::uint64_t k) const {
  if (k == 0) return positions.front();
  std::uint64_t moves = 0;
  for (std::size_t i = 1; i < positions.size(); ++i) {
    if (positions[i] != positions[i - 1] && ++moves == k) return positions[i];
  }
  return std::nullopt;
}

UnrolledTranscript unroll(const GreedyPath& path, const WalkTranscript& tr) {
  UnrolledTranscript u;
  u.positions.reserve(tr.size() + 1);
  std::int64_t k = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const Direction d = tr.letter(i);
    const bool fwd = path.forward(k) == d, back = path.backward(k) == d;
    if (tr.accepted(i)) {
      if (fwd) {
        ++k;
      } else if (back) {
        --k;
      } else {
        throw InconsistentTranscript("accepted letter " + std::to_string(i + 1) +
                                     " uses an edge outside the path");
      }
    } else if (fwd || back) {
      throw InconsistentTranscript("rejected letter " + std::to_string(i + 1) +
                                   " follows a path edge");
    }
    u.a = std::min(u.a, k);
    u.b = std::max(u.b, k);
    u.positions.push_back(k);
  }
  return u;
}

void BoundaryStats::merge(const BoundaryStats& o) {
  boundary_visits += o.boundary_visits;
  outward_moves += o.outward_moves;
  inward_moves += o.inward_moves;
  interior_left += o.interior_left;
  interior_right += o.interior_right;
  degenerate_moves += o.degenerate_moves;
  returns_to_origin += o.returns_to_origin;
}

BoundaryStats boundary_law_stats(const UnrolledTranscript& u) {
  BoundaryStats s;
  std::int64_t a = u.positions.front(), b = a;
  for (std::size_t i = 1; i < u.positions.size(); ++i) {
    const std::int64_t prev = u.positions[i - 1], cur = u.positions[i];
    if (prev == cur) continue;
    if (a == b) {
      ++s.degenerate_moves;
    } else if (prev == b || prev == a) {
      ++s.boundary_visits;
      const bool out = prev == b ? cur > prev : cur < prev;
      ++(out ? s.outward_moves : s.inward_moves);
    } else {
      ++(cur < prev ? s.interior_left : s.interior_right);
    }
    a = std::min(a, cur);
    b = std::max(b, cur);
    if (cur == 0) ++s.returns_to_origin;
  }
  return s;
}

UnrolledTranscript boundary_law_simulate(StreamSeed seed, std::uint64_t horizon_steps) {
  UnrolledTranscript u;
  u.positions.reserve(horizon_steps + 1);
  LetterStream stream(seed, 2);
  std::int64_t x = 0;
  for (std::uint64_t t = 0; t < horizon_steps; ++t) {
    const double v = stream.next_uniform();
    int step;
    if (u.a == u.b) {
      step = v < 0.5 ? 1 : -1;
    } else if (x == u.b) {
      step = v < 2.0 / 3.0 ? 1 : -1;
    } else if (x == u.a) {
      step = v < 2.0 / 3.0 ? -1 : 1;
    } else {
      step = v < 0.5 ? 1 : -1;
    }
    x += step;
    u.a = std::min(u.a, x);
    u.b = std::max(u.b, x);
    u.positions.push_back(x);
  }
  return u;
}

}  // namespace exwalk
