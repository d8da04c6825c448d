#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "exwalk/induced_walk.hpp"
#include "exwalk/lattice.hpp"
#include "exwalk/word_stream.hpp"

namespace exwalk {

/// A finite north-east path through the origin, stored as two arms growing
/// outward: the NE arm uses +x/+y steps, the SW arm -x/-y steps.
struct GreedyPath {
  std::vector<Direction> ne_arm;
  std::vector<Direction> sw_arm;
  Site ne_leaf{0, 0};
  Site sw_leaf{0, 0};

  std::size_t origin_index() const { return sw_arm.size(); }
  std::int64_t ne_length() const { return static_cast<std::int64_t>(ne_arm.size()); }
  std::int64_t sw_length() const { return static_cast<std::int64_t>(sw_arm.size()); }
  /// Edges ordered from the SW leaf to the NE leaf.
  std::vector<Edge> edges() const;
  /// Sites ordered from the SW leaf to the NE leaf.
  std::vector<Site> sites() const;

  /// Letter moving from offset k toward k + 1 (or k - 1), if that edge exists.
  std::optional<Direction> forward(std::int64_t k) const;
  std::optional<Direction> backward(std::int64_t k) const;
};

struct GreedyRun {
  GreedyPath path;
  WalkTranscript transcript;
  std::uint64_t leaf_letters = 0;     // letters read while sitting at the NE leaf
  std::uint64_t leaf_extensions = 0;  // ... of which extended the NE arm
};

/// Runs the greedy construction for `horizon_letters` letters, or until
/// `accepted_target` accepted steps when given (whichever comes first).
GreedyRun run_greedy_path(StreamSeed seed, std::uint64_t horizon_letters,
                          std::optional<std::uint64_t> accepted_target = std::nullopt);

/// Offsets along the path (0 = origin), one entry per letter plus the start.
struct UnrolledTranscript {
  std::vector<std::int64_t> positions{0};
  std::int64_t a = 0;
  std::int64_t b = 0;

  /// Offset after the k-th position change (k = 0 is the start).
  std::optional<std::int64_t> position_after_moves(std::uint64_t k) const;
};

UnrolledTranscript unroll(const GreedyPath& path, const WalkTranscript& tr);

struct BoundaryStats {
  std::uint64_t boundary_visits = 0;  // moves from a range endpoint (a < b)
  std::uint64_t outward_moves = 0;
  std::uint64_t inward_moves = 0;
  std::uint64_t interior_left = 0;
  std::uint64_t interior_right = 0;
  std::uint64_t degenerate_moves = 0;  // moves made while a == b
  std::uint64_t returns_to_origin = 0;

  void merge(const BoundaryStats& o);
};

/// Counts over position changes, split by whether the pre-move offset is an
/// endpoint of the range attained so far.
BoundaryStats boundary_law_stats(const UnrolledTranscript& u);

/// Direct simulation of the unrolled law: outward with probability 2/3 at a
/// range endpoint, 1/2 either way in the interior and while the range is {0}.
UnrolledTranscript boundary_law_simulate(StreamSeed seed, std::uint64_t horizon_steps);

}  // namespace exwalk
