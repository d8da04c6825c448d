#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exwalk/exceptional.hpp"

namespace exwalk {

struct PhaseLogRow {
  int phase = 0;
  int walk = 0;               // 1-based walk index
  std::uint64_t entry_t = 0;  // walk's own letter-time when it joined the lockstep
  std::uint64_t freeze_t = 0; // walk's own letter-time of first arrival at the next line
};

struct MultiStop {
  std::optional<int> max_phase;            // stop after this many phases complete
  std::optional<std::uint64_t> max_letters;  // total letters over all walks
  std::uint64_t phase_letter_cap = 2'000'000'000;  // aborts the run when exceeded
};

/// k walks sharing one adaptively revealed environment. Walk j (1-based) reads
/// stream base_seed.offset(j - 1) and joins in phase j - 1. Within a phase the
/// walks advance one letter each in round-robin order 1..active.
struct MultiWalkRun {
  int k = 1;
  StreamSeed base_seed;
  RevealedLattice lattice;
  std::vector<LatticeWalker> walkers;
  std::vector<WalkTranscript> transcripts;
  std::vector<std::vector<std::uint64_t>> tau;  // tau[j][n] per walk, own clock
  std::vector<PhaseLogRow> phase_log;
  std::int64_t y_min = 0;
  std::int64_t y_max = 0;
  bool aborted = false;
  std::string abort_reason;

  MultiWalkRun(int k, StreamSeed seed, bool audit = false)
      : k(k), base_seed(seed), lattice(audit) {}

  int phases_completed() const { return lattice.stage(); }
  /// Snapshot box: x in [-1, next line], y in [y_min - 1, y_max + 1].
  EdgeSnapshot snapshot() const;
  /// Number of rows fully connecting L_g to L_{g+1}.
  std::size_t connecting_segments(int g) const { return lattice.connecting_rows(g).size(); }
};

MultiWalkRun run_multiwalk(StreamSeed base_seed, int k, const MultiStop& stop,
                           bool keep_transcripts = true, bool audit = false);

/// Probability that walk i, after reaching L_n, hits L_{n-1} before L_{n+1}.
/// Trial t uses base_seed.offset(65536 * t). `horizon_letters` caps the total
/// letters read by all walks of a trial. k defaults to n + 1 (every walk that
/// joins up to phase n).
EnEstimate estimate_Eni(int n, int i, std::uint64_t trials, StreamSeed base_seed,
                        std::uint64_t horizon_letters, std::optional<int> k = std::nullopt,
                        unsigned jobs = 1);

inline constexpr std::uint64_t kMultiTrialStride = 65536;

}  // namespace exwalk
