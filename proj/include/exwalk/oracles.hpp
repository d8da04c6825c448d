#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exwalk/induced_walk.hpp"
#include "exwalk/lattice.hpp"
#include "exwalk/report.hpp"
#include "exwalk/stats.hpp"
#include "exwalk/word_stream.hpp"

namespace exwalk {

// ---------------------------------------------------------------------------
// Gambler's ruin and local time of the simple random walk on Z.

struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Probability 1/n that the walk started at 1 visits n before 0.
Fraction gambler_exact(std::uint64_t n);

/// Trial t uses seed.offset(t); each trial runs to absorption or 10^9 steps.
ExperimentReport gambler_mc(std::uint64_t n, std::uint64_t trials, StreamSeed seed,
                            unsigned jobs = 1, std::uint64_t step_cap = 1'000'000'000);

/// Sum over k = 1..N of P(S_k = 0), by dynamic programming over the law of S_k.
double local_time_exact(std::uint64_t N);

/// Mean number of returns to 0 at times 1..N, normal 95% interval, z against
/// local_time_exact when N <= 10^6.
ExperimentReport local_time_mc(std::uint64_t N, std::uint64_t trials, StreamSeed seed,
                               unsigned jobs = 1);

// ---------------------------------------------------------------------------
// Exact transition probabilities on finite subgraphs.

enum class WalkKind {
  Induced,  // uniform letter over 2d directions, stay put on a missing edge
  Simple,   // uniform over present neighbours (stay put at an isolated site)
};

/// Distribution after t steps from `origin`, indexed by Box::index_of.
std::vector<double> transition_dp(const ExplicitFinite& graph, const Site& origin,
                                  std::uint64_t t, WalkKind kind = WalkKind::Induced);
/// Distributions for every t = 0..tmax.
std::vector<std::vector<double>> transition_dp_all(const ExplicitFinite& graph, const Site& origin,
                                                   std::uint64_t tmax,
                                                   WalkKind kind = WalkKind::Induced);

/// Expected acceptance probability of the induced walk at time t:
/// sum_s p_t(s) deg(s) / 2d.
double acceptance_rate_dp(const ExplicitFinite& graph, const Site& origin, std::uint64_t t);

// Test graphs: `path:N` (N sites on the x-axis from the origin), `grid:K`
// (K x K block from the origin), `comb:W:H` (spine y = 0 over [-W, W] with a
// tooth of height H at every x).
ExplicitFinite path_graph(int sites);
ExplicitFinite grid_graph(int side);
ExplicitFinite comb_graph(int half_width, int tooth);
ExplicitFinite parse_graph_spec(const std::string& spec);

// ---------------------------------------------------------------------------
// Abstract excursion chain for back-crossings at line n.

struct ExcursionChainResult {
  EnEstimate estimate;
  std::uint64_t excursions = 0;
  std::uint64_t positive = 0;
  std::uint64_t negative = 0;
};

/// Built only from the excursion law: the row performs a simple random walk
/// from alpha; on a row other than alpha the x-walk lives on [2^n - 1, 2^{n+1} - 1]
/// and each visit to the left end ends the excursion with probability 2/3,
/// otherwise steps right; on row alpha it lives on [2^{n-1} - 1, 2^{n+1} - 1]
/// and each visit to 2^n - 1 ends it with probability 1/2, otherwise steps
/// left or right. The trial stops at the first success of either sign.
ExcursionChainResult excursion_chain_En(int n, std::uint64_t trials, StreamSeed seed,
                                        unsigned jobs = 1,
                                        std::uint64_t step_cap = 1'000'000'000);

struct TeleportResult {
  int n = 0;
  std::uint64_t trials = 0;
  std::uint64_t excursions_per_trial = 0;  // 3^n
  std::uint64_t f1_fail = 0;  // no positive success among the first 3^n
  std::uint64_t f2_fail = 0;  // some negative success among the first 3^n
  Interval f1_ci{0.0, 1.0};
  Interval f2_ci{0.0, 1.0};
};

/// The same chain, restarted at line n on row beta +- 1 after every
/// excursion, run for exactly 3^n excursions per trial. Requires 1 <= n <= 8.
TeleportResult teleport_F1F2(int n, std::uint64_t trials, StreamSeed seed, unsigned jobs = 1);

// ---------------------------------------------------------------------------
// Fits.

struct DecayFit {
  std::vector<double> xs;
  std::vector<double> ys;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  Interval slope_ci;
};

/// Weighted least squares of log p_hat on n over decided, nonzero estimates.
/// Weights are inverse variances of log p_hat read off the Wilson widths.
DecayFit decay_fit(const std::vector<EnEstimate>& estimates);
/// Unweighted fit of log ys on xs.
DecayFit decay_fit(const std::vector<double>& xs, const std::vector<double>& ys);

struct EscapeFit {
  double alpha = 0.0;
  Interval ci;
  std::size_t points = 0;
  bool degenerate = false;
};

/// Slope of log(1 + M(t)) against log(1 + t) over a geometric grid of t from
/// 100 to the transcript length, M(t) the largest Euclidean distance from the
/// start up to letter-time t.
EscapeFit escape_exponent(const WalkTranscript& tr);
/// Same fit for a precomputed running-maximum series m[t], t = 0..T.
EscapeFit escape_exponent_series(const std::vector<double>& running_max);

}  // namespace exwalk
