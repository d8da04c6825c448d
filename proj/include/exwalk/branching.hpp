#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "exwalk/lattice.hpp"
#include "exwalk/word_stream.hpp"

namespace exwalk {

/// Law of the number of extra children per particle per step. The parent
/// always persists, so the reduced law (1 - eps, eps) multiplies the
/// population by 1 + eps in mean.
class OffspringLaw {
 public:
  static OffspringLaw reduced(double eps);
  /// probs[m] = probability of m extra children; must sum to 1 within 1e-12.
  explicit OffspringLaw(std::vector<double> probs);

  const std::vector<double>& probs() const { return probs_; }
  double mean_extra() const;
  bool trivial() const { return probs_.size() == 1; }

  unsigned sample(double u) const {
    for (std::size_t m = 0; m + 1 < cum_.size(); ++m) {
      if (u < cum_[m]) return static_cast<unsigned>(m);
    }
    return static_cast<unsigned>(cum_.size() - 1);
  }

 private:
  std::vector<double> probs_;
  std::vector<double> cum_;
};

/// Branching decisions read a companion stream keyed by the master seed with
/// its top bit pattern flipped, so letters stay aligned with run_induced.
StreamSeed branch_stream_seed(StreamSeed seed);

struct Particle {
  std::uint32_t id = 0;
  std::int64_t parent = -1;
  std::uint32_t birth_time = 0;  // step that created it (0 for the root)
};

/// Genealogy and moves of a branching walk. A particle born at step j sits at
/// its parent's position at time j - 1 and moves first at step j (the root at
/// step 1). moves[p][s] holds the letter index (low 7 bits) and accepted flag
/// (bit 7) of its (s+1)-th own step.
struct ParticleTree {
  int dim = 2;
  StreamSeed seed;
  std::uint64_t horizon = 0;
  std::vector<Particle> particles;
  std::vector<std::vector<std::uint8_t>> moves;
  std::vector<std::uint64_t> population;  // N_0..N_horizon
  std::vector<Site> final_positions;
  bool truncated = false;  // the particle cap suppressed births

  static std::uint32_t first_step(const Particle& p) { return p.birth_time == 0 ? 1 : p.birth_time; }
};

/// Per step: every particle present before the step draws its offspring from
/// the companion stream (id order; skipped once the population reaches the
/// cap), then every particle reads one letter in id order and moves iff the
/// edge is Present.
ParticleTree run_branching(StreamSeed seed, int dim, const OffspringLaw& law,
                           std::uint64_t horizon, std::uint64_t particle_cap,
                           SubgraphOracle& oracle, bool record_moves = true);

struct RecurrenceCertificate {
  std::uint64_t subgraph_id = 0;
  std::uint64_t reachable = 0;
  bool certified = false;
  std::uint32_t r = 0;
  std::uint64_t horizon = 0;
  std::optional<std::uint32_t> witness;     // particle whose branch covers first
  std::optional<std::uint64_t> cover_time;  // step at which it does
  bool truncated = false;
};

/// Certified iff some branch visits every site reachable from the origin at
/// least r times at steps 1..horizon. Witness: earliest covering step, ties to
/// the smallest particle id.
RecurrenceCertificate recurrence_certificate(const ParticleTree& tree, const SubgraphOracle& oracle,
                                             std::uint32_t r, std::uint64_t horizon);

struct TinyBoxRow {
  std::uint64_t subgraph_id = 0;
  std::uint64_t edges_bitmask = 0;
  RecurrenceCertificate cert;
  StreamSeed seed;
};

/// The box [-radius, radius]^2 with the subgraph given by `mask` over
/// box_edges() (bit b = edge b); everything else Absent.
ExplicitFinite box_subgraph(std::int64_t radius, std::uint64_t mask);

/// Branching walk plus certificate in one streaming pass, stopping at the first
/// covering branch. Same draws and same answer as run_branching followed by
/// recurrence_certificate.
RecurrenceCertificate certify_streaming(const ExplicitFinite& graph, StreamSeed seed,
                                        const OffspringLaw& law, std::uint64_t horizon,
                                        std::uint32_t r, std::uint64_t particle_cap);

/// Every subgraph of the [-1,1]^2 box; subgraph s uses seed.offset(s).
std::vector<TinyBoxRow> tiny_box_sweep(const OffspringLaw& law, std::uint64_t horizon,
                                       std::uint32_t r, StreamSeed seed,
                                       std::uint64_t particle_cap = 100000, unsigned jobs = 1);

struct GwTrajectory {
  std::vector<std::uint64_t> n;  // N_0..N_j (partial when capped)
  bool capped = false;
};

/// Galton-Watson population under the law, one draw per individual per step.
GwTrajectory gw_population(int j, const OffspringLaw& law, StreamSeed seed,
                           std::uint64_t cap = 10'000'000);

/// 2 sqrt(deg(y)/deg(x)) exp(-rho(x,y)^2 / (2t)) with rho the graph distance.
double carne_bound(const ExplicitFinite& graph, const Site& x, const Site& y, std::uint64_t t);

struct DisplacementTail {
  std::uint64_t trials = 0;
  std::uint64_t exceed = 0;  // walks ending outside the graph ball of radius delta n
  double empirical = 0.0;
  double bound = 0.0;  // sqrt(8d) (2n+1)^d exp(-delta^2 n / 2)
};

/// n-step induced walk from the origin on `graph`; trial t uses seed.offset(t).
DisplacementTail displacement_tail_check(const SubgraphOracle& graph, double delta, int n,
                                         std::uint64_t trials, StreamSeed seed, unsigned jobs = 1);

/// exp(-eps^2 n p / 2).
double chernoff_bound(int n, double p, double eps);

}  // namespace exwalk
