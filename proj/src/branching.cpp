#include "exwalk/branching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "exwalk/parallel.hpp"

namespace exwalk {

OffspringLaw OffspringLaw::reduced(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("extra-child probability must lie in [0, 1]");
  if (eps == 0.0) return OffspringLaw({1.0});
  return OffspringLaw({1.0 - eps, eps});
}

OffspringLaw::OffspringLaw(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw DomainError("offspring law needs at least one probability");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw DomainError("offspring probabilities must be non-negative");
    total += p;
    cum_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("offspring probabilities must sum to 1");
}

double OffspringLaw::mean_extra() const {
  double m = 0.0;
  for (std::size_t k = 0; k < probs_.size(); ++k) m += static_cast<double>(k) * probs_[k];
  return m;
}

StreamSeed branch_stream_seed(StreamSeed seed) {
  return {seed.master_seed ^ 0xB7E151628AED2A6Bull, seed.stream_id};
}

ParticleTree run_branching(StreamSeed seed, int dim, const OffspringLaw& law,
                           std::uint64_t horizon, std::uint64_t particle_cap,
                           SubgraphOracle& oracle, bool record_moves) {
  if (oracle.dim() != dim) throw DimensionMismatch("oracle dimension differs from the walk's");
  if (particle_cap < 1) throw DomainError("particle cap must be positive");
  if (horizon > std::numeric_limits<std::uint32_t>::max()) throw RangeError("horizon too large");
  ParticleTree tree;
  tree.dim = dim;
  tree.seed = seed;
  tree.horizon = horizon;
  LetterStream letters(seed, dim);
  LetterStream branch(branch_stream_seed(seed), dim);
  std::vector<Site> pos{Site::origin(dim)};
  tree.particles.push_back({0, -1, 0});
  tree.moves.emplace_back();
  tree.population.push_back(1);
  if (record_moves) tree.moves[0].reserve(static_cast<std::size_t>(std::min<std::uint64_t>(horizon, 1u << 20)));

  for (std::uint64_t j = 1; j <= horizon; ++j) {
    const std::size_t before = pos.size();
    if (!law.trivial()) {
      for (std::size_t p = 0; p < before; ++p) {
        if (pos.size() >= particle_cap) {
          tree.truncated = true;
          break;
        }
        const unsigned m = law.sample(branch.next_uniform());
        for (unsigned c = 0; c < m; ++c) {
          if (pos.size() >= particle_cap) {
            tree.truncated = true;
            break;
          }
          tree.particles.push_back({static_cast<std::uint32_t>(pos.size()),
                                    static_cast<std::int64_t>(p), static_cast<std::uint32_t>(j)});
          tree.moves.emplace_back();
          pos.push_back(pos[p]);
        }
      }
    }
    for (std::size_t p = 0; p < pos.size(); ++p) {
      const unsigned l = letters.next_letter_index();
      const Direction d = Direction::from_index(l);
      const EdgeState s = oracle.resolve(pos[p], d);
      if (s == EdgeState::Unrevealed) throw UnrevealedEdge("branching walk met an unrevealed edge");
      const bool acc = s == EdgeState::Present;
      if (acc) pos[p] = neighbor(pos[p], d);
      if (record_moves) tree.moves[p].push_back(static_cast<std::uint8_t>(l | (acc ? 0x80u : 0u)));
    }
    tree.population.push_back(pos.size());
  }
  tree.final_positions = std::move(pos);
  return tree;
}

RecurrenceCertificate recurrence_certificate(const ParticleTree& tree, const SubgraphOracle& oracle,
                                             std::uint32_t r, std::uint64_t horizon) {
  const ExplicitFinite* g = oracle.finite();
  if (!g) throw DomainError("recurrence certificates need a finite subgraph");
  if (r < 1) throw DomainError("visit requirement r must be >= 1");
  if (g->dim() != tree.dim) throw DimensionMismatch("tree and subgraph dimensions differ");
  const Box& box = g->box();
  const Site origin = Site::origin(tree.dim);
  if (!box.contains(origin)) throw RangeError("origin outside the subgraph box");

  RecurrenceCertificate cert;
  cert.r = r;
  cert.horizon = std::min(horizon, tree.horizon);
  cert.truncated = tree.truncated;
  const auto reach = reachable_sites(oracle, origin, box);
  cert.reachable = reach.size();
  std::vector<std::int32_t> slot(box.site_count(), -1);
  for (std::size_t i = 0; i < reach.size(); ++i) slot[box.index_of(reach[i])] = static_cast<std::int32_t>(i);
  const std::size_t R = reach.size();

  const std::size_t P = tree.particles.size();
  std::vector<Site> pos(P, origin);
  std::vector<std::uint32_t> counts(P * R, 0);
  std::vector<std::size_t> covered(P, 0);
  std::size_t born = 1;
  for (std::uint64_t j = 1; j <= cert.horizon; ++j) {
    while (born < P && tree.particles[born].birth_time == j) {
      const auto parent = static_cast<std::size_t>(tree.particles[born].parent);
      pos[born] = pos[parent];
      std::copy_n(counts.begin() + static_cast<std::ptrdiff_t>(parent * R), R,
                  counts.begin() + static_cast<std::ptrdiff_t>(born * R));
      covered[born] = covered[parent];
      ++born;
    }
    for (std::size_t p = 0; p < born; ++p) {
      const auto& mv = tree.moves[p];
      const std::size_t k = j - ParticleTree::first_step(tree.particles[p]);
      if (k >= mv.size()) throw InconsistentTranscript("particle tree lacks recorded moves");
      if (mv[k] & 0x80) {
        const Direction d = Direction::from_index(mv[k] & 0x7f);
        pos[p][d.axis] += d.sign;
      }
      const std::int32_t s = box.contains(pos[p]) ? slot[box.index_of(pos[p])] : -1;
      if (s < 0) throw InconsistentTranscript("branch left the component of the origin");
      if (++counts[p * R + static_cast<std::size_t>(s)] == r && ++covered[p] == R) {
        cert.certified = true;
        cert.witness = static_cast<std::uint32_t>(p);
        cert.cover_time = j;
        return cert;
      }
    }
  }
  return cert;
}

ExplicitFinite box_subgraph(std::int64_t radius, std::uint64_t mask) {
  ExplicitFinite g(Box::cube(2, radius));
  const auto edges = g.box_edges();
  if (edges.size() < 64 && (mask >> edges.size()) != 0) throw RangeError("edge mask has bits beyond the box");
  for (std::size_t b = 0; b < edges.size() && b < 64; ++b) {
    if ((mask >> b) & 1u) g.set(edges[b], EdgeState::Present);
  }
  return g;
}

RecurrenceCertificate certify_streaming(const ExplicitFinite& graph, StreamSeed seed,
                                        const OffspringLaw& law, std::uint64_t horizon,
                                        std::uint32_t r, std::uint64_t particle_cap) {
  if (r < 1 || r > 255) throw DomainError("streaming certificates need 1 <= r <= 255");
  if (particle_cap < 1) throw DomainError("particle cap must be positive");
  const int dim = graph.dim();
  const Box& box = graph.box();
  const Site origin = Site::origin(dim);
  if (!box.contains(origin)) throw RangeError("origin outside the subgraph box");
  const std::size_t S = box.site_count();
  const unsigned L = 2u * static_cast<unsigned>(dim);

  std::vector<std::uint32_t> next(S * L);
  for (std::size_t i = 0; i < S; ++i) {
    const Site s = box.site_at(i);
    for (unsigned l = 0; l < L; ++l) {
      const Direction d = Direction::from_index(l);
      const bool present = graph.query(canonical_edge(s, d)) == EdgeState::Present;
      next[i * L + l] = static_cast<std::uint32_t>(present ? box.index_of(neighbor(s, d)) : i);
    }
  }

  RecurrenceCertificate cert;
  cert.r = r;
  cert.horizon = horizon;
  const SubgraphOracle oracle(graph);
  const std::size_t R = reachable_sites(oracle, origin, box).size();
  cert.reachable = R;

  LetterStream letters(seed, dim);
  LetterStream branch(branch_stream_seed(seed), dim);
  std::vector<std::uint32_t> pos{static_cast<std::uint32_t>(box.index_of(origin))};
  std::vector<std::uint8_t> counts(S, 0);
  std::vector<std::uint32_t> covered{0};
  const auto rr = static_cast<std::uint8_t>(r);

  for (std::uint64_t j = 1; j <= horizon; ++j) {
    const std::size_t before = pos.size();
    if (!law.trivial()) {
      for (std::size_t p = 0; p < before; ++p) {
        if (pos.size() >= particle_cap) {
          cert.truncated = true;
          break;
        }
        const unsigned m = law.sample(branch.next_uniform());
        for (unsigned c = 0; c < m; ++c) {
          if (pos.size() >= particle_cap) {
            cert.truncated = true;
            break;
          }
          pos.push_back(pos[p]);
          covered.push_back(covered[p]);
          const std::size_t base = counts.size();
          counts.resize(base + S);
          std::copy_n(counts.begin() + static_cast<std::ptrdiff_t>(p * S), S,
                      counts.begin() + static_cast<std::ptrdiff_t>(base));
        }
      }
    }
    const std::size_t n = pos.size();
    for (std::size_t p = 0; p < n; ++p) {
      const unsigned l = letters.next_letter_index();
      const std::uint32_t s = next[pos[p] * L + l];
      pos[p] = s;
      std::uint8_t& c = counts[p * S + s];
      if (c < rr && ++c == rr && ++covered[p] == R) {
        cert.certified = true;
        cert.witness = static_cast<std::uint32_t>(p);
        cert.cover_time = j;
        return cert;
      }
    }
  }
  return cert;
}

std::vector<TinyBoxRow> tiny_box_sweep(const OffspringLaw& law, std::uint64_t horizon,
                                       std::uint32_t r, StreamSeed seed,
                                       std::uint64_t particle_cap, unsigned jobs) {
  const std::size_t edges = ExplicitFinite(Box::cube(2, 1)).box_edges().size();
  const std::size_t count = std::size_t{1} << edges;
  return map_indices<TinyBoxRow>(count, jobs, [&](std::size_t s) {
    TinyBoxRow row;
    row.subgraph_id = s;
    row.edges_bitmask = s;
    row.seed = seed.offset(s);
    row.cert = certify_streaming(box_subgraph(1, s), row.seed, law, horizon, r, particle_cap);
    row.cert.subgraph_id = s;
    return row;
  });
}

GwTrajectory gw_population(int j, const OffspringLaw& law, StreamSeed seed, std::uint64_t cap) {
  if (j < 0) throw DomainError("generation count must be >= 0");
  GwTrajectory out;
  out.n.push_back(1);
  if (cap < 1) {
    out.capped = true;
    return out;
  }
  LetterStream s(seed, 2);
  std::uint64_t n = 1;
  for (int g = 0; g < j; ++g) {
    std::uint64_t extra = 0;
    if (!law.trivial()) {
      for (std::uint64_t i = 0; i < n; ++i) extra += law.sample(s.next_uniform());
    }
    if (n + extra > cap) {
      out.capped = true;
      return out;
    }
    n += extra;
    out.n.push_back(n);
  }
  return out;
}

double carne_bound(const ExplicitFinite& graph, const Site& x, const Site& y, std::uint64_t t) {
  const Box& box = graph.box();
  if (!box.contains(x) || !box.contains(y)) throw RangeError("site outside the graph's box");
  const int dx = graph.degree(x), dy = graph.degree(y);
  if (dx < 1 || dy < 1) throw DomainError("Carne bound needs sites of positive degree");
  const auto dist = graph_distances(SubgraphOracle(graph), x, box);
  const std::int64_t rho = dist[box.index_of(y)];
  if (rho < 0) throw DisconnectedPair(x.to_string() + " and " + y.to_string() + " are not connected");
  const double pre = 2.0 * std::sqrt(static_cast<double>(dy) / static_cast<double>(dx));
  if (t == 0) return rho == 0 ? pre : 0.0;
  const double r = static_cast<double>(rho);
  return pre * std::exp(-r * r / (2.0 * static_cast<double>(t)));
}

DisplacementTail displacement_tail_check(const SubgraphOracle& graph, double delta, int n,
                                         std::uint64_t trials, StreamSeed seed, unsigned jobs) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
  if (n < 1) throw DomainError("n must be >= 1");
  const int dim = graph.dim();
  const Box box = Box::cube(dim, n);
  const Site origin = Site::origin(dim);
  const auto dist = graph_distances(graph, origin, box);
  const double radius = delta * n;

  auto exceeded = map_indices<std::uint8_t>(trials, jobs, [&](std::size_t t) -> std::uint8_t {
    LetterStream s(seed.offset(t), dim);
    Site pos = origin;
    for (int k = 0; k < n; ++k) {
      const Direction d = s.next_letter();
      if (graph.query(canonical_edge(pos, d)) == EdgeState::Present) pos[d.axis] += d.sign;
    }
    return static_cast<double>(dist[box.index_of(pos)]) > radius ? 1 : 0;
  });

  DisplacementTail out;
  out.trials = trials;
  out.exceed = std::accumulate(exceeded.begin(), exceeded.end(), std::uint64_t{0});
  out.empirical = trials ? static_cast<double>(out.exceed) / static_cast<double>(trials) : 0.0;
  const double d = dim;
  out.bound = std::exp(0.5 * std::log(8.0 * d) + d * std::log(2.0 * n + 1.0) -
                       delta * delta * n / 2.0);
  return out;
}

double chernoff_bound(int n, double p, double eps) {
  if (n < 0) throw DomainError("n must be >= 0");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  return std::exp(-eps * eps * n * p / 2.0);
}

}  // namespace exwalk
