#include "exwalk/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "exwalk/parallel.hpp"

namespace exwalk {

// ---------------------------------------------------------------------------
// Gambler's ruin and local time

Fraction gambler_exact(std::uint64_t n) {
  if (n == 0) throw DomainError("gambler's ruin needs n >= 1");
  return {1, n};
}

ExperimentReport gambler_mc(std::uint64_t n, std::uint64_t trials, StreamSeed seed,
                            unsigned jobs, std::uint64_t step_cap) {
  const double p = gambler_exact(n).value();
  // 0 = reached 0, 1 = reached n, 2 = censored
  auto out = map_indices<std::uint8_t>(trials, jobs, [&](std::size_t t) -> std::uint8_t {
    LetterStream s(seed.offset(t), 1);
    std::uint64_t x = 1;
    for (std::uint64_t k = 0; k < step_cap; ++k) {
      if (x == n) return 1;
      if (x == 0) return 0;
      x = s.next_letter_index() == 0 ? x + 1 : x - 1;
    }
    return x == n ? 1 : (x == 0 ? 0 : 2);
  });
  std::uint64_t hits = 0, censored = 0;
  for (auto o : out) {
    hits += o == 1;
    censored += o == 2;
  }
  const std::uint64_t decided = trials - censored;
  ReportRow row;
  row.name = "gambler";
  row.param = "n=" + std::to_string(n);
  row.trials = trials;
  row.censored = censored;
  row.seed = seed.master_seed;
  const Interval ci = wilson_interval(hits, decided);
  row.ci_lo = ci.lo;
  row.ci_hi = ci.hi;
  if (decided > 0) {
    row.estimate = static_cast<double>(hits) / static_cast<double>(decided);
    row.z = binomial_z(hits, decided, p);
  }
  return {"gambler", {row}, 0.0};
}

double local_time_exact(std::uint64_t N) {
  if (N > 200000) throw RangeError("exact local time limited to N <= 200000");
  const std::size_t w = 2 * N + 1;
  std::vector<double> cur(w, 0.0), nxt(w, 0.0);
  const std::size_t zero = N;
  cur[zero] = 1.0;
  double total = 0.0;
  for (std::uint64_t k = 1; k <= N; ++k) {
    // After k - 1 steps the support is zero +- (k - 1) with matching parity.
    const std::size_t lo = zero - (k - 1), hi = zero + (k - 1);
    std::fill(nxt.begin() + static_cast<std::ptrdiff_t>(lo - 1),
              nxt.begin() + static_cast<std::ptrdiff_t>(hi + 2), 0.0);
    for (std::size_t i = lo; i <= hi; i += 2) {
      const double m = 0.5 * cur[i];
      nxt[i - 1] += m;
      nxt[i + 1] += m;
    }
    std::swap(cur, nxt);
    total += cur[zero];
  }
  return total;
}

ExperimentReport local_time_mc(std::uint64_t N, std::uint64_t trials, StreamSeed seed,
                               unsigned jobs) {
  auto visits = map_indices<std::uint64_t>(trials, jobs, [&](std::size_t t) {
    LetterStream s(seed.offset(t), 1);
    std::int64_t x = 0;
    std::uint64_t v = 0;
    for (std::uint64_t k = 0; k < N; ++k) {
      x += s.next_letter_index() == 0 ? 1 : -1;
      v += x == 0;
    }
    return v;
  });
  MeanAccumulator acc;
  for (auto v : visits) acc.add(static_cast<double>(v));
  ReportRow row;
  row.name = "localtime";
  row.param = "N=" + std::to_string(N);
  row.trials = trials;
  row.seed = seed.master_seed;
  if (trials > 0) {
    row.estimate = acc.mean();
    const Interval ci = acc.normal_interval();
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    if (N <= 20000) {
      const double exact = local_time_exact(N);
      const double se = acc.std_error();
      if (se > 0) {
        row.z = (acc.mean() - exact) / se;
      } else {
        row.z = acc.mean() == exact ? 0.0 : INFINITY;
      }
    }
  }
  return {"localtime", {row}, 0.0};
}

// ---------------------------------------------------------------------------
// Transition probabilities

namespace {

struct Adjacency {
  std::vector<std::vector<std::uint32_t>> nbrs;  // present neighbours
  unsigned letters = 4;
};

Adjacency adjacency(const ExplicitFinite& g) {
  const Box& box = g.box();
  Adjacency a;
  a.letters = 2u * static_cast<unsigned>(g.dim());
  a.nbrs.resize(box.site_count());
  for (std::size_t i = 0; i < box.site_count(); ++i) {
    const Site s = box.site_at(i);
    for (unsigned l = 0; l < a.letters; ++l) {
      const Direction d = Direction::from_index(l);
      if (g.query(canonical_edge(s, d)) == EdgeState::Present) {
        a.nbrs[i].push_back(static_cast<std::uint32_t>(box.index_of(neighbor(s, d))));
      }
    }
  }
  return a;
}

void dp_step(const Adjacency& a, WalkKind kind, const std::vector<double>& cur,
             std::vector<double>& nxt) {
  std::fill(nxt.begin(), nxt.end(), 0.0);
  for (std::size_t i = 0; i < cur.size(); ++i) {
    const double m = cur[i];
    if (m == 0.0) continue;
    const auto& nb = a.nbrs[i];
    if (kind == WalkKind::Induced) {
      const double share = m / a.letters;
      for (auto j : nb) nxt[j] += share;
      nxt[i] += share * static_cast<double>(a.letters - nb.size());
    } else if (nb.empty()) {
      nxt[i] += m;
    } else {
      const double share = m / static_cast<double>(nb.size());
      for (auto j : nb) nxt[j] += share;
    }
  }
}

}  // namespace

std::vector<std::vector<double>> transition_dp_all(const ExplicitFinite& graph, const Site& origin,
                                                   std::uint64_t tmax, WalkKind kind) {
  const Box& box = graph.box();
  if (!box.contains(origin)) throw RangeError("origin outside the graph's box");
  const Adjacency a = adjacency(graph);
  std::vector<std::vector<double>> out;
  std::vector<double> cur(box.site_count(), 0.0);
  cur[box.index_of(origin)] = 1.0;
  out.push_back(cur);
  std::vector<double> nxt(cur.size());
  for (std::uint64_t t = 1; t <= tmax; ++t) {
    dp_step(a, kind, cur, nxt);
    std::swap(cur, nxt);
    out.push_back(cur);
  }
  return out;
}

std::vector<double> transition_dp(const ExplicitFinite& graph, const Site& origin,
                                  std::uint64_t t, WalkKind kind) {
  const Box& box = graph.box();
  if (!box.contains(origin)) throw RangeError("origin outside the graph's box");
  const Adjacency a = adjacency(graph);
  std::vector<double> cur(box.site_count(), 0.0), nxt(box.site_count());
  cur[box.index_of(origin)] = 1.0;
  for (std::uint64_t k = 0; k < t; ++k) {
    dp_step(a, kind, cur, nxt);
    std::swap(cur, nxt);
  }
  return cur;
}

double acceptance_rate_dp(const ExplicitFinite& graph, const Site& origin, std::uint64_t t) {
  const auto p = transition_dp(graph, origin, t);
  const Box& box = graph.box();
  const double letters = 2.0 * graph.dim();
  double rate = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) rate += p[i] * graph.degree(box.site_at(i)) / letters;
  }
  return rate;
}

ExplicitFinite path_graph(int sites) {
  if (sites < 1) throw DomainError("path needs at least one site");
  ExplicitFinite g(Box(Site{0, 0}, Site{sites - 1, 0}));
  for (int x = 0; x + 1 < sites; ++x) g.set_present(Site{x, 0}, kPlusX);
  return g;
}

ExplicitFinite grid_graph(int side) {
  if (side < 1) throw DomainError("grid needs side >= 1");
  ExplicitFinite g(Box(Site{0, 0}, Site{side - 1, side - 1}));
  for (const auto& e : g.box_edges()) g.set(e, EdgeState::Present);
  return g;
}

ExplicitFinite comb_graph(int half_width, int tooth) {
  if (half_width < 0 || tooth < 0) throw DomainError("comb dimensions must be non-negative");
  ExplicitFinite g(Box(Site{-half_width, 0}, Site{half_width, tooth}));
  for (int x = -half_width; x <= half_width; ++x) {
    if (x < half_width) g.set_present(Site{x, 0}, kPlusX);
    for (int y = 0; y < tooth; ++y) g.set_present(Site{x, y}, kPlusY);
  }
  return g;
}

ExplicitFinite parse_graph_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto num = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(parts.at(i), &used);
      if (used != parts[i].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw UsageError("bad graph spec '" + spec + "' (expected path:N, grid:K or comb:W:H)");
    }
  };
  if (parts.size() == 2 && parts[0] == "path") return path_graph(num(1));
  if (parts.size() == 2 && parts[0] == "grid") return grid_graph(num(1));
  if (parts.size() == 3 && parts[0] == "comb") return comb_graph(num(1), num(2));
  throw UsageError("bad graph spec '" + spec + "' (expected path:N, grid:K or comb:W:H)");
}

// ---------------------------------------------------------------------------
// Excursion chain

namespace {

enum class ChainOutcome : std::uint8_t { Positive, Negative, Neither, Censored };

struct ChainGeometry {
  std::int64_t left, mid, right;
};

ChainGeometry chain_geometry(int n) {
  if (n < 1) throw DomainError("excursion chain needs n >= 1");
  if (n + 1 > 40) throw RangeError("excursion chain needs n <= 39");
  auto at = [](int k) { return (std::int64_t{1} << k) - 1; };
  return {at(n - 1), at(n), at(n + 1)};
}

// One excursion from (mid, row); on_alpha selects the row-alpha law.
ChainOutcome run_excursion(LetterStream& s, bool on_alpha, const ChainGeometry& g,
                           std::uint64_t& steps, std::uint64_t cap) {
  std::int64_t x = g.mid;
  for (;;) {
    if (steps++ >= cap) return ChainOutcome::Censored;
    const double u = s.next_uniform();
    if (x == g.mid) {
      if (on_alpha) {
        if (u < 0.5) return ChainOutcome::Neither;
        x += u < 0.75 ? -1 : 1;
      } else {
        if (u < 2.0 / 3.0) return ChainOutcome::Neither;
        ++x;
      }
    } else {
      x += u < 0.5 ? -1 : 1;
    }
    if (x == g.right) return ChainOutcome::Positive;
    if (x == g.left) return ChainOutcome::Negative;
  }
}

}  // namespace

ExcursionChainResult excursion_chain_En(int n, std::uint64_t trials, StreamSeed seed,
                                        unsigned jobs, std::uint64_t step_cap) {
  const ChainGeometry g = chain_geometry(n);
  struct Trial {
    ChainOutcome outcome = ChainOutcome::Censored;
    std::uint64_t excursions = 0;
  };
  auto res = map_indices<Trial>(trials, jobs, [&](std::size_t t) {
    LetterStream s(seed.offset(t), 2);
    std::int64_t y = 0;  // rows measured from alpha
    std::uint64_t steps = 0;
    Trial tr;
    for (;;) {
      ++tr.excursions;
      const ChainOutcome o = run_excursion(s, y == 0, g, steps, step_cap);
      if (o != ChainOutcome::Neither) {
        tr.outcome = o;
        return tr;
      }
      y += s.next_uniform() < 0.5 ? 1 : -1;
    }
  });
  ExcursionChainResult out;
  auto& e = out.estimate;
  e.n = n;
  e.trials = trials;
  for (const auto& tr : res) {
    out.excursions += tr.excursions;
    switch (tr.outcome) {
      case ChainOutcome::Positive: ++e.completions; ++out.positive; break;
      case ChainOutcome::Negative: ++e.hits; ++out.negative; break;
      default: ++e.censored; break;
    }
  }
  e.finalize();
  return out;
}

TeleportResult teleport_F1F2(int n, std::uint64_t trials, StreamSeed seed, unsigned jobs) {
  if (n < 1 || n > 8) throw DomainError("teleporting chain supports 1 <= n <= 8");
  const ChainGeometry g = chain_geometry(n);
  std::uint64_t budget = 1;
  for (int i = 0; i < n; ++i) budget *= 3;
  TeleportResult out;
  out.n = n;
  out.trials = trials;
  out.excursions_per_trial = budget;
  if (trials == 0) return out;
  // bit 0: no positive success; bit 1: some negative success
  auto res = map_indices<std::uint8_t>(trials, jobs, [&](std::size_t t) -> std::uint8_t {
    LetterStream s(seed.offset(t), 2);
    std::int64_t y = 0;
    std::uint64_t steps = 0;
    bool pos = false, neg = false;
    for (std::uint64_t k = 0; k < budget && !(pos && neg); ++k) {
      const ChainOutcome o = run_excursion(s, y == 0, g, steps, UINT64_MAX);
      pos |= o == ChainOutcome::Positive;
      neg |= o == ChainOutcome::Negative;
      y += s.next_uniform() < 0.5 ? 1 : -1;
    }
    return static_cast<std::uint8_t>((pos ? 0 : 1) | (neg ? 2 : 0));
  });
  for (auto r : res) {
    out.f1_fail += r & 1;
    out.f2_fail += (r >> 1) & 1;
  }
  out.f1_ci = wilson_interval(out.f1_fail, trials);
  out.f2_ci = wilson_interval(out.f2_fail, trials);
  return out;
}

// ---------------------------------------------------------------------------
// Fits

DecayFit decay_fit(const std::vector<EnEstimate>& estimates) {
  DecayFit fit;
  std::vector<double> w;
  bool unit = false;
  for (const auto& e : estimates) {
    if (!e.p_hat || *e.p_hat <= 0.0 || e.decided() == 0) continue;
    fit.xs.push_back(e.n);
    fit.ys.push_back(*e.p_hat);
    const double sd = (e.wilson_ci.hi - e.wilson_ci.lo) / (2.0 * kZ95 * *e.p_hat);
    if (!(sd > 0.0)) unit = true;
    w.push_back(sd > 0.0 ? 1.0 / (sd * sd) : 1.0);
  }
  if (fit.xs.size() < 3) throw InsufficientPoints("decay fit needs at least three decided, nonzero estimates");
  if (unit) std::fill(w.begin(), w.end(), 1.0);
  std::vector<double> logs;
  for (double y : fit.ys) logs.push_back(std::log(y));
  const LinearFit lf = linear_fit(fit.xs, logs, w);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.slope_se = lf.slope_se;
  fit.slope_ci = lf.slope_ci;
  return fit;
}

DecayFit decay_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw DomainError("decay fit inputs differ in length");
  DecayFit fit;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(ys[i] > 0.0)) continue;
    fit.xs.push_back(xs[i]);
    fit.ys.push_back(ys[i]);
  }
  if (fit.xs.size() < 3) throw InsufficientPoints("decay fit needs at least three positive points");
  std::vector<double> logs;
  for (double y : fit.ys) logs.push_back(std::log(y));
  const LinearFit lf = linear_fit(fit.xs, logs);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.slope_se = lf.slope_se;
  fit.slope_ci = lf.slope_ci;
  return fit;
}

EscapeFit escape_exponent_series(const std::vector<double>& m) {
  if (m.size() < 1001) throw DomainError("escape exponent needs at least 1000 letters");
  const auto T = static_cast<double>(m.size() - 1);
  EscapeFit fit;
  if (m.back() <= 0.0) {
    fit.degenerate = true;
    return fit;
  }
  constexpr int kPoints = 25;
  const double q = std::pow(T / 100.0, 1.0 / (kPoints - 1));
  std::vector<double> xs, ys;
  std::uint64_t last = 0;
  for (int k = 0; k < kPoints; ++k) {
    auto t = static_cast<std::uint64_t>(std::llround(100.0 * std::pow(q, k)));
    t = std::min<std::uint64_t>(t, m.size() - 1);
    if (t == last) continue;
    last = t;
    xs.push_back(std::log1p(static_cast<double>(t)));
    ys.push_back(std::log1p(m[t]));
  }
  const LinearFit lf = linear_fit(xs, ys);
  fit.alpha = lf.slope;
  fit.ci = lf.slope_ci;
  fit.points = lf.points;
  return fit;
}

EscapeFit escape_exponent(const WalkTranscript& tr) {
  if (tr.size() < 1000) throw DomainError("escape exponent needs at least 1000 letters");
  std::vector<double> m(tr.size() + 1, 0.0);
  const Site start = tr.start();
  double best = 0.0;
  tr.replay([&](std::size_t t, const Site& pos, Direction, bool) {
    double r2 = 0.0;
    for (int a = 0; a < pos.dim(); ++a) {
      const double d = static_cast<double>(pos[a] - start[a]);
      r2 += d * d;
    }
    best = std::max(best, std::sqrt(r2));
    m[t] = best;
  });
  return escape_exponent_series(m);
}

}  // namespace exwalk
