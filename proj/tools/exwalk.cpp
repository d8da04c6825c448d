// exwalk: command-line front end for the induced-walk experiments.

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "exwalk/branching.hpp"
#include "exwalk/exceptional.hpp"
#include "exwalk/greedy_path.hpp"
#include "exwalk/multi_walk.hpp"
#include "exwalk/oracles.hpp"
#include "exwalk/report.hpp"

namespace {

using namespace exwalk;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  unsigned jobs = 1;
  std::string out = "-";
  std::string format = "csv";
};

// Options that never change the output and so stay out of the config hash.
bool hash_neutral(const std::string& name) {
  return name == "--jobs" || name == "--out" || name == "--help" || name == "--snapshot" ||
         name == "--dump-transcript";
}

void collect_options(const CLI::App* app, nlohmann::json& params) {
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name.empty() || hash_neutral(name)) continue;
    std::string key = name.substr(name.find_first_not_of('-'));
    if (opt->count() > 0) {
      const auto& r = opt->results();
      if (r.size() == 1) {
        params[key] = r.front();
      } else if (r.empty()) {
        params[key] = true;
      } else {
        params[key] = r;
      }
    } else if (!opt->get_default_str().empty()) {
      params[key] = opt->get_default_str();
    }
  }
}

class Runner {
 public:
  Runner(const Globals& g, CLI::App* root) : g_(g), root_(root) {}

  StreamSeed seed(const CLI::App* sub) {
    if (!g_.seed) {
      std::cerr << "exwalk: no --seed given for '" << sub->get_name() << "'; using seed 0\n";
      return {0, 0};
    }
    return {*g_.seed, 0};
  }

  std::uint64_t trials(std::uint64_t fallback) const { return g_.trials.value_or(fallback); }
  unsigned jobs() const { return g_.jobs; }

  OutputFormat format() const {
    if (g_.format == "csv") return OutputFormat::Csv;
    if (g_.format == "json") return OutputFormat::Json;
    throw UsageError("--format must be csv or json");
  }

  RunConfig config(const CLI::App* sub) const {
    RunConfig c;
    c.subcommand = sub->get_name();
    collect_options(root_, c.params);
    collect_options(sub, c.params);
    c.params["seed"] = g_.seed.value_or(0);
    return c;
  }

  void emit(const CLI::App* sub, const Table& t) {
    const RunConfig c = config(sub);
    write_table(g_.out, t, format(), &c);
  }

  void emit(const CLI::App* sub, const ExperimentReport& r) { emit(sub, r.to_table()); }

 private:
  const Globals& g_;
  CLI::App* root_;
};

Cell opt_cell(const std::optional<double>& v) { return v ? Cell{*v} : Cell{std::string("nan")}; }

std::vector<std::string> en_columns() {
  return {"n", "trials", "hits", "completions", "censored", "p_hat", "ci_lo", "ci_hi", "seed", "horizon"};
}

std::vector<Cell> en_row(const EnEstimate& e, std::uint64_t seed, std::uint64_t horizon) {
  return {static_cast<std::int64_t>(e.n), e.trials, e.hits, e.completions, e.censored,
          opt_cell(e.p_hat), e.wilson_ci.lo, e.wilson_ci.hi, seed, horizon};
}

std::optional<std::size_t> find_column(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == name) return i;
  }
  return std::nullopt;
}

std::string cell_string(const Cell& c) {
  if (auto* s = std::get_if<std::string>(&c)) return *s;
  return {};
}

double parse_double(const std::string& s) {
  if (s == "nan" || s.empty()) return NAN;
  return std::stod(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exwalk: induced random walks on adaptively revealed lattice subgraphs"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed (u64); every Monte Carlo result is a function of it");
  app.add_option("--trials", g.trials, "Number of independent trials");
  app.add_option("--jobs", g.jobs, "Worker threads; output does not depend on it")->default_val(1);
  app.add_option("--out", g.out, "Output path, '-' for stdout")->default_val("-");
  app.add_option("--format", g.format, "Output format: csv or json")
      ->default_val("csv")
      ->check(CLI::IsMember({"csv", "json"}));

  Runner run(g, &app);
  std::function<void()> action;

  // gambler
  std::uint64_t gam_n = 10;
  auto* gam = app.add_subcommand(
      "gambler",
      "Gambler's ruin: the simple random walk on {0..n} started at 1 reaches n before 0 with "
      "probability 1/n. Monte Carlo estimate with the exact value as reference.");
  gam->add_option("--n", gam_n, "Right end of the interval")->required();
  gam->callback([&] {
    action = [&] {
      const auto rep = gambler_mc(gam_n, run.trials(100000), run.seed(gam), run.jobs());
      run.emit(gam, rep);
    };
  });

  // localtime
  std::uint64_t lt_n = 100;
  auto* lt = app.add_subcommand(
      "localtime",
      "Local time at 0: the simple random walk on Z visits 0 at most 10 sqrt(N) times in its "
      "first N steps on average. Exact value by dynamic programming, optional Monte Carlo.");
  lt->add_option("--N", lt_n, "Number of steps")->required();
  lt->callback([&] {
    action = [&] {
      ExperimentReport rep{"localtime", {}, 0.0};
      const double exact = local_time_exact(lt_n);
      ReportRow ex;
      ex.name = "localtime-exact";
      ex.param = "N=" + std::to_string(lt_n);
      ex.estimate = exact;
      ex.ci_lo = ex.ci_hi = exact;
      rep.rows.push_back(ex);
      ReportRow bound;
      bound.name = "localtime-bound";
      bound.param = ex.param;
      bound.estimate = 10.0 * std::sqrt(static_cast<double>(lt_n));
      bound.ci_lo = bound.ci_hi = *bound.estimate;
      rep.rows.push_back(bound);
      const std::uint64_t t = run.trials(0);
      if (t > 0) {
        auto mc = local_time_mc(lt_n, t, run.seed(lt), run.jobs());
        rep.rows.push_back(mc.rows.front());
      }
      run.emit(lt, rep);
    };
  });

  // greedy
  std::uint64_t gr_letters = 100000;
  auto* gr = app.add_subcommand(
      "greedy",
      "Greedy north-east path revealed at its leaves: the unrolled walk steps outward with "
      "probability 2/3 at the ends of its range and symmetrically inside it.");
  gr->add_option("--letters", gr_letters, "Letters per run")->default_val(100000);
  gr->callback([&] {
    action = [&] {
      const StreamSeed s = run.seed(gr);
      Table t;
      t.columns = {"seed", "letters", "boundary_visits", "outward", "inward", "interior_left",
                   "interior_right", "returns_to_origin"};
      const std::uint64_t n = run.trials(1);
      for (std::uint64_t i = 0; i < n; ++i) {
        const auto r = run_greedy_path(s.offset(i), gr_letters);
        const auto st = boundary_law_stats(unroll(r.path, r.transcript));
        t.add_row({s.master_seed, gr_letters, st.boundary_visits, st.outward_moves,
                   st.inward_moves, st.interior_left, st.interior_right, st.returns_to_origin});
      }
      run.emit(gr, t);
    };
  });

  // exceptional
  std::optional<int> ex_stages;
  std::optional<std::uint64_t> ex_letters;
  std::string ex_snapshot, ex_dump;
  bool ex_audit = false;
  auto* ex = app.add_subcommand(
      "exceptional",
      "Builds the exceptional subgraph for one walk: vertical lines at x = 2^n - 1, horizontal "
      "edges revealed in stages with forced rightward acceptance. Prints one row per stage.");
  ex->add_option("--stages", ex_stages, "Stop after this many completed stages");
  ex->add_option("--letters", ex_letters, "Stop after this many letters");
  ex->add_option("--snapshot", ex_snapshot, "Write the revealed edges to this file");
  ex->add_option("--dump-transcript", ex_dump, "Write the per-letter transcript CSV");
  ex->add_flag("--audit", ex_audit, "Check the structural invariants and report violations");
  ex->callback([&] {
    action = [&] {
      if (!ex_stages && !ex_letters) throw UsageError("exceptional needs --stages or --letters");
      const StreamSeed s = run.seed(ex);
      const auto r = run_exceptional(s, StopRule{ex_letters, ex_stages}, ex_audit);
      if (!ex_snapshot.empty()) write_snapshot_file(ex_snapshot, r.env.snapshot());
      if (!ex_dump.empty()) write_transcript_csv_file(ex_dump, r.transcript);
      if (ex_audit) {
        auto bad = audit_lattice(r.env.lattice, r.env.y_min - 1, r.env.y_max + 1);
        const auto more = audit_reveals(r.transcript, r.env.lattice.reveals());
        bad.insert(bad.end(), more.begin(), more.end());
        for (const auto& b : bad) std::cerr << "audit: " << b << '\n';
        if (!bad.empty()) throw InconsistentTranscript(std::to_string(bad.size()) + " audit violations");
      }
      Table t;
      t.columns = {"stage", "start_t", "end_t", "start_accepted", "end_accepted", "alpha", "seed",
                   "letters"};
      for (std::size_t i = 0; i < r.env.stage_history.size(); ++i) {
        const auto& st = r.env.stage_history[i];
        t.add_row({static_cast<std::uint64_t>(i), st.start_t, st.end_t, st.start_accepted,
                   st.end_accepted, st.alpha, s.master_seed,
                   static_cast<std::uint64_t>(r.transcript.size())});
      }
      run.emit(ex, t);
    };
  });

  // en
  int en_n = 1;
  std::uint64_t en_horizon = 100'000'000;
  std::optional<int> en_walk, en_walks;
  auto* en = app.add_subcommand(
      "en",
      "Back-crossing probability at line n: after first reaching x = 2^n - 1 the walk returns "
      "to x = 2^(n-1) - 1 before reaching x = 2^(n+1) - 1. Decays geometrically in n. With "
      "--walk, the same event for one walk of the shared multi-walk construction.");
  en->add_option("--n", en_n, "Line index (>= 1)")->required();
  en->add_option("--horizon", en_horizon, "Letters per trial before censoring")->default_val(100000000);
  en->add_option("--walk", en_walk, "Walk index i for the multi-walk event (1 <= i <= n)");
  en->add_option("--walks", en_walks, "Number of walks in the multi-walk construction (default n+1)");
  en->callback([&] {
    action = [&] {
      line_x(en_n + 1);
      const StreamSeed s = run.seed(en);
      const std::uint64_t t = run.trials(10000);
      const EnEstimate e = en_walk ? estimate_Eni(en_n, *en_walk, t, s, en_horizon, en_walks, run.jobs())
                                   : estimate_En(en_n, t, s, en_horizon, run.jobs());
      Table tab;
      tab.columns = en_columns();
      tab.add_row(en_row(e, s.master_seed, en_horizon));
      run.emit(en, tab);
    };
  });

  // en-oracle
  int eo_n = 1;
  auto* eo = app.add_subcommand(
      "en-oracle",
      "Back-crossing probability from the abstract excursion chain alone (row walk plus "
      "per-excursion x-walk), independent of the lattice construction.");
  eo->add_option("--n", eo_n, "Line index (>= 1)")->required();
  eo->callback([&] {
    action = [&] {
      const StreamSeed s = run.seed(eo);
      const auto r = excursion_chain_En(eo_n, run.trials(10000), s, run.jobs());
      ReportRow row;
      row.name = "en-oracle";
      row.param = "n=" + std::to_string(eo_n);
      row.trials = r.estimate.trials;
      row.estimate = r.estimate.p_hat;
      row.ci_lo = r.estimate.wilson_ci.lo;
      row.ci_hi = r.estimate.wilson_ci.hi;
      row.censored = r.estimate.censored;
      row.seed = s.master_seed;
      ReportRow per;
      per.name = "en-oracle-positive-per-excursion";
      per.param = row.param;
      per.trials = r.excursions;
      if (r.excursions > 0) per.estimate = static_cast<double>(r.positive) / static_cast<double>(r.excursions);
      const Interval ci = wilson_interval(r.positive, r.excursions);
      per.ci_lo = ci.lo;
      per.ci_hi = ci.hi;
      per.seed = s.master_seed;
      run.emit(eo, ExperimentReport{"en-oracle", {row, per}, 0.0});
    };
  });

  // teleport
  int tp_n = 2;
  auto* tp = app.add_subcommand(
      "teleport",
      "Teleporting excursion chain run for 3^n excursions: frequency of no positive success "
      "(F1 fails) and of some negative success (F2 fails). Their sum bounds the back-crossing "
      "probability.");
  tp->add_option("--n", tp_n, "Line index (1..8)")->required();
  tp->callback([&] {
    action = [&] {
      const StreamSeed s = run.seed(tp);
      const auto r = teleport_F1F2(tp_n, run.trials(10000), s, run.jobs());
      ExperimentReport rep{"teleport", {}, 0.0};
      auto add = [&](const char* name, std::uint64_t fails, const Interval& ci) {
        ReportRow row;
        row.name = name;
        row.param = "n=" + std::to_string(tp_n);
        row.trials = r.trials;
        if (r.trials > 0) row.estimate = static_cast<double>(fails) / static_cast<double>(r.trials);
        row.ci_lo = ci.lo;
        row.ci_hi = ci.hi;
        row.seed = s.master_seed;
        rep.rows.push_back(row);
      };
      if (r.trials > 0) {
        add("teleport-F1c", r.f1_fail, r.f1_ci);
        add("teleport-F2c", r.f2_fail, r.f2_ci);
      }
      run.emit(tp, rep);
    };
  });

  // multi
  int mw_walks = 3, mw_phases = 4;
  std::optional<std::uint64_t> mw_letters;
  std::string mw_snapshot;
  auto* mw = app.add_subcommand(
      "multi",
      "One shared exceptional subgraph for several walks: a new walk joins in each phase and "
      "all active walks advance in round-robin until each reaches the next line. Prints "
      "phase,walk,entry_t,freeze_t.");
  mw->add_option("--walks", mw_walks, "Number of walks k")->default_val(3);
  mw->add_option("--phases", mw_phases, "Number of phases")->default_val(4);
  mw->add_option("--letters", mw_letters, "Cap on total letters");
  mw->add_option("--snapshot", mw_snapshot, "Write the revealed edges to this file");
  mw->callback([&] {
    action = [&] {
      const StreamSeed s = run.seed(mw);
      MultiStop stop;
      stop.max_phase = mw_phases;
      stop.max_letters = mw_letters;
      const auto r = run_multiwalk(s, mw_walks, stop, false);
      if (r.aborted) throw CapExceeded(r.abort_reason);
      if (!mw_snapshot.empty()) write_snapshot_file(mw_snapshot, r.snapshot());
      Table t;
      t.columns = {"phase", "walk", "entry_t", "freeze_t"};
      for (const auto& row : r.phase_log) {
        t.add_row({static_cast<std::int64_t>(row.phase), static_cast<std::int64_t>(row.walk),
                   row.entry_t, row.freeze_t});
      }
      run.emit(mw, t);
    };
  });

  // branching
  int br_d = 2;
  double br_eps = 0.5;
  std::uint64_t br_horizon = 20, br_cap = 100000;
  std::optional<int> br_gw;
  auto* br = app.add_subcommand(
      "branching",
      "Branching random walk with the reduced offspring law (the parent persists and gains one "
      "child with probability eps) on the full lattice Z^d. Prints the population per step. "
      "With --gw J, estimates the Galton-Watson mean of N_J / (1 + eps)^J over --trials runs.");
  br->add_option("--d", br_d, "Dimension")->default_val(2);
  br->add_option("--eps", br_eps, "Extra-child probability")->default_val(0.5);
  br->add_option("--horizon", br_horizon, "Steps")->default_val(20);
  br->add_option("--cap", br_cap, "Particle cap")->default_val(100000);
  br->add_option("--gw", br_gw, "Galton-Watson generation J");
  br->callback([&] {
    action = [&] {
      const StreamSeed s = run.seed(br);
      const auto law = OffspringLaw::reduced(br_eps);
      if (br_gw) {
        MeanAccumulator acc;
        const std::uint64_t n = run.trials(10000);
        const double scale = std::pow(1.0 + br_eps, *br_gw);
        for (std::uint64_t i = 0; i < n; ++i) {
          const auto tr = gw_population(*br_gw, law, s.offset(i), br_cap);
          if (tr.capped) throw CapExceeded("population cap reached in trial " + std::to_string(i));
          acc.add(static_cast<double>(tr.n.back()) / scale);
        }
        ReportRow row;
        row.name = "gw-normalized-mean";
        row.param = "eps=" + format_double(br_eps) + ";j=" + std::to_string(*br_gw);
        row.trials = n;
        row.estimate = acc.mean();
        const Interval ci = acc.normal_interval();
        row.ci_lo = ci.lo;
        row.ci_hi = ci.hi;
        row.seed = s.master_seed;
        if (acc.std_error() > 0) row.z = (acc.mean() - 1.0) / acc.std_error();
        run.emit(br, ExperimentReport{"gw", {row}, 0.0});
        return;
      }
      SubgraphOracle full(FullLattice{br_d});
      const auto tree = run_branching(s, br_d, law, br_horizon, br_cap, full, false);
      Table t;
      t.columns = {"t", "population", "truncated"};
      for (std::size_t j = 0; j < tree.population.size(); ++j) {
        t.add_row({static_cast<std::uint64_t>(j), tree.population[j],
                   static_cast<std::int64_t>(tree.truncated ? 1 : 0)});
      }
      run.emit(br, t);
    };
  });

  // tinybox
  double tb_eps = 0.5;
  std::uint64_t tb_horizon = 10000, tb_cap = 100000;
  std::uint32_t tb_r = 3;
  std::optional<std::uint64_t> tb_id;
  auto* tb = app.add_subcommand(
      "tinybox",
      "Recurrence certificates for every spanning subgraph of the 3x3 box around the origin: "
      "some branch of the branching walk visits each site reachable from the origin at least "
      "r times. One row per subgraph; --id reruns a single subgraph.");
  tb->add_option("--eps", tb_eps, "Extra-child probability")->default_val(0.5);
  tb->add_option("--horizon", tb_horizon, "Steps")->default_val(10000);
  tb->add_option("--r", tb_r, "Required visits per site")->default_val(3);
  tb->add_option("--cap", tb_cap, "Particle cap (births beyond it are suppressed)")->default_val(100000);
  tb->add_option("--id", tb_id, "Only this subgraph id");
  tb->callback([&] {
    action = [&] {
      const StreamSeed s = run.seed(tb);
      const auto law = OffspringLaw::reduced(tb_eps);
      std::vector<TinyBoxRow> rows;
      if (tb_id) {
        TinyBoxRow row;
        row.subgraph_id = row.edges_bitmask = *tb_id;
        row.seed = s.offset(*tb_id);
        row.cert = certify_streaming(box_subgraph(1, *tb_id), row.seed, law, tb_horizon, tb_r, tb_cap);
        rows.push_back(row);
      } else {
        rows = tiny_box_sweep(law, tb_horizon, tb_r, s, tb_cap, run.jobs());
      }
      Table t;
      t.columns = {"subgraph_id", "edges_bitmask", "reachable", "certified", "witness", "horizon"};
      for (const auto& r : rows) {
        t.add_row({r.subgraph_id, r.edges_bitmask, r.cert.reachable,
                   static_cast<std::int64_t>(r.cert.certified ? 1 : 0),
                   r.cert.witness ? Cell{static_cast<std::uint64_t>(*r.cert.witness)} : Cell{},
                   r.cert.horizon});
      }
      run.emit(tb, t);
    };
  });

  // carne
  std::string ca_graph = "path:9", ca_walk = "simple";
  std::uint64_t ca_tmax = 50;
  auto* ca = app.add_subcommand(
      "carne",
      "Carne-Varopoulos bound p_t(x,y) <= 2 sqrt(deg y / deg x) exp(-rho^2 / 2t) checked "
      "against exact transition probabilities for every connected pair and every t <= tmax.");
  ca->add_option("--graph", ca_graph, "path:N, grid:K or comb:W:H")->default_val("path:9");
  ca->add_option("--tmax", ca_tmax, "Largest t")->default_val(50);
  ca->add_option("--walk", ca_walk, "simple or induced")
      ->default_val("simple")
      ->check(CLI::IsMember({"simple", "induced"}));
  ca->callback([&] {
    action = [&] {
      const ExplicitFinite graph = parse_graph_spec(ca_graph);
      const WalkKind kind = ca_walk == "simple" ? WalkKind::Simple : WalkKind::Induced;
      const Box& box = graph.box();
      std::uint64_t checks = 0, violations = 0;
      double worst = 0.0;
      for (std::size_t i = 0; i < box.site_count(); ++i) {
        const Site x = box.site_at(i);
        if (graph.degree(x) == 0) continue;
        const auto dp = transition_dp_all(graph, x, ca_tmax, kind);
        for (std::size_t j = 0; j < box.site_count(); ++j) {
          const Site y = box.site_at(j);
          if (graph.degree(y) == 0) continue;
          for (std::uint64_t t = 1; t <= ca_tmax; ++t) {
            double bound;
            try {
              bound = carne_bound(graph, x, y, t);
            } catch (const DisconnectedPair&) {
              break;
            }
            ++checks;
            const double p = dp[t][j];
            if (p > bound) ++violations;
            if (bound > 0) worst = std::max(worst, p / bound);
          }
        }
      }
      Table tab;
      tab.columns = {"graph", "walk", "sites", "tmax", "checks", "violations", "max_ratio"};
      tab.add_row({ca_graph, ca_walk, static_cast<std::uint64_t>(box.site_count()), ca_tmax, checks,
                   violations, worst});
      run.emit(ca, tab);
    };
  });

  // chernoff
  int ch_n = 100;
  double ch_p = 0.5, ch_eps = 0.2;
  auto* ch = app.add_subcommand(
      "chernoff",
      "Chernoff lower-tail bound P(Bin(n,p) <= np(1-eps)) <= exp(-eps^2 np / 2), with the exact "
      "binomial tail alongside.");
  ch->add_option("--n", ch_n, "Trials n")->default_val(100);
  ch->add_option("--p", ch_p, "Success probability")->default_val(0.5);
  ch->add_option("--eps", ch_eps, "Relative deviation")->default_val(0.2);
  ch->callback([&] {
    action = [&] {
      const double bound = chernoff_bound(ch_n, ch_p, ch_eps);
      const double exact = binomial_lower_tail(ch_n, ch_p, ch_n * ch_p * (1.0 - ch_eps));
      Table t;
      t.columns = {"n", "p", "eps", "bound", "exact_tail"};
      t.add_row({static_cast<std::int64_t>(ch_n), ch_p, ch_eps, bound, exact});
      run.emit(ch, t);
    };
  });

  // displacement
  std::string dp_graph = "full";
  int dp_d = 2, dp_n = 200;
  double dp_delta = 0.5;
  auto* dsp = app.add_subcommand(
      "displacement",
      "Displacement tail of an n-step walk on a subgraph: the chance of ending farther than "
      "delta n in graph distance is at most sqrt(8d) (2n+1)^d exp(-delta^2 n / 2).");
  dsp->add_option("--graph", dp_graph, "full, path:N, grid:K or comb:W:H")->default_val("full");
  dsp->add_option("--d", dp_d, "Dimension for the full lattice")->default_val(2);
  dsp->add_option("--n", dp_n, "Steps")->default_val(200);
  dsp->add_option("--delta", dp_delta, "Radius fraction delta")->default_val(0.5);
  dsp->callback([&] {
    action = [&] {
      const StreamSeed s = run.seed(dsp);
      std::optional<SubgraphOracle> oracle;
      if (dp_graph == "full") {
        oracle.emplace(FullLattice{dp_d});
      } else {
        oracle.emplace(parse_graph_spec(dp_graph));
      }
      const auto r = displacement_tail_check(*oracle, dp_delta, dp_n, run.trials(100000), s, run.jobs());
      Table t;
      t.columns = {"graph", "d", "delta", "n", "trials", "exceed", "empirical", "bound", "seed"};
      t.add_row({dp_graph, static_cast<std::int64_t>(oracle->dim()), dp_delta,
                 static_cast<std::int64_t>(dp_n), r.trials, r.exceed, r.empirical, r.bound,
                 s.master_seed});
      run.emit(dsp, t);
    };
  });

  // fit
  std::string fit_in, fit_name;
  auto* ft = app.add_subcommand(
      "fit",
      "Geometric decay fit: weighted least squares of log p_hat against n over the rows of an "
      "'en' CSV (or report rows with param n=K).");
  ft->add_option("--in", fit_in, "Input CSV")->required();
  ft->add_option("--name", fit_name,
                 "Report rows: fit only rows with this name (default: the first row's name)");
  ft->callback([&] {
    action = [&] {
      std::ifstream in(fit_in);
      if (!in) throw IoError("cannot open " + fit_in);
      const Table t = read_csv(in);
      std::vector<EnEstimate> ests;
      const auto c_n = find_column(t, "n"), c_p = find_column(t, "p_hat");
      const auto c_param = find_column(t, "param"), c_est = find_column(t, "estimate");
      const auto c_lo = find_column(t, "ci_lo"), c_hi = find_column(t, "ci_hi");
      const auto c_tr = find_column(t, "trials"), c_cen = find_column(t, "censored");
      const auto c_name = find_column(t, "name");
      std::string series = fit_name;
      if (!c_lo || !c_hi) throw FormatError("input lacks ci_lo/ci_hi columns");
      for (const auto& row : t.rows) {
        EnEstimate e;
        std::string ns, ps;
        if (c_n && c_p) {
          ns = cell_string(row[*c_n]);
          ps = cell_string(row[*c_p]);
        } else if (c_param && c_est) {
          const std::string param = cell_string(row[*c_param]);
          if (param.rfind("n=", 0) != 0) continue;
          if (c_name) {
            const std::string name = cell_string(row[*c_name]);
            if (series.empty()) series = name;
            if (name != series) continue;
          }
          ns = param.substr(2);
          ps = cell_string(row[*c_est]);
        } else {
          throw FormatError("input has neither n,p_hat nor param,estimate columns");
        }
        try {
          e.n = std::stoi(ns);
          const double p = parse_double(ps);
          if (!std::isnan(p)) e.p_hat = p;
          e.wilson_ci = {parse_double(cell_string(row[*c_lo])), parse_double(cell_string(row[*c_hi]))};
          e.trials = c_tr ? std::stoull(cell_string(row[*c_tr])) : 1;
          e.censored = c_cen ? std::stoull(cell_string(row[*c_cen])) : 0;
        } catch (const std::logic_error&) {
          throw FormatError("malformed numeric field in " + fit_in);
        }
        ests.push_back(e);
      }
      const DecayFit f = decay_fit(ests);
      ReportRow row;
      row.name = "decay-fit-slope";
      row.param = "points=" + std::to_string(f.xs.size());
      row.trials = f.xs.size();
      row.estimate = f.slope;
      row.ci_lo = f.slope_ci.lo;
      row.ci_hi = f.slope_ci.hi;
      ReportRow rate;
      rate.name = "decay-fit-rate";
      rate.param = row.param;
      rate.trials = f.xs.size();
      rate.estimate = std::exp(f.slope);
      rate.ci_lo = std::exp(f.slope_ci.lo);
      rate.ci_hi = std::exp(f.slope_ci.hi);
      run.emit(ft, ExperimentReport{"fit", {row, rate}, 0.0});
    };
  });

  // escape
  std::uint64_t es_letters = 1000000;
  std::string es_walk = "free";
  int es_stages = 8;
  auto* es = app.add_subcommand(
      "escape",
      "Escape exponent: slope of log(1 + max distance) against log(1 + t). The free walk is "
      "diffusive (about 1/2); for the exceptional walk the value is exploratory.");
  es->add_option("--letters", es_letters, "Letters per walk (cap for the exceptional walk)")
      ->default_val(1000000);
  es->add_option("--walk", es_walk, "free or exceptional")
      ->default_val("free")
      ->check(CLI::IsMember({"free", "exceptional"}));
  es->add_option("--stages", es_stages, "Stages for the exceptional walk")->default_val(8);
  es->callback([&] {
    action = [&] {
      const StreamSeed s = run.seed(es);
      const std::uint64_t n = run.trials(1);
      MeanAccumulator acc;
      Interval single;
      for (std::uint64_t i = 0; i < n; ++i) {
        WalkTranscript tr;
        if (es_walk == "free") {
          LetterStream stream(s.offset(i), 2);
          SubgraphOracle full(FullLattice{2});
          tr = run_induced(stream, full, es_letters);
        } else {
          tr = run_exceptional(s.offset(i), StopRule{es_letters, es_stages}).transcript;
        }
        const auto fit = escape_exponent(tr);
        acc.add(fit.alpha);
        single = fit.ci;
      }
      ReportRow row;
      row.name = "escape-" + es_walk;
      row.param = "letters=" + std::to_string(es_letters);
      row.trials = n;
      row.estimate = acc.mean();
      // one walk: the regression interval of its own fit
      const Interval ci = n > 1 ? acc.normal_interval() : single;
      row.ci_lo = ci.lo;
      row.ci_hi = ci.hi;
      row.seed = s.master_seed;
      run.emit(es, ExperimentReport{"escape", {row}, 0.0});
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (action) action();
  } catch (const UsageError& e) {
    nlohmann::json j{{"error", e.kind()}, {"message", e.what()}};
    std::cerr << j.dump() << '\n';
    return 1;
  } catch (const Error& e) {
    nlohmann::json j{{"error", e.kind()}, {"message", e.what()}};
    std::cerr << j.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    nlohmann::json j{{"error", "internal"}, {"message", e.what()}};
    std::cerr << j.dump() << '\n';
    return 2;
  }
  return 0;
}
