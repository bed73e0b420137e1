// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "aqite/config.hpp"
#include "aqite/dense.hpp"
#include "aqite/diagnostics.hpp"
#include "aqite/generator.hpp"
#include "aqite/oracle.hpp"
#include "aqite/runner.hpp"

namespace fs = std::filesystem;
using namespace aqite;

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

ExperimentSpec make_spec(int length, GeneratorVariant v, double eps,
                         double tau_max, int width = kUnboundedWidth) {
  ExperimentSpec s;
  s.model.length = length;
  s.variant = v;
  s.epsilon = eps;
  s.tau_max = tau_max;
  s.schedule = WidthSchedule::constant(width);
  return s;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw ") + e.what()};
  }
  failures += !o.pass;
  std::printf("%s [%2d] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id,
              title.c_str(), o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

// Shared state for the cross-run criteria 4 and 9.
struct RunLedger {
  double max_parity = 0.0;  // largest commutator coefficient with X...X
  int parity_runs = 0;
  bool locality_ok = true;
  int truncated_runs = 0;
  int max_excess = 0;

  void note_parity(const RunResult& r) {
    max_parity = std::max(max_parity, 2.0 * r.extras.max_parity_violation);
    ++parity_runs;
  }
  void note_locality(const RunResult& r) {
    locality_ok = locality_ok && r.extras.locality_ok;
    max_excess = std::max(max_excess, r.extras.max_locality_excess);
    ++truncated_runs;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  RunLedger ledger;

  // 1. Naive generator, L=8: min I_inf falls with eps and reaches 1e-2.
  report(1, "naive L=8 step-size convergence", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> mins;
    std::string detail;
    for (const double eps : {0.2, 0.1, 0.05, 0.025}) {
      const RunResult r =
          run_experiment(make_spec(8, GeneratorVariant::naive(), eps, 3.0));
      ledger.note_parity(r);
      mins.push_back(r.summary.min_i_inf);
      detail += "eps " + sci(eps) + ": " + sci(r.summary.min_i_inf) + "; ";
    }
    const double elapsed = seconds_since(t0);
    bool monotone = true;
    for (std::size_t k = 1; k < mins.size(); ++k) monotone &= mins[k] < mins[k - 1];
    const bool floor = mins.back() <= 1e-2;
    const bool fast = elapsed < 120.0;
    detail += std::string("monotone ") + (monotone ? "yes" : "no") +
              ", min at eps 0.025 <= 1e-2 " + (floor ? "yes" : "no") +
              ", runtime " + sci(elapsed) + "s < 120s";
    return Outcome{monotone && floor && fast, detail};
  });

  // 2. Per-term, untruncated: tau_c in [1.4, 2.2] for L = 6..12.
  report(2, "per_term tau_c stability over L", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (const int L : {6, 8, 10, 12}) {
      const RunResult r =
          run_experiment(make_spec(L, GeneratorVariant::per_term(), 0.05, 3.0));
      ledger.note_parity(r);
      const double tc = r.summary.tau_c;
      const bool in = tc >= 1.4 - 1e-9 && tc <= 2.2 + 1e-9;
      ok = ok && in;
      detail += "L=" + std::to_string(L) + " tau_c " + sci(tc) +
                (r.summary.no_turnover ? " (no turnover)" : "") + " min " +
                sci(r.summary.min_i_inf) + "; ";
    }
    const double elapsed = seconds_since(t0);
    detail += "runtime " + sci(elapsed) + "s < 1200s";
    return Outcome{ok && elapsed < 1200.0, detail};
  });

  // 3. Width 5, L=8: the minimum stops improving with eps.
  report(3, "w=5 locality floor", [&] {
    const RunResult a =
        run_experiment(make_spec(8, GeneratorVariant::per_term(), 0.05, 3.0, 5));
    const RunResult b =
        run_experiment(make_spec(8, GeneratorVariant::per_term(), 0.025, 3.0, 5));
    for (const auto* r : {&a, &b}) {
      ledger.note_parity(*r);
      ledger.note_locality(*r);
    }
    const double m05 = a.summary.min_i_inf;
    const double m025 = b.summary.min_i_inf;
    const double ratio = m025 / m05;
    const bool ok = ratio >= 0.5 && ratio <= 2.0 && m05 <= 5e-2 && m025 <= 5e-2;
    return Outcome{ok, "min I_inf eps 0.05: " + sci(m05) + ", eps 0.025: " +
                           sci(m025) + ", ratio " + sci(ratio) +
                           " in [0.5, 2], both <= 5e-2"};
  });

  // Further truncated runs feeding criterion 4: constant widths 3 and 7, a
  // growing schedule, and the gauged run of criterion 10 (recorded there).
  for (const auto& sched :
       {WidthSchedule::constant(3), WidthSchedule::constant(7),
        WidthSchedule({{0.0, 3}, {0.6, 5}, {2.6, 7}})}) {
    ExperimentSpec s = make_spec(8, GeneratorVariant::per_term(), 0.05, 3.0);
    s.schedule = sched;
    ledger.note_locality(run_experiment(s));
  }
  RunResult gauged;
  std::string gauged_error;
  try {
    gauged = run_experiment(
        make_spec(8, GeneratorVariant::gauged(2.0, 0.5), 0.05, 3.0, 5));
    ledger.note_locality(gauged);
  } catch (const std::exception& e) {
    gauged_error = e.what();
  }

  // 4. Strict w-locality over every truncated run.
  report(4, "strict w-locality", [&] {
    return Outcome{ledger.locality_ok && ledger.truncated_runs >= 6,
                   std::to_string(ledger.truncated_runs) +
                       " truncated runs, largest support excess over w " +
                       std::to_string(ledger.max_excess) + " (must be 0)"};
  });

  // 5. Naive, L=4, eps=0.01, tau <= 0.5: excited levels follow the
  // quadrature formula and E0 stays at zero.
  report(5, "eigenvalue flow of the naive generator", [&] {
    const ExperimentSpec s = make_spec(4, GeneratorVariant::naive(), 0.01, 0.5);
    std::vector<SpectralSnapshot> traj;
    evolve(s, [&](const Propagator& p) {
      traj.push_back({p.tau(), eig_hermitian(to_dense(p.state().total()))});
    });
    const DenseOperator h = to_dense(total_operator(build_xxz(s.model)));
    const EigenvalueFlowReport rep = verify_eigenvalue_flow(traj, h, 3, 0.7);
    bool flow_ok = true;
    int tracked = 0;
    std::string detail;
    for (const auto& lv : rep.levels) {
      detail += "level " + std::to_string(lv.level) + ": " +
                (lv.tracked ? "max rel err " + sci(lv.max_rel_error) : "untracked") +
                "; ";
      if (!lv.tracked) continue;
      ++tracked;
      flow_ok = flow_ok && lv.max_rel_error < 0.02;
    }
    const bool e0_ok = rep.max_e0_rel < 1e-8;
    detail += "max |E0|/norm " + sci(rep.max_e0_rel) + " (< 1e-8)";
    return Outcome{flow_ok && tracked > 0 && e0_ok, detail};
  });

  // 6. Per-term, untruncated, L=4: the per-term right-hand side agrees with
  // H~H + HH~ on the exact imaginary-time state.
  report(6, "trajectory-condition residual", [&] {
    const ExperimentSpec s = make_spec(4, GeneratorVariant::per_term(), 0.05, 0.5);
    const auto model = build_xxz(s.model);
    const PauliSum h = total_operator(model);
    const DenseOperator hd = to_dense(h);
    const Eigen::VectorXcd psi0 = initial_state(4);
    double worst = 0.0;
    std::string detail;
    evolve(s, [&](const Propagator& p) {
      const double tau = p.tau();
      if (std::abs(tau) > 1e-9 && std::abs(tau - 0.25) > 1e-9 &&
          std::abs(tau - 0.5) > 1e-9) {
        return;
      }
      const AdiabaticState st = p.state();
      PauliSum d(4);
      for (const auto& t : st.terms) d = d + rhs_per_term(t, model, kUnboundedWidth);
      d = d - rhs_naive(st.total(), h);
      const double res =
          (to_dense(d).entries * imaginary_time_state(hd, psi0, tau)).norm();
      worst = std::max(worst, res);
      detail += "tau " + sci(tau) + ": " + sci(res) + "; ";
    });
    return Outcome{worst < 1e-8, detail + "limit 1e-8"};
  });

  // 7. Per-term, L=4: max_beta |h~_beta(0.5) Psi(0.5)| shrinks by >= 1.5x
  // per halving of eps.
  report(7, "annihilation-condition scaling", [&] {
    const DenseOperator hd = to_dense(total_operator(build_xxz({4, 2.0})));
    const Eigen::VectorXcd psi = imaginary_time_state(hd, initial_state(4), 0.5);
    std::vector<double> vals;
    std::string detail;
    for (const double eps : {0.1, 0.05, 0.025}) {
      const ExperimentSpec s = make_spec(4, GeneratorVariant::per_term(), eps, 0.5);
      Propagator p(s);
      for (long k = 0; k < s.n_steps(); ++k) p.step();
      double worst = 0.0;
      for (const auto& t : p.state().terms) {
        worst = std::max(worst, (to_dense(t.op).entries * psi).norm());
      }
      vals.push_back(worst);
      detail += "eps " + sci(eps) + ": " + sci(worst) + "; ";
    }
    bool ok = true;
    for (std::size_t k = 1; k < vals.size(); ++k) {
      const double ratio = vals[k - 1] / vals[k];
      ok = ok && ratio >= 1.5;
      detail += "ratio " + sci(ratio) + " ";
    }
    return Outcome{ok, detail + "(>= 1.5)"};
  });

  // 8. Algebra against dense matrices.
  report(8, "algebra oracle equivalence", [&] {
    const double err = oracle::algebra_max_error(20240607, 500, 4);
    return Outcome{err < 1e-12, "500 random pairs, max entry error " + sci(err) +
                                    " (< 1e-12)"};
  });

  // 9. Parity symmetry at every snapshot of the runs of criteria 1-3.
  report(9, "parity conservation", [&] {
    return Outcome{ledger.max_parity < 1e-10 && ledger.parity_runs == 10,
                   std::to_string(ledger.parity_runs) +
                       " runs, max commutator coefficient with X..X " +
                       sci(ledger.max_parity) + " (< 1e-10)"};
  });

  // 10. Gauged variant u1=2, u2=0.5, w=5, eps=0.05, L=8.
  report(10, "gauged variant", [&] {
    if (!gauged_error.empty()) return Outcome{false, "diverged: " + gauged_error};
    const TrajectorySummary& s = gauged.summary;
    const RunResult base =
        run_experiment(make_spec(8, GeneratorVariant::per_term(), 0.05, 3.0, 5));
    const bool ok = s.min_i_inf <= 1e-2;
    return Outcome{ok, "min I_inf " + sci(s.min_i_inf) + " at tau " + sci(s.tau_c) +
                           " (<= 1e-2 before turnover); ungauged w=5 min " +
                           sci(base.summary.min_i_inf) + " at tau " +
                           sci(base.summary.tau_c) + "; adiabatic cost gauged " +
                           sci(s.adiabatic_cost) + " vs ungauged " +
                           sci(base.summary.adiabatic_cost)};
  });

  // 11. Byte-identical CSV across repeats and sweep parallelism.
  report(11, "determinism", [&] {
    const fs::path root = fs::temp_directory_path() /
                          ("aqite_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const ExperimentSpec single = make_spec(8, GeneratorVariant::per_term(), 0.05, 3.0);
    const std::string a = records_csv(run_experiment(single).records);
    const std::string b = records_csv(run_experiment(single).records);
    const Config cfg = Config::parse(
        "model.L = 6\n"
        "integrator.tau_max = 2\n"
        "truncation.w = 3\n"
        "sweep.integrator.epsilon = [0.1, 0.05]\n"
        "sweep.generator.variant+generator.u1+generator.u2 = "
        "[[\"per_term\", 0, 0], [\"gauged\", 2, 0.5], [\"gauged\", 0.5, 2], "
        "[\"per_term\", 0, 0]]\n",
        "<determinism sweep>");
    const SweepSpec sweep = sweep_from_config(cfg);
    const SweepOutcome s1 = run_sweep(sweep, 1, root / "jobs1");
    const SweepOutcome s8 = run_sweep(sweep, 8, root / "jobs8");
    int differing = 0;
    const std::size_t n = sweep.expand().size();
    for (const auto& p : s1.index["points"]) {
      const std::string dir = p["dir"];
      differing += slurp(root / "jobs1" / dir / "records.csv") !=
                   slurp(root / "jobs8" / dir / "records.csv");
    }
    fs::remove_all(root);
    const bool ok = a == b && !a.empty() && s1.all_ok && s8.all_ok && differing == 0;
    return Outcome{ok, std::string("repeat run ") + (a == b ? "identical" : "differs") +
                           ", sweep " + std::to_string(n) +
                           " points jobs 1 vs 8: " + std::to_string(differing) +
                           " differing CSVs"};
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
