#include "aqite/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

#include "aqite/dense.hpp"
#include "aqite/errors.hpp"
#include "aqite/generator.hpp"
#include "aqite/model.hpp"
#include "aqite/oracle.hpp"
#include "aqite/runner.hpp"

namespace aqite {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

CheckResult guarded(const std::string& name,
                    const std::function<CheckResult()>& body) {
  try {
    CheckResult r = body();
    r.name = name;
    return r;
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

CheckResult below(double value, double limit) {
  return {"", value < limit, "max " + sci(value) + " (limit " + sci(limit) + ")"};
}

ExperimentSpec small_spec(int length, GeneratorVariant v, double eps,
                          double tau_max) {
  ExperimentSpec s;
  s.model.length = length;
  s.variant = v;
  s.epsilon = eps;
  s.tau_max = tau_max;
  return s;
}

const TrajectoryRecord* at_tau(const std::vector<TrajectoryRecord>& rs,
                               double tau) {
  for (const auto& r : rs) {
    if (std::abs(r.tau - tau) < 1e-9) return &r;
  }
  return nullptr;
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(int max_length) {
  if (max_length < 4) throw ConfigError("verify needs max_length >= 4");
  const int L = std::min(max_length, 6);
  std::vector<CheckResult> out;

  out.push_back(guarded("mul_strings matches Kronecker products", [] {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    std::vector<std::pair<PauliString, PauliString>> cases;
    for (const char a : std::string("IXYZ")) {
      for (const char b : std::string("IXYZ")) {
        cases.emplace_back(PauliString::from_word(std::string(1, a)),
                           PauliString::from_word(std::string(1, b)));
      }
    }
    for (int k = 0; k < 200; ++k) {
      cases.emplace_back(oracle::random_string(rng, 4),
                         oracle::random_string(rng, 4));
    }
    for (const auto& [p, q] : cases) {
      const PhasedString r = mul_strings(p, q);
      worst = std::max(worst,
                       oracle::max_diff(r.phase.value() * oracle::kron_matrix(r.string),
                                        oracle::kron_matrix(p) * oracle::kron_matrix(q)));
    }
    return below(worst, 1e-12);
  }));

  out.push_back(guarded("commutes_strings agrees with dense commutators", [] {
    std::mt19937_64 rng(11);
    int mismatches = 0;
    for (int k = 0; k < 300; ++k) {
      const PauliString p = oracle::random_string(rng, 3);
      const PauliString q = oracle::random_string(rng, 3);
      const auto mp = oracle::kron_matrix(p);
      const auto mq = oracle::kron_matrix(q);
      const bool dense = (mp * mq - mq * mp).cwiseAbs().maxCoeff() < 1e-12;
      mismatches += dense != commutes_strings(p, q);
    }
    return CheckResult{"", mismatches == 0,
                       std::to_string(mismatches) + " mismatches in 300 pairs"};
  }));

  out.push_back(guarded("algebra matches dense arithmetic", [] {
    return below(oracle::algebra_max_error(2024, 200, 4), 1e-12);
  }));

  out.push_back(guarded("anticommutators of Hermitian sums are Hermitian", [] {
    std::mt19937_64 rng(13);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const PauliSum a = oracle::random_sum(rng, 4, 8, true);
      const PauliSum b = oracle::random_sum(rng, 4, 8, true);
      worst = std::max({worst, hermiticity_residual(anticommutator(a, b)),
                        hermiticity_residual(modified_anticommutator(a, b))});
    }
    return below(worst, 1e-12);
  }));

  out.push_back(guarded("H~(0) annihilates the initial state", [L] {
    double worst = 0.0;
    for (int n = 2; n <= L; ++n) {
      const auto h0 = to_dense(total_operator(build_initial_adiabatic(n)));
      worst = std::max(worst, (h0.entries * initial_state(n)).norm());
    }
    return below(worst, 1e-14);
  }));

  out.push_back(guarded("parity commutes with H and H~(0)", [L] {
    double worst = 0.0;
    for (int n = 2; n <= L; ++n) {
      const PauliSum p = parity_operator(n);
      const PauliSum h = total_operator(build_xxz({n, 2.0}));
      const PauliSum h0 = total_operator(build_initial_adiabatic(n));
      worst = std::max({worst, commutator(p, h).max_abs_coefficient(),
                        commutator(p, h0).max_abs_coefficient()});
    }
    return below(worst, 1e-12);
  }));

  out.push_back(guarded("two-site XXZ ground energy is -1", [] {
    const auto d = to_dense(total_operator(build_xxz({2, 2.0})));
    const double e0 = eig_hermitian(d).eigenvalues(0);
    return below(std::abs(e0 + 1.0), 1e-12);
  }));

  out.push_back(guarded("block propagator matches the PauliSum reference", [] {
    double worst = 0.0;
    const std::vector<std::pair<GeneratorVariant, int>> cases = {
        {GeneratorVariant::naive(), kUnboundedWidth},
        {GeneratorVariant::per_term(), kUnboundedWidth},
        {GeneratorVariant::per_term(), 3},
        {GeneratorVariant::gauged(2.0, 0.5), 3}};
    for (const auto& [variant, width] : cases) {
      ExperimentSpec s = small_spec(4, variant, 0.05, 0.25);
      s.schedule = WidthSchedule::constant(width);
      Propagator prop(s);
      AdiabaticState ref =
          initial_adiabatic_state(4, variant, s.schedule);
      const auto model = build_xxz(s.model);
      for (long k = 0; k < s.n_steps(); ++k) {
        prop.step();
        ref = sweep_step(ref, model, s.epsilon);
      }
      worst = std::max(worst, sum_combine(prop.state().total(), 1.0,
                                          ref.total(), -1.0, 0.0)
                                  .max_abs_coefficient());
    }
    return below(worst, 1e-10);
  }));

  out.push_back(guarded("parity is conserved along trajectories", [L] {
    double worst = 0.0;
    for (const auto& v : {GeneratorVariant::naive(), GeneratorVariant::per_term(),
                          GeneratorVariant::gauged(2.0, 0.5)}) {
      ExperimentSpec s = small_spec(L, v, 0.05, 3.0);
      if (v.kind == GeneratorKind::kGauged) s.schedule = WidthSchedule::constant(3);
      worst = std::max(worst, run_experiment(s).extras.max_parity_violation);
    }
    return below(worst, 1e-10);
  }));

  out.push_back(guarded("terms stay inside their w-blocks", [L] {
    ExperimentSpec s = small_spec(L, GeneratorVariant::per_term(), 0.05, 2.0);
    s.schedule = WidthSchedule({{0.0, 1}, {0.5, 3}});
    const RunResult r = run_experiment(s);
    return CheckResult{"", r.extras.locality_ok,
                       "largest excess " +
                           std::to_string(r.extras.max_locality_excess)};
  }));

  out.push_back(guarded("ground energy of H~ stays zero through tau_c", [L] {
    double worst = 0.0;
    for (const auto& v :
         {GeneratorVariant::naive(), GeneratorVariant::per_term()}) {
      const RunResult r = run_experiment(small_spec(L, v, 0.05, 3.0));
      for (const auto& rec : r.records) {
        if (rec.tau > r.summary.tau_c + 1e-9) break;
        worst = std::max(worst, rec.e0_residual / rec.norm);
      }
    }
    return below(worst, 1e-6);
  }));

  out.push_back(guarded("i_tau decreases when eps is halved", [L] {
    const auto coarse = run_experiment(
        small_spec(L, GeneratorVariant::per_term(), 0.05, 1.5)).records;
    const auto fine = run_experiment(
        small_spec(L, GeneratorVariant::per_term(), 0.025, 1.5)).records;
    std::string detail;
    bool ok = true;
    for (const double t : {0.5, 1.0, 1.5}) {
      const auto* a = at_tau(coarse, t);
      const auto* b = at_tau(fine, t);
      if (a == nullptr || b == nullptr) return CheckResult{"", false, "missing sample"};
      ok = ok && b->i_tau < a->i_tau;
      detail += (detail.empty() ? "" : ", ") + std::string("tau ") + sci(t) +
                ": " + sci(a->i_tau) + " -> " + sci(b->i_tau);
    }
    return CheckResult{"", ok, detail};
  }));

  out.push_back(guarded("records CSV is reproducible", [] {
    const ExperimentSpec s = small_spec(4, GeneratorVariant::per_term(), 0.05, 1.0);
    const std::string a = records_csv(run_experiment(s).records);
    const std::string b = records_csv(run_experiment(s).records);
    return CheckResult{"", a == b, std::to_string(a.size()) + " bytes"};
  }));

  return out;
}

bool print_checks(std::ostream& os, const std::vector<CheckResult>& checks) {
  bool all = true;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    all = all && c.passed;
  }
  return all;
}

}  // namespace aqite
