#include <gtest/gtest.h>

#include <cmath>

#include "aqite/diagnostics.hpp"
#include "aqite/errors.hpp"
#include "aqite/generator.hpp"

using namespace aqite;

namespace {

std::vector<TrajectoryRecord> synthetic(const std::function<double(double)>& i_inf,
                                        double tau_max, double dt) {
  std::vector<TrajectoryRecord> out;
  for (int k = 0; k * dt <= tau_max + 1e-12; ++k) {
    TrajectoryRecord r;
    r.tau = k * dt;
    r.i_inf = i_inf(r.tau);
    r.i_tau = 0.0;
    r.gap = 1.0;
    r.norm = 1.0;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(Infidelity, Examples) {
  Eigen::VectorXd a(2), b(2), plus(2);
  a << 1, 0;
  b << 0, 1;
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  EXPECT_EQ(infidelity(a, a), 0.0);
  EXPECT_EQ(infidelity(a, b), 1.0);
  EXPECT_NEAR(infidelity(plus, a), 0.5, 1e-15);
  EXPECT_NEAR(infidelity(Eigen::VectorXcd(plus.cast<Complex>()),
                         Eigen::VectorXcd(a.cast<Complex>())),
              0.5, 1e-15);
  EXPECT_THROW(infidelity(a, Eigen::VectorXd(3)), DimensionError);
}

TEST(ReferenceStates, MatchComplexDenseReferences) {
  const ModelSpec m{6, 2.0};
  const ReferenceStates refs(m);
  const auto h = to_dense(total_operator(build_xxz(m)));
  const Eigen::VectorXcd psi0 = initial_state(6);
  const auto g = sector_ground_state(h, to_dense(parity_operator(6)),
                                     initial_state_parity(6), psi0);
  EXPECT_NEAR(refs.ground_energy(), g.energy, 1e-12);
  EXPECT_LT(infidelity(Eigen::VectorXcd(refs.psi_inf().cast<Complex>()), g.state), 1e-12);
  for (const double tau : {0.0, 0.7, 2.5}) {
    EXPECT_LT(infidelity(Eigen::VectorXcd(refs.psi_tau(tau).cast<Complex>()),
                         imaginary_time_state(h, psi0, tau)),
              1e-12);
  }
}

TEST(SnapshotRecord, InitialTime) {
  const int L = 8;
  const ReferenceStates refs({L, 2.0});
  const BlockOperator h0 = BlockOperator::from_pauli_sum(
      total_operator(build_initial_adiabatic(L)), {0, L - 1});
  const TrajectoryRecord r = snapshot_record(h0, 0.0, refs, 1);
  EXPECT_LT(r.i_tau, 1e-12);
  EXPECT_NEAR(r.i_inf, infidelity(refs.psi0(), refs.psi_inf()), 1e-12);
  EXPECT_LT(r.e0_residual, 1e-12);
  EXPECT_NEAR(r.norm, L, 1e-12);
  EXPECT_NEAR(r.gap, 1.0, 1e-12);
  EXPECT_EQ(r.term_count, L + 1);
}

TEST(SnapshotRecord, ParityOfTheChosenGroundState) {
  ExperimentSpec s;
  s.model.length = 6;
  s.variant = GeneratorVariant::per_term();
  s.tau_max = 2.0;
  const Eigen::MatrixXd flip =
      to_dense(parity_operator(6)).entries.real();
  const int sector = initial_state_parity(6);
  evolve(s, [&](const Propagator& p) {
    const SnapshotSpectrum sp = analyze_snapshot(p.total(), sector, initial_state(6).real());
    ASSERT_LE(sp.e0, sp.e0_sector + 1e-12);
    if (sp.phi0.size() == 0) return;
    ASSERT_NEAR(sp.phi0.dot(flip * sp.phi0), sector, 1e-8);
  });
}

TEST(EigenvalueFlow, CommutingClosedForm) {
  // H~(0) = I - Z, H = Z: H~(tau) = diag(0, 2 e^{-2 tau}) exactly.
  std::vector<SpectralSnapshot> traj;
  for (int k = 0; k <= 20; ++k) {
    const double tau = 0.05 * k;
    SpectralSnapshot snap;
    snap.tau = tau;
    snap.spectrum.eigenvalues = Eigen::Vector2d(0.0, 2.0 * std::exp(-2 * tau));
    snap.spectrum.eigenvectors = Eigen::MatrixXcd::Identity(2, 2);
    traj.push_back(snap);
  }
  const auto rep = verify_eigenvalue_flow(traj, to_dense(PauliSum::from_words({{"Z", 1.0}})), 1);
  ASSERT_EQ(rep.levels.size(), 1u);
  EXPECT_TRUE(rep.levels[0].tracked);
  EXPECT_LT(rep.levels[0].max_rel_error, 1e-12);
  EXPECT_EQ(rep.max_e0_abs, 0.0);
}

TEST(EigenvalueFlow, NaiveXxzFourSites) {
  ExperimentSpec s;
  s.model.length = 4;
  s.epsilon = 0.01;
  s.tau_max = 0.5;
  std::vector<SpectralSnapshot> traj;
  evolve(s, [&](const Propagator& p) {
    traj.push_back({p.tau(), eig_hermitian(to_dense(p.state().total()))});
  });
  const auto rep =
      verify_eigenvalue_flow(traj, to_dense(total_operator(build_xxz(s.model))));
  int tracked = 0;
  for (const auto& lv : rep.levels) {
    if (!lv.tracked) continue;
    ++tracked;
    EXPECT_LT(lv.max_rel_error, 0.02) << "level " << lv.level;
  }
  EXPECT_GT(tracked, 0);
}

TEST(AdiabaticCost, Examples) {
  TrajectoryRecord r;
  r.norm = 8.0;
  r.gap = 1.0;
  std::vector<TrajectoryRecord> one = {r};
  EXPECT_EQ(adiabatic_cost(one), 8.0);
  r.norm = 3.0;
  r.gap = 0.5;
  std::vector<TrajectoryRecord> same(4, r);
  EXPECT_EQ(adiabatic_cost(same), 12.0);
  same[2].gap = 0.0;
  bool inf = false;
  EXPECT_TRUE(std::isinf(adiabatic_cost(same, &inf)));
  EXPECT_TRUE(inf);
}

TEST(DetectTauC, SyntheticMinimum) {
  const auto rs = synthetic([](double t) { return (t - 1.8) * (t - 1.8) + 0.01; }, 3.0, 0.05);
  const TrajectorySummary s = detect_tau_c(rs);
  EXPECT_NEAR(s.tau_c, 1.8, 1e-9);
  EXPECT_NEAR(s.min_i_inf, 0.01, 1e-12);
  EXPECT_FALSE(s.no_turnover);
}

TEST(DetectTauC, MonotoneHasNoTurnover) {
  const auto rs = synthetic([](double t) { return std::exp(-t); }, 3.0, 0.1);
  const TrajectorySummary s = detect_tau_c(rs);
  EXPECT_TRUE(s.no_turnover);
  EXPECT_NEAR(s.tau_c, 3.0, 1e-9);
  EXPECT_THROW(detect_tau_c(std::span(rs).first(2)), ContractViolation);
}

TEST(DetectTauC, OrderingDiagnostic) {
  auto rs = synthetic([](double t) { return (t - 1.0) * (t - 1.0) + 0.01; }, 2.0, 0.1);
  rs[12].i_tau = 0.5;  // max i_tau at 1.2, after tau_c + one stride
  EXPECT_FALSE(detect_tau_c(rs).ordering_ok);
  rs[12].i_tau = 0.0;
  rs[11].i_tau = 0.5;
  EXPECT_TRUE(detect_tau_c(rs).ordering_ok);
}

TEST(Trajectory, NaiveGroundEnergyStaysZeroThroughTauC) {
  ExperimentSpec s;
  s.model.length = 8;
  s.epsilon = 0.05;
  const ReferenceStates refs(s.model);
  std::vector<TrajectoryRecord> rs;
  evolve(s, [&](const Propagator& p) {
    rs.push_back(snapshot_record(p.total(), p.tau(), refs, p.max_support_width()));
  });
  const double tau_c = detect_tau_c(rs).tau_c;
  double worst = 0.0;
  for (const auto& r : rs) {
    if (r.tau <= tau_c + 1e-9) worst = std::max(worst, r.e0_residual / r.norm);
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Trajectory, WidthFiveSaturates) {
  ExperimentSpec s;
  s.model.length = 8;
  s.variant = GeneratorVariant::per_term();
  s.schedule = WidthSchedule::constant(5);
  s.tau_max = 1.0;
  Propagator p(s);
  for (int k = 0; k < 20; ++k) {
    p.step();
    if (k >= 1) EXPECT_EQ(p.max_support_width(), 5) << k;
  }
}
