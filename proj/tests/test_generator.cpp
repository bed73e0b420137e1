#include <gtest/gtest.h>

#include "aqite/dense.hpp"
#include "aqite/errors.hpp"
#include "aqite/generator.hpp"
#include "aqite/oracle.hpp"

using namespace aqite;

namespace {

double diff(const PauliSum& a, const PauliSum& b) {
  return sum_combine(a, 1.0, b, -1.0, 0.0).max_abs_coefficient();
}

ExperimentSpec spec(int L, GeneratorVariant v, double eps, double tau_max,
                    WidthSchedule sched = {}) {
  ExperimentSpec s;
  s.model.length = L;
  s.variant = v;
  s.epsilon = eps;
  s.tau_max = tau_max;
  s.schedule = std::move(sched);
  return s;
}

PauliSum final_total(const ExperimentSpec& s) {
  Propagator p(s);
  for (long k = 0; k < s.n_steps(); ++k) p.step();
  return p.state().total();
}

}  // namespace

TEST(WidthSchedule, Validation) {
  EXPECT_THROW(WidthSchedule({{0.5, 3}}), ConfigError);
  EXPECT_THROW(WidthSchedule({{0.0, 3}, {0.0, 5}}), ConfigError);
  EXPECT_THROW(WidthSchedule({{0.0, 4}}), ConfigError);
  EXPECT_THROW(WidthSchedule({{0.0, 5}, {1.0, 3}}), ConfigError);
  const WidthSchedule s({{0.0, 3}, {0.9, 5}, {1.4, 7}});
  EXPECT_EQ(s.width_at(0.0), 3);
  EXPECT_EQ(s.width_at(0.85), 3);
  EXPECT_EQ(s.width_at(0.9 - 1e-12), 5);
  EXPECT_EQ(s.width_at(2.0), 7);
  EXPECT_TRUE(s.bounded());
  EXPECT_THROW(s.validate(6), ConfigError);
  EXPECT_FALSE(WidthSchedule::unbounded().bounded());
}

TEST(ExperimentSpec, Validation) {
  ExperimentSpec s;
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.n_steps(), 60);
  s.epsilon = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = ExperimentSpec{};
  s.schedule = WidthSchedule::constant(3);  // naive cannot be truncated
  EXPECT_THROW(s.validate(), ConfigError);
  s = ExperimentSpec{};
  s.variant = {GeneratorKind::kPerTerm, 1.0, 0.0};
  EXPECT_THROW(s.validate(), ConfigError);
  s = ExperimentSpec{};
  s.model.length = 13;
  EXPECT_THROW(s.validate(), ResourceError);
}

TEST(Neighborhood, CenteredAndClipped) {
  EXPECT_EQ(neighborhood_block(4, 5, 8), (SiteBlock{2, 6}));
  EXPECT_EQ(neighborhood_block(0, 5, 8), (SiteBlock{0, 2}));
  EXPECT_EQ(neighborhood_block(7, 3, 8), (SiteBlock{6, 7}));
  EXPECT_EQ(neighborhood_block(3, kUnboundedWidth, 8), (SiteBlock{0, 7}));
  const auto bonds = build_xxz({8, 2.0});
  EXPECT_TRUE(retained({2, 4}, bonds[2], Retention::kContainment));
  EXPECT_FALSE(retained({2, 4}, bonds[4], Retention::kContainment));
  EXPECT_TRUE(retained({2, 4}, bonds[4], Retention::kOverlap));
  EXPECT_FALSE(retained({2, 4}, bonds[5], Retention::kOverlap));
}

TEST(RhsNaive, Examples) {
  EXPECT_TRUE(rhs_naive(PauliSum(2), total_operator(build_xxz({2, 2.0}))).empty());
  const PauliSum ht = PauliSum::from_words({{"I", 1.0}, {"Z", -1.0}});
  const PauliSum want = PauliSum::from_words({{"Z", 2.0}, {"I", -2.0}});
  EXPECT_LT(diff(rhs_naive(ht, PauliSum::from_words({{"Z", 1.0}})), want), 1e-15);

  const PauliSum h0 = total_operator(build_initial_adiabatic(2));
  const PauliSum h = total_operator(build_xxz({2, 2.0}));
  const auto m0 = oracle::kron_matrix(h0);
  const auto mh = oracle::kron_matrix(h);
  EXPECT_LT(oracle::max_diff(oracle::kron_matrix(rhs_naive(h0, h)), m0 * mh + mh * m0), 1e-15);
}

TEST(RhsPerTerm, Examples) {
  const auto bonds = build_xxz({2, 2.0});
  const auto init = build_initial_adiabatic(2);
  const PauliSum want =
      PauliSum::from_words({{"IX", 0.25}, {"XX", 0.25}, {"YY", 0.25}, {"ZZ", 0.5}});
  EXPECT_LT(diff(rhs_per_term(init[0], bonds, kUnboundedWidth), want), 1e-15);
  // w=1 blocks contain no bond.
  const auto bonds6 = build_xxz({6, 2.0});
  for (const auto& t : build_initial_adiabatic(6)) {
    EXPECT_TRUE(rhs_per_term(t, bonds6, 1).empty());
  }
}

TEST(GaugeTerm, Examples) {
  const auto init = build_initial_adiabatic(1);
  EXPECT_TRUE(gauge_term(init[0], 0.0, 0.0).empty());
  EXPECT_LT(diff(gauge_term(init[0], 2.0, 0.5), init[0].op.scaled(1.5)), 1e-15);
  const LocalTerm z{PauliSum::from_words({{"Z", 1.0}}), 0, {0, 0}};
  EXPECT_LT(diff(gauge_term(z, 2.0, 0.5), PauliSum::from_words({{"Z", 2.0}, {"I", -0.5}})),
            1e-15);
}

TEST(Rk2Substep, Examples) {
  const PauliSum y = PauliSum::from_words({{"XZ", 0.3}, {"II", 1.0}});
  EXPECT_EQ(rk2_substep(y, [](const PauliSum& v) { return PauliSum(v.n_qubits()); }, 0.1), y);
  // F(y) = 2 c y: one Heun step is 1 + 2c eps + (2c eps)^2 / 2.
  const double c = -0.7, eps = 0.05;
  const PauliSum out =
      rk2_substep(y, [&](const PauliSum& v) { return v.scaled(2.0 * c); }, eps);
  const double g = 1.0 + 2 * c * eps + 0.5 * (2 * c * eps) * (2 * c * eps);
  EXPECT_LT(diff(out, y.scaled(g)), 1e-15);
  EXPECT_LT(std::abs(g - std::exp(2 * c * eps)), 1e-4);
}

TEST(SweepStep, NaiveTwoSitesMatchesFineReference) {
  const auto model = build_xxz({2, 2.0});
  const PauliSum h = total_operator(model);
  const AdiabaticState s0 =
      initial_adiabatic_state(2, GeneratorVariant::naive(), WidthSchedule::unbounded());
  const AdiabaticState s1 = sweep_step(s0, model, 0.05);
  EXPECT_NEAR(s1.tau, 0.05, 1e-15);
  PauliSum ref = s0.total();
  for (int k = 0; k < 500; ++k) {
    ref = rk2_substep(ref, [&](const PauliSum& v) { return rhs_naive(v, h); }, 1e-4);
  }
  EXPECT_LT(diff(s1.total(), ref), 1e-4);
}

TEST(SweepStep, WidthOneIsFrozen) {
  const auto model = build_xxz({6, 2.0});
  const AdiabaticState s0 = initial_adiabatic_state(6, GeneratorVariant::per_term(),
                                                    WidthSchedule::constant(1));
  const AdiabaticState s1 = sweep_step(s0, model, 0.05);
  EXPECT_NEAR(s1.tau, 0.05, 1e-15);
  EXPECT_EQ(s1.total(), s0.total());
}

TEST(Propagator, MatchesSweepStep) {
  const std::vector<std::pair<GeneratorVariant, WidthSchedule>> cases = {
      {GeneratorVariant::naive(), WidthSchedule::unbounded()},
      {GeneratorVariant::per_term(), WidthSchedule::unbounded()},
      {GeneratorVariant::per_term(), WidthSchedule::constant(3)},
      {GeneratorVariant::per_term(), WidthSchedule({{0.0, 1}, {0.1, 3}, {0.2, 5}})},
      {GeneratorVariant::gauged(2.0, 0.5), WidthSchedule::constant(3)},
      {GeneratorVariant::gauged(0.5, 2.0), WidthSchedule::unbounded()}};
  for (const auto& [variant, sched] : cases) {
    const ExperimentSpec s = spec(5, variant, 0.05, 0.3, sched);
    Propagator p(s);
    AdiabaticState ref = initial_adiabatic_state(5, variant, sched);
    const auto model = build_xxz(s.model);
    for (long k = 0; k < s.n_steps(); ++k) {
      p.step();
      ref = sweep_step(ref, model, s.epsilon);
      ASSERT_LT(diff(p.state().total(), ref.total()), 1e-11)
          << to_string(variant.kind) << " step " << k;
    }
    EXPECT_NEAR(p.tau(), 0.3, 1e-12);
  }
}

TEST(Propagator, LocalityAndSymmetry) {
  const ExperimentSpec s =
      spec(8, GeneratorVariant::per_term(), 0.05, 1.5, WidthSchedule({{0.0, 3}, {0.5, 5}, {1.0, 7}}));
  Propagator p(s);
  const PauliSum parity = parity_operator(8);
  for (long k = 0; k < s.n_steps(); ++k) {
    p.step();
    ASSERT_LE(p.max_support_width(), p.active_width());
    ASSERT_LE(p.max_block_width(), p.active_width());
    ASSERT_LT(commutator(p.state().total(), parity).max_abs_coefficient(), 1e-10);
  }
  EXPECT_EQ(p.active_width(), 7);
  EXPECT_EQ(p.max_support_width(), 7);
  EXPECT_LT(p.max_hermiticity_residual(), 1e-10);
}

TEST(Propagator, UntruncatedTermsFillTheChain) {
  Propagator p(spec(6, GeneratorVariant::per_term(), 0.05, 1.0));
  p.step();
  p.step();
  EXPECT_EQ(p.max_support_width(), 6);
}

TEST(Propagator, TermCapRaisesResourceError) {
  ExperimentSpec s = spec(6, GeneratorVariant::per_term(), 0.05, 1.0);
  s.max_terms = 20;
  Propagator p(s);
  EXPECT_THROW(
      {
        for (int k = 0; k < 20; ++k) p.step();
      },
      ResourceError);
}

TEST(Propagator, StepSizeConvergenceRatio) {
  // Naive, L=4, tau = 0.5: |H(eps) - H(eps/2)| / |H(eps/2) - H(eps/4)|.
  // The bond splitting is first order, so the ratio tends to 2.
  const PauliSum a = final_total(spec(4, GeneratorVariant::naive(), 0.05, 0.5));
  const PauliSum b = final_total(spec(4, GeneratorVariant::naive(), 0.025, 0.5));
  const PauliSum c = final_total(spec(4, GeneratorVariant::naive(), 0.0125, 0.5));
  const double ratio = diff(a, b) / diff(b, c);
  EXPECT_GE(ratio, 1.8);
  EXPECT_LE(ratio, 2.3);
}

TEST(Evolve, SamplesAtStrideAndEnd) {
  ExperimentSpec s = spec(4, GeneratorVariant::per_term(), 0.1, 0.5);
  s.sampling_stride = 2;
  std::vector<double> taus;
  evolve(s, [&](const Propagator& p) { taus.push_back(p.tau()); });
  ASSERT_EQ(taus.size(), 4u);
  EXPECT_NEAR(taus[1], 0.2, 1e-12);
  EXPECT_NEAR(taus[3], 0.5, 1e-12);
  EXPECT_EQ(evolve_snapshots(s).size(), 4u);
}
