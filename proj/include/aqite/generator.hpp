#pragma once

#include <functional>
#include <vector>

#include "aqite/block_operator.hpp"
#include "aqite/experiment.hpp"
#include "aqite/model.hpp"
#include "aqite/pauli.hpp"

namespace aqite {

/// H~(tau) as a list of local terms. The naive generator carries a single
/// term spanning the whole chain.
struct AdiabaticState {
  double tau = 0.0;
  std::vector<LocalTerm> terms;
  GeneratorVariant variant;
  WidthSchedule schedule;

  PauliSum total() const;
};

/// Initial state of the generator for `variant` on an L-site chain.
AdiabaticState initial_adiabatic_state(int length, GeneratorVariant variant,
                                       WidthSchedule schedule);

/// Centered window [home - (w-1)/2, home + (w-1)/2] clipped to the chain;
/// the whole chain for kUnboundedWidth.
SiteBlock neighborhood_block(int home_site, int width, int length);

/// Whether interaction `h` is seen from `block`.
bool retained(const SiteBlock& block, const LocalTerm& h, Retention rule);

// Reference right-hand sides on PauliSum.

/// H~ H + H H~.
PauliSum rhs_naive(const PauliSum& h_tilde, const PauliSum& h);

/// Sum over retained interactions of {h~_beta, h_alpha}'. The block is
/// recomputed from term.home_site and active_width.
PauliSum rhs_per_term(const LocalTerm& term,
                      const std::vector<LocalTerm>& interactions,
                      int active_width,
                      Retention rule = Retention::kContainment);

/// u1 op - u2 op^2.
PauliSum gauge_term(const LocalTerm& term, double u1, double u2);

using RhsFunction = std::function<PauliSum(const PauliSum&)>;

/// Heun step y + eps/2 [F(y) + F(y + eps F(y))].
PauliSum rk2_substep(const PauliSum& y, const RhsFunction& f, double eps);

struct SweepOptions {
  Retention retention = Retention::kContainment;
  Tolerances tolerances;
};

/// One step of duration eps by first-order splitting over the interactions
/// in ascending order, plus the gauge substep for the gauged variant.
/// Throws IntegrationDiverged when an imaginary residual exceeds the
/// failure threshold.
AdiabaticState sweep_step(const AdiabaticState& state,
                          const std::vector<LocalTerm>& model, double eps,
                          const SweepOptions& options = {});

/// Production integrator on BlockOperator storage. Produces the same
/// trajectory as repeated sweep_step.
class Propagator {
 public:
  explicit Propagator(const ExperimentSpec& spec);

  /// Advances tau by epsilon.
  void step();

  double tau() const { return tau_; }
  long step_index() const { return step_; }
  const ExperimentSpec& spec() const { return spec_; }
  int active_width() const { return active_width_; }
  const std::vector<LocalTerm>& interactions() const { return model_; }
  const std::vector<BlockOperator>& terms() const { return terms_; }
  const std::vector<SiteBlock>& blocks() const { return blocks_; }
  /// Home site of each term.
  const std::vector<int>& homes() const { return homes_; }

  /// Sum of all terms on the whole chain.
  BlockOperator total() const;
  AdiabaticState state() const;
  /// Largest support extent over the terms.
  int max_support_width() const;
  /// Largest block width over the terms.
  int max_block_width() const;
  /// Largest relative imaginary residual seen so far.
  double max_hermiticity_residual() const { return max_herm_; }
  /// Substep outcome counts since construction.
  long frozen_substeps() const { return n_frozen_; }
  long half_substeps() const { return n_half_; }
  long full_substeps() const { return n_full_; }

 private:
  void apply_width(int width);
  void gauge_substep(BlockOperator& y);
  void check_term(const BlockOperator& y, std::size_t index) const;

  ExperimentSpec spec_;
  std::vector<LocalTerm> model_;
  std::vector<BondPropagator> bonds_;
  std::vector<BlockOperator> terms_;
  std::vector<int> homes_;
  std::vector<SiteBlock> blocks_;
  std::vector<std::vector<int>> retained_;
  double tau_ = 0.0;
  long step_ = 0;
  int active_width_ = -1;
  double max_herm_ = 0.0;
  long n_frozen_ = 0;
  long n_half_ = 0;
  long n_full_ = 0;
};

/// Called at tau = 0 and after every sampling_stride steps.
using SnapshotObserver = std::function<void(const Propagator&)>;

/// Runs the integration described by `spec`, invoking `observer` at each
/// sampled time. The last sample is at n_steps() even when the stride does
/// not divide it.
void evolve(const ExperimentSpec& spec, const SnapshotObserver& observer);

/// evolve() collecting PauliSum snapshots.
std::vector<AdiabaticState> evolve_snapshots(const ExperimentSpec& spec);

}  // namespace aqite
