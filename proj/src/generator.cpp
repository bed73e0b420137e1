#include "aqite/generator.hpp"

#include <algorithm>
#include <cmath>

#include "aqite/errors.hpp"

namespace aqite {

namespace {

SiteBlock whole_chain(int length) { return {0, length - 1}; }

// Relative imaginary residual of a Pauli sum.
double relative_imag(const PauliSum& y) {
  const double scale = y.max_abs_coefficient();
  return scale > 0.0 ? hermiticity_residual(y) / scale : 0.0;
}

PauliSum checked_real(const PauliSum& y, const Tolerances& tol,
                      const char* where) {
  const double r = relative_imag(y);
  if (r > tol.hermiticity_fail) {
    throw IntegrationDiverged(std::string(where) +
                              ": imaginary residual " + std::to_string(r) +
                              " exceeds tolerance");
  }
  return y.real_part(tol.prune);
}

}  // namespace

PauliSum AdiabaticState::total() const {
  if (terms.empty()) throw ModelError("AdiabaticState has no terms");
  return total_operator(terms);
}

AdiabaticState initial_adiabatic_state(int length, GeneratorVariant variant,
                                       WidthSchedule schedule) {
  variant.validate();
  schedule.validate(length);
  AdiabaticState state;
  state.variant = variant;
  state.schedule = schedule;
  auto terms = build_initial_adiabatic(length);
  if (variant.kind == GeneratorKind::kNaive) {
    state.terms.push_back({total_operator(terms), 0, whole_chain(length)});
  } else {
    const int w = schedule.width_at(0.0);
    for (auto& t : terms) t.block = neighborhood_block(t.home_site, w, length);
    state.terms = std::move(terms);
  }
  return state;
}

SiteBlock neighborhood_block(int home_site, int width, int length) {
  if (home_site < 0 || home_site >= length) {
    throw DimensionError("neighborhood_block: home site outside chain");
  }
  if (width == kUnboundedWidth) return whole_chain(length);
  if (width < 1 || width % 2 == 0) {
    throw ConfigError("block width must be odd and positive");
  }
  const int r = (width - 1) / 2;
  return {std::max(0, home_site - r), std::min(length - 1, home_site + r)};
}

bool retained(const SiteBlock& block, const LocalTerm& h, Retention rule) {
  const SiteBlock sup = support_block(h.op);
  if (sup.lo < 0) return false;  // identity-only interaction
  return rule == Retention::kContainment ? block.contains(sup)
                                         : block.overlaps(sup);
}

PauliSum rhs_naive(const PauliSum& h_tilde, const PauliSum& h) {
  return sum_combine(sum_multiply(h_tilde, h), 1.0, sum_multiply(h, h_tilde),
                     1.0);
}

PauliSum rhs_per_term(const LocalTerm& term,
                      const std::vector<LocalTerm>& interactions,
                      int active_width, Retention rule) {
  const int n = term.op.n_qubits();
  const SiteBlock block = neighborhood_block(term.home_site, active_width, n);
  PauliSum out(n);
  for (const auto& h : interactions) {
    if (!retained(block, h, rule)) continue;
    out = out + modified_anticommutator(term.op, h.op);
  }
  return out;
}

PauliSum gauge_term(const LocalTerm& term, double u1, double u2) {
  return sum_combine(term.op, u1, sum_multiply(term.op, term.op), -u2);
}

PauliSum rk2_substep(const PauliSum& y, const RhsFunction& f, double eps) {
  if (!(eps > 0.0)) throw ConfigError("rk2_substep: eps must be positive");
  const PauliSum k1 = f(y);
  const PauliSum k2 = f(sum_combine(y, 1.0, k1, eps));
  return sum_combine(y, 1.0, sum_combine(k1, 1.0, k2, 1.0), 0.5 * eps);
}

AdiabaticState sweep_step(const AdiabaticState& state,
                          const std::vector<LocalTerm>& model, double eps,
                          const SweepOptions& options) {
  AdiabaticState next = state;
  const Tolerances& tol = options.tolerances;
  if (state.variant.kind == GeneratorKind::kNaive) {
    PauliSum y = state.total();
    for (const auto& h : model) {
      y = rk2_substep(
          y, [&](const PauliSum& v) { return anticommutator(v, h.op); }, eps);
    }
    next.terms = {{checked_real(y, tol, "sweep_step"), 0,
                   whole_chain(y.n_qubits())}};
    next.tau = state.tau + eps;
    return next;
  }

  const int w = state.schedule.width_at(state.tau);
  for (auto& t : next.terms) {
    t.block = neighborhood_block(t.home_site, w, t.op.n_qubits());
  }
  for (const auto& h : model) {
    for (auto& t : next.terms) {
      if (!retained(t.block, h, options.retention)) continue;
      t.op = rk2_substep(
          t.op,
          [&](const PauliSum& v) { return modified_anticommutator(v, h.op); },
          eps);
    }
  }
  if (state.variant.kind == GeneratorKind::kGauged) {
    const double u1 = state.variant.u1;
    const double u2 = state.variant.u2;
    for (auto& t : next.terms) {
      t.op = rk2_substep(
          t.op,
          [&](const PauliSum& v) {
            return gauge_term({v, t.home_site, t.block}, u1, u2);
          },
          eps);
    }
  }
  for (auto& t : next.terms) t.op = checked_real(t.op, tol, "sweep_step");
  next.tau = state.tau + eps;
  return next;
}

Propagator::Propagator(const ExperimentSpec& spec) : spec_(spec) {
  spec_.validate();
  const int L = spec_.model.length;
  if (L > 14) {
    throw ResourceError("Propagator: dense coefficient storage limited to 14 "
                        "sites");
  }
  model_ = build_xxz(spec_.model);
  bonds_.reserve(model_.size());
  for (const auto& h : model_) bonds_.emplace_back(h.op, spec_.epsilon);
  const auto initial = build_initial_adiabatic(L);
  if (spec_.variant.kind == GeneratorKind::kNaive) {
    terms_.push_back(
        BlockOperator::from_pauli_sum(total_operator(initial), whole_chain(L)));
    homes_.push_back(0);
  } else {
    for (const auto& t : initial) {
      terms_.push_back(BlockOperator::from_pauli_sum(t.op, t.block));
      homes_.push_back(t.home_site);
    }
  }
  blocks_.resize(terms_.size());
  retained_.resize(terms_.size());
  apply_width(spec_.schedule.width_at(0.0));
}

void Propagator::apply_width(int width) {
  const int L = spec_.model.length;
  for (std::size_t b = 0; b < terms_.size(); ++b) {
    const bool naive = spec_.variant.kind == GeneratorKind::kNaive;
    blocks_[b] = naive ? whole_chain(L) : neighborhood_block(homes_[b], width, L);
    retained_[b].clear();
    for (std::size_t a = 0; a < model_.size(); ++a) {
      if (naive || retained(blocks_[b], model_[a], spec_.retention)) {
        retained_[b].push_back(static_cast<int>(a));
      }
    }
  }
  active_width_ = width;
}

void Propagator::step() {
  const int w = spec_.schedule.width_at(tau_);
  if (w != active_width_) apply_width(w);
  const bool naive = spec_.variant.kind == GeneratorKind::kNaive;
  const double prune = spec_.tolerances.prune;
  const double commute = spec_.tolerances.commute;
  // Terms evolve independently, so the bond sweep can run term by term.
  for (std::size_t b = 0; b < terms_.size(); ++b) {
    BlockOperator& y = terms_[b];
    for (int a : retained_[b]) {
      if (naive) {
        bonds_[static_cast<std::size_t>(a)].step_plain(y, prune);
        continue;
      }
      switch (bonds_[static_cast<std::size_t>(a)].step_gated(y, commute,
                                                             prune)) {
        case SubstepKind::kFrozen:
        case SubstepKind::kOutside:
          ++n_frozen_;
          break;
        case SubstepKind::kHalf:
          ++n_half_;
          break;
        case SubstepKind::kFull:
          ++n_full_;
          break;
      }
    }
    if (spec_.variant.kind == GeneratorKind::kGauged) gauge_substep(y);
    check_term(y, b);
  }
  ++step_;
  tau_ = static_cast<double>(step_) * spec_.epsilon;
}

void Propagator::gauge_substep(BlockOperator& y) {
  const double u1 = spec_.variant.u1;
  const double u2 = spec_.variant.u2;
  const double eps = spec_.epsilon;
  auto f = [&](const BlockOperator& v) {
    double imag = 0.0;
    BlockOperator out = square(v, &imag);
    const double scale = v.max_abs();
    const double rel = scale > 0.0 ? imag / (scale * scale) : 0.0;
    max_herm_ = std::max(max_herm_, rel);
    if (rel > spec_.tolerances.hermiticity_fail) {
      throw IntegrationDiverged("gauge substep: imaginary residual " +
                                std::to_string(rel) + " exceeds tolerance");
    }
    out.scale(-u2);
    out.axpy(u1, v);
    out.prune(spec_.tolerances.prune);
    return out;
  };
  const BlockOperator k1 = f(y);
  BlockOperator y1 = y;
  y1.axpy(eps, k1);
  y1.prune(spec_.tolerances.prune);
  const BlockOperator k2 = f(y1);
  y.axpy(0.5 * eps, k1);
  y.axpy(0.5 * eps, k2);
  y.prune(spec_.tolerances.prune);
}

void Propagator::check_term(const BlockOperator& y, std::size_t index) const {
  if (!y.all_finite()) {
    throw IntegrationDiverged("term " + std::to_string(index) +
                              " became non-finite at tau = " +
                              std::to_string(tau_));
  }
  if (spec_.max_terms != 0 && y.count_nonzero() > spec_.max_terms) {
    throw ResourceError("term " + std::to_string(index) + " has more than " +
                        std::to_string(spec_.max_terms) + " Pauli strings");
  }
}

BlockOperator Propagator::total() const {
  BlockOperator out(spec_.model.length, whole_chain(spec_.model.length));
  for (const auto& t : terms_) t.accumulate_into(out);
  return out;
}

AdiabaticState Propagator::state() const {
  AdiabaticState s;
  s.tau = tau_;
  s.variant = spec_.variant;
  s.schedule = spec_.schedule;
  for (std::size_t b = 0; b < terms_.size(); ++b) {
    s.terms.push_back({terms_[b].to_pauli_sum(), homes_[b], blocks_[b]});
  }
  return s;
}

int Propagator::max_support_width() const {
  int w = 0;
  for (const auto& t : terms_) {
    const SiteBlock s = t.support();
    if (s.lo >= 0) w = std::max(w, s.width());
  }
  return w;
}

int Propagator::max_block_width() const {
  int w = 0;
  for (const auto& b : blocks_) w = std::max(w, b.width());
  return w;
}

void evolve(const ExperimentSpec& spec, const SnapshotObserver& observer) {
  Propagator prop(spec);
  const long n = spec.n_steps();
  observer(prop);
  for (long s = 1; s <= n; ++s) {
    prop.step();
    if (s % spec.sampling_stride == 0 || s == n) observer(prop);
  }
}

std::vector<AdiabaticState> evolve_snapshots(const ExperimentSpec& spec) {
  std::vector<AdiabaticState> out;
  evolve(spec, [&](const Propagator& p) { out.push_back(p.state()); });
  return out;
}

}  // namespace aqite
