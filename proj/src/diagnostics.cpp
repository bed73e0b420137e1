#include "aqite/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aqite/errors.hpp"

namespace aqite {

double infidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) throw DimensionError("infidelity: size mismatch");
  return std::clamp(1.0 - std::norm(a.dot(b)), 0.0, 1.0);
}

double infidelity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw DimensionError("infidelity: size mismatch");
  const double o = a.dot(b);
  return std::clamp(1.0 - o * o, 0.0, 1.0);
}

namespace {

Eigen::MatrixXd real_matrix(const BlockOperator& op) {
  if (op.sites() != SiteBlock{0, op.chain_length() - 1}) {
    throw DimensionError("expected an operator on the whole chain");
  }
  if (op.max_odd_y() != 0.0) {
    throw ContractViolation("operator has a complex matrix (odd-Y strings)");
  }
  return op.to_local_real_matrix();
}

// Normalized projection of `ref` onto span(basis), else the first column.
Eigen::VectorXd project_onto(const Eigen::MatrixXd& basis,
                             const Eigen::VectorXd& ref) {
  const Eigen::VectorXd proj = basis * (basis.transpose() * ref);
  const double nrm = proj.norm();
  if (nrm < 1e-12) return basis.col(0);
  return proj / nrm;
}

Eigen::Index cluster_size(const Eigen::VectorXd& sorted, double top) {
  Eigen::Index k = 0;
  while (k < sorted.size() && sorted(k) <= top) ++k;
  return k;
}

}  // namespace

ReferenceStates::ReferenceStates(const ModelSpec& model)
    : length_(model.length), sector_(initial_state_parity(model.length)) {
  const PauliSum h = total_operator(build_xxz(model));
  const BlockOperator hb =
      BlockOperator::from_pauli_sum(h, {0, model.length - 1});
  h_sector_ = eig_symmetric(parity_block(real_matrix(hb), sector_));
  psi0_ = initial_state(model.length).real();
  psi0_sector_ = restrict_to_sector(psi0_, sector_);
  const Eigen::VectorXd& ev = h_sector_.eigenvalues;
  e_inf_ = ev(0);
  const Eigen::Index k = cluster_size(ev, e_inf_ + kDegeneracyWindow);
  psi_inf_ = embed_from_sector(
      project_onto(h_sector_.eigenvectors.leftCols(k), psi0_sector_), sector_);
}

Eigen::VectorXd ReferenceStates::psi_tau(double tau) const {
  return embed_from_sector(imaginary_time_state(h_sector_, psi0_sector_, tau),
                           sector_);
}

SnapshotSpectrum analyze_snapshot(const BlockOperator& h_tilde, int sector,
                                  const Eigen::VectorXd& psi0) {
  Eigen::MatrixXd own;
  Eigen::MatrixXd other;
  {
    const Eigen::MatrixXd m = real_matrix(h_tilde);
    own = parity_block(m, sector);
    other = parity_block(m, -sector);
  }
  const PartialSpectrum po = eig_symmetric_lowest(std::move(other), 0);
  PartialSpectrum ps = eig_symmetric_lowest(own, 2);

  SnapshotSpectrum out;
  const Eigen::VectorXd& es = ps.eigenvalues;
  const Eigen::VectorXd& eo = po.eigenvalues;
  out.e0_sector = es(0);
  out.e1_sector = es.size() > 1 ? es(1) : es(0);
  std::vector<double> low = {es(0), eo(0)};
  if (es.size() > 1) low.push_back(es(1));
  if (eo.size() > 1) low.push_back(eo(1));
  std::sort(low.begin(), low.end());
  out.e0 = low[0];
  out.e1 = low[1];
  out.max_abs = std::max({std::abs(es(0)), std::abs(es(es.size() - 1)),
                          std::abs(eo(0)), std::abs(eo(eo.size() - 1))});

  const double top = out.e0 + kDegeneracyWindow;
  if (es(0) > top) return out;  // ground level strictly in the other sector
  const Eigen::Index k = cluster_size(es, top);
  if (k > ps.low_vectors.cols()) {
    ps = eig_symmetric_lowest(std::move(own), static_cast<int>(k));
  }
  const Eigen::VectorXd ref = restrict_to_sector(psi0, sector);
  out.phi0 = embed_from_sector(project_onto(ps.low_vectors.leftCols(k), ref),
                               sector);
  return out;
}

TrajectoryRecord snapshot_record(const BlockOperator& h_tilde, double tau,
                                 const ReferenceStates& refs,
                                 int max_support_width) {
  const SnapshotSpectrum s =
      analyze_snapshot(h_tilde, refs.sector(), refs.psi0());
  TrajectoryRecord r;
  r.tau = tau;
  if (s.phi0.size() == 0) {
    r.i_tau = 1.0;
    r.i_inf = 1.0;
  } else {
    r.i_tau = infidelity(s.phi0, refs.psi_tau(tau));
    r.i_inf = infidelity(s.phi0, refs.psi_inf());
  }
  r.gap = s.e1 - s.e0;
  r.gap_sector = s.e1_sector - s.e0_sector;
  r.norm = s.max_abs;
  r.e0_residual = std::abs(s.e0);
  r.term_count = static_cast<long>(h_tilde.count_nonzero());
  r.max_support_width = max_support_width;
  return r;
}

EigenvalueFlowReport verify_eigenvalue_flow(
    std::span<const SpectralSnapshot> trajectory, const DenseOperator& h,
    int n_levels, double overlap_threshold) {
  EigenvalueFlowReport report;
  for (const auto& snap : trajectory) {
    const auto& ev = snap.spectrum.eigenvalues;
    const double scale = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    report.max_e0_abs = std::max(report.max_e0_abs, std::abs(ev(0)));
    if (scale > 0.0) {
      report.max_e0_rel = std::max(report.max_e0_rel, std::abs(ev(0)) / scale);
    }
  }
  if (trajectory.size() < 3) return report;
  const std::size_t anchor = trajectory.front().tau == 0.0 ? 1 : 0;
  const auto& a = trajectory[anchor].spectrum;
  const int dim = static_cast<int>(a.eigenvalues.size());
  for (int level = 1; level <= n_levels && level < dim; ++level) {
    LevelFlow flow;
    flow.level = level;
    Eigen::Index cur = level;
    Eigen::VectorXcd v = a.eigenvectors.col(cur);
    const double e_anchor = a.eigenvalues(cur);
    double g_prev = 2.0 * v.dot(h.entries * v).real();
    double integral = 0.0;
    for (std::size_t t = anchor + 1; t < trajectory.size(); ++t) {
      const auto& sp = trajectory[t].spectrum;
      const Eigen::VectorXd overlaps =
          (sp.eigenvectors.adjoint() * v).cwiseAbs();
      Eigen::Index best = 0;
      const double best_overlap = overlaps.maxCoeff(&best);
      if (best_overlap < overlap_threshold) {
        flow.tracked = false;
        break;
      }
      cur = best;
      v = sp.eigenvectors.col(cur);
      const double g = 2.0 * v.dot(h.entries * v).real();
      integral += 0.5 * (g_prev + g) *
                  (trajectory[t].tau - trajectory[t - 1].tau);
      g_prev = g;
      const double predicted = e_anchor * std::exp(integral);
      const double err = std::abs(sp.eigenvalues(cur) - predicted) /
                         std::max(std::abs(predicted), 1e-300);
      flow.rel_errors.push_back(err);
      flow.max_rel_error = std::max(flow.max_rel_error, err);
    }
    report.levels.push_back(std::move(flow));
  }
  return report;
}

double adiabatic_cost(std::span<const TrajectoryRecord> records,
                      bool* infinite) {
  double cost = 0.0;
  bool inf = false;
  for (const auto& r : records) {
    if (!(r.gap > 0.0)) {
      inf = true;
      continue;
    }
    cost = std::max(cost, r.norm / (r.gap * r.gap));
  }
  if (infinite != nullptr) *infinite = inf;
  return inf ? std::numeric_limits<double>::infinity() : cost;
}

TrajectorySummary detect_tau_c(std::span<const TrajectoryRecord> records) {
  if (records.size() < 3) {
    throw ContractViolation("detect_tau_c needs at least 3 records");
  }
  TrajectorySummary s;
  std::size_t i_min = 0;
  std::size_t i_max = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].i_inf < records[i_min].i_inf) i_min = i;
    if (records[i].i_tau > records[i_max].i_tau) i_max = i;
  }
  s.min_i_inf = records[i_min].i_inf;
  s.max_i_tau = records[i_max].i_tau;
  s.tau_max_i_tau = records[i_max].tau;
  s.no_turnover = (i_min + 1 == records.size());
  s.tau_c = records[i_min].tau;
  const double stride = records[1].tau - records[0].tau;
  s.ordering_ok = s.tau_max_i_tau <= s.tau_c + stride + 1e-12;
  s.adiabatic_cost = adiabatic_cost(records, &s.cost_infinite);
  return s;
}

}  // namespace aqite
