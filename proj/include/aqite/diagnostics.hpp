#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "aqite/block_operator.hpp"
#include "aqite/dense.hpp"
#include "aqite/model.hpp"

namespace aqite {

/// 1 - |<a|b>|^2 clamped to [0, 1].
double infidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);
double infidelity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct TrajectoryRecord {
  double tau = 0.0;
  double i_tau = 0.0;
  double i_inf = 0.0;
  double gap = 0.0;         // E1 - E0 over the full spectrum
  double gap_sector = 0.0;  // same, restricted to the parity sector of psi0
  double norm = 0.0;        // largest |eigenvalue|
  double e0_residual = 0.0;
  long term_count = 0;      // Pauli strings in the total H~
  int max_support_width = 0;
};

struct TrajectorySummary {
  double tau_c = 0.0;
  double min_i_inf = 1.0;
  double tau_max_i_tau = 0.0;
  double max_i_tau = 0.0;
  double adiabatic_cost = 0.0;
  bool cost_infinite = false;
  bool no_turnover = false;
  /// argmax(i_tau) <= tau_c + one sampling stride.
  bool ordering_ok = true;
};

/// Exact imaginary-time references for one chain: the model Hamiltonian
/// restricted to the parity sector of the initial state.
class ReferenceStates {
 public:
  explicit ReferenceStates(const ModelSpec& model);

  int length() const { return length_; }
  int sector() const { return sector_; }
  const Eigen::VectorXd& psi0() const { return psi0_; }
  /// Normalized e^{-H tau} psi0.
  Eigen::VectorXd psi_tau(double tau) const;
  /// Sector ground state; ties go to the largest overlap with psi0.
  const Eigen::VectorXd& psi_inf() const { return psi_inf_; }
  double ground_energy() const { return e_inf_; }

 private:
  int length_;
  int sector_;
  RealSpectrum h_sector_;
  Eigen::VectorXd psi0_;
  Eigen::VectorXd psi0_sector_;
  Eigen::VectorXd psi_inf_;
  double e_inf_ = 0.0;
};

/// Low-lying spectrum of a real, parity-symmetric H~.
struct SnapshotSpectrum {
  double e0 = 0.0;          // global lowest eigenvalue
  double e1 = 0.0;          // global second eigenvalue
  double e0_sector = 0.0;   // lowest in the psi0 sector
  double e1_sector = 0.0;
  double max_abs = 0.0;
  /// Ground vector chosen by the tie-break; empty when the lowest level lies
  /// strictly in the other sector.
  Eigen::VectorXd phi0;
};

/// Throws ContractViolation for operators with odd-Y strings (complex
/// matrices); the generator never produces them from real inputs.
SnapshotSpectrum analyze_snapshot(const BlockOperator& h_tilde, int sector,
                                  const Eigen::VectorXd& psi0);

/// Assembles a record for H~ at time `tau`.
TrajectoryRecord snapshot_record(const BlockOperator& h_tilde, double tau,
                                 const ReferenceStates& refs,
                                 int max_support_width);

struct SpectralSnapshot {
  double tau = 0.0;
  SpectralDecomposition spectrum;
};

struct LevelFlow {
  int level = 0;  // index at the anchor snapshot
  bool tracked = true;
  double max_rel_error = 0.0;
  std::vector<double> rel_errors;  // per snapshot after the anchor
};

struct EigenvalueFlowReport {
  std::vector<LevelFlow> levels;
  double max_e0_abs = 0.0;
  double max_e0_rel = 0.0;  // |E0| / max|eigenvalue|
};

/// Compares excited levels E_i(tau) with E_i(tau_a) exp(2 int <phi_i|H|phi_i>)
/// by trapezoid quadrature. Levels are followed by maximal successive
/// overlap; a level whose best overlap drops below `overlap_threshold` is
/// flagged untracked. The anchor is the first snapshot after tau = 0, since
/// the excited levels of H~(0) are degenerate.
EigenvalueFlowReport verify_eigenvalue_flow(
    std::span<const SpectralSnapshot> trajectory, const DenseOperator& h,
    int n_levels = 3, double overlap_threshold = 0.7);

/// max norm / gap^2; +inf with `infinite` set when some gap is not positive.
double adiabatic_cost(std::span<const TrajectoryRecord> records,
                      bool* infinite = nullptr);

/// tau_c as the first global minimum of i_inf. Throws ContractViolation for
/// fewer than 3 records.
TrajectorySummary detect_tau_c(std::span<const TrajectoryRecord> records);

}  // namespace aqite
