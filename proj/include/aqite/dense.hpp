#pragma once

#include <Eigen/Dense>

#include "aqite/pauli.hpp"

namespace aqite {

struct DenseOperator {
  Eigen::MatrixXcd entries;
  bool hermitian = false;

  Eigen::Index dim() const { return entries.rows(); }
};

/// Ascending eigenvalues with orthonormal eigenvector columns.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
};

/// Degeneracy window used by every ground-state tie-break.
inline constexpr double kDegeneracyWindow = 1e-10;

/// Matrix of `a` in the computational basis (bit k of the index is qubit k).
/// The hermitian flag is set when the imaginary residual is below 1e-12.
/// Throws ResourceError above `cap` qubits.
DenseOperator to_dense(const PauliSum& a, int cap = 12);

/// Full decomposition. Throws ContractViolation unless the operator is
/// flagged Hermitian and max |A - A^dagger| < 1e-10.
SpectralDecomposition eig_hermitian(const DenseOperator& a);

/// Largest |eigenvalue|.
double spectral_norm(const DenseOperator& a);

/// e^{-H tau} psi0 / norm, through the eigenbasis with an E_min shift.
Eigen::VectorXcd imaginary_time_state(const DenseOperator& h,
                                      const Eigen::VectorXcd& psi0,
                                      double tau);
Eigen::VectorXcd imaginary_time_state(const SpectralDecomposition& h,
                                      const Eigen::VectorXcd& psi0,
                                      double tau);

/// Unit vector in span(basis) with maximal overlap with `reference`, i.e. the
/// normalized projection. Falls back to the first column when the projection
/// vanishes.
Eigen::VectorXcd max_overlap_vector(const Eigen::MatrixXcd& basis,
                                    const Eigen::VectorXcd& reference);

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXcd state;
};

/// Lowest eigenvector of `h` in the `sector` (+1/-1) eigenspace of `parity`.
/// Ties within kDegeneracyWindow go to the maximal overlap with `reference`.
/// Throws ContractViolation when [h, parity] != 0 or the sector is empty.
GroundState sector_ground_state(const DenseOperator& h,
                                const DenseOperator& parity, int sector,
                                const Eigen::VectorXcd& reference);

// Real fast path for operators with real symmetric matrices that commute
// with the global flip X...X.

/// Matrix of a parity sector in the basis (|s> + sector |~s>)/sqrt2 over
/// representatives s whose top bit is clear.
Eigen::MatrixXd parity_block(const Eigen::MatrixXd& a, int sector);
/// Sector coordinates of a full-space vector (assumed to lie in the sector).
Eigen::VectorXd restrict_to_sector(const Eigen::VectorXd& v, int sector);
/// Full-space vector from sector coordinates.
Eigen::VectorXd embed_from_sector(const Eigen::VectorXd& v, int sector);

/// All eigenvalues of a real symmetric matrix and the eigenvectors of the
/// lowest `n_vectors` of them.
struct PartialSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd low_vectors;
};
PartialSpectrum eig_symmetric_lowest(Eigen::MatrixXd a, int n_vectors);

/// Full real symmetric decomposition.
struct RealSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};
RealSpectrum eig_symmetric(Eigen::MatrixXd a);

/// Real analogue of imaginary_time_state.
Eigen::VectorXd imaginary_time_state(const RealSpectrum& h,
                                     const Eigen::VectorXd& psi0, double tau);

}  // namespace aqite
