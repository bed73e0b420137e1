#include "aqite/dense.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "aqite/errors.hpp"

namespace aqite {

DenseOperator to_dense(const PauliSum& a, int cap) {
  const int n = a.n_qubits();
  if (n > cap) {
    throw ResourceError("to_dense: " + std::to_string(n) +
                        " qubits exceeds the dense cap " + std::to_string(cap));
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  DenseOperator out;
  out.entries = Eigen::MatrixXcd::Zero(dim, dim);
  const Complex powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (const auto& [p, c] : a) {
    // P|col> = i^{#Y} (-1)^{|col & z|} |col ^ x>.
    const Complex base = c * powers[p.y_count() % 4];
    const std::uint64_t x = p.x_bits();
    const std::uint64_t z = p.z_bits();
    for (Eigen::Index col = 0; col < dim; ++col) {
      const auto ucol = static_cast<std::uint64_t>(col);
      const bool flip = std::popcount(ucol & z) & 1;
      out.entries(static_cast<Eigen::Index>(ucol ^ x), col) +=
          flip ? -base : base;
    }
  }
  out.hermitian = hermiticity_residual(a) < 1e-12;
  return out;
}

SpectralDecomposition eig_hermitian(const DenseOperator& a) {
  if (!a.hermitian) {
    throw ContractViolation("eig_hermitian: operator not flagged Hermitian");
  }
  const double asym = (a.entries - a.entries.adjoint()).cwiseAbs().maxCoeff();
  if (asym >= 1e-10) {
    throw ContractViolation("eig_hermitian: |A - A^dagger| = " +
                            std::to_string(asym));
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.entries);
  if (es.info() != Eigen::Success) {
    throw NumericError("eig_hermitian: eigensolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

double spectral_norm(const DenseOperator& a) {
  const auto d = eig_hermitian(a);
  return std::max(std::abs(d.eigenvalues(0)),
                  std::abs(d.eigenvalues(d.eigenvalues.size() - 1)));
}

Eigen::VectorXcd imaginary_time_state(const SpectralDecomposition& h,
                                      const Eigen::VectorXcd& psi0,
                                      double tau) {
  if (!(tau >= 0.0)) throw NumericError("imaginary_time_state: tau < 0");
  if (psi0.size() != h.eigenvectors.rows()) {
    throw DimensionError("imaginary_time_state: state dimension mismatch");
  }
  const double e_min = h.eigenvalues.minCoeff();
  Eigen::VectorXcd amps = h.eigenvectors.adjoint() * psi0;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    amps(i) *= std::exp(-(h.eigenvalues(i) - e_min) * tau);
  }
  Eigen::VectorXcd out = h.eigenvectors * amps;
  const double nrm = out.norm();
  if (!(nrm > 1e-300)) {
    throw NumericError("imaginary_time_state: state has zero norm");
  }
  return out / nrm;
}

Eigen::VectorXcd imaginary_time_state(const DenseOperator& h,
                                      const Eigen::VectorXcd& psi0,
                                      double tau) {
  return imaginary_time_state(eig_hermitian(h), psi0, tau);
}

Eigen::VectorXcd max_overlap_vector(const Eigen::MatrixXcd& basis,
                                    const Eigen::VectorXcd& reference) {
  if (basis.cols() == 0) {
    throw ContractViolation("max_overlap_vector: empty basis");
  }
  const Eigen::VectorXcd proj = basis * (basis.adjoint() * reference);
  const double nrm = proj.norm();
  if (nrm < 1e-12) return basis.col(0);
  return proj / nrm;
}

GroundState sector_ground_state(const DenseOperator& h,
                                const DenseOperator& parity, int sector,
                                const Eigen::VectorXcd& reference) {
  if (sector != 1 && sector != -1) {
    throw ContractViolation("sector_ground_state: sector must be +1 or -1");
  }
  if (h.dim() != parity.dim() || reference.size() != h.dim()) {
    throw DimensionError("sector_ground_state: dimension mismatch");
  }
  const double comm = (h.entries * parity.entries -
                       parity.entries * h.entries).cwiseAbs().maxCoeff();
  if (comm >= 1e-10) {
    throw ContractViolation("sector_ground_state: [H, parity] = " +
                            std::to_string(comm));
  }
  const auto pd = eig_hermitian(parity);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < pd.eigenvalues.size(); ++i) {
    if (std::abs(pd.eigenvalues(i) - sector) < 1e-8) cols.push_back(i);
  }
  if (cols.empty()) throw ContractViolation("sector_ground_state: empty sector");
  Eigen::MatrixXcd q(h.dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    q.col(static_cast<Eigen::Index>(k)) = pd.eigenvectors.col(cols[k]);
  }
  DenseOperator hs;
  hs.entries = q.adjoint() * h.entries * q;
  hs.entries = 0.5 * (hs.entries + hs.entries.adjoint()).eval();
  hs.hermitian = true;
  const auto d = eig_hermitian(hs);
  const double e0 = d.eigenvalues(0);
  Eigen::Index k = 1;
  while (k < d.eigenvalues.size() &&
         d.eigenvalues(k) - e0 <= kDegeneracyWindow) {
    ++k;
  }
  const Eigen::MatrixXcd cluster = q * d.eigenvectors.leftCols(k);
  return {e0, max_overlap_vector(cluster, reference)};
}

Eigen::MatrixXd parity_block(const Eigen::MatrixXd& a, int sector) {
  const Eigen::Index dim = a.rows();
  if (a.cols() != dim || dim < 2 || (dim & (dim - 1)) != 0) {
    throw DimensionError("parity_block: matrix must be 2^L square, L >= 1");
  }
  const Eigen::Index half = dim / 2;
  const Eigen::Index all = dim - 1;
  const double s = sector;
  Eigen::MatrixXd out(half, half);
  for (Eigen::Index t = 0; t < half; ++t) {
    for (Eigen::Index r = 0; r < half; ++r) {
      out(r, t) = a(r, t) + s * a(r, t ^ all);
    }
  }
  return out;
}

Eigen::VectorXd restrict_to_sector(const Eigen::VectorXd& v, int sector) {
  const Eigen::Index half = v.size() / 2;
  const Eigen::Index all = v.size() - 1;
  Eigen::VectorXd out(half);
  for (Eigen::Index s = 0; s < half; ++s) {
    out(s) = (v(s) + sector * v(s ^ all)) * M_SQRT1_2;
  }
  return out;
}

Eigen::VectorXd embed_from_sector(const Eigen::VectorXd& v, int sector) {
  const Eigen::Index half = v.size();
  const Eigen::Index all = 2 * half - 1;
  Eigen::VectorXd out(2 * half);
  for (Eigen::Index s = 0; s < half; ++s) {
    out(s) = v(s) * M_SQRT1_2;
    out(s ^ all) = sector * v(s) * M_SQRT1_2;
  }
  return out;
}

namespace {

// LU factors of T - shift I for a symmetric tridiagonal T, with partial
// pivoting (one row interchange per column, second superdiagonal fill-in).
struct TridiagonalLU {
  Eigen::VectorXd u0, u1, u2, mult;
  std::vector<char> swapped;

  TridiagonalLU(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                double shift, double tiny) {
    const Eigen::Index n = d.size();
    u0.resize(n);
    u1 = Eigen::VectorXd::Zero(n);
    u2 = Eigen::VectorXd::Zero(n);
    mult = Eigen::VectorXd::Zero(n);
    swapped.assign(static_cast<std::size_t>(n), 0);
    auto guard = [tiny](double v) {
      return std::abs(v) < tiny ? (v < 0 ? -tiny : tiny) : v;
    };
    double w0 = d(0) - shift;
    double w1 = n > 1 ? e(0) : 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double a = e(i);
      const double b = d(i + 1) - shift;
      const double c = i + 2 < n ? e(i + 1) : 0.0;
      if (std::abs(w0) >= std::abs(a)) {
        w0 = guard(w0);
        u0(i) = w0;
        u1(i) = w1;
        const double m = a / w0;
        mult(i) = m;
        w0 = b - m * w1;
        w1 = c;
      } else {
        swapped[static_cast<std::size_t>(i)] = 1;
        u0(i) = a;
        u1(i) = b;
        u2(i) = c;
        const double m = w0 / a;
        mult(i) = m;
        w0 = w1 - m * b;
        w1 = -m * c;
      }
    }
    u0(n - 1) = guard(w0);
  }

  void solve(Eigen::VectorXd& y) const {
    const Eigen::Index n = y.size();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (swapped[static_cast<std::size_t>(i)]) std::swap(y(i), y(i + 1));
      y(i + 1) -= mult(i) * y(i);
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      double v = y(i);
      if (i + 1 < n) v -= u1(i) * y(i + 1);
      if (i + 2 < n) v -= u2(i) * y(i + 2);
      y(i) = v / u0(i);
    }
  }
};

// Eigenvectors of a symmetric tridiagonal matrix for the given eigenvalues
// by inverse iteration, orthogonalizing within clusters.
Eigen::MatrixXd tridiagonal_vectors(const Eigen::VectorXd& d,
                                    const Eigen::VectorXd& e,
                                    const Eigen::VectorXd& lambdas) {
  const Eigen::Index n = d.size();
  const Eigen::Index k = lambdas.size();
  double tnorm = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = std::abs(d(i));
    if (i > 0) row += std::abs(e(i - 1));
    if (i + 1 < n) row += std::abs(e(i));
    tnorm = std::max(tnorm, row);
  }
  tnorm = std::max(tnorm, 1e-300);
  const double eps = std::numeric_limits<double>::epsilon();
  const double tiny = eps * tnorm;
  const double cluster_tol = 1e-3 * tnorm;
  Eigen::MatrixXd z(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const TridiagonalLU lu(d, e, lambdas(j), tiny);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i) = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i + 1) +
                                  1.3 * static_cast<double>(j));
    }
    for (int it = 0; it < 4; ++it) {
      lu.solve(x);
      for (Eigen::Index p = 0; p < j; ++p) {
        if (std::abs(lambdas(j) - lambdas(p)) < cluster_tol) {
          x -= z.col(p).dot(x) * z.col(p);
        }
      }
      const double nrm = x.norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        throw NumericError("inverse iteration failed");
      }
      x /= nrm;
    }
    z.col(j) = x;
  }
  return z;
}

}  // namespace

PartialSpectrum eig_symmetric_lowest(Eigen::MatrixXd a, int n_vectors) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || n < 1) {
    throw DimensionError("eig_symmetric_lowest: matrix must be square");
  }
  const Eigen::Index k = std::clamp<Eigen::Index>(n_vectors, 0, n);
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(std::move(a));
  const Eigen::VectorXd d = tri.diagonal();
  const Eigen::VectorXd e = tri.subDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericError("tridiagonal eigensolver did not converge");
  }
  PartialSpectrum out;
  out.eigenvalues = es.eigenvalues();
  if (k == 0) return out;
  const Eigen::MatrixXd z = tridiagonal_vectors(d, e, out.eigenvalues.head(k));
  out.low_vectors = tri.matrixQ() * z;
  return out;
}

RealSpectrum eig_symmetric(Eigen::MatrixXd a) {
  if (a.cols() != a.rows() || a.rows() < 1) {
    throw DimensionError("eig_symmetric: matrix must be square");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) {
    throw NumericError("eig_symmetric: eigensolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::VectorXd imaginary_time_state(const RealSpectrum& h,
                                     const Eigen::VectorXd& psi0, double tau) {
  if (!(tau >= 0.0)) throw NumericError("imaginary_time_state: tau < 0");
  if (psi0.size() != h.eigenvectors.rows()) {
    throw DimensionError("imaginary_time_state: state dimension mismatch");
  }
  const double e_min = h.eigenvalues.minCoeff();
  Eigen::VectorXd amps = h.eigenvectors.transpose() * psi0;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    amps(i) *= std::exp(-(h.eigenvalues(i) - e_min) * tau);
  }
  Eigen::VectorXd out = h.eigenvectors * amps;
  const double nrm = out.norm();
  if (!(nrm > 1e-300)) {
    throw NumericError("imaginary_time_state: state has zero norm");
  }
  return out / nrm;
}

}  // namespace aqite
