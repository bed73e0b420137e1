#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "aqite/model.hpp"
#include "aqite/pauli.hpp"

namespace aqite {

/**
 * Hermitian operator on an L-site chain stored as a dense array of real Pauli
 * coefficients over a contiguous site interval.
 *
 * The letter on site `sites().lo + k` occupies index bits 2k (x) and 2k+1
 * (z), so I=0, X=1, Z=2, Y=3. Sites outside the interval carry the identity.
 * This is the working representation of the generator engine; PauliSum is
 * the exchange format.
 */
class BlockOperator {
 public:
  BlockOperator() = default;
  /// Zero operator on `sites`.
  BlockOperator(int chain_length, SiteBlock sites);

  /// Throws DimensionError if `op` has support outside `sites`. Imaginary
  /// parts are dropped; the largest one is written to `max_imag`.
  static BlockOperator from_pauli_sum(const PauliSum& op, SiteBlock sites,
                                      double* max_imag = nullptr);
  PauliSum to_pauli_sum(double prune_tol = 0.0) const;

  int chain_length() const { return chain_length_; }
  SiteBlock sites() const { return sites_; }
  int n_sites() const { return sites_.width(); }
  std::size_t size() const { return coeffs_.size(); }
  std::span<double> coefficients() { return coeffs_; }
  std::span<const double> coefficients() const { return coeffs_; }

  /// Re-embeds on a larger interval with identity on the new sites.
  void extend_to(SiteBlock larger);
  /// Actual support; {-1, -1} when only the identity component is nonzero.
  SiteBlock support() const;
  std::size_t count_nonzero() const;
  double max_abs() const;
  /// Zeroes every coefficient with |c| < tol.
  void prune(double tol);
  bool all_finite() const;
  /// Largest |c| over strings that anticommute with the global X flip.
  double max_parity_violation() const;
  /// Largest |c| over strings with an odd number of Y letters.
  double max_odd_y() const;
  /// dst += scale * this; dst's interval must contain ours.
  void accumulate_into(BlockOperator& dst, double scale = 1.0) const;
  void scale(double s);
  void axpy(double a, const BlockOperator& x);  // this += a * x, same sites

  /// Dense 2^n x 2^n matrix on the interval (row bit k = site lo + k).
  Eigen::MatrixXcd to_local_matrix() const;
  /// Real matrix when no odd-Y string is present, using Y = i * [[0,-1],[1,0]].
  Eigen::MatrixXd to_local_real_matrix() const;
  /// Pauli projection c_P = Tr(P M) / 2^n; the largest discarded imaginary
  /// part goes to `max_imag`.
  static BlockOperator from_local_matrix(const Eigen::MatrixXcd& m,
                                         int chain_length, SiteBlock sites,
                                         double* max_imag = nullptr);

 private:
  int chain_length_ = 0;
  SiteBlock sites_{0, -1};
  std::vector<double> coeffs_;
};

/// Letter code of a site within a BlockOperator index.
inline int letter_code(std::uint64_t index, int k) {
  return static_cast<int>((index >> (2 * k)) & 3u);
}

/// y * y for a Hermitian y, via the local dense matrix.
BlockOperator square(const BlockOperator& y, double* max_imag = nullptr);

/// Real linear map on the Pauli coefficients of a few contiguous sites.
struct LocalMap {
  int n_sites = 0;
  Eigen::MatrixXd matrix;  // 4^n x 4^n, (out, in)

  static LocalMap from_dense(const Eigen::MatrixXd& m, int n_sites);
};

/// Outcome of one gated RK2 substep.
enum class SubstepKind {
  kFrozen,   // [y, h] = 0: y unchanged
  kHalf,     // [y, h] != 0 but [y + eps F(y), h] = 0
  kFull,     // both stages active
  kOutside,  // h acts outside y's interval, so they commute trivially
};

/**
 * RK2 (Heun) substep maps for dy/dtau = {y, h} or {y, h}' with a fixed
 * Hermitian h on a few contiguous sites.
 *
 * Because {., h} only touches the legs of h, one Heun step is the fixed local
 * map I + eps A + eps^2/2 A^2 applied to every coefficient group. The gate
 * needs [y, h] and [y + eps A y, h], both local maps as well.
 */
class BondPropagator {
 public:
  BondPropagator(const PauliSum& h, double eps);

  SiteBlock sites() const { return sites_; }
  const LocalMap& anticommutator_map() const { return anti_; }
  /// Im-coefficients of [y, h] (the commutator of Hermitians is i * real).
  const LocalMap& commutator_map() const { return comm_; }

  /// Plain Heun step for {y, h}. `y` must contain sites().
  void step_plain(BlockOperator& y, double prune_tol) const;
  /// Heun step for {y, h}'; commutation decided at `commute_tol`. Extends
  /// y's interval when h overlaps it only partially.
  SubstepKind step_gated(BlockOperator& y, double commute_tol,
                         double prune_tol) const;

 private:
  SiteBlock sites_;
  LocalMap anti_;
  LocalMap comm_;
  LocalMap full_;         // I + eps A + eps^2/2 A^2
  LocalMap half_;         // I + eps/2 A
  LocalMap comm_stage2_;  // C + eps C A
  Eigen::MatrixXd gate_;  // [C; C + eps C A] stacked
};

/// Applies `map` to the legs starting at interval offset `leg` of `y`.
void apply_local_map(const LocalMap& map, int leg, BlockOperator& y,
                     double prune_tol);

}  // namespace aqite
