#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aqite/pauli.hpp"

namespace aqite {

/// Closed interval of lattice sites [lo, hi].
struct SiteBlock {
  int lo = 0;
  int hi = 0;

  int width() const { return hi - lo + 1; }
  bool contains(int site) const { return lo <= site && site <= hi; }
  bool contains(const SiteBlock& other) const {
    return lo <= other.lo && other.hi <= hi;
  }
  bool overlaps(const SiteBlock& other) const {
    return lo <= other.hi && other.lo <= hi;
  }
  friend bool operator==(const SiteBlock&, const SiteBlock&) = default;
};

/// One local Hermitian term together with its lattice bookkeeping.
struct LocalTerm {
  PauliSum op;
  int home_site = 0;
  SiteBlock block;
};

enum class Boundary { kOpen };

/// Open-boundary XXZ chain, H = sum_j S^x S^x + S^y S^y + lambda_z S^z S^z.
struct ModelSpec {
  int length = 8;
  double lambda_z = 2.0;
  Boundary boundary = Boundary::kOpen;
};

/// Bond terms (1/4)(X_j X_{j+1} + Y_j Y_{j+1} + lambda_z Z_j Z_{j+1}) for
/// j = 0..L-2, in ascending bond order. Throws ModelError when L < 2.
std::vector<LocalTerm> build_xxz(const ModelSpec& spec);

/// Single-site terms (-1)^j X_j / 2 + I / 2; each is a 0/1 projector.
std::vector<LocalTerm> build_initial_adiabatic(int length);

/// Product state annihilated by every initial adiabatic term: qubit j is the
/// X eigenstate with eigenvalue (-1)^{j+1}. Basis index bit j is qubit j.
Eigen::VectorXcd initial_state(int length);

/// Eigenvalue of the global flip X...X on initial_state(length).
int initial_state_parity(int length);

/// X on every qubit, coefficient 1.
PauliSum parity_operator(int length);

/// Sum of the ops of `terms` (all must share a width).
PauliSum total_operator(const std::vector<LocalTerm>& terms);

/// Interval of the support of `op`; {-1, -1} marks an identity-only op.
SiteBlock support_block(const PauliSum& op);

}  // namespace aqite
