#include "aqite/model.hpp"

#include <bit>
#include <cmath>

#include "aqite/errors.hpp"

namespace aqite {

std::vector<LocalTerm> build_xxz(const ModelSpec& spec) {
  const int L = spec.length;
  if (L < 2) {
    throw ModelError("XXZ chain needs at least 2 sites, got " +
                     std::to_string(L));
  }
  if (L > kMaxQubits) throw ModelError("XXZ chain longer than 64 sites");
  if (!std::isfinite(spec.lambda_z)) throw ModelError("lambda_z not finite");
  std::vector<LocalTerm> bonds;
  bonds.reserve(static_cast<std::size_t>(L - 1));
  for (int j = 0; j + 1 < L; ++j) {
    const std::uint64_t m = (1ull << j) | (1ull << (j + 1));
    // S = sigma / 2, so each product of two spins carries 1/4.
    PauliSum op(L, {{PauliString(L, m, 0), 0.25},
                    {PauliString(L, m, m), 0.25},
                    {PauliString(L, 0, m), 0.25 * spec.lambda_z}});
    bonds.push_back({std::move(op), j, {j, j + 1}});
  }
  return bonds;
}

std::vector<LocalTerm> build_initial_adiabatic(int length) {
  if (length < 1 || length > kMaxQubits) {
    throw ModelError("initial adiabatic Hamiltonian needs 1..64 sites");
  }
  std::vector<LocalTerm> terms;
  terms.reserve(static_cast<std::size_t>(length));
  for (int j = 0; j < length; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    PauliSum op(length, {{PauliString::single(length, j, 'X'), 0.5 * sign},
                         {PauliString::identity(length), 0.5}});
    terms.push_back({std::move(op), j, {j, j}});
  }
  return terms;
}

Eigen::VectorXcd initial_state(int length) {
  if (length < 1 || length > 30) {
    throw ModelError("initial_state: length must be in [1, 30]");
  }
  const std::size_t dim = std::size_t{1} << length;
  const double amp = std::pow(2.0, -0.5 * length);
  Eigen::VectorXcd psi(static_cast<Eigen::Index>(dim));
  // X eigenvalue -1 on even sites: (|0> - |1>)/sqrt2; +1 on odd sites.
  std::uint64_t even_mask = 0;
  for (int j = 0; j < length; j += 2) even_mask |= 1ull << j;
  for (std::size_t b = 0; b < dim; ++b) {
    const int minus = std::popcount(static_cast<std::uint64_t>(b) & even_mask);
    psi[static_cast<Eigen::Index>(b)] = (minus % 2 == 0) ? amp : -amp;
  }
  return psi;
}

int initial_state_parity(int length) {
  // prod_j (-1)^{j+1} = -1 raised to the number of even sites.
  const int even_sites = (length + 1) / 2;
  return (even_sites % 2 == 0) ? 1 : -1;
}

PauliSum parity_operator(int length) {
  const std::uint64_t all =
      length >= 64 ? ~0ull : ((1ull << length) - 1);
  return PauliSum::from_string(PauliString(length, all, 0));
}

PauliSum total_operator(const std::vector<LocalTerm>& terms) {
  if (terms.empty()) throw ModelError("total_operator: no terms");
  std::vector<PauliSum::Term> all;
  for (const auto& t : terms) {
    all.insert(all.end(), t.op.begin(), t.op.end());
  }
  return PauliSum(terms.front().op.n_qubits(), all);
}

SiteBlock support_block(const PauliSum& op) {
  const auto [lo, hi] = op.support_range();
  return {lo, hi};
}

}  // namespace aqite
