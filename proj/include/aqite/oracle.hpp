#pragma once

#include <Eigen/Dense>
#include <random>

#include "aqite/pauli.hpp"

namespace aqite::oracle {

// Dense reference arithmetic built from explicit Kronecker products of 2x2
// Pauli matrices. Deliberately shares no code with to_dense().

/// Matrix of a string; qubit 0 is the least significant index bit.
Eigen::MatrixXcd kron_matrix(const PauliString& p);
Eigen::MatrixXcd kron_matrix(const PauliSum& a);

/// Random sum on `n_qubits` with 1..max_terms strings and coefficients in
/// [-1, 1] (plus an imaginary part unless `hermitian`).
PauliSum random_sum(std::mt19937_64& rng, int n_qubits, int max_terms,
                    bool hermitian);

PauliString random_string(std::mt19937_64& rng, int n_qubits);

/// Largest entrywise |a - b|.
double max_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Largest deviation of sum_multiply, commutator, anticommutator and
/// modified_anticommutator from dense arithmetic over `pairs` random
/// Hermitian pairs with 1..max_qubits qubits.
double algebra_max_error(std::uint64_t seed, int pairs, int max_qubits);

}  // namespace aqite::oracle
