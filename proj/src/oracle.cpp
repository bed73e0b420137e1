#include "aqite/oracle.hpp"

#include <algorithm>

namespace aqite::oracle {

namespace {

Eigen::Matrix2cd single(char letter) {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd m;
  switch (letter) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1;
  }
  return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd kron_matrix(const PauliString& p) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  // Highest qubit first so qubit 0 ends up as the fastest index.
  for (int q = p.n_qubits() - 1; q >= 0; --q) m = kron(m, single(p.letter(q)));
  return m;
}

Eigen::MatrixXcd kron_matrix(const PauliSum& a) {
  const Eigen::Index dim = Eigen::Index{1} << a.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [p, c] : a) m += c * kron_matrix(p);
  return m;
}

PauliString random_string(std::mt19937_64& rng, int n_qubits) {
  const std::uint64_t mask =
      n_qubits == 64 ? ~0ull : ((std::uint64_t{1} << n_qubits) - 1);
  return PauliString(n_qubits, rng() & mask, rng() & mask);
}

PauliSum random_sum(std::mt19937_64& rng, int n_qubits, int max_terms,
                    bool hermitian) {
  std::uniform_int_distribution<int> count(1, max_terms);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<PauliSum::Term> terms;
  const int n = count(rng);
  for (int k = 0; k < n; ++k) {
    const double re = coeff(rng);
    const double im = hermitian ? 0.0 : coeff(rng);
    terms.emplace_back(random_string(rng, n_qubits), Complex(re, im));
  }
  return PauliSum(n_qubits, terms);
}

double max_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

double algebra_max_error(std::uint64_t seed, int pairs, int max_qubits) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> width(1, max_qubits);
  std::bernoulli_distribution share(0.3);
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const int n = width(rng);
    const PauliSum a = random_sum(rng, n, 8, true);
    // Some pairs reuse strings of `a` so commuting cases are exercised.
    const PauliSum b = share(rng) ? a.scaled(0.5) + random_sum(rng, n, 2, true)
                                  : random_sum(rng, n, 8, true);
    const Eigen::MatrixXcd ma = kron_matrix(a);
    const Eigen::MatrixXcd mb = kron_matrix(b);
    const Eigen::MatrixXcd ab = ma * mb;
    const Eigen::MatrixXcd ba = mb * ma;
    const Eigen::MatrixXcd comm = ab - ba;
    const Eigen::MatrixXcd anti = ab + ba;
    const bool commute = comm.cwiseAbs().maxCoeff() < 1e-12;
    const Eigen::MatrixXcd modified =
        commute ? Eigen::MatrixXcd::Zero(ab.rows(), ab.cols()) : anti;
    worst = std::max({worst, max_diff(kron_matrix(sum_multiply(a, b)), ab),
                      max_diff(kron_matrix(commutator(a, b)), comm),
                      max_diff(kron_matrix(anticommutator(a, b)), anti),
                      max_diff(kron_matrix(modified_anticommutator(a, b)),
                               modified)});
  }
  return worst;
}

}  // namespace aqite::oracle
