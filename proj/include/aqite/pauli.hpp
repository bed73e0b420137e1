#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aqite {

using Complex = std::complex<double>;

inline constexpr double kDefaultPruneTolerance = 1e-12;
inline constexpr int kMaxQubits = 64;

/**
 * A tensor product of single-qubit Paulis in symplectic form.
 *
 * Qubit j carries X iff (x_j, z_j) = (1, 0), Z iff (0, 1), Y iff (1, 1) and
 * the identity iff (0, 0). No phase is stored; phases live in the
 * coefficients of a PauliSum or in a PhasedString.
 */
class PauliString {
 public:
  PauliString() = default;
  PauliString(int n_qubits, std::uint64_t x_bits, std::uint64_t z_bits);

  static PauliString identity(int n_qubits);
  /// Word over {I,X,Y,Z}; character 0 is qubit 0.
  static PauliString from_word(std::string_view word);
  /// Single-qubit Pauli `letter` on `qubit`, identity elsewhere.
  static PauliString single(int n_qubits, int qubit, char letter);

  int n_qubits() const { return n_qubits_; }
  std::uint64_t x_bits() const { return x_; }
  std::uint64_t z_bits() const { return z_; }
  std::uint64_t support_mask() const { return x_ | z_; }
  bool is_identity() const { return (x_ | z_) == 0; }
  int weight() const;
  int y_count() const;
  char letter(int qubit) const;
  std::string word() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString&, const PauliString&) = default;

 private:
  // Member order fixes the canonical ordering used by PauliSum.
  int n_qubits_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

struct PauliStringHash {
  std::size_t operator()(const PauliString& p) const noexcept {
    std::uint64_t h = p.x_bits() * 0x9E3779B97F4A7C15ull;
    h ^= p.z_bits() + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

/// Fourth root of unity i^k, k in {0,1,2,3}.
class Phase {
 public:
  constexpr Phase() = default;
  constexpr explicit Phase(int power) : power_(((power % 4) + 4) % 4) {}
  constexpr int power() const { return power_; }
  Complex value() const;
  friend constexpr bool operator==(Phase, Phase) = default;

 private:
  int power_ = 0;
};

struct PhasedString {
  Phase phase;
  PauliString string;
};

/// p * q = phase * r. Throws DimensionError on mismatched qubit counts.
PhasedString mul_strings(const PauliString& p, const PauliString& q);
bool commutes_strings(const PauliString& p, const PauliString& q);

/**
 * Canonical linear combination of Pauli strings with complex coefficients.
 *
 * Terms are unique, sorted by string, and pruned: no stored coefficient has
 * magnitude below the tolerance used when the sum was built. Values are
 * immutable after construction.
 */
class PauliSum {
 public:
  using Term = std::pair<PauliString, Complex>;

  PauliSum() = default;
  explicit PauliSum(int n_qubits);
  /// Merges duplicates, then prunes at `prune_tol`.
  PauliSum(int n_qubits, std::span<const Term> terms,
           double prune_tol = kDefaultPruneTolerance);
  PauliSum(int n_qubits, std::initializer_list<Term> terms,
           double prune_tol = kDefaultPruneTolerance);

  static PauliSum identity(int n_qubits, Complex coefficient = 1.0);
  static PauliSum from_string(const PauliString& p, Complex coefficient = 1.0);
  /// Convenience: {{"XI", 0.5}, {"ZZ", 1.0}}.
  static PauliSum from_words(
      std::initializer_list<std::pair<std::string_view, Complex>> words);

  int n_qubits() const { return n_qubits_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

  /// Coefficient of `p`, zero when absent.
  Complex coefficient(const PauliString& p) const;
  double max_abs_coefficient() const;
  /// Union of non-identity qubit positions.
  std::uint64_t support_mask() const;
  /// (min, max) qubit of the support; (-1, -1) when the support is empty.
  std::pair<int, int> support_range() const;
  /// Imaginary parts dropped; the result is pruned.
  PauliSum real_part(double prune_tol = kDefaultPruneTolerance) const;
  PauliSum scaled(Complex factor,
                  double prune_tol = kDefaultPruneTolerance) const;

  friend bool operator==(const PauliSum&, const PauliSum&) = default;

  /// Adopts terms that are already unique, sorted and pruned.
  static PauliSum from_canonical(int n_qubits, std::vector<Term> terms);

 private:
  int n_qubits_ = 0;
  std::vector<Term> terms_;
};

/// alpha*a + beta*b.
PauliSum sum_combine(const PauliSum& a, Complex alpha, const PauliSum& b,
                     Complex beta, double prune_tol = kDefaultPruneTolerance);
PauliSum sum_multiply(const PauliSum& a, const PauliSum& b,
                      double prune_tol = kDefaultPruneTolerance);
/// ab - ba.
PauliSum commutator(const PauliSum& a, const PauliSum& b,
                    double prune_tol = kDefaultPruneTolerance);
/// ab + ba.
PauliSum anticommutator(const PauliSum& a, const PauliSum& b,
                        double prune_tol = kDefaultPruneTolerance);
/**
 * {a, b}': the anticommutator when the operators a and b fail to commute,
 * the empty sum when they commute. Commutation is decided on the whole
 * operators by building [a, b] and testing emptiness after pruning.
 */
PauliSum modified_anticommutator(const PauliSum& a, const PauliSum& b,
                                 double prune_tol = kDefaultPruneTolerance);
/// Drops terms with |c| < tol; the summed magnitude of dropped terms is
/// written to `dropped_weight` when non-null.
PauliSum prune(const PauliSum& a, double tol, double* dropped_weight = nullptr);
/// max over terms of |Im(c)|.
double hermiticity_residual(const PauliSum& a);

PauliSum operator+(const PauliSum& a, const PauliSum& b);
PauliSum operator-(const PauliSum& a, const PauliSum& b);
PauliSum operator*(const PauliSum& a, const PauliSum& b);
PauliSum operator*(Complex s, const PauliSum& a);

/// One term per line: `<re> <im> <word>`, canonical order, round-trip exact.
void write_text(std::ostream& os, const PauliSum& a);
std::string to_text(const PauliSum& a);
/// Inverse of write_text. Blank lines and `#` comments are ignored. An
/// empty input needs `n_qubits` to know the width.
PauliSum read_text(std::istream& is, int n_qubits = 0);
PauliSum from_text(std::string_view text, int n_qubits = 0);

}  // namespace aqite
