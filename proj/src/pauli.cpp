#include "aqite/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "aqite/errors.hpp"

namespace aqite {

namespace {

std::uint64_t width_mask(int n) {
  return n >= 64 ? ~0ull : ((1ull << n) - 1);
}

void require_same_width(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": qubit counts differ (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

using Accumulator =
    std::unordered_map<PauliString, Complex, PauliStringHash>;

std::vector<PauliSum::Term> finish(const Accumulator& acc, double prune_tol) {
  std::vector<PauliSum::Term> out;
  out.reserve(acc.size());
  for (const auto& [p, c] : acc) {
    if (std::abs(c) >= prune_tol && c != Complex(0.0)) out.emplace_back(p, c);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace

PauliString::PauliString(int n_qubits, std::uint64_t x_bits,
                         std::uint64_t z_bits)
    : n_qubits_(n_qubits), x_(x_bits), z_(z_bits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw DimensionError("PauliString: qubit count must be in [1, 64], got " +
                         std::to_string(n_qubits));
  }
  if (((x_bits | z_bits) & ~width_mask(n_qubits)) != 0) {
    throw DimensionError("PauliString: bits set beyond qubit count");
  }
}

PauliString PauliString::identity(int n_qubits) {
  return PauliString(n_qubits, 0, 0);
}

PauliString PauliString::from_word(std::string_view word) {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  const int n = static_cast<int>(word.size());
  if (n < 1 || n > kMaxQubits) {
    throw DimensionError("PauliString: word length must be in [1, 64]");
  }
  for (int j = 0; j < n; ++j) {
    const std::uint64_t bit = 1ull << j;
    switch (word[j]) {
      case 'I': case '_': break;
      case 'X': x |= bit; break;
      case 'Z': z |= bit; break;
      case 'Y': x |= bit; z |= bit; break;
      default:
        throw SchemaError(std::string("PauliString: bad letter '") +
                                    word[j] + "'");
    }
  }
  return PauliString(n, x, z);
}

PauliString PauliString::single(int n_qubits, int qubit, char letter) {
  if (qubit < 0 || qubit >= n_qubits) {
    throw DimensionError("PauliString::single: qubit out of range");
  }
  std::string w(static_cast<std::size_t>(n_qubits), 'I');
  w[static_cast<std::size_t>(qubit)] = letter;
  return from_word(w);
}

int PauliString::weight() const { return std::popcount(x_ | z_); }

int PauliString::y_count() const { return std::popcount(x_ & z_); }

char PauliString::letter(int qubit) const {
  const bool x = (x_ >> qubit) & 1;
  const bool z = (z_ >> qubit) & 1;
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

std::string PauliString::word() const {
  std::string w(static_cast<std::size_t>(n_qubits_), 'I');
  for (int j = 0; j < n_qubits_; ++j) w[static_cast<std::size_t>(j)] = letter(j);
  return w;
}

Complex Phase::value() const {
  switch (power_) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// With P = i^{x.z} X^x Z^z per qubit, moving Z^{z1} past X^{x2} costs
// (-1)^{z1.x2}, so p*q = i^{k} r with
// k = |x1&z1| + |x2&z2| + 2|z1&x2| - |x3&z3|  (mod 4).
PhasedString mul_strings(const PauliString& p, const PauliString& q) {
  require_same_width(p.n_qubits(), q.n_qubits(), "mul_strings");
  const std::uint64_t x3 = p.x_bits() ^ q.x_bits();
  const std::uint64_t z3 = p.z_bits() ^ q.z_bits();
  const int k = std::popcount(p.x_bits() & p.z_bits()) +
                std::popcount(q.x_bits() & q.z_bits()) +
                2 * std::popcount(p.z_bits() & q.x_bits()) -
                std::popcount(x3 & z3);
  return {Phase(k), PauliString(p.n_qubits(), x3, z3)};
}

bool commutes_strings(const PauliString& p, const PauliString& q) {
  require_same_width(p.n_qubits(), q.n_qubits(), "commutes_strings");
  const std::uint64_t s =
      (p.x_bits() & q.z_bits()) ^ (p.z_bits() & q.x_bits());
  return (std::popcount(s) & 1) == 0;
}

PauliSum::PauliSum(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw DimensionError("PauliSum: qubit count must be in [1, 64]");
  }
}

PauliSum::PauliSum(int n_qubits, std::span<const Term> terms,
                   double prune_tol)
    : PauliSum(n_qubits) {
  Accumulator acc;
  acc.reserve(terms.size());
  for (const auto& [p, c] : terms) {
    require_same_width(n_qubits, p.n_qubits(), "PauliSum");
    acc[p] += c;
  }
  terms_ = finish(acc, prune_tol);
}

PauliSum::PauliSum(int n_qubits, std::initializer_list<Term> terms,
                   double prune_tol)
    : PauliSum(n_qubits, std::span<const Term>(terms.begin(), terms.size()),
               prune_tol) {}

PauliSum PauliSum::from_canonical(int n_qubits, std::vector<Term> terms) {
  PauliSum out(n_qubits);
  out.terms_ = std::move(terms);
  return out;
}

PauliSum PauliSum::identity(int n_qubits, Complex coefficient) {
  return PauliSum(n_qubits, {{PauliString::identity(n_qubits), coefficient}});
}

PauliSum PauliSum::from_string(const PauliString& p, Complex coefficient) {
  return PauliSum(p.n_qubits(), {{p, coefficient}});
}

PauliSum PauliSum::from_words(
    std::initializer_list<std::pair<std::string_view, Complex>> words) {
  if (words.size() == 0) {
    throw DimensionError("PauliSum::from_words: need at least one word");
  }
  std::vector<Term> terms;
  for (const auto& [w, c] : words) {
    terms.emplace_back(PauliString::from_word(w), c);
  }
  return PauliSum(terms.front().first.n_qubits(), terms);
}

Complex PauliSum::coefficient(const PauliString& p) const {
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), p,
      [](const Term& t, const PauliString& key) { return t.first < key; });
  if (it != terms_.end() && it->first == p) return it->second;
  return 0.0;
}

double PauliSum::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [p, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

std::uint64_t PauliSum::support_mask() const {
  std::uint64_t m = 0;
  for (const auto& [p, c] : terms_) m |= p.support_mask();
  return m;
}

std::pair<int, int> PauliSum::support_range() const {
  const std::uint64_t m = support_mask();
  if (m == 0) return {-1, -1};
  return {std::countr_zero(m), 63 - std::countl_zero(m)};
}

PauliSum PauliSum::real_part(double prune_tol) const {
  std::vector<Term> t;
  t.reserve(terms_.size());
  for (const auto& [p, c] : terms_) t.emplace_back(p, Complex(c.real(), 0.0));
  return PauliSum(n_qubits_, t, prune_tol);
}

PauliSum PauliSum::scaled(Complex factor, double prune_tol) const {
  std::vector<Term> t;
  t.reserve(terms_.size());
  for (const auto& [p, c] : terms_) t.emplace_back(p, factor * c);
  return PauliSum(n_qubits_, t, prune_tol);
}

PauliSum sum_combine(const PauliSum& a, Complex alpha, const PauliSum& b,
                     Complex beta, double prune_tol) {
  require_same_width(a.n_qubits(), b.n_qubits(), "sum_combine");
  Accumulator acc;
  acc.reserve(a.size() + b.size());
  for (const auto& [p, c] : a) acc[p] += alpha * c;
  for (const auto& [p, c] : b) acc[p] += beta * c;
  return PauliSum::from_canonical(a.n_qubits(), finish(acc, prune_tol));
}

namespace {

// sign = +1 accumulates ab + ba, -1 gives ab - ba, 0 gives ab alone.
PauliSum product_combination(const PauliSum& a, const PauliSum& b, int sign,
                             double prune_tol, const char* what) {
  require_same_width(a.n_qubits(), b.n_qubits(), what);
  Accumulator acc;
  acc.reserve(a.size() * b.size());
  for (const auto& [p, cp] : a) {
    for (const auto& [q, cq] : b) {
      if (sign != 0) {
        // pq = +-qp; the pair contributes 2pq or nothing.
        const bool commute = commutes_strings(p, q);
        if ((sign > 0) != commute) continue;
        const PhasedString r = mul_strings(p, q);
        acc[r.string] += 2.0 * cp * cq * r.phase.value();
      } else {
        const PhasedString r = mul_strings(p, q);
        acc[r.string] += cp * cq * r.phase.value();
      }
    }
  }
  return PauliSum::from_canonical(a.n_qubits(), finish(acc, prune_tol));
}

}  // namespace

PauliSum sum_multiply(const PauliSum& a, const PauliSum& b, double prune_tol) {
  return product_combination(a, b, 0, prune_tol, "sum_multiply");
}

PauliSum commutator(const PauliSum& a, const PauliSum& b, double prune_tol) {
  return product_combination(a, b, -1, prune_tol, "commutator");
}

PauliSum anticommutator(const PauliSum& a, const PauliSum& b,
                        double prune_tol) {
  return product_combination(a, b, +1, prune_tol, "anticommutator");
}

PauliSum modified_anticommutator(const PauliSum& a, const PauliSum& b,
                                 double prune_tol) {
  if (commutator(a, b, prune_tol).empty()) return PauliSum(a.n_qubits());
  return anticommutator(a, b, prune_tol);
}

PauliSum prune(const PauliSum& a, double tol, double* dropped_weight) {
  double dropped = 0.0;
  std::vector<PauliSum::Term> kept;
  kept.reserve(a.size());
  for (const auto& t : a) {
    if (std::abs(t.second) < tol) {
      dropped += std::abs(t.second);
    } else {
      kept.push_back(t);
    }
  }
  if (dropped_weight != nullptr) *dropped_weight = dropped;
  return PauliSum::from_canonical(a.n_qubits(), std::move(kept));
}

double hermiticity_residual(const PauliSum& a) {
  double r = 0.0;
  for (const auto& [p, c] : a) r = std::max(r, std::abs(c.imag()));
  return r;
}

PauliSum operator+(const PauliSum& a, const PauliSum& b) {
  return sum_combine(a, 1.0, b, 1.0);
}

PauliSum operator-(const PauliSum& a, const PauliSum& b) {
  return sum_combine(a, 1.0, b, -1.0);
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  return sum_multiply(a, b);
}

PauliSum operator*(Complex s, const PauliSum& a) { return a.scaled(s); }

void write_text(std::ostream& os, const PauliSum& a) {
  char buf[64];
  for (const auto& [p, c] : a) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g ", c.real(), c.imag());
    os << buf << p.word() << '\n';
  }
}

std::string to_text(const PauliSum& a) {
  std::ostringstream os;
  write_text(os, a);
  return os.str();
}

PauliSum read_text(std::istream& is, int n_qubits) {
  std::vector<PauliSum::Term> terms;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double re = 0.0;
    double im = 0.0;
    std::string word;
    if (!(ls >> re)) {
      std::string rest;
      std::istringstream probe(line);
      if (probe >> rest) {
        throw SchemaError("PauliSum text: bad line " +
                                    std::to_string(line_no));
      }
      continue;
    }
    if (!(ls >> im >> word)) {
      throw SchemaError("PauliSum text: bad line " +
                                  std::to_string(line_no));
    }
    PauliString p = PauliString::from_word(word);
    if (n_qubits == 0) n_qubits = p.n_qubits();
    require_same_width(n_qubits, p.n_qubits(), "read_text");
    terms.emplace_back(p, Complex(re, im));
  }
  if (n_qubits == 0) {
    throw DimensionError("PauliSum text: empty input needs an explicit width");
  }
  // Exact round trip: no pruning on read.
  return PauliSum(n_qubits, terms, 0.0);
}

PauliSum from_text(std::string_view text, int n_qubits) {
  std::istringstream is{std::string(text)};
  return read_text(is, n_qubits);
}

}  // namespace aqite
