#include "aqite/block_operator.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "aqite/errors.hpp"

namespace aqite {

namespace {

constexpr std::uint64_t kEvenBits = 0x5555555555555555ull;
constexpr std::uint64_t kOddBits = 0xAAAAAAAAAAAAAAAAull;

std::size_t pow4(int n) { return std::size_t{1} << (2 * n); }

// Local index of `p` restricted to `sites`.
std::uint64_t local_index(const PauliString& p, SiteBlock sites) {
  std::uint64_t idx = 0;
  for (int k = 0; k < sites.width(); ++k) {
    const int s = sites.lo + k;
    const std::uint64_t x = (p.x_bits() >> s) & 1u;
    const std::uint64_t z = (p.z_bits() >> s) & 1u;
    idx |= (x | (z << 1)) << (2 * k);
  }
  return idx;
}

PauliString global_string(std::uint64_t idx, int chain_length,
                          SiteBlock sites) {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  for (int k = 0; k < sites.width(); ++k) {
    const std::uint64_t code = (idx >> (2 * k)) & 3u;
    x |= (code & 1u) << (sites.lo + k);
    z |= ((code >> 1) & 1u) << (sites.lo + k);
  }
  return PauliString(chain_length, x, z);
}

// i^{#Y} for even #Y, i.e. (-1)^{#Y/2}; odd #Y reported via `odd`.
double even_y_sign(std::uint64_t idx, bool* odd) {
  const int ny = std::popcount(idx & (idx >> 1) & kEvenBits);
  *odd = (ny & 1) != 0;
  return ((ny / 2) % 2 == 0) ? 1.0 : -1.0;
}

// Interleaved (row bit k at 2k, col bit k at 2k+1) -> (row, col).
struct Deinterleave {
  std::array<std::uint8_t, 256> even{};
  std::array<std::uint8_t, 256> odd{};
  Deinterleave() {
    for (int b = 0; b < 256; ++b) {
      int e = 0;
      int o = 0;
      for (int k = 0; k < 4; ++k) {
        e |= ((b >> (2 * k)) & 1) << k;
        o |= ((b >> (2 * k + 1)) & 1) << k;
      }
      even[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(e);
      odd[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(o);
    }
  }
  std::pair<Eigen::Index, Eigen::Index> operator()(std::uint64_t idx) const {
    std::uint64_t r = 0;
    std::uint64_t c = 0;
    for (int byte = 0; idx != 0; ++byte, idx >>= 8) {
      r |= std::uint64_t{even[idx & 0xFF]} << (4 * byte);
      c |= std::uint64_t{odd[idx & 0xFF]} << (4 * byte);
    }
    return {static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)};
  }
};

const Deinterleave& deinterleave() {
  static const Deinterleave table;
  return table;
}

// Per-site butterfly over the four letters at stride 4^k.
template <typename T, typename Fn>
void for_each_site_quad(std::vector<T>& a, int n_sites, Fn&& fn) {
  for (int k = 0; k < n_sites; ++k) {
    const std::size_t stride = pow4(k);
    const std::size_t span = 4 * stride;
    for (std::size_t base = 0; base < a.size(); base += span) {
      for (std::size_t i = 0; i < stride; ++i) {
        T* q = a.data() + base + i;
        fn(q[0], q[stride], q[2 * stride], q[3 * stride]);
      }
    }
  }
}

}  // namespace

BlockOperator::BlockOperator(int chain_length, SiteBlock sites)
    : chain_length_(chain_length), sites_(sites) {
  if (sites.lo < 0 || sites.hi >= chain_length || sites.width() < 1) {
    throw DimensionError("BlockOperator: interval outside chain");
  }
  if (sites.width() > 14) {
    throw ResourceError("BlockOperator: interval of " +
                        std::to_string(sites.width()) +
                        " sites exceeds the dense coefficient limit (14)");
  }
  coeffs_.assign(pow4(sites.width()), 0.0);
}

BlockOperator BlockOperator::from_pauli_sum(const PauliSum& op, SiteBlock sites,
                                            double* max_imag) {
  BlockOperator out(op.n_qubits(), sites);
  std::uint64_t block_mask = 0;
  for (int s = sites.lo; s <= sites.hi; ++s) block_mask |= 1ull << s;
  double imag = 0.0;
  for (const auto& [p, c] : op) {
    if ((p.support_mask() & ~block_mask) != 0) {
      throw DimensionError("BlockOperator: term " + p.word() +
                           " outside interval");
    }
    out.coeffs_[local_index(p, sites)] += c.real();
    imag = std::max(imag, std::abs(c.imag()));
  }
  if (max_imag != nullptr) *max_imag = imag;
  return out;
}

PauliSum BlockOperator::to_pauli_sum(double prune_tol) const {
  std::vector<PauliSum::Term> terms;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const double c = coeffs_[i];
    if (c != 0.0 && std::abs(c) >= prune_tol) {
      terms.emplace_back(global_string(i, chain_length_, sites_), c);
    }
  }
  return PauliSum(chain_length_, terms, 0.0);
}

void BlockOperator::extend_to(SiteBlock larger) {
  if (!larger.contains(sites_)) {
    throw DimensionError("BlockOperator::extend_to: interval must grow");
  }
  if (larger == sites_) return;
  BlockOperator grown(chain_length_, larger);
  accumulate_into(grown);
  *this = std::move(grown);
}

SiteBlock BlockOperator::support() const {
  std::uint64_t used = 0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] != 0.0) used |= i;
  }
  int lo = -1;
  int hi = -1;
  for (int k = 0; k < n_sites(); ++k) {
    if (((used >> (2 * k)) & 3u) != 0) {
      if (lo < 0) lo = sites_.lo + k;
      hi = sites_.lo + k;
    }
  }
  return {lo, hi};
}

std::size_t BlockOperator::count_nonzero() const {
  return static_cast<std::size_t>(
      std::count_if(coeffs_.begin(), coeffs_.end(),
                    [](double c) { return c != 0.0; }));
}

double BlockOperator::max_abs() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

void BlockOperator::prune(double tol) {
  for (double& c : coeffs_) {
    if (std::abs(c) < tol) c = 0.0;
  }
}

bool BlockOperator::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](double c) { return std::isfinite(c); });
}

double BlockOperator::max_parity_violation() const {
  double m = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (std::popcount(i & kOddBits) & 1) m = std::max(m, std::abs(coeffs_[i]));
  }
  return m;
}

double BlockOperator::max_odd_y() const {
  double m = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (std::popcount(i & (i >> 1) & kEvenBits) & 1) {
      m = std::max(m, std::abs(coeffs_[i]));
    }
  }
  return m;
}

void BlockOperator::accumulate_into(BlockOperator& dst, double scale) const {
  if (dst.chain_length_ != chain_length_ || !dst.sites_.contains(sites_)) {
    throw DimensionError("BlockOperator::accumulate_into: bad destination");
  }
  // Our letters occupy a contiguous bit field of the destination index; the
  // extra sites on either side carry the identity (code 0).
  const int shift = 2 * (sites_.lo - dst.sites_.lo);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    dst.coeffs_[i << shift] += scale * coeffs_[i];
  }
}

void BlockOperator::scale(double s) {
  for (double& c : coeffs_) c *= s;
}

void BlockOperator::axpy(double a, const BlockOperator& x) {
  if (x.sites_ != sites_ || x.chain_length_ != chain_length_) {
    throw DimensionError("BlockOperator::axpy: interval mismatch");
  }
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
}

Eigen::MatrixXcd BlockOperator::to_local_matrix() const {
  const int n = n_sites();
  std::vector<Complex> a(coeffs_.begin(), coeffs_.end());
  const Complex i1(0.0, 1.0);
  for_each_site_quad(a, n, [&](Complex& ci, Complex& cx, Complex& cz,
                               Complex& cy) {
    const Complex e00 = ci + cz;
    const Complex e11 = ci - cz;
    const Complex e10 = cx + i1 * cy;
    const Complex e01 = cx - i1 * cy;
    ci = e00;  // rc = row | col << 1
    cx = e10;
    cz = e01;
    cy = e11;
  });
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd m(dim, dim);
  const auto& split = deinterleave();
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    const auto [r, c] = split(idx);
    m(r, c) = a[idx];
  }
  return m;
}

Eigen::MatrixXd BlockOperator::to_local_real_matrix() const {
  const int n = n_sites();
  std::vector<double> a(coeffs_.size());
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    bool odd = false;
    const double s = even_y_sign(idx, &odd);
    if (odd && coeffs_[idx] != 0.0) {
      throw ContractViolation(
          "to_local_real_matrix: operator has odd-Y strings (complex matrix)");
    }
    a[idx] = s * coeffs_[idx];
  }
  for_each_site_quad(a, n, [](double& ci, double& cx, double& cz, double& cy) {
    const double e00 = ci + cz;
    const double e11 = ci - cz;
    const double e10 = cx + cy;
    const double e01 = cx - cy;
    ci = e00;
    cx = e10;
    cz = e01;
    cy = e11;
  });
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd m(dim, dim);
  const auto& split = deinterleave();
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    const auto [r, c] = split(idx);
    m(r, c) = a[idx];
  }
  return m;
}

BlockOperator BlockOperator::from_local_matrix(const Eigen::MatrixXcd& m,
                                               int chain_length,
                                               SiteBlock sites,
                                               double* max_imag) {
  BlockOperator out(chain_length, sites);
  const int n = sites.width();
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (m.rows() != dim || m.cols() != dim) {
    throw DimensionError("from_local_matrix: matrix size does not match");
  }
  std::vector<Complex> a(out.coeffs_.size());
  const auto& split = deinterleave();
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    const auto [r, c] = split(idx);
    a[idx] = m(r, c);
  }
  const Complex half_over_i(0.0, -0.5);
  for_each_site_quad(a, n, [&](Complex& e00, Complex& e10, Complex& e01,
                               Complex& e11) {
    const Complex ci = 0.5 * (e00 + e11);
    const Complex cz = 0.5 * (e00 - e11);
    const Complex cx = 0.5 * (e10 + e01);
    const Complex cy = half_over_i * (e10 - e01);
    e00 = ci;
    e10 = cx;
    e01 = cz;
    e11 = cy;
  });
  double imag = 0.0;
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    out.coeffs_[idx] = a[idx].real();
    imag = std::max(imag, std::abs(a[idx].imag()));
  }
  if (max_imag != nullptr) *max_imag = imag;
  return out;
}

BlockOperator square(const BlockOperator& y, double* max_imag) {
  if (y.max_odd_y() == 0.0) {
    const Eigen::MatrixXd m = y.to_local_real_matrix();
    const Eigen::MatrixXd m2 = m * m;
    // Real symmetric inverse transform; odd-Y output would be imaginary.
    return BlockOperator::from_local_matrix(m2.cast<Complex>(),
                                            y.chain_length(), y.sites(),
                                            max_imag);
  }
  const Eigen::MatrixXcd m = y.to_local_matrix();
  const Eigen::MatrixXcd m2 = m * m;
  return BlockOperator::from_local_matrix(m2, y.chain_length(), y.sites(),
                                          max_imag);
}

LocalMap LocalMap::from_dense(const Eigen::MatrixXd& m, int n_sites) {
  const auto dim = static_cast<Eigen::Index>(pow4(n_sites));
  if (m.rows() != dim || m.cols() != dim) {
    throw DimensionError("LocalMap: matrix must be 4^n square");
  }
  return {n_sites, m};
}

namespace {

// Coefficient groups of a map on legs [leg, leg + m): for a fixed high index
// h and lane i < stride, the 4^m inputs sit at h*block + g*stride + i. With
// stride 1 the groups are the columns of a (4^m x n) matrix; otherwise each
// high index is a (stride x 4^m) matrix with leading dimension stride.
constexpr Eigen::Index kLaneChunk = 512;
constexpr Eigen::Index kColumnChunk = 1024;

using StridedMap = Eigen::Map<Eigen::MatrixXd, 0, Eigen::OuterStride<>>;

double pruned(double v, double tol) { return std::abs(v) < tol ? 0.0 : v; }

// Calls fn(view, rows_are_lanes) over all coefficient groups in chunks; fn
// returns false to stop early.
template <typename Fn>
void for_each_chunk(double* data, std::size_t size, int leg, int m, Fn&& fn) {
  const auto stride = static_cast<Eigen::Index>(pow4(leg));
  const auto group = static_cast<Eigen::Index>(pow4(m));
  const Eigen::Index block = group * stride;
  const Eigen::Index n_high = static_cast<Eigen::Index>(size) / block;
  if (stride == 1) {
    for (Eigen::Index c0 = 0; c0 < n_high; c0 += kColumnChunk) {
      const Eigen::Index nc = std::min(kColumnChunk, n_high - c0);
      StridedMap z(data + c0 * group, group, nc, Eigen::OuterStride<>(group));
      if (!fn(z, false)) return;
    }
    return;
  }
  const Eigen::Index chunk = std::min(stride, kLaneChunk);
  for (Eigen::Index h = 0; h < n_high; ++h) {
    for (Eigen::Index i0 = 0; i0 < stride; i0 += chunk) {
      StridedMap x(data + h * block + i0, chunk, group,
                   Eigen::OuterStride<>(stride));
      if (!fn(x, true)) return;
    }
  }
}

}  // namespace

void apply_local_map(const LocalMap& map, int leg, BlockOperator& y,
                     double prune_tol) {
  if (leg < 0 || leg + map.n_sites > y.n_sites()) {
    throw DimensionError("apply_local_map: legs outside interval");
  }
  const Eigen::MatrixXd mt = map.matrix.transpose();
  Eigen::MatrixXd tmp;
  std::span<double> data = y.coefficients();
  for_each_chunk(data.data(), data.size(), leg, map.n_sites,
                 [&](StridedMap& v, bool lanes) {
                   if (lanes) {
                     tmp.noalias() = v * mt;
                   } else {
                     tmp.noalias() = map.matrix * v;
                   }
                   v = tmp.unaryExpr(
                       [prune_tol](double c) { return pruned(c, prune_tol); });
                   return true;
                 });
}

namespace {

// Whether stacked = [M0; M1] maps y to anything of magnitude >= tol, for each
// half separately.
std::pair<bool, bool> any_large(const Eigen::MatrixXd& stacked, int m, int leg,
                                BlockOperator& y, double tol) {
  const Eigen::Index g = stacked.cols();
  const Eigen::MatrixXd st = stacked.transpose();
  Eigen::MatrixXd tmp;
  bool hit0 = false;
  bool hit1 = false;
  std::span<double> data = y.coefficients();
  for_each_chunk(data.data(), data.size(), leg, m,
                 [&](StridedMap& v, bool lanes) {
                   if (lanes) {
                     tmp.noalias() = v * st;
                     hit0 = hit0 || tmp.leftCols(g).cwiseAbs().maxCoeff() >= tol;
                     hit1 = hit1 || tmp.rightCols(g).cwiseAbs().maxCoeff() >= tol;
                   } else {
                     tmp.noalias() = stacked * v;
                     hit0 = hit0 || tmp.topRows(g).cwiseAbs().maxCoeff() >= tol;
                     hit1 = hit1 || tmp.bottomRows(g).cwiseAbs().maxCoeff() >= tol;
                   }
                   return !(hit0 && hit1);
                 });
  return {hit0, hit1};
}

}  // namespace

BondPropagator::BondPropagator(const PauliSum& h, double eps) {
  const SiteBlock sup = support_block(h);
  if (sup.lo < 0) {
    throw ModelError("BondPropagator: interaction has no support");
  }
  if (sup.width() > 3) {
    throw ModelError("BondPropagator: interaction wider than 3 sites");
  }
  sites_ = sup;
  const int m = sup.width();
  const auto dim = static_cast<Eigen::Index>(pow4(m));
  Eigen::MatrixXd anti = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd comm = Eigen::MatrixXd::Zero(dim, dim);
  const SiteBlock local{0, m - 1};
  for (const auto& [q_global, qc] : h) {
    if (std::abs(qc.imag()) > 0.0) {
      throw ModelError("BondPropagator: interaction must be Hermitian");
    }
    const PauliString q =
        global_string(local_index(q_global, sup), m, local);
    for (Eigen::Index in = 0; in < dim; ++in) {
      const PauliString p =
          global_string(static_cast<std::uint64_t>(in), m, local);
      const PhasedString r = mul_strings(p, q);
      const auto out = static_cast<Eigen::Index>(local_index(r.string, local));
      const Complex w = 2.0 * qc.real() * r.phase.value();
      if (commutes_strings(p, q)) {
        anti(out, in) += w.real();
      } else {
        comm(out, in) += w.imag();
      }
    }
  }
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
  anti_ = LocalMap::from_dense(anti, m);
  comm_ = LocalMap::from_dense(comm, m);
  full_ = LocalMap::from_dense(id + eps * anti + 0.5 * eps * eps * anti * anti,
                               m);
  half_ = LocalMap::from_dense(id + 0.5 * eps * anti, m);
  comm_stage2_ = LocalMap::from_dense(comm + eps * comm * anti, m);
  gate_.resize(2 * dim, dim);
  gate_ << comm_.matrix, comm_stage2_.matrix;
}

void BondPropagator::step_plain(BlockOperator& y, double prune_tol) const {
  if (!y.sites().contains(sites_)) {
    y.extend_to({std::min(y.sites().lo, sites_.lo),
                 std::max(y.sites().hi, sites_.hi)});
  }
  apply_local_map(full_, sites_.lo - y.sites().lo, y, prune_tol);
}

SubstepKind BondPropagator::step_gated(BlockOperator& y, double commute_tol,
                                       double prune_tol) const {
  if (!y.sites().overlaps(sites_)) return SubstepKind::kOutside;
  if (!y.sites().contains(sites_)) {
    y.extend_to({std::min(y.sites().lo, sites_.lo),
                 std::max(y.sites().hi, sites_.hi)});
  }
  const int leg = sites_.lo - y.sites().lo;
  const auto [stage1, stage2] =
      any_large(gate_, sites_.width(), leg, y, commute_tol);
  if (!stage1) return SubstepKind::kFrozen;
  if (!stage2) {
    apply_local_map(half_, leg, y, prune_tol);
    return SubstepKind::kHalf;
  }
  apply_local_map(full_, leg, y, prune_tol);
  return SubstepKind::kFull;
}

}  // namespace aqite
