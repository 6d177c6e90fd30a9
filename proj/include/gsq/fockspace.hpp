#pragma once

// Truncated number-basis linear algebra: ladder operators, the Hermitian
// operator H_k = i r (a†^k - a^k), the phase operator G_k, and the action of
// exp(τ(a†^k - a^k)) by adaptive Runge–Kutta integration.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gsq/errors.hpp"

namespace gsq {

using cplx = std::complex<double>;

/// Truncated state Σ_{n<dim} amps[n] |n⟩.
class FockVector {
 public:
  static constexpr double kGuardFraction = 0.1;

  FockVector() = default;

  explicit FockVector(std::size_t dim) : amps_(dim, cplx{0.0, 0.0}) {
    if (dim == 0) detail::raise_domain("FockVector", "dimension must be positive");
  }

  explicit FockVector(std::vector<cplx> amps) : amps_(std::move(amps)) {
    if (amps_.empty()) detail::raise_domain("FockVector", "dimension must be positive");
    for (const auto& a : amps_)
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        detail::raise_domain("FockVector", "amplitudes must be finite");
  }

  static FockVector basis(std::size_t dim, std::size_t n) {
    if (n >= dim) detail::raise_domain("FockVector::basis", "index outside the truncated basis");
    FockVector v(dim);
    v.amps_[n] = 1.0;
    return v;
  }

  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const cplx> amps() const noexcept { return amps_; }
  const cplx& operator[](std::size_t n) const { return amps_[n]; }

  double norm2() const noexcept {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }
  double norm() const noexcept { return std::sqrt(norm2()); }

  /// First index of the guard band (top `fraction` of the basis).
  std::size_t guard_begin(double fraction = kGuardFraction) const noexcept {
    const auto width = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(dim())));
    return dim() - std::min(width, dim());
  }

  /// Squared norm carried by the guard band.
  double tail_mass(double fraction = kGuardFraction) const noexcept {
    double s = 0.0;
    for (std::size_t n = guard_begin(fraction); n < dim(); ++n) s += std::norm(amps_[n]);
    return s;
  }

  std::vector<cplx> take() && { return std::move(amps_); }

 private:
  std::vector<cplx> amps_;
};

inline double max_abs_diff(const FockVector& a, const FockVector& b, std::size_t upto = static_cast<std::size_t>(-1)) {
  if (a.dim() != b.dim()) detail::raise_domain("max_abs_diff", "dimension mismatch");
  double m = 0.0;
  for (std::size_t n = 0; n < std::min(upto, a.dim()); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

inline double l2_diff(const FockVector& a, const FockVector& b, std::size_t upto = static_cast<std::size_t>(-1)) {
  if (a.dim() != b.dim()) detail::raise_domain("l2_diff", "dimension mismatch");
  double s = 0.0;
  for (std::size_t n = 0; n < std::min(upto, a.dim()); ++n) s += std::norm(a[n] - b[n]);
  return std::sqrt(s);
}

/// Banded matrix stored by diagonals. Diagonal `offset` d holds the entries
/// ⟨n+d|O|n⟩ for every column n with 0 <= n+d < dim, indexed from the first
/// valid column.
struct Diagonal {
  int offset = 0;
  std::vector<cplx> values;
};

class BandedOperator {
 public:
  BandedOperator(std::size_t dim, std::vector<Diagonal> diagonals, bool hermitian)
      : dim_(dim), diagonals_(std::move(diagonals)), hermitian_(hermitian) {
    for (const auto& d : diagonals_) {
      if (static_cast<std::size_t>(std::abs(d.offset)) >= dim_ ||
          d.values.size() != dim_ - static_cast<std::size_t>(std::abs(d.offset)))
        detail::raise_domain("BandedOperator", "diagonal length does not match offset and dimension");
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  bool hermitian() const noexcept { return hermitian_; }
  const std::vector<Diagonal>& diagonals() const noexcept { return diagonals_; }

  std::vector<int> offsets() const {
    std::vector<int> out;
    for (const auto& d : diagonals_) out.push_back(d.offset);
    return out;
  }

  /// ⟨row|O|col⟩.
  cplx entry(std::size_t row, std::size_t col) const {
    const long off = static_cast<long>(row) - static_cast<long>(col);
    cplx v{0.0, 0.0};
    for (const auto& d : diagonals_) {
      if (d.offset != off) continue;
      const std::size_t first_col = d.offset < 0 ? static_cast<std::size_t>(-d.offset) : 0;
      v += d.values[col - first_col];
    }
    return v;
  }

  /// out += coeff * O v, on raw spans of matching length.
  void accumulate(std::span<const cplx> in, std::span<cplx> out, cplx coeff = 1.0) const {
    for (const auto& d : diagonals_) {
      const std::size_t first_col = d.offset < 0 ? static_cast<std::size_t>(-d.offset) : 0;
      const std::size_t count = d.values.size();
      const cplx* src = in.data() + first_col;
      cplx* dst = out.data() + first_col + d.offset;
      for (std::size_t i = 0; i < count; ++i) dst[i] += coeff * d.values[i] * src[i];
    }
  }

 private:
  std::size_t dim_;
  std::vector<Diagonal> diagonals_;
  bool hermitian_;
};

struct LadderPair {
  BandedOperator a;
  BandedOperator a_dag;
};

inline LadderPair build_ladder(std::size_t dim) {
  if (dim < 2) detail::raise_domain("build_ladder", "dimension must be at least 2");
  std::vector<cplx> vals(dim - 1);
  for (std::size_t n = 0; n + 1 < dim; ++n) vals[n] = std::sqrt(static_cast<double>(n + 1));
  return {BandedOperator(dim, {Diagonal{-1, vals}}, false), BandedOperator(dim, {Diagonal{+1, vals}}, false)};
}

namespace detail {

/// √((n+1)(n+2)...(n+k)) for n = 0..dim-k-1.
inline std::vector<double> raising_elements(int k, std::size_t dim) {
  std::vector<double> el(dim - static_cast<std::size_t>(k));
  for (std::size_t n = 0; n < el.size(); ++n) {
    double p = 1.0;
    for (int i = 1; i <= k; ++i) p *= static_cast<double>(n) + i;
    el[n] = std::sqrt(p);
  }
  return el;
}

}  // namespace detail

/// Matrix of H_k = i r (a†^k - a^k) on |0⟩..|dim-1⟩.
inline BandedOperator build_hk(int k, double r, std::size_t dim) {
  if (k < 1) detail::raise_domain("build_hk", "k must be positive");
  if (!(r > 0.0)) detail::raise_domain("build_hk", "r must be positive");
  if (dim <= 2 * static_cast<std::size_t>(k)) detail::raise_domain("build_hk", "dimension must exceed 2k");
  const auto el = detail::raising_elements(k, dim);
  std::vector<cplx> up(el.size()), down(el.size());
  for (std::size_t n = 0; n < el.size(); ++n) {
    up[n] = cplx{0.0, r * el[n]};
    down[n] = cplx{0.0, -r * el[n]};
  }
  return BandedOperator(dim, {Diagonal{+k, std::move(up)}, Diagonal{-k, std::move(down)}}, true);
}

/// Real anti-Hermitian generator a†^k - a^k of U_k(τ).
inline BandedOperator build_generator(int k, std::size_t dim) {
  if (k < 1) detail::raise_domain("build_generator", "k must be positive");
  if (dim <= static_cast<std::size_t>(k)) detail::raise_domain("build_generator", "dimension must exceed k");
  const auto el = detail::raising_elements(k, dim);
  std::vector<cplx> up(el.size()), down(el.size());
  for (std::size_t n = 0; n < el.size(); ++n) {
    up[n] = el[n];
    down[n] = -el[n];
  }
  return BandedOperator(dim, {Diagonal{+k, std::move(up)}, Diagonal{-k, std::move(down)}}, false);
}

inline FockVector apply(const BandedOperator& op, const FockVector& v) {
  if (op.dim() != v.dim()) detail::raise_domain("apply", "dimension mismatch");
  std::vector<cplx> out(v.dim(), cplx{0.0, 0.0});
  op.accumulate(v.amps(), out);
  return FockVector(std::move(out));
}

/// G_k = exp(i 2π a†a / k).
inline FockVector apply_gk(int k, const FockVector& v) {
  if (k < 1) detail::raise_domain("apply_gk", "k must be positive");
  std::vector<cplx> out(v.amps().begin(), v.amps().end());
  for (std::size_t n = 0; n < out.size(); ++n) {
    // reduce n mod k first so the phase is exact for multiples of k
    const double frac = static_cast<double>(n % static_cast<std::size_t>(k)) / k;
    const double ang = 2.0 * std::numbers::pi * frac;
    out[n] *= (n % static_cast<std::size_t>(k) == 0) ? cplx{1.0, 0.0} : cplx{std::cos(ang), std::sin(ang)};
  }
  return FockVector(std::move(out));
}

/// Partial sums Σ_{n<cutoff} n^j |v_n|² for each cutoff.
inline std::vector<double> number_moment_partial(const FockVector& v, int j, std::span<const std::size_t> cutoffs) {
  if (j < 0) detail::raise_domain("number_moment_partial", "j must be non-negative");
  std::vector<double> out;
  out.reserve(cutoffs.size());
  for (auto c : cutoffs)
    if (c > v.dim()) detail::raise_domain("number_moment_partial", "cutoff exceeds dimension");
  for (auto c : cutoffs) {
    long double s = 0.0L;
    for (std::size_t n = 0; n < c; ++n) {
      const double w = std::norm(v[n]);
      if (w == 0.0) continue;
      s += static_cast<long double>(w) * std::pow(static_cast<long double>(n), j);
    }
    out.push_back(static_cast<double>(s));
  }
  return out;
}

/// ⟨n|exp(τ(a† - a))|0⟩ = e^{-τ²/2} τ^n / √n!.
inline double coherent_amplitude(double tau, std::size_t n) {
  if (n == 0) return std::exp(-0.5 * tau * tau);
  if (tau == 0.0) return 0.0;
  const double nd = static_cast<double>(n);
  const double mag = std::exp(-0.5 * tau * tau + nd * std::log(std::abs(tau)) - 0.5 * std::lgamma(nd + 1.0));
  return (tau < 0.0 && n % 2 == 1) ? -mag : mag;
}

/// ⟨n|exp(τ(a†² - a²))|0⟩: zero for odd n, otherwise
/// (cosh 2τ)^{-1/2} (tanh 2τ)^{n/2} √(n!) / (2^{n/2} (n/2)!).
inline double squeezed_vacuum_amplitude(double tau, std::size_t n) {
  if (n % 2 == 1) return 0.0;
  const double half = static_cast<double>(n / 2);
  const double lead = -0.5 * std::log(std::cosh(2.0 * tau));
  if (n == 0) return std::exp(lead);
  const double th = std::tanh(2.0 * tau);
  if (th == 0.0) return 0.0;
  const double mag = std::exp(lead + half * std::log(std::abs(th)) + 0.5 * std::lgamma(2.0 * half + 1.0) -
                              half * std::numbers::ln2 - std::lgamma(half + 1.0));
  return (th < 0.0 && (n / 2) % 2 == 1) ? -mag : mag;
}

// ---------------------------------------------------------------------------
// Evolution
// ---------------------------------------------------------------------------

struct EvolveOptions {
  double tol = 1e-10;
  /// Fraction of the basis monitored as guard band.
  double guard_fraction = FockVector::kGuardFraction;
  /// Result is unreliable when its guard mass exceeds this multiple of tol.
  double unreliable_factor = 100.0;
  /// Reject inputs whose guard band already carries more than tol.
  bool require_clean_guard = true;
  long max_steps = 2'000'000;
};

struct EvolveResult {
  FockVector state;
  long steps = 0;
  long rejected = 0;
  double guard_mass = 0.0;
  double norm_drift = 0.0;
  bool reliable = true;
};

namespace detail {

// Dormand–Prince 5(4) tableau
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

/// exp(τ(a†^k - a^k)) v by adaptive Dormand–Prince integration. Local error
/// is controlled per unit of τ so the accumulated error stays near `tol`.
inline EvolveResult evolve_u(int k, double tau, const FockVector& v, const EvolveOptions& opt = {}) {
  if (k < 1) detail::raise_domain("evolve_u", "k must be positive");
  if (v.dim() <= 4 * static_cast<std::size_t>(k)) detail::raise_domain("evolve_u", "dimension must exceed 4k");
  if (!(opt.tol > 0.0)) detail::raise_domain("evolve_u", "tolerance must be positive");
  if (opt.require_clean_guard && v.tail_mass(opt.guard_fraction) > opt.tol)
    detail::raise_domain("evolve_u", "guard band of the input is not empty (tail mass " +
                                         std::to_string(v.tail_mass(opt.guard_fraction)) + ")");

  const auto gen = build_generator(k, v.dim());
  const std::size_t dim = v.dim();
  using D = detail::Dopri5;

  std::vector<cplx> y(v.amps().begin(), v.amps().end());
  EvolveResult res;
  if (tau == 0.0) {
    res.state = v;
    res.guard_mass = v.tail_mass(opt.guard_fraction);
    res.reliable = res.guard_mass <= opt.unreliable_factor * opt.tol;
    return res;
  }

  std::vector<cplx> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim), ynew(dim);
  const double dir = tau > 0.0 ? 1.0 : -1.0;
  const double span = std::abs(tau);
  auto rhs = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
    std::fill(out.begin(), out.end(), cplx{0.0, 0.0});
    gen.accumulate(in, out, dir);
  };

  // Gershgorin bound on the spectral radius fixes the first step
  double rho = 0.0;
  for (const auto& d : gen.diagonals())
    for (const auto& x : d.values) rho = std::max(rho, std::abs(x));
  rho *= 2.0;
  double h = std::min(span, 1.0 / std::max(rho, 1e-300));

  const double y0norm = v.norm();
  rhs(y, k1);
  double t = 0.0;
  while (t < span) {
    if (res.steps + res.rejected >= opt.max_steps) throw convergence_error("evolve_u: step budget exhausted");
    if (t + h > span) h = span - t;
    auto stage = [&](std::vector<cplx>& out, std::initializer_list<std::pair<double, const std::vector<cplx>*>> terms) {
      for (std::size_t i = 0; i < dim; ++i) {
        cplx acc = y[i];
        for (const auto& [c, kv] : terms) acc += h * c * (*kv)[i];
        tmp[i] = acc;
      }
      rhs(tmp, out);
    };
    stage(k2, {{D::a21, &k1}});
    stage(k3, {{D::a31, &k1}, {D::a32, &k2}});
    stage(k4, {{D::a41, &k1}, {D::a42, &k2}, {D::a43, &k3}});
    stage(k5, {{D::a51, &k1}, {D::a52, &k2}, {D::a53, &k3}, {D::a54, &k4}});
    stage(k6, {{D::a61, &k1}, {D::a62, &k2}, {D::a63, &k3}, {D::a64, &k4}, {D::a65, &k5}});
    for (std::size_t i = 0; i < dim; ++i)
      ynew[i] = y[i] + h * (D::b1 * k1[i] + D::b3 * k3[i] + D::b4 * k4[i] + D::b5 * k5[i] + D::b6 * k6[i]);
    rhs(ynew, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const cplx e = h * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] + D::e5 * k5[i] + D::e6 * k6[i] + D::e7 * k7[i]);
      err = std::max(err, std::abs(e));
    }
    // error per unit step, scaled to the state norm
    const double allowed = opt.tol * std::max(y0norm, 1e-300) * (h / span);
    const double ratio = err / allowed;
    if (ratio <= 1.0) {
      t += h;
      y.swap(ynew);
      k1.swap(k7);
      ++res.steps;
    } else {
      ++res.rejected;
    }
    const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    h *= (ratio <= 1.0) ? std::min(factor, 5.0) : std::min(factor, 1.0);
    if (h < 1e-14 * span) throw convergence_error("evolve_u: step size underflow");
  }

  res.state = FockVector(std::move(y));
  res.guard_mass = res.state.tail_mass(opt.guard_fraction);
  res.norm_drift = std::abs(res.state.norm() - y0norm);
  res.reliable = res.guard_mass <= opt.unreliable_factor * opt.tol;
  return res;
}

}  // namespace gsq
