#pragma once

// Special-function kernel: log-gamma and gamma ratios, Gauss 2F1 on the
// negative real axis, the unit-argument k+1Fk series behind the invariant-state
// normalization, Bessel functions of order 0 and 1, and complete elliptic
// integrals. Everything is double precision and free of shared state.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "gsq/errors.hpp"

namespace gsq {

/// Result of a series evaluation. `est_error` is a relative error estimate.
struct SeriesResult {
  double value = 0.0;
  double est_error = 0.0;
  long terms_used = 0;
  bool converged = false;
};

// ---------------------------------------------------------------------------
// Gamma function family
// ---------------------------------------------------------------------------

/// ln Γ(x) for x > 0.
inline double ln_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) detail::raise_domain("ln_gamma", "argument must be positive and finite");
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

namespace detail {

inline constexpr std::array<double, 21> kBernoulli = {
    1.0,           -0.5, 1.0 / 6.0,   0.0, -1.0 / 30.0, 0.0, 1.0 / 42.0,          0.0,
    -1.0 / 30.0,   0.0,  5.0 / 66.0,  0.0, -691.0 / 2730.0, 0.0, 7.0 / 6.0,       0.0,
    -3617.0 / 510.0, 0.0, 43867.0 / 798.0, 0.0, -174611.0 / 330.0};

/// Bernoulli polynomial B_n(a), n <= 20, by the binomial expansion.
inline double bernoulli_poly(int n, double a) {
  double sum = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= n; ++j) {
    sum += binom * kBernoulli[static_cast<std::size_t>(j)] * std::pow(a, n - j);
    binom = binom * (n - j) / (j + 1);
  }
  return sum;
}

inline constexpr int kRatioTerms = 16;
inline constexpr double kRatioAsymptoticMin = 16.0;

/// Coefficients e_n (n = 1..kRatioTerms) of
///   ln Γ(z+a)/Γ(z+b) = (a-b) ln z + Σ e_n z^{-n}.
inline std::array<double, kRatioTerms + 1> gamma_ratio_coefficients(double a, double b) {
  std::array<double, kRatioTerms + 1> e{};
  for (int n = 1; n <= kRatioTerms; ++n) {
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;
    e[static_cast<std::size_t>(n)] =
        sign * (bernoulli_poly(n + 1, a) - bernoulli_poly(n + 1, b)) / (static_cast<double>(n) * (n + 1));
  }
  return e;
}

}  // namespace detail

/// ln[Γ(z+a)/Γ(z+b)] for z + min(a,b) > 0. Large z goes through the
/// Bernoulli-polynomial expansion so the result keeps full relative accuracy
/// where the individual log-gammas are huge.
inline double ln_gamma_ratio(double z, double a, double b) {
  if (!(z + a > 0.0) || !(z + b > 0.0)) detail::raise_domain("ln_gamma_ratio", "arguments must be positive");
  if (z < detail::kRatioAsymptoticMin) return ln_gamma(z + a) - ln_gamma(z + b);
  const auto e = detail::gamma_ratio_coefficients(a, b);
  const double inv = 1.0 / z;
  double series = 0.0;
  for (int n = detail::kRatioTerms; n >= 1; --n) series = (series + e[static_cast<std::size_t>(n)]) * inv;
  return (a - b) * std::log(z) + series;
}

namespace detail {

/// ln[(a)_m/(b)_m] with the asymptotic coefficients computed once, for
/// repeated evaluation at many m.
class PochhammerRatio {
 public:
  PochhammerRatio(double a, double b)
      : a_(a), b_(b), e_(gamma_ratio_coefficients(a, b)), offset_(ln_gamma(a) - ln_gamma(b)) {}

  double operator()(double m) const {
    if (m < kRatioAsymptoticMin) {
      if (m == std::floor(m)) {
        double prod = 1.0;
        for (int j = 0; j < static_cast<int>(m); ++j) prod *= (a_ + j) / (b_ + j);
        return std::log(prod);
      }
      return ln_gamma(m + a_) - ln_gamma(m + b_) - offset_;
    }
    const double inv = 1.0 / m;
    double series = 0.0;
    for (int n = kRatioTerms; n >= 1; --n) series = (series + e_[static_cast<std::size_t>(n)]) * inv;
    return (a_ - b_) * std::log(m) + series - offset_;
  }

 private:
  double a_, b_;
  std::array<double, kRatioTerms + 1> e_;
  double offset_;
};

}  // namespace detail

/// ln[(a)_m / (b)_m] for real m >= 0 and a, b > 0.
inline double ln_pochhammer_ratio(double a, double b, double m) {
  if (!(a > 0.0) || !(b > 0.0) || !(m >= 0.0)) detail::raise_domain("ln_pochhammer_ratio", "need a, b > 0 and m >= 0");
  const double im = std::floor(m);
  if (m < detail::kRatioAsymptoticMin && im == m) {
    double prod = 1.0;
    for (int j = 0; j < static_cast<int>(m); ++j) prod *= (a + j) / (b + j);
    return std::log(prod);
  }
  return ln_gamma_ratio(m, a, b) - (ln_gamma(a) - ln_gamma(b));
}

// ---------------------------------------------------------------------------
// Hurwitz zeta for large second argument (tail sums of power laws)
// ---------------------------------------------------------------------------

/// ζ(s, N) = Σ_{m>=N} m^{-s} for s > 1 and N >= 10, via Euler–Maclaurin.
inline double hurwitz_zeta_tail(double s, double n) {
  if (!(s > 1.0)) detail::raise_domain("hurwitz_zeta_tail", "requires s > 1");
  if (!(n >= 10.0)) detail::raise_domain("hurwitz_zeta_tail", "requires N >= 10");
  double sum = std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s);
  // B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}
  double rising = s;
  double fact = 2.0;
  double npow = std::pow(n, -s - 1.0);
  for (int j = 1; j <= 8; ++j) {
    sum += detail::kBernoulli[static_cast<std::size_t>(2 * j)] / fact * rising * npow;
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    fact *= (2 * j + 1) * (2 * j + 2);
    npow /= n * n;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric function on x <= 0
// ---------------------------------------------------------------------------

/// ₂F₁(a,b;c;x) for x <= 0 via the Pfaff transformation
///   ₂F₁(a,b;c;x) = (1-x)^{-a} ₂F₁(a, c-b; c; x/(x-1)),
/// which maps the argument into [0, 1).
inline SeriesResult gauss_2f1(double a, double b, double c, double x, double tol = 1e-15, long max_terms = 100000) {
  if (c <= 0.0 && c == std::floor(c)) detail::raise_domain("gauss_2f1", "c must not be a non-positive integer");
  if (!(x <= 0.0) || !std::isfinite(x)) detail::raise_domain("gauss_2f1", "argument must be finite and <= 0");
  SeriesResult out;
  if (x == 0.0) {
    out.value = 1.0;
    out.terms_used = 1;
    out.converged = true;
    return out;
  }
  const double w = x / (x - 1.0);
  const double bb = c - b;
  double term = 1.0;
  double sum = 1.0;
  double comp = 0.0;
  double abs_sum = 1.0;
  long n = 0;
  bool terminated = false;
  double tail = 0.0;
  for (; n < max_terms; ++n) {
    const double ratio = (a + n) * (bb + n) / ((c + n) * (n + 1.0)) * w;
    term *= ratio;
    if (term == 0.0) {
      terminated = true;
      tail = 0.0;
      ++n;
      break;
    }
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    abs_sum += std::abs(term);
    // Once n is past the parameters the term ratio increases monotonically
    // towards w, so the geometric bound with ratio w dominates the remainder.
    const double next_ratio = std::abs((a + n + 1) * (bb + n + 1) / ((c + n + 1) * (n + 2.0)));
    if (n > std::abs(a) + std::abs(bb) + std::abs(c) + 2.0 && next_ratio <= 1.0) {
      tail = std::abs(term) * w / (1.0 - w);
      if (tail <= tol * std::abs(sum)) {
        ++n;
        break;
      }
    }
  }
  const double prefactor = std::pow(1.0 - x, -a);
  out.value = prefactor * sum;
  const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * abs_sum / std::abs(sum);
  out.est_error = (terminated ? 0.0 : tail / std::abs(sum)) + rounding;
  out.terms_used = n + 1;
  out.converged = terminated || tail <= tol * std::abs(sum);
  if (out.converged) out.est_error = std::min(out.est_error, std::max(tol, rounding));
  return out;
}

// ---------------------------------------------------------------------------
// k+1Fk(1, (1+α)/2k, ..., (k+α)/2k; (k+1+α)/2k, ..., (2k+α)/2k; 1)
// ---------------------------------------------------------------------------

struct GenHypOptions {
  long direct_terms = 1'000'000;
  double tol = 1e-10;
  int tail_orders = 6;
};

/// Breakdown of the unit-argument evaluation: raw direct partial sum and the
/// asymptotic tail added to it.
struct GenHypReport {
  double raw_sum = 0.0;
  double tail = 0.0;
  SeriesResult result;
};

namespace detail {

struct GenHypParams {
  std::vector<double> numer;
  std::vector<double> denom;
};

inline GenHypParams genhyp_params(int k, int alpha) {
  GenHypParams p;
  for (int i = 1; i <= k; ++i) {
    p.numer.push_back(static_cast<double>(alpha + i) / (2.0 * k));
    p.denom.push_back(static_cast<double>(k + alpha + i) / (2.0 * k));
  }
  return p;
}

/// Expansion t(m) = e^{C} m^{-k/2} Σ_j g_j m^{-j} of the series term
/// Π (a_i)_m/(b_i)_m for large m.
struct TermAsymptote {
  double log_scale = 0.0;
  double power = 0.0;
  std::vector<double> g;
};

inline TermAsymptote term_asymptote(const GenHypParams& p, int orders) {
  TermAsymptote t;
  std::array<double, kRatioTerms + 1> e{};
  for (std::size_t i = 0; i < p.numer.size(); ++i) {
    const auto ei = gamma_ratio_coefficients(p.numer[i], p.denom[i]);
    for (std::size_t n = 1; n < e.size(); ++n) e[n] += ei[n];
    t.log_scale += ln_gamma(p.denom[i]) - ln_gamma(p.numer[i]);
    t.power += p.numer[i] - p.denom[i];
  }
  // exp of a power series in 1/m
  t.g.assign(static_cast<std::size_t>(orders) + 1, 0.0);
  t.g[0] = 1.0;
  for (int j = 1; j <= orders; ++j) {
    double acc = 0.0;
    for (int n = 1; n <= j && n <= kRatioTerms; ++n) acc += n * e[static_cast<std::size_t>(n)] * t.g[static_cast<std::size_t>(j - n)];
    t.g[static_cast<std::size_t>(j)] = acc / j;
  }
  return t;
}

}  // namespace detail

/// Unit-argument series from the invariant-state normalization, with the
/// detailed raw/tail breakdown. Requires k >= 3 (the series diverges for k <= 2).
inline GenHypReport genhyp_unit_report(int k, int alpha, const GenHypOptions& opt = {}) {
  if (k < 3) detail::raise_domain("genhyp_unit", "series diverges for k < 3 (terms decay like m^{-k/2})");
  if (alpha < 0 || alpha >= k) detail::raise_domain("genhyp_unit", "alpha must lie in [0, k-1]");
  if (opt.direct_terms < 10) detail::raise_domain("genhyp_unit", "direct_terms must be at least 10");
  const auto params = detail::genhyp_params(k, alpha);

  long double term = 1.0L;
  long double sum = 0.0L;
  long double comp = 0.0L;
  for (long m = 0; m < opt.direct_terms; ++m) {
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    long double num = 1.0L, den = 1.0L;
    for (std::size_t i = 0; i < params.numer.size(); ++i) {
      num *= static_cast<long double>(m) + params.numer[i];
      den *= static_cast<long double>(m) + params.denom[i];
    }
    term *= num / den;
  }

  const auto asym = detail::term_asymptote(params, opt.tail_orders);
  const double n0 = static_cast<double>(opt.direct_terms);
  const double s0 = -asym.power;
  double tail = 0.0;
  double last = 0.0;
  for (std::size_t j = 0; j < asym.g.size(); ++j) {
    last = asym.g[j] * hurwitz_zeta_tail(s0 + static_cast<double>(j), n0);
    tail += last;
  }
  tail *= std::exp(asym.log_scale);
  last *= std::exp(asym.log_scale);

  GenHypReport rep;
  rep.raw_sum = static_cast<double>(sum);
  rep.tail = tail;
  rep.result.value = static_cast<double>(sum + static_cast<long double>(tail));
  const double rounding = n0 * static_cast<double>(std::numeric_limits<long double>::epsilon()) * 8.0;
  // truncation of the asymptotic tail plus an allowance for the error of the
  // running product, which grows linearly in the number of terms
  rep.result.est_error = std::abs(last) / rep.result.value + rounding + std::numeric_limits<double>::epsilon();
  rep.result.terms_used = opt.direct_terms;
  rep.result.converged = rep.result.est_error <= opt.tol;
  return rep;
}

/// Value-only form of genhyp_unit_report. Throws convergence_error when the
/// error estimate exceeds the tolerance.
inline SeriesResult genhyp_unit(int k, int alpha, const GenHypOptions& opt = {}) {
  auto rep = genhyp_unit_report(k, alpha, opt);
  if (!rep.result.converged)
    throw convergence_error("genhyp_unit: estimated relative error " + std::to_string(rep.result.est_error) +
                            " exceeds tolerance");
  return rep.result;
}

// ---------------------------------------------------------------------------
// Bessel functions J0, J1, Y0, Y1
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kSeriesMax = 2.0;
inline constexpr double kAsymptoticMin = 25.0;

struct BesselPair {
  double j0;
  double j1;
  double y0;
  double y1;
};

inline BesselPair bessel_series(double x) {
  const double q = -0.25 * x * x;
  const double lg = std::log(0.5 * x) + kEulerGamma;
  double t0 = 1.0;  // (-x²/4)^k / (k!)²
  double t1 = 1.0;  // (-x²/4)^k / (k!(k+1)!)
  double j0 = 1.0, j1 = 1.0;
  double y0s = 0.0;
  double y1s = (-kEulerGamma + (1.0 - kEulerGamma));  // ψ(1)+ψ(2)
  double harmonic = 0.0;
  for (int k = 1; k < 40; ++k) {
    t0 *= q / (static_cast<double>(k) * k);
    t1 *= q / (static_cast<double>(k) * (k + 1));
    harmonic += 1.0 / k;
    j0 += t0;
    j1 += t1;
    y0s -= harmonic * t0;
    // ψ(k+1)+ψ(k+2) = -2γ + 2H_k + 1/(k+1)
    y1s += (-2.0 * kEulerGamma + 2.0 * harmonic + 1.0 / (k + 1)) * t1;
    if (std::abs(t0) < 1e-18 && std::abs(t1) < 1e-18) break;
  }
  j1 *= 0.5 * x;
  const double pi = std::numbers::pi;
  BesselPair r{};
  r.j0 = j0;
  r.j1 = j1;
  r.y0 = (2.0 / pi) * lg * j0 + (2.0 / pi) * y0s;
  r.y1 = -2.0 / (pi * x) + (2.0 / pi) * std::log(0.5 * x) * j1 - (0.5 * x / pi) * y1s;
  return r;
}

/// Miller backward recurrence normalized by J0 + 2ΣJ_{2k} = 1, with the
/// Neumann series for Y0 and Y1.
inline BesselPair bessel_miller(double x) {
  const int top = 2 * static_cast<int>((1.5 * x + 40.0) / 2.0);
  std::vector<double> f(static_cast<std::size_t>(top) + 2, 0.0);
  f[static_cast<std::size_t>(top)] = 1e-30;
  for (int n = top; n >= 1; --n) {
    f[static_cast<std::size_t>(n - 1)] = (2.0 * n / x) * f[static_cast<std::size_t>(n)] - f[static_cast<std::size_t>(n + 1)];
    if (std::abs(f[static_cast<std::size_t>(n - 1)]) > 1e250) {
      for (int i = n - 1; i <= top; ++i) f[static_cast<std::size_t>(i)] *= 1e-250;
    }
  }
  double norm = f[0];
  for (int k = 2; k <= top; k += 2) norm += 2.0 * f[static_cast<std::size_t>(k)];
  for (auto& v : f) v /= norm;
  const double pi = std::numbers::pi;
  const double lg = std::log(0.5 * x) + kEulerGamma;
  double s0 = 0.0;
  double s1 = 0.0;
  for (int k = 1; 2 * k + 1 <= top; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    s0 += sign * f[static_cast<std::size_t>(2 * k)] / k;
    s1 += sign * (f[static_cast<std::size_t>(2 * k - 1)] - f[static_cast<std::size_t>(2 * k + 1)]) / k;
  }
  BesselPair r{};
  r.j0 = f[0];
  r.j1 = f[1];
  r.y0 = (2.0 / pi) * lg * f[0] - (4.0 / pi) * s0;
  r.y1 = -(2.0 / (pi * x)) * f[0] + (2.0 / pi) * lg * f[1] + (2.0 / pi) * s1;
  return r;
}

/// Hankel asymptotic amplitudes P_ν, Q_ν for ν ∈ {0, 1}.
inline void hankel_pq(int nu, double x, double& p, double& q) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  p = 1.0;
  q = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    const double mag = std::abs(term);
    if (mag > prev) break;
    prev = mag;
    // a_k / x^k enters P with sign (-1)^{k/2} for even k and Q with (-1)^{(k-1)/2} for odd k
    switch (k % 4) {
      case 0: p += term; break;
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
    }
    if (mag < 1e-17) break;
  }
}

inline BesselPair bessel_asymptotic(double x) {
  double p0, q0, p1, q1;
  hankel_pq(0, x, p0, q0);
  hankel_pq(1, x, p1, q1);
  const double c = std::cos(x);
  const double s = std::sin(x);
  const double r2 = std::numbers::sqrt2 / 2.0;
  // χ0 = x - π/4, χ1 = x - 3π/4
  const double cos0 = (c + s) * r2, sin0 = (s - c) * r2;
  const double cos1 = (s - c) * r2, sin1 = -(s + c) * r2;
  const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
  BesselPair r{};
  r.j0 = amp * (p0 * cos0 - q0 * sin0);
  r.y0 = amp * (p0 * sin0 + q0 * cos0);
  r.j1 = amp * (p1 * cos1 - q1 * sin1);
  r.y1 = amp * (p1 * sin1 + q1 * cos1);
  return r;
}

inline BesselPair bessel_all(double x) {
  if (x <= kSeriesMax) return bessel_series(x);
  if (x < kAsymptoticMin) return bessel_miller(x);
  return bessel_asymptotic(x);
}

}  // namespace detail

inline double bessel_j0(double x) {
  const double ax = std::abs(x);
  if (!std::isfinite(ax)) detail::raise_domain("bessel_j0", "argument must be finite");
  if (ax == 0.0) return 1.0;
  return detail::bessel_all(ax).j0;
}

inline double bessel_j1(double x) {
  const double ax = std::abs(x);
  if (!std::isfinite(ax)) detail::raise_domain("bessel_j1", "argument must be finite");
  if (ax == 0.0) return 0.0;
  const double v = detail::bessel_all(ax).j1;
  return x < 0.0 ? -v : v;
}

inline double bessel_y0(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) detail::raise_domain("bessel_y0", "requires x > 0 (logarithmic singularity at 0)");
  return detail::bessel_all(x).y0;
}

inline double bessel_y1(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) detail::raise_domain("bessel_y1", "requires x > 0");
  return detail::bessel_all(x).y1;
}

// ---------------------------------------------------------------------------
// Complete elliptic integrals (parameter convention m = k²)
// ---------------------------------------------------------------------------

/// K(m) = ∫₀^{π/2} (1 - m sin²θ)^{-1/2} dθ, m ∈ [0, 1), by the AGM.
inline double elliptic_k(double m) {
  if (!(m >= 0.0) || !(m < 1.0)) detail::raise_domain("elliptic_k", "parameter must lie in [0, 1)");
  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  for (int i = 0; i < 64 && std::abs(a - b) > 4.0 * std::numeric_limits<double>::epsilon() * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return std::numbers::pi / (a + b);
}

/// E(m) = ∫₀^{π/2} (1 - m sin²θ)^{1/2} dθ, m ∈ [0, 1].
inline double elliptic_e(double m) {
  if (!(m >= 0.0) || !(m <= 1.0)) detail::raise_domain("elliptic_e", "parameter must lie in [0, 1]");
  if (m == 1.0) return 1.0;
  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  double c2sum = 0.5 * m;  // 2^{n-1} c_n² at n = 0
  double pow2 = 0.5;
  for (int i = 0; i < 64 && std::abs(a - b) > 4.0 * std::numeric_limits<double>::epsilon() * a; ++i) {
    const double cn = 0.5 * (a - b);
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
    pow2 *= 2.0;
    c2sum += pow2 * cn * cn;
  }
  const double k = std::numbers::pi / (a + b);
  return k * (1.0 - c2sum);
}

/// Modulus-convention variants, K(k) := K(m = k²).
inline double elliptic_k_modulus(double k) { return elliptic_k(k * k); }
inline double elliptic_e_modulus(double k) { return elliptic_e(k * k); }

}  // namespace gsq
