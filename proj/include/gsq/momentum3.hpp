#pragma once

// Momentum representation for k = 3. The zero-eigenvalue equation becomes
//   p f'' + f' + p³ f / 3 = 0,
// solved by J0(p²/(2√3)), Y0(p²/(2√3)) and sgn(p) J0(p²/(2√3)).
//
// Oscillator convention: ⟨p|n⟩ = (-i)^n h_n(p) with h_n the normalized
// Hermite functions, hence ⟨n|φ⟩ = i^n ∫ h_n φ dp.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gsq/eigenstates.hpp"
#include "gsq/errors.hpp"
#include "gsq/parallel.hpp"
#include "gsq/quadrature.hpp"
#include "gsq/specfun.hpp"

namespace gsq {

inline constexpr double kSqrt3 = 1.7320508075688772935274463415058723669428;

/// Bessel argument p²/(2√3).
inline double momentum_argument(double p) { return p * p / (2.0 * kSqrt3); }

// ---------------------------------------------------------------------------
// φ¹, φ², φ³ and their combinations
// ---------------------------------------------------------------------------

enum class WaveKind { phi1, phi2, phi3, combination };
enum class Parity { even, odd };

inline cplx eval_phi(WaveKind kind, double p) {
  if (!std::isfinite(p)) detail::raise_domain("eval_phi", "p must be finite");
  const double x = momentum_argument(p);
  switch (kind) {
    case WaveKind::phi1: return bessel_j0(x);
    case WaveKind::phi2:
      if (p == 0.0) detail::raise_domain("eval_phi", "phi2 is singular at p = 0");
      return bessel_y0(x);
    case WaveKind::phi3: return p > 0.0 ? bessel_j0(x) : (p < 0.0 ? -bessel_j0(x) : 0.0);
    case WaveKind::combination: break;
  }
  detail::raise_domain("eval_phi", "combinations carry coefficients; use MomentumWave");
}

struct MomentumWave {
  WaveKind kind = WaveKind::phi1;
  std::array<cplx, 2> coeffs{cplx{1.0, 0.0}, cplx{0.0, 0.0}};
  Parity parity = Parity::even;

  static MomentumWave phi1() { return {WaveKind::phi1, {cplx{1.0}, cplx{0.0}}, Parity::even}; }
  static MomentumWave phi2() { return {WaveKind::phi2, {cplx{0.0}, cplx{1.0}}, Parity::even}; }
  static MomentumWave phi3() { return {WaveKind::phi3, {cplx{1.0}, cplx{0.0}}, Parity::odd}; }
  /// c1 φ¹ + c2 φ².
  static MomentumWave combination(cplx c1, cplx c2) { return {WaveKind::combination, {c1, c2}, Parity::even}; }

  bool singular_at_zero() const {
    return kind == WaveKind::phi2 || (kind == WaveKind::combination && coeffs[1] != cplx{0.0, 0.0});
  }

  cplx operator()(double p) const {
    if (kind != WaveKind::combination) return eval_phi(kind, p);
    if (singular_at_zero() && p == 0.0) detail::raise_domain("MomentumWave", "combination with phi2 is singular at p = 0");
    const double x = momentum_argument(p);
    cplx v = coeffs[0] * bessel_j0(x);
    if (coeffs[1] != cplx{0.0, 0.0}) v += coeffs[1] * bessel_y0(x);
    return v;
  }
};

/// Central-difference residual of a f'' + f' + p³ f / 3 - shift · p³ f.
template <class F>
double ode_residual_fn(F&& f, double p, double h, double shift = 0.0) {
  if (!(h > 0.0) || !(std::abs(p) > 5.0 * h)) detail::raise_domain("ode_residual", "need h > 0 and |p| > 5h");
  const double fm = f(p - h), f0 = f(p), fp = f(p + h);
  const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
  const double d1 = (fp - fm) / (2.0 * h);
  return p * d2 + d1 + (1.0 / 3.0 - shift) * p * p * p * f0;
}

inline double ode_residual(WaveKind kind, double p, double h) {
  return ode_residual_fn([kind](double q) { return eval_phi(kind, q).real(); }, p, h);
}

// ---------------------------------------------------------------------------
// Oscillator eigenfunctions
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxHermiteIndex = 100'000;

namespace detail {

/// Walks the normalized Hermite recurrence
///   h_{n+1} = √(2/(n+1)) p h_n - √(n/(n+1)) h_{n-1},
/// handing visit(n, h_n) each value. A running log scale keeps far-tail
/// values from underflowing before the recurrence climbs out of them.
template <class Visit>
void hermite_walk(std::size_t n_max, double p, Visit&& visit) {
  double scale = -0.5 * p * p - 0.25 * std::log(std::numbers::pi);
  double prev = 0.0;
  double cur = 1.0;
  for (std::size_t n = 0;; ++n) {
    visit(n, cur * std::exp(scale));
    if (n == n_max) break;
    const double nd = static_cast<double>(n);
    const double next = std::sqrt(2.0 / (nd + 1.0)) * p * cur - std::sqrt(nd / (nd + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e150) {
      prev *= 1e-150;
      cur *= 1e-150;
      scale += 150.0 * std::numbers::ln10;
    }
  }
}

inline cplx minus_i_pow(std::size_t n) {
  switch (n % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

}  // namespace detail

/// Normalized Hermite functions h_0..h_{n_max} at p.
inline std::vector<double> hermite_functions(std::size_t n_max, double p) {
  if (n_max > kMaxHermiteIndex) detail::raise_domain("hermite_functions", "n exceeds 1e5");
  std::vector<double> h(n_max + 1);
  detail::hermite_walk(n_max, p, [&](std::size_t n, double v) { h[n] = v; });
  return h;
}

/// ⟨p|n⟩ = (-i)^n h_n(p).
inline cplx oscillator_wave_p(std::size_t n, double p) {
  if (n > kMaxHermiteIndex) detail::raise_domain("oscillator_wave_p", "n exceeds 1e5");
  if (!std::isfinite(p)) detail::raise_domain("oscillator_wave_p", "p must be finite");
  double value = 0.0;
  detail::hermite_walk(n, p, [&](std::size_t i, double v) {
    if (i == n) value = v;
  });
  return detail::minus_i_pow(n) * value;
}

// ---------------------------------------------------------------------------
// Synthesis of ⟨p|ψ_3^α⟩ from Fock components
// ---------------------------------------------------------------------------

struct SynthesisOptions {
  double tol = 1e-4;
  double window_fraction = 0.1;
  double check_fraction = 0.8;
};

struct SynthesisResult {
  cplx value;
  double est_error = 0.0;
  bool converged = false;
  std::size_t window_start = 0;
  std::size_t terms = 0;
};

inline constexpr std::size_t kMinSynthesisTerms = 1000;
inline constexpr double kSynthesisMinAbsP = 0.3;

/// Start of the averaging window over partial sums S_0..S_{M-1}. The tail
/// oscillates with phase close to √(12m)·p, so the window spans a whole number
/// of those periods and at least `fraction` of the terms, but never reaches
/// below M/2.
inline std::size_t cesaro_window_start(std::size_t m_terms, double p, double fraction) {
  const double big_m = static_cast<double>(m_terms);
  const std::size_t floor_start = m_terms / 2;
  const double omega = std::sqrt(12.0) * std::abs(p);
  if (omega <= 0.0) return floor_start;
  const double period = 2.0 * std::numbers::pi / omega;
  const double root = std::sqrt(big_m);
  const double periods = std::ceil((root - std::sqrt(big_m * (1.0 - fraction))) / period);
  const double root_start = root - periods * period;
  if (root_start <= 0.0) return floor_start;
  const auto start = static_cast<std::size_t>(std::floor(root_start * root_start));
  return std::max(start, floor_start);
}

namespace detail {

inline double cesaro_mean(std::span<const double> partial, std::size_t m_terms, double p, double fraction) {
  const std::size_t start = cesaro_window_start(m_terms, p, fraction);
  long double s = 0.0L;
  for (std::size_t i = start; i < m_terms; ++i) s += partial[i];
  return static_cast<double>(s / static_cast<long double>(m_terms - start));
}

inline SynthesisResult finish_synthesis(std::span<const double> partial, int alpha, double p, const SynthesisOptions& opt) {
  const std::size_t m = partial.size();
  SynthesisResult r;
  r.terms = m;
  r.window_start = cesaro_window_start(m, p, opt.window_fraction);
  const double full = cesaro_mean(partial, m, p, opt.window_fraction);
  const auto m_check = static_cast<std::size_t>(opt.check_fraction * static_cast<double>(m));
  const double coarse = cesaro_mean(partial, m_check, p, opt.window_fraction);
  r.value = minus_i_pow(static_cast<std::size_t>(alpha)) * full;
  r.est_error = std::abs(full - coarse);
  r.converged = r.est_error <= opt.tol;
  return r;
}

inline void check_synthesis_args(std::span<const int> alphas, double p, std::size_t m_terms) {
  if (m_terms < kMinSynthesisTerms) raise_domain("synthesize_psi", "m_terms must be at least 1000");
  if (!std::isfinite(p)) raise_domain("synthesize_psi", "p must be finite");
  for (int a : alphas) {
    if (a < 0 || a > 2) raise_domain("synthesize_psi", "alpha must be 0, 1 or 2");
    if (a != 1 && std::abs(p) < kSynthesisMinAbsP) raise_domain("synthesize_psi", "|p| must be at least 0.3 for even alpha");
  }
}

}  // namespace detail

/// Synthesized ⟨p|ψ_3^α⟩ for several α sharing one Hermite sweep per p.
/// Result is indexed [alpha position][p position].
inline std::vector<std::vector<SynthesisResult>> synthesize_psi_grid(std::span<const int> alphas, std::span<const double> ps,
                                                                     std::size_t m_terms,
                                                                     const SynthesisOptions& opt = {}) {
  for (double p : ps) detail::check_synthesis_args(alphas, p, m_terms);
  std::vector<InvariantState> states;
  for (int a : alphas) states.push_back(build_state({3, a, m_terms - 1, true}));
  std::vector<std::vector<SynthesisResult>> out(alphas.size(), std::vector<SynthesisResult>(ps.size()));
  int max_alpha = 0;
  for (int a : alphas) max_alpha = std::max(max_alpha, a);
  const std::size_t n_max = 6 * (m_terms - 1) + static_cast<std::size_t>(max_alpha);

  parallel_for(ps.size(), [&](std::size_t ip) {
    const double p = ps[ip];
    std::vector<std::vector<double>> partial(alphas.size(), std::vector<double>(m_terms));
    std::vector<long double> run(alphas.size(), 0.0L);
    detail::hermite_walk(n_max, p, [&](std::size_t n, double h) {
      const std::size_t r = n % 6;
      if (r > 2) return;
      const std::size_t m = n / 6;
      for (std::size_t s = 0; s < alphas.size(); ++s) {
        if (static_cast<std::size_t>(alphas[s]) != r || m >= m_terms) continue;
        // (-i)^{α+6m} = (-i)^α (-1)^m; the common (-i)^α is applied at the end
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        run[s] += sign * states[s].amplitude(m) * h;
        partial[s][m] = static_cast<double>(run[s]);
      }
    });
    for (std::size_t s = 0; s < alphas.size(); ++s)
      out[s][ip] = detail::finish_synthesis(partial[s], alphas[s], p, opt);
  });
  return out;
}

inline SynthesisResult synthesize_psi(int alpha, double p, std::size_t m_terms, const SynthesisOptions& opt = {}) {
  const int alphas[] = {alpha};
  const double ps[] = {p};
  return synthesize_psi_grid(alphas, ps, m_terms, opt)[0][0];
}

// ---------------------------------------------------------------------------
// Overlaps and decomposition coefficients
// ---------------------------------------------------------------------------

enum class EllipticConvention { parameter, modulus };

/// as_printed keeps the printed prefactor of ⟨2|φ¹⟩ and the printed b0, b2;
/// amended restores the √2 on the K term, the sign of b0 and ⟨0|φ¹⟩ in b2.
/// The ⟨2|φ²⟩ bracket is read the same way in both (the only balanced one).
enum class ClosedFormReading { as_printed, amended };

struct OverlapSet {
  double ov_0_phi1 = 0.0;
  double ov_2_phi1 = 0.0;
  double ov_0_phi2 = 0.0;
  double ov_2_phi2 = 0.0;
  double D = 0.0;
  double a0 = 0.0, b0 = 0.0, a2 = 0.0, b2 = 0.0;
  cplx a1;
};

/// ⟨0|ψ_3^0⟩, ⟨1|ψ_3^1⟩, ⟨2|ψ_3^2⟩ of the normalized states.
inline std::array<double, 3> leading_components_k3() {
  std::array<double, 3> c{};
  for (int a = 0; a < 3; ++a) c[static_cast<std::size_t>(a)] = std::exp(component_log(3, a, 0) - 0.5 * std::log(normalization_c(3, a)));
  return c;
}

namespace detail {

inline void fill_coefficients(OverlapSet& s, ClosedFormReading reading) {
  const auto lead = leading_components_k3();
  s.D = s.ov_0_phi1 * s.ov_2_phi2 - s.ov_0_phi2 * s.ov_2_phi1;
  if (s.D == 0.0) throw consistency_error("overlap determinant vanishes");
  s.a0 = lead[0] * s.ov_2_phi2 / s.D;
  s.a2 = -lead[2] * s.ov_0_phi2 / s.D;
  if (reading == ClosedFormReading::amended) {
    s.b0 = -lead[0] * s.ov_2_phi1 / s.D;
    s.b2 = lead[2] * s.ov_0_phi1 / s.D;
  } else {
    s.b0 = lead[0] * s.ov_2_phi1 / s.D;
    s.b2 = lead[2] * s.ov_2_phi1 / s.D;
  }
}

}  // namespace detail

/// |a1| = π^{1/4} Γ(3/4) / √(6 Γ(5/12) Γ(13/12)), returned with the printed phase i.
inline cplx a1_closed_form() {
  const double mag = std::pow(std::numbers::pi, 0.25) * std::exp(ln_gamma(0.75) - 0.5 * (std::log(6.0) + ln_gamma(5.0 / 12.0) + ln_gamma(13.0 / 12.0)));
  return {0.0, mag};
}

inline OverlapSet overlaps_closed_form(ClosedFormReading reading = ClosedFormReading::amended,
                                       EllipticConvention conv = EllipticConvention::parameter) {
  const double m0 = (2.0 - kSqrt3) / 4.0;
  const double K = conv == EllipticConvention::parameter ? elliptic_k(m0) : elliptic_k_modulus(m0);
  const double E = conv == EllipticConvention::parameter ? elliptic_e(m0) : elliptic_e_modulus(m0);
  const double pi = std::numbers::pi;
  const double r4 = std::pow(3.0, 0.25), r34 = std::pow(3.0, 0.75);
  const double pi34 = std::pow(pi, 0.75), pi54 = std::pow(pi, 1.25);
  auto F = [](double a, double b) { return gauss_2f1(a, b, 0.5, -3.0).value; };
  auto g2 = [](double x) { return std::exp(2.0 * ln_gamma(x)); };

  OverlapSet s;
  s.ov_0_phi1 = 2.0 * r4 / pi34 * K;
  const double k_factor = reading == ClosedFormReading::amended ? std::numbers::sqrt2 : 1.0;
  s.ov_2_phi1 = k_factor * (r4 + r34) / pi34 * K - 2.0 * std::numbers::sqrt2 * r34 / pi34 * E;
  s.ov_0_phi2 = 1.0 / (std::numbers::sqrt2 * r34 * pi54) *
                (-3.0 * g2(0.25) * F(0.25, 0.25) - 4.0 * kSqrt3 * g2(0.75) * (F(-0.25, 0.75) - 4.0 * F(0.75, 0.75)));
  s.ov_2_phi2 = 1.0 / (r34 * pi54) *
                (-12.0 * g2(1.25) * (F(-0.75, 0.25) - 2.0 * F(0.25, 0.25)) -
                 2.0 * kSqrt3 * g2(0.75) * (F(-0.25, 0.75) + 2.0 * F(0.75, 0.75)));
  detail::fill_coefficients(s, reading);
  s.a1 = a1_closed_form();
  return s;
}

namespace detail {

inline constexpr double kOverlapCut = 12.0;

/// 2∫_0^∞ h_n(p) f(p) dp for n ∈ {0,1,2}; the integrand is negligible past 12.
template <class F>
double half_line_overlap(int n, F&& f, bool log_singular) {
  auto h = [n](double p) {
    const double g = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * p * p);
    if (n == 0) return g;
    if (n == 1) return std::numbers::sqrt2 * p * g;
    return (2.0 * p * p - 1.0) / std::numbers::sqrt2 * g;
  };
  auto integrand = [&](double p) { return h(p) * f(p); };
  double v = 0.0;
  if (log_singular) {
    v = quad::endpoint_singular(integrand, 0.0, 1.0, 1e-14).value + quad::adaptive_gk(integrand, 1.0, kOverlapCut, 1e-14).value;
  } else {
    v = quad::adaptive_gk(integrand, 0.0, kOverlapCut, 1e-14).value;
  }
  return 2.0 * v;
}

}  // namespace detail

/// Overlaps by direct quadrature of i^n ∫ h_n φ dp, and the coefficients that
/// follow from them (amended formulas). a1 = ⟨1|ψ¹⟩ / ⟨1|φ³⟩.
inline OverlapSet overlaps_numeric() {
  auto j0 = [](double p) { return bessel_j0(momentum_argument(p)); };
  // tanh-sinh samples points so close to 0 that p² underflows; their weight is nil
  auto y0 = [](double p) {
    const double x = momentum_argument(p);
    return x > 0.0 ? bessel_y0(x) : 0.0;
  };
  OverlapSet s;
  s.ov_0_phi1 = detail::half_line_overlap(0, j0, false);
  s.ov_2_phi1 = -detail::half_line_overlap(2, j0, false);
  s.ov_0_phi2 = detail::half_line_overlap(0, y0, true);
  s.ov_2_phi2 = -detail::half_line_overlap(2, y0, true);
  detail::fill_coefficients(s, ClosedFormReading::amended);
  const cplx ov_1_phi3 = cplx{0.0, 1.0} * detail::half_line_overlap(1, j0, false);
  s.a1 = leading_components_k3()[1] / ov_1_phi3;
  return s;
}

/// Coefficients from a least-squares fit of synthesized ψ^α against φ¹, φ²
/// (α = 0, 2) or φ³ (α = 1) on |p| ∈ [p_lo, p_hi].
struct DecompositionFit {
  cplx a0, b0, a1, a2, b2;
  double max_residual0 = 0.0, max_residual1 = 0.0, max_residual2 = 0.0;
  bool converged = false;
};

inline DecompositionFit fit_decomposition(std::size_t m_terms = 20000, double p_lo = 0.5, double p_hi = 5.0,
                                          std::size_t samples = 46) {
  if (samples < 4 || !(p_lo >= kSynthesisMinAbsP) || !(p_hi > p_lo)) detail::raise_domain("fit_decomposition", "bad sample range");
  std::vector<double> ps;
  for (std::size_t i = 0; i < samples; ++i)
    ps.push_back(p_lo + (p_hi - p_lo) * static_cast<double>(i) / static_cast<double>(samples - 1));
  std::vector<double> all_ps = ps;
  for (double p : ps) all_ps.push_back(-p);
  const int alphas[] = {0, 1, 2};
  const auto syn = synthesize_psi_grid(alphas, all_ps, m_terms);

  DecompositionFit fit;
  fit.converged = true;
  for (const auto& row : syn)
    for (const auto& r : row) fit.converged = fit.converged && r.converged;

  auto two_term = [&](const std::vector<SynthesisResult>& ys, cplx& ca, cplx& cb, double& worst) {
    double s11 = 0, s12 = 0, s22 = 0;
    cplx t1 = 0, t2 = 0;
    for (std::size_t i = 0; i < all_ps.size(); ++i) {
      const double f1 = eval_phi(WaveKind::phi1, all_ps[i]).real();
      const double f2 = eval_phi(WaveKind::phi2, all_ps[i]).real();
      s11 += f1 * f1;
      s12 += f1 * f2;
      s22 += f2 * f2;
      t1 += f1 * ys[i].value;
      t2 += f2 * ys[i].value;
    }
    const double det = s11 * s22 - s12 * s12;
    ca = (s22 * t1 - s12 * t2) / det;
    cb = (s11 * t2 - s12 * t1) / det;
    worst = 0.0;
    for (std::size_t i = 0; i < all_ps.size(); ++i) {
      const cplx model = ca * eval_phi(WaveKind::phi1, all_ps[i]) + cb * eval_phi(WaveKind::phi2, all_ps[i]);
      worst = std::max(worst, std::abs(model - ys[i].value));
    }
  };
  two_term(syn[0], fit.a0, fit.b0, fit.max_residual0);
  two_term(syn[2], fit.a2, fit.b2, fit.max_residual2);

  double s33 = 0;
  cplx t3 = 0;
  for (std::size_t i = 0; i < all_ps.size(); ++i) {
    const double f3 = eval_phi(WaveKind::phi3, all_ps[i]).real();
    s33 += f3 * f3;
    t3 += f3 * syn[1][i].value;
  }
  fit.a1 = t3 / s33;
  for (std::size_t i = 0; i < all_ps.size(); ++i)
    fit.max_residual1 = std::max(fit.max_residual1, std::abs(fit.a1 * eval_phi(WaveKind::phi3, all_ps[i]) - syn[1][i].value));
  return fit;
}

// ---------------------------------------------------------------------------
// Sturm–Liouville family f±_l(p) = J0(l p²/(2√3)) θ(±p) θ(±l)
// ---------------------------------------------------------------------------

enum class Branch { plus, minus };

inline double sturm_liouville_f(Branch branch, double l, double p) {
  const double sp = branch == Branch::plus ? p : -p;
  const double sl = branch == Branch::plus ? l : -l;
  if (sp < 0.0 || sl < 0.0) return 0.0;
  const double theta = (sp == 0.0 ? 0.5 : 1.0) * (sl == 0.0 ? 0.5 : 1.0);
  return theta * bessel_j0(l * momentum_argument(p));
}

/// Residual of (p d² + d + p³/3) f - ((1-l²)/3) p³ f for f = f±_l.
inline double sturm_liouville_residual(Branch branch, double l, double p, double h) {
  return ode_residual_fn([&](double q) { return sturm_liouville_f(branch, l, q); }, p, h, (1.0 - l * l) / 3.0);
}

struct CompletenessResult {
  double max_error = 0.0;
  std::vector<double> reconstruction;
  std::vector<double> exact;
  std::size_t p_nodes = 0;
  std::size_t l_nodes = 0;
  int refinements = 0;
};

namespace detail {

inline constexpr double kPhasePerPanel = 15.0;

inline std::size_t panels_for_phase(double phase) {
  return static_cast<std::size_t>(std::ceil(phase / kPhasePerPanel)) + 2;
}

/// (1/6) ∫_0^{l_max} dl l J0(l x) G(l) with G(l) = ∫ dp' |p'|³ J0(l x') g(p')
/// over one half-line, evaluated at every p of one sign.
template <class G>
void reconstruct_half(G& g, double lo, double hi, std::span<const double> targets, std::span<double> out, double l_max,
                      int level, std::size_t& p_nodes, std::size_t& l_nodes) {
  if (targets.empty()) return;
  double target_max = 0.0;
  for (double p : targets) target_max = std::max(target_max, std::abs(p));
  const double pmax = std::max(std::abs(lo), std::abs(hi));
  const std::size_t scale = std::size_t{1} << level;
  quad::NodeSet pn;
  if (hi > lo) pn = quad::composite_gauss_legendre(lo, hi, panels_for_phase(l_max * pmax / kSqrt3 * (hi - lo)) * scale);
  const double l_rate = momentum_argument(pmax) + momentum_argument(target_max);
  const auto ln = quad::composite_gauss_legendre(0.0, l_max, panels_for_phase(l_max * l_rate) * scale);
  p_nodes += pn.x.size();
  l_nodes += ln.x.size();

  std::vector<double> gw(pn.x.size()), xarg(pn.x.size());
  for (std::size_t i = 0; i < pn.x.size(); ++i) {
    const double p = pn.x[i];
    gw[i] = pn.w[i] * std::abs(p * p * p) * g(p);
    xarg[i] = momentum_argument(p);
  }
  std::vector<double> big_g(ln.x.size());
  parallel_for(ln.x.size(), [&](std::size_t j) {
    double s = 0.0;
    for (std::size_t i = 0; i < gw.size(); ++i) s += gw[i] * bessel_j0(ln.x[j] * xarg[i]);
    big_g[j] = s;
  });
  parallel_for(targets.size(), [&](std::size_t t) {
    const double x = momentum_argument(targets[t]);
    double s = 0.0;
    for (std::size_t j = 0; j < ln.x.size(); ++j) s += ln.w[j] * ln.x[j] * bessel_j0(ln.x[j] * x) * big_g[j];
    out[t] = s / 6.0;
  });
}

}  // namespace detail

/// Reconstruct g on p_grid through the truncated completeness relation
///   g(p) ≈ (1/6) ∫_{-l_max}^{l_max} dl l Σ± f±_l(p) ∫ dp' p'³ f±_l(p') g(p').
/// [support_lo, support_hi] bounds where g is non-negligible. Node density is
/// doubled until the reconstruction moves by less than quad_tol.
template <class G>
CompletenessResult completeness_check(G&& g, double support_lo, double support_hi, std::span<const double> p_grid,
                                      double l_max, double quad_tol = 1e-6) {
  if (!(support_hi > support_lo) || !(l_max > 0.0) || !(quad_tol > 0.0))
    detail::raise_domain("completeness_check", "need a nonempty support, l_max > 0 and quad_tol > 0");
  std::vector<double> pos, neg;
  std::vector<std::size_t> pos_idx, neg_idx;
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (p_grid[i] >= 0.0) {
      pos.push_back(p_grid[i]);
      pos_idx.push_back(i);
    } else {
      neg.push_back(p_grid[i]);
      neg_idx.push_back(i);
    }
  }
  auto run = [&](int level, CompletenessResult& res) {
    std::vector<double> rp(pos.size(), 0.0), rn(neg.size(), 0.0);
    res.p_nodes = res.l_nodes = 0;
    if (support_hi > 0.0)
      detail::reconstruct_half(g, std::max(support_lo, 0.0), support_hi, pos, rp, l_max, level, res.p_nodes, res.l_nodes);
    if (support_lo < 0.0)
      detail::reconstruct_half(g, support_lo, std::min(support_hi, 0.0), neg, rn, l_max, level, res.p_nodes, res.l_nodes);
    res.reconstruction.assign(p_grid.size(), 0.0);
    for (std::size_t i = 0; i < pos.size(); ++i) res.reconstruction[pos_idx[i]] = rp[i];
    for (std::size_t i = 0; i < neg.size(); ++i) res.reconstruction[neg_idx[i]] = rn[i];
  };

  CompletenessResult cur, next;
  run(0, cur);
  int level = 0;
  for (;;) {
    run(level + 1, next);
    double change = 0.0;
    for (std::size_t i = 0; i < p_grid.size(); ++i)
      change = std::max(change, std::abs(next.reconstruction[i] - cur.reconstruction[i]));
    cur = std::move(next);
    ++level;
    if (change <= quad_tol) break;
    if (level >= 4) throw convergence_error("completeness_check: quadrature did not settle, change " + std::to_string(change));
  }
  cur.refinements = level;
  cur.exact.resize(p_grid.size());
  cur.max_error = 0.0;
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    const double p = p_grid[i];
    cur.exact[i] = (p >= support_lo && p <= support_hi) ? g(p) : 0.0;
    cur.max_error = std::max(cur.max_error, std::abs(cur.reconstruction[i] - cur.exact[i]));
  }
  return cur;
}

}  // namespace gsq
