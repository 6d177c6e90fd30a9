#pragma once

// Invariant states |ψ_k^α⟩ of U_k: closed-form components, normalization,
// large-m asymptotics, and moment divergence classification.
//
// The unnormalized component at n = α + 2mk is
//   (2k)^{km} Π_{i=1..k} Γ(m + (α+i)/2k) / √((α+2mk)!).
// Gauss's multiplication formula turns its square into a constant times
// Π Γ(m+a_i)/Γ(m+b_i) with a_i = (α+i)/2k, b_i = (k+α+i)/2k, so every
// amplitude is evaluated through gamma ratios whose logarithms stay O(ln m).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gsq/errors.hpp"
#include "gsq/fockspace.hpp"
#include "gsq/quadrature.hpp"
#include "gsq/specfun.hpp"

namespace gsq {

struct StateSpec {
  int k = 3;
  int alpha = 0;
  std::size_t m_max = 100;
  bool normalize = true;

  void validate() const {
    if (k < 1) detail::raise_domain("StateSpec", "k must be at least 1");
    if (alpha < 0 || alpha >= k) detail::raise_domain("StateSpec", "alpha must lie in [0, k-1]");
    if (m_max < 1) detail::raise_domain("StateSpec", "m_max must be positive");
    if (normalize && k < 3) detail::raise_domain("StateSpec", "norm diverges for k<3");
  }

  /// Smallest basis holding every stored component.
  std::size_t implied_dim() const { return static_cast<std::size_t>(alpha) + 2 * m_max * static_cast<std::size_t>(k) + 1; }
};

// ---------------------------------------------------------------------------
// Components
// ---------------------------------------------------------------------------

namespace detail {

inline void check_k_alpha(const char* where, int k, int alpha) {
  if (k < 1) raise_domain(where, "k must be at least 1");
  if (alpha < 0 || alpha >= k) raise_domain(where, "alpha must lie in [0, k-1]");
}

/// ln of the m = 0 component, Π Γ((α+i)/2k) / √(α!).
inline double component_log0(int k, int alpha) {
  double s = -0.5 * ln_gamma(alpha + 1.0);
  for (int i = 1; i <= k; ++i) s += ln_gamma(static_cast<double>(alpha + i) / (2.0 * k));
  return s;
}

/// ½ Σ ln[(a_i)_m/(b_i)_m] = ln(component(m)/component(0)), real m >= 0.
class ComponentLogRel {
 public:
  ComponentLogRel(int k, int alpha) {
    for (int i = 1; i <= k; ++i)
      ratios_.emplace_back(static_cast<double>(alpha + i) / (2.0 * k), static_cast<double>(k + alpha + i) / (2.0 * k));
  }
  double operator()(double m) const {
    double s = 0.0;
    for (const auto& r : ratios_) s += r(m);
    return 0.5 * s;
  }

 private:
  std::vector<PochhammerRatio> ratios_;
};

inline double component_log_rel(int k, int alpha, double m) { return ComponentLogRel(k, alpha)(m); }

}  // namespace detail

/// ln of the unnormalized amplitude ⟨α+2mk|ψ_k^α⟩.
inline double component_log(int k, int alpha, std::size_t m) {
  detail::check_k_alpha("component_log", k, alpha);
  return detail::component_log0(k, alpha) + detail::component_log_rel(k, alpha, static_cast<double>(m));
}

/// Same quantity assembled literally from log-gammas and ln (α+2mk)!; loses
/// absolute accuracy once the individual terms grow, so only used as a check.
inline double component_log_direct(int k, int alpha, std::size_t m) {
  detail::check_k_alpha("component_log_direct", k, alpha);
  const double md = static_cast<double>(m);
  double s = k * md * std::log(2.0 * k) - 0.5 * ln_gamma(alpha + 2.0 * md * k + 1.0);
  for (int i = 1; i <= k; ++i) s += ln_gamma(md + static_cast<double>(alpha + i) / (2.0 * k));
  return s;
}

// ---------------------------------------------------------------------------
// Normalization c(k, α)
// ---------------------------------------------------------------------------

struct NormalizationReport {
  double hypergeometric = 0.0;  ///< k+1Fk(...;1) · Π Γ((i+α)/2k)² / α!
  double direct = 0.0;          ///< Σ_m component² with Euler–Maclaurin tail
  double rel_diff = 0.0;
  double series_est_error = 0.0;
};

struct NormalizationOptions {
  long direct_terms = 100'000;
  double agreement_tol = 1e-8;
};

/// Both evaluation routes for c(k, α) side by side.
inline NormalizationReport normalization_report(int k, int alpha, const NormalizationOptions& opt = {}) {
  detail::check_k_alpha("normalization_c", k, alpha);
  if (k < 3) detail::raise_domain("normalization_c", "norm diverges for k<3");

  NormalizationReport rep;
  const auto series = genhyp_unit(k, alpha);
  double lprod = -ln_gamma(alpha + 1.0);
  for (int i = 1; i <= k; ++i) lprod += 2.0 * ln_gamma(static_cast<double>(i + alpha) / (2.0 * k));
  rep.hypergeometric = series.value * std::exp(lprod);
  rep.series_est_error = series.est_error;

  // direct route: Σ_{m<N} exp(2 Δlog) + ∫_N^∞ + f(N)/2 - f'(N)/12
  const detail::ComponentLogRel rel(k, alpha);
  auto f = [&rel](double m) { return std::exp(2.0 * rel(m)); };
  long double sum = 0.0L, comp = 0.0L;
  for (long m = 0; m < opt.direct_terms; ++m) {
    const long double y = static_cast<long double>(f(static_cast<double>(m))) - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double n0 = static_cast<double>(opt.direct_terms);
  // m = N / u², so the integrand behaves like u^{k-3} near u = 0
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    return f(n0 / (u * u)) * 2.0 * n0 / (u * u * u);
  };
  const double integral = quad::adaptive_gk(integrand, 0.0, 1.0, 1e-14).value;
  const double h = 0.5;
  const double deriv = (f(n0 + h) - f(n0 - h)) / (2.0 * h);
  const double tail = integral + 0.5 * f(n0) - deriv / 12.0;
  rep.direct = static_cast<double>(sum + static_cast<long double>(tail)) * std::exp(2.0 * detail::component_log0(k, alpha));
  rep.rel_diff = std::abs(rep.direct - rep.hypergeometric) / rep.hypergeometric;
  return rep;
}

/// c(k, α) from the hypergeometric formula, after checking it against the
/// direct component sum.
inline double normalization_c(int k, int alpha, const NormalizationOptions& opt = {}) {
  const auto rep = normalization_report(k, alpha, opt);
  if (rep.rel_diff > opt.agreement_tol)
    throw consistency_error("normalization_c: hypergeometric and direct sums differ by " + std::to_string(rep.rel_diff));
  return rep.hypergeometric;
}

/// d(k, α) = (2π)^{(2k-1)/4} / ((2k)^{(2α+1)/4} √c(k, α)). Passing c = 1
/// gives the prefactor of the unnormalized components.
inline double prefactor_from_c(int k, int alpha, double c) {
  return std::pow(2.0 * std::numbers::pi, (2.0 * k - 1.0) / 4.0) / std::pow(2.0 * k, (2.0 * alpha + 1.0) / 4.0) /
         std::sqrt(c);
}

inline double prefactor_d(int k, int alpha) {
  detail::check_k_alpha("prefactor_d", k, alpha);
  if (k < 3) detail::raise_domain("prefactor_d", "norm diverges for k<3");
  return prefactor_from_c(k, alpha, normalization_c(k, alpha));
}

// ---------------------------------------------------------------------------
// InvariantState
// ---------------------------------------------------------------------------

class InvariantState {
 public:
  InvariantState(StateSpec spec, std::vector<double> amps, double c_norm, double d_prefactor)
      : spec_(spec), amps_(std::move(amps)), c_norm_(c_norm), d_prefactor_(d_prefactor) {
    log_amps_.reserve(amps_.size());
    for (double a : amps_) log_amps_.push_back(std::log(a));
  }

  const StateSpec& spec() const noexcept { return spec_; }
  int k() const noexcept { return spec_.k; }
  int alpha() const noexcept { return spec_.alpha; }
  std::span<const double> amps() const noexcept { return amps_; }
  std::span<const double> log_amps() const noexcept { return log_amps_; }
  double c_norm() const noexcept { return c_norm_; }
  double d_prefactor() const noexcept { return d_prefactor_; }
  std::size_t size() const noexcept { return amps_.size(); }

  std::size_t index(std::size_t m) const noexcept {
    return static_cast<std::size_t>(spec_.alpha) + 2 * static_cast<std::size_t>(spec_.k) * m;
  }
  double amplitude(std::size_t m) const { return amps_.at(m); }

  /// Amplitude at basis index n (zero off the residue class α mod 2k).
  double amplitude_at(std::size_t n) const {
    const std::size_t period = 2 * static_cast<std::size_t>(spec_.k);
    if (n < static_cast<std::size_t>(spec_.alpha) || (n - spec_.alpha) % period != 0) return 0.0;
    const std::size_t m = (n - spec_.alpha) / period;
    return m < amps_.size() ? amps_[m] : 0.0;
  }

  /// Embed the stored components with index < dim into a truncated basis.
  FockVector to_fock(std::size_t dim) const {
    std::vector<cplx> v(dim, cplx{0.0, 0.0});
    for (std::size_t m = 0; m < amps_.size() && index(m) < dim; ++m) v[index(m)] = amps_[m];
    return FockVector(std::move(v));
  }

 private:
  StateSpec spec_;
  std::vector<double> amps_;
  std::vector<double> log_amps_;
  double c_norm_;
  double d_prefactor_;
};

/// Build |ψ_k^α⟩ for m = 0..m_max. Unnormalized states carry c_norm = 1.
/// Amplitudes follow the two-term recurrence in extended precision, so that
/// consecutive components satisfy it to rounding of the final double.
inline InvariantState build_state(const StateSpec& spec) {
  spec.validate();
  const double c = spec.normalize ? normalization_c(spec.k, spec.alpha) : 1.0;
  const long double first =
      std::exp(static_cast<long double>(detail::component_log0(spec.k, spec.alpha)) - 0.5L * std::log(static_cast<long double>(c)));
  std::vector<long double> num_shift, den_shift;
  for (int i = 1; i <= spec.k; ++i) {
    num_shift.push_back(static_cast<long double>(spec.alpha + i) / (2.0L * spec.k));
    den_shift.push_back(static_cast<long double>(spec.k + spec.alpha + i) / (2.0L * spec.k));
  }
  std::vector<double> amps(spec.m_max + 1);
  long double a = first;
  for (std::size_t m = 0; m <= spec.m_max; ++m) {
    amps[m] = static_cast<double>(a);
    long double num = 1.0L, den = 1.0L;
    const auto ml = static_cast<long double>(m);
    for (std::size_t i = 0; i < num_shift.size(); ++i) {
      num *= ml + num_shift[i];
      den *= ml + den_shift[i];
    }
    a *= std::sqrt(num / den);
  }
  return InvariantState(spec, std::move(amps), c, prefactor_from_c(spec.k, spec.alpha, c));
}

/// Interior residual of H_k on a truncated embedding: rows n <= dim-k-1 only,
/// where every coupled component is present.
struct ResidualReport {
  double residual = 0.0;      ///< ‖H_k ψ‖ over interior rows
  double relative = 0.0;      ///< residual / (r ‖ψ‖)
  double rounding_scale = 0.0;  ///< ‖ |H_k| |ψ| ‖ over the same rows
};

inline ResidualReport interior_residual(const InvariantState& state, double r, std::size_t dim) {
  const auto v = state.to_fock(dim);
  const auto hk = build_hk(state.k(), r, dim);
  const auto hv = apply(hk, v);
  std::vector<cplx> absv(dim);
  for (std::size_t n = 0; n < dim; ++n) absv[n] = std::abs(v[n]);
  std::vector<cplx> scale(dim, cplx{0.0, 0.0});
  BandedOperator abs_hk(dim, [&] {
    std::vector<Diagonal> ds;
    for (const auto& d : hk.diagonals()) {
      Diagonal a{d.offset, {}};
      for (const auto& x : d.values) a.values.emplace_back(std::abs(x));
      ds.push_back(std::move(a));
    }
    return ds;
  }(), false);
  abs_hk.accumulate(absv, scale);
  ResidualReport rep;
  double s = 0.0, sc = 0.0;
  const std::size_t last = dim - static_cast<std::size_t>(state.k()) - 1;
  for (std::size_t n = 0; n <= last; ++n) {
    s += std::norm(hv[n]);
    sc += std::norm(scale[n]);
  }
  rep.residual = std::sqrt(s);
  rep.relative = rep.residual / (r * v.norm());
  rep.rounding_scale = std::sqrt(sc);
  return rep;
}

// ---------------------------------------------------------------------------
// Asymptotics
// ---------------------------------------------------------------------------

struct TailFit {
  double exponent_m = 0.0;  ///< slope of ln amplitude against ln m
  double exponent_n = 0.0;  ///< slope against ln n, n = α + 2mk
};

inline TailFit tail_fit(const InvariantState& state, std::size_t m_lo, std::size_t m_hi) {
  if (m_lo < 10 || m_lo >= m_hi || m_hi >= state.size())
    detail::raise_domain("tail_exponent", "need 10 <= m_lo < m_hi <= m_max");
  auto slope = [&](auto xfun) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(m_hi - m_lo + 1);
    for (std::size_t m = m_lo; m <= m_hi; ++m) {
      const double x = xfun(m);
      const double y = state.log_amps()[m];
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  };
  TailFit fit;
  fit.exponent_m = slope([](std::size_t m) { return std::log(static_cast<double>(m)); });
  fit.exponent_n = slope([&](std::size_t m) { return std::log(static_cast<double>(state.index(m))); });
  return fit;
}

/// Least-squares decay exponent of the amplitudes in m over [m_lo, m_hi].
inline double tail_exponent(const InvariantState& state, std::size_t m_lo, std::size_t m_hi) {
  return tail_fit(state, m_lo, m_hi).exponent_m;
}

/// amplitude(m) / (d m^{-k/4}).
inline double asymptotic_ratio(const InvariantState& state, std::size_t m) {
  return std::exp(state.log_amps()[m] + 0.25 * state.k() * std::log(static_cast<double>(m))) / state.d_prefactor();
}

// ---------------------------------------------------------------------------
// Divergence classification of partial sums
// ---------------------------------------------------------------------------

enum class Growth { convergent, power_divergent, log_divergent, inconclusive };

inline const char* to_string(Growth g) {
  switch (g) {
    case Growth::convergent: return "convergent";
    case Growth::power_divergent: return "power_divergent";
    case Growth::log_divergent: return "log_divergent";
    case Growth::inconclusive: return "inconclusive";
  }
  return "?";
}

inline bool is_divergent(Growth g) { return g == Growth::power_divergent || g == Growth::log_divergent; }

struct GrowthFit {
  double exponent = 0.0;  ///< slope of ln|block increment| against ln cutoff
  double log_r2 = 0.0;    ///< R² of partial sums against ln cutoff
  Growth growth = Growth::inconclusive;
};

inline constexpr double kGrowthDeadband = 0.05;
inline constexpr double kLogR2Threshold = 0.999;

/// Classify a sequence of partial sums taken at geometric cutoffs, given the
/// block increments between consecutive cutoffs.
inline GrowthFit classify_growth(std::span<const std::size_t> cutoffs, std::span<const double> partial,
                                 std::span<const double> increments) {
  if (cutoffs.size() < 3 || partial.size() != cutoffs.size() || increments.size() + 1 != cutoffs.size())
    detail::raise_domain("classify_growth", "need at least three cutoffs with matching sums");
  GrowthFit fit;
  // slope of ln|Δ| vs ln c, skipping exactly-zero blocks
  double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
  bool all_zero = true;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    if (increments[i] == 0.0) continue;
    all_zero = false;
    const double x = std::log(static_cast<double>(cutoffs[i]));
    const double y = std::log(std::abs(increments[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    cnt += 1.0;
  }
  if (all_zero) {
    fit.exponent = -std::numeric_limits<double>::infinity();
    fit.growth = Growth::convergent;
    return fit;
  }
  fit.exponent = cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;

  // linear fit of S against ln c
  double tx = 0, ty = 0, txx = 0, txy = 0, tyy = 0;
  const double n = static_cast<double>(cutoffs.size());
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    const double x = std::log(static_cast<double>(cutoffs[i]));
    tx += x;
    ty += partial[i];
    txx += x * x;
    txy += x * partial[i];
    tyy += partial[i] * partial[i];
  }
  const double vx = n * txx - tx * tx;
  const double vy = n * tyy - ty * ty;
  const double cxy = n * txy - tx * ty;
  fit.log_r2 = (vx > 0 && vy > 0) ? (cxy * cxy) / (vx * vy) : 0.0;

  if (fit.exponent > kGrowthDeadband)
    fit.growth = Growth::power_divergent;
  else if (fit.exponent < -kGrowthDeadband)
    fit.growth = Growth::convergent;
  else if (fit.log_r2 > kLogR2Threshold)
    fit.growth = Growth::log_divergent;
  else
    fit.growth = Growth::inconclusive;
  return fit;
}

/// Cutoffs 2^lo .. 2^hi.
inline std::vector<std::size_t> geometric_cutoffs(int lo = 10, int hi = 20) {
  std::vector<std::size_t> c;
  for (int e = lo; e <= hi; ++e) c.push_back(std::size_t{1} << e);
  return c;
}

struct MomentRow {
  int j = 0;
  std::vector<double> partial_sums;
  GrowthFit fit;
  bool rule_divergent = false;  ///< j >= k/2 - 1
};

struct MomentReport {
  int k = 0;
  int alpha = 0;
  std::vector<std::size_t> cutoffs;
  std::vector<MomentRow> rows;

  bool matches_rule() const {
    for (const auto& r : rows)
      if (r.fit.growth == Growth::inconclusive || is_divergent(r.fit.growth) != r.rule_divergent) return false;
    return true;
  }
};

/// Partial sums of ⟨n^j⟩ for j = 0..j_max at the given cutoffs, classified
/// as convergent or divergent. The state must cover the largest cutoff.
inline MomentReport classify_moments(const InvariantState& state, int j_max,
                                     std::vector<std::size_t> cutoffs = geometric_cutoffs()) {
  if (j_max < 0 || j_max > 4) detail::raise_domain("classify_moments", "j_max must lie in [0, 4]");
  if (cutoffs.size() < 3 || !std::is_sorted(cutoffs.begin(), cutoffs.end()))
    detail::raise_domain("classify_moments", "need at least three increasing cutoffs");
  if (state.index(state.size() - 1) + 2 * static_cast<std::size_t>(state.k()) < cutoffs.back())
    detail::raise_domain("classify_moments", "state does not cover the largest cutoff; raise m_max");

  MomentReport rep;
  rep.k = state.k();
  rep.alpha = state.alpha();
  rep.cutoffs = cutoffs;
  for (int j = 0; j <= j_max; ++j) {
    // block sums over [c_{i-1}, c_i), with the first block [0, c_0)
    std::vector<double> blocks(cutoffs.size(), 0.0);
    std::size_t b = 0;
    long double acc = 0.0L;
    for (std::size_t m = 0; m < state.size(); ++m) {
      const std::size_t n = state.index(m);
      while (b < cutoffs.size() && n >= cutoffs[b]) {
        blocks[b] = static_cast<double>(acc);
        acc = 0.0L;
        ++b;
      }
      if (b == cutoffs.size()) break;
      const long double amp = state.amps()[m];
      acc += amp * amp * std::pow(static_cast<long double>(n), j);
    }
    if (b < cutoffs.size()) blocks[b] = static_cast<double>(acc);
    MomentRow row;
    row.j = j;
    long double run = 0.0L;
    for (double blk : blocks) {
      run += blk;
      row.partial_sums.push_back(static_cast<double>(run));
    }
    std::vector<double> inc(blocks.begin() + 1, blocks.end());
    row.fit = classify_growth(rep.cutoffs, row.partial_sums, inc);
    row.rule_divergent = 2 * j >= state.k() - 2;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// ⟨x⟩, ⟨p⟩, ⟨x²⟩, ⟨p²⟩ for superpositions of invariant states
// ---------------------------------------------------------------------------

struct SuperpositionTerm {
  cplx coefficient;
  std::reference_wrapper<const InvariantState> state;
};

struct XpReport {
  std::vector<std::size_t> cutoffs;
  std::vector<double> x, p, x2, p2;
  GrowthFit x_fit, p_fit, x2_fit, p2_fit;
};

/// Partial sums of the quadrature moments of Σ c_s |ψ_k^{α_s}⟩ over n < cutoff.
inline XpReport xp_superposition_expectations(std::span<const SuperpositionTerm> terms,
                                              std::vector<std::size_t> cutoffs = geometric_cutoffs()) {
  if (terms.empty()) detail::raise_domain("xp_superposition_expectations", "no states given");
  const int k = terms.front().state.get().k();
  double norm2 = 0.0;
  for (const auto& t : terms) {
    if (t.state.get().k() != k) detail::raise_domain("xp_superposition_expectations", "states must share k");
    norm2 += std::norm(t.coefficient);
  }
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i + 1; j < terms.size(); ++j)
      if (terms[i].state.get().alpha() == terms[j].state.get().alpha())
        detail::raise_domain("xp_superposition_expectations", "states must have distinct alpha");
  if (std::abs(norm2 - 1.0) > 1e-12) detail::raise_domain("xp_superposition_expectations", "coefficients must be unit-norm");
  if (cutoffs.size() < 3 || !std::is_sorted(cutoffs.begin(), cutoffs.end()))
    detail::raise_domain("xp_superposition_expectations", "need at least three increasing cutoffs");
  const std::size_t dim = cutoffs.back() + 2;
  std::vector<cplx> psi(dim, cplx{0.0, 0.0});
  for (const auto& t : terms) {
    const auto& s = t.state.get();
    if (s.index(s.size() - 1) + 2 * static_cast<std::size_t>(k) < cutoffs.back())
      detail::raise_domain("xp_superposition_expectations", "state does not cover the largest cutoff");
    for (std::size_t m = 0; m < s.size() && s.index(m) < dim; ++m) psi[s.index(m)] += t.coefficient * s.amplitude(m);
  }

  XpReport rep;
  rep.cutoffs = cutoffs;
  const std::size_t nc = cutoffs.size();
  std::vector<double> bx(nc), bp(nc), bx2(nc), bp2(nc);
  std::size_t b = 0;
  long double ax = 0, ap = 0, ax2 = 0, ap2 = 0;
  auto flush = [&] {
    bx[b] = static_cast<double>(ax);
    bp[b] = static_cast<double>(ap);
    bx2[b] = static_cast<double>(ax2);
    bp2[b] = static_cast<double>(ap2);
    ax = ap = ax2 = ap2 = 0;
  };
  // A term belongs to the block of its highest coupled index.
  for (std::size_t n = 0; n + 2 < dim && b < nc; ++n) {
    while (b < nc && n + 2 > cutoffs[b]) {
      flush();
      ++b;
    }
    if (b == nc) break;
    const double s1 = std::sqrt(static_cast<double>(n + 1));
    const double s2 = std::sqrt(static_cast<double>(n + 1) * static_cast<double>(n + 2));
    const cplx z1 = std::conj(psi[n]) * psi[n + 1] * s1;
    const cplx z2 = std::conj(psi[n]) * psi[n + 2] * s2;
    const double diag = (static_cast<double>(n) + 0.5) * std::norm(psi[n]);
    ax += std::numbers::sqrt2 * z1.real();
    ap += std::numbers::sqrt2 * z1.imag();
    ax2 += z2.real() + diag;
    ap2 += -z2.real() + diag;
  }
  if (b < nc) flush();

  auto finish = [&](const std::vector<double>& blocks, std::vector<double>& partial, GrowthFit& fit) {
    long double run = 0;
    for (double blk : blocks) {
      run += blk;
      partial.push_back(static_cast<double>(run));
    }
    std::vector<double> inc(blocks.begin() + 1, blocks.end());
    fit = classify_growth(rep.cutoffs, partial, inc);
  };
  finish(bx, rep.x, rep.x_fit);
  finish(bp, rep.p, rep.p_fit);
  finish(bx2, rep.x2, rep.x2_fit);
  finish(bp2, rep.p2, rep.p2_fit);
  return rep;
}

}  // namespace gsq
