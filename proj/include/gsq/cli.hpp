#pragma once

// Command implementations behind the gsq executable. Each command writes to a
// stream or a directory and reports failures through exceptions, which run()
// maps to exit codes: 0 success, 2 validation, 3 convergence.

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsq/eigenstates.hpp"
#include "gsq/errors.hpp"
#include "gsq/fockspace.hpp"
#include "gsq/io.hpp"
#include "gsq/momentum3.hpp"
#include "gsq/specfun.hpp"

namespace gsq::cli {

enum class Subcommand { state, verify, moments, momentum, figures, selftest };
enum class Format { csv, json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitConvergence = 3;

struct RunConfig {
  Subcommand subcommand = Subcommand::state;
  int k = 3;
  int alpha = 0;
  std::size_t m_max = 10'000;
  std::size_t dim = 1024;
  double tau = 0.05;
  double r = 1.0;
  double tol = 1e-10;
  double p_min = -6.0;
  double p_max = 6.0;
  std::size_t p_steps = 1201;
  std::string output_path = "-";
  Format format = Format::csv;

  bool unnormalized = false;
  int k_min = 3;
  int k_max = 8;
  int j_max = 3;
  std::size_t m_terms = 20'000;
  std::size_t fig1_n_max = 200;
  bool synthesize = false;
  bool overlaps = false;
};

inline constexpr double kTauLimit = 0.1;
inline constexpr double kFig2Mask = 0.05;
inline constexpr double kPsi1Mask = 0.1;

inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& what) { detail::raise_domain("config", what); };
  switch (c.subcommand) {
    case Subcommand::state:
      if (c.k < 1 || c.alpha < 0 || c.alpha >= c.k) fail("need k >= 1 and 0 <= alpha < k");
      if (!c.unnormalized && c.k < 3) fail("norm diverges for k<3");
      if (c.m_max < 1) fail("m-max must be positive");
      break;
    case Subcommand::verify:
      if (c.k < 1 || c.alpha < 0 || c.alpha >= c.k) fail("need k >= 1 and 0 <= alpha < k");
      if (c.dim <= 4 * static_cast<std::size_t>(c.k)) fail("dim must exceed 4k");
      if (c.k >= 3 && !(std::abs(c.tau) <= kTauLimit)) fail("tau must not exceed 0.1 for k >= 3");
      if (!(c.r > 0.0) || !(c.tol > 0.0)) fail("r and tol must be positive");
      break;
    case Subcommand::moments:
      if (c.k_min < 3 || c.k_max < c.k_min || c.k_max > 12) fail("need 3 <= k-min <= k-max <= 12");
      if (c.j_max < 0 || c.j_max > 4) fail("j-max must lie in [0, 4]");
      break;
    case Subcommand::momentum:
    case Subcommand::figures:
      if (!(c.p_max > c.p_min) || c.p_steps < 2) fail("need p-max > p-min and at least two grid points");
      if (c.m_terms < kMinSynthesisTerms) fail("m-terms must be at least 1000");
      if (c.fig1_n_max < 1) fail("fig1-n-max must be positive");
      break;
    case Subcommand::selftest: break;
  }
}

inline std::vector<double> p_grid(const RunConfig& c) {
  std::vector<double> ps(c.p_steps);
  for (std::size_t i = 0; i < c.p_steps; ++i)
    ps[i] = c.p_min + (c.p_max - c.p_min) * static_cast<double>(i) / static_cast<double>(c.p_steps - 1);
  // a symmetric range gets exactly mirrored points so parity survives rounding
  if (c.p_min == -c.p_max)
    for (std::size_t i = 0; i < c.p_steps / 2; ++i) ps[c.p_steps - 1 - i] = -ps[i];
  if (c.p_min == -c.p_max && c.p_steps % 2 == 1) ps[c.p_steps / 2] = 0.0;
  return ps;
}

// ---------------------------------------------------------------------------
// output helpers
// ---------------------------------------------------------------------------

inline void emit_table(const io::Table& t, Format f, std::ostream& os) {
  if (f == Format::csv)
    io::write_csv(os, t);
  else
    os << io::to_json(t).dump(2) << '\n';
}

template <class Writer>
void with_output(const std::string& path, std::ostream& fallback, Writer&& w) {
  if (path.empty() || path == "-") {
    w(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) detail::raise_domain("output", "cannot open " + path);
  w(f);
}

// ---------------------------------------------------------------------------
// state
// ---------------------------------------------------------------------------

inline io::Table state_table(const RunConfig& c) {
  const auto st = build_state({c.k, c.alpha, c.m_max, !c.unnormalized});
  io::Table t;
  t.add_meta("k", std::to_string(c.k));
  t.add_meta("alpha", std::to_string(c.alpha));
  t.add_meta("m_max", std::to_string(c.m_max));
  t.add_meta("normalized", c.unnormalized ? "false" : "true");
  t.add_meta("c", st.c_norm());
  t.add_meta("d", st.d_prefactor());
  t.columns = {"n", "amplitude", "log_amplitude"};
  for (std::size_t m = 0; m < st.size(); ++m)
    t.add_row({static_cast<double>(st.index(m)), st.amplitude(m), st.log_amps()[m]});
  return t;
}

inline void cmd_state(const RunConfig& c, std::ostream& out) {
  const auto t = state_table(c);
  with_output(c.output_path, out, [&](std::ostream& os) { emit_table(t, c.format, os); });
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json check_entry(const std::string& name, double value, double threshold, bool pass) {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["value"] = value;
  j["threshold"] = threshold;
  j["pass"] = pass;
  return j;
}

inline nlohmann::ordered_json verify_report(const RunConfig& c) {
  nlohmann::ordered_json rep;
  rep["k"] = c.k;
  rep["alpha"] = c.alpha;
  rep["dim"] = c.dim;
  rep["tau"] = c.tau;
  rep["checks"] = nlohmann::ordered_json::array();
  EvolveOptions eo;
  eo.tol = c.tol;

  if (c.k <= 2) {
    // the invariant states are not normalizable; check the evolution itself
    // against the displaced / squeezed vacuum
    const auto vac = FockVector::basis(c.dim, 0);
    const auto ev = evolve_u(c.k, c.tau, vac, eo);
    double dev = 0.0;
    for (std::size_t n = 0; n < c.dim / 2; ++n) {
      const double exact = c.k == 1 ? coherent_amplitude(c.tau, n) : squeezed_vacuum_amplitude(c.tau, n);
      dev = std::max(dev, std::abs(ev.state[n] - exact));
    }
    auto e = check_entry(c.k == 1 ? "coherent_state" : "squeezed_vacuum", dev, 1e-8, dev <= 1e-8 && ev.reliable);
    e["reliable"] = ev.reliable;
    e["guard_mass"] = ev.guard_mass;
    rep["checks"].push_back(e);
  } else {
    const std::size_t m_max = (c.dim - static_cast<std::size_t>(c.alpha)) / (2 * static_cast<std::size_t>(c.k)) + 1;
    const auto st = build_state({c.k, c.alpha, m_max, true});
    const auto res = interior_residual(st, c.r, c.dim);
    auto e = check_entry("interior_residual", res.relative, 1e-10, res.relative <= 1e-10);
    e["rounding_ratio"] = res.residual / res.rounding_scale;
    rep["checks"].push_back(e);

    const auto v = st.to_fock(c.dim);
    eo.require_clean_guard = false;
    const auto fwd = evolve_u(c.k, c.tau, v, eo);
    const double dev = l2_diff(fwd.state, v, c.dim / 2);
    auto inv = check_entry("invariance_lower_half", dev, 1e-3, dev <= 1e-3);
    inv["reliable"] = fwd.reliable;
    inv["input_guard_mass"] = v.tail_mass();
    inv["norm_drift"] = fwd.norm_drift;
    inv["steps"] = fwd.steps;
    rep["checks"].push_back(inv);

    const auto back = evolve_u(c.k, -c.tau, fwd.state, eo);
    const double rt = l2_diff(back.state, v);
    rep["checks"].push_back(check_entry("round_trip", rt, 1e3 * c.tol, rt <= 1e3 * c.tol));

    const auto g = apply_gk(c.k, v);
    const double ang = 2.0 * std::numbers::pi * c.alpha / c.k;
    const cplx phase = c.alpha == 0 ? cplx{1.0, 0.0} : cplx{std::cos(ang), std::sin(ang)};
    double gdev = 0.0;
    for (std::size_t n = 0; n < c.dim; ++n) gdev = std::max(gdev, std::abs(g[n] - phase * v[n]));
    rep["checks"].push_back(check_entry("gk_phase", gdev, 0.0, gdev == 0.0));
  }
  bool all = true;
  for (const auto& e : rep["checks"]) all = all && e["pass"].get<bool>();
  rep["all_pass"] = all;
  return rep;
}

inline void cmd_verify(const RunConfig& c, std::ostream& out) {
  const auto rep = verify_report(c);
  with_output(c.output_path, out, [&](std::ostream& os) { os << rep.dump(2) << '\n'; });
}

// ---------------------------------------------------------------------------
// moments
// ---------------------------------------------------------------------------

inline io::Table moments_table(const RunConfig& c) {
  const auto cutoffs = geometric_cutoffs();
  io::Table t;
  t.add_meta("cutoffs", "2^10..2^20");
  t.add_meta("growth_deadband", kGrowthDeadband);
  t.add_meta("log_r2_threshold", kLogR2Threshold);
  t.columns = {"k", "state", "quantity", "growth_exponent", "log_r2", "last_partial_sum", "classification",
               "rule_divergent"};
  auto row = [&](int k, const std::string& which, const std::string& q, const GrowthFit& fit, double last,
                 const std::string& rule) {
    t.rows.push_back({std::to_string(k), which, q, io::format_real(fit.exponent), io::format_real(fit.log_r2),
                      io::format_real(last), to_string(fit.growth), rule});
  };
  for (int k = c.k_min; k <= c.k_max; ++k) {
    const std::size_t m_max = cutoffs.back() / (2 * static_cast<std::size_t>(k)) + 2;
    const auto s0 = build_state({k, 0, m_max, true});
    const auto s1 = build_state({k, 1, m_max, true});
    const auto mr = classify_moments(s0, c.j_max, cutoffs);
    for (const auto& r : mr.rows)
      row(k, "0", "n^" + std::to_string(r.j), r.fit, r.partial_sums.back(), r.rule_divergent ? "1" : "0");

    const SuperpositionTerm single[] = {{cplx{1.0, 0.0}, std::cref(s0)}};
    const auto xs = xp_superposition_expectations(single, cutoffs);
    row(k, "0", "x", xs.x_fit, xs.x.back(), "");
    row(k, "0", "x2", xs.x2_fit, xs.x2.back(), "");

    const double h = std::sqrt(0.5);
    const SuperpositionTerm pair[] = {{cplx{h, 0.0}, std::cref(s0)}, {cplx{h, 0.0}, std::cref(s1)}};
    const auto xp = xp_superposition_expectations(pair, cutoffs);
    row(k, "0+1", "x", xp.x_fit, xp.x.back(), "");
    row(k, "0+1", "p", xp.p_fit, xp.p.back(), "");
  }
  return t;
}

inline void cmd_moments(const RunConfig& c, std::ostream& out) {
  const auto t = moments_table(c);
  with_output(c.output_path, out, [&](std::ostream& os) { emit_table(t, c.format, os); });
}

// ---------------------------------------------------------------------------
// momentum and figures
// ---------------------------------------------------------------------------

inline double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

/// ψ⁰, -iψ¹, ψ² on the grid; ψ⁰, ψ² masked below |p| = 0.3 and -iψ¹ below 0.1.
struct PsiColumns {
  std::vector<double> psi0, minus_i_psi1, psi2;
  double max_imag = 0.0;
  double max_est_error = 0.0;
};

inline PsiColumns synthesize_columns(const std::vector<double>& ps, std::size_t m_terms) {
  std::vector<double> even_ps, odd_ps;
  std::vector<std::size_t> even_idx, odd_idx;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (std::abs(ps[i]) >= kSynthesisMinAbsP) {
      even_ps.push_back(ps[i]);
      even_idx.push_back(i);
    }
    if (std::abs(ps[i]) >= kPsi1Mask) {
      odd_ps.push_back(ps[i]);
      odd_idx.push_back(i);
    }
  }
  PsiColumns out;
  out.psi0.assign(ps.size(), nan_value());
  out.minus_i_psi1.assign(ps.size(), nan_value());
  out.psi2.assign(ps.size(), nan_value());
  const int evens[] = {0, 2};
  const int odds[] = {1};
  const auto se = synthesize_psi_grid(evens, even_ps, m_terms);
  const auto so = synthesize_psi_grid(odds, odd_ps, m_terms);
  auto track = [&](const SynthesisResult& r, cplx value) {
    if (!r.converged)
      throw convergence_error("synthesis did not settle (estimated error " + std::to_string(r.est_error) + ")");
    out.max_imag = std::max(out.max_imag, std::abs(value.imag()));
    out.max_est_error = std::max(out.max_est_error, r.est_error);
    return value.real();
  };
  for (std::size_t i = 0; i < even_ps.size(); ++i) {
    out.psi0[even_idx[i]] = track(se[0][i], se[0][i].value);
    out.psi2[even_idx[i]] = track(se[1][i], se[1][i].value);
  }
  for (std::size_t i = 0; i < odd_ps.size(); ++i)
    out.minus_i_psi1[odd_idx[i]] = track(so[0][i], cplx{0.0, -1.0} * so[0][i].value);
  return out;
}

inline io::Table momentum_table(const RunConfig& c) {
  const auto ps = p_grid(c);
  io::Table t;
  t.add_meta("phi2_mask_below", kFig2Mask);
  t.columns = {"p", "phi1", "phi2", "phi3"};
  std::optional<PsiColumns> psi;
  if (c.synthesize) {
    psi = synthesize_columns(ps, c.m_terms);
    t.add_meta("m_terms", std::to_string(c.m_terms));
    t.add_meta("max_est_error", psi->max_est_error);
    t.columns.insert(t.columns.end(), {"psi0", "minus_i_psi1", "psi2"});
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double p = ps[i];
    std::vector<double> r{p, eval_phi(WaveKind::phi1, p).real(),
                          std::abs(p) < kFig2Mask ? nan_value() : eval_phi(WaveKind::phi2, p).real(),
                          eval_phi(WaveKind::phi3, p).real()};
    if (psi) r.insert(r.end(), {psi->psi0[i], psi->minus_i_psi1[i], psi->psi2[i]});
    t.add_row(r);
  }
  return t;
}

inline nlohmann::ordered_json overlap_json(const OverlapSet& s) {
  nlohmann::ordered_json j;
  j["ov_0_phi1"] = s.ov_0_phi1;
  j["ov_2_phi1"] = s.ov_2_phi1;
  j["ov_0_phi2"] = s.ov_0_phi2;
  j["ov_2_phi2"] = s.ov_2_phi2;
  j["D"] = s.D;
  j["a0"] = s.a0;
  j["b0"] = s.b0;
  j["a2"] = s.a2;
  j["b2"] = s.b2;
  j["a1"] = {s.a1.real(), s.a1.imag()};
  return j;
}

inline nlohmann::ordered_json overlaps_report(std::size_t m_terms) {
  nlohmann::ordered_json j;
  j["closed_form_as_printed"] = overlap_json(overlaps_closed_form(ClosedFormReading::as_printed));
  j["closed_form_amended"] = overlap_json(overlaps_closed_form(ClosedFormReading::amended));
  j["closed_form_modulus_convention"] =
      overlap_json(overlaps_closed_form(ClosedFormReading::amended, EllipticConvention::modulus));
  j["quadrature"] = overlap_json(overlaps_numeric());
  const auto fit = fit_decomposition(m_terms);
  nlohmann::ordered_json f;
  auto cx = [](cplx z) { return nlohmann::ordered_json::array({z.real(), z.imag()}); };
  f["a0"] = cx(fit.a0);
  f["b0"] = cx(fit.b0);
  f["a1"] = cx(fit.a1);
  f["a2"] = cx(fit.a2);
  f["b2"] = cx(fit.b2);
  f["max_residual"] = {fit.max_residual0, fit.max_residual1, fit.max_residual2};
  j["least_squares_fit"] = f;
  return j;
}

inline void cmd_momentum(const RunConfig& c, std::ostream& out) {
  if (c.overlaps) {
    const auto j = overlaps_report(c.m_terms);
    with_output(c.output_path, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    return;
  }
  const auto t = momentum_table(c);
  with_output(c.output_path, out, [&](std::ostream& os) { emit_table(t, c.format, os); });
}

inline io::Table fig1_table(std::size_t n_max) {
  io::Table t;
  t.columns = {"n", "psi0", "psi1", "psi2"};
  std::vector<InvariantState> states;
  for (int a = 0; a < 3; ++a) states.push_back(build_state({3, a, n_max / 6 + 1, true}));
  for (std::size_t n = 0; n <= n_max; ++n) {
    std::vector<double> r{static_cast<double>(n)};
    for (const auto& s : states) {
      const double a = s.amplitude_at(n);
      r.push_back(a == 0.0 ? nan_value() : a);
    }
    t.add_row(r);
  }
  return t;
}

inline io::Table fig2_table(const std::vector<double>& ps) {
  io::Table t;
  t.add_meta("phi2_mask_below", kFig2Mask);
  t.columns = {"p", "phi1", "phi2"};
  for (double p : ps)
    t.add_row({p, eval_phi(WaveKind::phi1, p).real(),
               std::abs(p) < kFig2Mask ? nan_value() : eval_phi(WaveKind::phi2, p).real()});
  return t;
}

inline io::Table fig3_table(const std::vector<double>& ps, std::size_t m_terms) {
  const auto psi = synthesize_columns(ps, m_terms);
  io::Table t;
  t.add_meta("m_terms", std::to_string(m_terms));
  t.add_meta("even_mask_below", kSynthesisMinAbsP);
  t.add_meta("odd_mask_below", kPsi1Mask);
  t.add_meta("max_imag_part", psi.max_imag);
  t.add_meta("max_est_error", psi.max_est_error);
  t.columns = {"p", "psi0", "minus_i_psi1", "psi2"};
  for (std::size_t i = 0; i < ps.size(); ++i) t.add_row({ps[i], psi.psi0[i], psi.minus_i_psi1[i], psi.psi2[i]});
  return t;
}

inline void cmd_figures(const RunConfig& c, std::ostream& out) {
  const std::filesystem::path dir = (c.output_path.empty() || c.output_path == "-") ? "." : c.output_path;
  std::filesystem::create_directories(dir);
  const auto ps = p_grid(c);
  const std::pair<std::string, io::Table> files[] = {
      {"fig1.csv", fig1_table(c.fig1_n_max)}, {"fig2.csv", fig2_table(ps)}, {"fig3.csv", fig3_table(ps, c.m_terms)}};
  for (const auto& [name, table] : files) {
    std::ofstream f(dir / name);
    if (!f) detail::raise_domain("figures", "cannot write " + (dir / name).string());
    io::write_csv(f, table);
    out << (dir / name).string() << '\n';
  }
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json selftest_report() {
  nlohmann::ordered_json rep;
  rep["checks"] = nlohmann::ordered_json::array();
  auto add = [&](const std::string& name, double value, double threshold) {
    rep["checks"].push_back(check_entry(name, value, threshold, value <= threshold));
  };
  add("ln_gamma_half", std::abs(ln_gamma(0.5) - 0.5 * std::log(std::numbers::pi)), 1e-14);
  add("bessel_wronskian_5", std::abs(bessel_j1(5.0) * bessel_y0(5.0) - bessel_j0(5.0) * bessel_y1(5.0) - 2.0 / (5.0 * std::numbers::pi)), 1e-13);
  {
    const auto st = build_state({3, 0, 700, true});
    const auto res = interior_residual(st, 1.0, 4096);
    add("k3_interior_residual", res.relative, 1e-10);
    const auto v = st.to_fock(4096);
    const auto g = apply_gk(3, v);
    add("k3_gk_phase", max_abs_diff(g, v), 0.0);
  }
  {
    const auto vac = FockVector::basis(96, 0);
    EvolveOptions eo;
    eo.tol = 1e-12;
    const auto ev = evolve_u(1, 0.8, vac, eo);
    double dev = 0.0;
    for (std::size_t n = 0; n < 48; ++n) dev = std::max(dev, std::abs(ev.state[n] - coherent_amplitude(0.8, n)));
    add("k1_coherent", dev, 1e-8);
    const auto back = evolve_u(1, -0.8, ev.state, eo);
    add("k1_round_trip", l2_diff(back.state, vac), 1e-9);
  }
  bool all = true;
  for (const auto& e : rep["checks"]) all = all && e["pass"].get<bool>();
  rep["all_pass"] = all;
  return rep;
}

// ---------------------------------------------------------------------------
// argument parsing and dispatch
// ---------------------------------------------------------------------------

inline int dispatch(const RunConfig& c, std::ostream& out) {
  validate(c);
  switch (c.subcommand) {
    case Subcommand::state: cmd_state(c, out); break;
    case Subcommand::verify: cmd_verify(c, out); break;
    case Subcommand::moments: cmd_moments(c, out); break;
    case Subcommand::momentum: cmd_momentum(c, out); break;
    case Subcommand::figures: cmd_figures(c, out); break;
    case Subcommand::selftest: {
      const auto rep = selftest_report();
      with_output(c.output_path, out, [&](std::ostream& os) { os << rep.dump(2) << '\n'; });
      return rep["all_pass"].get<bool>() ? kExitOk : kExitCheckFailed;
    }
  }
  return kExitOk;
}

/// Parse argv, run the chosen subcommand, and return the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Invariant states of the generalized squeezing operator exp(z a+^k - z* a^k)", "gsq"};
  app.require_subcommand(1);
  RunConfig c;
  std::string format = "csv";
  const std::map<std::string, Format> formats{{"csv", Format::csv}, {"json", Format::json}};

  auto* state = app.add_subcommand("state", "Write the Fock components of one invariant state");
  state->add_option("--k", c.k, "Order k of the squeezing operator")->capture_default_str();
  state->add_option("--alpha", c.alpha, "Degeneracy index, 0 <= alpha < k")->capture_default_str();
  state->add_option("--m-max", c.m_max, "Largest m; components sit at n = alpha + 2mk")->capture_default_str();
  state->add_flag("--unnormalized", c.unnormalized, "Skip normalization (allows k = 1, 2)");
  state->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  state->add_option("-o,--output", c.output_path, "Output file, - for stdout")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Residual, evolution round trip and G_k checks as a JSON report");
  verify->add_option("--k", c.k, "Order k")->capture_default_str();
  verify->add_option("--alpha", c.alpha, "Degeneracy index")->capture_default_str();
  verify->add_option("--dim", c.dim, "Truncated basis size")->capture_default_str();
  verify->add_option("--tau", c.tau, "Real squeezing parameter z = tau")->capture_default_str();
  verify->add_option("--r", c.r, "Scale r of H_k in the residual")->capture_default_str();
  verify->add_option("--tol", c.tol, "Evolution tolerance")->capture_default_str();
  verify->add_option("-o,--output", c.output_path, "Output file, - for stdout")->capture_default_str();

  auto* moments = app.add_subcommand("moments", "Classify <n^j>, <x>, <p> partial sums as convergent or divergent");
  moments->add_option("--k-min", c.k_min, "Smallest k")->capture_default_str();
  moments->add_option("--k-max", c.k_max, "Largest k")->capture_default_str();
  moments->add_option("--j-max", c.j_max, "Largest moment power")->capture_default_str();
  moments->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  moments->add_option("-o,--output", c.output_path, "Output file, - for stdout")->capture_default_str();

  auto* momentum = app.add_subcommand("momentum", "Momentum-space k = 3 functions on a grid, or the overlap audit");
  momentum->add_option("--p-min", c.p_min, "Grid start")->capture_default_str();
  momentum->add_option("--p-max", c.p_max, "Grid end")->capture_default_str();
  momentum->add_option("--p-steps", c.p_steps, "Grid points")->capture_default_str();
  momentum->add_option("--m-terms", c.m_terms, "Fock terms per synthesized value")->capture_default_str();
  momentum->add_flag("--synthesize", c.synthesize, "Add psi columns synthesized from Fock components");
  momentum->add_flag("--overlaps", c.overlaps, "Write closed-form, quadrature and fitted coefficients as JSON");
  momentum->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  momentum->add_option("-o,--output", c.output_path, "Output file, - for stdout")->capture_default_str();

  auto* figures = app.add_subcommand("figures", "Write fig1.csv, fig2.csv, fig3.csv");
  figures->add_option("--p-min", c.p_min, "Grid start")->capture_default_str();
  figures->add_option("--p-max", c.p_max, "Grid end")->capture_default_str();
  figures->add_option("--p-steps", c.p_steps, "Grid points")->capture_default_str();
  figures->add_option("--m-terms", c.m_terms, "Fock terms per synthesized value")->capture_default_str();
  figures->add_option("--fig1-n-max", c.fig1_n_max, "Largest n in fig1")->capture_default_str();
  figures->add_option("-o,--output", c.output_path, "Output directory")->capture_default_str();

  auto* selftest = app.add_subcommand("selftest", "Quick internal consistency checks");
  selftest->add_option("-o,--output", c.output_path, "Output file, - for stdout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // subcommand-level --help arrives as CallForHelp from the subcommand
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      for (auto* sub : app.get_subcommands()) out << sub->help();
      if (app.get_subcommands().empty()) out << app.help();
      return kExitOk;
    }
    err << "gsq: " << e.what() << '\n';
    return kExitValidation;
  }

  if (state->parsed()) c.subcommand = Subcommand::state;
  if (verify->parsed()) c.subcommand = Subcommand::verify;
  if (moments->parsed()) c.subcommand = Subcommand::moments;
  if (momentum->parsed()) c.subcommand = Subcommand::momentum;
  if (figures->parsed()) c.subcommand = Subcommand::figures;
  if (selftest->parsed()) c.subcommand = Subcommand::selftest;
  c.format = formats.at(format);

  try {
    return dispatch(c, out);
  } catch (const gsq::domain_error& e) {
    err << "gsq: " << e.what() << '\n';
    return kExitValidation;
  } catch (const convergence_error& e) {
    err << "gsq: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const consistency_error& e) {
    err << "gsq: " << e.what() << '\n';
    return kExitConvergence;
  }
}

}  // namespace gsq::cli
