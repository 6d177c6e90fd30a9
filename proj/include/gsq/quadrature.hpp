#pragma once

// Quadrature front end. Adaptive Gauss–Kronrod and tanh-sinh come from
// Boost.Math; composite fixed-order Gauss–Legendre is used where a
// deterministic node set matters more than adaptivity (oscillatory double
// integrals).

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "gsq/errors.hpp"

namespace gsq::quad {

struct QuadResult {
  double value = 0.0;
  double est_error = 0.0;
};

/// Adaptive 21-point Gauss–Kronrod on a finite interval with a smooth integrand.
template <class F>
QuadResult adaptive_gk(F&& f, double a, double b, double rel_tol = 1e-13, unsigned max_depth = 30) {
  QuadResult r;
  double l1 = 0.0;
  r.value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, max_depth, rel_tol, &r.est_error,
                                                                         &l1);
  if (!std::isfinite(r.value)) throw convergence_error("adaptive_gk: non-finite integral");
  if (r.est_error > std::max(1e3 * rel_tol * l1, 1e-15))
    throw convergence_error("adaptive_gk: error estimate " + std::to_string(r.est_error) + " above tolerance");
  return r;
}

/// tanh-sinh on [a, b]; tolerates integrable endpoint singularities such as
/// logarithms or inverse square roots.
template <class F>
QuadResult endpoint_singular(F&& f, double a, double b, double rel_tol = 1e-13) {
  boost::math::quadrature::tanh_sinh<double> integrator(15);
  QuadResult r;
  double l1 = 0.0;
  r.value = integrator.integrate(f, a, b, rel_tol, &r.est_error, &l1);
  if (!std::isfinite(r.value)) throw convergence_error("endpoint_singular: non-finite integral");
  if (r.est_error > std::max(1e3 * rel_tol * l1, 1e-15))
    throw convergence_error("endpoint_singular: error estimate " + std::to_string(r.est_error) + " above tolerance");
  return r;
}

/// Nodes and weights of a composite Gauss–Legendre rule.
struct NodeSet {
  std::vector<double> x;
  std::vector<double> w;
};

/// `panels` equal panels on [a, b], 20 points each.
inline NodeSet composite_gauss_legendre(double a, double b, std::size_t panels) {
  using rule = boost::math::quadrature::gauss<double, 20>;
  const auto& abs = rule::abscissa();
  const auto& wts = rule::weights();
  NodeSet ns;
  ns.x.reserve(panels * 20);
  ns.w.reserve(panels * 20);
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * width;
    const double half = 0.5 * width;
    // Boost stores the non-negative half of a symmetric rule
    for (std::size_t i = 0; i < abs.size(); ++i) {
      if (abs[i] == 0.0) {
        ns.x.push_back(mid);
        ns.w.push_back(half * wts[i]);
        continue;
      }
      ns.x.push_back(mid - half * abs[i]);
      ns.w.push_back(half * wts[i]);
      ns.x.push_back(mid + half * abs[i]);
      ns.w.push_back(half * wts[i]);
    }
  }
  return ns;
}

template <class F>
double integrate_nodes(const NodeSet& ns, F&& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ns.x.size(); ++i) sum += ns.w[i] * f(ns.x[i]);
  return sum;
}

}  // namespace gsq::quad
