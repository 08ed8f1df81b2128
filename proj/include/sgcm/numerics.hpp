#pragma once

// Special functions and quadrature shared by the physics modules.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace sgcm {

using cplx = std::complex<double>;

// Faddeeva function w(z) = exp(-z^2) erfc(-iz), about 14 significant digits.
// Rational approximation of Weideman (SIAM J. Numer. Anal. 31, 1994) with 40 terms;
// the lower half plane uses w(z) = 2 exp(-z^2) - w(-z).
cplx faddeeva_w(cplx z);

// Integral of exp(-alpha u^2 + beta u + c) over [u1, u2], alpha > 0, beta and c complex.
// Written in terms of w() evaluated where |w| <= 1, so huge oscillation or far
// tails neither overflow nor cancel catastrophically.
cplx gaussian_window_integral(double alpha, cplx beta, cplx c, double u1, double u2);

// Integral of exp(-alpha u^2 + beta u + c) over the whole line.
cplx gaussian_full_integral(double alpha, cplx beta, cplx c);

// Composite 20-point Gauss-Legendre rule on panels no wider than max_panel.
template <class F>
auto integrate_panels(F&& f, double a, double b, double max_panel) {
  using R = decltype(f(a));
  R sum{};
  if (!(b > a)) return sum;
  using rule = boost::math::quadrature::gauss<double, 20>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  const auto panels = static_cast<long>(std::max(1.0, std::ceil((b - a) / max_panel)));
  const double h = (b - a) / static_cast<double>(panels);
  for (long k = 0; k < panels; ++k) {
    const double mid = a + (static_cast<double>(k) + 0.5) * h;
    const double half = 0.5 * h;
    // Even-order rules tabulate the positive abscissae only.
    R panel{};
    for (std::size_t i = 0; i < x.size(); ++i) {
      panel += w[i] * (f(mid + half * x[i]) + f(mid - half * x[i]));
    }
    sum += half * panel;
  }
  return sum;
}

// Adaptive Gauss-Kronrod (61-point) integral of a real function.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-12) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, rel_tol);
}

// Same for a complex integrand, real and imaginary parts integrated separately.
template <class F>
cplx integrate_adaptive_complex(F&& f, double a, double b, double rel_tol = 1e-12) {
  const double re = integrate_adaptive([&](double x) { return f(x).real(); }, a, b, rel_tol);
  const double im = integrate_adaptive([&](double x) { return f(x).imag(); }, a, b, rel_tol);
  return {re, im};
}

// -p log p with the 0 log 0 = 0 convention.
inline double entropy_term(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

}  // namespace sgcm
