#pragma once

#include <complex>

namespace sgcm {

using cplx = std::complex<double>;

// psi(x) = exp(-alpha u^2 + i momentum u + gamma), u = x - center, Re(alpha) > 0.
//
// Stored relative to the density centre so that packets far from the origin
// keep full precision. Closed under free evolution and evolution in a linear
// potential, which is all the Stern-Gerlach dynamics needs. Quantities are in
// the scaled units of UnitSystem (sigma = tau2 = hbar = m = 1).
struct GaussianAmplitude {
  cplx alpha;
  double center = 0.0;
  double momentum = 0.0;
  cplx gamma;

  // Normalized width-1 Gaussian exp(-x^2/2) / pi^(1/4).
  static GaussianAmplitude initial();

  cplx operator()(double x) const { return std::exp(log_value(x)); }
  cplx log_value(double x) const {
    const double u = x - center;
    return -alpha * u * u + cplx(0.0, momentum * u) + gamma;
  }

  double norm_squared() const;
  double density_center() const { return center; }
  double density_variance() const { return 0.25 / alpha.real(); }
  double mean_momentum() const { return momentum; }

  // Free evolution for time tau.
  GaussianAmplitude free_evolved(double tau) const;

  // Evolution for time t under V(x) = force * x, through the falling frame:
  // psi(x, t) = exp(-i force t x - i force^2 t^3 / 6) psi_free(x + force t^2 / 2, t).
  GaussianAmplitude evolved_in_linear_potential(double force, double t) const;

  // psi(x + shift).
  GaussianAmplitude shifted(double shift) const;
};

// <a|b> = integral of conj(a) b.
cplx inner_product(const GaussianAmplitude& a, const GaussianAmplitude& b);

}  // namespace sgcm
