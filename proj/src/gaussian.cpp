#include "sgcm/gaussian.hpp"

#include <cmath>

namespace sgcm {

namespace {
constexpr double kPiLocal = 3.14159265358979323846;
}

GaussianAmplitude GaussianAmplitude::initial() {
  return {0.5, 0.0, 0.0, -0.25 * std::log(kPiLocal)};
}

double GaussianAmplitude::norm_squared() const {
  return std::sqrt(kPiLocal / (2.0 * alpha.real())) * std::exp(2.0 * gamma.real());
}

GaussianAmplitude GaussianAmplitude::free_evolved(double tau) const {
  // With v = u - k tau the exponent (-alpha u^2 + i k u - i k^2 tau / 2) / d
  // equals -alpha v^2 / d + i k v + i k^2 tau / 2.
  const cplx i{0.0, 1.0};
  const cplx d = 1.0 + 2.0 * i * alpha * tau;
  return {alpha / d, center + momentum * tau, momentum,
          gamma + i * (0.5 * momentum * momentum * tau) - 0.5 * std::log(d)};
}

GaussianAmplitude GaussianAmplitude::shifted(double shift) const {
  GaussianAmplitude g = *this;
  g.center -= shift;
  return g;
}

GaussianAmplitude GaussianAmplitude::evolved_in_linear_potential(double force, double t) const {
  const cplx i{0.0, 1.0};
  GaussianAmplitude g = free_evolved(t).shifted(0.5 * force * t * t);
  // exp(-i f t x) with x = u + center.
  g.momentum -= force * t;
  g.gamma -= i * (force * t * g.center + force * force * t * t * t / 6.0);
  return g;
}

cplx inner_product(const GaussianAmplitude& a, const GaussianAmplitude& b) {
  // Expand both exponents around the midpoint of the two centres.
  const double mid = 0.5 * (a.center + b.center);
  auto coeffs = [mid](const GaussianAmplitude& g, cplx& A, cplx& B, cplx& C) {
    const double d = mid - g.center;
    const cplx ik{0.0, g.momentum};
    A = g.alpha;
    B = -2.0 * g.alpha * d + ik;
    C = -g.alpha * d * d + ik * d + g.gamma;
  };
  cplx Aa, Ba, Ca, Ab, Bb, Cb;
  coeffs(a, Aa, Ba, Ca);
  coeffs(b, Ab, Bb, Cb);
  const cplx A = std::conj(Aa) + Ab;
  const cplx B = std::conj(Ba) + Bb;
  const cplx C = std::conj(Ca) + Cb;
  return std::sqrt(kPiLocal / A) * std::exp(B * B / (4.0 * A) + C);
}

}  // namespace sgcm
