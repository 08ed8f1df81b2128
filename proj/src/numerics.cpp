#include "sgcm/numerics.hpp"

#include <array>

namespace sgcm {

namespace {

constexpr int kTerms = 40;
constexpr double kSqrtPi = 1.77245385090551602730;

struct WeidemanTable {
  double L;
  std::array<double, kTerms> coeff;  // coefficient of Z^n, n = 0 .. kTerms-1
};

WeidemanTable make_table() {
  WeidemanTable t{};
  constexpr int M = 2 * kTerms;
  constexpr int M2 = 2 * M;
  t.L = std::sqrt(kTerms / std::sqrt(2.0));
  // f sampled at k = -M+1 .. M-1 with a leading zero, then shifted by M.
  std::array<double, M2> f{};
  for (int j = 1; j < M2; ++j) {
    const int k = j - M;
    const double theta = k * 3.14159265358979323846 / M;
    const double x = t.L * std::tan(0.5 * theta);
    f[j] = std::exp(-x * x) * (t.L * t.L + x * x);
  }
  std::array<double, M2> shifted{};
  for (int i = 0; i < M2; ++i) shifted[i] = f[(i + M) % M2];
  for (int n = 1; n <= kTerms; ++n) {
    double re = 0.0;
    for (int i = 0; i < M2; ++i) {
      re += shifted[i] * std::cos(2.0 * 3.14159265358979323846 * n * i / M2);
    }
    t.coeff[n - 1] = re / M2;
  }
  return t;
}

cplx w_upper(cplx z) {
  static const WeidemanTable table = make_table();
  const cplx iz{-z.imag(), z.real()};
  const cplx denom = table.L - iz;
  const cplx Z = (table.L + iz) / denom;
  cplx p = table.coeff[kTerms - 1];
  for (int n = kTerms - 2; n >= 0; --n) p = p * Z + table.coeff[n];
  return 2.0 * p / (denom * denom) + (1.0 / kSqrtPi) / denom;
}

}  // namespace

cplx faddeeva_w(cplx z) {
  if (z.imag() >= 0.0) return w_upper(z);
  return 2.0 * std::exp(-z * z) - w_upper(-z);
}

cplx gaussian_full_integral(double alpha, cplx beta, cplx c) {
  return kSqrtPi / std::sqrt(alpha) * std::exp(beta * beta / (4.0 * alpha) + c);
}

cplx gaussian_window_integral(double alpha, cplx beta, cplx c, double u1, double u2) {
  if (u2 < u1) return -gaussian_window_integral(alpha, beta, c, u2, u1);
  const double s = std::sqrt(alpha);
  const double pref = 0.5 * kSqrtPi / s;
  const cplx i{0.0, 1.0};
  // Endpoint contribution g(u) w(+-i z(u)); vanishes at infinite endpoints.
  auto term = [&](double u, double sign) -> cplx {
    if (std::isinf(u)) return 0.0;
    const cplx z = s * u - beta / (2.0 * s);
    return std::exp(-alpha * u * u + beta * u + c) * faddeeva_w(sign * i * z);
  };
  const double re1 = std::isinf(u1) ? u1 : s * u1 - (beta / (2.0 * s)).real();
  const double re2 = std::isinf(u2) ? u2 : s * u2 - (beta / (2.0 * s)).real();
  if (re1 >= 0.0) return pref * (term(u1, 1.0) - term(u2, 1.0));
  if (re2 <= 0.0) return pref * (term(u2, -1.0) - term(u1, -1.0));
  return gaussian_full_integral(alpha, beta, c) - pref * (term(u2, 1.0) + term(u1, -1.0));
}

}  // namespace sgcm
