#include <doctest.h>

#include <cmath>
#include <random>

#include "sgcm/dynamics.hpp"
#include "sgcm/numerics.hpp"

using namespace sgcm;

namespace {

// Closed form for the + component written out term by term in SI, with the
// acceleration taken as a = -F/m.
cplx expanded_phi(double x, double t, const PhysicalParams& p, double sign) {
  const cplx i{0.0, 1.0};
  const double m = p.mass, s = p.sigma, hb = p.hbar;
  const double a = -p.force / m;
  const cplx d = m * s * s + i * hb * t;
  const cplx pre = std::sqrt(m * s / (d * std::sqrt(kPi)));
  const cplx num = 12.0 * x * x + (a * a / hb) * (4.0 * i * m * s * s - hb * t) * t * t * t +
                   sign * (12.0 * a * x * t / hb) * (-2.0 * i * m * s * s + hb * t);
  return pre * std::exp(-m * num / (24.0 * d));
}

// Free-flight density written out in SI (a = -F/m). The exponent carries the
// sigma^2 that makes it dimensionless.
double expanded_free_density(double x, double t1, double t, const PhysicalParams& p,
                             double sign) {
  const double m = p.mass, s = p.sigma, hb = p.hbar;
  const double a = -p.force / m;
  const double den = m * m * s * s * s * s + hb * hb * t * t;
  const double c = 0.5 * a * t1 * t1 + a * t1 * (t - t1);
  const double u = x - sign * c;
  return std::sqrt(m * m * s * s / (den * kPi)) * std::exp(-m * m * s * s * u * u / den);
}

double norm_by_quadrature(const SpinorWavepacket& st, Branch b) {
  const double c = st.center(b);
  const double w = std::sqrt(st.variance(b));
  return integrate_adaptive([&](double x) { return st.density(b, x, Weighting::component); },
                            c - 12.0 * w, c + 12.0 * w);
}

}  // namespace

TEST_CASE("spin-flip propagators vanish") {
  const auto p = default_params();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(-1e-5, 1e-5);
  for (int i = 0; i < 20; ++i) {
    const double x = ux(rng), xi = ux(rng);
    CHECK(kernel(KernelBranch::plus_minus, x, xi, 1e-5, p) == cplx(0.0, 0.0));
    CHECK(kernel(KernelBranch::minus_plus, x, xi, 1e-5, p) == cplx(0.0, 0.0));
  }
}

TEST_CASE("propagator domain") {
  const auto p = default_params();
  CHECK_THROWS_AS(kernel(KernelBranch::plus_plus, 0.0, 0.0, 0.0, p), DomainError);
  CHECK_THROWS_AS(kernel(KernelBranch::minus_minus, 0.0, 0.0, -1e-6, p), DomainError);
  CHECK_THROWS_AS(free_kernel(0.0, 0.0, 0.0, p), DomainError);
}

TEST_CASE("zero force reduces to the free propagator") {
  auto p = default_params();
  p.force = 0.0;
  for (double x : {-2e-6, 0.0, 3e-6}) {
    const cplx k = kernel(KernelBranch::plus_plus, x, 1e-6, 2e-5, p);
    const cplx k0 = free_kernel(x, 1e-6, 2e-5, p);
    CHECK(std::abs(k - k0) <= 1e-12 * std::abs(k0));
  }
}

TEST_CASE("propagator modulus") {
  const auto p = default_params();
  const double t = 1e-5;
  const double expected = std::sqrt(p.mass / (2.0 * kPi * p.hbar * t));
  for (double x : {-5e-6, 0.0, 4e-6}) {
    for (double xi : {-1e-6, 2e-6}) {
      CHECK(std::abs(kernel(KernelBranch::plus_plus, x, xi, t, p)) ==
            doctest::Approx(expected).epsilon(1e-13));
    }
  }
  // A normalized Gaussian of width eps approximates a delta at x_i = 0; its
  // closed-form evolution must approach |K| as eps shrinks.
  const UnitSystem u(p);
  const double ts = u.to_scaled(Quantity::time, t);
  const double f = to_scaled(p).force;
  const double eps = 1e-6;
  const GaussianAmplitude narrow{1.0 / (2.0 * eps * eps), 0.0, 0.0,
                               -std::log(std::sqrt(2.0 * kPi) * eps)};
  const auto evolved = narrow.evolved_in_linear_potential(f, ts);
  for (double x : {-0.3, 0.0, 0.5}) {
    const double approx = std::abs(evolved(x)) / u.length_unit();
    const double exact = std::abs(kernel(KernelBranch::plus_plus, x * 1e-6, 0.0, t, p));
    CHECK(approx == doctest::Approx(exact).epsilon(1e-7));
  }
}

TEST_CASE("falling-frame transform rebuilds the accelerated propagator") {
  const auto p = default_params();
  for (auto b : {Branch::plus, Branch::minus}) {
    const FallingFrameTransform frame(p, b);
    const auto kb = b == Branch::plus ? KernelBranch::plus_plus : KernelBranch::minus_minus;
    for (double t : {3e-6, 1e-5, 4e-5}) {
      for (double x : {-3e-6, 0.0, 2e-6}) {
        const cplx direct = kernel(kb, x, 1e-6, t, p);
        const cplx built = frame.kernel(x, 1e-6, t);
        // Relative to the unwrapped phase, which runs to hundreds of radians.
        const double xi = frame.comoving(x, t) - 1e-6;
        const double unwrapped = std::abs(frame.phase(x, t)) + p.mass * xi * xi / (2.0 * p.hbar * t);
        CHECK(std::abs(std::arg(built / direct)) < 1e-12 * unwrapped);
        CHECK(std::abs(built) == doctest::Approx(std::abs(direct)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("falling-frame transform of a free packet gives the in-field state") {
  const auto p = default_params();
  const UnitSystem u(p);
  const auto free0 = GaussianAmplitude::initial();
  auto free_solution = [&](double xi, double T) {
    const double L = u.length_unit();
    return free0.free_evolved(u.to_scaled(Quantity::time, T))(xi / L) / std::sqrt(L);
  };
  for (double t : {1e-6, 2e-5, 1e-4}) {
    const auto st = evolve_in_field(p, t);
    for (auto b : {Branch::plus, Branch::minus}) {
      const FallingFrameTransform frame(p, b);
      for (double x : {-2e-6, -1e-7, 0.0, 1.5e-6}) {
        const cplx a = frame.transform(free_solution, x, t);
        const cplx e = st.amplitude(b, x, Weighting::component);
        CHECK(std::abs(a - e) <= 1e-10 * std::abs(e));
      }
    }
  }
}

TEST_CASE("closed form agrees with the expanded expression") {
  const auto p = default_params();
  for (double t : {1e-6, 22.5e-6, 6e-5}) {
    const auto st = evolve_in_field(p, t);
    for (double x : {-3e-6, -1e-6, 0.0, 0.5e-6, 2e-6}) {
      const cplx a = expanded_phi(x, t, p, 1.0);
      const cplx b = expanded_phi(x, t, p, -1.0);
      CHECK(std::abs(st.amplitude(Branch::plus, x, Weighting::component) - a) <=
            1e-9 * std::abs(a) + 1e-300);
      CHECK(std::abs(st.amplitude(Branch::minus, x, Weighting::component) - b) <=
            1e-9 * std::abs(b) + 1e-300);
    }
  }
}

TEST_CASE("folding the initial packet with the propagator") {
  // Scaled-down force so the kernel's oscillation is resolvable by panels.
  auto p = default_params();
  p.force = 2e-25;
  const double t = 3e-4;
  const auto st = evolve_in_field(p, t);
  auto phi0 = [&](double xi) { return std::exp(-xi * xi / (2e-12)) / std::sqrt(std::sqrt(kPi) * 1e-6); };
  for (auto [kb, b] : {std::pair{KernelBranch::plus_plus, Branch::plus},
                       std::pair{KernelBranch::minus_minus, Branch::minus}}) {
    for (double x : {-2e-6, 0.0, 1e-6}) {
      const cplx folded = integrate_panels(
          [&](double xi) { return kernel(kb, x, xi, t, p) * phi0(xi); }, -1.2e-5, 1.2e-5, 2e-9);
      const cplx closed = st.amplitude(b, x, Weighting::component);
      CHECK(std::abs(folded - closed) <= 1e-8 * std::abs(closed));
    }
  }
}

TEST_CASE("initial condition") {
  const auto p = default_params();
  const auto st = evolve_in_field(p, 0.0);
  for (double x : {-2e-6, 0.0, 1e-6}) {
    const double g = std::exp(-x * x / (p.sigma * p.sigma)) / (std::sqrt(kPi) * p.sigma);
    CHECK(st.density(Branch::plus, x, Weighting::component) == doctest::Approx(g).epsilon(1e-14));
    CHECK(st.density(Branch::minus, x, Weighting::component) == doctest::Approx(g).epsilon(1e-14));
  }
  CHECK_THROWS_AS(evolve_in_field(p, -1e-9), DomainError);
}

TEST_CASE("packet centres and separation") {
  const auto p = default_params();
  const double t = 22.5e-6;
  const auto st = evolve_in_field(p, t);
  const double half = 0.5 * (p.force / p.mass) * t * t;
  CHECK(half == doctest::Approx(1.3109e-6).epsilon(1e-4));
  CHECK(std::abs(st.center(Branch::plus) + half) < 1e-9 * p.sigma);
  CHECK(std::abs(st.center(Branch::minus) - half) < 1e-9 * p.sigma);
  // Peak of the density at the centre.
  const double c = st.center(Branch::plus);
  CHECK(st.density(Branch::plus, c, Weighting::component) >
        st.density(Branch::plus, c + 1e-8, Weighting::component));
  CHECK(st.density(Branch::plus, c, Weighting::component) >
        st.density(Branch::plus, c - 1e-8, Weighting::component));
}

TEST_CASE("normalization and spreading for all times") {
  const auto p = default_params();
  const double tau2 = spreading_time(p);
  for (double t : {0.0, 1e-7, 1e-6, 2e-5, 1e-4, 1e-3, 5e-3}) {
    const auto st = evolve_in_field(p, t);
    for (auto b : {Branch::plus, Branch::minus}) {
      CHECK(std::abs(norm_by_quadrature(st, b) - 1.0) < 1e-9);
      const double expected = 0.5 * p.sigma * p.sigma * (1.0 + (t / tau2) * (t / tau2));
      CHECK(st.variance(b) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("weighted amplitudes") {
  auto p = default_params();
  const auto st = evolve_in_field(p, 1e-5);
  const double total = integrate_adaptive(
      [&](double x) {
        return st.density(Branch::plus, x, Weighting::full) +
               st.density(Branch::minus, x, Weighting::full);
      },
      -1.5e-5, 1.5e-5);
  CHECK(std::abs(total - 1.0) < 1e-9);
  const double x = 0.3e-6;
  CHECK(std::abs(state_amplitude(st, Branch::plus, x, Weighting::full) -
                 p.c_plus * state_amplitude(st, Branch::plus, x, Weighting::component)) < 1e-15);

  p.c_plus = 1.0;
  p.c_minus = 0.0;
  const auto pure = evolve_in_field(p, 1e-5);
  for (double y : {-1e-6, 0.0, 2e-6}) {
    CHECK(pure.amplitude(Branch::minus, y, Weighting::full) == cplx(0.0, 0.0));
    CHECK(std::abs(pure.amplitude(Branch::minus, y, Weighting::component)) > 0.0);
  }
  CHECK_THROWS_AS(st.amplitude(Branch::plus, std::nan(""), Weighting::full), DomainError);
}

TEST_CASE("parity swaps the branches") {
  const auto p = default_params();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(-5e-6, 5e-6);
  for (double t : {1e-6, 1e-5, 3e-5}) {
    const auto st = evolve_in_field(p, t);
    for (int i = 0; i < 20; ++i) {
      const double x = ux(rng);
      const cplx a = st.amplitude(Branch::plus, x, Weighting::component);
      const cplx b = st.amplitude(Branch::minus, -x, Weighting::component);
      CHECK(std::abs(a - b) <= 1e-13 * std::abs(a) + 1e-300);
    }
  }
}

TEST_CASE("free flight after the field") {
  const auto p = default_params();
  const double a = p.force / p.mass;

  SUBCASE("continuity at the exit") {
    const double t1 = 2e-5;
    const auto in = evolve_in_field(p, t1);
    const auto out = evolve_free_after_field(p, t1, t1);
    for (double x : {-2e-6, 0.0, 1e-6}) {
      for (auto b : {Branch::plus, Branch::minus}) {
        CHECK(out.density(b, x) == doctest::Approx(in.density(b, x)).epsilon(1e-9));
      }
    }
    CHECK(!out.in_field());
    CHECK(in.in_field());
  }
  SUBCASE("ballistic drift with the exit velocity") {
    const double t1 = 2e-5;
    const double c0 = evolve_free_after_field(p, t1, 3e-5).center(Branch::plus);
    const double c1 = evolve_free_after_field(p, t1, 4e-5).center(Branch::plus);
    const double c2 = evolve_free_after_field(p, t1, 5e-5).center(Branch::plus);
    CHECK((c1 - c0) / 1e-5 == doctest::Approx(-a * t1).epsilon(1e-10));
    CHECK((c2 - c1) / 1e-5 == doctest::Approx(-a * t1).epsilon(1e-10));
  }
  SUBCASE("displacement after free flight") {
    const auto st = evolve_free_after_field(p, 3e-5, 6e-5);
    CHECK(std::abs(st.center(Branch::minus)) == doctest::Approx(6.99e-6).epsilon(1e-3));
    CHECK(st.center(Branch::plus) == doctest::Approx(-st.center(Branch::minus)).epsilon(1e-12));
  }
  SUBCASE("densities match the expanded free-flight expression") {
    for (auto [t1, t] : {std::pair{1e-5, 2e-5}, std::pair{3e-5, 6e-5}, std::pair{2e-5, 1e-3}}) {
      const auto st = evolve_free_after_field(p, t1, t);
      for (double x : {-8e-6, -2e-6, 0.0, 3e-6, 7e-6}) {
        const double ref_plus = expanded_free_density(x, t1, t, p, 1.0);
        const double ref_minus = expanded_free_density(x, t1, t, p, -1.0);
        CHECK(std::abs(st.density(Branch::plus, x, Weighting::component) - ref_plus) <=
              1e-9 * ref_plus + 1e-300);
        CHECK(std::abs(st.density(Branch::minus, x, Weighting::component) - ref_minus) <=
              1e-9 * ref_minus + 1e-300);
      }
      CHECK(std::abs(norm_by_quadrature(st, Branch::plus) - 1.0) < 1e-9);
    }
  }
  SUBCASE("time ordering") {
    CHECK_THROWS_AS(evolve_free_after_field(p, 2e-5, 1e-5), DomainError);
    CHECK_THROWS_AS(evolve_free_after_field(p, -1e-6, 1e-5), DomainError);
  }
}
