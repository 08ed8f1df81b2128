#include <doctest.h>

#include <cmath>
#include <random>

#include "sgcm/core.hpp"

using namespace sgcm;

TEST_CASE("derived scales at the silver-atom parameters") {
  const auto s = derive_scales(default_params());
  // Plain arithmetic: a = F/m, tau1 = sqrt(2 sigma / a), tau2 = m sigma^2 / hbar.
  CHECK(s.a == doctest::Approx(5178.770949720671).epsilon(1e-12));
  CHECK(s.tau1 == doctest::Approx(1.965176880741218e-05).epsilon(1e-12));
  CHECK(s.tau2 == doctest::Approx(1.6973713607216566e-03).epsilon(1e-12));
  CHECK(s.tau3 == doctest::Approx(2.275235851132686e-07).epsilon(1e-12));
  // Orders of magnitude quoted for the experiment: 1e-5 s, 1e-3 s, 1e-7 s.
  CHECK(std::round(std::log10(s.tau1)) == -5);
  CHECK(std::round(std::log10(s.tau2)) == -3);
  CHECK(std::round(std::log10(s.tau3)) == -7);
  CHECK(std::abs(s.tau3 * s.tau2 / (s.tau1 * s.tau1) - 1.0) < 1e-12);
}

TEST_CASE("zero force has no separation timescale") {
  auto p = default_params();
  p.force = 0.0;
  CHECK_THROWS_AS(derive_scales(p), NoSeparationError);
  CHECK(spreading_time(p) > 0.0);
}

TEST_CASE("negative force gives the same timescales") {
  auto p = default_params();
  const auto pos = derive_scales(p);
  p.force = -p.force;
  const auto neg = derive_scales(p);
  CHECK(neg.a == -pos.a);
  CHECK(neg.tau1 == pos.tau1);
  CHECK(neg.tau3 == pos.tau3);
}

TEST_CASE("parameter validation") {
  auto p = default_params();
  SUBCASE("unnormalized spin amplitudes") {
    p.c_plus = 0.8;
    p.c_minus = 0.8;
    CHECK_THROWS_AS(validate(p), ParameterError);
  }
  SUBCASE("nonpositive mass") {
    p.mass = 0.0;
    CHECK_THROWS_AS(validate(p), ParameterError);
  }
  SUBCASE("nonpositive width") {
    p.sigma = -1e-6;
    CHECK_THROWS_AS(validate(p), ParameterError);
  }
  SUBCASE("complex normalized amplitudes are fine") {
    p.c_plus = std::polar(std::sqrt(0.3), 0.4);
    p.c_minus = std::polar(std::sqrt(0.7), -1.1);
    CHECK_NOTHROW(validate(p));
  }
}

TEST_CASE("force derived from the field gradient") {
  const double g = 2.0;
  const double mu_B = 9.2740100783e-24;
  const double B0 = -100.0;
  const auto p = make_params(1.79e-25, std::nullopt, 1e-6, std::sqrt(0.5), std::sqrt(0.5), g,
                             mu_B, B0);
  CHECK(p.force == doctest::Approx(-g * mu_B * B0 / 2.0).epsilon(1e-12));
  CHECK(p.force == doctest::Approx(9.274e-22).epsilon(1e-4));
  CHECK_THROWS_AS(make_params(1.79e-25, 1.0, 1e-6, std::sqrt(0.5), std::sqrt(0.5), g, mu_B, B0),
                  ParameterError);
}

TEST_CASE("scale covariance under sigma -> s sigma") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logs(-3.0, 3.0);
  const auto base = derive_scales(default_params());
  for (int i = 0; i < 100; ++i) {
    const double s = std::exp(logs(rng));
    auto p = default_params();
    p.sigma *= s;
    const auto d = derive_scales(p);
    CHECK(d.tau2 / base.tau2 == doctest::Approx(s * s).epsilon(1e-12));
    CHECK(d.tau1 / base.tau1 == doctest::Approx(std::sqrt(s)).epsilon(1e-12));
  }
}

TEST_CASE("unit system round trip") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> logs(-40.0, 10.0);
  const UnitSystem u(default_params());
  CHECK(u.length_unit() == 1e-6);
  CHECK(u.momentum_unit() == doctest::Approx(kHbar / 1e-6).epsilon(1e-15));
  for (auto q : {Quantity::length, Quantity::time, Quantity::momentum, Quantity::action,
                 Quantity::mass, Quantity::force, Quantity::energy, Quantity::velocity}) {
    for (int i = 0; i < 50; ++i) {
      const double v = std::pow(10.0, logs(rng));
      CHECK(std::abs(u.to_si(q, u.to_scaled(q, v)) / v - 1.0) < 1e-14);
    }
  }
  // The scaled mass is one, so scaled force equals scaled acceleration.
  const auto p = default_params();
  CHECK(u.to_scaled(Quantity::mass, p.mass) == doctest::Approx(1.0).epsilon(1e-14));
  const double a_scaled = derive_scales(p).a * u.time_unit() * u.time_unit() / u.length_unit();
  CHECK(to_scaled(p).force == doctest::Approx(a_scaled).epsilon(1e-13));
}

TEST_CASE("paraxial distance-time map") {
  const auto p = default_params();
  CHECK(z_to_time(0.0, 1.0, p) == 0.0);
  const double k_unit = p.mass / p.hbar;  // k hbar / m = 1 m/s
  CHECK(z_to_time(1.0, k_unit, p) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(beam_energy(k_unit, p) == doctest::Approx(0.5 * p.mass).epsilon(1e-14));
  CHECK_THROWS_AS(z_to_time(1.0, 0.0, p), DomainError);
  CHECK_THROWS_AS(z_to_time(1.0, -3.0, p), DomainError);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uz(0.0, 2.0);
  std::uniform_real_distribution<double> uk(1e8, 1e12);
  for (int i = 0; i < 200; ++i) {
    const double z = uz(rng);
    const double k = uk(rng);
    const double back = time_to_z(z_to_time(z, k, p), k, p);
    CHECK(std::abs(back - z) <= 1e-14 * z);
  }
}

TEST_CASE("config parsing") {
  const std::string text =
      "# silver\n"
      "mass_kg = 1.79e-25\n"
      "force_N = -9.27e-22   # pointing down\n"
      "sigma_m=2e-6\n"
      "c_plus_re = 1\n"
      "c_minus_re = 0\n";
  const auto p = params_from_config(parse_key_values(text));
  CHECK(p.force == -9.27e-22);
  CHECK(p.sigma == 2e-6);
  CHECK(p.c_plus == cplx(1.0, 0.0));
  CHECK(p.c_minus == cplx(0.0, 0.0));

  SUBCASE("field-derived force") {
    const auto q = params_from_config(parse_key_values("g = 2\nmu_B = 9.274e-24\nB0 = -100\n"));
    CHECK(q.force == doctest::Approx(9.274e-22).epsilon(1e-14));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_key_values("mass_kg 3\n"), ConfigError);
    CHECK_THROWS_AS(params_from_config(parse_key_values("mass_kg = abc\n")), ConfigError);
    CHECK_THROWS_AS(params_from_config(parse_key_values("c_plus_re = 0.9\n")), ConfigError);
    CHECK_THROWS_AS(load_key_values("/nonexistent/params.cfg"), ConfigError);
  }
  SUBCASE("serialization round trip") {
    auto q = default_params();
    q.c_plus = std::polar(std::sqrt(0.3), 0.4);
    q.c_minus = std::polar(std::sqrt(0.7), -1.1);
    const auto kv = params_to_config(q);
    const auto r = params_from_config(kv);
    CHECK(r.mass == q.mass);
    CHECK(r.force == q.force);
    CHECK(r.c_plus == q.c_plus);
    CHECK(r.c_minus == q.c_minus);
  }
}
