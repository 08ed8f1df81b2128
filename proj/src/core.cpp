#include "sgcm/core.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sgcm {

PhysicalParams default_params() { return PhysicalParams{}; }

double force_from_field(double g, double mu_B, double B0) { return -g * mu_B * B0 / 2.0; }

void validate(const PhysicalParams& p) {
  auto finite_positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!finite_positive(p.mass)) throw ParameterError("mass must be positive and finite");
  if (!finite_positive(p.sigma)) throw ParameterError("sigma must be positive and finite");
  if (!finite_positive(p.hbar)) throw ParameterError("hbar must be positive and finite");
  if (!std::isfinite(p.force)) throw ParameterError("force must be finite");
  const double norm = std::norm(p.c_plus) + std::norm(p.c_minus);
  if (!(std::abs(norm - 1.0) <= 1e-12)) {
    throw ParameterError("spin amplitudes not normalized: |c+|^2 + |c-|^2 = " +
                         format_double(norm));
  }
  if (p.g && p.mu_B && p.B0) {
    const double expected = force_from_field(*p.g, *p.mu_B, *p.B0);
    if (std::abs(p.force - expected) > 1e-12 * std::abs(expected)) {
      throw ParameterError("force inconsistent with -g mu_B B0 / 2");
    }
  }
}

PhysicalParams make_params(double mass, std::optional<double> force, double sigma, cplx c_plus,
                           cplx c_minus, std::optional<double> g, std::optional<double> mu_B,
                           std::optional<double> B0) {
  PhysicalParams p;
  p.mass = mass;
  p.sigma = sigma;
  p.c_plus = c_plus;
  p.c_minus = c_minus;
  p.g = g;
  p.mu_B = mu_B;
  p.B0 = B0;
  if (force) {
    p.force = *force;
  } else if (g && mu_B && B0) {
    p.force = force_from_field(*g, *mu_B, *B0);
  } else {
    throw ParameterError("force missing and (g, mu_B, B0) incomplete");
  }
  validate(p);
  return p;
}

double spreading_time(const PhysicalParams& p) { return p.mass * p.sigma * p.sigma / p.hbar; }

DerivedScales derive_scales(const PhysicalParams& p) {
  validate(p);
  if (p.force == 0.0) throw NoSeparationError();
  DerivedScales s{};
  s.a = p.force / p.mass;
  s.tau1 = std::sqrt(2.0 * p.sigma / std::abs(s.a));
  s.tau2 = spreading_time(p);
  s.tau3 = s.tau1 * s.tau1 / s.tau2;
  return s;
}

UnitSystem::UnitSystem(const PhysicalParams& p)
    : length_(p.sigma),
      time_(spreading_time(p)),
      momentum_(p.hbar / p.sigma),
      action_(p.hbar),
      mass_(p.mass) {}

double UnitSystem::unit(Quantity q) const {
  switch (q) {
    case Quantity::length: return length_;
    case Quantity::time: return time_;
    case Quantity::momentum: return momentum_;
    case Quantity::action: return action_;
    case Quantity::mass: return mass_;
    case Quantity::force: return action_ / (length_ * time_);
    case Quantity::energy: return action_ / time_;
    case Quantity::velocity: return length_ / time_;
  }
  return 1.0;
}

ScaledParams to_scaled(const PhysicalParams& p) {
  const UnitSystem u(p);
  return {u.to_scaled(Quantity::force, p.force), p.c_plus, p.c_minus};
}

double z_to_time(double z, double k, const PhysicalParams& p) {
  if (!(k > 0.0)) throw DomainError("wavenumber must be positive");
  if (!(z >= 0.0)) throw DomainError("distance must be nonnegative");
  return z * p.mass / (k * p.hbar);
}

double time_to_z(double t, double k, const PhysicalParams& p) {
  if (!(k > 0.0)) throw DomainError("wavenumber must be positive");
  if (!(t >= 0.0)) throw DomainError("time must be nonnegative");
  return t * k * p.hbar / p.mass;
}

double beam_energy(double k, const PhysicalParams& p) {
  if (!(k > 0.0)) throw DomainError("wavenumber must be positive");
  return k * k * p.hbar * p.hbar / (2.0 * p.mass);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const KeyValues& kv, const std::string& key) {
  const std::string& text = kv.at(key);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("key '" + key + "': trailing text in '" + text + "'");
  return v;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

PhysicalParams params_from_config(const KeyValues& kv) {
  const PhysicalParams d = default_params();
  auto get = [&](const char* key, double fallback) {
    return kv.count(key) ? to_double(kv, key) : fallback;
  };
  auto opt = [&](const char* key) -> std::optional<double> {
    if (!kv.count(key)) return std::nullopt;
    return to_double(kv, key);
  };
  const double mass = get("mass_kg", d.mass);
  const double sigma = get("sigma_m", d.sigma);
  const cplx cp{get("c_plus_re", d.c_plus.real()), get("c_plus_im", d.c_plus.imag())};
  const cplx cm{get("c_minus_re", d.c_minus.real()), get("c_minus_im", d.c_minus.imag())};
  const auto g = opt("g");
  const auto mu = opt("mu_B");
  const auto b0 = opt("B0");
  std::optional<double> force = opt("force_N");
  if (!force && !(g && mu && b0)) force = d.force;
  try {
    return make_params(mass, force, sigma, cp, cm, g, mu, b0);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("invalid parameters: ") + e.what());
  }
}

KeyValues params_to_config(const PhysicalParams& p) {
  KeyValues kv;
  kv["mass_kg"] = format_double(p.mass);
  kv["force_N"] = format_double(p.force);
  kv["sigma_m"] = format_double(p.sigma);
  kv["c_plus_re"] = format_double(p.c_plus.real());
  kv["c_plus_im"] = format_double(p.c_plus.imag());
  kv["c_minus_re"] = format_double(p.c_minus.real());
  kv["c_minus_im"] = format_double(p.c_minus.imag());
  if (p.g) kv["g"] = format_double(*p.g);
  if (p.mu_B) kv["mu_B"] = format_double(*p.mu_B);
  if (p.B0) kv["B0"] = format_double(*p.B0);
  return kv;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace sgcm
