#pragma once

// Physical parameters, derived timescales and the internal unit system.
//
// Internally every module works in scaled units where the initial packet
// width sigma, the spreading time tau2 = m sigma^2 / hbar and hbar are all 1.
// In these units the mass is 1 as well, so the scaled force equals the scaled
// acceleration. SI values only appear at the I/O boundary.

#include <complex>
#include <map>
#include <optional>
#include <string>

#include "sgcm/errors.hpp"

namespace sgcm {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055993530942;
// CODATA 2018, J s.
inline constexpr double kHbar = 1.054571817e-34;

// Inputs of the Stern-Gerlach model, SI units.
struct PhysicalParams {
  double mass = 1.79e-25;   // kg
  double force = 9.27e-22;  // N, sign allowed
  double sigma = 1e-6;      // m
  double hbar = kHbar;      // J s
  cplx c_plus{0.70710678118654752440, 0.0};
  cplx c_minus{0.70710678118654752440, 0.0};
  // Optional field description the force can be derived from.
  std::optional<double> g;
  std::optional<double> mu_B;  // J/T
  std::optional<double> B0;    // T/m
};

// The values used throughout the text: silver atoms, sigma = 1 um.
PhysicalParams default_params();

// Force on a spin-1/2 moment in a field gradient B0: F = -g mu_B B0 / 2.
double force_from_field(double g, double mu_B, double B0);

// Throws ParameterError when an invariant of PhysicalParams is violated.
void validate(const PhysicalParams& params);

// Validates and, when force is absent but (g, mu_B, B0) are present, derives it.
PhysicalParams make_params(double mass, std::optional<double> force, double sigma,
                           cplx c_plus, cplx c_minus,
                           std::optional<double> g = std::nullopt,
                           std::optional<double> mu_B = std::nullopt,
                           std::optional<double> B0 = std::nullopt);

struct DerivedScales {
  double a;     // m/s^2, F/m (signed)
  double tau1;  // s, separation time sqrt(2 sigma / |a|)
  double tau2;  // s, spreading time m sigma^2 / hbar
  double tau3;  // s, entanglement time tau1^2 / tau2
};

// Throws NoSeparationError for F = 0.
DerivedScales derive_scales(const PhysicalParams& params);

// Spreading time only; defined for every force including zero.
double spreading_time(const PhysicalParams& params);

enum class Quantity { length, time, momentum, action, mass, force, energy, velocity };

// SI <-> scaled conversion with sigma, tau2 and hbar/sigma as units.
class UnitSystem {
 public:
  explicit UnitSystem(const PhysicalParams& params);

  double length_unit() const { return length_; }
  double time_unit() const { return time_; }
  double momentum_unit() const { return momentum_; }
  double action_unit() const { return action_; }

  double unit(Quantity q) const;
  double to_scaled(Quantity q, double si) const { return si / unit(q); }
  double to_si(Quantity q, double scaled) const { return scaled * unit(q); }

 private:
  double length_;
  double time_;
  double momentum_;
  double action_;
  double mass_;
};

// The parameters a scaled computation needs.
struct ScaledParams {
  double force;  // = scaled acceleration, since the scaled mass is 1
  cplx c_plus;
  cplx c_minus;
};

ScaledParams to_scaled(const PhysicalParams& params);

// Paraxial map between longitudinal distance and effective time, t = z m / (k hbar).
double z_to_time(double z, double k, const PhysicalParams& params);
double time_to_z(double t, double k, const PhysicalParams& params);
// Beam energy E = k^2 hbar^2 / (2 m) for the wavenumber used by the map.
double beam_energy(double k, const PhysicalParams& params);

// Flat "key = value" configuration with '#' comments.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::string& path);

// Reads mass_kg, force_N, sigma_m, c_{plus,minus}_{re,im}, g, mu_B, B0.
// Unspecified keys fall back to default_params().
PhysicalParams params_from_config(const KeyValues& kv);

// Inverse of params_from_config, 17 significant digits.
KeyValues params_to_config(const PhysicalParams& params);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace sgcm
