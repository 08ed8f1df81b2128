#pragma once

// Exact evolution of the two spin branches.
//
// Sign convention: branch + is the sigma_y = +1 component, which feels the
// potential +F x. For F > 0 its packet is pushed toward negative x, with centre
// -a t^2 / 2 (a = F/m), and its mean momentum is -F t. Branch - mirrors it.
// Every other module inherits this labelling.

#include <optional>

#include "sgcm/core.hpp"
#include "sgcm/gaussian.hpp"

namespace sgcm {

enum class Branch { plus, minus };

enum class KernelBranch { plus_plus, minus_minus, plus_minus, minus_plus };

// component: bare phi_a(x), normalized to one on its own.
// full:      c_a phi_a(x), the amplitude inside the full spinor.
enum class Weighting { component, full };

inline double branch_sign(Branch b) { return b == Branch::plus ? 1.0 : -1.0; }

class SpinorWavepacket {
 public:
  SpinorWavepacket(PhysicalParams params, double field_time, std::optional<double> total_time,
                   GaussianAmplitude plus, GaussianAmplitude minus);

  const PhysicalParams& params() const { return params_; }
  const UnitSystem& units() const { return units_; }

  // Time spent inside the field (s).
  double field_time() const { return field_time_; }
  // Elapsed time since entering the field (s); equals field_time() in-field.
  double total_time() const { return total_time_.value_or(field_time_); }
  // True for the in-field family, whose Wigner matrix has the closed form.
  bool in_field() const { return !total_time_.has_value(); }

  cplx weight(Branch b) const { return b == Branch::plus ? params_.c_plus : params_.c_minus; }

  // Scaled-unit closed form of the bare component.
  const GaussianAmplitude& component(Branch b) const {
    return b == Branch::plus ? plus_ : minus_;
  }

  // SI amplitude (units m^-1/2) at position x (m).
  cplx amplitude(Branch b, double x, Weighting w = Weighting::full) const;
  // |amplitude|^2 (units 1/m).
  double density(Branch b, double x, Weighting w = Weighting::full) const;

  // Mean and variance of |phi_b|^2 in SI.
  double center(Branch b) const;
  double variance(Branch b) const;

 private:
  PhysicalParams params_;
  UnitSystem units_;
  double field_time_;
  std::optional<double> total_time_;
  GaussianAmplitude plus_;
  GaussianAmplitude minus_;
};

// State after time t (s) inside the field, from the normalized width-sigma Gaussian.
SpinorWavepacket evolve_in_field(const PhysicalParams& params, double t);

// Field for t1 (s), then free flight until total time t (s). The free-flight
// phases come from applying the free propagator to the exit state.
SpinorWavepacket evolve_free_after_field(const PhysicalParams& params, double t1, double t);

// Same as SpinorWavepacket::amplitude.
cplx state_amplitude(const SpinorWavepacket& state, Branch b, double x,
                     Weighting w = Weighting::full);

// Propagator K^{ab}(x, x_i; t) in SI (units 1/m). Spin-flip entries are exactly zero.
// Throws DomainError for t <= 0.
cplx kernel(KernelBranch branch, double x, double x_i, double t, const PhysicalParams& params);

// Free-particle propagator sqrt(m / (2 pi i hbar t)) exp(i m (x - x_i)^2 / (2 hbar t)).
cplx free_kernel(double x, double x_i, double t, const PhysicalParams& params);

// Change to the frame falling with one branch. With g = -s F / m the branch
// acceleration (s = +1 for branch +), the comoving coordinate is
// xi = x - g T^2 / 2 and the phase f = (m g T / hbar)(xi + g T^2 / 3).
class FallingFrameTransform {
 public:
  FallingFrameTransform(const PhysicalParams& params, Branch branch);

  double acceleration() const { return accel_; }
  double comoving(double x, double T) const;
  double phase(double x, double T) const;

  // exp(i f) times a free-particle solution evaluated at the comoving point.
  template <class FreeSolution>
  cplx transform(FreeSolution&& free_solution, double x, double T) const {
    return std::polar(1.0, phase(x, T)) * free_solution(comoving(x, T), T);
  }

  // Kernel of the accelerated problem built from the free kernel.
  cplx kernel(double x, double x_i, double T) const;

 private:
  PhysicalParams params_;
  double accel_;
};

}  // namespace sgcm
