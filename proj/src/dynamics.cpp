#include "sgcm/dynamics.hpp"

#include <cmath>

namespace sgcm {

SpinorWavepacket::SpinorWavepacket(PhysicalParams params, double field_time,
                                   std::optional<double> total_time, GaussianAmplitude plus,
                                   GaussianAmplitude minus)
    : params_(std::move(params)),
      units_(params_),
      field_time_(field_time),
      total_time_(total_time),
      plus_(plus),
      minus_(minus) {}

cplx SpinorWavepacket::amplitude(Branch b, double x, Weighting w) const {
  if (!std::isfinite(x)) throw DomainError("position must be finite");
  const double L = units_.length_unit();
  cplx v = component(b)(x / L) / std::sqrt(L);
  if (w == Weighting::full) v *= weight(b);
  return v;
}

double SpinorWavepacket::density(Branch b, double x, Weighting w) const {
  return std::norm(amplitude(b, x, w));
}

double SpinorWavepacket::center(Branch b) const {
  return component(b).density_center() * units_.length_unit();
}

double SpinorWavepacket::variance(Branch b) const {
  const double L = units_.length_unit();
  return component(b).density_variance() * L * L;
}

SpinorWavepacket evolve_in_field(const PhysicalParams& params, double t) {
  validate(params);
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("evolution time must be >= 0");
  const UnitSystem u(params);
  const double ts = u.to_scaled(Quantity::time, t);
  const double f = u.to_scaled(Quantity::force, params.force);
  const auto init = GaussianAmplitude::initial();
  return SpinorWavepacket(params, t, std::nullopt, init.evolved_in_linear_potential(f, ts),
                          init.evolved_in_linear_potential(-f, ts));
}

SpinorWavepacket evolve_free_after_field(const PhysicalParams& params, double t1, double t) {
  if (!(t1 >= 0.0) || !(t >= 0.0)) throw DomainError("times must be nonnegative");
  if (t1 > t) throw DomainError("field exit time exceeds total time");
  const SpinorWavepacket exit = evolve_in_field(params, t1);
  const double tau = exit.units().to_scaled(Quantity::time, t - t1);
  return SpinorWavepacket(params, t1, t, exit.component(Branch::plus).free_evolved(tau),
                          exit.component(Branch::minus).free_evolved(tau));
}

cplx state_amplitude(const SpinorWavepacket& state, Branch b, double x, Weighting w) {
  return state.amplitude(b, x, w);
}

namespace {

// sqrt(1 / (2 pi i t)) in scaled units.
cplx kernel_prefactor(double ts) {
  return std::polar(1.0 / std::sqrt(2.0 * kPi * ts), -0.25 * kPi);
}

}  // namespace

cplx kernel(KernelBranch branch, double x, double x_i, double t, const PhysicalParams& params) {
  if (!(t > 0.0)) throw DomainError("propagator undefined for t <= 0");
  if (branch == KernelBranch::plus_minus || branch == KernelBranch::minus_plus) return 0.0;
  const UnitSystem u(params);
  const double s = branch == KernelBranch::plus_plus ? 1.0 : -1.0;
  const double ts = u.to_scaled(Quantity::time, t);
  const double xs = u.to_scaled(Quantity::length, x);
  const double xis = u.to_scaled(Quantity::length, x_i);
  const double f = u.to_scaled(Quantity::force, params.force);
  const double dx = xs - xis;
  const double phase =
      dx * dx / (2.0 * ts) - s * f * ts * (xs + xis) / 2.0 - f * f * ts * ts * ts / 24.0;
  return kernel_prefactor(ts) * std::polar(1.0, phase) / u.length_unit();
}

cplx free_kernel(double x, double x_i, double t, const PhysicalParams& params) {
  if (!(t > 0.0)) throw DomainError("propagator undefined for t <= 0");
  const UnitSystem u(params);
  const double ts = u.to_scaled(Quantity::time, t);
  const double dx = u.to_scaled(Quantity::length, x - x_i);
  return kernel_prefactor(ts) * std::polar(1.0, dx * dx / (2.0 * ts)) / u.length_unit();
}

FallingFrameTransform::FallingFrameTransform(const PhysicalParams& params, Branch branch)
    : params_(params), accel_(-branch_sign(branch) * params.force / params.mass) {}

double FallingFrameTransform::comoving(double x, double T) const {
  return x - 0.5 * accel_ * T * T;
}

double FallingFrameTransform::phase(double x, double T) const {
  const double xi = comoving(x, T);
  return params_.mass * accel_ * T * (xi + accel_ * T * T / 3.0) / params_.hbar;
}

cplx FallingFrameTransform::kernel(double x, double x_i, double T) const {
  return transform([&](double xi, double tt) { return free_kernel(xi, x_i, tt, params_); }, x, T);
}

}  // namespace sgcm
