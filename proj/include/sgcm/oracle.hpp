#pragma once

// Brute-force grid integrator for the two branch equations
//   i d(phi_+-)/dt = -1/2 d^2(phi_+-)/dx^2 +- F x phi_+-
// in scaled units. Used to check the closed forms; nothing else calls it.

#include <cstddef>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "sgcm/core.hpp"
#include "sgcm/dynamics.hpp"

namespace sgcm {

// Bare components on the periodic grid x_i = -L + i dx, dx = 2L / n.
struct GridState {
  double L = 0.0;  // half-width, scaled
  std::size_t n = 0;
  double t = 0.0;  // scaled
  std::vector<cplx> plus;
  std::vector<cplx> minus;

  // Both components set to the normalized width-1 Gaussian.
  static GridState initial(double L, std::size_t n);

  double dx() const { return 2.0 * L / static_cast<double>(n); }
  double x(std::size_t i) const { return -L + static_cast<double>(i) * dx(); }

  std::vector<cplx>& component(Branch b) { return b == Branch::plus ? plus : minus; }
  const std::vector<cplx>& component(Branch b) const { return b == Branch::plus ? plus : minus; }

  double norm(Branch b) const;  // sum |phi|^2 dx
  double mean_position(Branch b) const;
  double position_variance(Branch b) const;
  // Probability within `margin` of either edge of the periodic box.
  double boundary_mass(Branch b, double margin = 2.0) const;
};

// Largest wavenumber the run has to carry at time t: |F| t plus six momentum widths.
double oracle_max_wavenumber(double force, double t);
// Spacing giving 8 points per shortest wavelength at time t.
double oracle_required_dx(double force, double t);

// Strang stepper with FFTW plans for one grid size. Not copyable; one per thread.
class SplitOperatorStepper {
 public:
  SplitOperatorStepper(std::size_t n, double L, double force);
  ~SplitOperatorStepper();
  SplitOperatorStepper(const SplitOperatorStepper&) = delete;
  SplitOperatorStepper& operator=(const SplitOperatorStepper&) = delete;

  double force() const { return force_; }

  // Half kick, spectral drift, half kick. Throws ResolutionError if the grid
  // cannot carry the momentum reached at gs.t + dt, DomainError for dt <= 0.
  void step(GridState& gs, double dt);
  // `steps` equal steps up to t_end.
  void advance(GridState& gs, double t_end, std::size_t steps);

  // Spectral mean momentum of one component.
  double mean_momentum(const GridState& gs, Branch b);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double force_;
};

// One step with a throwaway stepper.
GridState step_split_operator(const GridState& gs, double dt, double force);

struct OracleOptions {
  std::size_t n = 4096;
  double dt = 1e-5;           // scaled, i.e. tau2 / 1e5
  std::size_t min_steps = 16;
  double tolerance = 1e-6;    // target relative L2 error
  int max_halvings = 8;
  bool refine = true;         // halve dt until converged or plateaued
  double dt_scale = 1.0;      // multiplies the starting dt; > 1 forces a coarse run
};

struct VerificationRow {
  double t = 0.0;  // s
  double l2_err_plus = 0.0;
  double l2_err_minus = 0.0;
  double linf_err_plus = 0.0;      // amplitude, scaled
  double linf_err_minus = 0.0;
  double density_linf_err = 0.0;   // max over both branches, scaled
  double overlap = 0.0;            // |<phi_-|phi_+>| on the grid
  double overlap_exact = 0.0;      // same from the closed forms
  double overlap_dev = 0.0;
  double norm_drift = 0.0;         // relative, max over branches
  double boundary_mass = 0.0;
  double dt = 0.0;                 // scaled, finest step used
  std::size_t steps = 0;
  std::size_t n = 0;
  double order = 0.0;              // log2 of the last error ratio; nan if not measurable
  bool converged = true;
};

struct VerificationReport {
  std::vector<VerificationRow> rows;
  std::vector<std::string> warnings;
  std::vector<std::string> failures;  // named tolerance breaches

  bool passed() const { return failures.empty(); }
};

// Evolves on the grid to each t (s) and compares with the closed forms.
// Runs the times concurrently.
VerificationReport verify_closed_forms(const PhysicalParams& params, const std::vector<double>& times,
                                       const OracleOptions& options = {});

// The default time list: 0, 0.1 tau3, tau3, 0.01 tau2.
std::vector<double> default_verification_times(const PhysicalParams& params);

// Header t,l2_err_plus,l2_err_minus,overlap_dev,norm_drift.
void write_verification_csv(std::ostream& out, const VerificationReport& report);

}  // namespace sgcm
