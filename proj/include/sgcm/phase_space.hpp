#pragma once

// Density matrix, 2x2 Wigner matrix and its coarse graining over phase-space pixels.
//
// W_ab(q, p) = 1/(2 pi hbar) Int rho_ab(q + y/2, q - y/2) exp(-i p y / hbar) dy.
// With this sign a packet moving with momentum p0 has its Wigner function
// centred at p = +p0, so the p-marginal is the momentum distribution.
//
// Fields store SI grids (m, kg m/s) and SI values (1/(J s)); computations run
// in the scaled units of UnitSystem, where W is measured in units of 1/hbar.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sgcm/dynamics.hpp"

namespace sgcm {

// Uniform grid lo, lo + step, ..., hi with n points (n = 1 means the single point lo).
struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 1;

  static Axis uniform(double lo, double hi, std::size_t n);
  double step() const { return n > 1 ? (hi - lo) / static_cast<double>(n - 1) : 0.0; }
  double operator[](std::size_t i) const {
    return n > 1 ? lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1) : lo;
  }
};

struct PhaseSpaceGrid {
  Axis q;  // m
  Axis p;  // kg m/s
};

// q in +-(10 sigma + |a| t^2 / 2), p in +-10 (hbar/sigma + |F| t), 512 x 512.
PhaseSpaceGrid default_phase_space_grid(const PhysicalParams& params, double t,
                                        std::size_t nq = 512, std::size_t np = 512);

// rho_ab(x, x') = c_a phi_a(x) conj(c_b phi_b(x')) on a uniform x grid. The
// state is pure, so only the two weighted amplitude columns are stored and
// entries are formed on demand.
class DensityMatrixField {
 public:
  DensityMatrixField(Axis x, std::vector<cplx> plus, std::vector<cplx> minus, double t,
                     double hbar = kHbar);

  const Axis& x() const { return x_; }
  double time() const { return t_; }
  double hbar() const { return hbar_; }
  // Weighted amplitude c_a phi_a(x_i), m^-1/2.
  cplx amplitude(Branch a, std::size_t i) const { return a == Branch::plus ? plus_[i] : minus_[i]; }
  // rho_ab(x_i, x_k), 1/m.
  cplx operator()(Branch a, Branch b, std::size_t i, std::size_t k) const {
    return amplitude(a, i) * std::conj(amplitude(b, k));
  }

  // Sum over branches of rho_aa(x, x) dx.
  double trace() const;
  // Tr rho^2 over the discretized joint space.
  double purity() const;
  // max |rho_ab(x, x') - conj(rho_ba(x', x))| over the grid.
  double hermiticity_residual() const;

 private:
  Axis x_;
  std::vector<cplx> plus_;
  std::vector<cplx> minus_;
  double t_;
  double hbar_;
};

// Throws DomainError for an empty or unordered grid.
DensityMatrixField density_matrix(const SpinorWavepacket& state, const Axis& x);

// x grid fine enough for wigner_numeric at every |p| of the phase-space grid
// and aligned so that each q of the grid lies on the sampling lattice.
Axis density_axis_for(const SpinorWavepacket& state, const PhaseSpaceGrid& grid);

// Wigner matrix at one phase-space point. mp is kept separately so that
// numerically computed matrices can be checked for hermiticity.
struct WignerValue {
  cplx pp, pm, mp, mm;

  double hermiticity_residual() const;
  WignerValue& operator+=(const WignerValue& o);
  WignerValue& operator*=(double s);
};

class WignerMatrixField {
 public:
  WignerMatrixField(PhaseSpaceGrid grid, double t, std::vector<WignerValue> values);

  const PhaseSpaceGrid& grid() const { return grid_; }
  double time() const { return t_; }
  // Row-major: q outer, p inner.
  const WignerValue& operator()(std::size_t iq, std::size_t ip) const {
    return values_[iq * grid_.p.n + ip];
  }
  const std::vector<WignerValue>& values() const { return values_; }

  // State the field was built from in closed form, when there is one.
  const std::optional<SpinorWavepacket>& source() const { return source_; }
  void set_source(SpinorWavepacket s) { source_.emplace(std::move(s)); }

  // Pixel spec when the field is coarse grained.
  struct Pixels {
    double Delta;
    double delta;
  };
  const std::optional<Pixels>& pixels() const { return pixels_; }
  void set_pixels(Pixels px) { pixels_ = px; }

  // Riemann sum of every entry over the grid.
  WignerValue integral() const;
  // Riemann sum over p at fixed q.
  WignerValue marginal_p(std::size_t iq) const;
  double max_hermiticity_residual() const;

 private:
  PhaseSpaceGrid grid_;
  double t_;
  std::vector<WignerValue> values_;
  std::optional<SpinorWavepacket> source_;
  std::optional<Pixels> pixels_;
};

// exp(kss s^2 + ksp s p + kpp p^2 + ls s + lp p + c0) times weight, s = q - x0,
// in scaled units. The Wigner transform of any pair of Gaussian amplitudes has
// this form.
struct GaussianWigner {
  double x0 = 0.0;
  cplx kss, ksp, kpp, ls, lp, c0;
  cplx weight{1.0, 0.0};

  cplx operator()(double q, double p) const;
  // Integral over the whole plane.
  cplx total() const;
  // Average over the box [q - dq/2, q + dq/2] x [p - dp/2, p + dp/2].
  // Throws NotAnalyticError when the quadratic part is not real.
  cplx box_average(double q, double p, double dq, double dp) const;
};

// 1/(2 pi) Int a(q + y/2) conj(b(q - y/2)) exp(-i p y) dy.
GaussianWigner cross_wigner(const GaussianAmplitude& a, const GaussianAmplitude& b);

// The three independent Wigner elements of an in-field state, weights included.
struct WignerForms {
  GaussianWigner pp, pm, mm;
};
// Throws NotAnalyticError for states after the field exit.
WignerForms wigner_forms(const SpinorWavepacket& state);

// Closed form at (q, p) in SI. Throws NotAnalyticError for post-field states.
WignerValue wigner_analytic(const SpinorWavepacket& state, double q, double p);

// Discrete Fourier sum over y on the density grid. q must lie on the half-step
// lattice of rho's grid; throws ResolutionError when the grid cannot resolve |p|.
WignerValue wigner_numeric(const DensityMatrixField& rho, double q, double p);

WignerMatrixField wigner_field_analytic(const SpinorWavepacket& state, const PhaseSpaceGrid& grid);
WignerMatrixField wigner_field_numeric(const DensityMatrixField& rho, const PhaseSpaceGrid& grid);

struct CoarsePixelSpec {
  double Delta;  // m
  double delta;  // kg m/s

  // Delta = 1e-6 m and delta = 100 h / Delta.
  static CoarsePixelSpec default_for(const PhysicalParams& params);
  // Delta delta / h.
  double cell_ratio(double hbar) const;
  // Throws ParameterError unless both sizes are positive and finite.
  void validate() const;
};

// Average over the pixel centred at (q, p), SI, from the closed form.
WignerValue coarse_grained_value(const SpinorWavepacket& state, double q, double p,
                                 const CoarsePixelSpec& pix);

// Analytic window integrals when the field carries its source state, otherwise a
// box filter over the samples with fractional weights for partially covered cells.
WignerMatrixField coarse_grain(const WignerMatrixField& W, const CoarsePixelSpec& pix);

// Tr[W (1 + n.sigma)/2] in the |+>, |-> basis, where sigma_y is diagonal:
// sigma_x -> [[0,1],[1,0]], sigma_y -> diag(1,-1), sigma_z -> [[0,i],[-i,0]].
// A non-unit n throws DomainError when strict, otherwise it is normalized with
// a warning on stderr.
double project_spin_direction(const WignerValue& w, std::array<double, 3> n, bool strict = true);

// Columns q,p,W_pp,W_mm,Re_W_pm,Im_W_pm[,W_x] in SI, q outer.
void write_wigner_csv(std::ostream& out, const WignerMatrixField& W, bool with_projection = true);

}  // namespace sgcm
