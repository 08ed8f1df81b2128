#include "sgcm/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <ostream>

#include "sgcm/numerics.hpp"

namespace sgcm {

namespace {

// Gaussian envelopes are cut at this many standard deviations.
constexpr double kEnvelopeWidths = 12.0;

cplx full_gaussian(cplx alpha, cplx beta, cplx c) {
  return std::sqrt(kPi / alpha) * std::exp(beta * beta / (4.0 * alpha) + c);
}

bool nearly_real(cplx z) { return std::abs(z.imag()) <= 1e-9 * std::abs(z) + 1e-300; }

// Local coefficients of a(x) = exp(-A v^2 + B v + C), v = x - x0.
struct Local {
  cplx A, B, C;
};

Local expand(const GaussianAmplitude& g, double x0) {
  const double d = x0 - g.center;
  const cplx ik{0.0, g.momentum};
  return {g.alpha, -2.0 * g.alpha * d + ik, -g.alpha * d * d + ik * d + g.gamma};
}

}  // namespace

Axis Axis::uniform(double lo, double hi, std::size_t n) {
  if (n == 0) throw DomainError("grid must have at least one point");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("grid bounds must be finite");
  if (n > 1 && !(hi > lo)) throw DomainError("grid bounds must be increasing");
  return {lo, n > 1 ? hi : lo, n};
}

PhaseSpaceGrid default_phase_space_grid(const PhysicalParams& params, double t, std::size_t nq,
                                        std::size_t np) {
  const double a = std::abs(params.force) / params.mass;
  const double qmax = 10.0 * params.sigma + 0.5 * a * t * t;
  const double pmax = 10.0 * (params.hbar / params.sigma + std::abs(params.force) * t);
  return {Axis::uniform(-qmax, qmax, nq), Axis::uniform(-pmax, pmax, np)};
}

// ---------------------------------------------------------------------------
// Density matrix

DensityMatrixField::DensityMatrixField(Axis x, std::vector<cplx> plus, std::vector<cplx> minus,
                                       double t, double hbar)
    : x_(x), plus_(std::move(plus)), minus_(std::move(minus)), t_(t), hbar_(hbar) {
  if (plus_.size() != x_.n || minus_.size() != x_.n) {
    throw DomainError("amplitude columns do not match the grid");
  }
}

double DensityMatrixField::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < x_.n; ++i) s += std::norm(plus_[i]) + std::norm(minus_[i]);
  return s * x_.step();
}

double DensityMatrixField::purity() const {
  // Tr rho^2 = sum_ab sum_ik rho_ab(i,k) rho_ba(k,i) dx^2, which factorizes
  // for a rank-one matrix.
  double s = 0.0;
  for (Branch a : {Branch::plus, Branch::minus}) {
    for (Branch b : {Branch::plus, Branch::minus}) {
      double ra = 0.0;
      double rb = 0.0;
      for (std::size_t i = 0; i < x_.n; ++i) {
        ra += std::norm(amplitude(a, i));
        rb += std::norm(amplitude(b, i));
      }
      s += ra * rb;
    }
  }
  const double dx = x_.step();
  return s * dx * dx;
}

double DensityMatrixField::hermiticity_residual() const {
  // Checked on at most 1024 x 1024 pairs.
  const std::size_t stride = std::max<std::size_t>(1, x_.n / 1024);
  double worst = 0.0;
  for (std::size_t i = 0; i < x_.n; i += stride) {
    for (std::size_t k = 0; k < x_.n; k += stride) {
      for (Branch a : {Branch::plus, Branch::minus}) {
        for (Branch b : {Branch::plus, Branch::minus}) {
          worst = std::max(worst, std::abs((*this)(a, b, i, k) - std::conj((*this)(b, a, k, i))));
        }
      }
    }
  }
  return worst;
}

DensityMatrixField density_matrix(const SpinorWavepacket& state, const Axis& x) {
  if (x.n < 2 || !(x.hi > x.lo) || !std::isfinite(x.lo) || !std::isfinite(x.hi)) {
    throw DomainError("density grid must be finite, ordered and have at least two points");
  }
  std::vector<cplx> plus(x.n);
  std::vector<cplx> minus(x.n);
  for (std::size_t i = 0; i < x.n; ++i) {
    plus[i] = state.amplitude(Branch::plus, x[i]);
    minus[i] = state.amplitude(Branch::minus, x[i]);
  }
  return DensityMatrixField(x, std::move(plus), std::move(minus), state.total_time(),
                            state.params().hbar);
}

Axis density_axis_for(const SpinorWavepacket& state, const PhaseSpaceGrid& grid) {
  const UnitSystem& u = state.units();
  const double L = u.length_unit();
  const double P = u.momentum_unit();
  double p_content = std::max(std::abs(grid.p.lo), std::abs(grid.p.hi)) / P;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Branch b : {Branch::plus, Branch::minus}) {
    const auto& g = state.component(b);
    const double spread = kEnvelopeWidths * std::sqrt(g.density_variance());
    lo = std::min(lo, g.center - spread);
    hi = std::max(hi, g.center + spread);
    p_content = std::max(p_content, std::abs(g.momentum) + kEnvelopeWidths / std::sqrt(2.0));
  }
  // Eight samples of step 2h per period 2 pi / p.
  const double h_max = kPi / (8.0 * p_content);
  double h = h_max;
  const double anchor = grid.q.lo / L;
  if (grid.q.n > 1) {
    const double dq = grid.q.step() / L;
    h = dq / std::ceil(dq / h_max);
  }
  const double k_lo = std::floor((lo - anchor) / h);
  const double k_hi = std::ceil((hi - anchor) / h);
  const auto n = static_cast<std::size_t>(k_hi - k_lo) + 1;
  return Axis::uniform((anchor + k_lo * h) * L, (anchor + k_hi * h) * L, n);
}

// ---------------------------------------------------------------------------
// Wigner values and fields

double WignerValue::hermiticity_residual() const {
  return std::max({std::abs(pm - std::conj(mp)), std::abs(pp.imag()), std::abs(mm.imag())});
}

WignerValue& WignerValue::operator+=(const WignerValue& o) {
  pp += o.pp;
  pm += o.pm;
  mp += o.mp;
  mm += o.mm;
  return *this;
}

WignerValue& WignerValue::operator*=(double s) {
  pp *= s;
  pm *= s;
  mp *= s;
  mm *= s;
  return *this;
}

WignerMatrixField::WignerMatrixField(PhaseSpaceGrid grid, double t, std::vector<WignerValue> values)
    : grid_(grid), t_(t), values_(std::move(values)) {
  if (values_.size() != grid_.q.n * grid_.p.n) throw DomainError("values do not match the grid");
}

WignerValue WignerMatrixField::integral() const {
  WignerValue s{};
  for (const auto& v : values_) s += v;
  s *= (grid_.q.n > 1 ? grid_.q.step() : 1.0) * (grid_.p.n > 1 ? grid_.p.step() : 1.0);
  return s;
}

WignerValue WignerMatrixField::marginal_p(std::size_t iq) const {
  WignerValue s{};
  for (std::size_t ip = 0; ip < grid_.p.n; ++ip) s += (*this)(iq, ip);
  s *= grid_.p.n > 1 ? grid_.p.step() : 1.0;
  return s;
}

double WignerMatrixField::max_hermiticity_residual() const {
  double worst = 0.0;
  for (const auto& v : values_) worst = std::max(worst, v.hermiticity_residual());
  return worst;
}

cplx GaussianWigner::operator()(double q, double p) const {
  const double s = q - x0;
  return weight * std::exp(kss * s * s + ksp * s * p + kpp * p * p + ls * s + lp * p + c0);
}

cplx GaussianWigner::total() const {
  if (weight == 0.0) return 0.0;
  // p over the line, then s.
  const cplx D = -kpp;
  const cplx alpha = -kss - ksp * ksp / (4.0 * D);
  const cplx beta = ls + ksp * lp / (2.0 * D);
  const cplx c = c0 + lp * lp / (4.0 * D) + 0.5 * std::log(kPi / D);
  return weight * full_gaussian(alpha, beta, c);
}

cplx GaussianWigner::box_average(double q, double p, double dq, double dp) const {
  if (weight == 0.0) return 0.0;
  if (!(nearly_real(kss) && nearly_real(ksp) && nearly_real(kpp))) {
    throw NotAnalyticError("Wigner envelope is not a real quadratic form; use the sampled route");
  }
  // Exponent -(A s^2 + 2 B s p + D p^2) + ls s + lp p + c0.
  const double A = -kss.real();
  const double B = -0.5 * ksp.real();
  const double D = -kpp.real();
  const double det = A * D - B * B;
  const double std_s = 1.0 / std::sqrt(2.0 * det / D);
  const double std_p = 1.0 / std::sqrt(2.0 * det / A);
  // Peak of the envelope |W|, fixed by the real parts of the linear terms.
  const double s_c = (D * ls.real() - B * lp.real()) / (2.0 * det);
  const double p_c = (A * lp.real() - B * ls.real()) / (2.0 * det);

  const double s = q - x0;
  const double s1 = s - 0.5 * dq;
  const double s2 = s + 0.5 * dq;
  const double p1 = p - 0.5 * dp;
  const double p2 = p + 0.5 * dp;
  const double es1 = s_c - kEnvelopeWidths * std_s;
  const double es2 = s_c + kEnvelopeWidths * std_s;
  const double ep1 = p_c - kEnvelopeWidths * std_p;
  const double ep2 = p_c + kEnvelopeWidths * std_p;
  if (s2 < es1 || s1 > es2 || p2 < ep1 || p1 > ep2) return 0.0;

  cplx integral;
  if (p1 <= ep1 && p2 >= ep2) {
    // The pixel holds the whole momentum profile: integrate p over the line.
    const double alpha = det / D;
    const cplx beta = ls - B * lp / D;
    const cplx c = c0 + lp * lp / (4.0 * D) + 0.5 * std::log(kPi / D);
    integral = gaussian_window_integral(alpha, beta, c, s1, s2);
  } else if (s1 <= es1 && s2 >= es2) {
    const double alpha = det / A;
    const cplx beta = lp - B * ls / A;
    const cplx c = c0 + ls * ls / (4.0 * A) + 0.5 * std::log(kPi / A);
    integral = gaussian_window_integral(alpha, beta, c, p1, p2);
  } else {
    // s in closed form at each p, p by Gauss-Legendre panels across the
    // part of the pixel where the envelope lives.
    const double omega = std::abs((lp - B * ls / A).imag()) + std::abs(B / A) * std::abs(ls.imag());
    const double panel = std::min(std_p, omega > 0.0 ? 2.0 / omega : std_p);
    integral = integrate_panels(
        [&](double pv) {
          return gaussian_window_integral(A, ksp * pv + ls, kpp * pv * pv + lp * pv + c0, s1, s2);
        },
        std::max(p1, ep1), std::min(p2, ep2), panel);
  }
  return weight * integral / (dq * dp);
}

GaussianWigner cross_wigner(const GaussianAmplitude& a, const GaussianAmplitude& b) {
  GaussianWigner w;
  w.x0 = 0.5 * (a.center + b.center);
  const Local la = expand(a, w.x0);
  const Local lb = expand(b, w.x0);
  // Exponent in y: -P y^2 + Q y with Q = qs s + q0 - i p.
  const cplx P = 0.25 * (la.A + std::conj(lb.A));
  const cplx qs = std::conj(lb.A) - la.A;
  const cplx q0 = 0.5 * (la.B - std::conj(lb.B));
  const cplx i{0.0, 1.0};
  w.kss = qs * qs / (4.0 * P) - 4.0 * P;
  w.ksp = -i * qs / (2.0 * P);
  w.kpp = -1.0 / (4.0 * P);
  w.ls = qs * q0 / (2.0 * P) + la.B + std::conj(lb.B);
  w.lp = -i * q0 / (2.0 * P);
  w.c0 = q0 * q0 / (4.0 * P) + la.C + std::conj(lb.C) + 0.5 * std::log(kPi / P) -
         std::log(2.0 * kPi);
  return w;
}

WignerForms wigner_forms(const SpinorWavepacket& state) {
  if (!state.in_field()) {
    throw NotAnalyticError("closed-form Wigner matrix only covers states inside the field; "
                           "use wigner_numeric on a density matrix");
  }
  const auto& gp = state.component(Branch::plus);
  const auto& gm = state.component(Branch::minus);
  const cplx cp = state.weight(Branch::plus);
  const cplx cm = state.weight(Branch::minus);
  WignerForms f{cross_wigner(gp, gp), cross_wigner(gp, gm), cross_wigner(gm, gm)};
  f.pp.weight = std::norm(cp);
  f.pm.weight = cp * std::conj(cm);
  f.mm.weight = std::norm(cm);
  return f;
}

namespace {

WignerValue evaluate(const WignerForms& f, double qs, double ps, double scale) {
  WignerValue v;
  v.pp = f.pp(qs, ps).real() * scale;
  v.mm = f.mm(qs, ps).real() * scale;
  v.pm = f.pm(qs, ps) * scale;
  v.mp = std::conj(v.pm);
  return v;
}

}  // namespace

WignerValue wigner_analytic(const SpinorWavepacket& state, double q, double p) {
  const auto f = wigner_forms(state);
  const UnitSystem& u = state.units();
  return evaluate(f, q / u.length_unit(), p / u.momentum_unit(), 1.0 / u.action_unit());
}

WignerValue wigner_numeric(const DensityMatrixField& rho, double q, double p) {
  const Axis& x = rho.x();
  const double h = x.step();
  const double hbar = rho.hbar();
  if (std::abs(p) > kPi * hbar / (8.0 * h)) {
    throw ResolutionError("density grid step " + format_double(h) +
                          " m cannot resolve |p| = " + format_double(std::abs(p)) +
                          " kg m/s; need step <= pi hbar / (8 |p|)");
  }
  const double m_exact = 2.0 * (q - x.lo) / h;
  const double m_round = std::round(m_exact);
  if (std::abs(m_exact - m_round) > 1e-6) {
    throw DomainError("q = " + format_double(q) + " m is not on the sampling lattice of rho");
  }
  const auto n = static_cast<long>(x.n);
  const auto m = static_cast<long>(m_round);
  const long i_lo = std::max(0L, m - (n - 1));
  const long i_hi = std::min(n - 1, m);
  WignerValue s{};
  if (i_lo > i_hi) return s;
  // y = (i - k) h = (2 i - m) h; the phase exp(-i p y / hbar) advances by a fixed
  // factor per step and is resynchronized every 256 terms.
  const double dphi = -2.0 * p * h / hbar;
  const cplx step = std::polar(1.0, dphi);
  cplx e;
  for (long i = i_lo; i <= i_hi; ++i) {
    if ((i - i_lo) % 256 == 0) e = std::polar(1.0, -p * static_cast<double>(2 * i - m) * h / hbar);
    const auto iu = static_cast<std::size_t>(i);
    const auto ku = static_cast<std::size_t>(m - i);
    const cplx ap = rho.amplitude(Branch::plus, iu);
    const cplx am = rho.amplitude(Branch::minus, iu);
    const cplx bp = std::conj(rho.amplitude(Branch::plus, ku)) * e;
    const cplx bm = std::conj(rho.amplitude(Branch::minus, ku)) * e;
    s.pp += ap * bp;
    s.pm += ap * bm;
    s.mp += am * bp;
    s.mm += am * bm;
    e *= step;
  }
  s *= 2.0 * h / (2.0 * kPi * hbar);
  return s;
}

WignerMatrixField wigner_field_analytic(const SpinorWavepacket& state, const PhaseSpaceGrid& grid) {
  const auto f = wigner_forms(state);
  const UnitSystem& u = state.units();
  std::vector<WignerValue> values(grid.q.n * grid.p.n);
  for (std::size_t i = 0; i < grid.q.n; ++i) {
    for (std::size_t j = 0; j < grid.p.n; ++j) {
      values[i * grid.p.n + j] = evaluate(f, grid.q[i] / u.length_unit(),
                                          grid.p[j] / u.momentum_unit(), 1.0 / u.action_unit());
    }
  }
  WignerMatrixField W(grid, state.total_time(), std::move(values));
  W.set_source(state);
  return W;
}

WignerMatrixField wigner_field_numeric(const DensityMatrixField& rho, const PhaseSpaceGrid& grid) {
  std::vector<WignerValue> values(grid.q.n * grid.p.n);
  for (std::size_t i = 0; i < grid.q.n; ++i) {
    for (std::size_t j = 0; j < grid.p.n; ++j) {
      values[i * grid.p.n + j] = wigner_numeric(rho, grid.q[i], grid.p[j]);
    }
  }
  return WignerMatrixField(grid, rho.time(), std::move(values));
}

// ---------------------------------------------------------------------------
// Coarse graining

CoarsePixelSpec CoarsePixelSpec::default_for(const PhysicalParams& params) {
  const double Delta = 1e-6;
  return {Delta, 100.0 * 2.0 * kPi * params.hbar / Delta};
}

double CoarsePixelSpec::cell_ratio(double hbar) const { return Delta * delta / (2.0 * kPi * hbar); }

void CoarsePixelSpec::validate() const {
  if (!(Delta > 0.0) || !std::isfinite(Delta)) throw ParameterError("pixel width Delta must be > 0");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("pixel height delta must be > 0");
}

WignerValue coarse_grained_value(const SpinorWavepacket& state, double q, double p,
                                 const CoarsePixelSpec& pix) {
  pix.validate();
  const auto f = wigner_forms(state);
  const UnitSystem& u = state.units();
  const double qs = q / u.length_unit();
  const double ps = p / u.momentum_unit();
  const double dq = pix.Delta / u.length_unit();
  const double dp = pix.delta / u.momentum_unit();
  const double scale = 1.0 / u.action_unit();
  WignerValue v;
  v.pp = f.pp.box_average(qs, ps, dq, dp).real() * scale;
  v.mm = f.mm.box_average(qs, ps, dq, dp).real() * scale;
  v.pm = f.pm.box_average(qs, ps, dq, dp) * scale;
  v.mp = std::conj(v.pm);
  return v;
}

namespace {

// Weights of a centred window of the given width on cells of size h: the
// overlap of cell m with the window divided by the width. They sum to one.
std::vector<double> box_weights(double width, double h, long& half) {
  if (h <= 0.0 || width <= 0.0) {
    half = 0;
    return {1.0};
  }
  half = static_cast<long>(std::ceil(0.5 * width / h + 0.5));
  std::vector<double> w(static_cast<std::size_t>(2 * half + 1));
  for (long m = -half; m <= half; ++m) {
    const double a = std::max(-0.5 * width, (static_cast<double>(m) - 0.5) * h);
    const double b = std::min(0.5 * width, (static_cast<double>(m) + 0.5) * h);
    w[static_cast<std::size_t>(m + half)] = std::max(0.0, b - a) / width;
  }
  return w;
}

}  // namespace

WignerMatrixField coarse_grain(const WignerMatrixField& W, const CoarsePixelSpec& pix) {
  pix.validate();
  const auto& grid = W.grid();
  const std::size_t nq = grid.q.n;
  const std::size_t np = grid.p.n;
  std::vector<WignerValue> out(nq * np);

  if (W.source()) {
    const SpinorWavepacket& state = *W.source();
    const auto f = wigner_forms(state);
    const UnitSystem& u = state.units();
    const double dq = pix.Delta / u.length_unit();
    const double dp = pix.delta / u.momentum_unit();
    const double scale = 1.0 / u.action_unit();
    for (std::size_t i = 0; i < nq; ++i) {
      const double qs = grid.q[i] / u.length_unit();
      for (std::size_t j = 0; j < np; ++j) {
        const double ps = grid.p[j] / u.momentum_unit();
        WignerValue& v = out[i * np + j];
        v.pp = f.pp.box_average(qs, ps, dq, dp).real() * scale;
        v.mm = f.mm.box_average(qs, ps, dq, dp).real() * scale;
        v.pm = f.pm.box_average(qs, ps, dq, dp) * scale;
        v.mp = std::conj(v.pm);
      }
    }
  } else {
    // Separable box filter; samples beyond the grid count as zero.
    long hq = 0;
    long hp = 0;
    const auto wq = box_weights(pix.Delta, grid.q.step(), hq);
    const auto wp = box_weights(pix.delta, grid.p.step(), hp);
    std::vector<WignerValue> tmp(nq * np);
    for (std::size_t i = 0; i < nq; ++i) {
      for (std::size_t j = 0; j < np; ++j) {
        WignerValue s{};
        for (long m = -hp; m <= hp; ++m) {
          const long jj = static_cast<long>(j) + m;
          if (jj < 0 || jj >= static_cast<long>(np)) continue;
          WignerValue v = W(i, static_cast<std::size_t>(jj));
          v *= wp[static_cast<std::size_t>(m + hp)];
          s += v;
        }
        tmp[i * np + j] = s;
      }
    }
    for (std::size_t i = 0; i < nq; ++i) {
      for (std::size_t j = 0; j < np; ++j) {
        WignerValue s{};
        for (long m = -hq; m <= hq; ++m) {
          const long ii = static_cast<long>(i) + m;
          if (ii < 0 || ii >= static_cast<long>(nq)) continue;
          WignerValue v = tmp[static_cast<std::size_t>(ii) * np + j];
          v *= wq[static_cast<std::size_t>(m + hq)];
          s += v;
        }
        out[i * np + j] = s;
      }
    }
  }
  WignerMatrixField result(grid, W.time(), std::move(out));
  result.set_pixels({pix.Delta, pix.delta});
  return result;
}

double project_spin_direction(const WignerValue& w, std::array<double, 3> n, bool strict) {
  const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("direction must be a nonzero finite vector");
  if (std::abs(norm - 1.0) > 1e-12) {
    if (strict) throw DomainError("direction is not a unit vector (|n| = " + format_double(norm) + ")");
    std::cerr << "warning: normalizing spin direction with |n| = " << norm << "\n";
    for (double& c : n) c /= norm;
  }
  const double trace = 0.5 * (w.pp.real() + w.mm.real());
  const double diff = 0.5 * (w.pp.real() - w.mm.real());
  // Re W_pm from the hermitian part, so sampled matrices are symmetrized.
  const cplx off = 0.5 * (w.pm + std::conj(w.mp));
  return trace + n[0] * off.real() + n[1] * diff + n[2] * off.imag();
}

void write_wigner_csv(std::ostream& out, const WignerMatrixField& W, bool with_projection) {
  out << "q,p,W_pp,W_mm,Re_W_pm,Im_W_pm";
  if (with_projection) out << ",W_x";
  out << "\n";
  const auto& g = W.grid();
  for (std::size_t i = 0; i < g.q.n; ++i) {
    for (std::size_t j = 0; j < g.p.n; ++j) {
      const WignerValue& v = W(i, j);
      out << format_double(g.q[i]) << ',' << format_double(g.p[j]) << ','
          << format_double(v.pp.real()) << ',' << format_double(v.mm.real()) << ','
          << format_double(v.pm.real()) << ',' << format_double(v.pm.imag());
      if (with_projection) out << ',' << format_double(project_spin_direction(v, {1.0, 0.0, 0.0}));
      out << "\n";
    }
  }
}

}  // namespace sgcm
