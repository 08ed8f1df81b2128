#include "sgcm/oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <mutex>
#include <sstream>

namespace sgcm {

namespace {

// The FFTW planner is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kPacketWidths = 12.0;

double discrete_norm(const std::vector<cplx>& v, double dx) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s * dx;
}

std::string describe(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

GridState GridState::initial(double L, std::size_t n) {
  if (!(L > 0.0) || n < 16) throw DomainError("grid needs L > 0 and at least 16 points");
  GridState gs;
  gs.L = L;
  gs.n = n;
  gs.plus.resize(n);
  const auto g = GaussianAmplitude::initial();
  for (std::size_t i = 0; i < n; ++i) gs.plus[i] = g(gs.x(i));
  gs.minus = gs.plus;
  return gs;
}

double GridState::norm(Branch b) const { return discrete_norm(component(b), dx()); }

double GridState::mean_position(Branch b) const {
  const auto& v = component(b);
  double s = 0.0;
  double w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += x(i) * std::norm(v[i]);
    w += std::norm(v[i]);
  }
  return s / w;
}

double GridState::position_variance(Branch b) const {
  const auto& v = component(b);
  const double mu = mean_position(b);
  double s = 0.0;
  double w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = x(i) - mu;
    s += u * u * std::norm(v[i]);
    w += std::norm(v[i]);
  }
  return s / w;
}

double GridState::boundary_mass(Branch b, double margin) const {
  const auto& v = component(b);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x(i);
    if (xi < -L + margin || xi > L - margin) s += std::norm(v[i]);
  }
  return s * dx();
}

double oracle_max_wavenumber(double force, double t) {
  return std::abs(force) * t + 6.0 / std::sqrt(2.0);
}

double oracle_required_dx(double force, double t) {
  return 2.0 * kPi / (8.0 * oracle_max_wavenumber(force, t));
}

struct SplitOperatorStepper::Impl {
  std::size_t n;
  double L;
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::vector<double> k;
  double cached_dt = std::numeric_limits<double>::quiet_NaN();
  std::vector<cplx> half_kick_plus;
  std::vector<cplx> half_kick_minus;
  std::vector<cplx> drift;  // includes the 1/n of the inverse transform

  cplx* data() { return reinterpret_cast<cplx*>(buf); }

  void prepare(double dt, double force) {
    if (dt == cached_dt) return;
    const double dx = 2.0 * L / static_cast<double>(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = -L + static_cast<double>(i) * dx;
      const double phase = 0.5 * force * x * dt;
      half_kick_plus[i] = std::polar(1.0, -phase);
      half_kick_minus[i] = std::polar(1.0, phase);
      drift[i] = std::polar(inv_n, -0.5 * k[i] * k[i] * dt);
    }
    cached_dt = dt;
  }

  void step_component(std::vector<cplx>& v, const std::vector<cplx>& kick) {
    cplx* b = data();
    for (std::size_t i = 0; i < n; ++i) b[i] = v[i] * kick[i];
    fftw_execute(fwd);
    for (std::size_t i = 0; i < n; ++i) b[i] *= drift[i];
    fftw_execute(bwd);
    for (std::size_t i = 0; i < n; ++i) v[i] = b[i] * kick[i];
  }
};

SplitOperatorStepper::SplitOperatorStepper(std::size_t n, double L, double force)
    : impl_(std::make_unique<Impl>()), force_(force) {
  if (n < 16 || !(L > 0.0)) throw DomainError("grid needs L > 0 and at least 16 points");
  auto& m = *impl_;
  m.n = n;
  m.L = L;
  m.k.resize(n);
  const double dk = kPi / L;
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<double>(j);
    m.k[j] = (j < n / 2 ? jj : jj - static_cast<double>(n)) * dk;
  }
  m.half_kick_plus.resize(n);
  m.half_kick_minus.resize(n);
  m.drift.resize(n);
  std::lock_guard<std::mutex> lock(planner_mutex());
  m.buf = fftw_alloc_complex(n);
  // ESTIMATE keeps the chosen algorithm, and so the bits, the same from run to run.
  m.fwd = fftw_plan_dft_1d(static_cast<int>(n), m.buf, m.buf, FFTW_FORWARD, FFTW_ESTIMATE);
  m.bwd = fftw_plan_dft_1d(static_cast<int>(n), m.buf, m.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

SplitOperatorStepper::~SplitOperatorStepper() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->bwd);
  fftw_free(impl_->buf);
}

void SplitOperatorStepper::step(GridState& gs, double dt) {
  if (!(dt > 0.0)) throw DomainError("time step must be > 0");
  if (gs.n != impl_->n || gs.L != impl_->L) throw DomainError("grid does not match the stepper");
  const double need = oracle_required_dx(force_, gs.t + dt);
  if (gs.dx() > need) {
    throw ResolutionError("grid spacing dx = " + describe(gs.dx()) +
                          " cannot carry the momentum reached at t = " + describe(gs.t + dt) +
                          "; need dx <= " + describe(need));
  }
  impl_->prepare(dt, force_);
  impl_->step_component(gs.plus, impl_->half_kick_plus);
  impl_->step_component(gs.minus, impl_->half_kick_minus);
  gs.t += dt;
}

void SplitOperatorStepper::advance(GridState& gs, double t_end, std::size_t steps) {
  if (steps == 0) return;
  const double t0 = gs.t;
  const double dt = (t_end - t0) / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) step(gs, dt);
  gs.t = t_end;  // no accumulated drift in the clock
}

double SplitOperatorStepper::mean_momentum(const GridState& gs, Branch b) {
  auto& m = *impl_;
  const auto& v = gs.component(b);
  cplx* buf = m.data();
  std::copy(v.begin(), v.end(), buf);
  fftw_execute(m.fwd);
  double s = 0.0;
  double w = 0.0;
  for (std::size_t j = 0; j < m.n; ++j) {
    s += m.k[j] * std::norm(buf[j]);
    w += std::norm(buf[j]);
  }
  return s / w;
}

GridState step_split_operator(const GridState& gs, double dt, double force) {
  SplitOperatorStepper stepper(gs.n, gs.L, force);
  GridState out = gs;
  stepper.step(out, dt);
  return out;
}

namespace {

struct Deviation {
  double l2_plus;
  double l2_minus;
  double linf_plus;
  double linf_minus;
  double density_linf;
  double overlap;
};

Deviation compare(const GridState& gs, const GaussianAmplitude& ep, const GaussianAmplitude& em) {
  Deviation d{};
  double err[2] = {0.0, 0.0};
  double ref[2] = {0.0, 0.0};
  double linf[2] = {0.0, 0.0};
  cplx ov = 0.0;
  for (std::size_t i = 0; i < gs.n; ++i) {
    const double x = gs.x(i);
    const cplx e[2] = {ep(x), em(x)};
    const cplx g[2] = {gs.plus[i], gs.minus[i]};
    for (int b = 0; b < 2; ++b) {
      err[b] += std::norm(g[b] - e[b]);
      ref[b] += std::norm(e[b]);
      linf[b] = std::max(linf[b], std::abs(g[b] - e[b]));
      d.density_linf = std::max(d.density_linf, std::abs(std::norm(g[b]) - std::norm(e[b])));
    }
    ov += std::conj(gs.minus[i]) * gs.plus[i];
  }
  d.l2_plus = std::sqrt(err[0] / ref[0]);
  d.l2_minus = std::sqrt(err[1] / ref[1]);
  d.linf_plus = linf[0];
  d.linf_minus = linf[1];
  d.overlap = std::abs(ov) * gs.dx();
  return d;
}

struct RowResult {
  VerificationRow row;
  std::vector<std::string> warnings;
};

RowResult run_one(const PhysicalParams& params, double t_si, const OracleOptions& opt) {
  RowResult r;
  auto& row = r.row;
  row.t = t_si;
  const UnitSystem u(params);
  const double ts = u.to_scaled(Quantity::time, t_si);
  const double f = u.to_scaled(Quantity::force, params.force);
  const auto exact = evolve_in_field(params, t_si);
  const auto& ep = exact.component(Branch::plus);
  const auto& em = exact.component(Branch::minus);
  row.overlap_exact = std::abs(inner_product(em, ep));

  const double spread = std::sqrt(0.5 * (1.0 + ts * ts));
  const double L = 0.5 * std::abs(f) * ts * ts + kPacketWidths * spread;
  std::size_t n = opt.n;
  while (2.0 * L / static_cast<double>(n) > oracle_required_dx(f, ts)) n *= 2;
  if (n != opt.n) {
    r.warnings.push_back("t=" + describe(t_si) + ": grid raised from " + std::to_string(opt.n) +
                         " to " + std::to_string(n) + " points to resolve momentum");
  }
  row.n = n;

  SplitOperatorStepper stepper(n, L, f);
  const GridState start = GridState::initial(L, n);
  const double norm0 = std::max(start.norm(Branch::plus), start.norm(Branch::minus));

  double dt = std::min(opt.dt, ts / static_cast<double>(opt.min_steps)) * opt.dt_scale;
  std::vector<double> errors;
  GridState gs = start;
  for (int level = 0;; ++level) {
    gs = start;
    std::size_t steps = 0;
    if (ts > 0.0) {
      steps = static_cast<std::size_t>(std::max(1.0, std::ceil(ts / dt - 1e-9)));
      stepper.advance(gs, ts, steps);
    }
    const Deviation d = compare(gs, ep, em);
    row.l2_err_plus = d.l2_plus;
    row.l2_err_minus = d.l2_minus;
    row.linf_err_plus = d.linf_plus;
    row.linf_err_minus = d.linf_minus;
    row.density_linf_err = d.density_linf;
    row.overlap = d.overlap;
    row.steps = steps;
    row.dt = steps ? ts / static_cast<double>(steps) : 0.0;
    errors.push_back(std::max(d.l2_plus, d.l2_minus));
    if (steps == 0 || !opt.refine) break;
    const std::size_t m = errors.size();
    const bool below = errors.back() < opt.tolerance;
    const bool plateau = m >= 2 && errors[m - 1] > errors[m - 2] / 1.5;
    if ((below && m >= 2) || plateau || level >= opt.max_halvings) break;
    dt *= 0.5;
  }

  row.order = std::numeric_limits<double>::quiet_NaN();
  const std::size_t m = errors.size();
  // Ratios of errors near roundoff say nothing about the method.
  if (m >= 2 && errors[m - 1] > 1e-11) row.order = std::log2(errors[m - 2] / errors[m - 1]);
  row.converged = errors.back() < opt.tolerance;
  row.overlap_dev = std::abs(row.overlap - row.overlap_exact);
  const double norm1 = std::max(std::abs(gs.norm(Branch::plus) - start.norm(Branch::plus)),
                                std::abs(gs.norm(Branch::minus) - start.norm(Branch::minus)));
  row.norm_drift = norm1 / norm0;
  row.boundary_mass = std::max(gs.boundary_mass(Branch::plus), gs.boundary_mass(Branch::minus));
  if (row.boundary_mass > 1e-10) {
    r.warnings.push_back("t=" + describe(t_si) + ": boundary mass " +
                         describe(row.boundary_mass) + " exceeds 1e-10");
  }
  if (!row.converged) {
    r.warnings.push_back("t=" + describe(t_si) + ": no dt convergence, relative L2 error " +
                         describe(errors.back()) + " at dt = " + describe(row.dt));
  }
  return r;
}

}  // namespace

VerificationReport verify_closed_forms(const PhysicalParams& params, const std::vector<double>& times,
                                       const OracleOptions& options) {
  validate(params);
  for (double t : times) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("verification times must be >= 0");
  }
  std::vector<std::future<RowResult>> jobs;
  jobs.reserve(times.size());
  for (double t : times) {
    jobs.push_back(std::async(std::launch::async, run_one, std::cref(params), t, std::cref(options)));
  }
  VerificationReport report;
  for (auto& j : jobs) {
    RowResult r = j.get();
    const auto& row = r.row;
    const std::string at = "t=" + describe(row.t) + ": ";
    if (!(row.l2_err_plus < options.tolerance && row.l2_err_minus < options.tolerance)) {
      report.failures.push_back(at + "relative L2 error " +
                                describe(std::max(row.l2_err_plus, row.l2_err_minus)) +
                                " not below " + describe(options.tolerance));
    }
    if (!(row.norm_drift <= 1e-12)) {
      report.failures.push_back(at + "norm drift " + describe(row.norm_drift) + " above 1e-12");
    }
    if (!(row.overlap_dev <= 1e-5)) {
      report.failures.push_back(at + "overlap deviation " + describe(row.overlap_dev) +
                                " above 1e-5");
    }
    report.warnings.insert(report.warnings.end(), r.warnings.begin(), r.warnings.end());
    report.rows.push_back(row);
  }
  return report;
}

std::vector<double> default_verification_times(const PhysicalParams& params) {
  const auto s = derive_scales(params);
  return {0.0, 0.1 * s.tau3, s.tau3, 0.01 * s.tau2};
}

void write_verification_csv(std::ostream& out, const VerificationReport& report) {
  out << "t,l2_err_plus,l2_err_minus,overlap_dev,norm_drift\n";
  for (const auto& r : report.rows) {
    out << format_double(r.t) << ',' << format_double(r.l2_err_plus) << ','
        << format_double(r.l2_err_minus) << ',' << format_double(r.overlap_dev) << ','
        << format_double(r.norm_drift) << '\n';
  }
}

}  // namespace sgcm
