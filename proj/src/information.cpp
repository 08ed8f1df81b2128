#include "sgcm/information.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgcm/numerics.hpp"

namespace sgcm {

namespace {

constexpr double kWidths = 12.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Scaled erfcx(y) = exp(y^2) erfc(y) for y >= 0.
double erfcx(double y) { return faddeeva_w(cplx(0.0, y)).real(); }

// log of the probability that N(mu, sd^2) falls in [a, b], accurate deep in the tails.
double log_gaussian_mass(double mu, double sd, double a, double b) {
  const double k = 1.0 / (sd * std::sqrt(2.0));
  double z1 = (a - mu) * k;
  double z2 = (b - mu) * k;
  if (z2 <= 0.0) {
    // Mirror the left tail onto the right one.
    const double t = -z2;
    z2 = -z1;
    z1 = t;
  }
  if (z1 >= 0.0) {
    const double diff = erfcx(z1) - std::exp(z1 * z1 - z2 * z2) * erfcx(z2);
    if (!(diff > 0.0)) return kNegInf;
    return std::log(0.5 * diff) - z1 * z1;
  }
  return std::log(0.5 * (std::erf(z2) - std::erf(z1)));
}

// Information ln 2 - S for spin odds d = ln(P+ / P-).
double information_from_log_odds(double d) {
  if (std::isnan(d)) return 0.0;
  const double a = std::abs(d);
  if (std::isinf(a)) return kLn2;
  if (a < 1e-4) return a * a / 8.0;
  const double e = std::exp(-a);
  const double S = std::log1p(e) + a * e / (1.0 + e);
  return kLn2 - S;
}

double log_weight(cplx c) { return std::norm(c) > 0.0 ? std::log(std::norm(c)) : kNegInf; }

bool equal_weights(const PhysicalParams& p) {
  return std::abs(std::norm(p.c_plus) - std::norm(p.c_minus)) <= 1e-12;
}

}  // namespace

double overlap_factor(double t, const DerivedScales& scales, OverlapModel model) {
  const double k = model == OverlapModel::reference ? 1.0 : 4.0;
  const double t1sq = scales.tau1 * scales.tau1;
  return std::exp(-t * t * (t * t + k * scales.tau2 * scales.tau2) / (t1sq * t1sq));
}

double binary_overlap_entropy(double A) {
  A = std::clamp(A, 0.0, 1.0);
  if (A == 1.0) return 0.0;
  // Subtracting a nonnegative term keeps the result at or below ln 2.
  return kLn2 - 0.5 * ((1.0 + A) * std::log1p(A) + (1.0 - A) * std::log1p(-A));
}

EntanglementPoint entanglement_entropy(double t, const DerivedScales& scales, OverlapModel model) {
  if (!(t >= 0.0)) throw DomainError("time must be >= 0");
  const double A = overlap_factor(t, scales, model);
  return {t, A, binary_overlap_entropy(A)};
}

std::vector<EntanglementPoint> entanglement_series(const std::vector<double>& times,
                                                   const DerivedScales& scales, OverlapModel model) {
  std::vector<EntanglementPoint> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(entanglement_entropy(t, scales, model));
  return out;
}

std::array<double, 2> SpinDensity::eigenvalues() const {
  const double mean = 0.5 * (pp + mm);
  const double half_gap = std::hypot(0.5 * (pp - mm), std::abs(pm));
  return {mean - half_gap, mean + half_gap};
}

SpinDensity reduced_spin_density(const SpinorWavepacket& state) {
  const auto& gp = state.component(Branch::plus);
  const auto& gm = state.component(Branch::minus);
  // conj(phi_-) phi_+ is a Gaussian about the midpoint with half the variance.
  const double mid = 0.5 * (gp.center + gm.center);
  const double sd = std::sqrt(0.5 * std::max(gp.density_variance(), gm.density_variance()));
  const cplx overlap = integrate_adaptive_complex(
      [&](double x) { return std::conj(gm(x)) * gp(x); }, mid - kWidths * sd, mid + kWidths * sd);
  const cplx cp = state.weight(Branch::plus);
  const cplx cm = state.weight(Branch::minus);
  return {std::norm(cp), std::norm(cm), cp * std::conj(cm) * overlap};
}

double von_neumann_entropy(const SpinDensity& rho) {
  const auto ev = rho.eigenvalues();
  return entropy_term(ev[0]) + entropy_term(ev[1]);
}

double entanglement_entropy(const SpinorWavepacket& state) {
  return von_neumann_entropy(reduced_spin_density(state));
}

ScreenExtent ScreenExtent::centred(double half_width, double Delta) {
  const double k = std::ceil(std::abs(half_width) / Delta - 0.5);
  return {-(k + 0.5) * Delta, (k + 0.5) * Delta};
}

ScreenExtent ScreenExtent::covering(const SpinorWavepacket& state, double Delta) {
  double reach = 0.0;
  for (Branch b : {Branch::plus, Branch::minus}) {
    reach = std::max(reach, std::abs(state.center(b)) + kWidths * std::sqrt(state.variance(b)));
  }
  return centred(reach, Delta);
}

double ScreenDistribution::mean_information() const {
  double h = 0.0;
  for (std::size_t k = 0; k < X.size(); ++k) h += (P_plus[k] + P_minus[k]) * I[k];
  return h;
}

ScreenDistribution screen_distribution(const SpinorWavepacket& state, const CoarsePixelSpec& pixels,
                                       const ScreenExtent& extent) {
  pixels.validate();
  if (!(extent.hi > extent.lo)) throw DomainError("screen extent must be increasing");
  const double Delta = pixels.Delta;
  const auto n = static_cast<std::size_t>(std::ceil((extent.hi - extent.lo) / Delta - 1e-9));
  ScreenDistribution d{Delta, {}, {}, {}, {}, {}, {}, {}, 0.0};
  const double mu_p = state.center(Branch::plus);
  const double mu_m = state.center(Branch::minus);
  const double sd_p = std::sqrt(state.variance(Branch::plus));
  const double sd_m = std::sqrt(state.variance(Branch::minus));
  const double lw_p = log_weight(state.weight(Branch::plus));
  const double lw_m = log_weight(state.weight(Branch::minus));
  for (std::size_t k = 0; k < n; ++k) {
    const double a = extent.lo + static_cast<double>(k) * Delta;
    const double b = a + Delta;
    const double lp = lw_p + log_gaussian_mass(mu_p, sd_p, a, b);
    const double lm = lw_m + log_gaussian_mass(mu_m, sd_m, a, b);
    const double d_odds = lp - lm;  // nan when both vanish
    double qp = 0.5;
    if (!std::isnan(d_odds)) qp = 1.0 / (1.0 + std::exp(-d_odds));
    const double I = information_from_log_odds(d_odds);
    d.X.push_back(0.5 * (a + b));
    d.P_plus.push_back(std::exp(lp));
    d.P_minus.push_back(std::exp(lm));
    d.q_plus.push_back(qp);
    d.q_minus.push_back(1.0 - qp);
    d.I.push_back(I);
    d.S.push_back(kLn2 - I);
    d.captured += d.P_plus.back() + d.P_minus.back();
  }
  if (d.captured < 1.0 - 1e-8) {
    throw CoverageError("screen extent captures only " + format_double(d.captured) +
                            " of the probability",
                        d.captured);
  }
  return d;
}

double mean_information(const SpinorWavepacket& state, bool fine_limit, double Delta) {
  if (!fine_limit) {
    const CoarsePixelSpec pix{Delta, 1.0};
    return screen_distribution(state, pix, ScreenExtent::covering(state, Delta)).mean_information();
  }
  // H = Int P(x) I(x) dx with I = ln 2 - S(x); equal to the three-entropy form
  // because P integrates to one, and free of its cancellations.
  const auto& gp = state.component(Branch::plus);
  const auto& gm = state.component(Branch::minus);
  const double lw_p = log_weight(state.weight(Branch::plus));
  const double lw_m = log_weight(state.weight(Branch::minus));
  auto integrand = [&](double x) {
    const double lp = lw_p + 2.0 * gp.log_value(x).real();
    const double lm = lw_m + 2.0 * gm.log_value(x).real();
    const double top = std::max(lp, lm);
    if (std::isinf(top)) return 0.0;
    const double P = std::exp(top) * (1.0 + std::exp(std::min(lp, lm) - top));
    return P * information_from_log_odds(lp - lm);
  };
  // Scaled units; break the line at the packet centres so each piece is smooth.
  const double sp = std::sqrt(gp.density_variance());
  const double sm = std::sqrt(gm.density_variance());
  std::vector<double> cuts{gp.center - kWidths * sp, gp.center + kWidths * sp,
                           gm.center - kWidths * sm, gm.center + kWidths * sm, gp.center,
                           gm.center, 0.5 * (gp.center + gm.center)};
  std::sort(cuts.begin(), cuts.end());
  double h = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] > cuts[k]) h += integrate_adaptive(integrand, cuts[k], cuts[k + 1], 1e-10);
  }
  return h;
}

std::vector<InfoPoint> information_series(const PhysicalParams& params,
                                          const std::vector<double>& times, OverlapModel model) {
  const bool closed = equal_weights(params) && params.force != 0.0;
  std::vector<InfoPoint> out;
  out.reserve(times.size());
  for (double t : times) {
    const auto state = evolve_in_field(params, t);
    const double S = closed ? entanglement_entropy(t, derive_scales(params), model).S_ent
                            : entanglement_entropy(state);
    out.push_back({t, mean_information(state), S});
  }
  return out;
}

}  // namespace sgcm
