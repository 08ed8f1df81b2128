#pragma once

// Spin entanglement and what a screen of finite resolution learns about the spin.
// All entropies are in nats; to_bits converts.

#include <array>
#include <vector>

#include "sgcm/dynamics.hpp"
#include "sgcm/phase_space.hpp"

namespace sgcm {

// Which overlap factor feeds the closed-form entropy.
//   reference: A(t) = exp(-t^2 (t^2 + tau2^2) / tau1^4), the form the standard
//              entropy curve is quoted with.
//   exact: |<phi_-|phi_+>| = exp(-t^2 (t^2 + 4 tau2^2) / tau1^4), the overlap of
//          the closed-form packets.
enum class OverlapModel { reference, exact };

double overlap_factor(double t, const DerivedScales& scales, OverlapModel model = OverlapModel::reference);

// ln 2 - (1+A)/2 ln(1+A) - (1-A)/2 ln(1-A), the entropy of eigenvalues (1 +- A)/2.
double binary_overlap_entropy(double A);

struct EntanglementPoint {
  double t;
  double A;
  double S_ent;
};

// Closed form for equal weights. Throws DomainError for t < 0.
EntanglementPoint entanglement_entropy(double t, const DerivedScales& scales,
                                       OverlapModel model = OverlapModel::reference);

std::vector<EntanglementPoint> entanglement_series(const std::vector<double>& times,
                                                   const DerivedScales& scales,
                                                   OverlapModel model = OverlapModel::reference);

// 2x2 Hermitian matrix [[rho_pp, rho_pm], [conj(rho_pm), rho_mm]].
struct SpinDensity {
  double pp;
  double mm;
  cplx pm;

  std::array<double, 2> eigenvalues() const;  // ascending
};

// Diagonal |c+-|^2, off-diagonal c+ conj(c-) <phi_-|phi_+> with the overlap
// integrated by adaptive Gauss-Kronrod quadrature.
SpinDensity reduced_spin_density(const SpinorWavepacket& state);

double von_neumann_entropy(const SpinDensity& rho);

// Entropy of the reduced spin density; valid for any weights.
double entanglement_entropy(const SpinorWavepacket& state);

inline double to_bits(double nats) { return nats / kLn2; }

// Pixels of width Delta tiling [lo, hi]; the last one may reach past hi.
struct ScreenExtent {
  double lo;  // m
  double hi;  // m

  // Symmetric extent with one pixel centred on X = 0.
  static ScreenExtent centred(double half_width, double Delta);
  // Extent holding both packets out to 12 standard deviations.
  static ScreenExtent covering(const SpinorWavepacket& state, double Delta);
};

struct ScreenDistribution {
  double Delta;  // m
  std::vector<double> X;
  std::vector<double> P_plus;
  std::vector<double> P_minus;
  std::vector<double> q_plus;
  std::vector<double> q_minus;
  std::vector<double> S;  // conditional spin entropy, nats
  std::vector<double> I;  // ln 2 - S, nats
  double captured;        // sum of P_plus + P_minus

  // Sum of P(X) I(X).
  double mean_information() const;
};

// Pixel probabilities from closed-form Gaussian integrals. Throws CoverageError
// when the extent captures less than 1 - 1e-8 of the probability.
ScreenDistribution screen_distribution(const SpinorWavepacket& state, const CoarsePixelSpec& pixels,
                                       const ScreenExtent& extent);

// Mean information per event. fine_limit: the continuum integrals
// ln 2 - Int P ln P + Int P+ ln P+ + Int P- ln P-; otherwise the pixel sum
// with pixels of width Delta centred on X = 0.
double mean_information(const SpinorWavepacket& state, bool fine_limit = true, double Delta = 1e-6);

struct InfoPoint {
  double t;
  double H;
  double S_ent;
};

// Mean information and entanglement entropy along a time sweep inside the field.
std::vector<InfoPoint> information_series(const PhysicalParams& params,
                                          const std::vector<double>& times,
                                          OverlapModel model = OverlapModel::reference);

}  // namespace sgcm
