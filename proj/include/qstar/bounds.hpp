#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qstar/fields.hpp"

namespace qstar {

/// Shape of Omega inside the cell, centered at the cell center.
///   ball: radius = param * shortest cell edge
///   box:  side   = param * each cell edge (in fractional coordinates)
struct MaskGeometry {
  std::string kind = "ball";
  double param = 0.3;
};

/// Parses "ball:0.3" or "box:0.5".
MaskGeometry parse_omega(const std::string& text);

struct DomainMask {
  MaskGeometry geometry;
  std::vector<int> shape;
  std::vector<std::uint8_t> inside;
  double volume_fraction = 0.0;

  Eigen::Index count() const;
};

/// Throws ValidationError when Omega is empty or covers the whole cell.
DomainMask make_mask(const MaskGeometry& geom, const ReciprocalLattice& lattice,
                     const std::vector<int>& shape);

/// Points whose L-infinity grid neighbourhood of the given radius lies in Omega.
DomainMask erode(const DomainMask& mask, int layers);

/// Central-difference realization of a constant-coefficient operator on the
/// periodic grid. Each axis difference is scaled so that the discrete
/// wavevector equals the exact one for |n_i| = nbar_i; the special field's
/// modes therefore see the continuous symbol exactly.
class DiscreteOperator {
 public:
  DiscreteOperator(OperatorSymbol sym, const ReciprocalLattice& lattice, std::vector<int> shape,
                   std::vector<int> nbar = {});

  const OperatorSymbol& symbol() const { return sym_; }
  int order() const { return sym_.degree(); }
  /// Input: ell x npoints potential. Output: m x npoints field.
  Mat apply(const Mat& potential) const;
  /// k~ with D_x exp(2 pi i n.s) = i k~ exp(2 pi i n.s).
  KVec effective_wavevector(const std::vector<int>& n) const;
  /// Rough operator norm bound used to make residuals relative.
  double scale() const;

 private:
  Vec axis_difference(const Vec& f, int axis) const;
  Vec x_derivative(const Vec& f, int a) const;

  OperatorSymbol sym_;
  RMat basis_;
  std::vector<int> shape_;
  std::vector<double> coef_;
  std::vector<Eigen::Index> stride_;
};

struct AncillaryResult {
  bool ok = false;
  double residual = 0.0;
  std::string detail;
};

/// S side: S A = 0 with A the zero-order coefficients. T side: range T in
/// the constant-field space.
AncillaryResult ancillary_check(const OperatorSymbol& sym, const QuadraticForm& form);

struct F0Estimate {
  double value = 0.0;      // integral over Omega on the given grid
  double refined = 0.0;    // same on the doubled grid
  double rel_change = 0.0; // change of the Omega-average under doubling, relative to the form scale
};

/// Masked quadrature of f over Omega for the special field, with a
/// grid-doubling estimate.
F0Estimate f0_volume(const QuadraticForm& form, const FourierField& special,
                     const DomainMask& mask, Exec exec = Exec::parallel);

struct Competitor {
  std::string id;
  Mat field;      // m x npoints
  Mat potential;  // perturbation potential (ell or flux-potential components)
};

/// Smooth bump supported in `support`, times a random low-mode trigonometric
/// polynomial. Columns are grid points.
Mat bump_potential(int components, const DomainMask& support, const ReciprocalLattice& lattice,
                   std::uint64_t seed, bool real);

/// E = E_special + L phi with phi supported in Omega eroded by the guard band.
Competitor competitor_E(const DiscreteOperator& l, const Mat& special, const DomainMask& mask,
                        const ReciprocalLattice& lattice, std::uint64_t seed, bool real);

/// J = J_special + M psi, with M a flux potential (L^*(k) M(k) = 0).
Competitor competitor_J(const DiscreteOperator& flux_potential, const Mat& special,
                        const DomainMask& mask, const ReciprocalLattice& lattice,
                        std::uint64_t seed, bool real);

struct BoundReport {
  std::string competitor_id;
  double f0 = 0.0;
  double lhs = 0.0;
  double margin = 0.0;
  double correction = 0.0;  // |C| [f(<E>) - f(<E_special>)], used when ancillary fails
  double scale = 0.0;
  bool ancillary_ok = false;
  bool equality_case = false;
  double average_mismatch = 0.0;     // |<F> - <F_special>| / rms(F_special)
  double constraint_residual = 0.0;  // discrete L^* residual of J competitors
};

struct BoundOptions {
  int n_competitors = 50;
  std::uint64_t seed = 0;
  /// Flux potential M with L^*(k) M(k) = 0, required on the T side.
  std::optional<OperatorSymbol> flux_potential;
  Exec exec = Exec::parallel;
};

struct BoundSummary {
  F0Estimate f0;
  AncillaryResult ancillary;
  int guard_layers = 0;
  bool exact_wavenumber = true;
  std::vector<BoundReport> reports;  // reports[0] is the unperturbed special field
};

/// Verifies the sharp bound on Omega: lhs >= f0 (+ correction when the
/// ancillary condition fails) for each competitor.
BoundSummary verify_bound(const OperatorSymbol& sym, const QuadraticForm& form,
                          const FourierField& special, const DomainMask& mask,
                          const BoundOptions& opt = {});

/// Throws UnsupportedError unless L^*(k) M(k) vanishes at random k.
void check_flux_potential(const OperatorSymbol& sym, const OperatorSymbol& potential,
                          std::uint64_t seed = 0);

}  // namespace qstar
