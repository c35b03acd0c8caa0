#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qstar/certify.hpp"
#include "qstar/polynomial.hpp"

namespace qstar {

enum class SupStatus { finite, unbounded, zero };

const char* sup_status_name(SupStatus s);

/// One rank-one reduction: alpha (or beta) is the supremum over k != 0 of the
/// weighted Rayleigh quotient of `vec`, with the maximizer set.
struct ReductionStep {
  Vec vec;
  double value = 0.0;  // alpha or beta
  std::vector<KVec> maximizers;
  bool attained = false;
  Side side = Side::potential;
  SupStatus status = SupStatus::finite;
};

/// v . Gamma(k) v for the current weight (potential side) or w . Delta(k) w
/// for the current flux form (flux side), with inverses taken on the
/// constraint subspace. Returns +inf when the range condition fails at k.
double weighted_quotient(const Constraint& c, const Mat& weight, const Vec& v, const KVec& k);

/// Supremum of v . Gamma(k) v over k != 0, with V the current potential-side
/// weight. Signals SupStatus::unbounded instead of throwing.
ReductionStep sup_gamma(const OperatorSymbol& sym, const QuadraticForm& weight, const Vec& v,
                        const SearchConfig& cfg = {});

/// Supremum of w . Delta(k) w over k != 0. `flux_form` is the current flux
/// quadratic form W = V^{-1}; Delta = Gamma_2 (Gamma_2 W Gamma_2)^{-1} Gamma_2.
ReductionStep sup_delta(const OperatorSymbol& sym, const QuadraticForm& flux_form, const Vec& w,
                        const SearchConfig& cfg = {});

/// Either of the above, selected by the side of `current`.
ReductionStep sup_reduction(const OperatorSymbol& sym, const QuadraticForm& current,
                            const Vec& direction, const SearchConfig& cfg = {});

struct ReducedForm {
  QuadraticForm form;
  ReductionStep step;
};

/// current - d d^* / alpha. Throws UnboundedSupremumError or NotAttainedError.
ReducedForm reduce_once(const OperatorSymbol& sym, const QuadraticForm& current,
                        const Vec& direction, const SearchConfig& cfg = {});

struct ExtremalOptions {
  int n_probe = 32;
  int max_auto_steps = 8;
  std::uint64_t seed = 0;
  /// Search configuration for probe directions (coarser than the main one).
  std::optional<SearchConfig> probe_cfg;
};

struct ExtremalForm {
  QuadraticForm base;
  std::vector<ReductionStep> steps;
  QuadraticForm result;
  bool extremal = false;   // every probe direction gave an unbounded supremum
  int probes_unbounded = 0;
  int probes_total = 0;
};

/// Applies the supplied directions in order; with no directions, reduction
/// directions are drawn from seeded random probes. Finishes with an
/// extremality probe.
ExtremalForm generate_extremal(const OperatorSymbol& sym, const QuadraticForm& base,
                               const std::vector<Vec>& directions, const SearchConfig& cfg = {},
                               const ExtremalOptions& opt = {});

struct PotentialPolynomial {
  Polynomial q;               // scalar multiplier
  std::vector<Polynomial> p;  // ell components
  double residual = 0.0;      // max relative mismatch at validation points
};

/// Lowest-degree scalar polynomial q and polynomial vector P with
/// P(k) = q(k) (L^* V L)^{-1} L^* v (potential side) or
/// P(k) = -q(k) (L^* V L)^{-1} L^* V w (flux side).
/// Throws NonPolynomialError when no pair exists up to deg det(L^* V L).
PotentialPolynomial potential_polynomial(const OperatorSymbol& sym, const Mat& weight,
                                         const Vec& vec, Side side, std::uint64_t seed = 0);

/// (L^* V L)^{-1} L^* v (or -(...) L^* V w) at one k.
Vec potential_direction(const OperatorSymbol& sym, const Mat& weight, const Vec& vec, Side side,
                        const KVec& k);

}  // namespace qstar
