#pragma once

#include <optional>

#include "qstar/operator.hpp"

namespace qstar {

struct ProjectionPair {
  KVec k;
  Mat gamma1;  // onto E_k = range L(k)
  Mat gamma2;  // onto J_k = null L^*(k)
  int rank1 = 0;
};

ProjectionPair projections(const OperatorSymbol& sym, const KVec& k);

struct WeightedGamma {
  KVec k;
  Mat gamma;  // Gamma_1 (Gamma_1 V Gamma_1)^{-1} Gamma_1, inverse taken on E_k
  Mat delta;  // V - V Gamma V
  Mat weight;
};

/// Throws DegenerateWeightError when V is not positive definite on E_k
/// (smallest compressed eigenvalue <= 1e-10 ||V||).
WeightedGamma weighted_gamma(const OperatorSymbol& sym, const Mat& weight, const KVec& k);

/// Gamma_2 (Gamma_2 W Gamma_2)^{-1} Gamma_2 with the inverse on J_k. For
/// W = V^{-1} this is the same matrix as WeightedGamma::delta.
Mat flux_weighted_delta(const OperatorSymbol& sym, const Mat& flux_weight, const KVec& k);

/// Projection onto range(L_E(k)) (+) null(L_J^*(k)), block diagonal.
Mat mixed_constraint_projection(const OperatorSymbol& sym_e, const OperatorSymbol& sym_j,
                                const KVec& k);

/// The Fourier-mode constraint subspace a quadratic form is tested on.
class Constraint {
 public:
  enum class Kind { potential, flux, mixed };

  /// E_k = range L(k).
  static Constraint potential(OperatorSymbol sym);
  /// J_k = null L^*(k).
  static Constraint flux(OperatorSymbol sym);
  /// range L_E(k) (+) null L_J^*(k).
  static Constraint mixed(OperatorSymbol sym_e, OperatorSymbol sym_j);
  /// Potential or flux constraint according to the side of a form.
  static Constraint for_side(OperatorSymbol sym, Side side);

  Kind kind() const { return kind_; }
  int d() const { return first_.d(); }
  int m() const;
  bool homogeneous() const;

  /// Orthonormal basis (columns) of the constraint subspace at k.
  Mat basis(const KVec& k) const;
  Mat projection(const KVec& k) const;

  const OperatorSymbol& symbol() const { return first_; }
  const std::optional<OperatorSymbol>& second() const { return second_; }

 private:
  Constraint(Kind kind, OperatorSymbol first, std::optional<OperatorSymbol> second)
      : kind_(kind), first_(std::move(first)), second_(std::move(second)) {}

  Kind kind_;
  OperatorSymbol first_;
  std::optional<OperatorSymbol> second_;
};

/// Adjoint symbol k -> L(k)^* as a polynomial matrix (ell x m).
OperatorSymbol adjoint_symbol(const OperatorSymbol& sym);

}  // namespace qstar
