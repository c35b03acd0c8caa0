#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qstar/extremal.hpp"

namespace qstar {

/// Rows of `basis` are the primitive reciprocal vectors b_1..b_d. The direct
/// cell vectors a_i satisfy a_i . b_j = 2 pi delta_ij.
struct ReciprocalLattice {
  RMat basis;
  double cell_volume = 0.0;

  static ReciprocalLattice from_basis(const RMat& basis);
  int d() const { return static_cast<int>(basis.rows()); }
  /// Rows a_1..a_d of the direct cell.
  RMat direct() const;
  KVec wavevector(const std::vector<int>& n) const;
};

/// Smallest lattice we can build whose integer span contains every kstar:
/// b_1 is the first kstar, the rest complete an orthogonal frame of the same
/// length, and b_j is subdivided when a later kstar needs a rational
/// coordinate. Throws NoCommonLatticeError for incommensurable kstars.
ReciprocalLattice lattice_containing(const std::vector<KVec>& kstars);

enum class FieldKind { E, J, U };

const char* field_kind_name(FieldKind k);
FieldKind parse_field_kind(const std::string& s);

using ModeIndex = std::vector<int>;

/// Finite Fourier series constant + sum_n mode(n) exp(i k_n . x). The modes
/// at +n and -n are separate entries; a real field stores conjugate pairs.
struct FourierField {
  ReciprocalLattice lattice;
  FieldKind kind = FieldKind::E;
  Vec constant;
  std::map<ModeIndex, Vec> modes;

  FourierField() = default;
  FourierField(ReciprocalLattice lat, FieldKind kind, int dim);

  int dim() const { return static_cast<int>(constant.size()); }
  void set_mode(const ModeIndex& n, const Vec& v);
  /// Largest |n_j| over stored modes, per axis.
  std::vector<int> max_index() const;
  bool is_real(double tol = 1e-12) const;
  /// Value at fractional cell coordinates s (x = sum s_i a_i).
  Vec eval_frac(const RVec& s) const;
  /// Value at a physical point x.
  Vec eval(const RVec& x) const;
  /// sum |constant|^2 + sum |mode|^2, the mean square over the cell.
  double mean_square() const;
};

/// Samples on the regular grid s_i = j_i / N_i; point index is row-major
/// with the last axis fastest.
struct GridField {
  std::vector<int> shape;
  RMat cell;   // direct cell rows
  Mat values;  // dim x npoints

  int dim() const { return static_cast<int>(values.rows()); }
  Eigen::Index npoints() const { return values.cols(); }
};

Eigen::Index grid_size(const std::vector<int>& shape);
std::vector<int> grid_coords(const std::vector<int>& shape, Eigen::Index idx);
Eigen::Index grid_index(const std::vector<int>& shape, const std::vector<int>& coords);

/// Throws AliasingError unless N_j >= 2 max|n_j| + 1 on every axis.
void check_aliasing(const FourierField& f, const std::vector<int>& shape);

GridField to_grid_serial(const FourierField& f, const std::vector<int>& shape);
GridField to_grid_parallel(const FourierField& f, const std::vector<int>& shape);
GridField to_grid(const FourierField& f, const std::vector<int>& shape, Exec exec = Exec::parallel);

/// <f(F)> by Parseval: f(constant) + sum over stored modes f(mode).
double form_average(const QuadraticForm& form, const FourierField& f);
/// <f(F)> by grid quadrature.
double form_average(const QuadraticForm& form, const GridField& g);
Vec field_average(const FourierField& f);
Vec field_average(const GridField& g);

struct SpecialFields {
  FourierField u;  // periodic part of the potential (ell components)
  FourierField e;
  FourierField j;
};

/// General form: explicit modes E(n) that must lie in the equality subspace
/// of S at k_n. E0 is projected onto the constant-field space.
SpecialFields synthesize_special_E(const OperatorSymbol& sym, const QuadraticForm& s,
                                   const ReciprocalLattice& lattice,
                                   const std::map<ModeIndex, Vec>& modes, const Vec& e0);

/// Rank-one form: S = V - v v^* / alpha and E(n) = a(n) Gamma(k_n) v, where
/// every n with a(n) != 0 must be a maximizer of v . Gamma(k) v.
SpecialFields synthesize_special_E(const OperatorSymbol& sym, const QuadraticForm& v_form,
                                   const ReductionStep& step, const ReciprocalLattice& lattice,
                                   const std::map<ModeIndex, cplx>& a, const Vec& e0);

/// Flux side: J(n) in the equality subspace of T at k_n, E(n) = T J(n),
/// potential lifted by the minimum-norm solve.
SpecialFields synthesize_special_J(const OperatorSymbol& sym, const QuadraticForm& t,
                                   const ReciprocalLattice& lattice,
                                   const std::map<ModeIndex, Vec>& modes, const Vec& j0);

/// Rank-one flux form: T = W - w w^* / beta and J(n) = b(n) Delta(k_n) w.
SpecialFields synthesize_special_J(const OperatorSymbol& sym, const QuadraticForm& w_form,
                                   const ReductionStep& step, const ReciprocalLattice& lattice,
                                   const std::map<ModeIndex, cplx>& b, const Vec& j0);

/// Random periodic field obeying the constraint of `side` (E: range L(k),
/// J: null L^*(k)) with n_modes random wavevectors.
FourierField random_admissible(const OperatorSymbol& sym, const ReciprocalLattice& lattice,
                               FieldKind side, int n_modes, std::uint64_t seed, bool real);

/// Largest relative mode-wise constraint violation: ||(I - Gamma_1)E(n)|| for
/// E fields, ||L^*(k_n) J(n)|| / ||L(k_n)|| for J fields.
double constraint_residual(const OperatorSymbol& sym, const FourierField& f);

/// Symbol applied mode-wise to a potential field: (L U)(n) = L(k_n) U(n).
FourierField apply_symbol(const OperatorSymbol& sym, const FourierField& u, FieldKind kind);

}  // namespace qstar
