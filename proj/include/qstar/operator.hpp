#pragma once

#include <map>
#include <optional>
#include <vector>

#include "qstar/polynomial.hpp"
#include "qstar/types.hpp"

namespace qstar {

/// One derivative coefficient A_{rq h}^{a_1..a_h}. Indices are zero-based
/// here; the JSON format uses one-based indices.
struct DerivCoeff {
  int r = 0;
  int q = 0;
  std::vector<int> idx;  // a_1..a_h, each in [0, d)
  cplx value;
};

/// Constant-coefficient differential operator
///   L_rq = A_rq + sum_h sum_a A_rqh^{a_1..a_h} d/dx_{a_1} ... d/dx_{a_h}.
struct OperatorSpec {
  int d = 0;
  int ell = 0;
  int m = 0;
  int t = 0;
  Mat zero_order;  // m x ell
  std::vector<DerivCoeff> deriv_coeffs;

  void validate() const;
};

/// Polynomial matrix symbol k -> L(k) (m x ell). This is the canonical
/// operator representation; OperatorSpec is just one way to build it.
class OperatorSymbol {
 public:
  OperatorSymbol(int d, int ell, int m, std::vector<Polynomial> entries);

  int d() const { return d_; }
  int ell() const { return ell_; }
  int m() const { return m_; }
  const Polynomial& entry(int r, int q) const { return entries_[r * ell_ + q]; }
  const std::vector<Polynomial>& entries() const { return entries_; }

  bool conjugate_symmetric() const { return conj_sym_; }
  /// True when every term has the same nonzero total degree, so the
  /// constraint subspaces depend on the direction of k only.
  bool homogeneous() const { return homogeneous_; }
  int degree() const { return degree_; }

  Mat eval(const KVec& k) const;
  Mat eval_adjoint(const KVec& k) const;
  /// Zero-order coefficient matrix A (the symbol at k = 0).
  Mat zero_order() const;

  const std::optional<OperatorSpec>& spec() const { return spec_; }
  void set_spec(OperatorSpec s) { spec_ = std::move(s); }

 private:
  int d_, ell_, m_;
  std::vector<Polynomial> entries_;
  bool conj_sym_ = false;
  bool homogeneous_ = false;
  int degree_ = 0;
  std::optional<OperatorSpec> spec_;
};

OperatorSymbol symbol_from_spec(const OperatorSpec& spec);

/// Rows of polynomials, entries[r][q]. Throws on ragged input.
OperatorSymbol symbol_from_polynomials(
    const std::vector<std::vector<Polynomial>>& entries);

enum class Side { potential, flux };  // S (tested on E_k) or T (tested on J_k)

const char* side_name(Side s);
Side parse_side(const std::string& s);

class QuadraticForm {
 public:
  /// Stores the Hermitian part (M + M^*)/2. A warning is written to stderr
  /// when the correction exceeds 1e-9 relative.
  QuadraticForm(Mat mat, Side side);

  const Mat& mat() const { return mat_; }
  Side side() const { return side_; }
  int m() const { return static_cast<int>(mat_.rows()); }
  /// Spectral norm.
  double norm() const { return norm_; }
  double hermitian_correction() const { return correction_; }

  /// f(H) = sum conj(H_r) S_rs H_s.
  double apply(const Vec& h) const;

  QuadraticForm scaled(double c) const;

 private:
  Mat mat_;
  Side side_;
  double norm_ = 0.0;
  double correction_ = 0.0;
};

/// Polynomial potential U^0_q(x) = sum_beta B_{q,beta} x^beta.
struct PolynomialPotential {
  int ell = 0;
  std::vector<Polynomial> components;  // polynomials in x
};

/// Applies the differential operator with the given symbol to a polynomial
/// potential. A symbol term c k^a corresponds to c (-i)^{|a|} d^a.
std::vector<Polynomial> apply_operator(const OperatorSymbol& sym,
                                       const PolynomialPotential& u);

struct ConstantFieldSpace {
  Mat basis;  // m x dim, orthonormal columns
  std::vector<PolynomialPotential> potentials;  // one per basis column
  int max_degree = 0;
};

/// Space E^0 of constant fields L U^0 over polynomial potentials of degree
/// at most the operator order.
ConstantFieldSpace constant_field_space(const OperatorSymbol& sym);

}  // namespace qstar
