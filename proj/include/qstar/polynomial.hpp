#pragma once

#include <map>
#include <string>
#include <vector>

#include "qstar/types.hpp"

namespace qstar {

/// Exponent vector (e_1, ..., e_d) of a monomial k_1^e_1 ... k_d^e_d.
using Exponents = std::vector<int>;

/// Sparse multivariate polynomial in d real variables with complex
/// coefficients. Terms with zero coefficient are never stored.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int dim) : dim_(dim) {}

  static Polynomial constant(int dim, cplx c);
  /// c * k_var
  static Polynomial variable(int dim, int var, cplx c = 1.0);

  int dim() const { return dim_; }
  const std::map<Exponents, cplx>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Adds c * k^e to the polynomial.
  void add_term(const Exponents& e, cplx c);

  cplx operator()(const KVec& k) const;

  int degree() const;
  /// Smallest total degree among stored terms (0 for the zero polynomial).
  int min_degree() const;
  cplx coeff(const Exponents& e) const;

  /// Conjugate symmetry P(-k) == conj(P(k)) for all k: even-degree
  /// coefficients real, odd-degree coefficients purely imaginary.
  bool conjugate_symmetric(double tol = 0.0) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(cplx c) const;

  /// Drops terms whose magnitude is below rel * max|coeff|.
  Polynomial pruned(double rel) const;

  std::string to_string() const;

 private:
  int dim_ = 0;
  std::map<Exponents, cplx> terms_;
};

/// All exponent vectors in `dim` variables with total degree <= max_degree,
/// ordered by total degree then lexicographically descending.
std::vector<Exponents> monomials_up_to(int dim, int max_degree);

/// Evaluates k^e.
double monomial_value(const Exponents& e, const KVec& k);

}  // namespace qstar
