#pragma once

#include <string>
#include <vector>

#include "qstar/search.hpp"
#include "qstar/subspaces.hpp"

namespace qstar {

enum class Verdict { strictly_positive, marginal_sharp, marginal_limit, violated };

const char* verdict_name(Verdict v);
Verdict parse_verdict(const std::string& s);

struct Certificate {
  Verdict verdict = Verdict::violated;
  double min_value = 0.0;
  std::vector<KVec> witness_k;
  std::vector<int> equality_dims;  // aligned with witness_k
  bool attained = false;
  double form_norm = 0.0;
  std::size_t samples = 0;
};

/// Smallest eigenvalue of the form compressed to the constraint subspace at
/// k; +inf when the subspace is trivial.
double projected_min_eigenvalue(const Constraint& c, const QuadraticForm& form, const KVec& k);

Certificate certify(const Constraint& c, const QuadraticForm& form, const SearchConfig& cfg = {});
/// Constraint chosen by the side of the form.
Certificate certify(const OperatorSymbol& sym, const QuadraticForm& form,
                    const SearchConfig& cfg = {});

struct EqualitySubspace {
  Mat basis;              // orthonormal columns spanning S_k (or T_k)
  double residual = 0.0;  // max ||P_c form H|| over basis vectors, relative to ||form||
};

/// Null vectors of the compressed form at k. Throws NotPsdError when the
/// compressed form has an eigenvalue below -tol.
EqualitySubspace equality_subspace(const Constraint& c, const QuadraticForm& form,
                                   const KVec& k, double tol_eig = 1e-9);
EqualitySubspace equality_subspace(const OperatorSymbol& sym, const QuadraticForm& form,
                                   const KVec& k, double tol_eig = 1e-9);

/// U_k = { G : L(k) G in S_k }; potential side only.
Mat potential_equality_lift(const OperatorSymbol& sym, const QuadraticForm& form,
                            const KVec& k, double tol_eig = 1e-9);

}  // namespace qstar
