#pragma once

#include "qstar/types.hpp"

namespace qstar::linalg {

inline constexpr double kRankCutoff = 1e-12;

/// Orthonormal basis of the column space of a, keeping singular values
/// above rel * sigma_max.
Mat range_basis(const Mat& a, double rel = kRankCutoff);

/// Orthonormal basis of the null space of a (same cutoff convention).
Mat null_basis(const Mat& a, double rel = kRankCutoff);

/// Orthonormal basis of the orthogonal complement of span(q) in C^n, where q
/// has orthonormal columns.
Mat complement_basis(const Mat& q, int n);

/// Eigenvalues (ascending) of the Hermitian part of a.
RVec hermitian_eigenvalues(const Mat& a);

/// Moore-Penrose pseudo-inverse with singular-value cutoff rel * sigma_max.
Mat pinv(const Mat& a, double rel = kRankCutoff);

/// Spectral norm.
double norm2(const Mat& a);

/// Orthonormal basis of the intersection of two subspaces given by
/// orthonormal bases (columns).
Mat intersect(const Mat& qa, const Mat& qb, double tol = 1e-9);

/// Largest distance of a unit vector of span(a) from span(b); 0 when
/// span(a) is contained in span(b). Both bases orthonormal.
double subspace_excess(const Mat& a, const Mat& b);

}  // namespace qstar::linalg
