#include "qstar/linalg.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qstar::linalg {

Mat range_basis(const Mat& a, double rel) {
  if (a.size() == 0) return Mat(a.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU);
  const RVec& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  Eigen::Index r = 0;
  if (smax > 0.0)
    while (r < s.size() && s[r] > rel * smax) ++r;
  return svd.matrixU().leftCols(r);
}

Mat null_basis(const Mat& a, double rel) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const RVec& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  Eigen::Index r = 0;
  if (smax > 0.0)
    while (r < s.size() && s[r] > rel * smax) ++r;
  return svd.matrixV().rightCols(n - r);
}

Mat complement_basis(const Mat& q, int n) {
  if (q.cols() == 0) return Mat::Identity(n, n);
  Mat proj = Mat::Identity(n, n) - q * q.adjoint();
  // The complement of a rank-r orthonormal set has dimension n - r exactly.
  Eigen::JacobiSVD<Mat> svd(proj, Eigen::ComputeFullU);
  return svd.matrixU().leftCols(n - q.cols());
}

RVec hermitian_eigenvalues(const Mat& a) {
  if (a.rows() == 0) return RVec(0);
  Mat h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Mat pinv(const Mat& a, double rel) {
  if (a.size() == 0) return Mat(a.cols(), a.rows());
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  RVec inv = RVec::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (smax > 0.0 && s[i] > rel * smax) inv[i] = 1.0 / s[i];
  return svd.matrixV() * inv.cast<cplx>().asDiagonal() * svd.matrixU().adjoint();
}

double norm2(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()[0];
}

Mat intersect(const Mat& qa, const Mat& qb, double tol) {
  const Eigen::Index n = qa.rows();
  if (qa.cols() == 0 || qb.cols() == 0) return Mat(n, 0);
  // x = qa y lies in span(qb) iff (I - qb qb^*) qa y = 0.
  Mat resid = qa - qb * (qb.adjoint() * qa);
  Eigen::JacobiSVD<Mat> svd(resid, Eigen::ComputeFullV);
  const RVec& s = svd.singularValues();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < qa.cols(); ++i) {
    const double si = i < s.size() ? s[i] : 0.0;
    if (si <= tol) keep.push_back(i);
  }
  Mat out(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = qa * svd.matrixV().col(keep[j]);
  return range_basis(out, 1e-8);
}

double subspace_excess(const Mat& a, const Mat& b) {
  if (a.cols() == 0) return 0.0;
  Mat resid = a - b * (b.adjoint() * a);
  return norm2(resid);
}

}  // namespace qstar::linalg
