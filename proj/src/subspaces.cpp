#include "qstar/subspaces.hpp"

#include "qstar/linalg.hpp"

namespace qstar {

ProjectionPair projections(const OperatorSymbol& sym, const KVec& k) {
  ProjectionPair p;
  p.k = k;
  const Mat q = linalg::range_basis(sym.eval(k));
  p.rank1 = static_cast<int>(q.cols());
  p.gamma1 = q * q.adjoint();
  p.gamma2 = Mat::Identity(sym.m(), sym.m()) - p.gamma1;
  return p;
}

WeightedGamma weighted_gamma(const OperatorSymbol& sym, const Mat& weight, const KVec& k) {
  if (weight.rows() != sym.m() || weight.cols() != sym.m())
    throw ValidationError("weight matrix must be m x m");
  const Mat q = linalg::range_basis(sym.eval(k));
  const Mat compressed = q.adjoint() * weight * q;
  const double vnorm = linalg::norm2(weight);
  if (q.cols() > 0) {
    const RVec ev = linalg::hermitian_eigenvalues(compressed);
    if (ev[0] <= 1e-10 * vnorm)
      throw DegenerateWeightError("weight is not positive definite on the range of the symbol", k);
  }
  WeightedGamma w;
  w.k = k;
  w.weight = weight;
  w.gamma = q.cols() ? Mat(q * compressed.inverse() * q.adjoint())
                     : Mat(Mat::Zero(sym.m(), sym.m()));
  w.delta = weight - weight * w.gamma * weight;
  return w;
}

Mat flux_weighted_delta(const OperatorSymbol& sym, const Mat& flux_weight, const KVec& k) {
  const Mat q1 = linalg::range_basis(sym.eval(k));
  const Mat q2 = linalg::complement_basis(q1, sym.m());
  if (q2.cols() == 0) return Mat::Zero(sym.m(), sym.m());
  const Mat compressed = q2.adjoint() * flux_weight * q2;
  return q2 * linalg::pinv(compressed, 1e-12) * q2.adjoint();
}

Mat mixed_constraint_projection(const OperatorSymbol& sym_e, const OperatorSymbol& sym_j,
                                const KVec& k) {
  return Constraint::mixed(sym_e, sym_j).projection(k);
}

Constraint Constraint::potential(OperatorSymbol sym) {
  return Constraint(Kind::potential, std::move(sym), std::nullopt);
}

Constraint Constraint::flux(OperatorSymbol sym) {
  return Constraint(Kind::flux, std::move(sym), std::nullopt);
}

Constraint Constraint::mixed(OperatorSymbol sym_e, OperatorSymbol sym_j) {
  if (sym_e.d() != sym_j.d())
    throw ValidationError("mixed constraint: symbols disagree on spatial dimension");
  return Constraint(Kind::mixed, std::move(sym_e), std::move(sym_j));
}

Constraint Constraint::for_side(OperatorSymbol sym, Side side) {
  return side == Side::potential ? potential(std::move(sym)) : flux(std::move(sym));
}

int Constraint::m() const {
  return kind_ == Kind::mixed ? first_.m() + second_->m() : first_.m();
}

bool Constraint::homogeneous() const {
  return first_.homogeneous() && (!second_ || second_->homogeneous());
}

Mat Constraint::basis(const KVec& k) const {
  switch (kind_) {
    case Kind::potential:
      return linalg::range_basis(first_.eval(k));
    case Kind::flux:
      return linalg::complement_basis(linalg::range_basis(first_.eval(k)), first_.m());
    case Kind::mixed: {
      const Mat qe = linalg::range_basis(first_.eval(k));
      const Mat qj = linalg::complement_basis(linalg::range_basis(second_->eval(k)),
                                              second_->m());
      const Eigen::Index n = first_.m(), mj = second_->m();
      Mat out = Mat::Zero(n + mj, qe.cols() + qj.cols());
      out.topLeftCorner(n, qe.cols()) = qe;
      out.bottomRightCorner(mj, qj.cols()) = qj;
      return out;
    }
  }
  return {};
}

Mat Constraint::projection(const KVec& k) const {
  const Mat q = basis(k);
  return q * q.adjoint();
}

OperatorSymbol adjoint_symbol(const OperatorSymbol& sym) {
  std::vector<Polynomial> entries;
  entries.reserve(static_cast<std::size_t>(sym.ell() * sym.m()));
  for (int q = 0; q < sym.ell(); ++q)
    for (int r = 0; r < sym.m(); ++r) {
      Polynomial p(sym.d());
      for (const auto& [e, c] : sym.entry(r, q).terms()) p.add_term(e, std::conj(c));
      entries.push_back(std::move(p));
    }
  return OperatorSymbol(sym.d(), sym.m(), sym.ell(), std::move(entries));
}

}  // namespace qstar
