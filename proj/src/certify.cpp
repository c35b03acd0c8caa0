#include "qstar/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "qstar/linalg.hpp"

namespace qstar {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::strictly_positive: return "strictly-positive";
    case Verdict::marginal_sharp: return "marginal-sharp";
    case Verdict::marginal_limit: return "marginal-limit";
    case Verdict::violated: return "violated";
  }
  return "?";
}

Verdict parse_verdict(const std::string& s) {
  for (Verdict v : {Verdict::strictly_positive, Verdict::marginal_sharp,
                    Verdict::marginal_limit, Verdict::violated})
    if (s == verdict_name(v)) return v;
  throw ValidationError("unknown verdict '" + s + "'");
}

double projected_min_eigenvalue(const Constraint& c, const QuadraticForm& form, const KVec& k) {
  const Mat q = c.basis(k);
  if (q.cols() == 0) return std::numeric_limits<double>::infinity();
  return linalg::hermitian_eigenvalues(q.adjoint() * form.mat() * q)[0];
}

namespace {

int equality_dim_at(const Constraint& c, const QuadraticForm& form, const KVec& k, double tol) {
  const Mat q = c.basis(k);
  if (q.cols() == 0) return 0;
  const RVec ev = linalg::hermitian_eigenvalues(q.adjoint() * form.mat() * q);
  return static_cast<int>((ev.array().abs() <= tol).count());
}

}  // namespace

Certificate certify(const Constraint& c, const QuadraticForm& form, const SearchConfig& cfg) {
  cfg.validate();
  if (form.m() != c.m()) throw ValidationError("form dimension does not match the constraint");
  const bool homog = c.homogeneous();
  const auto points = sample_points(c.d(), homog, cfg);
  auto fn = [&](const KVec& k) { return projected_min_eigenvalue(c, form, k); };
  const auto values = scan(points, fn, cfg.exec);

  if (std::none_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }))
    throw DegenerateConstraintError("constraint subspace is empty at every sampled k");

  Certificate cert;
  cert.form_norm = form.norm();
  cert.samples = points.size();
  const double tol = cfg.tol_eig * std::max(form.norm(), 1e-300);

  RefineOptions opt;
  opt.on_sphere = homog;
  opt.r_min = cfg.r_min;
  opt.r_max = cfg.r_max;
  opt.iters = cfg.refine_iters;

  struct Cand {
    KVec k;
    double v;
    bool boundary;
  };
  std::vector<Cand> cands;
  for (std::size_t i : best_indices(values, static_cast<std::size_t>(cfg.n_refine), false)) {
    const RefineResult r = refine(fn, points[i], opt);
    if (std::isfinite(r.value) && r.value <= values[i])
      cands.push_back({r.k, r.value, r.at_radial_bound});
    else
      cands.push_back({points[i], values[i], false});
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.v < b.v; });
  cert.min_value = cands.front().v;

  std::vector<KVec> near;
  std::vector<bool> near_boundary;
  for (const auto& cd : cands)
    if (cd.v <= cert.min_value + std::max(tol, cfg.tol_cluster * std::abs(cert.min_value))) {
      near.push_back(cd.k);
      near_boundary.push_back(cd.boundary);
    }
  cert.witness_k = cluster_points(near, cfg.cluster_radius);
  cert.attained = homog;
  if (!homog)
    for (std::size_t i = 0; i < near.size(); ++i)
      if (!near_boundary[i]) cert.attained = true;
  for (const auto& k : cert.witness_k) cert.equality_dims.push_back(equality_dim_at(c, form, k, tol));

  if (cert.min_value < -tol) {
    cert.verdict = Verdict::violated;
  } else if (cert.min_value > tol) {
    cert.verdict = Verdict::strictly_positive;
  } else {
    const bool nontrivial = std::any_of(cert.equality_dims.begin(), cert.equality_dims.end(),
                                        [](int dim) { return dim > 0; });
    cert.verdict = (cert.attained && nontrivial) ? Verdict::marginal_sharp
                                                 : Verdict::marginal_limit;
  }
  return cert;
}

Certificate certify(const OperatorSymbol& sym, const QuadraticForm& form, const SearchConfig& cfg) {
  return certify(Constraint::for_side(sym, form.side()), form, cfg);
}

EqualitySubspace equality_subspace(const Constraint& c, const QuadraticForm& form,
                                   const KVec& k, double tol_eig) {
  if (k.norm() == 0.0) throw ValidationError("equality subspace needs k != 0");
  const Mat q = c.basis(k);
  EqualitySubspace out;
  if (q.cols() == 0) {
    out.basis = Mat(c.m(), 0);
    return out;
  }
  const double scale = std::max(form.norm(), 1e-300);
  const double tol = tol_eig * scale;
  Eigen::SelfAdjointEigenSolver<Mat> es(q.adjoint() * form.mat() * q);
  const RVec& ev = es.eigenvalues();
  if (ev[0] < -tol) throw NotPsdError("form is not positive semidefinite on the constraint at k");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev[i]) <= tol) keep.push_back(i);
  out.basis = Mat(c.m(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    out.basis.col(static_cast<Eigen::Index>(j)) = q * es.eigenvectors().col(keep[j]);
  // Null vectors H satisfy P_c form H = 0, i.e. form H lies in the complement.
  for (Eigen::Index j = 0; j < out.basis.cols(); ++j) {
    const Vec fh = form.mat() * out.basis.col(j);
    out.residual = std::max(out.residual, (q.adjoint() * fh).norm() / scale);
  }
  return out;
}

EqualitySubspace equality_subspace(const OperatorSymbol& sym, const QuadraticForm& form,
                                   const KVec& k, double tol_eig) {
  return equality_subspace(Constraint::for_side(sym, form.side()), form, k, tol_eig);
}

Mat potential_equality_lift(const OperatorSymbol& sym, const QuadraticForm& form,
                            const KVec& k, double tol_eig) {
  if (form.side() != Side::potential)
    throw ValidationError("potential lift applies to potential-side forms only");
  const Mat lk = sym.eval(k);
  const auto eq = equality_subspace(sym, form, k, tol_eig);
  const Mat lift = linalg::pinv(lk) * eq.basis;
  const Mat kernel = linalg::null_basis(lk);
  Mat all(sym.ell(), lift.cols() + kernel.cols());
  all << lift, kernel;
  return linalg::range_basis(all, 1e-10);
}

}  // namespace qstar
