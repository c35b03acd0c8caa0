#include "qstar/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qstar/linalg.hpp"

namespace qstar {

const char* sup_status_name(SupStatus s) {
  switch (s) {
    case SupStatus::finite: return "finite";
    case SupStatus::unbounded: return "unbounded";
    case SupStatus::zero: return "zero";
  }
  return "?";
}

double weighted_quotient(const Constraint& c, const Mat& weight, const Vec& v, const KVec& k) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Mat q = c.basis(k);
  if (q.cols() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(q.adjoint() * weight * q);
  const Vec b = es.eigenvectors().adjoint() * (q.adjoint() * v);
  const double tol = 1e-10 * weight.norm();
  const double vtol = 1e-8 * std::max(v.norm(), 1e-300);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    const double lam = es.eigenvalues()[i];
    const double bi = std::abs(b[i]);
    if (lam > tol) {
      sum += bi * bi / lam;
    } else if (lam < -tol || bi > vtol) {
      return inf;  // weight not Q*-convex here, or range condition fails
    }
  }
  return sum;
}

namespace {

ReductionStep sup_search(const Constraint& c, const Mat& weight, const Vec& v, Side side,
                         const SearchConfig& cfg) {
  cfg.validate();
  if (weight.rows() != c.m() || v.size() != c.m())
    throw ValidationError("weight and direction must match the field dimension");
  ReductionStep step;
  step.vec = v;
  step.side = side;
  if (v.norm() == 0.0) {
    step.status = SupStatus::zero;
    return step;
  }
  const bool homog = c.homogeneous();
  const auto points = sample_points(c.d(), homog, cfg);
  auto fn = [&](const KVec& k) { return weighted_quotient(c, weight, v, k); };
  const auto values = scan(points, fn, cfg.exec);

  const double cutoff = 1e12 * v.squaredNorm() / std::max(linalg::norm2(weight), 1e-300);
  auto unbounded = [&] {
    step.status = SupStatus::unbounded;
    step.value = std::numeric_limits<double>::infinity();
    return step;
  };
  for (double x : values)
    if (!std::isfinite(x) || x > cutoff) return unbounded();

  RefineOptions opt;
  opt.maximize = true;
  opt.on_sphere = homog;
  opt.r_min = cfg.r_min;
  opt.r_max = cfg.r_max;
  opt.iters = cfg.refine_iters;
  opt.cutoff = cutoff;

  struct Cand {
    KVec k;
    double v;
    bool boundary;
  };
  std::vector<Cand> cands;
  for (std::size_t i : best_indices(values, static_cast<std::size_t>(cfg.n_refine), true)) {
    const RefineResult r = refine(fn, points[i], opt);
    if (r.diverged) return unbounded();
    if (r.value >= values[i])
      cands.push_back({r.k, r.value, r.at_radial_bound});
    else
      cands.push_back({points[i], values[i], false});
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.v > b.v; });
  step.value = cands.front().v;
  if (cands.front().boundary) {
    // Best value sits on the radial search bound: follow the ray two decades
    // further. Growth by more than 10x means the quotient blows up there.
    const KVec& kb = cands.front().k;
    const bool inward = kb.norm() < std::sqrt(cfg.r_min * cfg.r_max);
    const double v1 = fn(kb * (inward ? 0.1 : 10.0));
    const double v2 = fn(kb * (inward ? 0.01 : 100.0));
    if (!std::isfinite(v2) || (v1 > step.value && v2 > 10.0 * step.value)) return unbounded();
  }
  std::vector<KVec> near;
  bool interior = false;
  for (const auto& cd : cands)
    if (cd.v >= step.value - cfg.tol_cluster * std::max(1.0, step.value)) {
      near.push_back(homog ? KVec(cd.k.normalized()) : cd.k);
      if (!cd.boundary) interior = true;
    }
  step.maximizers = cluster_points(near, cfg.cluster_radius);
  step.attained = homog || interior;
  return step;
}

}  // namespace

ReductionStep sup_gamma(const OperatorSymbol& sym, const QuadraticForm& weight, const Vec& v,
                        const SearchConfig& cfg) {
  return sup_search(Constraint::potential(sym), weight.mat(), v, Side::potential, cfg);
}

ReductionStep sup_delta(const OperatorSymbol& sym, const QuadraticForm& flux_form, const Vec& w,
                        const SearchConfig& cfg) {
  return sup_search(Constraint::flux(sym), flux_form.mat(), w, Side::flux, cfg);
}

ReductionStep sup_reduction(const OperatorSymbol& sym, const QuadraticForm& current,
                            const Vec& direction, const SearchConfig& cfg) {
  return current.side() == Side::potential ? sup_gamma(sym, current, direction, cfg)
                                           : sup_delta(sym, current, direction, cfg);
}

ReducedForm reduce_once(const OperatorSymbol& sym, const QuadraticForm& current,
                        const Vec& direction, const SearchConfig& cfg) {
  ReductionStep step = sup_reduction(sym, current, direction, cfg);
  if (step.status == SupStatus::zero) return {current, step};
  if (step.status == SupStatus::unbounded)
    throw UnboundedSupremumError("supremum of the weighted quotient is unbounded");
  if (!step.attained)
    throw NotAttainedError("supremum is approached only in a radial limit");
  Mat next = current.mat() - direction * direction.adjoint() / step.value;
  return {QuadraticForm(next, current.side()), step};
}

namespace {

Vec random_direction(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> g;
  Vec v(m);
  for (int i = 0; i < m; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v[i] = cplx(re, im);
  }
  return v / v.norm();
}

}  // namespace

ExtremalForm generate_extremal(const OperatorSymbol& sym, const QuadraticForm& base,
                               const std::vector<Vec>& directions, const SearchConfig& cfg,
                               const ExtremalOptions& opt) {
  const Certificate cert = certify(sym, base, cfg);
  if (cert.verdict == Verdict::violated)
    throw NotPsdError("base form is not Q*-convex (min projected eigenvalue " +
                      std::to_string(cert.min_value) + ")");
  ExtremalForm out{base, {}, base};

  for (std::size_t i = 0; i < directions.size(); ++i) {
    const std::string where = "step " + std::to_string(i) + ": ";
    try {
      auto red = reduce_once(sym, out.result, directions[i], cfg);
      out.result = red.form;
      out.steps.push_back(std::move(red.step));
    } catch (const UnboundedSupremumError& e) {
      throw UnboundedSupremumError(where + e.what());
    } catch (const NotAttainedError& e) {
      throw NotAttainedError(where + e.what());
    }
  }

  SearchConfig pcfg = opt.probe_cfg.value_or(cfg);
  if (!opt.probe_cfg) {
    pcfg.n_directions = std::max(64, cfg.directions_for(sym.d()) / 16);
    pcfg.n_radii = std::min(cfg.n_radii, 31);
    pcfg.n_refine = std::min(cfg.n_refine, 4);
  }
  std::mt19937_64 rng(opt.seed);
  const bool auto_steps = directions.empty();
  for (int round = 0; round <= opt.max_auto_steps; ++round) {
    int unbounded = 0;
    std::optional<Vec> next;
    for (int p = 0; p < opt.n_probe; ++p) {
      const Vec v = random_direction(rng, sym.m());
      const ReductionStep s = sup_reduction(sym, out.result, v, pcfg);
      if (s.status == SupStatus::unbounded) {
        ++unbounded;
      } else if (auto_steps && !next && s.status == SupStatus::finite && s.attained) {
        next = v;
      }
    }
    out.probes_total = opt.n_probe;
    out.probes_unbounded = unbounded;
    out.extremal = unbounded == opt.n_probe;
    if (!auto_steps || !next || round == opt.max_auto_steps) break;
    try {
      auto red = reduce_once(sym, out.result, *next, cfg);
      out.result = red.form;
      out.steps.push_back(std::move(red.step));
    } catch (const Error&) {
      break;  // the refined search disagreed with the probe; stop reducing
    }
  }
  return out;
}

Vec potential_direction(const OperatorSymbol& sym, const Mat& weight, const Vec& vec, Side side,
                        const KVec& k) {
  const Mat l = sym.eval(k);
  const Mat gram = l.adjoint() * weight * l;
  const Vec rhs = side == Side::potential ? Vec(l.adjoint() * vec)
                                          : Vec(-(l.adjoint() * (weight * vec)));
  return gram.fullPivLu().solve(rhs);
}

PotentialPolynomial potential_polynomial(const OperatorSymbol& sym, const Mat& weight,
                                         const Vec& vec, Side side, std::uint64_t seed) {
  const int d = sym.d(), ell = sym.ell();
  const int t = std::max(sym.degree(), 0);
  if (weight.rows() != sym.m() || vec.size() != sym.m())
    throw ValidationError("weight and vector must match the field dimension");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  auto draw_point = [&](KVec& k, Vec& x) {
    for (int tries = 0; tries < 1000; ++tries) {
      k = KVec(d);
      for (int a = 0; a < d; ++a) k[a] = unif(rng);
      const Mat l = sym.eval(k);
      Eigen::JacobiSVD<Mat> svd(l.adjoint() * weight * l);
      const RVec& s = svd.singularValues();
      if (s.size() == 0 || s[s.size() - 1] < 1e-8 * s[0]) continue;
      x = potential_direction(sym, weight, vec, side, k);
      return;
    }
    throw NonPolynomialError("L^* V L is singular at every sampled k");
  };

  const int max_q = 2 * t * ell;
  for (int dq = 0; dq <= max_q; ++dq) {
    const int dp = dq + t;
    const auto qmons = monomials_up_to(d, dq);
    const auto pmons = monomials_up_to(d, dp);
    const Eigen::Index nq = static_cast<Eigen::Index>(qmons.size());
    const Eigen::Index np = static_cast<Eigen::Index>(pmons.size());
    const Eigen::Index unknowns = nq + ell * np;
    const Eigen::Index samples = (2 * unknowns) / ell + 10;

    Mat a = Mat::Zero(samples * ell, unknowns);
    for (Eigen::Index s = 0; s < samples; ++s) {
      KVec k;
      Vec x;
      draw_point(k, x);
      for (int j = 0; j < ell; ++j) {
        const Eigen::Index row = s * ell + j;
        for (Eigen::Index i = 0; i < nq; ++i) a(row, i) = x[j] * monomial_value(qmons[i], k);
        for (Eigen::Index i = 0; i < np; ++i)
          a(row, nq + j * np + i) = -monomial_value(pmons[i], k);
      }
    }
    RVec colscale(unknowns);
    for (Eigen::Index c = 0; c < unknowns; ++c) {
      colscale[c] = std::max(a.col(c).norm(), 1e-300);
      a.col(c) /= colscale[c];
    }
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const RVec& sv = svd.singularValues();
    if (sv[sv.size() - 1] > 1e-9 * sv[0]) continue;
    Vec sol = svd.matrixV().col(unknowns - 1);
    for (Eigen::Index c = 0; c < unknowns; ++c) sol[c] /= colscale[c];

    // Normalize by the leading (highest-degree, first in order) q coefficient.
    const double qmax = sol.head(nq).cwiseAbs().maxCoeff();
    if (qmax == 0.0) continue;
    cplx lead = 0.0;
    int lead_deg = -1;
    for (Eigen::Index i = 0; i < nq; ++i) {
      if (std::abs(sol[i]) <= 1e-8 * qmax) continue;
      int deg = 0;
      for (int e : qmons[i]) deg += e;
      if (deg > lead_deg) {
        lead_deg = deg;
        lead = sol[i];
      }
    }
    sol /= lead;

    PotentialPolynomial out;
    out.q = Polynomial(d);
    for (Eigen::Index i = 0; i < nq; ++i) out.q.add_term(qmons[i], sol[i]);
    out.p.assign(ell, Polynomial(d));
    for (int j = 0; j < ell; ++j)
      for (Eigen::Index i = 0; i < np; ++i) out.p[j].add_term(pmons[i], sol[nq + j * np + i]);
    double cmax = sol.cwiseAbs().maxCoeff();
    const double rel = 1e-11;
    out.q = out.q.pruned(rel * cmax / std::max(sol.head(nq).cwiseAbs().maxCoeff(), 1e-300));
    for (auto& p : out.p) {
      double pm = 0.0;
      for (const auto& [e, c] : p.terms()) pm = std::max(pm, std::abs(c));
      if (pm > 0.0) p = p.pruned(rel * cmax / pm);
    }

    out.residual = 0.0;
    for (int s = 0; s < 50; ++s) {
      KVec k;
      Vec x;
      draw_point(k, x);
      Vec pk(ell);
      for (int j = 0; j < ell; ++j) pk[j] = out.p[j](k);
      const cplx qk = out.q(k);
      out.residual = std::max(out.residual, (pk / qk - x).norm() / std::max(x.norm(), 1e-300));
    }
    if (out.residual <= 1e-8) return out;
  }
  throw NonPolynomialError("no polynomial multiplier reproduces (L^* V L)^{-1} L^* v to 1e-8");
}

}  // namespace qstar
