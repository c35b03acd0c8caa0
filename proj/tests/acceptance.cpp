// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "qstar/linalg.hpp"
#include "qstar/report.hpp"

#ifndef QSTARLAB_PATH
#error "QSTARLAB_PATH must name the qstarlab binary"
#endif

using namespace qstar;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

KVec random_k(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  KVec k(d);
  do {
    for (int a = 0; a < d; ++a) k[a] = g(rng);
  } while (k.norm() < 1e-2);
  return k;
}

Vec v_of(const KVec& t) {
  Vec v(t.size() + 1);
  for (Eigen::Index i = 0; i < t.size(); ++i) v[i] = t[i];
  v[t.size()] = 1.0;
  return v;
}

std::vector<KVec> unit_ts() {
  std::mt19937_64 rng(2024);
  std::vector<KVec> ts;
  KVec e3(3);
  e3 << 0, 0, 1;
  ts.push_back(e3);
  for (int i = 0; i < 2; ++i) ts.push_back(random_k(rng, 3).normalized());
  return ts;
}

// 1. alpha = 2 for v = (t, 1), |t| = 1, with the unique maximizer k = t.
Outcome alpha_checkpoint() {
  const auto t0 = Clock::now();
  const auto sym = catalog_entry("grad_plus_id").sym;
  const QuadraticForm id(Mat::Identity(4, 4), Side::potential);
  double worst_a = 0.0, worst_k = 0.0;
  bool unique = true;
  for (const KVec& t : unit_ts()) {
    const auto s = sup_gamma(sym, id, v_of(t));
    worst_a = std::max(worst_a, std::abs(s.value - 2.0));
    unique = unique && s.maximizers.size() == 1 && s.attained;
    if (!s.maximizers.empty()) worst_k = std::max(worst_k, (s.maximizers[0] - t).norm());
  }
  const double secs = seconds_since(t0) / 3.0;
  return {worst_a <= 1e-6 && worst_k <= 1e-4 && unique && secs < 10.0,
          "max |alpha-2| = " + fmt(worst_a) + ", max |k-t| = " + fmt(worst_k) +
              (unique ? ", unique maximizer" : ", maximizer not unique") + ", " + fmt(secs) + " s per run"};
}

// Two-parameter family at k built directly from its definition.
Mat family(const KVec& k) {
  Mat f(9, 2);
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l) {
      f(3 * i + l, 0) = k[i] * k[l] - (i == l ? k.squaredNorm() : 0.0);
      double eps = 0.0;
      for (int j = 0; j < 3; ++j) eps += 0.5 * (i - l) * (l - j) * (j - i) * k[j];
      f(3 * i + l, 1) = eps;
    }
  return f;
}

// 2. Divergence-free 3x3 certification.
Outcome divfree_certification() {
  const auto t0 = Clock::now();
  const auto e = catalog_entry("divfree3d");
  SearchConfig cfg;
  cfg.n_directions = 4096;
  const auto c = certify(e.constraint(), e.form, cfg);
  std::mt19937_64 rng(77);
  int bad_dim = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const KVec k = random_k(rng, 3);
    const auto eq = equality_subspace(e.constraint(), e.form, k);
    if (eq.basis.cols() != 2) {
      ++bad_dim;
      continue;
    }
    const Mat f = linalg::range_basis(family(k));
    worst = std::max({worst, linalg::subspace_excess(eq.basis, f), linalg::subspace_excess(f, eq.basis)});
  }
  const double secs = seconds_since(t0);
  const bool ok = c.verdict == Verdict::marginal_sharp && std::abs(c.min_value) <= 1e-9 &&
                  c.samples >= 4096 && bad_dim == 0 && worst <= 1e-8 && secs < 60.0;
  return {ok, std::string(verdict_name(c.verdict)) + ", min = " + fmt(c.min_value) + " over " +
                  std::to_string(c.samples) + " samples, " + std::to_string(100 - bad_dim) +
                  "/100 k with dim 2, family residual " + fmt(worst) + ", " + fmt(secs) + " s"};
}

// 3. Special field equality on a 16^3 grid.
Outcome special_field_equality() {
  const auto e = catalog_entry("divfree3d");
  const auto lat = ReciprocalLattice::from_basis(2 * kPi * RMat::Identity(3, 3));
  const std::vector<int> shape{16, 16, 16};
  auto gap = [&](const FourierField& j, double& pointwise) {
    const GridField g = to_grid(j, shape);
    pointwise = 0.0;
    for (Eigen::Index p = 0; p < g.npoints(); ++p)
      pointwise = std::max(pointwise, std::abs(e.form.apply(g.values.col(p))));
    return std::abs(form_average(e.form, g) - e.form.apply(field_average(g)));
  };

  FourierField ab(lat, FieldKind::U, 2);
  ab.constant = Vec::Zero(2);
  Vec half = Vec::Zero(2);
  half[0] = 0.5;
  ab.set_mode({0, 0, 1}, half);
  ab.set_mode({0, 0, -1}, half);
  const FourierField j1 = divfree3d_special(ab, Vec::Zero(9));
  double pw1 = 0.0;
  const double g1 = gap(j1, pw1);

  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> pick(-3, 3);
  FourierField rnd(lat, FieldKind::U, 2);
  rnd.constant = Vec::Zero(2);
  while (rnd.modes.size() < 8) {
    std::vector<int> n{pick(rng), pick(rng), pick(rng)};
    if (n == std::vector<int>{0, 0, 0} || rnd.modes.count(n)) continue;
    Vec c(2);
    c << cplx(gauss(rng), gauss(rng)), cplx(gauss(rng), gauss(rng));
    rnd.set_mode(n, c);
    rnd.set_mode({-n[0], -n[1], -n[2]}, c.conjugate());
  }
  const FourierField j2 = divfree3d_special(rnd, Vec::Zero(9));
  double pw2 = 0.0;
  const double g2 = gap(j2, pw2);
  const double norm2 = j2.mean_square();
  return {g1 <= 1e-10 && g2 <= 1e-9 * norm2 && j1.mean_square() > 0.0,
          "cos field gap " + fmt(g1) + " (||J||^2 = " + fmt(j1.mean_square()) + ", pointwise max |g| " +
              fmt(pw1) + "), random field gap " +
              fmt(g2) + " vs ||J||^2 = " + fmt(norm2)};
}

FourierField mixed_random(const CatalogEntry& e, const ReciprocalLattice& lat, std::uint64_t seed) {
  const auto ef = random_admissible(e.sym, lat, FieldKind::E, 6, seed, false);
  const auto jf = random_admissible(*e.second, lat, FieldKind::J, 6, seed + 1000, false);
  const int me = e.sym.m(), mj = e.second->m();
  FourierField f(lat, FieldKind::E, me + mj);
  f.constant << ef.constant, jf.constant;
  for (const auto& [n, v] : ef.modes) {
    Vec x = Vec::Zero(me + mj);
    x.head(me) = v;
    f.set_mode(n, x);
  }
  for (const auto& [n, v] : jf.modes) {
    Vec x = f.modes.count(n) ? f.modes.at(n) : Vec(Vec::Zero(me + mj));
    x.tail(mj) = v;
    f.set_mode(n, x);
  }
  return f;
}

// 4. Q*-inequality on random admissible periodic fields.
Outcome random_field_sampling() {
  std::ostringstream det;
  bool ok = true;
  for (const std::string name : {"divfree3d", "grad_plus_id", "det2d", "mixed_h"}) {
    const auto e = catalog_entry(name);
    const int d = e.sym.d();
    const auto lat = ReciprocalLattice::from_basis(2 * kPi * RMat::Identity(d, d));
    double worst = std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < 100; ++s) {
      FourierField f;
      if (e.second) {
        f = mixed_random(e, lat, s);
      } else {
        const FieldKind side = e.form.side() == Side::potential ? FieldKind::E : FieldKind::J;
        f = random_admissible(e.sym, lat, side, 6, s, e.sym.conjugate_symmetric());
      }
      const double scale = e.form.norm() * f.mean_square();
      worst = std::min(worst, (form_average(e.form, f) - e.form.apply(field_average(f))) / scale);
    }
    ok = ok && worst >= -1e-9;
    det << name << " min " << fmt(worst) << "; ";
  }
  // Null-Lagrangian identity, checked by grid quadrature of det(grad U).
  const auto e = catalog_entry("det2d");
  const auto lat = ReciprocalLattice::from_basis(2 * kPi * RMat::Identity(2, 2));
  double worst_det = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto f = random_admissible(e.sym, lat, FieldKind::E, 6, s, true);
    const auto nm = f.max_index();
    const GridField g = to_grid(f, {2 * nm[0] + 2, 2 * nm[1] + 2});
    double avg_det = 0.0;
    Vec avg = Vec::Zero(4);
    for (Eigen::Index p = 0; p < g.npoints(); ++p) {
      const Vec v = g.values.col(p);
      avg_det += (v[0] * v[3] - v[1] * v[2]).real();
      avg += v;
    }
    avg_det /= static_cast<double>(g.npoints());
    avg /= static_cast<double>(g.npoints());
    const double det_avg = (avg[0] * avg[3] - avg[1] * avg[2]).real();
    worst_det = std::max(worst_det, std::abs(avg_det - det_avg) / f.mean_square());
  }
  ok = ok && worst_det <= 1e-10;
  det << "det2d null-Lagrangian gap " << fmt(worst_det);
  return {ok, det.str()};
}

// 5. Projection identities at 200 random k per operator.
Outcome projection_identities() {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  std::vector<OperatorSymbol> ops;
  for (const std::string name : {"divfree3d", "grad_plus_id", "det2d", "mixed_h"}) {
    const auto e = catalog_entry(name);
    ops.push_back(e.sym);
    if (e.second) ops.push_back(*e.second);
  }
  for (const auto& s : ops) {
    // A fixed positive definite weight for Delta = V - V Gamma V.
    Mat a = Mat::Random(s.m(), s.m());
    const Mat v = a * a.adjoint() + Mat::Identity(s.m(), s.m());
    for (int i = 0; i < 200; ++i) {
      const KVec k = random_k(rng, s.d());
      const auto p = projections(s, k);
      const Mat id = Mat::Identity(s.m(), s.m());
      const auto w = weighted_gamma(s, v, k);
      const double lscale = std::max(1.0, linalg::norm2(s.eval(k))) * std::max(1.0, linalg::norm2(v));
      worst = std::max({worst, (p.gamma1 + p.gamma2 - id).norm(), (p.gamma1 * p.gamma1 - p.gamma1).norm(),
                        (s.eval_adjoint(k) * w.delta).norm() / lscale});
    }
  }
  return {worst <= 1e-10, "max residual " + fmt(worst) + " over " + std::to_string(ops.size()) + " operators"};
}

// 6. Rank-one threshold: alpha is exactly the largest admissible divisor.
Outcome threshold_exactness(std::string& info) {
  struct Case {
    OperatorSymbol sym;
    QuadraticForm v;
    Vec dir;
  };
  std::vector<Case> cases;
  const auto gp = catalog_entry("grad_plus_id").sym;
  for (const KVec& t : unit_ts()) cases.push_back({gp, QuadraticForm(Mat::Identity(4, 4), Side::potential), v_of(t)});
  {
    std::vector<std::vector<Polynomial>> rows{{Polynomial::variable(2, 0, cplx(0, 1))},
                                              {Polynomial::variable(2, 1, cplx(0, 1))}};
    Vec w(2);
    w << 1, 0;
    cases.push_back({symbol_from_polynomials(rows), QuadraticForm(Mat::Identity(2, 2), Side::flux), w});
  }
  {
    const auto e = catalog_entry("divfree3d");
    Vec w = Vec::Zero(9);
    w[0] = w[4] = w[8] = 1.0;
    cases.push_back({e.sym, QuadraticForm(Mat::Identity(9, 9), Side::flux), w});
  }
  bool ok = true;
  int literal_holds = 0;
  std::ostringstream det;
  for (const auto& c : cases) {
    const auto step = sup_reduction(c.sym, c.v, c.dir);
    const Mat vv = c.dir * c.dir.adjoint();
    const auto below = certify(c.sym, QuadraticForm(c.v.mat() - vv / (step.value * (1 - 1e-3)), c.v.side()));
    const auto above = certify(c.sym, QuadraticForm(c.v.mat() - vv / (step.value * (1 + 1e-3)), c.v.side()));
    // Subtracting more than v v^*/alpha must break Q*-convexity; subtracting less must not.
    const bool good = below.verdict == Verdict::violated && above.verdict != Verdict::violated;
    ok = ok && good;
    literal_holds += below.verdict != Verdict::violated && above.verdict == Verdict::violated;
    det << fmt(step.value) << ":" << verdict_name(below.verdict) << "/" << verdict_name(above.verdict) << " ";
  }
  info = "threshold wording 'alpha(1-1e-3) non-violated, alpha(1+1e-3) violated' holds in " +
         std::to_string(literal_holds) + "/" + std::to_string(cases.size()) +
         " cases; divisors below alpha subtract more, so the checked orientation is the reverse";
  return {ok, std::to_string(cases.size()) + " steps (alpha: below/above) " + det.str()};
}

// 7. Sharp bound verification on a 32^3 grid.
Outcome sharp_bounds() {
  const auto t0 = Clock::now();
  std::ostringstream det;
  bool ok = true;
  for (const std::string name : {"grad_plus_id", "divfree3d"}) {
    const auto e = catalog_entry(name);
    const auto setup = bound_setup(e);
    const auto mask = make_mask(parse_omega("ball:0.3"), setup.special.lattice, {32, 32, 32});
    BoundOptions opt;
    opt.n_competitors = 50;
    opt.seed = 7;
    opt.flux_potential = setup.flux_potential;
    const auto b = verify_bound(e.sym, e.form, setup.special, mask, opt);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : b.reports) worst = std::min(worst, r.margin / r.scale);
    const auto& eq = b.reports.front();
    const bool good = b.reports.size() == 51 && worst >= -1e-9 && eq.equality_case &&
                      std::abs(eq.margin) <= 1e-9 * eq.scale;
    ok = ok && good;
    det << name << " worst " << fmt(worst) << ", equality " << fmt(eq.margin / eq.scale) << "; ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 300.0;
  det << fmt(secs) << " s";
  return {ok, det.str()};
}

// 8. Polynomial potential (q, P).
Outcome polynomial_consistency() {
  const auto sym = catalog_entry("grad_plus_id").sym;
  std::mt19937_64 rng(8);
  double worst_val = 0.0, worst_coef = 0.0;
  std::vector<std::pair<Mat, Vec>> cases;
  for (const KVec& t : unit_ts()) cases.push_back({Mat::Identity(4, 4), v_of(t)});
  {
    Mat a = Mat::Random(4, 4);
    Vec v(4);
    v << 0.3, cplx(0.2, -0.5), 1.0, 0.7;
    cases.push_back({a * a.adjoint() + Mat::Identity(4, 4), v});
  }
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& [w, v] = cases[ci];
    const auto pp = potential_polynomial(sym, w, v, Side::potential);
    for (int i = 0; i < 50; ++i) {
      const KVec k = random_k(rng, 3);
      const Vec direct = potential_direction(sym, w, v, Side::potential, k);
      Vec interp(static_cast<Eigen::Index>(pp.p.size()));
      for (std::size_t q = 0; q < pp.p.size(); ++q) interp[static_cast<Eigen::Index>(q)] = pp.p[q](k) / pp.q(k);
      worst_val = std::max(worst_val, (interp - direct).norm() / std::max(direct.norm(), 1e-300));
    }
    if (ci < unit_ts().size()) {
      const KVec t = unit_ts()[ci];
      // q = k^2 + 1 and P = t.k + 1, coefficient by coefficient.
      Polynomial q(3), p(3);
      for (int a = 0; a < 3; ++a) {
        Exponents e2(3, 0), e1(3, 0);
        e2[a] = 2;
        e1[a] = 1;
        q.add_term(e2, 1.0);
        p.add_term(e1, t[a]);
      }
      q.add_term({0, 0, 0}, 1.0);
      p.add_term({0, 0, 0}, 1.0);
      const Polynomial dq = pp.q + q * cplx(-1.0);
      const Polynomial dp = pp.p[0] + p * cplx(-1.0);
      for (const auto& [e, c] : dq.terms()) worst_coef = std::max(worst_coef, std::abs(c));
      for (const auto& [e, c] : dp.terms()) worst_coef = std::max(worst_coef, std::abs(c));
    }
  }
  return {worst_val <= 1e-8 && worst_coef <= 1e-10,
          "max relative mismatch " + fmt(worst_val) + ", max coefficient error " + fmt(worst_coef)};
}

std::string run_capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  status = pclose(p);
  return out;
}

// 9. Repeated CLI runs with the same seed give identical structured reports.
Outcome determinism() {
  const std::string bin = QSTARLAB_PATH;
  const std::vector<std::string> cmds = {
      bin + " certify --catalog divfree3d --samples 512 --seed 3 --format json",
      bin + " extremal --catalog grad_plus_id --probes 8 --samples 256 --seed 11 --format json",
      bin + " verify-bound --catalog grad_plus_id --grid 16 --competitors 6 --seed 7 --format json",
      bin + " verify-bound --catalog divfree3d --grid 16 --competitors 6 --seed 7 --format json"};
  int identical = 0;
  bool threads_ok = true;
  for (const auto& c : cmds) {
    int s1 = 0, s2 = 0, s3 = 0;
    const std::string a = run_capture(c + " 2>/dev/null", s1);
    const std::string b = run_capture(c + " 2>/dev/null", s2);
    const std::string serial = run_capture(c + " --threads 1 2>/dev/null", s3);
    if (s1 == 0 && s2 == 0 && !a.empty() && a == b) ++identical;
    threads_ok = threads_ok && s3 == 0 && serial == a;
  }
  return {identical == static_cast<int>(cmds.size()) && threads_ok,
          std::to_string(identical) + "/" + std::to_string(cmds.size()) +
              " commands byte-identical across runs" + (threads_ok ? ", serial path identical too" : ", serial path differs")};
}

}  // namespace

int main() {
  std::string info6;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"alpha = 2 checkpoint", alpha_checkpoint},
      {"divergence-free certification", divfree_certification},
      {"special-field equality", special_field_equality},
      {"Q*-inequality sampling", random_field_sampling},
      {"projection identities", projection_identities},
      {"rank-one threshold exactness", [&] { return threshold_exactness(info6); }},
      {"sharp-bound verification", sharp_bounds},
      {"P/q polynomial consistency", polynomial_consistency},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail << std::endl;
    if (i == 5 && !info6.empty()) std::cout << "INFO  criterion 6: " << info6 << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
