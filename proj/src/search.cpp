#include "qstar/search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace qstar {

int SearchConfig::directions_for(int d) const {
  if (n_directions > 0) return n_directions;
  if (d == 1) return 2;
  if (d == 2) return 1024;
  return 4096;
}

void SearchConfig::validate() const {
  if (n_directions < 0 || n_radii <= 0 || r_min <= 0.0 || r_max <= r_min ||
      refine_iters < 0 || n_refine <= 0 || tol_eig <= 0.0 || tol_cluster <= 0.0 ||
      cluster_radius <= 0.0)
    throw ValidationError("search configuration values must be positive");
}

std::vector<KVec> sphere_directions(int d, int n, std::uint64_t seed) {
  std::vector<KVec> out;
  if (d == 1) {
    out.push_back(KVec::Constant(1, 1.0));
    out.push_back(KVec::Constant(1, -1.0));
    return out;
  }
  out.reserve(static_cast<std::size_t>(n));
  if (d == 2) {
    for (int j = 0; j < n; ++j) {
      // Half-step offset keeps the coordinate axes off the lattice.
      const double th = 2.0 * std::numbers::pi * (j + 0.5) / n;
      KVec k(2);
      k << std::cos(th), std::sin(th);
      out.push_back(k);
    }
    return out;
  }
  if (d == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < n; ++j) {
      const double z = 1.0 - 2.0 * (j + 0.5) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = golden * j;
      KVec k(3);
      k << r * std::cos(th), r * std::sin(th), z;
      out.push_back(k);
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int j = 0; j < n; ++j) {
    KVec k(d);
    for (int a = 0; a < d; ++a) k[a] = g(rng);
    out.push_back(k.normalized());
  }
  return out;
}

std::vector<double> log_radii(int n, double r_min, double r_max) {
  std::vector<double> r(static_cast<std::size_t>(n));
  if (n == 1) {
    r[0] = std::sqrt(r_min * r_max);
    return r;
  }
  const double a = std::log(r_min), b = std::log(r_max);
  for (int i = 0; i < n; ++i) r[i] = std::exp(a + (b - a) * i / (n - 1));
  return r;
}

std::vector<KVec> sample_points(int d, bool homogeneous, const SearchConfig& cfg) {
  auto dirs = sphere_directions(d, cfg.directions_for(d), cfg.seed);
  if (homogeneous) return dirs;
  std::vector<KVec> pts;
  const auto radii = log_radii(cfg.n_radii, cfg.r_min, cfg.r_max);
  pts.reserve(dirs.size() * radii.size());
  for (const auto& u : dirs)
    for (double r : radii) pts.push_back(r * u);
  return pts;
}

std::vector<double> scan_serial(const std::vector<KVec>& points, const ScalarField& fn) {
  std::vector<double> v(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) v[i] = fn(points[i]);
  return v;
}

std::vector<double> scan_parallel(const std::vector<KVec>& points, const ScalarField& fn) {
  std::vector<double> v(points.size());
  const long n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < n; ++i) v[i] = fn(points[i]);
  return v;
}

std::vector<double> scan(const std::vector<KVec>& points, const ScalarField& fn, Exec exec) {
  return exec == Exec::parallel ? scan_parallel(points, fn) : scan_serial(points, fn);
}

namespace {

KVec project(const KVec& k, const RefineOptions& opt) {
  const double r = k.norm();
  if (opt.on_sphere) return r > 0 ? KVec(k / r) : k;
  if (r < opt.r_min) return r > 0 ? KVec(k * (opt.r_min / r)) : k;
  if (r > opt.r_max) return KVec(k * (opt.r_max / r));
  return k;
}

bool bad(double v, const RefineOptions& opt) {
  return !std::isfinite(v) || (opt.maximize && v > opt.cutoff);
}

}  // namespace

RefineResult refine(const ScalarField& fn, const KVec& start, const RefineOptions& opt) {
  const double sgn = opt.maximize ? -1.0 : 1.0;  // minimize sgn * fn
  RefineResult res;
  res.k = project(start, opt);
  double fk = fn(res.k);
  if (bad(fk, opt)) {
    res.value = fk;
    res.diverged = true;
    return res;
  }
  double cur = sgn * fk;
  const Eigen::Index d = start.size();

  auto gradient = [&](const KVec& k, bool& diverged) {
    KVec g(d);
    const double h = 1e-6 * std::max(1.0, k.norm());
    for (Eigen::Index a = 0; a < d; ++a) {
      KVec kp = k, km = k;
      kp[a] += h;
      km[a] -= h;
      const double fp = fn(kp), fm = fn(km);
      if (bad(fp, opt) || bad(fm, opt)) diverged = true;
      g[a] = sgn * (fp - fm) / (2.0 * h);
    }
    if (opt.on_sphere) g -= g.dot(k) * k;  // tangent component
    return g;
  };

  bool diverged = false;
  KVec g = gradient(res.k, diverged);
  double step = 1e-2 * std::max(1.0, res.k.norm()) / std::max(g.norm(), 1e-12);
  for (int it = 0; it < opt.iters && !diverged; ++it) {
    if (g.norm() < 1e-14) break;
    bool accepted = false;
    KVec next;
    double fnext = 0.0;
    for (int bt = 0; bt < 40; ++bt) {
      next = project(res.k - step * g, opt);
      const double raw = fn(next);
      if (bad(raw, opt)) {
        res.k = next;
        res.value = raw;
        res.diverged = true;
        return res;
      }
      fnext = sgn * raw;
      if (fnext <= cur - 1e-4 * step * g.squaredNorm() || fnext < cur) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const KVec s = next - res.k;
    const double moved = s.norm();
    res.k = next;
    const double improvement = cur - fnext;
    cur = fnext;
    KVec gn = gradient(res.k, diverged);
    const KVec y = gn - g;
    const double sy = s.dot(y);
    step = (sy > 0.0) ? s.squaredNorm() / sy : step * 2.0;
    g = gn;
    if (moved < 1e-13 * std::max(1.0, res.k.norm()) && improvement <= 0.0) break;
  }
  res.value = sgn * cur;
  if (diverged) {
    res.diverged = true;
    return res;
  }
  if (!opt.on_sphere) {
    const double r = res.k.norm();
    res.at_radial_bound = r <= opt.r_min * (1.0 + 1e-3) || r >= opt.r_max * (1.0 - 1e-3);
  }
  return res;
}

std::vector<std::size_t> best_indices(const std::vector<double>& values, std::size_t n,
                                      bool largest) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::isfinite(values[i])) idx.push_back(i);
  auto cmp = [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return largest ? values[a] > values[b] : values[a] < values[b];
    return a < b;
  };
  n = std::min(n, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(n), idx.end(), cmp);
  idx.resize(n);
  return idx;
}

std::vector<KVec> cluster_points(const std::vector<KVec>& points, double radius) {
  std::vector<KVec> reps;
  for (const auto& p : points) {
    bool merged = false;
    for (const auto& r : reps)
      if ((p - r).norm() <= radius * std::max(1.0, r.norm())) {
        merged = true;
        break;
      }
    if (!merged) reps.push_back(p);
  }
  return reps;
}

}  // namespace qstar
