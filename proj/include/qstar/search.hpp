#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qstar/types.hpp"

namespace qstar {

struct SearchConfig {
  int n_directions = 0;  // 0 selects 4096 for d = 3, 1024 for d = 2
  int n_radii = 61;
  double r_min = 1e-3;
  double r_max = 1e3;
  int refine_iters = 200;
  int n_refine = 10;
  double tol_eig = 1e-9;      // relative to the form norm
  double tol_cluster = 1e-6;  // value tolerance for maximizer/witness sets
  double cluster_radius = 1e-4;
  std::uint64_t seed = 0;
  Exec exec = Exec::parallel;

  int directions_for(int d) const;
  void validate() const;
};

/// Deterministic quasi-uniform unit vectors: a circle lattice for d = 2,
/// a Fibonacci sphere for d = 3, seeded Gaussian directions otherwise.
std::vector<KVec> sphere_directions(int d, int n, std::uint64_t seed = 0);

std::vector<double> log_radii(int n, double r_min, double r_max);

/// Sample set: unit directions if `homogeneous`, else directions x radii.
std::vector<KVec> sample_points(int d, bool homogeneous, const SearchConfig& cfg);

using ScalarField = std::function<double(const KVec&)>;

/// Evaluates fn at every point. The parallel path is an OpenMP loop over
/// points; values are identical to the serial path.
std::vector<double> scan_serial(const std::vector<KVec>& points, const ScalarField& fn);
std::vector<double> scan_parallel(const std::vector<KVec>& points, const ScalarField& fn);
std::vector<double> scan(const std::vector<KVec>& points, const ScalarField& fn, Exec exec);

struct RefineResult {
  KVec k;
  double value = 0.0;
  bool at_radial_bound = false;
  bool diverged = false;  // value became non-finite or exceeded the cutoff
};

struct RefineOptions {
  bool maximize = false;
  bool on_sphere = false;
  double r_min = 1e-3;
  double r_max = 1e3;
  int iters = 200;
  double cutoff = 1e300;  // maximize only: stop once the value exceeds this
};

/// Local refinement by projected gradient steps (central-difference
/// gradients, Barzilai-Borwein step lengths with backtracking).
RefineResult refine(const ScalarField& fn, const KVec& start, const RefineOptions& opt);

/// Indices of the n smallest (or largest) finite values, ties by index.
std::vector<std::size_t> best_indices(const std::vector<double>& values, std::size_t n,
                                      bool largest);

/// Greedy clustering of points: a point joins the first representative
/// within `radius`. Order of the input is preserved among representatives.
std::vector<KVec> cluster_points(const std::vector<KVec>& points, double radius);

}  // namespace qstar
