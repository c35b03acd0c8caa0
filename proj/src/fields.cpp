#include "qstar/fields.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "qstar/linalg.hpp"

namespace qstar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Rational approximation p/q of x with q <= max_den, or 0 when none fits.
int rational_denominator(double x, int max_den, double tol) {
  for (int q = 1; q <= max_den; ++q) {
    const double p = std::round(x * q);
    if (std::abs(x - p / q) <= tol * std::max(1.0, std::abs(x))) return q;
  }
  return 0;
}

}  // namespace

ReciprocalLattice ReciprocalLattice::from_basis(const RMat& basis) {
  if (basis.rows() != basis.cols() || basis.rows() == 0)
    throw ValidationError("lattice basis must be a nonempty square matrix");
  const double det = basis.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12 * std::pow(basis.norm(), basis.rows()))
    throw ValidationError("lattice basis is singular");
  ReciprocalLattice l;
  l.basis = basis;
  l.cell_volume = std::pow(kTwoPi, static_cast<double>(basis.rows())) / std::abs(det);
  return l;
}

RMat ReciprocalLattice::direct() const {
  // a_i . b_j = 2 pi delta_ij  =>  A = 2 pi B^{-T}
  return kTwoPi * basis.inverse().transpose();
}

KVec ReciprocalLattice::wavevector(const std::vector<int>& n) const {
  if (static_cast<int>(n.size()) != d()) throw ValidationError("mode index has wrong length");
  KVec k = KVec::Zero(d());
  for (int j = 0; j < d(); ++j) k += n[static_cast<std::size_t>(j)] * basis.row(j).transpose();
  return k;
}

ReciprocalLattice lattice_containing(const std::vector<KVec>& kstars) {
  const KVec* first = nullptr;
  for (const auto& k : kstars)
    if (k.norm() > 0.0) {
      first = &k;
      break;
    }
  if (!first) throw ValidationError("lattice_containing needs a nonzero wavevector");
  const int d = static_cast<int>(first->size());
  const double len = first->norm();

  std::vector<RVec> frame{*first / len};
  for (int e = 0; e < d && static_cast<int>(frame.size()) < d; ++e) {
    RVec u = RVec::Unit(d, e);
    for (const auto& f : frame) u -= f.dot(u) * f;
    if (u.norm() > 1e-8) frame.push_back(u.normalized());
  }
  RMat b(d, d);
  for (int j = 0; j < d; ++j) b.row(j) = (len * frame[static_cast<std::size_t>(j)]).transpose();

  std::vector<long> den(static_cast<std::size_t>(d), 1);
  const RMat bt_inv = b.transpose().inverse();
  for (const auto& k : kstars) {
    if (static_cast<int>(k.size()) != d) throw ValidationError("wavevectors differ in dimension");
    if (k.norm() == 0.0) continue;
    const RVec c = bt_inv * k;
    for (int j = 0; j < d; ++j) {
      const int q = rational_denominator(c[j], 64, 1e-9);
      if (q == 0)
        throw NoCommonLatticeError("wavevectors are not commensurate with the first one");
      den[static_cast<std::size_t>(j)] = std::lcm(den[static_cast<std::size_t>(j)], long{q});
    }
  }
  for (int j = 0; j < d; ++j) b.row(j) /= static_cast<double>(den[static_cast<std::size_t>(j)]);
  return ReciprocalLattice::from_basis(b);
}

const char* field_kind_name(FieldKind k) {
  switch (k) {
    case FieldKind::E: return "E";
    case FieldKind::J: return "J";
    case FieldKind::U: return "U";
  }
  return "?";
}

FieldKind parse_field_kind(const std::string& s) {
  if (s == "E") return FieldKind::E;
  if (s == "J") return FieldKind::J;
  if (s == "U") return FieldKind::U;
  throw ValidationError("unknown field kind '" + s + "'");
}

FourierField::FourierField(ReciprocalLattice lat, FieldKind k, int dim)
    : lattice(std::move(lat)), kind(k), constant(Vec::Zero(dim)) {}

void FourierField::set_mode(const ModeIndex& n, const Vec& v) {
  if (static_cast<int>(n.size()) != lattice.d()) throw ValidationError("mode index has wrong length");
  if (std::all_of(n.begin(), n.end(), [](int x) { return x == 0; }))
    throw ValidationError("the k = 0 term is the constant part, not a mode");
  if (v.size() != constant.size()) throw ValidationError("mode has wrong dimension");
  modes[n] = v;
}

std::vector<int> FourierField::max_index() const {
  std::vector<int> mx(static_cast<std::size_t>(lattice.d()), 0);
  for (const auto& [n, v] : modes)
    for (std::size_t j = 0; j < n.size(); ++j) mx[j] = std::max(mx[j], std::abs(n[j]));
  return mx;
}

bool FourierField::is_real(double tol) const {
  const double scale = std::max(std::sqrt(mean_square()), 1e-300);
  if (constant.imag().norm() > tol * scale) return false;
  for (const auto& [n, v] : modes) {
    ModeIndex neg(n.size());
    std::transform(n.begin(), n.end(), neg.begin(), [](int x) { return -x; });
    auto it = modes.find(neg);
    if (it == modes.end()) {
      if (v.norm() > tol * scale) return false;
      continue;
    }
    if ((it->second - v.conjugate()).norm() > tol * scale) return false;
  }
  return true;
}

Vec FourierField::eval_frac(const RVec& s) const {
  Vec out = constant;
  for (const auto& [n, v] : modes) {
    double phase = 0.0;
    for (std::size_t j = 0; j < n.size(); ++j) phase += n[j] * s[static_cast<Eigen::Index>(j)];
    out += std::polar(1.0, kTwoPi * phase) * v;
  }
  return out;
}

Vec FourierField::eval(const RVec& x) const {
  Vec out = constant;
  for (const auto& [n, v] : modes) out += std::polar(1.0, lattice.wavevector(n).dot(x)) * v;
  return out;
}

double FourierField::mean_square() const {
  double s = constant.squaredNorm();
  for (const auto& [n, v] : modes) s += v.squaredNorm();
  return s;
}

Eigen::Index grid_size(const std::vector<int>& shape) {
  Eigen::Index n = 1;
  for (int s : shape) {
    if (s <= 0) throw ValidationError("grid shape entries must be positive");
    n *= s;
  }
  return n;
}

std::vector<int> grid_coords(const std::vector<int>& shape, Eigen::Index idx) {
  std::vector<int> c(shape.size());
  for (std::size_t a = shape.size(); a-- > 0;) {
    c[a] = static_cast<int>(idx % shape[a]);
    idx /= shape[a];
  }
  return c;
}

Eigen::Index grid_index(const std::vector<int>& shape, const std::vector<int>& coords) {
  Eigen::Index idx = 0;
  for (std::size_t a = 0; a < shape.size(); ++a) {
    const int n = shape[a];
    idx = idx * n + ((coords[a] % n) + n) % n;
  }
  return idx;
}

void check_aliasing(const FourierField& f, const std::vector<int>& shape) {
  if (static_cast<int>(shape.size()) != f.lattice.d())
    throw ValidationError("grid shape does not match the lattice dimension");
  const auto mx = f.max_index();
  for (std::size_t j = 0; j < shape.size(); ++j)
    if (shape[j] < 2 * mx[j] + 1)
      throw AliasingError("grid axis " + std::to_string(j) + " has " + std::to_string(shape[j]) +
                          " points, need at least " + std::to_string(2 * mx[j] + 1));
}

namespace {

struct ModeTable {
  std::vector<std::vector<int>> n;
  std::vector<Vec> v;
};

ModeTable mode_table(const FourierField& f) {
  ModeTable t;
  for (const auto& [n, v] : f.modes) {
    t.n.push_back(n);
    t.v.push_back(v);
  }
  return t;
}

void fill_point(const FourierField& f, const ModeTable& t, const std::vector<int>& shape,
                Eigen::Index idx, Mat& out) {
  const auto c = grid_coords(shape, idx);
  Vec acc = f.constant;
  for (std::size_t i = 0; i < t.n.size(); ++i) {
    // Reduce the integer phase first so large grids keep full precision.
    double phase = 0.0;
    for (std::size_t a = 0; a < c.size(); ++a) {
      const long r = (static_cast<long>(t.n[i][a]) * c[a]) % shape[a];
      phase += static_cast<double>(r) / shape[a];
    }
    acc += std::polar(1.0, kTwoPi * phase) * t.v[i];
  }
  out.col(idx) = acc;
}

GridField empty_grid(const FourierField& f, const std::vector<int>& shape) {
  check_aliasing(f, shape);
  GridField g;
  g.shape = shape;
  g.cell = f.lattice.direct();
  g.values = Mat(f.dim(), grid_size(shape));
  return g;
}

}  // namespace

GridField to_grid_serial(const FourierField& f, const std::vector<int>& shape) {
  GridField g = empty_grid(f, shape);
  const ModeTable t = mode_table(f);
  for (Eigen::Index i = 0; i < g.npoints(); ++i) fill_point(f, t, shape, i, g.values);
  return g;
}

GridField to_grid_parallel(const FourierField& f, const std::vector<int>& shape) {
  GridField g = empty_grid(f, shape);
  const ModeTable t = mode_table(f);
  const Eigen::Index n = g.npoints();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) fill_point(f, t, shape, i, g.values);
  return g;
}

GridField to_grid(const FourierField& f, const std::vector<int>& shape, Exec exec) {
  return exec == Exec::serial ? to_grid_serial(f, shape) : to_grid_parallel(f, shape);
}

double form_average(const QuadraticForm& form, const FourierField& f) {
  if (f.dim() != form.m()) throw ValidationError("form and field dimensions differ");
  double s = form.apply(f.constant);
  for (const auto& [n, v] : f.modes) s += form.apply(v);
  return s;
}

double form_average(const QuadraticForm& form, const GridField& g) {
  if (g.dim() != form.m()) throw ValidationError("form and field dimensions differ");
  const Mat sv = form.mat() * g.values;
  double s = 0.0;
  for (Eigen::Index i = 0; i < g.npoints(); ++i) s += g.values.col(i).dot(sv.col(i)).real();
  return s / static_cast<double>(g.npoints());
}

Vec field_average(const FourierField& f) { return f.constant; }

Vec field_average(const GridField& g) { return g.values.rowwise().mean(); }

namespace {

Vec project_constant(const OperatorSymbol& sym, const Vec& e0) {
  if (e0.size() != sym.m()) throw ValidationError("average has wrong dimension");
  const Mat q = constant_field_space(sym).basis;
  const Vec p = q * (q.adjoint() * e0);
  if ((p - e0).norm() > 1e-10 * std::max(1.0, e0.norm()))
    std::cerr << "warning: average projected onto the constant-field space (moved by "
              << (p - e0).norm() << ")\n";
  return p;
}

FourierField potential_lift(const OperatorSymbol& sym, const FourierField& e) {
  FourierField u(e.lattice, FieldKind::U, sym.ell());
  for (const auto& [n, v] : e.modes) {
    const Mat l = sym.eval(e.lattice.wavevector(n));
    const Vec un = linalg::pinv(l) * v;
    if ((l * un - v).norm() > 1e-10 * std::max(1.0, v.norm()))
      throw InconsistencyError("mode is not in the range of L(k); certificate and tolerance disagree");
    u.set_mode(n, un);
  }
  return u;
}

}  // namespace

SpecialFields synthesize_special_E(const OperatorSymbol& sym, const QuadraticForm& s,
                                   const ReciprocalLattice& lattice,
                                   const std::map<ModeIndex, Vec>& modes, const Vec& e0) {
  if (s.side() != Side::potential) throw ValidationError("E-side synthesis needs an S form");
  if (s.m() != sym.m() || lattice.d() != sym.d()) throw ValidationError("dimension mismatch");
  const Constraint c = Constraint::potential(sym);
  SpecialFields out{FourierField(lattice, FieldKind::U, sym.ell()),
                    FourierField(lattice, FieldKind::E, sym.m()),
                    FourierField(lattice, FieldKind::J, sym.m())};
  out.e.constant = project_constant(sym, e0);
  for (const auto& [n, v] : modes) {
    if (v.norm() == 0.0) continue;
    const KVec k = lattice.wavevector(n);
    const Mat q = c.basis(k);
    if ((v - q * (q.adjoint() * v)).norm() > 1e-9 * v.norm())
      throw ValidationError("mode is not in range L(k)");
    if ((q.adjoint() * (s.mat() * v)).norm() > 1e-9 * std::max(s.norm(), 1e-300) * v.norm())
      throw SharpnessViolationError("mode is outside the equality subspace of S at k");
    out.e.set_mode(n, v);
  }
  out.u = potential_lift(sym, out.e);
  out.j.constant = s.mat() * out.e.constant;
  for (const auto& [n, v] : out.e.modes) out.j.set_mode(n, s.mat() * v);
  return out;
}

SpecialFields synthesize_special_E(const OperatorSymbol& sym, const QuadraticForm& v_form,
                                   const ReductionStep& step, const ReciprocalLattice& lattice,
                                   const std::map<ModeIndex, cplx>& a, const Vec& e0) {
  if (step.side != Side::potential || step.status != SupStatus::finite)
    throw ValidationError("E-side synthesis needs a finite potential-side reduction step");
  const Constraint c = Constraint::potential(sym);
  const QuadraticForm s(v_form.mat() - step.vec * step.vec.adjoint() / step.value, Side::potential);
  std::map<ModeIndex, Vec> modes;
  for (const auto& [n, an] : a) {
    if (an == cplx(0.0)) continue;
    const KVec k = lattice.wavevector(n);
    const double qv = weighted_quotient(c, v_form.mat(), step.vec, k);
    if (!(qv >= step.value - 1e-8 * std::max(1.0, step.value)))
      throw SharpnessViolationError("a(k) is nonzero at a k that does not attain the supremum");
    modes[n] = an * weighted_gamma(sym, v_form.mat(), k).gamma * step.vec;
  }
  return synthesize_special_E(sym, s, lattice, modes, e0);
}

SpecialFields synthesize_special_J(const OperatorSymbol& sym, const QuadraticForm& t,
                                   const ReciprocalLattice& lattice,
                                   const std::map<ModeIndex, Vec>& modes, const Vec& j0) {
  if (t.side() != Side::flux) throw ValidationError("J-side synthesis needs a T form");
  if (t.m() != sym.m() || lattice.d() != sym.d()) throw ValidationError("dimension mismatch");
  if (j0.size() != sym.m()) throw ValidationError("average has wrong dimension");
  const Constraint c = Constraint::flux(sym);
  SpecialFields out{FourierField(lattice, FieldKind::U, sym.ell()),
                    FourierField(lattice, FieldKind::E, sym.m()),
                    FourierField(lattice, FieldKind::J, sym.m())};
  out.j.constant = j0;
  {
    const Mat q0 = constant_field_space(sym).basis;
    const Vec tj = t.mat() * j0;
    if ((tj - q0 * (q0.adjoint() * tj)).norm() > 1e-10 * std::max(1.0, tj.norm()))
      throw ValidationError("T J0 is not a constant field of the operator");
  }
  for (const auto& [n, v] : modes) {
    if (v.norm() == 0.0) continue;
    const KVec k = lattice.wavevector(n);
    const Mat q = c.basis(k);
    if ((v - q * (q.adjoint() * v)).norm() > 1e-9 * v.norm())
      throw ValidationError("mode is not in null L^*(k)");
    if ((q.adjoint() * (t.mat() * v)).norm() > 1e-9 * std::max(t.norm(), 1e-300) * v.norm())
      throw SharpnessViolationError("mode is outside the equality subspace of T at k");
    out.j.set_mode(n, v);
  }
  out.e.constant = t.mat() * j0;
  for (const auto& [n, v] : out.j.modes) out.e.set_mode(n, t.mat() * v);
  out.u = potential_lift(sym, out.e);
  return out;
}

SpecialFields synthesize_special_J(const OperatorSymbol& sym, const QuadraticForm& w_form,
                                   const ReductionStep& step, const ReciprocalLattice& lattice,
                                   const std::map<ModeIndex, cplx>& b, const Vec& j0) {
  if (step.side != Side::flux || step.status != SupStatus::finite)
    throw ValidationError("J-side synthesis needs a finite flux-side reduction step");
  const Constraint c = Constraint::flux(sym);
  const QuadraticForm t(w_form.mat() - step.vec * step.vec.adjoint() / step.value, Side::flux);
  std::map<ModeIndex, Vec> modes;
  for (const auto& [n, bn] : b) {
    if (bn == cplx(0.0)) continue;
    const KVec k = lattice.wavevector(n);
    const double qv = weighted_quotient(c, w_form.mat(), step.vec, k);
    if (!(qv >= step.value - 1e-8 * std::max(1.0, step.value)))
      throw SharpnessViolationError("b(k) is nonzero at a k that does not attain the supremum");
    modes[n] = bn * flux_weighted_delta(sym, w_form.mat(), k) * step.vec;
  }
  return synthesize_special_J(sym, t, lattice, modes, j0);
}

namespace {

Vec gaussian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v[i] = cplx(re, im);
  }
  return v;
}

}  // namespace

FourierField random_admissible(const OperatorSymbol& sym, const ReciprocalLattice& lattice,
                               FieldKind side, int n_modes, std::uint64_t seed, bool real) {
  if (n_modes < 1) throw ValidationError("n_modes must be at least 1");
  if (side == FieldKind::U) throw ValidationError("admissible fields are E or J");
  if (lattice.d() != sym.d()) throw ValidationError("lattice dimension differs from the operator");
  if (real && !sym.conjugate_symmetric())
    throw UnsupportedError("real fields need a conjugate-symmetric symbol");
  const int d = sym.d();
  std::mt19937_64 rng(seed);

  // Distinct nonzero indices in a box that grows until enough are available.
  int radius = 2;
  auto box_count = [&](int r) { return static_cast<long>(std::pow(2 * r + 1, d)) - 1; };
  while (box_count(radius) < 2L * n_modes) ++radius;
  std::uniform_int_distribution<int> pick(-radius, radius);
  std::set<ModeIndex> chosen;
  std::vector<ModeIndex> order;
  while (static_cast<int>(order.size()) < n_modes) {
    ModeIndex n(static_cast<std::size_t>(d));
    for (auto& x : n) x = pick(rng);
    if (std::all_of(n.begin(), n.end(), [](int x) { return x == 0; })) continue;
    ModeIndex neg(n.size());
    std::transform(n.begin(), n.end(), neg.begin(), [](int x) { return -x; });
    if (chosen.count(n) || (real && chosen.count(neg))) continue;
    chosen.insert(n);
    order.push_back(n);
  }

  const int m = sym.m();
  FourierField f(lattice, side, m);
  if (side == FieldKind::E) {
    const Mat q0 = constant_field_space(sym).basis;
    Vec c0 = q0.cols() ? Vec(q0 * gaussian(rng, q0.cols())) : Vec(Vec::Zero(m));
    if (real) c0 = (c0 + c0.conjugate()) / 2.0;
    f.constant = c0;
  } else {
    const Mat q0 = linalg::null_basis(sym.zero_order().adjoint());
    Vec c0 = q0.cols() ? Vec(q0 * gaussian(rng, q0.cols())) : Vec(Vec::Zero(m));
    if (real) c0 = (c0 + c0.conjugate()) / 2.0;
    f.constant = c0;
  }
  for (const auto& n : order) {
    const KVec k = lattice.wavevector(n);
    Vec v;
    if (side == FieldKind::E) {
      const Mat l = sym.eval(k);
      v = l * gaussian(rng, sym.ell());
      v /= std::max(l.norm(), 1e-300);
    } else {
      v = projections(sym, k).gamma2 * gaussian(rng, m);
    }
    f.set_mode(n, v);
    if (real) {
      ModeIndex neg(n.size());
      std::transform(n.begin(), n.end(), neg.begin(), [](int x) { return -x; });
      f.set_mode(neg, v.conjugate());
    }
  }
  return f;
}

double constraint_residual(const OperatorSymbol& sym, const FourierField& f) {
  if (f.dim() != sym.m()) throw ValidationError("field dimension differs from the operator");
  double worst = 0.0;
  // Modes at round-off level relative to the whole field carry no direction.
  const double floor = 1e-14 * std::sqrt(f.mean_square());
  for (const auto& [n, v] : f.modes) {
    if (v.norm() <= floor || v.norm() == 0.0) continue;
    const KVec k = f.lattice.wavevector(n);
    const double scale = v.norm();
    if (f.kind == FieldKind::J) {
      const Mat l = sym.eval(k);
      worst = std::max(worst, (l.adjoint() * v).norm() / (std::max(l.norm(), 1e-300) * scale));
    } else {
      const Mat q = linalg::range_basis(sym.eval(k));
      worst = std::max(worst, (v - q * (q.adjoint() * v)).norm() / scale);
    }
  }
  return worst;
}

FourierField apply_symbol(const OperatorSymbol& sym, const FourierField& u, FieldKind kind) {
  if (u.dim() != sym.ell()) throw ValidationError("potential dimension differs from the operator");
  FourierField e(u.lattice, kind, sym.m());
  e.constant = sym.zero_order() * u.constant;
  for (const auto& [n, v] : u.modes) e.set_mode(n, sym.eval(u.lattice.wavevector(n)) * v);
  return e;
}

}  // namespace qstar
