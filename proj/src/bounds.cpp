#include "qstar/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "qstar/linalg.hpp"

namespace qstar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

RVec frac_point(const std::vector<int>& shape, Eigen::Index idx) {
  const auto c = grid_coords(shape, idx);
  RVec s(static_cast<Eigen::Index>(shape.size()));
  for (std::size_t a = 0; a < shape.size(); ++a)
    s[static_cast<Eigen::Index>(a)] = static_cast<double>(c[a]) / shape[a];
  return s;
}

double min_edge(const RMat& direct) {
  double e = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < direct.rows(); ++i) e = std::min(e, direct.row(i).norm());
  return e;
}

}  // namespace

MaskGeometry parse_omega(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("omega must look like ball:R or box:F");
  MaskGeometry g;
  g.kind = text.substr(0, colon);
  if (g.kind != "ball" && g.kind != "box") throw ValidationError("unknown omega kind '" + g.kind + "'");
  try {
    std::size_t used = 0;
    g.param = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ValidationError("bad omega parameter in '" + text + "'");
  }
  if (!(g.param > 0.0)) throw ValidationError("omega parameter must be positive");
  return g;
}

Eigen::Index DomainMask::count() const {
  return static_cast<Eigen::Index>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

DomainMask make_mask(const MaskGeometry& geom, const ReciprocalLattice& lattice,
                     const std::vector<int>& shape) {
  if (static_cast<int>(shape.size()) != lattice.d())
    throw ValidationError("grid shape does not match the lattice dimension");
  const RMat a = lattice.direct();
  const RVec center = 0.5 * a.colwise().sum().transpose();
  const double radius = geom.param * min_edge(a);
  DomainMask m;
  m.geometry = geom;
  m.shape = shape;
  const Eigen::Index n = grid_size(shape);
  m.inside.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const RVec s = frac_point(shape, i);
    bool in = false;
    if (geom.kind == "ball") {
      const RVec x = a.transpose() * s;
      in = (x - center).norm() <= radius;
    } else if (geom.kind == "box") {
      in = ((s.array() - 0.5).abs() <= 0.5 * geom.param + 1e-12).all();
    } else {
      throw ValidationError("unknown omega kind '" + geom.kind + "'");
    }
    m.inside[static_cast<std::size_t>(i)] = in ? 1 : 0;
  }
  const Eigen::Index c = m.count();
  if (c == 0) throw ValidationError("omega contains no grid points");
  if (c == n) throw ValidationError("omega covers the whole cell");
  m.volume_fraction = static_cast<double>(c) / static_cast<double>(n);
  return m;
}

DomainMask erode(const DomainMask& mask, int layers) {
  DomainMask out = mask;
  const int d = static_cast<int>(mask.shape.size());
  const Eigen::Index n = grid_size(mask.shape);
  std::vector<std::vector<int>> offsets{{}};
  for (int a = 0; a < d; ++a) {
    std::vector<std::vector<int>> next;
    for (const auto& o : offsets)
      for (int s = -layers; s <= layers; ++s) {
        auto e = o;
        e.push_back(s);
        next.push_back(std::move(e));
      }
    offsets = std::move(next);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!mask.inside[static_cast<std::size_t>(i)]) continue;
    const auto c = grid_coords(mask.shape, i);
    bool keep = true;
    for (const auto& o : offsets) {
      std::vector<int> nb(c);
      for (int a = 0; a < d; ++a) nb[static_cast<std::size_t>(a)] += o[static_cast<std::size_t>(a)];
      if (!mask.inside[static_cast<std::size_t>(grid_index(mask.shape, nb))]) {
        keep = false;
        break;
      }
    }
    out.inside[static_cast<std::size_t>(i)] = keep ? 1 : 0;
  }
  out.volume_fraction = static_cast<double>(out.count()) / static_cast<double>(n);
  return out;
}

DiscreteOperator::DiscreteOperator(OperatorSymbol sym, const ReciprocalLattice& lattice,
                                   std::vector<int> shape, std::vector<int> nbar)
    : sym_(std::move(sym)), basis_(lattice.basis), shape_(std::move(shape)) {
  const int d = sym_.d();
  if (lattice.d() != d || static_cast<int>(shape_.size()) != d)
    throw ValidationError("operator, lattice and grid dimensions differ");
  if (nbar.empty()) nbar.assign(static_cast<std::size_t>(d), 1);
  stride_.assign(static_cast<std::size_t>(d), 1);
  for (int a = d - 2; a >= 0; --a)
    stride_[static_cast<std::size_t>(a)] =
        stride_[static_cast<std::size_t>(a) + 1] * shape_[static_cast<std::size_t>(a) + 1];
  for (int a = 0; a < d; ++a) {
    const int nb = std::max(1, nbar[static_cast<std::size_t>(a)]);
    const int na = shape_[static_cast<std::size_t>(a)];
    if (na < 2 * nb + 1) throw AliasingError("grid too coarse for the difference stencil");
    coef_.push_back(std::numbers::pi * nb / std::sin(kTwoPi * nb / na));
  }
}

Vec DiscreteOperator::axis_difference(const Vec& f, int axis) const {
  const Eigen::Index n = f.size();
  const Eigen::Index st = stride_[static_cast<std::size_t>(axis)];
  const int na = shape_[static_cast<std::size_t>(axis)];
  const double c = coef_[static_cast<std::size_t>(axis)];
  Vec out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = static_cast<int>((i / st) % na);
    const Eigen::Index up = j == na - 1 ? i - (na - 1) * st : i + st;
    const Eigen::Index dn = j == 0 ? i + (na - 1) * st : i - st;
    out[i] = c * (f[up] - f[dn]);
  }
  return out;
}

Vec DiscreteOperator::x_derivative(const Vec& f, int a) const {
  Vec out = Vec::Zero(f.size());
  for (int i = 0; i < sym_.d(); ++i) {
    const double w = basis_(i, a) / kTwoPi;
    if (w != 0.0) out += w * axis_difference(f, i);
  }
  return out;
}

Mat DiscreteOperator::apply(const Mat& potential) const {
  if (potential.rows() != sym_.ell() || potential.cols() != grid_size(shape_))
    throw ValidationError("potential has the wrong shape for this operator");
  Mat out = Mat::Zero(sym_.m(), potential.cols());
  for (int q = 0; q < sym_.ell(); ++q) {
    std::map<Exponents, Vec> cache;
    cache[Exponents(static_cast<std::size_t>(sym_.d()), 0)] = potential.row(q).transpose();
    std::function<const Vec&(const Exponents&)> deriv = [&](const Exponents& e) -> const Vec& {
      auto it = cache.find(e);
      if (it != cache.end()) return it->second;
      Exponents prev = e;
      int a = 0;
      while (prev[static_cast<std::size_t>(a)] == 0) ++a;
      --prev[static_cast<std::size_t>(a)];
      Vec v = x_derivative(deriv(prev), a);
      return cache.emplace(e, std::move(v)).first->second;
    };
    for (int r = 0; r < sym_.m(); ++r)
      for (const auto& [e, c] : sym_.entry(r, q).terms()) {
        int order = 0;
        for (int x : e) order += x;
        cplx factor = c;
        for (int h = 0; h < order; ++h) factor *= cplx(0.0, -1.0);
        out.row(r) += (factor * deriv(e)).transpose();
      }
  }
  return out;
}

KVec DiscreteOperator::effective_wavevector(const std::vector<int>& n) const {
  const int d = sym_.d();
  KVec k = KVec::Zero(d);
  for (int i = 0; i < d; ++i) {
    const double s = 2.0 * coef_[static_cast<std::size_t>(i)] *
                     std::sin(kTwoPi * n[static_cast<std::size_t>(i)] /
                              shape_[static_cast<std::size_t>(i)]);
    k += (s / kTwoPi) * basis_.row(i).transpose();
  }
  return k;
}

double DiscreteOperator::scale() const {
  double dn = 0.0;
  for (int i = 0; i < sym_.d(); ++i)
    dn += 2.0 * coef_[static_cast<std::size_t>(i)] * basis_.row(i).norm() / kTwoPi;
  double cmax = 0.0;
  for (const auto& p : sym_.entries())
    for (const auto& [e, c] : p.terms()) cmax = std::max(cmax, std::abs(c));
  return std::pow(std::max(1.0, dn), std::max(order(), 0)) * std::max(cmax, 1e-300);
}

AncillaryResult ancillary_check(const OperatorSymbol& sym, const QuadraticForm& form) {
  if (form.m() != sym.m()) throw ValidationError("form and operator dimensions differ");
  AncillaryResult r;
  const double scale = std::max(1.0, form.norm());
  if (form.side() == Side::potential) {
    r.residual = linalg::norm2(form.mat() * sym.zero_order()) / scale;
    r.detail = "||S A|| / max(1, ||S||)";
  } else {
    const Mat q = constant_field_space(sym).basis;
    const Mat t = form.mat();
    r.residual = linalg::norm2(t - q * (q.adjoint() * t)) / scale;
    r.detail = "||(I - P_E0) T|| / max(1, ||T||)";
  }
  r.ok = r.residual <= 1e-12;
  return r;
}

namespace {

double masked_average(const QuadraticForm& form, const GridField& g, const DomainMask& m) {
  const Mat sv = form.mat() * g.values;
  double s = 0.0;
  for (Eigen::Index i = 0; i < g.npoints(); ++i)
    if (m.inside[static_cast<std::size_t>(i)]) s += g.values.col(i).dot(sv.col(i)).real();
  return s / static_cast<double>(m.count());
}

}  // namespace

F0Estimate f0_volume(const QuadraticForm& form, const FourierField& special,
                     const DomainMask& mask, Exec exec) {
  if (special.dim() != form.m()) throw ValidationError("form and field dimensions differ");
  const double omega = mask.volume_fraction * special.lattice.cell_volume;
  const double avg = masked_average(form, to_grid(special, mask.shape, exec), mask);

  std::vector<int> fine(mask.shape);
  for (int& n : fine) n *= 2;
  const DomainMask mask2 = make_mask(mask.geometry, special.lattice, fine);
  const double avg2 = masked_average(form, to_grid(special, fine, exec), mask2);

  F0Estimate e;
  e.value = avg * omega;
  e.refined = avg2 * mask2.volume_fraction * special.lattice.cell_volume;
  const double ref = std::max(std::abs(avg), form.norm() * special.mean_square());
  e.rel_change = ref > 0.0 ? std::abs(avg2 - avg) / ref : 0.0;
  return e;
}

Mat bump_potential(int components, const DomainMask& support, const ReciprocalLattice& lattice,
                   std::uint64_t seed, bool real) {
  const int d = lattice.d();
  const RMat a = lattice.direct();
  const RVec center = 0.5 * a.colwise().sum().transpose();
  const Eigen::Index n = grid_size(support.shape);

  // The bump reaches zero just past the outermost support point.
  double reach = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (support.inside[static_cast<std::size_t>(i)])
      reach = std::max(reach, (a.transpose() * frac_point(support.shape, i) - center).norm());
  double h = 0.0;
  for (int i = 0; i < d; ++i) h = std::max(h, a.row(i).norm() / support.shape[static_cast<std::size_t>(i)]);
  reach += h;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> pick(-2, 2);
  constexpr int kTerms = 4;
  std::vector<std::vector<int>> freq(kTerms, std::vector<int>(static_cast<std::size_t>(d)));
  Mat coeff(components, kTerms);
  for (int t = 0; t < kTerms; ++t) {
    for (auto& f : freq[static_cast<std::size_t>(t)]) f = pick(rng);
    for (int c = 0; c < components; ++c) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      coeff(c, t) = cplx(re, im);
    }
  }

  Mat phi = Mat::Zero(components, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!support.inside[static_cast<std::size_t>(i)]) continue;
    const RVec s = frac_point(support.shape, i);
    const double rho = (a.transpose() * s - center).norm() / reach;
    if (rho >= 1.0) continue;
    const double bump = std::exp(1.0 - 1.0 / (1.0 - rho * rho));
    for (int t = 0; t < kTerms; ++t) {
      double phase = 0.0;
      for (int j = 0; j < d; ++j) phase += freq[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] * s[j];
      phi.col(i) += bump * std::polar(1.0, kTwoPi * phase) * coeff.col(t);
    }
  }
  if (real) phi = phi.real().cast<cplx>();
  return phi;
}

namespace {

double rms(const Mat& f) {
  return f.cols() ? std::sqrt(f.squaredNorm() / static_cast<double>(f.cols())) : 0.0;
}

double max_col_norm(const Mat& f) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < f.cols(); ++i) m = std::max(m, f.col(i).norm());
  return m;
}

Competitor perturb(const DiscreteOperator& op, const Mat& special, const DomainMask& support,
                   const ReciprocalLattice& lattice, std::uint64_t seed, bool real,
                   const std::string& tag) {
  if (special.rows() != op.symbol().m() || special.cols() != grid_size(support.shape))
    throw ValidationError("special field has the wrong shape");
  Competitor c;
  c.id = tag + "-" + std::to_string(seed);
  c.potential = bump_potential(op.symbol().ell(), support, lattice, seed, real);
  Mat delta = op.apply(c.potential);
  const double peak = max_col_norm(delta);
  if (peak > 0.0) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const double amp = std::uniform_real_distribution<double>(0.2, 1.5)(rng);
    const double ref = rms(special) > 0.0 ? rms(special) : 1.0;
    const double k = amp * ref / peak;
    delta *= k;
    c.potential *= k;
  }
  c.field = special + delta;
  return c;
}

}  // namespace

Competitor competitor_E(const DiscreteOperator& l, const Mat& special, const DomainMask& mask,
                        const ReciprocalLattice& lattice, std::uint64_t seed, bool real) {
  const int g = std::max(2, l.order());
  const DomainMask support = erode(mask, g);
  if (support.count() == 0) throw GuardBandError("omega is too thin for the guard band");
  return perturb(l, special, support, lattice, seed, real, "bump-E");
}

Competitor competitor_J(const DiscreteOperator& flux_potential, const Mat& special,
                        const DomainMask& mask, const ReciprocalLattice& lattice,
                        std::uint64_t seed, bool real) {
  const int g = std::max(2, flux_potential.order());
  const DomainMask support = erode(mask, g);
  if (support.count() == 0) throw GuardBandError("omega is too thin for the guard band");
  return perturb(flux_potential, special, support, lattice, seed, real, "bump-J");
}

void check_flux_potential(const OperatorSymbol& sym, const OperatorSymbol& potential,
                          std::uint64_t seed) {
  if (potential.d() != sym.d() || potential.m() != sym.m())
    throw ValidationError("flux potential dimensions do not match the operator");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    KVec k(sym.d());
    for (int a = 0; a < sym.d(); ++a) k[a] = g(rng);
    const Mat l = sym.eval(k);
    const Mat m = potential.eval(k);
    const double scale = std::max(l.norm() * m.norm(), 1e-300);
    if ((l.adjoint() * m).norm() > 1e-10 * scale)
      throw UnsupportedError("supplied flux potential does not satisfy L^*(k) M(k) = 0");
  }
}

BoundSummary verify_bound(const OperatorSymbol& sym, const QuadraticForm& form,
                          const FourierField& special, const DomainMask& mask,
                          const BoundOptions& opt) {
  if (form.m() != sym.m() || special.dim() != sym.m())
    throw ValidationError("form, field and operator dimensions differ");
  if (opt.n_competitors < 0) throw ValidationError("competitor count must be nonnegative");
  const bool flux = form.side() == Side::flux;
  if (special.kind != (flux ? FieldKind::J : FieldKind::E))
    throw ValidationError(flux ? "T forms are verified on J fields" : "S forms are verified on E fields");
  const auto& shape = mask.shape;
  check_aliasing(special, shape);
  const ReciprocalLattice& lat = special.lattice;

  BoundSummary out;
  std::vector<int> nbar(static_cast<std::size_t>(sym.d()), 1);
  for (int a = 0; a < sym.d(); ++a) {
    std::set<int> seen;
    for (const auto& [n, v] : special.modes)
      if (n[static_cast<std::size_t>(a)] != 0) seen.insert(std::abs(n[static_cast<std::size_t>(a)]));
    if (!seen.empty()) nbar[static_cast<std::size_t>(a)] = *seen.rbegin();
    if (seen.size() > 1) out.exact_wavenumber = false;
  }

  std::optional<DiscreteOperator> op;
  std::optional<DiscreteOperator> adjoint;
  if (flux) {
    if (!opt.flux_potential)
      throw UnsupportedError(
          "no constraint-preserving interior perturbation is known for this operator; "
          "supply a flux potential");
    check_flux_potential(sym, *opt.flux_potential);
    op.emplace(*opt.flux_potential, lat, shape, nbar);
    adjoint.emplace(adjoint_symbol(sym), lat, shape, nbar);
  } else {
    op.emplace(sym, lat, shape, nbar);
  }
  out.guard_layers = std::max(2, op->order());
  if (erode(mask, out.guard_layers).count() == 0)
    throw GuardBandError("omega is too thin for the guard band");

  out.f0 = f0_volume(form, special, mask, opt.exec);
  out.ancillary = ancillary_check(sym, form);

  const Mat base = to_grid(special, shape, opt.exec).values;
  const Vec base_avg = base.rowwise().mean();
  const double cell = lat.cell_volume;
  const double dv = cell / static_cast<double>(base.cols());
  const double omega = mask.volume_fraction * cell;
  const Mat& s = form.mat();
  const Mat s_base = s * base;
  const double base_rms = rms(base);

  auto masked_ms = [&](const Mat& f) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < f.cols(); ++i)
      if (mask.inside[static_cast<std::size_t>(i)]) acc += f.col(i).squaredNorm();
    return acc / static_cast<double>(mask.count());
  };
  const double base_ms = masked_ms(base);

  const int total = opt.n_competitors + 1;
  out.reports.resize(static_cast<std::size_t>(total));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(total));
  const bool real = special.is_real() && sym.conjugate_symmetric();

  auto run_one = [&](int i) {
    BoundReport r;
    Competitor c;
    if (i == 0) {
      c.id = "special";
      c.field = base;
    } else {
      std::seed_seq sq{static_cast<std::uint64_t>(opt.seed), static_cast<std::uint64_t>(i)};
      std::uint64_t cs = 0;
      std::vector<std::uint32_t> words(2);
      sq.generate(words.begin(), words.end());
      cs = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
      c = flux ? competitor_J(*op, base, mask, lat, cs, real)
               : competitor_E(*op, base, mask, lat, cs, real);
      c.id = (flux ? "bump-J-" : "bump-E-") + std::to_string(i);
    }
    const Mat delta = c.field - base;
    const Mat s_delta = s * delta;
    double raw = 0.0;
    for (Eigen::Index p = 0; p < base.cols(); ++p) {
      if (!mask.inside[static_cast<std::size_t>(p)]) continue;
      raw += 2.0 * s_base.col(p).dot(delta.col(p)).real() + delta.col(p).dot(s_delta.col(p)).real();
    }
    raw *= dv;
    const Vec davg = delta.rowwise().mean();
    r.competitor_id = c.id;
    r.f0 = out.f0.value;
    r.lhs = out.f0.value + raw;
    r.ancillary_ok = out.ancillary.ok;
    if (!out.ancillary.ok)
      r.correction = cell * (2.0 * (s * base_avg).dot(davg).real() + davg.dot(s * davg).real());
    r.margin = raw - r.correction;
    r.scale = form.norm() * std::max(base_ms, masked_ms(c.field)) * omega;
    r.equality_case = i == 0;
    r.average_mismatch = davg.norm() / (base_rms > 0.0 ? base_rms : 1.0);
    if (flux && i > 0) {
      const double peak = max_col_norm(delta);
      const Mat res = adjoint->apply(delta);
      r.constraint_residual = peak > 0.0 ? max_col_norm(res) / (peak * adjoint->scale()) : 0.0;
    }
    out.reports[static_cast<std::size_t>(i)] = std::move(r);
  };

  if (opt.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < total; ++i) {
      try {
        run_one(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (int i = 0; i < total; ++i) run_one(i);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace qstar
