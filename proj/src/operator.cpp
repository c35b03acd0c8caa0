#include "qstar/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <iostream>
#include <numeric>

#include "qstar/linalg.hpp"

namespace qstar {

namespace {

cplx ipow(int h) {
  switch (((h % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

void OperatorSpec::validate() const {
  if (d <= 0 || ell <= 0 || m <= 0 || t < 0)
    throw ValidationError("operator dimensions must be positive");
  if (zero_order.rows() != m || zero_order.cols() != ell)
    throw ValidationError("zero_order must be an m x ell matrix");
  bool nonzero = zero_order.cwiseAbs().maxCoeff() > 0.0;
  for (const auto& c : deriv_coeffs) {
    if (c.r < 0 || c.r >= m || c.q < 0 || c.q >= ell)
      throw ValidationError("derivative coefficient index (r, q) out of range");
    const int h = static_cast<int>(c.idx.size());
    if (h < 1 || h > t)
      throw ValidationError("derivative order must lie in 1..t");
    for (int a : c.idx)
      if (a < 0 || a >= d)
        throw ValidationError("derivative multi-index entry out of range 1..d");
    if (c.value != cplx(0.0)) nonzero = true;
  }
  if (!nonzero) throw ValidationError("operator has no nonzero coefficient");
}

OperatorSymbol::OperatorSymbol(int d, int ell, int m, std::vector<Polynomial> entries)
    : d_(d), ell_(ell), m_(m), entries_(std::move(entries)) {
  if (d <= 0 || ell <= 0 || m <= 0)
    throw ValidationError("symbol dimensions must be positive");
  if (static_cast<int>(entries_.size()) != ell * m)
    throw ValidationError("symbol needs m * ell entries");
  for (auto& p : entries_) {
    if (p.dim() == 0 && p.is_zero()) p = Polynomial(d);
    if (p.dim() != d) throw ValidationError("symbol entry has wrong dimension");
  }
  conj_sym_ = true;
  int mind = std::numeric_limits<int>::max();
  int maxd = 0;
  bool any = false;
  for (const auto& p : entries_) {
    if (!p.conjugate_symmetric()) conj_sym_ = false;
    for (const auto& [e, c] : p.terms()) {
      const int deg = std::accumulate(e.begin(), e.end(), 0);
      mind = std::min(mind, deg);
      maxd = std::max(maxd, deg);
      any = true;
    }
  }
  degree_ = maxd;
  homogeneous_ = any && mind == maxd && maxd > 0;
}

Mat OperatorSymbol::eval(const KVec& k) const {
  if (k.size() != d_) throw ValidationError("wavevector has wrong dimension");
  if (!k.allFinite()) throw ValidationError("wavevector must be finite");
  Mat out(m_, ell_);
  for (int r = 0; r < m_; ++r)
    for (int q = 0; q < ell_; ++q) out(r, q) = entries_[r * ell_ + q](k);
  return out;
}

Mat OperatorSymbol::eval_adjoint(const KVec& k) const { return eval(k).adjoint(); }

Mat OperatorSymbol::zero_order() const { return eval(KVec::Zero(d_)); }

OperatorSymbol symbol_from_spec(const OperatorSpec& spec) {
  spec.validate();
  std::vector<Polynomial> entries(spec.m * spec.ell, Polynomial(spec.d));
  for (int r = 0; r < spec.m; ++r)
    for (int q = 0; q < spec.ell; ++q)
      entries[r * spec.ell + q].add_term(Exponents(spec.d, 0), spec.zero_order(r, q));
  for (const auto& c : spec.deriv_coeffs) {
    Exponents e(spec.d, 0);
    for (int a : c.idx) ++e[a];
    const int h = static_cast<int>(c.idx.size());
    entries[c.r * spec.ell + c.q].add_term(e, ipow(h) * c.value);
  }
  OperatorSymbol sym(spec.d, spec.ell, spec.m, std::move(entries));
  sym.set_spec(spec);
  return sym;
}

OperatorSymbol symbol_from_polynomials(
    const std::vector<std::vector<Polynomial>>& rows) {
  if (rows.empty() || rows.front().empty())
    throw ValidationError("symbol matrix must be non-empty");
  const std::size_t ell = rows.front().size();
  int d = 0;
  for (const auto& row : rows) {
    if (row.size() != ell) throw ValidationError("ragged symbol matrix");
    for (const auto& p : row) d = std::max(d, p.dim());
  }
  if (d == 0) throw ValidationError("cannot infer spatial dimension of symbol");
  std::vector<Polynomial> entries;
  for (const auto& row : rows)
    for (const auto& p : row) {
      if (p.dim() != 0 && p.dim() != d)
        throw ValidationError("symbol entries disagree on spatial dimension");
      entries.push_back(p.dim() == 0 ? Polynomial(d) : p);
    }
  return OperatorSymbol(d, static_cast<int>(ell), static_cast<int>(rows.size()),
                        std::move(entries));
}

const char* side_name(Side s) { return s == Side::potential ? "S" : "T"; }

Side parse_side(const std::string& s) {
  if (s == "S" || s == "s" || s == "potential") return Side::potential;
  if (s == "T" || s == "t" || s == "flux") return Side::flux;
  throw ValidationError("side must be S or T, got '" + s + "'");
}

QuadraticForm::QuadraticForm(Mat mat, Side side) : side_(side) {
  if (mat.rows() != mat.cols() || mat.rows() == 0)
    throw ValidationError("quadratic form must be a non-empty square matrix");
  if (!mat.allFinite()) throw ValidationError("quadratic form has non-finite entries");
  Mat herm = 0.5 * (mat + mat.adjoint());
  const double scale = std::max(mat.norm(), 1e-300);
  correction_ = (herm - mat).norm() / scale;
  if (correction_ > 1e-9)
    std::cerr << "warning: quadratic form symmetrized (relative correction "
              << correction_ << ")\n";
  mat_ = std::move(herm);
  norm_ = linalg::norm2(mat_);
}

double QuadraticForm::apply(const Vec& h) const {
  if (h.size() != mat_.rows())
    throw ValidationError("field vector dimension does not match the form");
  return h.dot(mat_ * h).real();  // dot() conjugates the first argument
}

QuadraticForm QuadraticForm::scaled(double c) const {
  return QuadraticForm(mat_ * c, side_);
}

std::vector<Polynomial> apply_operator(const OperatorSymbol& sym,
                                       const PolynomialPotential& u) {
  if (u.ell != sym.ell() || static_cast<int>(u.components.size()) != sym.ell())
    throw ValidationError("potential has wrong number of components");
  const int d = sym.d();
  std::vector<Polynomial> out(sym.m(), Polynomial(d));
  for (int r = 0; r < sym.m(); ++r)
    for (int q = 0; q < sym.ell(); ++q)
      for (const auto& [a, c] : sym.entry(r, q).terms()) {
        const int h = std::accumulate(a.begin(), a.end(), 0);
        const cplx op_coeff = c * ipow(-h);  // k_a <-> -i d/dx_a
        for (const auto& [beta, b] : u.components[q].terms()) {
          Exponents g(d);
          double falling = 1.0;
          bool zero = false;
          for (int j = 0; j < d; ++j) {
            if (beta[j] < a[j]) { zero = true; break; }
            for (int s = 0; s < a[j]; ++s) falling *= beta[j] - s;
            g[j] = beta[j] - a[j];
          }
          if (!zero) out[r].add_term(g, op_coeff * b * falling);
        }
      }
  return out;
}

ConstantFieldSpace constant_field_space(const OperatorSymbol& sym) {
  const int d = sym.d(), ell = sym.ell(), m = sym.m();
  const int deg = sym.spec() ? sym.spec()->t : sym.degree();
  const auto mons = monomials_up_to(d, deg);
  const int nm = static_cast<int>(mons.size());
  std::map<Exponents, int> index;
  for (int j = 0; j < nm; ++j) index[mons[j]] = j;

  // Column (q, beta): coefficients of L (x^beta e_q) on rows (r, gamma).
  Mat big = Mat::Zero(static_cast<Eigen::Index>(m) * nm, static_cast<Eigen::Index>(ell) * nm);
  for (int q = 0; q < ell; ++q)
    for (int j = 0; j < nm; ++j) {
      PolynomialPotential u{ell, std::vector<Polynomial>(ell, Polynomial(d))};
      u.components[q].add_term(mons[j], 1.0);
      const auto lu = apply_operator(sym, u);
      for (int r = 0; r < m; ++r)
        for (const auto& [g, c] : lu[r].terms())
          big(r * nm + index.at(g), q * nm + j) += c;
    }
  Mat constant_rows(m, big.cols());
  Mat varying_rows(static_cast<Eigen::Index>(m) * (nm - 1), big.cols());
  for (int r = 0; r < m; ++r) {
    constant_rows.row(r) = big.row(r * nm);  // mons[0] is the constant monomial
    for (int j = 1; j < nm; ++j)
      varying_rows.row(r * (nm - 1) + (j - 1)) = big.row(r * nm + j);
  }
  Mat z = varying_rows.rows() ? linalg::null_basis(varying_rows)
                              : Mat(Mat::Identity(big.cols(), big.cols()));
  Mat image = constant_rows * z;
  ConstantFieldSpace out;
  out.max_degree = deg;
  out.basis = linalg::range_basis(image, 1e-10);
  Mat lift = linalg::pinv(image, 1e-10);
  for (Eigen::Index j = 0; j < out.basis.cols(); ++j) {
    Vec coeffs = z * (lift * out.basis.col(j));
    PolynomialPotential u{ell, std::vector<Polynomial>(ell, Polynomial(d))};
    for (int q = 0; q < ell; ++q)
      for (int i = 0; i < nm; ++i) {
        const cplx c = coeffs[q * nm + i];
        if (std::abs(c) > 1e-13) u.components[q].add_term(mons[i], c);
      }
    out.potentials.push_back(std::move(u));
  }
  return out;
}

}  // namespace qstar
