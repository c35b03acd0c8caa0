#include "qstar/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qstar {

Polynomial Polynomial::constant(int dim, cplx c) {
  Polynomial p(dim);
  p.add_term(Exponents(dim, 0), c);
  return p;
}

Polynomial Polynomial::variable(int dim, int var, cplx c) {
  Polynomial p(dim);
  Exponents e(dim, 0);
  e.at(var) = 1;
  p.add_term(e, c);
  return p;
}

void Polynomial::add_term(const Exponents& e, cplx c) {
  if (static_cast<int>(e.size()) != dim_)
    throw ValidationError("polynomial term has " + std::to_string(e.size()) +
                          " exponents, expected " + std::to_string(dim_));
  for (int x : e)
    if (x < 0) throw ValidationError("negative exponent in polynomial term");
  if (c == cplx(0.0)) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx(0.0)) terms_.erase(it);
  }
}

double monomial_value(const Exponents& e, const KVec& k) {
  double v = 1.0;
  for (std::size_t a = 0; a < e.size(); ++a)
    for (int p = 0; p < e[a]; ++p) v *= k[static_cast<Eigen::Index>(a)];
  return v;
}

cplx Polynomial::operator()(const KVec& k) const {
  cplx s = 0.0;
  for (const auto& [e, c] : terms_) s += c * monomial_value(e, k);
  return s;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_)
    d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

int Polynomial::min_degree() const {
  if (terms_.empty()) return 0;
  int d = std::numeric_limits<int>::max();
  for (const auto& [e, c] : terms_)
    d = std::min(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

cplx Polynomial::coeff(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? cplx(0.0) : it->second;
}

bool Polynomial::conjugate_symmetric(double tol) const {
  for (const auto& [e, c] : terms_) {
    const int deg = std::accumulate(e.begin(), e.end(), 0);
    const double bad = (deg % 2 == 0) ? std::abs(c.imag()) : std::abs(c.real());
    if (bad > tol * std::abs(c)) return false;
  }
  return true;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  if (r.dim_ == 0) r.dim_ = o.dim_;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(std::max(dim_, o.dim_));
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : o.terms_) {
      Exponents e(e1.size());
      for (std::size_t a = 0; a < e.size(); ++a) e[a] = e1[a] + e2[a];
      r.add_term(e, c1 * c2);
    }
  return r;
}

Polynomial Polynomial::operator*(cplx c) const {
  Polynomial r(dim_);
  for (const auto& [e, v] : terms_) r.add_term(e, v * c);
  return r;
}

Polynomial Polynomial::pruned(double rel) const {
  double mx = 0.0;
  for (const auto& [e, c] : terms_) mx = std::max(mx, std::abs(c));
  Polynomial r(dim_);
  for (const auto& [e, c] : terms_) {
    if (std::abs(c) <= rel * mx) continue;
    cplx v = c;
    if (std::abs(v.real()) <= rel * mx) v.real(0.0);
    if (std::abs(v.imag()) <= rel * mx) v.imag(0.0);
    r.add_term(e, v);
  }
  return r;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    for (std::size_t a = 0; a < e.size(); ++a) {
      if (e[a] == 0) continue;
      os << "*k" << (a + 1);
      if (e[a] > 1) os << "^" << e[a];
    }
  }
  return os.str();
}

namespace {
void enumerate(int dim, int remaining, Exponents& cur, int pos,
               std::vector<Exponents>& out) {
  if (pos == dim - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[pos] = e;
    enumerate(dim, remaining - e, cur, pos + 1, out);
  }
}
}  // namespace

std::vector<Exponents> monomials_up_to(int dim, int max_degree) {
  std::vector<Exponents> out;
  if (dim <= 0) return out;
  Exponents cur(dim, 0);
  for (int deg = 0; deg <= max_degree; ++deg) enumerate(dim, deg, cur, 0, out);
  return out;
}

}  // namespace qstar
