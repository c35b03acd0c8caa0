#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace qt;

namespace {

Vec v_of(const KVec& t) {
  Vec v(t.size() + 1);
  for (Eigen::Index i = 0; i < t.size(); ++i) v[i] = t[i];
  v[t.size()] = 1.0;
  return v;
}

const QuadraticForm kIdentity4(Mat::Identity(4, 4), Side::potential);

}  // namespace

TEST(SupGamma, AlphaEqualsOnePlusTSquared) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 3; ++i) {
    const KVec t = random_k(rng, 3);
    const auto s = sup_gamma(grad_plus_id(), kIdentity4, v_of(t));
    // Cauchy-Schwarz: (t.k + 1)^2 <= (|t|^2 + 1)(|k|^2 + 1), equality at k = t.
    EXPECT_NEAR(s.value, 1 + t.squaredNorm(), 1e-6 * (1 + t.squaredNorm()));
    ASSERT_EQ(s.maximizers.size(), 1u);
    EXPECT_LT((s.maximizers[0] - t).norm(), 1e-4 * (1 + t.norm()));
    EXPECT_TRUE(s.attained);
  }
}

TEST(SupGamma, ScalarDirectionIsNotAttained) {
  Vec v = Vec::Zero(4);
  v[3] = 1.0;
  const auto s = sup_gamma(grad_plus_id(), kIdentity4, v);
  EXPECT_EQ(s.status, SupStatus::finite);
  EXPECT_NEAR(s.value, 1.0, 1e-4);
  EXPECT_FALSE(s.attained);
  EXPECT_THROW(reduce_once(grad_plus_id(), kIdentity4, v), NotAttainedError);
}

TEST(SupGamma, ZeroDirection) {
  const auto s = sup_gamma(grad_plus_id(), kIdentity4, Vec::Zero(4));
  EXPECT_EQ(s.status, SupStatus::zero);
  EXPECT_EQ(s.value, 0.0);
  const auto r = reduce_once(grad_plus_id(), kIdentity4, Vec::Zero(4));
  EXPECT_TRUE(r.form.mat().isApprox(kIdentity4.mat()));
}

TEST(SupGamma, UnboundedWhenWeightLosesTheScalarPart) {
  // V = diag(1,1,1,0): v.Gamma v = 1/|k|^2 for v = e4.
  Mat w = Mat::Identity(4, 4);
  w(3, 3) = 0.0;
  Vec v = Vec::Zero(4);
  v[3] = 1.0;
  const QuadraticForm weight(w, Side::potential);
  EXPECT_EQ(sup_gamma(grad_plus_id(), weight, v).status, SupStatus::unbounded);
  EXPECT_THROW(reduce_once(grad_plus_id(), weight, v), UnboundedSupremumError);
}

TEST(SupDelta, TwoDimensionalDivergenceFree) {
  const QuadraticForm w(Mat::Identity(2, 2), Side::flux);
  Vec d(2);
  d << 1, 0;
  const auto s = sup_delta(gradient(2), w, d);
  EXPECT_NEAR(s.value, 1.0, 1e-8);
  EXPECT_TRUE(s.attained);
  for (const auto& k : s.maximizers) EXPECT_LT(std::abs(k.normalized()[0]), 1e-4);
  const auto r = reduce_once(gradient(2), w, d);
  Mat expect = Mat::Zero(2, 2);
  expect(1, 1) = 1.0;
  EXPECT_TRUE(r.form.mat().isApprox(expect, 1e-8));
  EXPECT_NE(certify(gradient(2), r.form).verdict, Verdict::violated);
  EXPECT_EQ(sup_delta(gradient(2), w, Vec::Zero(2)).status, SupStatus::zero);
}

TEST(SupDelta, DivergenceFreeTraceDirection) {
  // Brute-force oracle: max over sampled unit k of w . Gamma_2(k) w.
  const auto s = catalog_entry("divfree3d").sym;
  const Vec w = vec_of(Eigen::Matrix3cd::Identity());
  const auto step = sup_delta(s, QuadraticForm(Mat::Identity(9, 9), Side::flux), w);
  double best = 0.0;
  for (const auto& k : sphere_directions(3, 2000))
    best = std::max(best, (w.adjoint() * projections(s, k).gamma2 * w)(0, 0).real());
  EXPECT_NEAR(step.value, best, 1e-6);
}

TEST(ReduceOnce, GradPlusIdentity) {
  KVec t(3);
  t << 0, 0, 1;
  const Vec v = v_of(t);
  const auto r = reduce_once(grad_plus_id(), kIdentity4, v);
  EXPECT_TRUE(r.form.mat().isApprox(Mat::Identity(4, 4) - v * v.adjoint() / 2.0, 1e-6));
  const auto c = certify(grad_plus_id(), r.form);
  EXPECT_NE(c.verdict, Verdict::violated);
}

TEST(GenerateExtremal, OneStepAndSeededProbe) {
  KVec t(3);
  t << 0, 0, 1;
  ExtremalOptions opt;
  opt.n_probe = 8;
  const auto e = generate_extremal(grad_plus_id(), kIdentity4, {v_of(t)}, {}, opt);
  ASSERT_EQ(e.steps.size(), 1u);
  EXPECT_NEAR(e.steps[0].value, 2.0, 1e-6);
  EXPECT_EQ(e.probes_total, 8);

  // Automatic mode is reproducible for a fixed seed.
  opt.max_auto_steps = 2;
  const auto a = generate_extremal(grad_plus_id(), kIdentity4, {}, {}, opt);
  const auto b = generate_extremal(grad_plus_id(), kIdentity4, {}, {}, opt);
  EXPECT_TRUE(same_extremal(a, b));
}

TEST(GenerateExtremal, AlreadyExtremalBase) {
  const auto e = catalog_entry("divfree3d");
  ExtremalOptions opt;
  opt.n_probe = 6;
  opt.max_auto_steps = 0;
  const auto x = generate_extremal(e.sym, e.form, {}, {}, opt);
  EXPECT_TRUE(x.steps.empty());
  EXPECT_TRUE(x.extremal);
}

TEST(GenerateExtremal, ViolatedBaseThrows) {
  EXPECT_THROW(generate_extremal(grad_plus_id(), QuadraticForm(-Mat::Identity(4, 4), Side::potential), {}),
               NotPsdError);
}

TEST(PotentialPolynomialTest, GradPlusIdentityExact) {
  std::mt19937_64 rng(32);
  const KVec t = random_k(rng, 3);
  const auto pp = potential_polynomial(grad_plus_id(), Mat::Identity(4, 4), v_of(t), Side::potential);
  // q = k^2 + 1, P = t.k + 1.
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
  ASSERT_EQ(pp.p.size(), 1u);
  for (const auto& [e, c] : q.terms()) EXPECT_LT(std::abs(pp.q.coeff(e) - c), 1e-10);
  for (const auto& [e, c] : p.terms()) EXPECT_LT(std::abs(pp.p[0].coeff(e) - c), 1e-10);
  EXPECT_EQ(pp.q.terms().size(), q.terms().size());
  EXPECT_EQ(pp.p[0].terms().size(), p.terms().size());
}

TEST(PotentialPolynomialTest, GradientTwoD) {
  // (L^* L)^{-1} L^* v = -i k.v / k^2.
  Vec v(2);
  v << 0.7, -1.3;
  const auto pp = potential_polynomial(gradient(2), Mat::Identity(2, 2), v, Side::potential);
  std::mt19937_64 rng(33);
  for (int i = 0; i < 10; ++i) {
    const KVec k = random_k(rng, 2);
    const cplx expect = cplx(0, -1) * (k[0] * 0.7 - k[1] * 1.3) / k.squaredNorm();
    EXPECT_LT(std::abs(pp.p[0](k) / pp.q(k) - expect), 1e-10 * (1 + std::abs(expect)));
  }
  EXPECT_LE(pp.q.degree(), 2);
}

TEST(PotentialPolynomialTest, ConstantSymbol) {
  OperatorSpec s;
  s.d = 2;
  s.ell = 1;
  s.m = 2;
  s.zero_order = Mat::Zero(2, 1);
  s.zero_order(0, 0) = 1.0;
  s.zero_order(1, 0) = 2.0;
  Vec v(2);
  v << 1, 1;
  const auto pp = potential_polynomial(symbol_from_spec(s), Mat::Identity(2, 2), v, Side::potential);
  EXPECT_EQ(pp.q.degree(), 0);
  EXPECT_EQ(pp.p[0].degree(), 0);
  EXPECT_NEAR(std::abs(pp.p[0](KVec::Zero(2)) / pp.q(KVec::Zero(2)) - cplx(0.6)), 0.0, 1e-12);
}
