#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace qt;

TEST(Polynomial, ArithmeticAndEvaluation) {
  const Polynomial x = Polynomial::variable(2, 0);
  const Polynomial y = Polynomial::variable(2, 1);
  const Polynomial p = x * x + y * cplx(0, 3) + Polynomial::constant(2, 2.0);
  KVec k(2);
  k << 1.5, -2.0;
  EXPECT_NEAR(std::abs(p(k) - cplx(1.5 * 1.5 + 2.0, -6.0)), 0.0, 1e-14);
  EXPECT_EQ(p.degree(), 2);
  EXPECT_EQ(p.min_degree(), 0);
  EXPECT_EQ(p.coeff({0, 1}), cplx(0, 3));
  EXPECT_TRUE(p.conjugate_symmetric());
  EXPECT_FALSE((x * cplx(1.0)).conjugate_symmetric());
  EXPECT_TRUE((x + x * cplx(-1.0)).is_zero());
}

TEST(Polynomial, MonomialEnumeration) {
  const auto m = monomials_up_to(3, 2);
  EXPECT_EQ(m.size(), 10u);  // C(3+2, 2)
  EXPECT_EQ(m.front(), Exponents({0, 0, 0}));
  KVec k(3);
  k << 2.0, 3.0, 5.0;
  EXPECT_DOUBLE_EQ(monomial_value({1, 2, 0}, k), 18.0);
}

TEST(Operator, GradientSymbol) {
  const auto g = gradient(2);
  KVec k(2);
  k << 1.0, 2.0;
  const Mat l = g.eval(k);
  ASSERT_EQ(l.rows(), 2);
  ASSERT_EQ(l.cols(), 1);
  EXPECT_EQ(l(0, 0), cplx(0, 1));
  EXPECT_EQ(l(1, 0), cplx(0, 2));
  k << 1.0, 0.0;
  const Mat adj = g.eval_adjoint(k);
  EXPECT_EQ(adj(0, 0), cplx(0, -1));
  EXPECT_EQ(adj(0, 1), cplx(0, 0));
  EXPECT_TRUE(g.homogeneous());
  EXPECT_TRUE(g.conjugate_symmetric());
}

TEST(Operator, PolynomialEntries) {
  const auto s = grad_plus_id();
  KVec k(3);
  k << 0, 0, 1;
  const Mat l = s.eval(k);
  EXPECT_EQ(l(2, 0), cplx(1));
  EXPECT_EQ(l(3, 0), cplx(1));
  EXPECT_EQ(l(0, 0), cplx(0));
  EXPECT_FALSE(s.homogeneous());

  const auto ik = symbol_from_polynomials({{Polynomial::variable(2, 0, cplx(0, 1))},
                                           {Polynomial::variable(2, 1, cplx(0, 1))}});
  KVec q(2);
  q << 3, 4;
  EXPECT_EQ(ik.eval(q)(0, 0), cplx(0, 3));
  EXPECT_EQ(ik.eval(q)(1, 0), cplx(0, 4));
}

TEST(Operator, ZeroOrderIdentityAndConstantSymbols) {
  OperatorSpec s;
  s.d = 3;
  s.ell = s.m = 2;
  s.t = 0;
  s.zero_order = Mat::Identity(2, 2);
  const auto id = symbol_from_spec(s);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5; ++i) EXPECT_TRUE(id.eval(random_k(rng, 3)).isApprox(Mat::Identity(2, 2)));
  EXPECT_EQ(constant_field_space(id).basis.cols(), 2);
}

TEST(Operator, EvalAtOriginIsZeroOrderPart) {
  const auto s = grad_plus_id();
  EXPECT_TRUE(s.eval(KVec::Zero(3)).isApprox(s.zero_order()));
  Mat a = Mat::Zero(4, 1);
  a(3, 0) = 1.0;
  EXPECT_TRUE(s.zero_order().isApprox(a));
}

TEST(Operator, DivergenceFreeAdjoint) {
  const auto e = catalog_entry("divfree3d");
  KVec k(3);
  k << 0, 0, 1;
  const Mat adj = e.sym.eval_adjoint(k);
  Eigen::SelfAdjointEigenSolver<Mat> es(adj.adjoint() * adj);
  int rank = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) rank += es.eigenvalues()[i] > 1e-10;
  EXPECT_EQ(rank, 3);
  // k^T J = 0 exactly when L^*(k) J = 0.
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const KVec kk = random_k(rng, 3);
    Eigen::Matrix3cd j = mat_of(random_vec(rng, 9));
    const Eigen::RowVector3cd kt = kk.transpose().cast<cplx>();
    j -= kk.cast<cplx>() * (kt * j) / kk.squaredNorm();  // remove k^T J
    EXPECT_LT((e.sym.eval_adjoint(kk) * vec_of(j)).norm(), 1e-12 * vec_of(j).norm());
    Eigen::Matrix3cd bad = Eigen::Matrix3cd::Zero();
    bad.row(0) = kt;  // k^T bad = k_1 k^T != 0
    if (std::abs(kk[0]) > 1e-3) EXPECT_GT((e.sym.eval_adjoint(kk) * vec_of(bad)).norm(), 1e-6);
  }
}

TEST(Operator, SpecValidation) {
  OperatorSpec s;
  s.d = 2;
  s.ell = 1;
  s.m = 2;
  s.t = 1;
  s.zero_order = Mat::Zero(2, 1);
  s.deriv_coeffs.push_back({0, 0, {2}, 1.0});  // derivative index out of range
  EXPECT_THROW(s.validate(), ValidationError);
  s.deriv_coeffs = {{0, 0, {0, 1}, 1.0}};  // order 2 exceeds t = 1
  EXPECT_THROW(s.validate(), ValidationError);
  s.deriv_coeffs = {{2, 0, {0}, 1.0}};  // row out of range
  EXPECT_THROW(s.validate(), ValidationError);
  s.zero_order = Mat::Zero(3, 1);
  s.deriv_coeffs.clear();
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(QuadraticFormTest, DivfreeFormValues) {
  const auto e = catalog_entry("divfree3d");
  EXPECT_NEAR(e.form.apply(vec_of(Eigen::Matrix3cd::Identity())), -3.0, 1e-14);
  Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
  h(0, 0) = h(1, 1) = 1.0;
  EXPECT_NEAR(e.form.apply(vec_of(h)), 0.0, 1e-14);
  h.setZero();
  h(0, 2) = 2.0;
  EXPECT_NEAR(e.form.apply(vec_of(h)), 4.0, 1e-14);
  h.setZero();
  h(0, 1) = 1.0;
  h(1, 0) = -1.0;
  EXPECT_NEAR(e.form.apply(vec_of(h)), 0.0, 1e-14);
  // Independent evaluation of the trace formula on random real matrices.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    Eigen::Matrix3d j;
    for (int a = 0; a < 9; ++a) j(a / 3, a % 3) = g(rng);
    EXPECT_NEAR(e.form.apply(vec_of(j.cast<cplx>())), divfree_g(j), 1e-12 * (1 + j.squaredNorm()));
  }
}

TEST(QuadraticFormTest, HermitianPartIsStored) {
  Mat m(2, 2);
  m << 1, 2, 0, 1;
  const QuadraticForm f(m, Side::potential);
  EXPECT_EQ(f.mat()(0, 1), cplx(1));
  EXPECT_EQ(f.mat()(1, 0), cplx(1));
  EXPECT_NEAR(f.norm(), 2.0, 1e-14);
  Vec h(2);
  h << 1, 1;
  EXPECT_NEAR(f.apply(h), 4.0, 1e-14);
}

TEST(ConstantFields, GradientOfAffinePotentials) {
  EXPECT_EQ(constant_field_space(gradient(2, 2)).basis.cols(), 4);
  const auto e0 = constant_field_space(grad_plus_id());
  ASSERT_EQ(e0.basis.cols(), 1);
  EXPECT_NEAR(std::abs(e0.basis(3, 0)), 1.0, 1e-12);
}

TEST(ConstantFields, ApplyOperatorToPolynomialPotential) {
  // grad of x1^2 + 3 x1 x2 is (2 x1 + 3 x2, 3 x1).
  PolynomialPotential u;
  u.ell = 1;
  Polynomial p(2);
  p.add_term({2, 0}, 1.0);
  p.add_term({1, 1}, 3.0);
  u.components = {p};
  const auto out = apply_operator(gradient(2), u);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_NEAR(std::abs(out[0].coeff({1, 0}) - cplx(2)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(out[0].coeff({0, 1}) - cplx(3)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(out[1].coeff({1, 0}) - cplx(3)), 0.0, 1e-14);
  EXPECT_EQ(out[1].terms().size(), 1u);
}
