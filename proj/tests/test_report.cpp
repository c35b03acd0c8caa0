#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace qt;

TEST(Report, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Report, NumbersWithInfinity) {
  EXPECT_EQ(num_to_json(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_TRUE(std::isinf(num_from_json("-inf")));
  EXPECT_EQ(num_from_json(num_to_json(0.1)), 0.1);
  EXPECT_THROW(num_from_json("abc"), ValidationError);
}

TEST(Report, CertificateRoundTrip) {
  const auto e = catalog_entry("divfree3d");
  SearchConfig cfg;
  cfg.n_directions = 256;
  const Certificate c = certify(e.constraint(), e.form, cfg);
  const json j = json::parse(certificate_to_json(c).dump());
  EXPECT_TRUE(same_certificate(c, certificate_from_json(j)));
  Certificate inf;
  inf.verdict = Verdict::strictly_positive;
  inf.min_value = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(same_certificate(inf, certificate_from_json(json::parse(certificate_to_json(inf).dump()))));
}

TEST(Report, ExtremalRoundTripWithTwoSteps) {
  KVec t(3);
  t << 0, 0, 1;
  Vec v1(4), v2(4);
  v1 << 0, 0, 1, 1;
  v2 << 1, 0, 0, 0;
  ExtremalOptions opt;
  opt.n_probe = 4;
  const auto sym = grad_plus_id();
  const auto x = generate_extremal(sym, QuadraticForm(2.0 * Mat::Identity(4, 4), Side::potential), {v1, v2}, {}, opt);
  ASSERT_EQ(x.steps.size(), 2u);
  const auto back = extremal_from_json(json::parse(extremal_to_json(x).dump()));
  EXPECT_TRUE(same_extremal(x, back));
}

TEST(Report, OperatorFieldAndFormRoundTrips) {
  std::mt19937_64 rng(61);
  for (const auto& s : {gradient(2), grad_plus_id(), catalog_entry("divfree3d").sym}) {
    const auto back = operator_from_json(json::parse(operator_to_json(s).dump()));
    for (int i = 0; i < 3; ++i) {
      const KVec k = random_k(rng, s.d());
      EXPECT_TRUE(back.eval(k).isApprox(s.eval(k), 1e-15));
    }
    EXPECT_EQ(back.spec().has_value(), s.spec().has_value());
  }
  const auto f = random_admissible(grad_plus_id(), ReciprocalLattice::from_basis(RMat::Identity(3, 3)),
                                   FieldKind::E, 3, 1, false);
  const auto fb = field_from_json(json::parse(field_to_json(f).dump()));
  EXPECT_TRUE(fb.constant == f.constant);
  EXPECT_EQ(fb.modes, f.modes);
  EXPECT_EQ(fb.kind, f.kind);
  const QuadraticForm q(Mat::Random(3, 3), Side::flux);
  const auto qb = form_from_json(form_to_json(q));
  EXPECT_TRUE(qb.mat() == q.mat());
  EXPECT_EQ(qb.side(), Side::flux);
}

TEST(Report, OperatorFileErrors) {
  EXPECT_THROW(operator_from_json(json::parse(R"({"d":2,"ell":1})")), ValidationError);
  EXPECT_THROW(operator_from_json(json::parse(
                   R"({"d":2,"ell":1,"m":2,"t":1,"deriv_coeffs":[{"r":3,"q":1,"idx":[1],"re":1}]})")),
               ValidationError);
  EXPECT_THROW(mat_from_json(json::parse("[[1,0]]"), 2, 2), ValidationError);
}

TEST(Report, OneBasedCoefficientLayout) {
  const auto s = operator_from_json(json::parse(
      R"({"d":2,"ell":1,"m":2,"t":1,"deriv_coeffs":[{"r":1,"q":1,"idx":[1],"re":1},{"r":2,"q":1,"idx":[2],"re":1}]})"));
  KVec k(2);
  k << 1, 2;
  EXPECT_TRUE(s.eval(k).isApprox(gradient(2).eval(k)));
}

TEST(Report, RenderParseIdentityAndEmptyBounds) {
  RunReport r;
  r.command = "verify-bound";
  r.seed = 42;
  r.inputs_digest = fnv1a_hex("x");
  r.config = {{"grid", 16}};
  BoundSummary empty;
  r.results["bound"] = bound_to_json(empty);
  const std::string js = report_render(r, ReportFormat::json);
  EXPECT_EQ(report_parse(js), r);
  EXPECT_EQ(report_render(report_parse(js), ReportFormat::json), js);
  EXPECT_TRUE(json::parse(js)["results"]["bound"]["reports"].empty());
  EXPECT_EQ(bound_from_json(json::parse(js)["results"]["bound"]).reports.size(), 0u);
  EXPECT_FALSE(json::parse(js).contains("timings"));
  const std::string text = report_render(r, ReportFormat::text);
  EXPECT_NE(text.find("verify-bound"), std::string::npos);
  EXPECT_THROW(report_parse("{not json"), ValidationError);
  EXPECT_EQ(parse_report_format("json"), ReportFormat::json);
  EXPECT_THROW(parse_report_format("xml"), ValidationError);
}

TEST(Report, TextIncludesVerdictWitnessAndMargins) {
  RunReport r;
  r.command = "certify";
  Certificate c;
  c.verdict = Verdict::violated;
  c.min_value = -0.5;
  c.witness_k = {KVec::Ones(3)};
  c.equality_dims = {0};
  r.results["certificate"] = certificate_to_json(c);
  BoundSummary b;
  BoundReport br;
  br.competitor_id = "special";
  br.margin = 1.25;
  b.reports.push_back(br);
  r.results["bound"] = bound_to_json(b);
  const std::string text = report_render(r, ReportFormat::text);
  EXPECT_NE(text.find("violated"), std::string::npos);
  EXPECT_NE(text.find("witness_k"), std::string::npos);
  EXPECT_NE(text.find("margin: 1.25"), std::string::npos);
}

TEST(Catalog, ExportFeedsBackIntoLoaders) {
  for (const auto& name : {"divfree3d", "grad_plus_id", "det2d", "mixed_h"}) {
    const auto e = catalog_entry(name);
    const json j = json::parse(catalog_export(e).dump());
    const auto sym = operator_from_json(j);
    EXPECT_EQ(sym.m(), e.sym.m());
    EXPECT_TRUE(form_from_json(j["form"]).mat() == e.form.mat());
  }
  EXPECT_THROW(catalog_entry("nope"), ValidationError);
  EXPECT_THROW(catalog_entry("cubic_null"), UnsupportedError);
  EXPECT_THROW(bound_setup(catalog_entry("mixed_h")), UnsupportedError);
}

TEST(Catalog, CheckpointsPass) {
  for (const auto& name : {"divfree3d", "grad_plus_id", "det2d", "mixed_h"})
    for (const auto& r : run_checkpoints(catalog_entry(name))) EXPECT_TRUE(r.pass) << name << ": " << r.name;
}
