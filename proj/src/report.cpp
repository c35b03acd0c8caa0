#include "qstar/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qstar {

json num_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double num_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ValidationError("expected a number, got " + j.dump());
}

namespace {

json cplx_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

cplx cplx_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw ValidationError("complex numbers are [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ValidationError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(cplx_to_json(v[i]));
  return a;
}

Vec vec_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("expected an array of complex numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = cplx_from_json(j[i]);
  return v;
}

json kvec_to_json(const KVec& k) {
  json a = json::array();
  for (Eigen::Index i = 0; i < k.size(); ++i) a.push_back(k[i]);
  return a;
}

KVec kvec_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("expected an array of reals");
  KVec k(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) k[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return k;
}

json mat_to_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(cplx_to_json(m(r, c)));
  return a;
}

Mat mat_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array()) throw ValidationError("expected a flat row-major matrix");
  if (static_cast<Eigen::Index>(j.size()) != rows * cols)
    throw ValidationError("matrix has " + std::to_string(j.size()) + " entries, expected " +
                          std::to_string(rows * cols));
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = cplx_from_json(j[static_cast<std::size_t>(r * cols + c)]);
  return m;
}

OperatorSymbol operator_from_json(const json& j) {
  const int d = need(j, "d").get<int>();
  const int ell = need(j, "ell").get<int>();
  const int m = need(j, "m").get<int>();
  if (j.contains("symbol_entries")) {
    const json& rows = j.at("symbol_entries");
    std::vector<std::vector<Polynomial>> entries;
    for (const auto& row : rows) {
      std::vector<Polynomial> r;
      for (const auto& cell : row) {
        Polynomial p(d);
        for (const auto& term : cell)
          p.add_term(need(term, "powers").get<std::vector<int>>(), cplx_from_json(need(term, "coeff")));
        r.push_back(std::move(p));
      }
      entries.push_back(std::move(r));
    }
    OperatorSymbol sym = symbol_from_polynomials(entries);
    if (sym.d() != d || sym.ell() != ell || sym.m() != m)
      throw ValidationError("symbol_entries do not match d, ell, m");
    return sym;
  }
  OperatorSpec spec;
  spec.d = d;
  spec.ell = ell;
  spec.m = m;
  spec.t = need(j, "t").get<int>();
  spec.zero_order = j.contains("zero_order") ? mat_from_json(j.at("zero_order"), m, ell)
                                              : Mat(Mat::Zero(m, ell));
  if (j.contains("deriv_coeffs"))
    for (const auto& c : j.at("deriv_coeffs")) {
      DerivCoeff dc;
      dc.r = need(c, "r").get<int>() - 1;
      dc.q = need(c, "q").get<int>() - 1;
      for (int a : need(c, "idx").get<std::vector<int>>()) dc.idx.push_back(a - 1);
      dc.value = {need(c, "re").get<double>(), c.value("im", 0.0)};
      spec.deriv_coeffs.push_back(std::move(dc));
    }
  spec.validate();
  return symbol_from_spec(spec);
}

json operator_to_json(const OperatorSymbol& sym) {
  json j;
  j["d"] = sym.d();
  j["ell"] = sym.ell();
  j["m"] = sym.m();
  if (const auto& spec = sym.spec()) {
    j["t"] = spec->t;
    j["zero_order"] = mat_to_json(spec->zero_order);
    json coeffs = json::array();
    for (const auto& c : spec->deriv_coeffs) {
      json idx = json::array();
      for (int a : c.idx) idx.push_back(a + 1);
      coeffs.push_back({{"r", c.r + 1}, {"q", c.q + 1}, {"idx", idx},
                        {"re", c.value.real()}, {"im", c.value.imag()}});
    }
    j["deriv_coeffs"] = coeffs;
    return j;
  }
  json rows = json::array();
  for (int r = 0; r < sym.m(); ++r) {
    json row = json::array();
    for (int q = 0; q < sym.ell(); ++q) {
      json cell = json::array();
      for (const auto& [e, c] : sym.entry(r, q).terms())
        cell.push_back({{"coeff", cplx_to_json(c)}, {"powers", e}});
      row.push_back(cell);
    }
    rows.push_back(row);
  }
  j["symbol_entries"] = rows;
  return j;
}

json form_to_json(const QuadraticForm& f) {
  return {{"side", side_name(f.side())}, {"m", f.m()}, {"mat", mat_to_json(f.mat())}};
}

QuadraticForm form_from_json(const json& j) {
  const Side side = parse_side(need(j, "side").get<std::string>());
  const json& mat = need(j, "mat");
  Eigen::Index m = j.contains("m") ? j.at("m").get<Eigen::Index>()
                                   : static_cast<Eigen::Index>(std::llround(std::sqrt(mat.size())));
  return QuadraticForm(mat_from_json(mat, m, m), side);
}

json field_to_json(const FourierField& f) {
  json lat = json::array();
  for (Eigen::Index r = 0; r < f.lattice.basis.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < f.lattice.basis.cols(); ++c) row.push_back(f.lattice.basis(r, c));
    lat.push_back(row);
  }
  auto split = [](const Vec& v) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      re.push_back(v[i].real());
      im.push_back(v[i].imag());
    }
    return std::make_pair(re, im);
  };
  json j;
  j["kind"] = field_kind_name(f.kind);
  j["lattice"] = lat;
  const auto [cre, cim] = split(f.constant);
  j["constant"] = {{"re", cre}, {"im", cim}};
  json modes = json::array();
  for (const auto& [n, v] : f.modes) {
    const auto [re, im] = split(v);
    modes.push_back({{"n", n}, {"re", re}, {"im", im}});
  }
  j["modes"] = modes;
  return j;
}

FourierField field_from_json(const json& j) {
  const json& lat = need(j, "lattice");
  const auto d = static_cast<Eigen::Index>(lat.size());
  RMat b(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    if (lat[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(d))
      throw ValidationError("lattice must be a square list of rows");
    for (Eigen::Index c = 0; c < d; ++c) b(r, c) = lat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  }
  auto join = [](const json& o) {
    const auto re = need(o, "re").get<std::vector<double>>();
    const auto im = o.contains("im") ? o.at("im").get<std::vector<double>>()
                                     : std::vector<double>(re.size(), 0.0);
    if (re.size() != im.size()) throw ValidationError("re and im differ in length");
    Vec v(static_cast<Eigen::Index>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) v[static_cast<Eigen::Index>(i)] = {re[i], im[i]};
    return v;
  };
  const Vec c = join(need(j, "constant"));
  FourierField f(ReciprocalLattice::from_basis(b), parse_field_kind(j.value("kind", "E")),
                 static_cast<int>(c.size()));
  f.constant = c;
  for (const auto& mode : j.value("modes", json::array()))
    f.set_mode(need(mode, "n").get<std::vector<int>>(), join(mode));
  return f;
}

json certificate_to_json(const Certificate& c) {
  json w = json::array();
  for (const auto& k : c.witness_k) w.push_back(kvec_to_json(k));
  return {{"verdict", verdict_name(c.verdict)}, {"min_value", num_to_json(c.min_value)},
          {"witness_k", w}, {"equality_dims", c.equality_dims}, {"attained", c.attained},
          {"form_norm", c.form_norm}, {"samples", c.samples}};
}

Certificate certificate_from_json(const json& j) {
  Certificate c;
  c.verdict = parse_verdict(need(j, "verdict").get<std::string>());
  c.min_value = num_from_json(need(j, "min_value"));
  for (const auto& k : need(j, "witness_k")) c.witness_k.push_back(kvec_from_json(k));
  c.equality_dims = need(j, "equality_dims").get<std::vector<int>>();
  c.attained = need(j, "attained").get<bool>();
  c.form_norm = need(j, "form_norm").get<double>();
  c.samples = need(j, "samples").get<std::size_t>();
  return c;
}

json step_to_json(const ReductionStep& s) {
  json mx = json::array();
  for (const auto& k : s.maximizers) mx.push_back(kvec_to_json(k));
  return {{"side", side_name(s.side)}, {"status", sup_status_name(s.status)},
          {"vec", vec_to_json(s.vec)}, {"value", num_to_json(s.value)},
          {"attained", s.attained}, {"maximizers", mx}};
}

ReductionStep step_from_json(const json& j) {
  ReductionStep s;
  s.side = parse_side(need(j, "side").get<std::string>());
  const auto status = need(j, "status").get<std::string>();
  if (status == "finite") s.status = SupStatus::finite;
  else if (status == "unbounded") s.status = SupStatus::unbounded;
  else if (status == "zero") s.status = SupStatus::zero;
  else throw ValidationError("unknown supremum status '" + status + "'");
  s.vec = vec_from_json(need(j, "vec"));
  s.value = num_from_json(need(j, "value"));
  s.attained = need(j, "attained").get<bool>();
  for (const auto& k : need(j, "maximizers")) s.maximizers.push_back(kvec_from_json(k));
  return s;
}

json extremal_to_json(const ExtremalForm& e) {
  json steps = json::array();
  for (const auto& s : e.steps) steps.push_back(step_to_json(s));
  return {{"base", form_to_json(e.base)}, {"steps", steps}, {"result", form_to_json(e.result)},
          {"extremal", e.extremal}, {"probes_unbounded", e.probes_unbounded},
          {"probes_total", e.probes_total}};
}

ExtremalForm extremal_from_json(const json& j) {
  ExtremalForm e{form_from_json(need(j, "base")), {}, form_from_json(need(j, "result"))};
  for (const auto& s : need(j, "steps")) e.steps.push_back(step_from_json(s));
  e.extremal = need(j, "extremal").get<bool>();
  e.probes_unbounded = need(j, "probes_unbounded").get<int>();
  e.probes_total = need(j, "probes_total").get<int>();
  return e;
}

json bound_to_json(const BoundSummary& b) {
  json reports = json::array();
  for (const auto& r : b.reports)
    reports.push_back({{"competitor_id", r.competitor_id}, {"f0", r.f0}, {"lhs", r.lhs},
                       {"margin", r.margin}, {"correction", r.correction}, {"scale", r.scale},
                       {"ancillary_ok", r.ancillary_ok}, {"equality_case", r.equality_case},
                       {"average_mismatch", r.average_mismatch},
                       {"constraint_residual", r.constraint_residual}});
  return {{"f0", {{"value", b.f0.value}, {"refined", b.f0.refined}, {"rel_change", b.f0.rel_change}}},
          {"ancillary", {{"ok", b.ancillary.ok}, {"residual", b.ancillary.residual},
                         {"detail", b.ancillary.detail}}},
          {"guard_layers", b.guard_layers},
          {"exact_wavenumber", b.exact_wavenumber},
          {"reports", reports}};
}

BoundSummary bound_from_json(const json& j) {
  BoundSummary b;
  const json& f0 = need(j, "f0");
  b.f0 = {need(f0, "value").get<double>(), need(f0, "refined").get<double>(),
          need(f0, "rel_change").get<double>()};
  const json& a = need(j, "ancillary");
  b.ancillary = {need(a, "ok").get<bool>(), need(a, "residual").get<double>(),
                 need(a, "detail").get<std::string>()};
  b.guard_layers = need(j, "guard_layers").get<int>();
  b.exact_wavenumber = need(j, "exact_wavenumber").get<bool>();
  for (const auto& r : need(j, "reports")) {
    BoundReport x;
    x.competitor_id = need(r, "competitor_id").get<std::string>();
    x.f0 = need(r, "f0").get<double>();
    x.lhs = need(r, "lhs").get<double>();
    x.margin = need(r, "margin").get<double>();
    x.correction = need(r, "correction").get<double>();
    x.scale = need(r, "scale").get<double>();
    x.ancillary_ok = need(r, "ancillary_ok").get<bool>();
    x.equality_case = need(r, "equality_case").get<bool>();
    x.average_mismatch = need(r, "average_mismatch").get<double>();
    x.constraint_residual = need(r, "constraint_residual").get<double>();
    b.reports.push_back(std::move(x));
  }
  return b;
}

json checkpoints_to_json(const std::vector<CheckpointResult>& r) {
  json a = json::array();
  for (const auto& c : r)
    a.push_back({{"name", c.name}, {"expected", c.expected}, {"observed", num_to_json(c.observed)},
                 {"tol", c.tol}, {"pass", c.pass}});
  return a;
}

json catalog_export(const CatalogEntry& e) {
  json j = operator_to_json(e.sym);
  j["name"] = e.name;
  j["summary"] = e.summary;
  j["form"] = form_to_json(e.form);
  if (e.second) j["second"] = operator_to_json(*e.second);
  if (e.direction) {
    // The form is V - v v^*/alpha with V = I; keep V so extremal can rerun the reduction.
    j["base_form"] = form_to_json(QuadraticForm(Mat::Identity(e.form.m(), e.form.m()), e.form.side()));
    j["direction"] = vec_to_json(*e.direction);
  }
  if (!e.flux_potentials.empty()) {
    json fp = json::object();
    for (const auto& [name, op] : e.flux_potentials) fp[name] = operator_to_json(op);
    j["flux_potentials"] = fp;
  }
  try {
    const BoundSetup setup = bound_setup(e);
    j["special_field"] = field_to_json(setup.special);
    if (setup.flux_potential)
      for (const auto& [name, op] : e.flux_potentials)
        if (operator_to_json(op) == operator_to_json(*setup.flux_potential)) {
          j["default_flux_potential"] = name;
          break;
        }
  } catch (const UnsupportedError&) {
  }
  return j;
}

bool same_certificate(const Certificate& a, const Certificate& b) {
  if (a.verdict != b.verdict || a.attained != b.attained || a.samples != b.samples ||
      a.equality_dims != b.equality_dims || a.witness_k.size() != b.witness_k.size())
    return false;
  if (!(a.min_value == b.min_value || (std::isnan(a.min_value) && std::isnan(b.min_value))))
    return false;
  if (a.form_norm != b.form_norm) return false;
  for (std::size_t i = 0; i < a.witness_k.size(); ++i)
    if (a.witness_k[i] != b.witness_k[i]) return false;
  return true;
}

bool same_extremal(const ExtremalForm& a, const ExtremalForm& b) {
  auto same_form = [](const QuadraticForm& x, const QuadraticForm& y) {
    return x.side() == y.side() && x.mat() == y.mat();
  };
  if (!same_form(a.base, b.base) || !same_form(a.result, b.result) || a.extremal != b.extremal ||
      a.probes_total != b.probes_total || a.probes_unbounded != b.probes_unbounded ||
      a.steps.size() != b.steps.size())
    return false;
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    const auto& s = a.steps[i];
    const auto& t = b.steps[i];
    if (s.side != t.side || s.status != t.status || s.vec != t.vec || s.value != t.value ||
        s.attained != t.attained || s.maximizers.size() != t.maximizers.size())
      return false;
    for (std::size_t k = 0; k < s.maximizers.size(); ++k)
      if (s.maximizers[k] != t.maximizers[k]) return false;
  }
  return true;
}

ReportFormat parse_report_format(const std::string& s) {
  if (s == "text") return ReportFormat::text;
  if (s == "json") return ReportFormat::json;
  throw ValidationError("format must be text or json");
}

namespace {

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    return buf;
  }
  return v.dump();
}

bool flat_array(const json& v) {
  if (!v.is_array()) return false;
  for (const auto& x : v)
    if (x.is_object() || (x.is_array() && !flat_array(x))) return false;
  return true;
}

std::string inline_text(const json& v) {
  if (!v.is_array()) return scalar_text(v);
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + inline_text(v[i]);
  return s + ")";
}

void render_text(std::ostringstream& os, const json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (v.is_object()) {
    for (const auto& [k, x] : v.items()) {
      if (x.is_object() || (x.is_array() && !flat_array(x))) {
        os << pad << k << ":\n";
        render_text(os, x, indent + 2);
      } else {
        os << pad << k << ": " << inline_text(x) << "\n";
      }
    }
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i].is_object()) {
        os << pad << "[" << i << "]\n";
        render_text(os, v[i], indent + 2);
      } else {
        os << pad << "- " << inline_text(v[i]) << "\n";
      }
    }
  } else {
    os << pad << scalar_text(v) << "\n";
  }
}

}  // namespace

std::string report_render(const RunReport& r, ReportFormat fmt) {
  if (fmt == ReportFormat::json) {
    json j;
    j["command"] = r.command;
    j["tool_version"] = r.tool_version;
    j["seed"] = r.seed;
    j["inputs_digest"] = r.inputs_digest;
    j["config"] = r.config;
    j["results"] = r.results;
    if (r.timings) j["timings"] = *r.timings;
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "qstarlab " << r.command << "  (version " << r.tool_version << ", seed " << r.seed
     << ", inputs " << r.inputs_digest << ")\n";
  if (r.results.contains("summary")) {
    for (const auto& line : r.results.at("summary")) os << "  " << scalar_text(line) << "\n";
    os << "\n";
  }
  json rest = r.results;
  rest.erase("summary");
  render_text(os, rest, 0);
  if (r.timings) {
    os << "timings:\n";
    render_text(os, *r.timings, 2);
  }
  return os.str();
}

RunReport report_parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("report is not valid JSON: ") + e.what());
  }
  RunReport r;
  r.command = need(j, "command").get<std::string>();
  r.tool_version = need(j, "tool_version").get<std::string>();
  r.seed = need(j, "seed").get<std::uint64_t>();
  r.inputs_digest = need(j, "inputs_digest").get<std::string>();
  r.config = need(j, "config");
  r.results = need(j, "results");
  if (j.contains("timings")) r.timings = j.at("timings");
  return r;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qstar
