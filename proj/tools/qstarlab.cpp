// qstarlab: command-line front end for the qstar library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "qstar/report.hpp"

namespace fs = std::filesystem;
using namespace qstar;

namespace {

struct Options {
  std::string spec_file;
  std::string catalog;
  std::string form_file;
  std::string side;
  int samples = 0;
  double tol = -1.0;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_dir;
  std::string format = "text";
  bool timings = false;

  // Search overrides; negative means "not given".
  int radii = -1;
  double r_min = -1.0;
  double r_max = -1.0;
  int refine_iters = -1;
  int n_refine = -1;
  double tol_cluster = -1.0;
  double cluster_radius = -1.0;

  bool expect_convex = false;
  std::vector<std::string> directions;
  int probes = 32;

  std::string omega = "ball:0.3";
  int competitors = 50;
  int grid = 32;
  std::string field_file;
  std::string flux_potential;

  std::string export_name;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_file(const std::string& path, std::string& digest_input) {
  const std::string text = read_file(path);
  digest_input += text;
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// Operator, forms and optional extras gathered from --catalog or --spec.
struct Problem {
  std::string source;
  json doc;
  std::optional<OperatorSymbol> sym_;
  std::optional<OperatorSymbol> second;
  std::optional<QuadraticForm> form;
  std::optional<QuadraticForm> base_form;
  std::string digest_input;

  const OperatorSymbol& sym() const { return *sym_; }
};

QuadraticForm form_with_side(json j, const std::string& side_flag) {
  if (!side_flag.empty()) j["side"] = side_flag;
  else if (!j.contains("side")) j["side"] = "S";
  return form_from_json(j);
}

Problem load_problem(const Options& o) {
  if (o.spec_file.empty() == o.catalog.empty())
    throw ValidationError("give exactly one of --spec FILE or --catalog NAME");
  Problem p;
  if (!o.catalog.empty()) {
    p.source = "catalog:" + o.catalog;
    p.doc = catalog_export(catalog_entry(o.catalog));
    p.digest_input = p.doc.dump();
  } else {
    p.source = o.spec_file;
    p.doc = parse_json_file(o.spec_file, p.digest_input);
  }
  p.sym_ = operator_from_json(p.doc);
  if (p.doc.contains("second")) p.second = operator_from_json(p.doc.at("second"));
  if (p.doc.contains("form")) p.form = form_with_side(p.doc.at("form"), o.side);
  if (p.doc.contains("base_form")) p.base_form = form_with_side(p.doc.at("base_form"), o.side);
  if (!o.form_file.empty()) p.form = form_with_side(parse_json_file(o.form_file, p.digest_input), o.side);
  if (p.form && !p.second && p.form->m() != p.sym().m())
    throw ValidationError("form is " + std::to_string(p.form->m()) + "x" +
                          std::to_string(p.form->m()) + " but the operator has m = " +
                          std::to_string(p.sym().m()));
  return p;
}

Constraint constraint_of(const Problem& p, const QuadraticForm& form) {
  if (p.second) return Constraint::mixed(p.sym(), *p.second);
  return Constraint::for_side(p.sym(), form.side());
}

// Flags > spec file "search" object > defaults.
SearchConfig search_config(const Options& o, const Problem& p) {
  SearchConfig c;
  if (p.doc.contains("search")) {
    const json& s = p.doc.at("search");
    c.n_directions = s.value("n_directions", c.n_directions);
    c.n_radii = s.value("n_radii", c.n_radii);
    c.r_min = s.value("r_min", c.r_min);
    c.r_max = s.value("r_max", c.r_max);
    c.refine_iters = s.value("refine_iters", c.refine_iters);
    c.n_refine = s.value("n_refine", c.n_refine);
    c.tol_eig = s.value("tol_eig", c.tol_eig);
    c.tol_cluster = s.value("tol_cluster", c.tol_cluster);
    c.cluster_radius = s.value("cluster_radius", c.cluster_radius);
  }
  if (o.samples > 0) c.n_directions = o.samples;
  if (o.tol >= 0) c.tol_eig = o.tol;
  if (o.radii >= 0) c.n_radii = o.radii;
  if (o.r_min >= 0) c.r_min = o.r_min;
  if (o.r_max >= 0) c.r_max = o.r_max;
  if (o.refine_iters >= 0) c.refine_iters = o.refine_iters;
  if (o.n_refine >= 0) c.n_refine = o.n_refine;
  if (o.tol_cluster >= 0) c.tol_cluster = o.tol_cluster;
  if (o.cluster_radius >= 0) c.cluster_radius = o.cluster_radius;
  c.seed = o.seed;
  c.exec = o.threads == 1 ? Exec::serial : Exec::parallel;
  c.validate();
  return c;
}

json search_to_json(const SearchConfig& c, int d) {
  return {{"n_directions", c.directions_for(d)}, {"n_radii", c.n_radii}, {"r_min", c.r_min},
          {"r_max", c.r_max}, {"refine_iters", c.refine_iters}, {"n_refine", c.n_refine},
          {"tol_eig", c.tol_eig}, {"tol_cluster", c.tol_cluster},
          {"cluster_radius", c.cluster_radius}};
}

cplx parse_cplx(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (s.empty()) throw ValidationError("empty number in direction");
  if (s.back() != 'i') return {std::stod(s), 0.0};
  s.pop_back();
  // Split at the last sign that is not part of an exponent.
  std::size_t cut = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;)
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      cut = i;
      break;
    }
  auto imag = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return std::stod(t);
  };
  if (cut == std::string::npos) return {0.0, imag(s)};
  return {std::stod(s.substr(0, cut)), imag(s.substr(cut))};
}

// "t=a,b,c" is v = (t, 1); "v=..." is the full vector, entries may be a+bi.
Vec parse_direction(const std::string& text, int m) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ValidationError("direction must be t=... or v=...");
  const std::string kind = text.substr(0, eq);
  std::vector<cplx> vals;
  std::stringstream ss(text.substr(eq + 1));
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      vals.push_back(parse_cplx(item));
    } catch (const std::logic_error&) {
      throw ValidationError("bad number '" + item + "' in direction");
    }
  }
  if (kind == "t") vals.push_back(1.0);
  else if (kind != "v") throw ValidationError("direction must be t=... or v=...");
  if (static_cast<int>(vals.size()) != m)
    throw ValidationError("direction has " + std::to_string(vals.size()) + " entries, form has m = " +
                          std::to_string(m));
  Vec v(m);
  for (int i = 0; i < m; ++i) v[i] = vals[static_cast<std::size_t>(i)];
  return v;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string kvec_text(const KVec& k) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < k.size(); ++i) s += (i ? ", " : "") + fmt(std::abs(k[i]) < 5e-13 ? 0.0 : k[i]);
  return s + ")";
}

class Runner {
 public:
  explicit Runner(Options o) : o_(std::move(o)) {}

  int certify_cmd() {
    const Problem p = load_problem(o_);
    if (!p.form) throw ValidationError("no quadratic form: add \"form\" to the spec or pass --form");
    const SearchConfig cfg = search_config(o_, p);
    start("certify", p);
    report_.config["search"] = search_to_json(cfg, p.sym().d());
    const Certificate c = certify(constraint_of(p, *p.form), *p.form, cfg);
    json summary = json::array();
    summary.push_back(std::string("verdict: ") + verdict_name(c.verdict));
    summary.push_back("min projected eigenvalue: " + fmt(c.min_value) + "  (form norm " +
                      fmt(c.form_norm) + ", " + std::to_string(c.samples) + " samples)");
    for (std::size_t i = 0; i < c.witness_k.size() && i < 8; ++i)
      summary.push_back("witness k = " + kvec_text(c.witness_k[i]) + ", equality dim " +
                        std::to_string(c.equality_dims[i]));
    report_.results["summary"] = summary;
    report_.results["certificate"] = certificate_to_json(c);
    const int rc = o_.expect_convex && c.verdict == Verdict::violated ? 2 : 0;
    finish();
    return rc;
  }

  int extremal_cmd() {
    const Problem p = load_problem(o_);
    const SearchConfig cfg = search_config(o_, p);
    QuadraticForm base = [&] {
      if (!o_.form_file.empty() && p.form) return *p.form;
      if (p.base_form) return *p.base_form;
      const Side side = o_.side.empty() ? Side::potential : parse_side(o_.side);
      return QuadraticForm(Mat::Identity(p.sym().m(), p.sym().m()), side);
    }();
    std::vector<Vec> dirs;
    for (const auto& d : o_.directions) dirs.push_back(parse_direction(d, base.m()));
    start("extremal", p);
    report_.config["search"] = search_to_json(cfg, p.sym().d());
    report_.config["directions"] = o_.directions;
    report_.config["probes"] = o_.probes;
    ExtremalOptions eo;
    eo.n_probe = o_.probes;
    eo.seed = o_.seed;
    const ExtremalForm e = generate_extremal(p.sym(), base, dirs, cfg, eo);
    json summary = json::array();
    for (std::size_t i = 0; i < e.steps.size(); ++i) {
      const auto& s = e.steps[i];
      const char* name = s.side == Side::potential ? "alpha" : "beta";
      summary.push_back("step " + std::to_string(i + 1) + ": " + name + " = " + fmt(s.value) +
                        (s.attained ? "" : " (not attained)"));
      for (const auto& k : s.maximizers) summary.push_back("  maximizer k = " + kvec_text(k));
    }
    summary.push_back(std::string("extremal: ") + (e.extremal ? "yes" : "no") + "  (" +
                      std::to_string(e.probes_unbounded) + "/" + std::to_string(e.probes_total) +
                      " probe directions unbounded)");
    report_.results["summary"] = summary;
    report_.results["extremal"] = extremal_to_json(e);
    finish();
    return 0;
  }

  int synthesize_cmd() {
    const Problem p = load_problem(o_);
    if (!p.form) throw ValidationError("no quadratic form: add \"form\" to the spec or pass --form");
    start("synthesize", p);
    json fields = json::object();
    FourierField primary;
    if (p.doc.contains("special")) {
      // {kstars, modes: [{n, re, im}], constant: {re, im}}
      const json& sp = p.doc.at("special");
      std::vector<KVec> kstars;
      for (const auto& k : sp.at("kstars")) kstars.push_back(kvec_from_json(k));
      const ReciprocalLattice lat = lattice_containing(kstars);
      json f = {{"lattice", json::array()}, {"constant", sp.value("constant", json::object())},
                {"modes", sp.at("modes")}};
      for (Eigen::Index r = 0; r < lat.basis.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < lat.basis.cols(); ++c) row.push_back(lat.basis(r, c));
        f["lattice"].push_back(row);
      }
      if (!f["constant"].contains("re")) f["constant"] = {{"re", std::vector<double>(p.form->m(), 0.0)}};
      const FourierField given = field_from_json(f);
      const SpecialFields sf =
          p.form->side() == Side::potential
              ? synthesize_special_E(p.sym(), *p.form, lat, given.modes, given.constant)
              : synthesize_special_J(p.sym(), *p.form, lat, given.modes, given.constant);
      fields["U"] = field_to_json(sf.u);
      fields["E"] = field_to_json(sf.e);
      fields["J"] = field_to_json(sf.j);
      primary = p.form->side() == Side::potential ? sf.e : sf.j;
    } else if (!o_.field_file.empty()) {
      primary = field_from_json(parse_json_file(o_.field_file, report_digest_));
      fields[field_kind_name(primary.kind)] = field_to_json(primary);
    } else if (p.doc.contains("special_field")) {
      primary = field_from_json(p.doc.at("special_field"));
      fields[field_kind_name(primary.kind)] = field_to_json(primary);
    } else {
      throw ValidationError("nothing to synthesize: the spec has no \"special\" block");
    }
    const double gap = form_average(*p.form, primary) - p.form->apply(field_average(primary));
    const double resid = p.second ? 0.0 : constraint_residual(p.sym(), primary);
    json summary = json::array();
    summary.push_back("modes: " + std::to_string(primary.modes.size()) +
                      ", real: " + (primary.is_real() ? "yes" : "no"));
    summary.push_back("<f(F)> - f(<F>) = " + fmt(gap));
    summary.push_back("constraint residual: " + fmt(resid));
    report_.results["summary"] = summary;
    report_.results["equality_gap"] = gap;
    report_.results["constraint_residual"] = resid;
    report_.results["fields"] = fields;
    if (!o_.out_dir.empty()) {
      fs::create_directories(o_.out_dir);
      check_aliasing(primary, grid_shape(primary.lattice.d()));
      write_grid_csv(to_grid(primary, grid_shape(primary.lattice.d()), exec()),
                     fs::path(o_.out_dir) / (std::string("field_") + field_kind_name(primary.kind) + ".csv"));
    }
    finish();
    return 0;
  }

  int verify_bound_cmd() {
    const Problem p = load_problem(o_);
    if (!p.form) throw ValidationError("no quadratic form: add \"form\" to the spec or pass --form");
    if (p.second) throw UnsupportedError("verify-bound does not handle mixed constraints");
    start("verify-bound", p);
    FourierField special;
    if (!o_.field_file.empty()) special = field_from_json(parse_json_file(o_.field_file, report_digest_));
    else if (p.doc.contains("special_field")) special = field_from_json(p.doc.at("special_field"));
    else throw ValidationError("no special field: pass --field FILE");

    BoundOptions bo;
    bo.n_competitors = o_.competitors;
    bo.seed = o_.seed;
    bo.exec = exec();
    if (p.form->side() == Side::flux) {
      std::string name = o_.flux_potential;
      if (name.empty()) name = p.doc.value("default_flux_potential", "");
      if (!name.empty()) {
        if (p.doc.contains("flux_potentials") && p.doc.at("flux_potentials").contains(name))
          bo.flux_potential = operator_from_json(p.doc.at("flux_potentials").at(name));
        else
          bo.flux_potential = operator_from_json(parse_json_file(name, report_digest_));
      } else if (p.doc.contains("flux_potential")) {
        bo.flux_potential = operator_from_json(p.doc.at("flux_potential"));
      }
    }
    const MaskGeometry geom = parse_omega(o_.omega);
    const DomainMask mask = make_mask(geom, special.lattice, grid_shape(p.sym().d()));
    report_.config["omega"] = o_.omega;
    report_.config["grid"] = o_.grid;
    report_.config["competitors"] = o_.competitors;
    if (!o_.flux_potential.empty()) report_.config["flux_potential"] = o_.flux_potential;

    const BoundSummary b = verify_bound(p.sym(), *p.form, special, mask, bo);
    double worst = std::numeric_limits<double>::infinity();
    std::string worst_id;
    bool ok = true;
    for (const auto& r : b.reports) {
      const double rel = r.scale > 0 ? r.margin / r.scale : r.margin;
      if (rel < worst) {
        worst = rel;
        worst_id = r.competitor_id;
      }
      ok = ok && r.margin >= -1e-9 * r.scale;
    }
    json summary = json::array();
    summary.push_back("f0 = " + fmt(b.f0.value) + "  (doubled grid " + fmt(b.f0.refined) +
                      ", relative change " + fmt(b.f0.rel_change) + ")");
    summary.push_back(std::string("ancillary condition: ") + (b.ancillary.ok ? "holds" : "fails") +
                      (b.ancillary.detail.empty() ? "" : " (" + b.ancillary.detail + ")"));
    summary.push_back("guard layers: " + std::to_string(b.guard_layers));
    if (!b.reports.empty()) {
      const auto& eq = b.reports.front();
      summary.push_back("equality case margin/scale: " + fmt(eq.scale > 0 ? eq.margin / eq.scale : eq.margin));
      summary.push_back("worst margin/scale: " + fmt(worst) + " (" + worst_id + ")");
    }
    summary.push_back(std::string("bound holds: ") + (ok ? "yes" : "no"));
    report_.results["summary"] = summary;
    report_.results["bound_holds"] = ok;
    report_.results["worst_relative_margin"] = b.reports.empty() ? json(nullptr) : num_to_json(worst);
    report_.results["bound"] = bound_to_json(b);
    finish();
    return 0;
  }

  int catalog_list_cmd() {
    for (const auto& name : catalog_names()) std::cout << name << "  " << catalog_note(name) << "\n";
    return 0;
  }

  int catalog_export_cmd() {
    const std::string text = catalog_export(catalog_entry(o_.export_name)).dump(2) + "\n";
    if (o_.out_dir.empty()) {
      std::cout << text;
    } else {
      fs::create_directories(o_.out_dir);
      write_text(fs::path(o_.out_dir) / (o_.export_name + ".json"), text);
    }
    return 0;
  }

 private:
  Exec exec() const { return o_.threads == 1 ? Exec::serial : Exec::parallel; }

  std::vector<int> grid_shape(int d) const { return std::vector<int>(static_cast<std::size_t>(d), o_.grid); }

  void start(const std::string& command, const Problem& p) {
    t0_ = std::chrono::steady_clock::now();
    report_.command = command;
    report_.seed = o_.seed;
    report_digest_ = p.digest_input;
    report_.config["source"] = p.source;
    if (p.form) report_.config["side"] = side_name(p.form->side());
  }

  void finish() {
    report_.inputs_digest = fnv1a_hex(report_digest_ + report_.config.dump());
    if (o_.timings) {
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
      report_.timings = json{{"wall_seconds", s}, {"threads", omp_get_max_threads()}};
    }
    const ReportFormat f = parse_report_format(o_.format);
    std::cout << report_render(report_, f);
    if (!o_.out_dir.empty()) {
      fs::create_directories(o_.out_dir);
      write_text(fs::path(o_.out_dir) / "report.json", report_render(report_, ReportFormat::json));
      write_text(fs::path(o_.out_dir) / "summary.txt", report_render(report_, ReportFormat::text));
    }
  }

  static void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << text;
  }

  static void write_grid_csv(const GridField& g, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    const int d = static_cast<int>(g.shape.size());
    for (int a = 0; a < d; ++a) out << "x" << a + 1 << ",";
    for (int c = 0; c < g.dim(); ++c) out << "re" << c + 1 << ",im" << c + 1 << (c + 1 < g.dim() ? "," : "\n");
    char buf[64];
    for (Eigen::Index i = 0; i < g.npoints(); ++i) {
      const auto coords = grid_coords(g.shape, i);
      RVec s(d);
      for (int a = 0; a < d; ++a) s[a] = static_cast<double>(coords[static_cast<std::size_t>(a)]) / g.shape[static_cast<std::size_t>(a)];
      const RVec x = g.cell.transpose() * s;
      for (int a = 0; a < d; ++a) {
        std::snprintf(buf, sizeof buf, "%.12g,", x[a]);
        out << buf;
      }
      for (int c = 0; c < g.dim(); ++c) {
        std::snprintf(buf, sizeof buf, "%.15g,%.15g", g.values(c, i).real(), g.values(c, i).imag());
        out << buf << (c + 1 < g.dim() ? "," : "\n");
      }
    }
  }

  Options o_;
  RunReport report_;
  std::string report_digest_;
  std::chrono::steady_clock::time_point t0_;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--spec", o.spec_file, "Operator/form file (JSON)");
  sub->add_option("--catalog", o.catalog, "Use a built-in catalog entry");
  sub->add_option("--form", o.form_file, "Quadratic form file, overrides the spec's form");
  sub->add_option("--side", o.side, "Form side: S (potential) or T (flux)")
      ->check(CLI::IsMember({"S", "T"}));
  sub->add_option("--samples", o.samples, "Number of k directions");
  sub->add_option("--tol", o.tol, "Eigenvalue tolerance, relative to the form norm");
  sub->add_option("--seed", o.seed, "Seed for every randomized step");
  sub->add_option("--threads", o.threads, "OpenMP threads (1 runs the serial reference)");
  sub->add_option("--out", o.out_dir, "Directory for report.json, summary.txt and data files");
  sub->add_option("--format", o.format, "stdout format")->check(CLI::IsMember({"text", "json"}));
  sub->add_flag("--timings", o.timings, "Include wall-clock timings in the report");
  sub->add_option("--radii", o.radii, "Radial samples (inhomogeneous symbols)");
  sub->add_option("--r-min", o.r_min, "Smallest |k|");
  sub->add_option("--r-max", o.r_max, "Largest |k|");
  sub->add_option("--refine-iters", o.refine_iters, "Iterations per local refinement");
  sub->add_option("--n-refine", o.n_refine, "Candidates refined");
  sub->add_option("--tol-cluster", o.tol_cluster, "Value tolerance for witness/maximizer sets");
  sub->add_option("--cluster-radius", o.cluster_radius, "Distance below which k points merge");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qstarlab: Q*-convexity certification, extremal forms, special fields and sharp bounds"};
  app.require_subcommand(1);
  Options o;

  auto* certify_sub = app.add_subcommand("certify", "Certify Q*-convexity of a quadratic form");
  add_common(certify_sub, o);
  certify_sub->add_flag("--expect-convex", o.expect_convex, "Exit 2 if the verdict is violated");

  auto* extremal_sub = app.add_subcommand("extremal", "Rank-one reductions towards an extremal form");
  add_common(extremal_sub, o);
  extremal_sub->add_option("--direction", o.directions, "t=a,b,.. (v = (t,1)) or v=.. ; repeatable");
  extremal_sub->add_option("--probes", o.probes, "Random directions for the extremality probe");

  auto* synth_sub = app.add_subcommand("synthesize", "Build the special field achieving equality");
  add_common(synth_sub, o);
  synth_sub->add_option("--field", o.field_file, "Field file to check instead of synthesizing");
  synth_sub->add_option("--grid", o.grid, "Grid points per axis for the CSV written to --out");

  auto* bound_sub = app.add_subcommand("verify-bound", "Check the sharp bound on a domain");
  add_common(bound_sub, o);
  bound_sub->add_option("--omega", o.omega, "ball:R or box:F");
  bound_sub->add_option("--competitors", o.competitors, "Perturbed competitors");
  bound_sub->add_option("--grid", o.grid, "Grid points per axis");
  bound_sub->add_option("--field", o.field_file, "Special field file");
  bound_sub->add_option("--flux-potential", o.flux_potential, "Flux potential name or file");

  auto* catalog_sub = app.add_subcommand("catalog", "Built-in operators and forms");
  catalog_sub->require_subcommand(1);
  auto* list_sub = catalog_sub->add_subcommand("list", "List catalog entries");
  auto* export_sub = catalog_sub->add_subcommand("export", "Write an entry as a spec file");
  export_sub->add_option("name", o.export_name, "Entry name")->required();
  export_sub->add_option("--out", o.out_dir, "Directory for NAME.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (o.threads < 0) throw ValidationError("--threads must be non-negative");
    if (o.threads > 0) omp_set_num_threads(o.threads);
    Runner run(o);
    if (*certify_sub) return run.certify_cmd();
    if (*extremal_sub) return run.extremal_cmd();
    if (*synth_sub) return run.synthesize_cmd();
    if (*bound_sub) return run.verify_bound_cmd();
    if (*list_sub) return run.catalog_list_cmd();
    if (*export_sub) return run.catalog_export_cmd();
  } catch (const Error& e) {
    std::cerr << "qstarlab: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "qstarlab: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
