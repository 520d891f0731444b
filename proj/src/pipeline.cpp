#include "ihf/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "ihf/asymptotics.hpp"
#include "ihf/expr.hpp"
#include "ihf/format.hpp"
#include "ihf/verify.hpp"

namespace ihf {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

json point_json(const Point& p, int dim) {
  json a = json::array();
  for (int k = 0; k < dim; ++k) a.push_back(p[k]);
  return a;
}

json lattice_json(const Lattice& l, int dim) {
  json a = json::array();
  for (int k = 0; k < dim; ++k) a.push_back(l[k]);
  return a;
}

json violation_json(const Domain& d, const ViolationRecord& v) {
  json j{{"kind", to_string(v.kind)}, {"magnitude", v.magnitude}, {"context", v.context}};
  j["nodes"] = v.nodes;
  json pts = json::array();
  for (const auto i : v.nodes) pts.push_back(point_json(d.point(i), d.dimension()));
  j["points"] = pts;
  if (v.cone)
    j["cone"] = {{"slope", v.cone->slope}, {"vertex", point_json(v.cone->vertex, d.dimension())},
                 {"offset", v.cone->offset}};
  if (v.box) j["box"] = {{"lo", lattice_json(v.box->lo, d.dimension())}, {"hi", lattice_json(v.box->hi, d.dimension())}};
  return j;
}

// Obstacle-boundary data from a "x1 x2 [x3] value" table; rows are matched
// to nodes by lattice position.
ScalarFn table_data(const std::string& path, int dim, double h) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read boundary table " + path);
  auto rows = std::make_shared<std::map<Lattice, double>>();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream s(line);
    Point p{};
    double v = 0.0;
    for (int a = 0; a < dim; ++a) s >> p[a];
    s >> v;
    if (!s) throw InvalidArgument("malformed boundary table row: " + line);
    Lattice l{};
    for (int a = 0; a < dim; ++a) l[a] = static_cast<int>(std::lround(p[a] / h));
    (*rows)[l] = v;
  }
  return [rows, h](const Point& x) {
    Lattice l{};
    for (int a = 0; a < kMaxDim; ++a) l[a] = static_cast<int>(std::lround(x[a] / h));
    const auto it = rows->find(l);
    if (it == rows->end()) throw InvalidArgument("boundary table has no row for a boundary node");
    return it->second;
  };
}

ScalarFn expr_fn(const std::string& text) {
  const auto e = Expression::parse(text);
  return [e](const Point& x) { return e(x); };
}

ScalarFn obstacle_data(const RunConfig& c) {
  if (!c.g_table.empty()) return table_data(c.g_table, c.grid.dimension, c.grid.spacing);
  return expr_fn(c.g);
}

std::vector<double> profile_radii(const RunConfig& c, double radius) {
  if (!c.profile_radii.empty()) return c.profile_radii;
  std::vector<double> r;
  for (double x = 1.25; x <= 0.8 * radius; x *= std::sqrt(2.0)) r.push_back(x);
  return r;
}

struct Tally {
  std::size_t violations = 0;
  bool not_converged = false;

  int exit_code() const {
    if (not_converged) return kExitNotConverged;
    return violations ? kExitViolations : kExitOk;
  }
};

json solve_summary(const SolutionField& f) {
  return {{"iterations", f.iterations},
          {"residual_max", f.residual_max},
          {"last_update", f.last_update},
          {"converged", f.converged}};
}

// Bumps one node lying inside a dyadic box; the node is drawn from the seed.
json inject_fault(const RunConfig& c, SolutionField& u) {
  const Domain& d = u.grid();
  const auto boxes = dyadic_boxes(d);
  const auto candidates = box_interior_nodes(d, boxes);
  if (candidates.empty()) throw InvalidArgument("no node lies inside a checking box; cannot inject a fault");
  std::mt19937_64 rng(c.seed);
  const auto node = candidates[rng() % candidates.size()];
  u.values[node] += c.fault_bump();
  return {{"node", node}, {"point", point_json(d.point(node), d.dimension())}, {"size", c.fault_bump()}};
}

void run_ccp(const SolutionField& u, double tol, json& report, Tally& t) {
  const auto boxes = dyadic_boxes(u.grid());
  const auto found = check_ccp(u, boxes, tol);
  report["checks"]["ccp"] = {{"boxes", boxes.size()}, {"violations", found.size()}};
  for (const auto& v : found) report["violations"].push_back(violation_json(u.grid(), v));
  t.violations += found.size();
}

void run_reflection(const SolutionField& u, json& report, Tally& t) {
  const Domain& d = u.grid();
  const int axis = d.dimension() - 1;
  try {
    const auto v = reflect_field(u, axis);
    const auto back = reflect_field(v, axis);
    double sup = 0.0;
    bool identical = true;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.classification(i) == NodeClass::Excluded) continue;
      sup = std::max(sup, std::abs(u[i] - v[i]));
      identical = identical && back[i] == u[i];
    }
    const double gap = std::abs(v.residual_max - u.residual_max);
    report["checks"]["reflection"] = {{"axis", axis},
                                      {"residual_max", u.residual_max},
                                      {"reflected_residual_max", v.residual_max},
                                      {"sup_difference", sup},
                                      {"involution", identical}};
    if (gap > 1e-12 || !identical) {
      ++t.violations;
      std::ostringstream ctx;
      ctx << "residual gap " << gap << (identical ? "" : ", double reflection differs");
      report["violations"].push_back(violation_json(
          d, {ViolationKind::Reflection, {}, std::max(gap, identical ? 0.0 : 1.0), ctx.str(), {}, {}}));
    }
  } catch (const AsymmetricDomain& e) {
    report["checks"]["reflection"] = {{"skipped", e.what()}};
  }
}

// Profile, blow-downs and classification of an exterior field, plus the
// checks that depend on them.
void analyze_exterior(const RunConfig& c, const SolutionField& u, const std::vector<double>& schedule,
                      json& report, Tally& t) {
  const Domain& d = u.grid();
  const double radius = d.spec().outer_radius;
  const auto radii = profile_radii(c, radius);
  const auto profile = slope_profile(u, radii);
  json samples = json::array();
  for (const auto& s : profile.samples)
    samples.push_back({{"r", s.radius}, {"S_plus", s.s_plus}, {"S_minus", s.s_minus}, {"lip", s.lip_exterior},
                       {"sphere_max", s.sphere_max}, {"sphere_min", s.sphere_min}});
  report["profile"] = {{"m_plus", profile.m_plus},
                       {"m_minus", profile.m_minus},
                       {"S_inf_plus", profile.s_inf_plus},
                       {"S_inf_minus", profile.s_inf_minus},
                       {"S_inf", profile.s_inf},
                       {"tail_slope_plus", profile.tail_slope_plus},
                       {"tail_slope_minus", profile.tail_slope_minus},
                       {"eps_mono", profile.eps_mono()},
                       {"samples", samples}};

  std::vector<BlowDownFit> fits;
  json fit_rows = json::array();
  for (const double r : schedule) {
    if (r > radius + 1e-12) continue;
    fits.push_back(blow_down(u, r / 2.0));
    const auto& f = fits.back();
    fit_rows.push_back({{"r_k", f.r_k},
                        {"plane", point_json(f.plane, d.dimension())},
                        {"plane_error", f.plane_error},
                        {"cone_slope", f.cone_slope},
                        {"cone_sign", f.cone_sign},
                        {"cone_error", f.cone_error}});
  }
  report["blowdown"] = fit_rows;

  try {
    const auto cls = classify(profile, fits, c.eps_class);
    report["classification"] = {{"kind", to_string(cls.kind)},
                                {"slope", cls.slope},
                                {"direction", point_json(cls.direction, d.dimension())},
                                {"eps_class", cls.eps_class},
                                {"margin", cls.margin},
                                {"S_inf_plus", cls.s_inf_plus},
                                {"S_inf_minus", cls.s_inf_minus},
                                {"plane_errors", cls.plane_errors}};
  } catch (const Inconclusive& e) {
    report["classification"] = {{"kind", "inconclusive"}, {"message", e.what()}};
    t.not_converged = true;
  } catch (const InvalidArgument& e) {
    report["classification"] = {{"kind", "unavailable"}, {"message", e.what()}};
  }

  if (c.checks.monotone) {
    const auto issues = profile.monotonicity_violations();
    report["checks"]["monotone"] = {{"violations", issues}};
    t.violations += issues.size();
  }
  if (c.checks.envelope) {
    const auto found = check_envelope(u, profile, c.tol);
    report["checks"]["envelope"] = {{"eps", 5.0 * d.spacing() + c.tol}, {"violations", found.size()}};
    for (const auto& v : found) report["violations"].push_back(violation_json(d, v));
    t.violations += found.size();
  }
  if (c.checks.extremal && (c.lambda || c.plane)) {
    const auto found = check_extremal_location(u, c.far_field(), c.checker_tolerance());
    report["checks"]["extremal"] = {{"violations", found ? 1 : 0}};
    if (found) {
      report["violations"].push_back(violation_json(d, *found));
      ++t.violations;
    }
  }
  if (c.checks.linearity && !fits.empty()) {
    const auto& f = fits.back();
    double lip = profile.samples.front().lip_exterior;
    for (const auto& s : profile.samples)
      if (s.radius <= f.r_k * f.annulus.inner) lip = s.lip_exterior;
    const double eps = c.eps_class.value_or(default_eps_class(profile.s_inf));
    const double tol = eps + (1.0 + std::max(std::abs(profile.m_plus), std::abs(profile.m_minus))) / f.r_k;
    const auto diag = check_blow_down_linearity(f, lip, tol);
    report["checks"]["linearity"] = {{"r_k", f.r_k},         {"tol", tol},
                                     {"branch", diag.branch}, {"plane_error", diag.plane_error},
                                     {"cone_error", diag.cone_error}, {"slope_ratio", diag.slope_ratio},
                                     {"consistent", diag.consistent}};
    if (!diag.consistent) ++t.violations;
  }
}

json base_report(const RunConfig& c, const char* command) {
  json r;
  r["command"] = command;
  r["config"] = render(c);
  r["violations"] = json::array();
  r["checks"] = json::object();
  r["timings"] = json::object();
  return r;
}

void finish(const RunConfig& c, PipelineResult& res, const Tally& t) {
  res.exit_code = t.exit_code();
  res.report["violation_count"] = t.violations;
  res.report["exit_code"] = res.exit_code;
  if (!c.out.empty()) {
    write_report(c.out, res.report);
    if (res.field) write_field((std::filesystem::path(c.out) / "field.txt").string(), *res.field);
  }
}

std::string csv_number(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  return format_double(v.get<double>());
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns, const json& rows,
               const std::vector<std::string>& keys) {
  std::ofstream out(path);
  for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << columns[k];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      out << (k ? "," : "");
      const auto& key = keys[k];
      const auto bracket = key.find('[');
      if (bracket == std::string::npos) {
        out << (row.contains(key) ? csv_number(row[key]) : "");
      } else {
        const auto idx = std::stoul(key.substr(bracket + 1));
        out << csv_number(row[key.substr(0, bracket)][idx]);
      }
    }
    out << "\n";
  }
}

}  // namespace

GridSpec run_grid(const RunConfig& c, double radius) {
  GridSpec g = c.grid;
  if (c.mode == RunMode::Exterior) {
    g.outer_radius = radius;
    g.outer = OuterShape::Ball;
  }
  return g;
}

PipelineResult run_pipeline(const RunConfig& c) {
  validate(c);
  PipelineResult res;
  res.report = base_report(c, c.mode == RunMode::Exterior ? "exterior" : "solve");
  json& report = res.report;
  Tally t;
  const auto g = obstacle_data(c);
  auto t0 = Clock::now();

  if (c.mode == RunMode::Bounded) {
    auto domain = make_domain(c.grid);
    const auto bc = make_boundary(*domain, g, c.outer_g.empty() ? g : expr_fn(c.outer_g));
    auto opts = c.solve_options();
    opts.throw_on_failure = false;
    res.field = solve_dirichlet(domain, bc, opts);
    report["timings"]["solve"] = seconds_since(t0);
    report["solve"] = solve_summary(*res.field);
    report["solve"]["nodes"] = domain->size();
    if (!res.field->converged) t.not_converged = true;
  } else {
    ExteriorOptions opts;
    opts.solve = c.solve_options();
    opts.stage_tol = c.stage_tol;
    try {
      auto ext = solve_exterior(run_grid(c, c.schedule.back()), g, c.far_field(), c.schedule, c.monitor, opts);
      res.field = std::move(ext.field);
      json stages = json::array();
      for (std::size_t k = 0; k < ext.log.stages.size(); ++k) {
        const auto& s = ext.log.stages[k];
        json row{{"stage", k}, {"R", s.radius}, {"iterations", s.iterations}, {"residual_max", s.residual_max},
                 {"last_update", s.last_update}};
        if (k > 0) row["sup_difference"] = ext.log.sup_differences[k - 1];
        stages.push_back(row);
      }
      report["solve"] = {{"stages", stages},
                         {"monitor", {c.monitor.inner, c.monitor.outer}},
                         {"monitor_nodes", ext.log.monitor_nodes.size()},
                         {"exhaustion_converged", ext.log.converged},
                         {"anchors",
                          {{"c_plus", ext.log.anchors.c_plus},
                           {"c_minus", ext.log.anchors.c_minus},
                           {"chosen", ext.log.anchors.chosen}}}};
      if (!ext.log.converged) t.not_converged = true;
    } catch (const NotConverged& e) {
      report["solve"] = {{"error", e.what()}};
      if (e.partial()) res.field = *e.partial();
      t.not_converged = true;
      report["timings"]["solve"] = seconds_since(t0);
      finish(c, res, t);
      return res;
    }
    report["timings"]["solve"] = seconds_since(t0);
  }
  SolutionField& u = *res.field;

  if (!c.exact.empty()) {
    const auto exact = expr_fn(c.exact);
    double err = 0.0;
    for (std::size_t i = 0; i < u.grid().size(); ++i)
      if (u.grid().classification(i) != NodeClass::Excluded)
        err = std::max(err, std::abs(u[i] - exact(u.grid().point(i))));
    report["exact_error"] = err;
  }

  if (c.inject_fault) report["fault"] = inject_fault(c, u);

  t0 = Clock::now();
  if (c.mode == RunMode::Exterior) analyze_exterior(c, u, c.schedule, report, t);
  if (c.checks.ccp) run_ccp(u, c.checker_tolerance(), report, t);
  if (c.checks.reflection) run_reflection(u, report, t);
  if (c.checks.comparison && c.mode == RunMode::Exterior) {
    ExteriorOptions opts;
    opts.solve = c.solve_options();
    opts.stage_tol = c.stage_tol;
    const auto alt = solve_exterior(run_grid(c, c.alt_schedule.back()), g, c.far_field(), c.alt_schedule,
                                    c.monitor, opts);
    const auto fwd = check_comparison(u, alt.field, c.checker_tolerance());
    const auto bwd = check_comparison(alt.field, u, c.checker_tolerance());
    double sup = 0.0;
    const Domain& d = u.grid();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!c.monitor.contains(d.radius(i)) || d.classification(i) == NodeClass::Excluded) continue;
      const auto j = alt.field.grid().find(d.lattice(i));
      if (j) sup = std::max(sup, std::abs(u[i] - alt.field[*j]));
    }
    report["checks"]["comparison"] = {{"alt_schedule", c.alt_schedule},
                                      {"sup_difference_on_monitor", sup},
                                      {"violations", int(fwd.has_value()) + int(bwd.has_value())}};
    for (const auto* v : {&fwd, &bwd})
      if (*v) {
        report["violations"].push_back(violation_json(d, **v));
        ++t.violations;
      }
  }
  report["timings"]["analysis"] = seconds_since(t0);
  finish(c, res, t);
  return res;
}

PipelineResult run_classify(const RunConfig& c, const SolutionField& u) {
  PipelineResult res;
  res.report = base_report(c, "classify");
  Tally t;
  RunConfig only = c;
  only.checks = CheckSet{false, false, false, false, false, false, false};
  std::vector<double> schedule = c.schedule;
  if (schedule.empty()) schedule = {u.grid().spec().outer_radius};
  const auto t0 = Clock::now();
  analyze_exterior(only, u, schedule, res.report, t);
  res.report["timings"]["analysis"] = seconds_since(t0);
  finish(only, res, t);
  return res;
}

PipelineResult run_verify(const RunConfig& c, const SolutionField& u, const SolutionField* other) {
  PipelineResult res;
  res.report = base_report(c, "verify");
  Tally t;
  const auto t0 = Clock::now();
  if (c.mode == RunMode::Exterior && (c.checks.monotone || c.checks.envelope || c.checks.extremal)) {
    std::vector<double> schedule = c.schedule;
    if (schedule.empty()) schedule = {u.grid().spec().outer_radius};
    analyze_exterior(c, u, schedule, res.report, t);
  }
  if (c.checks.ccp) run_ccp(u, c.checker_tolerance(), res.report, t);
  if (c.checks.reflection) run_reflection(u, res.report, t);
  if (other) {
    const auto fwd = check_comparison(u, *other, c.checker_tolerance());
    const auto bwd = check_comparison(*other, u, c.checker_tolerance());
    res.report["checks"]["comparison"] = {{"violations", int(fwd.has_value()) + int(bwd.has_value())}};
    for (const auto* v : {&fwd, &bwd})
      if (*v) {
        res.report["violations"].push_back(violation_json(u.grid(), **v));
        ++t.violations;
      }
  }
  res.report["timings"]["analysis"] = seconds_since(t0);
  finish(c, res, t);
  return res;
}

PipelineResult run_oracle_compare(const RunConfig& c) {
  validate(c);
  PipelineResult res;
  res.report = base_report(c, "oracle-compare");
  Tally t;
  auto domain = make_domain(run_grid(c, c.grid.outer_radius));
  const auto g = obstacle_data(c);
  const auto bc = make_boundary(*domain, g, c.outer_g.empty() ? g : expr_fn(c.outer_g));
  auto t0 = Clock::now();
  const auto oracle = oracle_solve(domain, bc);
  res.report["timings"]["oracle"] = seconds_since(t0);
  t0 = Clock::now();
  auto opts = c.solve_options();
  opts.throw_on_failure = false;
  res.field = solve_dirichlet(domain, bc, opts);
  res.report["timings"]["solve"] = seconds_since(t0);
  double diff = 0.0;
  for (std::size_t i = 0; i < domain->size(); ++i)
    if (domain->classification(i) != NodeClass::Excluded) diff = std::max(diff, std::abs(oracle[i] - (*res.field)[i]));
  const bool agree = diff <= 10.0 * c.tol;
  res.report["oracle_compare"] = {{"nodes", domain->size()},
                                  {"oracle_iterations", oracle.iterations},
                                  {"solver", solve_summary(*res.field)},
                                  {"max_difference", diff},
                                  {"bound", 10.0 * c.tol},
                                  {"agree", agree}};
  if (!res.field->converged) t.not_converged = true;
  if (!agree) ++t.violations;
  finish(c, res, t);
  return res;
}

PipelineResult run_sweep(const RunConfig& c) {
  validate(c);
  if (c.exact.empty())
    throw ConfigError({{ConfigIssue::Kind::Validation, 0, "exact", "sweep needs a closed form to measure errors"}});
  PipelineResult res;
  res.report = base_report(c, "sweep");
  Tally t;
  const std::vector<double> hs = c.sweep_h.empty() ? std::vector<double>{0.1, 0.05, 0.025} : c.sweep_h;
  const auto g = obstacle_data(c);
  const auto outer = c.outer_g.empty() ? g : expr_fn(c.outer_g);
  const auto exact = expr_fn(c.exact);
  json rows = json::array();
  double previous = std::numeric_limits<double>::infinity();
  bool monotone = true, bounded = true;
  for (const double h : hs) {
    GridSpec spec = run_grid(c, c.grid.outer_radius);
    spec.spacing = h;
    spec.stencil_width = std::max(1, static_cast<int>(std::lround(c.sweep_m0 * std::sqrt(hs.front() / h))));
    auto domain = make_domain(spec);
    const auto bc = make_boundary(*domain, g, outer);
    auto opts = c.solve_options();
    opts.throw_on_failure = false;
    const auto t0 = Clock::now();
    const auto u = solve_dirichlet(domain, bc, opts);
    res.report["timings"]["h=" + format_double(h)] = seconds_since(t0);
    double err = 0.0;
    for (std::size_t i = 0; i < domain->size(); ++i)
      if (domain->classification(i) != NodeClass::Excluded) err = std::max(err, std::abs(u[i] - exact(domain->point(i))));
    rows.push_back({{"h", h},
                    {"m", spec.stencil_width},
                    {"max_error", err},
                    {"iterations", u.iterations},
                    {"residual_max", u.residual_max}});
    if (!u.converged) t.not_converged = true;
    monotone = monotone && err < previous;
    bounded = bounded && err <= 10.0 * h;
    previous = err;
  }
  res.report["sweep"] = {{"rows", rows}, {"monotone", monotone}, {"within_10h", bounded}};
  if (!monotone) ++t.violations;
  if (!bounded) ++t.violations;
  finish(c, res, t);
  return res;
}

json without_timings(json report) {
  report.erase("timings");
  return report;
}

void write_report(const std::string& dir, const json& report) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  std::ofstream(root / "report.json") << report.dump(2) << "\n";
  if (report.contains("profile"))
    write_csv(root / "profile.csv", {"r", "S_plus", "S_minus", "lip"}, report["profile"]["samples"],
              {"r", "S_plus", "S_minus", "lip"});
  if (report.contains("solve") && report["solve"].contains("stages"))
    write_csv(root / "exhaustion.csv", {"stage", "R", "iterations", "residual_max", "last_update", "sup_difference"},
              report["solve"]["stages"], {"stage", "R", "iterations", "residual_max", "last_update", "sup_difference"});
  if (report.contains("blowdown") && !report["blowdown"].empty()) {
    std::vector<std::string> cols{"r_k", "plane_error", "cone_error", "cone_slope", "cone_sign"};
    std::vector<std::string> keys = cols;
    const auto dim = report["blowdown"][0]["plane"].size();
    for (std::size_t a = 0; a < dim; ++a) {
      cols.push_back("a" + std::to_string(a + 1));
      keys.push_back("plane[" + std::to_string(a) + "]");
    }
    write_csv(root / "blowdown.csv", cols, report["blowdown"], keys);
  }
  if (report.contains("sweep"))
    write_csv(root / "sweep.csv", {"h", "m", "max_error", "iterations", "residual_max"}, report["sweep"]["rows"],
              {"h", "m", "max_error", "iterations", "residual_max"});
}

void write_field(const std::string& path, const SolutionField& u) {
  const Domain& d = u.grid();
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write field file " + path);
  out << d.dimension() << " " << format_double(d.spacing()) << " " << format_double(d.spec().outer_radius) << "\n";
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.classification(i) != NodeClass::Excluded) out << i << " " << format_double(u[i]) << "\n";
}

SolutionField read_field(const std::string& path, const RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read field file " + path);
  int dim = 0;
  std::string h_text, r_text;
  in >> dim >> h_text >> r_text;
  const auto h = parse_double(h_text), radius = parse_double(r_text);
  if (!in || !h || !radius) throw InvalidArgument("malformed field header in " + path);
  GridSpec spec = run_grid(c, *radius);
  spec.outer_radius = *radius;
  if (dim != spec.dimension || *h != spec.spacing)
    throw ProfileMismatch("field header does not match the configuration's dim and h");
  SolutionField f;
  f.domain = make_domain(spec);
  const Domain& d = *f.domain;
  f.values.assign(d.size(), std::numeric_limits<double>::quiet_NaN());
  std::size_t index = 0, count = 0;
  std::string value;
  while (in >> index >> value) {
    const auto v = parse_double(value);
    if (!v || index >= d.size() || d.classification(index) == NodeClass::Excluded)
      throw InvalidArgument("bad field line for node " + std::to_string(index));
    f.values[index] = *v;
    ++count;
  }
  if (count != d.size() - d.nodes_of(NodeClass::Excluded).size())
    throw ProfileMismatch("field file does not cover every live node");
  f.tolerance = c.tol;
  f.converged = true;
  f.residual_max = residual_max(d, f.values);
  return f;
}

}  // namespace ihf
