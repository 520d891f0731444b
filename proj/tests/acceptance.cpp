// Acceptance criteria 1-10. Each criterion prints one PASS/FAIL line with the
// measured quantities; the exit status is nonzero if any selected criterion
// fails.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ihf/config.hpp"
#include "ihf/format.hpp"
#include "ihf/pipeline.hpp"
#include "ihf/verify.hpp"

using namespace ihf;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

fs::path workdir() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / "ihf_acceptance";
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

// Exterior runs share this grid: h = 0.2 with the default width 3.
const char* kExteriorBase = "dim = 2\nh = 0.2\nm = 3\nobstacle = ball\nmonitor = [1.5, 3]\n";
const char* kSchedule = "schedule = [4, 8, 16]\n";

// g = sin(2 theta) written out node by node for the obstacle boundary of the
// largest stage; all stages share that lattice and obstacle.
std::string sin_table() {
  const auto path = workdir() / "sin2theta.txt";
  auto c = parse_config(std::string(kExteriorBase) + kSchedule + "lambda = 1\n");
  const auto d = build_domain(run_grid(c, c.schedule.back()));
  std::ofstream out(path);
  out << "# x1 x2 sin(2*atan2(x2,x1))\n";
  for (const auto i : d.nodes_of(NodeClass::ObstacleBoundary)) {
    const Point x = d.point(i);
    out << format_double(x[0]) << " " << format_double(x[1]) << " "
        << format_double(std::sin(2.0 * std::atan2(x[1], x[0]))) << "\n";
  }
  return path.string();
}

PipelineResult exterior(const std::string& extra) {
  auto c = parse_config(std::string(kExteriorBase) + kSchedule + extra);
  c.out.clear();
  return run_pipeline(c);
}

const PipelineResult& sin_run() {
  static const PipelineResult r = exterior("g_table = \"" + sin_table() + "\"\nlambda = 1\n");
  return r;
}

struct Canonical {
  std::string name;
  std::string extra;
  std::string expected;
};

const std::vector<Canonical>& canonical() {
  static const std::vector<Canonical> cases{
      {"g=0, lambda=0", "g = \"0\"\nlambda = 0\n", "bounded"},
      {"g=0, lambda=1", "g = \"0\"\nlambda = 1\n", "cone_up"},
      {"g=x1, a=e1", "g = \"x1\"\nplane = [1, 0]\n", "plane"},
  };
  return cases;
}

const std::map<std::string, PipelineResult>& canonical_runs() {
  static const auto runs = [] {
    std::map<std::string, PipelineResult> m;
    for (const auto& k : canonical()) m.emplace(k.name, exterior(k.extra));
    return m;
  }();
  return runs;
}

Outcome plane_exactness() {
  auto c = parse_config(
      "mode = bounded\nh = 0.05\nouter = box\nR = 2\nobstacle = none\ng = \"x1\"\nexact = \"x1\"\ntol = 1e-8\n"
      "checks = none\n");
  c.out.clear();
  const auto r = run_pipeline(c);
  const double err = r.report["exact_error"].get<double>();
  return {err <= 1e-7 && r.report["solve"]["converged"] == true,
          "max |u - x1| = " + num(err) + " (bound 1e-7), iterations " + r.report["solve"]["iterations"].dump()};
}

Outcome cone_reproduction() {
  auto c = parse_config(
      "mode = bounded\nR = 2\nobstacle = ball\ng = \"norm(x) - 1\"\nexact = \"norm(x) - 1\"\n"
      "sweep_h = [0.1, 0.05, 0.025]\nsweep_m0 = 2\n");
  c.out.clear();
  const auto r = run_sweep(c);
  std::string detail;
  bool pass = r.exit_code == kExitOk;
  double previous = INFINITY;
  for (const auto& row : r.report["sweep"]["rows"]) {
    const double h = row["h"].get<double>(), e = row["max_error"].get<double>();
    pass = pass && e <= 10 * h && e < previous;
    previous = e;
    detail += "h=" + num(h) + " m=" + row["m"].dump() + " err=" + num(e) + "; ";
  }
  return {pass, detail + "need err <= 10h and strictly decreasing"};
}

Outcome exhaustion_stability() {
  const auto& r = sin_run();
  const auto& stages = r.report["solve"]["stages"];
  const double last = stages.back()["sup_difference"].get<double>();
  std::string detail = "sup-differences on K:";
  for (std::size_t k = 1; k < stages.size(); ++k) detail += " " + num(stages[k]["sup_difference"].get<double>());
  return {last <= 1e-4, detail + " (last must be <= 1e-4)"};
}

Outcome classification_matrix() {
  bool pass = true;
  std::string detail;
  for (const auto& k : canonical()) {
    const auto& cls = canonical_runs().at(k.name).report["classification"];
    const std::string kind = cls["kind"];
    bool ok = kind == k.expected;
    std::string extra;
    if (ok && kind == "cone_up") {
      const double s = cls["slope"].get<double>();
      ok = std::abs(s - 1.0) <= 0.05;
      extra = " slope " + num(s);
    }
    if (ok && kind == "plane") {
      const auto a = cls["direction"].get<std::vector<double>>();
      const double dist = std::hypot(a[0] - 1.0, a[1]);
      ok = dist <= 0.05;
      extra = " |a - e1| " + num(dist);
    }
    pass = pass && ok;
    detail += k.name + " -> " + kind + extra + "; ";
  }
  return {pass, detail};
}

Outcome monotone_functionals() {
  std::vector<std::pair<std::string, const PipelineResult*>> runs{{"sin2theta", &sin_run()}};
  for (const auto& k : canonical()) runs.push_back({k.name, &canonical_runs().at(k.name)});
  bool pass = true;
  std::string detail;
  for (const auto& [name, r] : runs) {
    const auto& checks = r->report["checks"];
    const std::size_t mono = checks["monotone"]["violations"].size();
    const std::size_t env = checks["envelope"]["violations"].get<std::size_t>();
    pass = pass && mono == 0 && env == 0;
    detail += name + ": monotone " + std::to_string(mono) + ", envelope " + std::to_string(env) + "; ";
  }
  return {pass, detail + "violations must all be 0"};
}

Outcome extremal_location() {
  const auto& r = sin_run();
  const auto& e = r.report["checks"]["extremal"];
  std::string detail = "violations " + e["violations"].dump();
  for (const auto& v : r.report["violations"])
    if (v["kind"] == "Extremal") detail += ", excess " + num(v["magnitude"].get<double>());
  return {e["violations"] == 0, detail};
}

// Three small domains with their boundary data.
struct OracleCase {
  std::string name;
  GridSpec spec;
  ScalarFn g;
};

std::vector<OracleCase> oracle_cases() {
  auto spec = [](double h, double R, int m, ObstacleShape o, OuterShape outer) {
    GridSpec s;
    s.spacing = h;
    s.outer_radius = R;
    s.stencil_width = m;
    s.obstacle = std::move(o);
    s.outer = outer;
    return s;
  };
  return {
      {"box 25x25, ball(1), m=1, cone data", spec(0.25, 3.0, 1, BallObstacle{1.0}, OuterShape::Box),
       forms::radial(1.0, -1.0)},
      {"box 25x25, point obstacle, m=2, smooth data", spec(0.25, 3.0, 2, PointObstacle{{Point{0, 0, 0}}}, OuterShape::Box),
       [](const Point& x) { return std::sin(x[0]) + 0.3 * x[1] * x[1]; }},
      {"disc 25x25, ball(0.5), m=2, plane data", spec(0.25, 3.0, 2, BallObstacle{0.5}, OuterShape::Ball),
       forms::linear({1.0, -0.5, 0.0})},
  };
}

Outcome oracle_equivalence() {
  const double tol = 1e-10;
  bool pass = true;
  std::string detail;
  for (const auto& oc : oracle_cases()) {
    const auto d = make_domain(oc.spec);
    const auto bc = make_boundary(*d, oc.g, oc.g);
    const auto ref = oracle_solve(d, bc);
    SolveOptions o;
    o.tol = tol;
    const auto u = solve_dirichlet(d, bc, o);
    double diff = 0;
    for (std::size_t i = 0; i < d->size(); ++i)
      if (d->classification(i) != NodeClass::Excluded) diff = std::max(diff, std::abs(u[i] - ref[i]));
    pass = pass && diff <= 10 * tol;
    detail += oc.name + " (" + std::to_string(d->size()) + " nodes): " + num(diff) + "; ";
  }
  return {pass, detail + "bound 10 tol = " + num(10 * tol)};
}

Outcome ccp_soundness() {
  const double tol = 1e-9;
  const int trials = 10;
  bool pass = true;
  std::string detail;
  for (const auto& oc : oracle_cases()) {
    const auto d = make_domain(oc.spec);
    const auto u = oracle_solve(d, make_boundary(*d, oc.g, oc.g));
    const auto boxes = dyadic_boxes(*d);
    const auto clean = check_ccp(u, boxes, tol);
    const auto candidates = box_interior_nodes(*d, boxes);
    if (candidates.empty()) {
      pass = false;
      detail += oc.name + ": no checking box fits; ";
      continue;
    }
    std::mt19937_64 rng(20240611);
    int detected = 0;
    for (int t = 0; t < trials; ++t) {
      auto bumped = u;
      const auto node = candidates[rng() % candidates.size()];
      bumped.values[node] += 10 * tol;
      bool hit = false;
      for (const auto& v : check_ccp(bumped, boxes, tol))
        for (const auto n : v.nodes) hit = hit || n == node;
      detected += hit;
    }
    pass = pass && clean.empty() && detected == trials;
    detail += oc.name + ": clean " + std::to_string(clean.size()) + ", detected " + std::to_string(detected) + "/" +
              std::to_string(trials) + "; ";
  }
  return {pass, detail};
}

Outcome comparison_principle() {
  auto c = parse_config(std::string(kExteriorBase) + "g_table = \"" + sin_table() +
                        "\"\nlambda = 0\nschedule = [4, 8]\nalt_schedule = [6, 12]\n"
                        "checks = comparison\n");
  c.out.clear();
  const auto r = run_pipeline(c);
  const auto& cmp = r.report["checks"]["comparison"];
  const double sup = cmp["sup_difference_on_monitor"].get<double>();
  const double bound = 20 * c.tol;
  const int violations = cmp["violations"].get<int>();
  std::string detail = "sup |u - v| on K = " + num(sup) + " (bound " + num(bound) + "), check_comparison violations " +
                       std::to_string(violations);
  for (const auto& v : r.report["violations"])
    if (v["kind"] == "Comparison") detail += ", excess " + num(v["magnitude"].get<double>());
  return {sup <= bound && violations == 0, detail};
}

Outcome reflection_probe() {
  std::vector<std::pair<std::string, SolutionField>> fields;
  {
    GridSpec s;
    s.spacing = 0.1;
    s.outer_radius = 3.0;
    const auto d = make_domain(s);
    const ScalarFn g = [](const Point& x) { return std::sin(x[0] + 2 * x[1]) + 0.1 * x[0] * x[0]; };
    SolveOptions o;
    o.tol = 1e-10;
    fields.emplace_back("bounded annulus", solve_dirichlet(d, make_boundary(*d, g, g), o));
  }
  {
    auto c = parse_config(
        "h = 0.2\nm = 3\nobstacle = points(0 0)\ng = \"0\"\nplane = [0, 1]\nschedule = [4, 8]\nchecks = none\n");
    c.out.clear();
    fields.emplace_back("punctured plane e2", *run_pipeline(c).field);
  }
  fields.emplace_back("sin2theta exterior", *sin_run().field);
  bool pass = true;
  std::string detail;
  for (const auto& [name, u] : fields) {
    const int axis = u.grid().dimension() - 1;
    const auto v = reflect_field(u, axis);
    const auto back = reflect_field(v, axis);
    const double gap = std::abs(v.residual_max - u.residual_max);
    const bool same = std::memcmp(back.values.data(), u.values.data(), u.values.size() * sizeof(double)) == 0;
    double sup = 0;
    for (std::size_t i = 0; i < u.grid().size(); ++i)
      if (u.grid().classification(i) != NodeClass::Excluded) sup = std::max(sup, std::abs(u[i] - v[i]));
    pass = pass && gap <= 1e-12 && same;
    detail += name + ": residual gap " + num(gap) + (same ? ", involution exact" : ", involution BROKEN") +
              ", sup|u - V| " + num(sup) + "; ";
  }
  return {pass, detail};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> all{
      {"plane exactness", plane_exactness},
      {"cone reproduction under h-refinement", cone_reproduction},
      {"exhaustion stability", exhaustion_stability},
      {"classification matrix", classification_matrix},
      {"monotone functionals and growth envelope", monotone_functionals},
      {"extremal location", extremal_location},
      {"oracle equivalence", oracle_equivalence},
      {"CCP detector soundness", ccp_soundness},
      {"comparison principle", comparison_principle},
      {"reflection probe", reflection_probe},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number(s); all when omitted")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty())
    for (int k = 1; k <= 10; ++k) selected.push_back(k);

  int failures = 0;
  for (const int k : selected) {
    const auto& [name, run] = criteria()[static_cast<std::size_t>(k - 1)];
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << "criterion " << k << " [" << (o.pass ? "PASS" : "FAIL") << "] " << name << ": " << o.detail << "\n";
    failures += !o.pass;
  }
  return failures ? 1 : 0;
}
