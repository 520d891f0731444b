#include "ihf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ihf/expr.hpp"
#include "ihf/format.hpp"

namespace ihf {

namespace {

struct BadValue {
  std::string message;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return std::string(s.substr(1, s.size() - 2));
  return std::string(s);
}

double as_double(std::string_view s) {
  const auto v = parse_double(trim(s));
  if (!v || !std::isfinite(*v)) throw BadValue{"expected a number, got '" + std::string(s) + "'"};
  return *v;
}

template <class Int>
Int as_int(std::string_view s) {
  s = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw BadValue{"expected an integer, got '" + std::string(s) + "'"};
  return v;
}

bool as_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw BadValue{"expected true or false"};
}

std::vector<std::string> split_list(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw BadValue{"unterminated list"};
    s = trim(s.substr(1, s.size() - 2));
  }
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    const auto item = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (item.empty()) throw BadValue{"empty list item"};
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> as_list(std::string_view s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(as_double(item));
  return out;
}

Point as_point(std::string_view s) {
  const auto v = as_list(s);
  if (v.size() < 2 || v.size() > 3) throw BadValue{"expected 2 or 3 components"};
  Point p{};
  for (std::size_t a = 0; a < v.size(); ++a) p[a] = v[a];
  return p;
}

// none | ball(r) | points(x y [z]; ...) | mask(path)
ObstacleShape as_obstacle(std::string_view s) {
  s = trim(s);
  if (s == "none") return NoObstacle{};
  if (s == "ball") return BallObstacle{};
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') throw BadValue{"unknown obstacle '" + std::string(s) + "'"};
  const auto name = trim(s.substr(0, open));
  const auto arg = trim(s.substr(open + 1, s.size() - open - 2));
  if (name == "ball") return BallObstacle{as_double(arg)};
  if (name == "mask") return MaskObstacle{unquote(arg)};
  if (name == "points") {
    PointObstacle p;
    std::size_t start = 0;
    for (;;) {
      const auto semi = arg.find(';', start);
      const auto item = trim(arg.substr(start, semi == std::string_view::npos ? std::string_view::npos : semi - start));
      std::istringstream in{std::string(item)};
      Point q{};
      std::string tok;
      int a = 0;
      while (in >> tok) {
        if (a == kMaxDim) throw BadValue{"too many point coordinates"};
        q[a++] = as_double(tok);
      }
      if (a < 2) throw BadValue{"point needs at least 2 coordinates"};
      p.points.push_back(q);
      if (semi == std::string_view::npos) break;
      start = semi + 1;
    }
    return p;
  }
  throw BadValue{"unknown obstacle '" + std::string(name) + "'"};
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + format_double(v[k]);
  return out;
}

std::string render_obstacle(const ObstacleShape& o, int dim) {
  if (std::holds_alternative<NoObstacle>(o)) return "none";
  if (const auto* b = std::get_if<BallObstacle>(&o)) return "ball(" + format_double(b->radius) + ")";
  if (const auto* m = std::get_if<MaskObstacle>(&o)) return "mask(" + m->path + ")";
  std::string out = "points(";
  const auto& pts = std::get<PointObstacle>(o).points;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    out += k ? "; " : "";
    for (int a = 0; a < dim; ++a) out += (a ? " " : "") + format_double(pts[k][a]);
  }
  return out + ")";
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

using Setter = std::function<void(RunConfig&, std::string_view)>;

template <class E>
E as_enum(std::string_view s, std::initializer_list<std::pair<const char*, E>> names) {
  for (const auto& [n, e] : names)
    if (s == n) return e;
  std::string all;
  for (const auto& [n, e] : names) all += (all.empty() ? "" : "|") + std::string(n);
  throw BadValue{"expected one of " + all};
}

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"mode", [](RunConfig& c, std::string_view v) {
         c.mode = as_enum<RunMode>(v, {{"exterior", RunMode::Exterior}, {"bounded", RunMode::Bounded}});
       }},
      {"dim", [](RunConfig& c, std::string_view v) { c.grid.dimension = as_int<int>(v); }},
      {"h", [](RunConfig& c, std::string_view v) { c.grid.spacing = as_double(v); }},
      {"m", [](RunConfig& c, std::string_view v) { c.grid.stencil_width = as_int<int>(v); }},
      {"outer", [](RunConfig& c, std::string_view v) {
         c.grid.outer = as_enum<OuterShape>(v, {{"ball", OuterShape::Ball}, {"box", OuterShape::Box}});
       }},
      {"R", [](RunConfig& c, std::string_view v) { c.grid.outer_radius = as_double(v); }},
      {"obstacle", [](RunConfig& c, std::string_view v) { c.grid.obstacle = as_obstacle(v); }},
      {"g", [](RunConfig& c, std::string_view v) { c.g = unquote(v); }},
      {"g_table", [](RunConfig& c, std::string_view v) { c.g_table = unquote(v); }},
      {"outer_g", [](RunConfig& c, std::string_view v) { c.outer_g = unquote(v); }},
      {"exact", [](RunConfig& c, std::string_view v) { c.exact = unquote(v); }},
      {"lambda", [](RunConfig& c, std::string_view v) { c.lambda = as_double(v); }},
      {"plane", [](RunConfig& c, std::string_view v) { c.plane = as_point(v); }},
      {"anchor", [](RunConfig& c, std::string_view v) {
         c.anchor = as_enum<Anchor>(
             v, {{"c_plus", Anchor::CPlus}, {"c_minus", Anchor::CMinus}, {"midpoint", Anchor::Midpoint}});
       }},
      {"schedule", [](RunConfig& c, std::string_view v) { c.schedule = as_list(v); }},
      {"alt_schedule", [](RunConfig& c, std::string_view v) { c.alt_schedule = as_list(v); }},
      {"monitor", [](RunConfig& c, std::string_view v) {
         const auto l = as_list(v);
         if (l.size() != 2) throw BadValue{"monitor needs inner, outer"};
         c.monitor = {l[0], l[1]};
       }},
      {"tol", [](RunConfig& c, std::string_view v) { c.tol = as_double(v); }},
      {"stage_tol", [](RunConfig& c, std::string_view v) { c.stage_tol = as_double(v); }},
      {"max_iter", [](RunConfig& c, std::string_view v) { c.max_iter = as_int<long>(v); }},
      {"eps_class", [](RunConfig& c, std::string_view v) { c.eps_class = as_double(v); }},
      {"checker_tol", [](RunConfig& c, std::string_view v) { c.checker_tol = as_double(v); }},
      {"checks", [](RunConfig& c, std::string_view v) {
         c.checks = CheckSet{false, false, false, false, false, false, false};
         if (trim(v) == "none") return;
         for (const auto& name : split_list(v)) {
           if (name == "ccp") c.checks.ccp = true;
           else if (name == "envelope") c.checks.envelope = true;
           else if (name == "extremal") c.checks.extremal = true;
           else if (name == "monotone") c.checks.monotone = true;
           else if (name == "comparison") c.checks.comparison = true;
           else if (name == "reflection") c.checks.reflection = true;
           else if (name == "linearity") c.checks.linearity = true;
           else throw BadValue{"unknown check '" + name + "'"};
         }
       }},
      {"det", [](RunConfig& c, std::string_view v) {
         c.det = as_enum<Determinism>(v, {{"ordered", Determinism::Ordered}, {"jacobi", Determinism::Jacobi}});
       }},
      {"inject_fault", [](RunConfig& c, std::string_view v) { c.inject_fault = as_bool(v); }},
      {"seed", [](RunConfig& c, std::string_view v) { c.seed = as_int<std::uint64_t>(v); }},
      {"fault_size", [](RunConfig& c, std::string_view v) { c.fault_size = as_double(v); }},
      {"profile_radii", [](RunConfig& c, std::string_view v) { c.profile_radii = as_list(v); }},
      {"sweep_h", [](RunConfig& c, std::string_view v) { c.sweep_h = as_list(v); }},
      {"sweep_m0", [](RunConfig& c, std::string_view v) { c.sweep_m0 = as_int<int>(v); }},
      {"out", [](RunConfig& c, std::string_view v) { c.out = unquote(v); }},
  };
  return table;
}

void check_increasing(const std::vector<double>& v, const char* field, std::vector<ConfigIssue>& issues) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] > v[k - 1])) {
      issues.push_back({ConfigIssue::Kind::Validation, 0, field, "values must increase strictly"});
      return;
    }
}

void check_expr(const std::string& text, const char* field, std::vector<ConfigIssue>& issues) {
  try {
    Expression::parse(text);
  } catch (const ExprParseError& e) {
    issues.push_back({ConfigIssue::Kind::Validation, 0, field, e.what()});
  }
}

std::vector<ConfigIssue> validation_issues(const RunConfig& c) {
  std::vector<ConfigIssue> issues;
  auto bad = [&](const char* field, std::string msg) {
    issues.push_back({ConfigIssue::Kind::Validation, 0, field, std::move(msg)});
  };
  try {
    GridSpec g = c.grid;
    if (c.mode == RunMode::Exterior && !c.schedule.empty()) g.outer_radius = c.schedule.back();
    g.validate();
  } catch (const Error& e) {
    bad("grid", e.what());
  }
  if (!(c.tol > 0.0)) bad("tol", "must be positive");
  if (!(c.stage_tol > 0.0)) bad("stage_tol", "must be positive");
  if (c.max_iter <= 0) bad("max_iter", "must be positive");
  if (c.eps_class && !(*c.eps_class > 0.0)) bad("eps_class", "must be positive");
  if (c.checker_tol && !(*c.checker_tol > 0.0)) bad("checker_tol", "must be positive");
  if (c.fault_size && !(*c.fault_size > 0.0)) bad("fault_size", "must be positive");
  if (c.g_table.empty()) check_expr(c.g, "g", issues);
  if (!c.outer_g.empty()) check_expr(c.outer_g, "outer_g", issues);
  if (!c.exact.empty()) check_expr(c.exact, "exact", issues);
  if (c.mode == RunMode::Exterior) {
    if (c.lambda.has_value() == c.plane.has_value()) bad("farfield", "exactly one variant");
    if (c.plane && !(norm(*c.plane) > 0.0)) bad("plane", "direction must be nonzero");
    if (c.schedule.empty()) bad("schedule", "must be nonempty");
    check_increasing(c.schedule, "schedule", issues);
    check_increasing(c.alt_schedule, "alt_schedule", issues);
    if (!(c.monitor.inner > 0.0 && c.monitor.outer > c.monitor.inner))
      bad("monitor", "needs 0 < inner < outer");
    if (!c.schedule.empty() && !(c.schedule.front() > c.monitor.outer))
      bad("schedule", "first radius must exceed the monitor annulus");
    if (!c.alt_schedule.empty() && !(c.alt_schedule.front() > c.monitor.outer))
      bad("alt_schedule", "first radius must exceed the monitor annulus");
    if (c.checks.comparison && c.alt_schedule.empty()) bad("alt_schedule", "comparison check needs a second schedule");
  }
  check_increasing(c.profile_radii, "profile_radii", issues);
  if (!c.profile_radii.empty() && !(c.profile_radii.front() > 1.0)) bad("profile_radii", "radii must exceed 1");
  for (const double h : c.sweep_h)
    if (!(h > 0.0)) bad("sweep_h", "spacings must be positive");
  if (c.sweep_m0 < 1) bad("sweep_m0", "must be at least 1");
  return issues;
}

std::string describe(const std::vector<ConfigIssue>& issues) {
  std::string out = "invalid configuration:";
  for (const auto& i : issues) {
    out += "\n  ";
    if (i.kind == ConfigIssue::Kind::Parse) out += "line " + std::to_string(i.line) + ": ";
    else out += i.field + ": ";
    out += i.message;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues) : Error(describe(issues)), issues_(std::move(issues)) {}

FarFieldSpec RunConfig::far_field() const {
  FarFieldSpec f;
  if (plane) f.shape = Plane{*plane};
  else f.shape = Cone{lambda.value_or(0.0)};
  f.anchor = anchor;
  return f;
}

SolveOptions RunConfig::solve_options() const {
  SolveOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  o.order = det == Determinism::Jacobi ? SweepOrder::Jacobi : SweepOrder::Colored;
  return o;
}

void validate(const RunConfig& c) {
  auto issues = validation_issues(c);
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::vector<ConfigIssue> issues;
  std::map<std::string, int> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (line[k] == '"') quoted = !quoted;
      if (line[k] == '#' && !quoted) {
        line = line.substr(0, k);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({ConfigIssue::Kind::Parse, line_no, {}, "expected key = value"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (seen.count(key)) {
      issues.push_back({ConfigIssue::Kind::Parse, line_no, key,
                        "duplicate key '" + key + "' (first on line " + std::to_string(seen[key]) + ")"});
      continue;
    }
    seen[key] = line_no;
    const auto& table = setters();
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& s) { return s.first == key; });
    if (it == table.end()) {
      issues.push_back({ConfigIssue::Kind::Parse, line_no, key, "unknown key '" + key + "'"});
      continue;
    }
    try {
      it->second(c, value);
    } catch (const BadValue& e) {
      issues.push_back({ConfigIssue::Kind::Parse, line_no, key, key + ": " + e.message});
    }
  }
  if (issues.empty()) issues = validation_issues(c);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{ConfigIssue::Kind::Parse, 0, "config", "cannot read " + path}});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render(const RunConfig& c) {
  std::ostringstream o;
  const int dim = c.grid.dimension;
  o << "mode = " << (c.mode == RunMode::Exterior ? "exterior" : "bounded") << "\n";
  o << "dim = " << dim << "\n";
  o << "h = " << format_double(c.grid.spacing) << "\n";
  o << "m = " << c.grid.stencil_width << "\n";
  o << "outer = " << (c.grid.outer == OuterShape::Ball ? "ball" : "box") << "\n";
  o << "R = " << format_double(c.grid.outer_radius) << "\n";
  o << "obstacle = " << render_obstacle(c.grid.obstacle, dim) << "\n";
  o << "g = " << quote(c.g) << "\n";
  if (!c.g_table.empty()) o << "g_table = " << quote(c.g_table) << "\n";
  if (!c.outer_g.empty()) o << "outer_g = " << quote(c.outer_g) << "\n";
  if (!c.exact.empty()) o << "exact = " << quote(c.exact) << "\n";
  if (c.lambda) o << "lambda = " << format_double(*c.lambda) << "\n";
  if (c.plane) {
    o << "plane = ";
    for (int a = 0; a < dim; ++a) o << (a ? ", " : "") << format_double((*c.plane)[a]);
    o << "\n";
  }
  o << "anchor = " << (c.anchor == Anchor::CPlus ? "c_plus" : c.anchor == Anchor::CMinus ? "c_minus" : "midpoint")
    << "\n";
  if (!c.schedule.empty()) o << "schedule = " << join(c.schedule) << "\n";
  if (!c.alt_schedule.empty()) o << "alt_schedule = " << join(c.alt_schedule) << "\n";
  o << "monitor = " << format_double(c.monitor.inner) << ", " << format_double(c.monitor.outer) << "\n";
  o << "tol = " << format_double(c.tol) << "\n";
  o << "stage_tol = " << format_double(c.stage_tol) << "\n";
  o << "max_iter = " << c.max_iter << "\n";
  if (c.eps_class) o << "eps_class = " << format_double(*c.eps_class) << "\n";
  if (c.checker_tol) o << "checker_tol = " << format_double(*c.checker_tol) << "\n";
  std::string checks;
  const std::pair<bool, const char*> flags[] = {
      {c.checks.ccp, "ccp"},           {c.checks.envelope, "envelope"},     {c.checks.extremal, "extremal"},
      {c.checks.monotone, "monotone"}, {c.checks.comparison, "comparison"}, {c.checks.reflection, "reflection"},
      {c.checks.linearity, "linearity"}};
  for (const auto& [on, name] : flags)
    if (on) checks += (checks.empty() ? "" : ", ") + std::string(name);
  o << "checks = " << (checks.empty() ? "none" : checks) << "\n";
  o << "det = " << (c.det == Determinism::Ordered ? "ordered" : "jacobi") << "\n";
  o << "inject_fault = " << (c.inject_fault ? "true" : "false") << "\n";
  o << "seed = " << c.seed << "\n";
  if (c.fault_size) o << "fault_size = " << format_double(*c.fault_size) << "\n";
  if (!c.profile_radii.empty()) o << "profile_radii = " << join(c.profile_radii) << "\n";
  if (!c.sweep_h.empty()) o << "sweep_h = " << join(c.sweep_h) << "\n";
  o << "sweep_m0 = " << c.sweep_m0 << "\n";
  o << "out = " << quote(c.out) << "\n";
  return o.str();
}

}  // namespace ihf
