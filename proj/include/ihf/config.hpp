#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ihf/grid.hpp"
#include "ihf/solver.hpp"

namespace ihf {

enum class RunMode { Exterior, Bounded };
enum class Determinism { Ordered, Jacobi };

struct CheckSet {
  bool ccp = true;
  bool envelope = true;
  bool extremal = true;
  bool monotone = true;
  bool comparison = false;
  bool reflection = false;
  bool linearity = false;
  bool operator==(const CheckSet&) const = default;
};

struct RunConfig {
  RunMode mode = RunMode::Exterior;
  // outer_radius and outer are used in bounded mode only; exterior runs take
  // their radii from the schedule.
  GridSpec grid;
  // Obstacle-boundary data: an expression, or a table file when g_table is set.
  std::string g = "0";
  std::string g_table;
  // Outer-boundary data in bounded mode; empty means g.
  std::string outer_g;
  // Closed form used for error reporting; optional.
  std::string exact;
  std::optional<double> lambda;
  std::optional<Point> plane;
  Anchor anchor = Anchor::CPlus;
  std::vector<double> schedule;
  // Second exhaustion for the comparison check.
  std::vector<double> alt_schedule;
  Annulus monitor{1.5, 3.0};
  double tol = 1e-8;
  double stage_tol = 1e-4;
  long max_iter = 5'000'000;
  std::optional<double> eps_class;
  std::optional<double> checker_tol;
  CheckSet checks;
  Determinism det = Determinism::Ordered;
  bool inject_fault = false;
  std::uint64_t seed = 0;
  // Bump added by fault injection; defaults to h / 10.
  std::optional<double> fault_size;
  // Defaults to a doubling sequence from 1.25 up to 0.8 R.
  std::vector<double> profile_radii;
  std::vector<double> sweep_h;
  int sweep_m0 = 2;
  std::string out = "out";

  double checker_tolerance() const { return checker_tol.value_or(20.0 * tol); }
  double fault_bump() const { return fault_size.value_or(grid.spacing / 10.0); }
  FarFieldSpec far_field() const;
  SolveOptions solve_options() const;

  bool operator==(const RunConfig&) const = default;
};

struct ConfigIssue {
  enum class Kind { Parse, Validation };
  Kind kind = Kind::Parse;
  int line = 0;       // Parse issues
  std::string field;  // Validation issues
  std::string message;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

// One "key = value" per line; '#' starts a comment. Lists are comma
// separated with optional brackets; strings may be double-quoted. Throws
// ConfigError listing every problem found.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// Canonical text; parse_config(render(c)) == c.
std::string render(const RunConfig& c);

// Checks that do not need the text form; throws ConfigError.
void validate(const RunConfig& c);

}  // namespace ihf
