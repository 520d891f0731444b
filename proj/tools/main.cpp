#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ihf/config.hpp"
#include "ihf/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<double> tol;
  std::optional<double> eps_class;
  std::string det;
  std::optional<std::uint64_t> seed;
  std::string field;
  std::string field2;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "run configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--tol", o.tol, "solver tolerance");
  cmd->add_option("--eps-class", o.eps_class, "classification tolerance");
  cmd->add_option("--det", o.det, "sweep order")->check(CLI::IsMember({"ordered", "jacobi"}));
  cmd->add_option("--seed", o.seed, "fault-injection node choice");
}

ihf::RunConfig configure(const Overrides& o) {
  auto c = ihf::load_config(o.config);
  if (!o.out.empty()) c.out = o.out;
  if (o.tol) c.tol = *o.tol;
  if (o.eps_class) c.eps_class = *o.eps_class;
  if (!o.det.empty()) c.det = o.det == "jacobi" ? ihf::Determinism::Jacobi : ihf::Determinism::Ordered;
  if (o.seed) c.seed = *o.seed;
  ihf::validate(c);
  return c;
}

void summarize(const ihf::PipelineResult& r) {
  const auto& rep = r.report;
  std::cout << rep["command"].get<std::string>() << ": exit " << r.exit_code << ", "
            << rep["violation_count"].get<std::size_t>() << " violation(s)";
  if (rep.contains("classification")) std::cout << ", class " << rep["classification"]["kind"].get<std::string>();
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for infinity-harmonic functions on exterior domains"};
  app.require_subcommand(1);
  Overrides o;
  auto* solve = app.add_subcommand("solve", "bounded Dirichlet solve");
  auto* exterior = app.add_subcommand("exterior", "exhaustion solve, profile, classification and checks");
  auto* classify = app.add_subcommand("classify", "profile and blow-down of a stored field");
  auto* verify = app.add_subcommand("verify", "checkers on stored field(s)");
  auto* oracle = app.add_subcommand("oracle-compare", "solver against the reference solver on a small grid");
  auto* sweep = app.add_subcommand("sweep", "h-refinement series against a closed form");
  for (auto* cmd : {solve, exterior, classify, verify, oracle, sweep}) add_common(cmd, o);
  classify->add_option("--field", o.field, "field file")->required()->check(CLI::ExistingFile);
  verify->add_option("--field", o.field, "field file")->required()->check(CLI::ExistingFile);
  verify->add_option("--field2", o.field2, "second field for the comparison check")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    auto c = configure(o);
    ihf::PipelineResult r;
    if (solve->parsed()) {
      c.mode = ihf::RunMode::Bounded;
      r = ihf::run_pipeline(c);
    } else if (exterior->parsed()) {
      c.mode = ihf::RunMode::Exterior;
      r = ihf::run_pipeline(c);
    } else if (classify->parsed()) {
      r = ihf::run_classify(c, ihf::read_field(o.field, c));
    } else if (verify->parsed()) {
      const auto u = ihf::read_field(o.field, c);
      if (o.field2.empty()) {
        r = ihf::run_verify(c, u);
      } else {
        const auto v = ihf::read_field(o.field2, c);
        r = ihf::run_verify(c, u, &v);
      }
    } else if (oracle->parsed()) {
      c.mode = ihf::RunMode::Bounded;
      r = ihf::run_oracle_compare(c);
    } else {
      c.mode = ihf::RunMode::Bounded;
      r = ihf::run_sweep(c);
    }
    summarize(r);
    return r.exit_code;
  } catch (const ihf::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return ihf::kExitConfig;
  } catch (const ihf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ihf::kExitNotConverged;
  }
}
