#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "conjint/commands.hpp"

namespace {

int emit(const conjint::CommandResult& r) {
  if (!r.output.empty()) {
    if (r.exit_code == conjint::kExitFeasible || r.exit_code == conjint::kExitInfeasible)
      std::cout << r.output;
    else
      std::cerr << r.output;
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decide and construct conjugation interpolation certificates for "
               "normal matrices, and solve pointwise unitary matrix-field equations "
               "over discrete measures"};
  app.set_version_flag("--version", std::string(conjint::kToolVersion));
  app.require_subcommand(1);

  conjint::CliOptions opt;
  double tol_residual = 0.0;
  double tol_cluster = 0.0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol", tol_residual, "override the residual tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--cluster", tol_cluster, "override the eigenvalue clustering tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "seed for randomized subroutines");
  };

  std::string problem_path;
  std::string certificate_path;
  std::string out_path = "-";

  CLI::App* check = app.add_subcommand("check", "validate the structural preconditions of a problem file");
  check->add_option("problem", problem_path, "problem file")->required();
  add_common(check);

  CLI::App* interpolate =
      app.add_subcommand("interpolate", "decide a symmetric or skew instance and emit a certificate");
  interpolate->add_option("problem", problem_path, "problem file")->required();
  interpolate->add_option("--out", out_path, "certificate output path ('-' for stdout)");
  add_common(interpolate);

  CLI::App* verify = app.add_subcommand("verify", "independently re-check a certificate against its problem");
  verify->add_option("problem", problem_path, "problem file")->required();
  verify->add_option("certificate", certificate_path, "certificate file")->required();
  add_common(verify);

  CLI::App* field = app.add_subcommand("field", "solve a ufield or sufield instance and emit the blocks");
  field->add_option("problem", problem_path, "problem file")->required();
  field->add_option("--out", out_path, "certificate output path ('-' for stdout)");
  add_common(field);

  CLI::App* hyper = app.add_subcommand("hyperinvariant", "decide hyperinvariance of a subspace");
  hyper->add_option("problem", problem_path, "problem file")->required();
  add_common(hyper);

  CLI11_PARSE(app, argc, argv);

  for (CLI::App* sub : {check, interpolate, verify, field, hyper}) {
    if (!sub->parsed()) continue;
    if (sub->count("--tol")) opt.tol_residual = tol_residual;
    if (sub->count("--cluster")) opt.tol_cluster = tol_cluster;
  }

  if (check->parsed()) return emit(conjint::run_check(problem_path, opt));
  if (interpolate->parsed()) return emit(conjint::run_interpolate(problem_path, out_path, opt));
  if (verify->parsed()) return emit(conjint::run_verify(problem_path, certificate_path, opt));
  if (field->parsed()) return emit(conjint::run_field(problem_path, out_path, opt));
  if (hyper->parsed()) return emit(conjint::run_hyperinvariant(problem_path, opt));
  return conjint::kExitParse;
}
