#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tensorc/driver.hpp"
#include "tensorc/error.hpp"

namespace {

int fail(tensorc::ErrorCode code, const std::string& message) {
  std::string line = message;
  for (char& c : line) {
    if (c == '\n') c = ' ';
  }
  std::cerr << "error[" << tensorc::to_string(code) << "]: " << line << "\n";
  return code == tensorc::ErrorCode::Usage ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensorc: tensor equations to finite-difference kernels"};
  app.require_subcommand(1, 1);

  std::string system_file, params_file, out_dir, ir_dir;
  std::vector<int> resolutions;

  auto* decompose = app.add_subcommand("decompose", "print the projected equations");
  auto* expand = app.add_subcommand("expand", "print the component equations");
  auto* generate = app.add_subcommand("generate", "write C kernels, IR and a manifest");
  auto* run = app.add_subcommand("run", "evolve a system from a parameter file");
  auto* conv = app.add_subcommand("converge", "convergence table against the analytic solution");
  for (auto* sub : {decompose, expand, generate, run, conv}) {
    sub->add_option("system", system_file, "system definition (.tsys)")->required();
  }
  generate->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--params", params_file, "parameter file")->required();
  run->add_option("--out", out_dir, "output directory (CSV to stdout when omitted)");
  run->add_option("--ir", ir_dir, "load kernels from a generate directory");
  conv->add_option("--params", params_file, "parameter file")->required();
  conv->add_option("--resolutions", resolutions, "comma-separated nx values")->delimiter(',')->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(tensorc::ErrorCode::Usage, e.what());
  }

  try {
    const tensorc::SystemDefinition sys = tensorc::load_system(system_file);
    if (*decompose) {
      tensorc::cmd_decompose(sys, std::cout);
    } else if (*expand) {
      tensorc::cmd_expand(sys, std::cout);
    } else if (*generate) {
      for (const auto& path : tensorc::cmd_generate(sys, out_dir)) std::cout << "wrote " << path << "\n";
    } else if (*run) {
      const auto params = tensorc::load_params(params_file, sys.param_names());
      tensorc::cmd_run(sys, params, out_dir.empty() ? params.output_dir : out_dir, ir_dir, std::cout);
    } else if (*conv) {
      const auto params = tensorc::load_params(params_file, sys.param_names());
      tensorc::cmd_converge(sys, params, resolutions, std::cout);
    }
  } catch (const tensorc::NonConvergenceError& e) {
    return fail(e.code(), std::string(e.what()) + "; last expression: " + tensorc::to_string(e.last()));
  } catch (const tensorc::Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail(tensorc::ErrorCode::Io, e.what());
  }
  return 0;
}
