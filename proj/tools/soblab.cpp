// soblab: configuration-driven driver for the inequality laboratory.
//
//   soblab run|suite|growth|sharpness --config <file> [--out dir]
//          [--format csv|json|both] [--threads N]
//
// Exit codes: 0 success, 2 an asserted invariant failed, 3 config error.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "soblab/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for maximal-function Sobolev inequalities"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format = "both";
  unsigned threads = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--format", format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--threads", threads, "worker count (values are unaffected)");
  };

  CLI::App* c_run = app.add_subcommand("run", "evaluate configured cases once");
  CLI::App* c_suite = app.add_subcommand("suite", "run cases over the standard corpus");
  CLI::App* c_growth = app.add_subcommand("growth", "counterexample growth table");
  CLI::App* c_sharp = app.add_subcommand("sharpness", "log-bump sharpness scan");
  for (CLI::App* sub : {c_run, c_suite, c_growth, c_sharp}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 3;
  }

  try {
    soblab::set_thread_count(threads);
    soblab::RunConfig cfg = soblab::parse_config(config_path);
    soblab::Command cmd = soblab::Command::run;
    if (c_suite->parsed()) cmd = soblab::Command::suite;
    if (c_growth->parsed()) cmd = soblab::Command::growth;
    if (c_sharp->parsed()) cmd = soblab::Command::sharpness;
    return soblab::run_command(cfg, cmd, out_dir, format);
  } catch (const soblab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const soblab::ParamError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const soblab::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const soblab::UnsupportedError& e) {
    std::cerr << "unsupported input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
