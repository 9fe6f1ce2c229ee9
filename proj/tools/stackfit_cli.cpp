#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace stackfit::cli;
  CLI::App app{"Multi-scale object detection and robust ellipse-stack fitting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "stackfit 1.0.0");
  const auto run_preprocess = register_preprocess(app);
  const auto run_fit = register_fit(app);
  const auto run_bench = register_bench(app);
  const auto run_synth = register_synth(app);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(args, {"--config", "--spec"});
    std::vector<char*> cargs;
    for (auto& a : args) cargs.push_back(a.data());
    try {
      app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e);
      return rc == 0 ? kOk : kUsage;
    }
    const auto* sub = app.get_subcommands().front();
    if (sub->get_name() == "preprocess") return run_preprocess();
    if (sub->get_name() == "fit") return run_fit();
    if (sub->get_name() == "bench-robust") return run_bench();
    return run_synth();
  } catch (const Exit& e) {
    if (!e.message.empty()) std::cerr << "stackfit: " << e.message << "\n";
    return e.code;
  } catch (const stackfit::Error& e) {
    std::cerr << "stackfit: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "stackfit: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "stackfit: internal error: " << e.what() << "\n";
    return kInternal;
  }
}
