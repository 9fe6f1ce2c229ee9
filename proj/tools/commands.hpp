#pragma once

#include "cli_common.hpp"

namespace stackfit::cli {

// Each register_* adds a subcommand and returns the function that runs it
// after a successful parse.
std::function<int()> register_preprocess(CLI::App& app);
std::function<int()> register_fit(CLI::App& app);
std::function<int()> register_bench(CLI::App& app);
std::function<int()> register_synth(CLI::App& app);

}  // namespace stackfit::cli
