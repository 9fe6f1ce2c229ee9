#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stackfit/error.hpp"
#include "stackfit/volume.hpp"

namespace stackfit::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kEmpty = 3, kInternal = 4 };

/// Thrown by subcommands to leave with a specific code and message.
struct Exit {
  int code;
  std::string message;
};

/// Rewrites argv so that `key: value` lines from the file named by a config
/// flag (`--config`, plus any extra names given) become `--key=value`
/// arguments inserted right after the subcommand. Keys already present on
/// the command line are skipped, so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args,
                                       const std::vector<std::string>& config_flags);

/// "a;b;c" where each entry is one value (isotropic) or three (per axis).
std::vector<Vec3> parse_sigmas(const std::string& text);
Vec3 parse_vec3(const std::string& text, const std::string& what);
Dims3 parse_dims(const std::string& text);

/// Runs body(i) for i in [0, n) on up to `jobs` threads. The first exception
/// thrown is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body);

/// Exit code for an exception escaping a subcommand.
int exit_code_for(const Error& e);

void add_config_option(CLI::App& app);
void add_jobs_option(CLI::App& app, std::size_t& jobs);

}  // namespace stackfit::cli
