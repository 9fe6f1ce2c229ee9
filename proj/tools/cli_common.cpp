#include "cli_common.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "stackfit/keyvalue.hpp"

namespace stackfit::cli {

std::vector<std::string> expand_config(const std::vector<std::string>& args,
                                       const std::vector<std::string>& config_flags) {
  if (args.size() < 2) return args;
  // args[0] program, args[1] subcommand (and args[2] for `synth <kind>`).
  std::string config_path;
  std::set<std::string> given;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    bool is_config = false;
    for (const auto& f : config_flags) {
      if (a == f && i + 1 < args.size()) {
        config_path = args[++i];
        is_config = true;
      } else if (a.rfind(f + "=", 0) == 0) {
        config_path = a.substr(f.size() + 1);
        is_config = true;
      }
    }
    if (is_config) continue;
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos
                                                                                             : a.find('=') - 2));
    kept.push_back(a);
  }
  if (config_path.empty()) return kept;

  const auto kv = KeyValueFile::load(config_path);
  std::size_t insert_at = 2;
  if (kept.size() > 2 && kept[1] == "synth" && kept[2].rfind("-", 0) != 0) insert_at = 3;
  insert_at = std::min(insert_at, kept.size());
  std::vector<std::string> injected;
  for (const auto& [key, value] : kv.entries()) {
    if (given.count(key)) continue;
    injected.push_back("--" + key + "=" + value);
  }
  kept.insert(kept.begin() + static_cast<std::ptrdiff_t>(insert_at), injected.begin(), injected.end());
  return kept;
}

Vec3 parse_vec3(const std::string& text, const std::string& what) {
  const auto v = parse_number_list(text);
  if (v.size() == 1) return {v[0], v[0], v[0]};
  if (v.size() != 3) throw Error(ErrorCode::InvalidInput, what + " needs 1 or 3 values, got '" + text + "'");
  return {v[0], v[1], v[2]};
}

std::vector<Vec3> parse_sigmas(const std::string& text) {
  std::vector<Vec3> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_vec3(item, "sigma"));
  }
  if (out.empty()) throw Error(ErrorCode::InvalidInput, "no sigmas given");
  return out;
}

Dims3 parse_dims(const std::string& text) {
  const auto v = parse_number_list(text);
  if (v.size() != 3) throw Error(ErrorCode::InvalidInput, "dims needs three values");
  Dims3 d{};
  for (int a = 0; a < 3; ++a) {
    if (!(v[a] >= 1.0) || v[a] != static_cast<double>(static_cast<std::size_t>(v[a]))) {
      throw Error(ErrorCode::InvalidInput, "dims must be positive integers");
    }
    d[a] = static_cast<std::size_t>(v[a]);
  }
  return d;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; !failed && (i = next++) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first) first = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InternalError:
      return kInternal;
    case ErrorCode::EmptyRegion:
      return kEmpty;
    default:
      return kUsage;
  }
}

void add_config_option(CLI::App& app) {
  // Consumed by expand_config before parsing; registered for --help only.
  app.add_option("--config", "key: value file; keys are flag names, explicit flags override");
}

void add_jobs_option(CLI::App& app, std::size_t& jobs) {
  app.add_option("--jobs", jobs, "Worker threads")->envname("STACKFIT_JOBS")->check(CLI::PositiveNumber);
}

}  // namespace stackfit::cli
