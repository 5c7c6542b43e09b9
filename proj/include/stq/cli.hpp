#pragma once

#include <optional>
#include <string>

namespace stq {

struct CliOptions {
  std::string config_path;
  std::optional<std::string> out_dir;  // overrides [output] dir
  int jobs = 1;
  std::optional<uint64_t> seed;
};

// Exit codes: 0 ok, 1 verification failure, 2 precondition/infeasibility,
// 3 I/O.
int cmd_certify(const CliOptions& opts);
int cmd_region(const CliOptions& opts);
int cmd_simulate(const CliOptions& opts);
int cmd_compare(const CliOptions& opts);

int run_cli(int argc, const char* const* argv);

} // namespace stq
