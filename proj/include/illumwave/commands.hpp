#ifndef ILLUMWAVE_COMMANDS_HPP
#define ILLUMWAVE_COMMANDS_HPP

#include <string>

namespace ilw {

inline constexpr const char* kToolVersion = "illumwave 0.1.0";

// Exit-code contract: 0 pass, 1 usage/config error, 2 mathematical or
// geometric failure. Each command writes its artifacts plus a manifest into
// out_dir and reports one summary line on stdout.
int cmd_geometry_check(const std::string& config_path, const std::string& out_dir,
                       int threads, uint64_t seed);
int cmd_verify_identity(const std::string& config_path, const std::string& out_dir,
                        int threads, uint64_t seed);
int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 int threads, uint64_t seed);
int cmd_audit(const std::string& config_path, const std::string& out_dir, int threads,
              uint64_t seed);

}  // namespace ilw

#endif
