#ifndef RESIST_SUITE_HPP
#define RESIST_SUITE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "resist/config.hpp"

namespace resist {

// Exit statuses of run_suite, also used by the CLI.
inline constexpr int kSuiteOk = 0;
inline constexpr int kSuiteInvalidConfig = 2;
inline constexpr int kSuiteIoFailure = 3;

struct SuiteResult {
    int status = kSuiteOk;
    std::string message;
    std::vector<std::string> csv_files;
    std::string summary_file;
};

// Runs every (config, seed) pair, one metrics CSV each, plus a summary CSV
// with per-config mean/stddev of terminal and tail metrics. Existing files
// are never overwritten; a numeric suffix is appended instead. Validation of
// every run happens before the first run starts.
SuiteResult run_suite(const SuiteSpec& suite, const std::string& out_dir,
                      const std::vector<std::uint64_t>& seed_override = {}, int parallel = 1,
                      bool verbose = false);

}  // namespace resist

#endif
