#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "logschro/special_functions.hpp"

namespace logschro::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kOutputDirEnv = "LOGSCHRO_OUTPUT_DIR";

// exit code 2
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;  // constants, kernel-table, density-table, apply, green, solve, eigs, verify
    OperatorParams params;
    // grid (apply)
    double L = 12.0;
    int n = 512;
    bool periodic = false;
    bool pointwise = false;
    std::string function = "gaussian";  // builtin for apply --pointwise
    // mesh (solve, eigs, verify)
    double a = -1.0, b = 1.0;
    int mesh_n = 127;
    int k = 4;
    std::string f = "one";  // one, spike, random-seed=K or a CSV path
    // tables
    double r_min = 1e-4, r_max = 1e3;
    int points = 60;
    double t = 1.0;
    double tol = 1e-10;
    std::string input;
    std::string out;
    std::uint64_t seed = 0;
    std::vector<std::string> provenance;  // one line per flag that overrode a file value
};

// Throws UsageError; --help and --version print and return a config with an empty command.
RunConfig parse_config(int argc, const char* const* argv, std::ostream& out);

// 0 ok, 1 failed verification or module error (a JSON error record goes to err).
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace logschro::cli
