#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gkflow::cli {

enum class ExitCode : int { ok = 0, verification_failure = 1, input_error = 2 };

/// Malformed flags, files or values; maps to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Overrides {
    std::optional<int> grid;
    std::optional<double> h;
    std::optional<double> dt;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<double>> t_schedule;
};

struct RunConfig {
    std::string command;
    /// Scenario file or built-in scenario name for `flow`.
    std::optional<std::string> input;
    Overrides overrides;
    std::filesystem::path out_dir = "gkflow-out";

    int n = 3;
    int samples = 0;
    bool degenerate = false;
    bool inject_sign_flip = false;

    bool window = false;
    double t_hi = 0.5;

    std::string group;
    std::string y;
    std::string roots;
    bool scan_table = false;
};

/// Checks overrides and paths before any computation; throws InputError.
void validate(const RunConfig& config);

[[nodiscard]] ExitCode cmd_algebra_check(const RunConfig& config, std::ostream& out);
[[nodiscard]] ExitCode cmd_dictionary(const RunConfig& config, std::ostream& out);
[[nodiscard]] ExitCode cmd_flow(const RunConfig& config, std::ostream& out);
[[nodiscard]] ExitCode cmd_lie(const RunConfig& config, std::ostream& out);

/// Parses argv, dispatches, and maps every error to an exit code. Never throws.
[[nodiscard]] int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gkflow::cli
