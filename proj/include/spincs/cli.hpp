#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace spincs::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigInvalid = 2, kNumericalFailure = 3 };

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
    std::optional<double> tol;
    // wigner only.
    std::optional<int> two_s;
    std::optional<double> theta;
    std::optional<double> phi;
    std::optional<double> psi;
};

// Runs one subcommand and writes <out>/<command>.json (plus <command>.csv for
// series). Diagnostics go to `log`.
int run(const std::string& command, const Flags& flags, std::ostream& log);

int main(int argc, char** argv);

} // namespace spincs::cli
