#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace CLI {
class Option;
}

namespace goba::cli {

// Bad flag values or an unusable output directory: exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Global options shared by every subcommand. Precedence per field:
// GOBA_OUT env > explicit flag > config file > built-in default.
struct Context {
    std::uint64_t seed = 0;
    bool strict = false;
    std::string out_dir;
    std::string config_path;

    CLI::Option* seed_opt = nullptr;
    CLI::Option* strict_opt = nullptr;
    CLI::Option* out_dir_opt = nullptr;

    // Merges config file and environment, then verifies out_dir is writable.
    // Called once at the top of every subcommand callback.
    void finalize();

    // Relative output paths land under out_dir when one is configured.
    std::filesystem::path resolve_out(const std::string& path) const;

    std::uint64_t effective_seed(const CLI::Option* sub_seed_opt, std::uint64_t sub_seed) const;
};

} // namespace goba::cli
