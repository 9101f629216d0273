#include "context.hpp"

#include <cstdlib>
#include <fstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "goba/errors.hpp"
#include "goba/io.hpp"

namespace goba::cli {

void Context::finalize() {
    if (!config_path.empty()) {
        try {
            const auto cfg = nlohmann::json::parse(read_text_file(config_path));
            if (seed_opt && seed_opt->count() == 0 && cfg.contains("seed")) {
                seed = cfg.at("seed").get<std::uint64_t>();
            }
            if (strict_opt && strict_opt->count() == 0 && cfg.contains("strict")) {
                strict = cfg.at("strict").get<bool>();
            }
            if (out_dir_opt && out_dir_opt->count() == 0 && cfg.contains("out_dir")) {
                out_dir = cfg.at("out_dir").get<std::string>();
            }
        } catch (const DataError&) {
            throw;
        } catch (const std::exception& e) {
            throw DataError("config file " + config_path + ": " + e.what());
        }
    }
    if (const char* env = std::getenv("GOBA_OUT"); env && *env) {
        out_dir = env;
    }
    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        const std::filesystem::path probe =
            std::filesystem::path(out_dir) / ".goba-write-probe";
        std::ofstream out(probe);
        if (ec || !out) {
            throw UsageError("output directory is not writable: " + out_dir);
        }
        out.close();
        std::filesystem::remove(probe, ec);
    }
}

std::filesystem::path Context::resolve_out(const std::string& path) const {
    const std::filesystem::path p(path);
    if (p.is_absolute() || out_dir.empty()) return p;
    return std::filesystem::path(out_dir) / p;
}

std::uint64_t Context::effective_seed(const CLI::Option* sub_seed_opt,
                                      std::uint64_t sub_seed) const {
    if (sub_seed_opt && sub_seed_opt->count() > 0) return sub_seed;
    return seed;
}

} // namespace goba::cli
