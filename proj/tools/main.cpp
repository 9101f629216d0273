#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "context.hpp"
#include "goba/errors.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poison, evaluate, and audit imitation-learning demonstration datasets"};
    app.require_subcommand(1);

    goba::cli::Context ctx;
    ctx.seed_opt = app.add_option("--seed", ctx.seed, "Default seed for seeded subcommands")
                       ->capture_default_str();
    ctx.strict_opt =
        app.add_flag("--strict", ctx.strict, "Reject instead of clamping on import warnings");
    ctx.out_dir_opt = app.add_option("--out-dir", ctx.out_dir,
                                     "Base directory for relative output paths (env GOBA_OUT "
                                     "overrides)");
    app.add_option("--config", ctx.config_path, "Optional JSON config merged under explicit flags");

    goba::cli::register_inject(app, ctx);
    goba::cli::register_eval(app, ctx);
    goba::cli::register_verify(app, ctx);
    goba::cli::register_audit(app, ctx);
    goba::cli::register_synth(app, ctx);
    goba::cli::register_report(app, ctx);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    } catch (const goba::cli::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const goba::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const goba::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return 0;
}
