#include <filesystem>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "goba/dataset.hpp"
#include "goba/errors.hpp"
#include "goba/inject.hpp"
#include "goba/io.hpp"

namespace goba::cli {

namespace {

// Blob references stay relative in the output manifest, so they are rewritten
// against the new manifest directory.
void rebase_refs(Manifest& manifest, const std::filesystem::path& old_base,
                 const std::filesystem::path& new_base) {
    for (Demonstration& demo : manifest.demos) {
        const std::filesystem::path ref(demo.trajectory_ref);
        if (ref.is_absolute()) continue;
        std::error_code ec;
        const auto target = std::filesystem::absolute(old_base / ref).lexically_normal();
        const auto rebased =
            std::filesystem::relative(target, std::filesystem::absolute(new_base), ec);
        demo.trajectory_ref = ec ? target.generic_string() : rebased.generic_string();
    }
}

struct InjectOpts {
    std::string clean;
    std::string pool;
    double ir = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    bool check = false;
    CLI::Option* seed_opt = nullptr;
};

} // namespace

void register_inject(CLI::App& app, Context& ctx) {
    auto opts = std::make_shared<InjectOpts>();

    CLI::App* sub = app.add_subcommand(
        "inject", "Merge malicious demonstrations into a clean dataset at a target injection rate");
    sub->add_option("--clean", opts->clean, "Clean manifest (JSONL)")->required();
    sub->add_option("--pool", opts->pool, "Malicious demonstration pool manifest (JSONL)")->required();
    sub->add_option("--ir", opts->ir, "Target injection rate in [0, 1)")->required();
    opts->seed_opt = sub->add_option("--seed", opts->seed, "Sampling and shuffle seed");
    sub->add_option("--out", opts->out, "Output directory")->required();
    sub->add_flag("--check", opts->check,
                  "Re-verify instruction consistency of the poisoned manifest");

    sub->callback([&ctx, opts] {
        ctx.finalize();
        if (!(opts->ir >= 0.0 && opts->ir < 1.0)) {
            throw UsageError("--ir must lie in [0, 1)");
        }
        const std::uint64_t seed = ctx.effective_seed(opts->seed_opt, opts->seed);
        const std::filesystem::path out_dir = ctx.resolve_out(opts->out);

        Manifest clean = load_manifest(opts->clean);
        Manifest pool = load_manifest(opts->pool);
        rebase_refs(clean, std::filesystem::path(opts->clean).parent_path(), out_dir);
        rebase_refs(pool, std::filesystem::path(opts->pool).parent_path(), out_dir);

        auto [poisoned, report] = inject(clean, pool, opts->ir, seed);
        save_manifest(poisoned, out_dir / "poisoned.jsonl");
        write_file_atomic(out_dir / "injection_report.json", injection_report_to_json(report));

        if (opts->check) {
            const PoisonAudit audit = verify_poisoned(poisoned);
            write_file_atomic(out_dir / "poison_check.json", poison_audit_to_json(audit));
            if (!audit.flags.empty()) {
                throw DataError("poisoned manifest failed the instruction check: " +
                                std::to_string(audit.flags.size()) + " flagged demos");
            }
        }
        std::cerr << "injected " << report.m_total_injected << " demos (realized IR "
                  << report.realized_ir << ") into " << (out_dir / "poisoned.jsonl").string()
                  << "\n";
    });
}

} // namespace goba::cli
