#include <iostream>
#include <memory>

#include "commands.hpp"
#include "goba/errors.hpp"
#include "goba/synth.hpp"

namespace goba::cli {

namespace {

struct SynthOpts {
    std::string preset;
    std::uint64_t seed = 0;
    std::string out;
    std::int64_t n_episodes = 100;
    CLI::Option* seed_opt = nullptr;
};

} // namespace

void register_synth(CLI::App& app, Context& ctx) {
    auto opts = std::make_shared<SynthOpts>();

    CLI::App* sub = app.add_subcommand(
        "synth", "Generate synthetic datasets and episode logs with known ground truth");
    std::string preset_help = "Preset:";
    for (const std::string& name : builtin_preset_names()) preset_help += " " + name;
    sub->add_option("--preset", opts->preset, preset_help)->required();
    opts->seed_opt = sub->add_option("--seed", opts->seed, "Generation seed");
    sub->add_option("--out", opts->out, "Output directory")->required();
    sub->add_option("--n", opts->n_episodes, "Episode count (episodes-mixed only)")
        ->capture_default_str();

    sub->callback([&ctx, opts] {
        ctx.finalize();
        const std::uint64_t seed = ctx.effective_seed(opts->seed_opt, opts->seed);
        const auto out_dir = ctx.resolve_out(opts->out);
        if (opts->preset == "episodes-mixed") {
            if (opts->n_episodes <= 0) throw UsageError("--n must be positive");
            const SynthEpisodes episodes = synth_episode_mix(opts->n_episodes, seed);
            write_synth_episodes(episodes, out_dir);
            std::cerr << "wrote " << episodes.episodes.size() << " episode logs to "
                      << out_dir.string() << "\n";
            return;
        }
        SynthPreset preset;
        try {
            preset = builtin_preset(opts->preset);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        const SynthDataset dataset = synth_dataset(preset, seed);
        write_synth_dataset(dataset, out_dir);
        std::cerr << "wrote " << dataset.manifest.demos.size() << " demos to " << out_dir.string()
                  << "\n";
    });
}

} // namespace goba::cli
