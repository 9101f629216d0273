#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "commands.hpp"
#include "goba/classify.hpp"
#include "goba/episode.hpp"
#include "goba/errors.hpp"
#include "goba/io.hpp"

namespace goba::cli {

namespace {

struct EvalOpts {
    std::string episodes;
    std::string scene;
    std::string out;
    std::string label;
    double grip_threshold = kGripClosingThreshold;
};

struct VerifyOpts {
    double baseline_sr = 0.0;
    double sr = 0.0;
    double asr = 0.0;
    double sigma = 0.0;
    double gamma = 0.0;
};

} // namespace

void register_eval(CLI::App& app, Context& ctx) {
    auto opts = std::make_shared<EvalOpts>();

    CLI::App* sub =
        app.add_subcommand("eval", "Classify rollout episode logs and summarize outcome rates");
    sub->add_option("--episodes", opts->episodes, "Directory of episode logs (*.json)")->required();
    sub->add_option("--scene", opts->scene, "Scene JSON overriding any scene embedded in the logs");
    sub->add_option("--out", opts->out, "Summary JSON output path")->required();
    sub->add_option("--label", opts->label, "Row label recorded in the summary");
    sub->add_option("--grip-threshold", opts->grip_threshold, "Gripper closing threshold")
        ->check(CLI::Range(-1.0, 1.0))
        ->capture_default_str();

    sub->callback([&ctx, opts] {
        ctx.finalize();
        std::optional<SceneSpec> scene;
        if (!opts->scene.empty()) scene = scene_from_json(read_text_file(opts->scene));

        const auto files = list_files(opts->episodes, ".json");
        if (files.empty()) throw DataError("no episode logs in " + opts->episodes);

        std::map<std::string, Outcome> per_episode;
        std::vector<Outcome> outcomes;
        const ClassifyConfig config{opts->grip_threshold};
        for (const auto& file : files) {
            EpisodeLog episode = episode_from_json(read_text_file(file), scene);
            const Outcome outcome = classify_episode(episode, config);
            per_episode[file.stem().string()] = outcome;
            outcomes.push_back(outcome);
        }
        const RunSummary summary = summarize_run(outcomes);
        const std::string label = opts->label.empty()
                                      ? std::filesystem::path(opts->episodes).filename().string()
                                      : opts->label;
        write_file_atomic(ctx.resolve_out(opts->out),
                          run_summary_to_json(label, summary, per_episode));
        std::cerr << "classified " << summary.n_episodes << " episodes, level3 rate "
                  << summary.level3() << "\n";
    });
}

void register_verify(CLI::App& app, Context& ctx) {
    auto opts = std::make_shared<VerifyOpts>();

    CLI::App* sub = app.add_subcommand(
        "verify", "Check the clean-degradation and attack-success conditions of a backdoor");
    sub->add_option("--baseline-sr", opts->baseline_sr, "Clean success rate of the baseline model")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--sr", opts->sr, "Clean success rate of the backdoored model")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--asr", opts->asr, "Attack success rate under the trigger")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--sigma", opts->sigma, "Max tolerable clean-error increase")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--gamma", opts->gamma, "Min required attack success rate")
        ->required()
        ->check(CLI::Range(0.0, 1.0));

    sub->callback([&ctx, opts] {
        ctx.finalize();
        const Verdict verdict = verify_backdoor_conditions(opts->baseline_sr, opts->sr, opts->asr,
                                                           {opts->sigma, opts->gamma});
        const double degradation = std::max(0.0, opts->baseline_sr - opts->sr);
        std::cout << "{\"verdict\": \"" << to_string(verdict)
                  << "\", \"clean_degradation\": " << degradation
                  << ", \"triggered_asr\": " << opts->asr << ", \"sigma\": " << opts->sigma
                  << ", \"gamma\": " << opts->gamma << "}\n";
    });
}

} // namespace goba::cli
