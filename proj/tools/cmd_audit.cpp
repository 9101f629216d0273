#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "goba/dataset.hpp"
#include "goba/defense.hpp"
#include "goba/errors.hpp"
#include "goba/inject.hpp"
#include "goba/io.hpp"
#include "goba/report.hpp"
#include "goba/rng.hpp"

namespace goba::cli {

namespace {

using nlohmann::json;

std::map<std::string, Label> load_truth(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const std::exception& e) {
        throw DataError("truth file " + path + ": " + e.what());
    }
    const json& labels = j.contains("labels") ? j.at("labels") : j;
    std::map<std::string, Label> truth;
    for (const auto& [id, label] : labels.items()) {
        truth[id] = label_from_string(label.get<std::string>());
    }
    return truth;
}

Vec3 parse_point(const std::string& text) {
    Vec3 p{};
    std::istringstream in(text);
    std::string field;
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(in, field, ',')) throw UsageError("--ref expects x,y,z");
        try {
            p[i] = std::stod(field);
        } catch (const std::exception&) {
            throw UsageError("--ref expects numeric x,y,z");
        }
    }
    return p;
}

std::string metrics_row(const std::string& method, const std::string& param,
                        const std::map<std::string, Label>* truth,
                        const std::map<std::string, Label>& pred) {
    std::string row = method + "," + param;
    if (truth) {
        const ConfusionMetrics m = confusion_metrics(pred, *truth);
        row += "," + fmt_double(m.acc()) + "," + fmt_double(m.fpr()) + "," + fmt_double(m.fnr());
    } else {
        row += ",NA,NA,NA";
    }
    return row + "\n";
}

json predictions_json(const std::map<std::string, Label>& pred) {
    json out = json::object();
    for (const auto& [id, label] : pred) out[id] = to_string(label);
    return out;
}

std::filesystem::path predictions_path(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension(".predictions.json");
    return p;
}

struct ThresholdOpts {
    std::string manifest;
    std::vector<double> thresholds;
    std::string ref;
    std::string truth;
    std::string out;
};

struct KMeansOpts {
    std::string manifest;
    int k = 2;
    double min_frac = 0.25;
    std::uint64_t seed = 0;
    std::string truth;
    std::string out;
    CLI::Option* seed_opt = nullptr;
};

struct PoisonedOpts {
    std::string manifest;
    std::string out;
};

} // namespace

void register_audit(CLI::App& app, Context& ctx) {
    CLI::App* audit = app.add_subcommand("audit", "Filter datasets on trajectory end positions");
    audit->require_subcommand(1);

    auto topts = std::make_shared<ThresholdOpts>();
    CLI::App* threshold = audit->add_subcommand(
        "threshold", "Flag demos whose end position is far from a reference point");
    threshold->add_option("--manifest", topts->manifest, "Dataset manifest (JSONL)")->required();
    threshold
        ->add_option("--threshold", topts->thresholds,
                     "Distance threshold in meters (repeatable for a sweep)")
        ->required();
    threshold->add_option("--ref", topts->ref,
                          "Explicit reference point x,y,z (default: medoid of end positions)");
    threshold->add_option("--truth", topts->truth, "Ground-truth labels JSON for scoring");
    threshold->add_option("--out", topts->out, "Report CSV path")->required();

    threshold->callback([&ctx, topts] {
        ctx.finalize();
        for (double t : topts->thresholds) {
            if (!(t > 0.0)) throw UsageError("--threshold values must be positive");
        }
        const Manifest manifest = load_manifest(topts->manifest);
        ImportStats import_stats;
        const auto points =
            end_positions(manifest, std::filesystem::path(topts->manifest).parent_path(),
                          ctx.strict, &import_stats);
        if (import_stats.clamped_values > 0) {
            std::cerr << "warning: clamped " << import_stats.clamped_values
                      << " out-of-range gripper values\n";
        }
        const ThresholdRef ref = topts->ref.empty() ? ThresholdRef::medoid()
                                                    : ThresholdRef::at(parse_point(topts->ref));
        std::map<std::string, Label> truth;
        if (!topts->truth.empty()) truth = load_truth(topts->truth);

        std::string csv = "method,param,acc,fpr,fnr\n";
        json runs = json::array();
        for (double t : topts->thresholds) {
            const auto pred = threshold_filter(points, ref, t);
            csv += metrics_row("threshold", fmt_double(t),
                               topts->truth.empty() ? nullptr : &truth, pred);
            runs.push_back(json{{"param", t}, {"predictions", predictions_json(pred)}});
        }
        const auto out_path = ctx.resolve_out(topts->out);
        write_file_atomic(out_path, csv);
        write_file_atomic(predictions_path(out_path),
                          json{{"method", "threshold"}, {"runs", runs}}.dump(2) + "\n");
        std::cerr << "threshold audit of " << points.size() << " demos written to "
                  << out_path.string() << "\n";
    });

    auto kopts = std::make_shared<KMeansOpts>();
    CLI::App* kmeans = audit->add_subcommand(
        "kmeans", "Cluster end positions and flag minority clusters as malicious");
    kmeans->add_option("--manifest", kopts->manifest, "Dataset manifest (JSONL)")->required();
    kmeans->add_option("--k", kopts->k, "Cluster count")->capture_default_str();
    kmeans->add_option("--min-frac", kopts->min_frac, "Minority cluster fraction")
        ->capture_default_str();
    kopts->seed_opt = kmeans->add_option("--seed", kopts->seed, "Initialization seed");
    kmeans->add_option("--truth", kopts->truth, "Ground-truth labels JSON for scoring");
    kmeans->add_option("--out", kopts->out, "Report CSV path")->required();

    kmeans->callback([&ctx, kopts] {
        ctx.finalize();
        if (kopts->k < 1) throw UsageError("--k must be at least 1");
        if (!(kopts->min_frac > 0.0 && kopts->min_frac < 1.0)) {
            throw UsageError("--min-frac must lie in (0, 1)");
        }
        const std::uint64_t seed = ctx.effective_seed(kopts->seed_opt, kopts->seed);
        const Manifest manifest = load_manifest(kopts->manifest);
        ImportStats import_stats;
        const auto by_id =
            end_positions(manifest, std::filesystem::path(kopts->manifest).parent_path(),
                          ctx.strict, &import_stats);
        if (import_stats.clamped_values > 0) {
            std::cerr << "warning: clamped " << import_stats.clamped_values
                      << " out-of-range gripper values\n";
        }

        std::vector<std::string> ids;
        std::vector<Vec3> points;
        for (const auto& [id, p] : by_id) {
            ids.push_back(id);
            points.push_back(p);
        }
        const KMeansResult result = kmeans_cluster(points, kopts->k, seed);
        std::map<std::string, int> assignments;
        for (std::size_t i = 0; i < ids.size(); ++i) assignments[ids[i]] = result.assignments[i];
        const auto pred = minority_flag(assignments, kopts->min_frac);

        std::map<std::string, Label> truth;
        if (!kopts->truth.empty()) truth = load_truth(kopts->truth);
        std::string csv = "method,param,acc,fpr,fnr\n";
        csv += metrics_row("kmeans", std::to_string(kopts->k),
                           kopts->truth.empty() ? nullptr : &truth, pred);

        json centroids = json::array();
        for (const Vec3& c : result.centroids) centroids.push_back(json::array({c[0], c[1], c[2]}));
        json details{{"method", "kmeans"},
                     {"k", kopts->k},
                     {"min_frac", kopts->min_frac},
                     {"seed", seed},
                     {"generator", std::string(kGeneratorId)},
                     {"inertia", result.inertia},
                     {"iterations", result.iterations},
                     {"centroids", centroids},
                     {"predictions", predictions_json(pred)}};
        const auto out_path = ctx.resolve_out(kopts->out);
        write_file_atomic(out_path, csv);
        write_file_atomic(predictions_path(out_path), details.dump(2) + "\n");
        std::cerr << "k-means audit of " << points.size() << " demos written to "
                  << out_path.string() << "\n";
    });

    auto popts = std::make_shared<PoisonedOpts>();
    CLI::App* poisoned = audit->add_subcommand(
        "poisoned", "Check instruction consistency of a poisoned manifest and report realized IR");
    poisoned->add_option("--manifest", popts->manifest, "Dataset manifest (JSONL)")->required();
    poisoned->add_option("--out", popts->out, "Report JSON path")->required();

    poisoned->callback([&ctx, popts] {
        ctx.finalize();
        const Manifest manifest = load_manifest(popts->manifest);
        const PoisonAudit audit_result = verify_poisoned(manifest);
        write_file_atomic(ctx.resolve_out(popts->out), poison_audit_to_json(audit_result));
        std::cerr << "flagged " << audit_result.flags.size() << " of " << audit_result.n_malicious
                  << " malicious demos, realized IR " << audit_result.realized_ir << "\n";
    });
}

} // namespace goba::cli
