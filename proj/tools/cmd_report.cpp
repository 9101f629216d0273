#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "goba/episode.hpp"
#include "goba/errors.hpp"
#include "goba/io.hpp"
#include "goba/report.hpp"

namespace goba::cli {

namespace {

using nlohmann::json;

struct SummaryOpts {
    std::vector<std::string> inputs;
    std::string out;
};

struct CrossOpts {
    std::vector<std::string> inputs;
    std::string metric;
    std::string out;
};

CrossCell cell_from_json(const json& j, const std::string& metric, const std::string& file) {
    CrossCell cell;
    cell.train_variant = j.at("train_variant").get<std::string>();
    cell.test_variant = j.at("test_variant").get<std::string>();
    cell.metric_name = metric;
    const json& metrics = j.at("metrics");
    if (!metrics.contains(metric)) {
        throw DataError(file + ": no metric \"" + metric + "\" for train=" + cell.train_variant +
                        " test=" + cell.test_variant);
    }
    cell.mean = metrics.at(metric).at("mean").get<double>();
    cell.std = metrics.at(metric).value("std", 0.0);
    return cell;
}

} // namespace

void register_report(CLI::App& app, Context& ctx) {
    CLI::App* report =
        app.add_subcommand("report", "Emit publication-shaped tables from evaluation outputs");
    report->require_subcommand(1);

    auto sopts = std::make_shared<SummaryOpts>();
    CLI::App* summary = report->add_subcommand(
        "summary", "Aggregate run summaries into a mean ± std table (CSV, Markdown, JSON)");
    summary->add_option("--in", sopts->inputs, "Run summary JSON files")->required();
    summary->add_option("--out", sopts->out, "Output prefix; writes <prefix>.{csv,md,json}")
        ->required();

    summary->callback([&ctx, sopts] {
        ctx.finalize();
        std::map<std::string, std::vector<RunSummary>> by_label;
        for (const std::string& file : sopts->inputs) {
            auto [label, run] = run_summary_from_json(read_text_file(file));
            if (label.empty()) label = std::filesystem::path(file).stem().string();
            by_label[label].push_back(run);
        }
        if (by_label.empty()) throw DataError("no run summaries given");
        std::vector<SummaryRow> rows;
        for (const auto& [label, runs] : by_label) {
            rows.push_back({label, aggregate_repeats(runs)});
        }
        const SummaryTable table = emit_summary_table(rows);
        const auto prefix = ctx.resolve_out(sopts->out);
        write_file_atomic(prefix.string() + ".csv", table.csv);
        write_file_atomic(prefix.string() + ".md", table.markdown);
        write_file_atomic(prefix.string() + ".json", table.json);
        std::cerr << "wrote " << rows.size() << " rows to " << prefix.string() << ".{csv,md,json}\n";
    });

    auto copts = std::make_shared<CrossOpts>();
    CLI::App* cross = report->add_subcommand(
        "cross", "Dense train-variant x test-variant matrix for one metric");
    cross->add_option("--in", copts->inputs, "Cross-cell JSON files")->required();
    cross->add_option("--metric", copts->metric, "Metric to tabulate (e.g. level3, fr)")
        ->required();
    cross->add_option("--out", copts->out, "Matrix CSV path")->required();

    cross->callback([&ctx, copts] {
        ctx.finalize();
        std::vector<CrossCell> cells;
        for (const std::string& file : copts->inputs) {
            json j;
            try {
                j = json::parse(read_text_file(file));
            } catch (const json::exception& e) {
                throw DataError(file + ": " + e.what());
            }
            try {
                if (j.is_array()) {
                    for (const json& item : j) {
                        cells.push_back(cell_from_json(item, copts->metric, file));
                    }
                } else {
                    cells.push_back(cell_from_json(j, copts->metric, file));
                }
            } catch (const json::exception& e) {
                throw DataError(file + ": " + e.what());
            }
        }
        const std::string csv = cross_matrix_csv(cells);
        const auto out_path = ctx.resolve_out(copts->out);
        write_file_atomic(out_path, csv);
        std::cerr << "wrote " << cells.size() << " cells to " << out_path.string() << "\n";
    });
}

} // namespace goba::cli
