#include "goba/report.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "goba/errors.hpp"

namespace goba {

using nlohmann::json;

std::string fmt_double(double v) {
    if (v == 0.0) v = 0.0; // normalize -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_fixed(double v, int precision) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

std::string format_pct_mean_std(double mean, double std) {
    return fmt_fixed(mean * 100.0, 1) + " ± " + fmt_fixed(std * 100.0, 1);
}

bool parse_pct_mean_std(const std::string& text, double& mean, double& std) {
    const std::string sep = " ± ";
    const auto pos = text.find(sep);
    if (pos == std::string::npos) return false;
    try {
        mean = std::stod(text.substr(0, pos)) / 100.0;
        std = std::stod(text.substr(pos + sep.size())) / 100.0;
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

namespace {

constexpr const char* kMetricNames[] = {"sr", "fr", "level1", "level2", "level3", "other"};

std::vector<MeanStd> metrics_of(const AggregateSummary& agg) {
    return {agg.sr, agg.fr, agg.level1, agg.level2, agg.level3, agg.other};
}

void set_metric(AggregateSummary& agg, int index, const MeanStd& value) {
    switch (index) {
        case 0: agg.sr = value; break;
        case 1: agg.fr = value; break;
        case 2: agg.level1 = value; break;
        case 3: agg.level2 = value; break;
        case 4: agg.level3 = value; break;
        case 5: agg.other = value; break;
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

} // namespace

SummaryTable emit_summary_table(const std::vector<SummaryRow>& rows) {
    if (rows.empty()) throw DomainError("emit_summary_table: no rows");
    SummaryTable table;

    std::string csv = "label";
    for (const char* name : kMetricNames) {
        csv += std::string(",") + name + "_mean," + name + "_std";
    }
    csv += "\n";
    for (const SummaryRow& row : rows) {
        csv += row.label;
        for (const MeanStd& m : metrics_of(row.agg)) {
            csv += "," + fmt_double(m.mean) + "," + fmt_double(m.std);
        }
        csv += "\n";
    }
    table.csv = csv;

    std::string md = "| Label | SR | FR | Level-1 | Level-2 | Level-3 | Other |\n";
    md += "| --- | --- | --- | --- | --- | --- | --- |\n";
    for (const SummaryRow& row : rows) {
        md += "| " + row.label;
        for (const MeanStd& m : metrics_of(row.agg)) {
            md += " | " + format_pct_mean_std(m.mean, m.std);
        }
        md += " |\n";
    }
    table.markdown = md;

    json jrows = json::array();
    for (const SummaryRow& row : rows) {
        json jrow{{"label", row.label}, {"n_runs", row.agg.n_runs}};
        const auto metrics = metrics_of(row.agg);
        for (int i = 0; i < 6; ++i) {
            jrow[kMetricNames[i]] = json{{"mean", metrics[i].mean}, {"std", metrics[i].std}};
        }
        jrows.push_back(jrow);
    }
    table.json = json{{"rows", jrows}}.dump(2) + "\n";
    return table;
}

std::vector<SummaryRow> parse_summary_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw DataError("summary csv: empty input");
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 13) {
            throw DataError("summary csv: expected 13 fields, got " +
                            std::to_string(fields.size()));
        }
        SummaryRow row;
        row.label = fields[0];
        for (int i = 0; i < 6; ++i) {
            MeanStd m;
            try {
                m.mean = std::stod(fields[1 + 2 * i]);
                m.std = std::stod(fields[2 + 2 * i]);
            } catch (const std::exception&) {
                throw DataError("summary csv: bad number in row for " + row.label);
            }
            set_metric(row.agg, i, m);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string cross_matrix_csv(const std::vector<CrossCell>& cells) {
    if (cells.empty()) throw DomainError("cross_matrix_csv: no cells");
    const std::string& metric = cells.front().metric_name;
    std::set<std::string> trains, tests;
    std::map<std::pair<std::string, std::string>, double> values;
    for (const CrossCell& cell : cells) {
        if (cell.metric_name != metric) {
            throw DataError("cross_matrix_csv: mixed metrics " + metric + " and " +
                            cell.metric_name);
        }
        trains.insert(cell.train_variant);
        tests.insert(cell.test_variant);
        const auto key = std::make_pair(cell.test_variant, cell.train_variant);
        if (!values.emplace(key, cell.mean).second) {
            throw DataError("cross_matrix_csv: duplicate cell train=" + cell.train_variant +
                            " test=" + cell.test_variant);
        }
    }
    std::string csv = "test\\train";
    for (const std::string& train : trains) csv += "," + train;
    csv += "\n";
    for (const std::string& test : tests) {
        csv += test;
        for (const std::string& train : trains) {
            const auto it = values.find({test, train});
            csv += ",";
            csv += it == values.end() ? "NA" : fmt_double(it->second);
        }
        csv += "\n";
    }
    return csv;
}

} // namespace goba
