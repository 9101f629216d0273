#pragma once

#include <string>
#include <vector>

#include "goba/classify.hpp"

namespace goba {

// Locale-independent float formatting (decimal point, no separators).
std::string fmt_double(double v);            // shortest roundtrip
std::string fmt_fixed(double v, int precision);

// "95.5 ± 0.3": fractions rendered as percent to one decimal.
std::string format_pct_mean_std(double mean, double std);
bool parse_pct_mean_std(const std::string& text, double& mean, double& std);

struct SummaryRow {
    std::string label;
    AggregateSummary agg;
};

struct SummaryTable {
    std::string csv;      // full-precision fractions, mean/std column pairs
    std::string markdown; // percent, one decimal, "mean ± std"
    std::string json;     // raw aggregate values for machine use
};

// Columns: label, SR, FR, Level-1, Level-2, Level-3, Other.
SummaryTable emit_summary_table(const std::vector<SummaryRow>& rows);

// Inverse of the CSV emission, for round-trip checks and downstream tools.
std::vector<SummaryRow> parse_summary_csv(const std::string& csv);

struct CrossCell {
    std::string train_variant;
    std::string test_variant;
    std::string metric_name;
    double mean = 0.0;
    double std = 0.0;
};

// Dense matrix CSV: rows = test variant, columns = train variant, both in
// lexicographic order; missing cells print NA. Duplicate (train, test) pairs
// or mixed metric names are a DataError.
std::string cross_matrix_csv(const std::vector<CrossCell>& cells);

} // namespace goba
