#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "harmlab/interval.hpp"

namespace harmlab {

struct StatToggles {
    bool crit = true;
    std::vector<int> poly_qs = {2, 3, 4};
    bool nodal = true;
    bool area = true;
    bool euler = true;
};

struct ExperimentConfig {
    std::vector<int> ells;
    int replicates = 2;
    std::uint64_t master_seed = 1;
    int grid_factor = 8;
    int resolution_factor = 8;
    std::vector<Interval> intervals;
    std::vector<double> thresholds;
    std::string out_dir;  // empty: no files written
    StatToggles stats;
    int threads = 0;  // 0: HC_THREADS env, else 1
};

// Replicate failures beyond the 1% budget.
struct ExperimentAborted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ReplicateRow {
    int ell = 0;
    int replicate = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    int n_crit = 0, n_min = 0, n_saddle = 0, n_max = 0;
    std::vector<int> interval_counts;
    double h2 = 0, h3 = 0, h4 = 0, A_ell = 0, nodal_len = 0;
    std::vector<double> areas;
    std::vector<int> eulers;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ReplicateRow> rows;
    int failures = 0;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// --- tabular form shared by the CSV file and the summary ---------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // numeric view; NaN for failed cells

    int column_index(const std::string& name) const;  // -1 if absent
    std::vector<double> column_for_ell(const std::string& name, int ell) const;
};

std::string rows_csv_header(const ExperimentConfig& config);
std::vector<std::string> experiment_columns(const ExperimentConfig& config);
std::vector<double> to_table_row(const ExperimentConfig& config, const ReplicateRow& row);
Table to_table(const ExperimentResult& result);
void write_rows_csv(const ExperimentResult& result, std::ostream& out);
Table read_rows_csv(std::istream& in);

// Per-degree means/variances, correlation matrix with jackknife standard
// errors, and the KS statistic of the standardized critical-point count;
// deterministic given the table.
std::string summary_json(const Table& table);

// --- statistics ---------------------------------------------------------------

struct CorrelationEntry {
    std::string a, b;
    double rho = 0.0;
    double rho2 = 0.0;
    double jackknife_se = 0.0;
    int n = 0;
    bool degenerate = false;  // one of the columns has zero variance
};

// Pearson correlation over replicates at fixed ell with leave-one-out
// jackknife standard error. Column names accept the CSV names plus the
// aliases ncrit, nodal, A.
CorrelationEntry correlate_columns(const Table& table, int ell, const std::string& a,
                                   const std::string& b);
std::vector<CorrelationEntry> correlation_summary(
    const Table& table, int ell, const std::vector<std::pair<std::string, std::string>>& pairs);

struct KsResult {
    double ks_stat = 0.0;
    int n = 0;
};

// Kolmogorov-Smirnov distance between the empirical CDF of the standardized
// samples and the standard normal CDF. Requires n >= 50 and nonzero variance.
KsResult clt_check(std::span<const double> samples);

// canonical threshold label used in column names (area_u..., euler_u...)
std::string threshold_label(double u);

}  // namespace harmlab
