#include "harmlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "harmlab/critical.hpp"
#include "harmlab/field.hpp"
#include "harmlab/levelset.hpp"
#include "harmlab/polyspectra.hpp"
#include "harmlab/rng.hpp"
#include "harmlab/theory.hpp"
#include "json.hpp"

namespace harmlab {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HC_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool has_q(const StatToggles& s, int q) {
    return std::find(s.poly_qs.begin(), s.poly_qs.end(), q) != s.poly_qs.end();
}

ReplicateRow compute_replicate(const ExperimentConfig& cfg, const SphereGrid* grid, int ell,
                               int r) {
    ReplicateRow row;
    row.ell = ell;
    row.replicate = r;
    row.seed = replicate_seed(cfg.master_seed, static_cast<std::uint64_t>(ell),
                              static_cast<std::uint64_t>(r));
    const HarmonicField field = HarmonicField::sample(ell, row.seed);

    if (cfg.stats.crit) {
        CritOptions opt;
        opt.grid_factor = cfg.grid_factor;
        std::vector<CriticalPoint> points;
        try {
            points = find_critical_points(field, opt);
        } catch (const std::exception&) {
            opt.grid_factor = 2 * cfg.grid_factor;  // one retry on a finer grid
            try {
                points = find_critical_points(field, opt);
            } catch (const std::exception&) {
                row.failed = true;
                return row;
            }
        }
        const auto s = summarize(points, cfg.intervals);
        row.n_crit = s.total();
        row.n_min = s.n_min;
        row.n_saddle = s.n_saddle;
        row.n_max = s.n_max;
        row.interval_counts = s.interval_counts;
        if (cfg.stats.euler) {
            row.eulers.reserve(cfg.thresholds.size());
            for (double u : cfg.thresholds) row.eulers.push_back(euler_characteristic(points, u));
        }
    }

    if (!cfg.stats.poly_qs.empty() || cfg.stats.area) {
        const std::vector<double> values = synthesize_on_grid(field, *grid);
        if (!cfg.stats.poly_qs.empty()) {
            const auto hs = sample_polyspectra_from_values(values, cfg.stats.poly_qs, *grid);
            for (std::size_t k = 0; k < cfg.stats.poly_qs.size(); ++k) {
                switch (cfg.stats.poly_qs[k]) {
                    case 2: row.h2 = hs[k]; break;
                    case 3: row.h3 = hs[k]; break;
                    case 4: row.h4 = hs[k]; break;
                    default: break;
                }
            }
            if (has_q(cfg.stats, 4)) row.A_ell = trispectrum_proxy(row.h4, ell);
        }
        if (cfg.stats.area) {
            row.areas.reserve(cfg.thresholds.size());
            for (double u : cfg.thresholds)
                row.areas.push_back(excursion_area_from_values(*grid, values, u));
        }
    }

    if (cfg.stats.nodal) {
        row.nodal_len = level_length(field, 0.0, cfg.resolution_factor);
    }
    return row;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.replicates < 2)
        throw std::invalid_argument("run_experiment: replicates must be >= 2");
    for (int ell : config.ells) {
        if (ell < 2) throw std::invalid_argument("run_experiment: all ells must be >= 2");
    }

    std::map<int, SphereGrid> grids;
    int qmax = 2;
    for (int q : config.stats.poly_qs) qmax = std::max(qmax, q);
    if (!config.stats.poly_qs.empty() || config.stats.area) {
        for (int ell : config.ells) {
            if (!grids.count(ell)) grids.emplace(ell, build_grid(ell, qmax));
        }
    }

    ExperimentResult result;
    result.config = config;
    const std::size_t total = config.ells.size() * static_cast<std::size_t>(config.replicates);
    result.rows.resize(total);

    // progressive flush, ordered by (ell, replicate), for crash recovery
    std::ofstream flush_stream;
    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        flush_stream.open(config.out_dir + "/rows.csv");
        flush_stream << rows_csv_header(config) << "\n";
    }
    std::mutex flush_mutex;
    std::size_t flushed = 0;
    std::vector<char> done(total, 0);

    auto flush_ready = [&]() {
        if (!flush_stream.is_open()) return;
        bool wrote = false;
        while (flushed < total && done[flushed]) {
            const auto vals = to_table_row(result.config, result.rows[flushed]);
            flush_stream << result.rows[flushed].ell << "," << result.rows[flushed].replicate
                         << "," << result.rows[flushed].seed;
            for (std::size_t i = 3; i < vals.size(); ++i)
                flush_stream << "," << format_double(vals[i]);
            flush_stream << "\n";
            ++flushed;
            wrote = true;
        }
        if (wrote) flush_stream.flush();
    };

    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};

    auto worker = [&]() {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= total) return;
            const int ell = config.ells[idx / config.replicates];
            const int r = static_cast<int>(idx % config.replicates);
            const SphereGrid* grid = grids.count(ell) ? &grids.at(ell) : nullptr;
            ReplicateRow row = compute_replicate(config, grid, ell, r);
            if (row.failed) failures.fetch_add(1);
            {
                std::lock_guard<std::mutex> lock(flush_mutex);
                result.rows[idx] = std::move(row);
                done[idx] = 1;
                flush_ready();
            }
        }
    };

    const int nthreads = resolve_threads(config.threads);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    result.failures = failures.load();
    if (result.failures > 0.01 * static_cast<double>(total)) {
        throw ExperimentAborted("run_experiment: replicate failure budget exceeded (" +
                                std::to_string(result.failures) + "/" + std::to_string(total) +
                                ")");
    }

    if (!config.out_dir.empty()) {
        flush_stream.close();
        std::ofstream sj(config.out_dir + "/summary.json");
        sj << summary_json(to_table(result)) << "\n";
    }
    return result;
}

std::string threshold_label(double u) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", u);
    return buf;
}

std::vector<std::string> experiment_columns(const ExperimentConfig& cfg) {
    std::vector<std::string> cols{"ell", "replicate", "seed"};
    if (cfg.stats.crit) {
        cols.insert(cols.end(), {"n_crit", "n_min", "n_saddle", "n_max"});
        for (std::size_t i = 0; i < cfg.intervals.size(); ++i)
            cols.push_back("n_crit_I" + std::to_string(i + 1));
    }
    if (has_q(cfg.stats, 2)) cols.push_back("h2");
    if (has_q(cfg.stats, 3)) cols.push_back("h3");
    if (has_q(cfg.stats, 4)) {
        cols.push_back("h4");
        cols.push_back("A_ell");
    }
    if (cfg.stats.nodal) cols.push_back("nodal_len");
    if (cfg.stats.area)
        for (double u : cfg.thresholds) cols.push_back("area_u" + threshold_label(u));
    if (cfg.stats.crit && cfg.stats.euler)
        for (double u : cfg.thresholds) cols.push_back("euler_u" + threshold_label(u));
    return cols;
}

std::vector<double> to_table_row(const ExperimentConfig& cfg, const ReplicateRow& r) {
    std::vector<double> v{static_cast<double>(r.ell), static_cast<double>(r.replicate),
                          static_cast<double>(r.seed)};
    auto push = [&](double x) { v.push_back(r.failed ? kNaN : x); };
    if (cfg.stats.crit) {
        push(r.n_crit);
        push(r.n_min);
        push(r.n_saddle);
        push(r.n_max);
        for (std::size_t i = 0; i < cfg.intervals.size(); ++i)
            push(!r.failed && i < r.interval_counts.size() ? r.interval_counts[i] : kNaN);
    }
    if (has_q(cfg.stats, 2)) push(r.h2);
    if (has_q(cfg.stats, 3)) push(r.h3);
    if (has_q(cfg.stats, 4)) {
        push(r.h4);
        push(r.A_ell);
    }
    if (cfg.stats.nodal) push(r.nodal_len);
    if (cfg.stats.area)
        for (std::size_t i = 0; i < cfg.thresholds.size(); ++i)
            push(!r.failed && i < r.areas.size() ? r.areas[i] : kNaN);
    if (cfg.stats.crit && cfg.stats.euler)
        for (std::size_t i = 0; i < cfg.thresholds.size(); ++i)
            push(!r.failed && i < r.eulers.size() ? static_cast<double>(r.eulers[i]) : kNaN);
    return v;
}

std::string rows_csv_header(const ExperimentConfig& config) {
    const auto cols = experiment_columns(config);
    std::string h;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) h += ",";
        h += cols[i];
    }
    return h;
}

int Table::column_index(const std::string& name) const {
    std::string n = name;
    if (n == "ncrit") n = "n_crit";
    else if (n == "nodal") n = "nodal_len";
    else if (n == "A" || n == "a_ell") n = "A_ell";
    else if (n.rfind("ncrit_I", 0) == 0) n = "n_crit_I" + n.substr(7);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == n) return static_cast<int>(i);
    }
    return -1;
}

std::vector<double> Table::column_for_ell(const std::string& name, int ell) const {
    const int ci = column_index(name);
    const int ei = column_index("ell");
    if (ci < 0 || ei < 0) throw std::invalid_argument("Table: unknown column " + name);
    std::vector<double> out;
    for (const auto& r : rows) {
        if (static_cast<int>(r[ei]) == ell && !std::isnan(r[ci])) out.push_back(r[ci]);
    }
    return out;
}

Table to_table(const ExperimentResult& result) {
    Table t;
    t.columns = experiment_columns(result.config);
    t.rows.reserve(result.rows.size());
    for (const auto& r : result.rows) t.rows.push_back(to_table_row(result.config, r));
    return t;
}

void write_rows_csv(const ExperimentResult& result, std::ostream& out) {
    out << rows_csv_header(result.config) << "\n";
    for (const auto& r : result.rows) {
        const auto vals = to_table_row(result.config, r);
        out << r.ell << "," << r.replicate << "," << r.seed;
        for (std::size_t i = 3; i < vals.size(); ++i) out << "," << format_double(vals[i]);
        out << "\n";
    }
}

Table read_rows_csv(std::istream& in) {
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_rows_csv: empty input");
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(t.columns.size());
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            row.push_back(cell.empty() ? kNaN : std::strtod(cell.c_str(), nullptr));
        }
        while (row.size() < t.columns.size()) row.push_back(kNaN);
        t.rows.push_back(std::move(row));
    }
    return t;
}

namespace {

struct MeanVar {
    double mean = 0.0, var = 0.0;
    int n = 0;
};

MeanVar mean_var(std::span<const double> xs) {
    MeanVar mv;
    mv.n = static_cast<int>(xs.size());
    if (mv.n == 0) return mv;
    double acc = 0.0;
    for (double x : xs) acc += x;
    mv.mean = acc / mv.n;
    double s2 = 0.0;
    for (double x : xs) s2 += (x - mv.mean) * (x - mv.mean);
    mv.var = (mv.n > 1) ? s2 / (mv.n - 1) : 0.0;
    return mv;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return kNaN;
    return sxy / std::sqrt(sxx * syy);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

CorrelationEntry correlate_columns(const Table& table, int ell, const std::string& a,
                                   const std::string& b) {
    CorrelationEntry e;
    e.a = a;
    e.b = b;
    const int ia = table.column_index(a);
    const int ib = table.column_index(b);
    if (ia < 0 || ib < 0)
        throw std::invalid_argument("correlate_columns: unknown column " + a + " or " + b);
    const int ie = table.column_index("ell");
    std::vector<double> x, y;
    for (const auto& r : table.rows) {
        if (static_cast<int>(r[ie]) != ell) continue;
        if (std::isnan(r[ia]) || std::isnan(r[ib])) continue;
        x.push_back(r[ia]);
        y.push_back(r[ib]);
    }
    e.n = static_cast<int>(x.size());
    if (e.n < 3) {
        e.degenerate = true;
        return e;
    }
    const double rho = pearson(x, y);
    if (std::isnan(rho)) {
        e.degenerate = true;  // zero-variance column, reported rather than NaN
        return e;
    }
    e.rho = rho;
    e.rho2 = rho * rho;
    if (e.n >= 10) {
        std::vector<double> xs(x.size() - 1), ys(y.size() - 1);
        std::vector<double> loo(x.size());
        double lmean = 0.0;
        for (std::size_t drop = 0; drop < x.size(); ++drop) {
            std::size_t k = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (i == drop) continue;
                xs[k] = x[i];
                ys[k] = y[i];
                ++k;
            }
            loo[drop] = pearson(xs, ys);
            lmean += loo[drop];
        }
        lmean /= x.size();
        double s2 = 0.0;
        for (double v : loo) s2 += (v - lmean) * (v - lmean);
        e.jackknife_se = std::sqrt((x.size() - 1.0) / x.size() * s2);
    }
    return e;
}

std::vector<CorrelationEntry> correlation_summary(
    const Table& table, int ell, const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::vector<CorrelationEntry> out;
    out.reserve(pairs.size());
    for (const auto& [a, b] : pairs) out.push_back(correlate_columns(table, ell, a, b));
    return out;
}

KsResult clt_check(std::span<const double> samples) {
    if (samples.size() < 50) throw std::invalid_argument("clt_check: need at least 50 samples");
    const auto mv = mean_var(samples);
    if (mv.var <= 0.0) throw std::invalid_argument("clt_check: zero-variance samples");
    const double sd = std::sqrt(mv.var);
    std::vector<double> z(samples.begin(), samples.end());
    for (double& v : z) v = (v - mv.mean) / sd;
    std::sort(z.begin(), z.end());
    const double n = static_cast<double>(z.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double c = normal_cdf(z[i]);
        ks = std::max(ks, std::fabs((i + 1) / n - c));
        ks = std::max(ks, std::fabs(c - i / n));
    }
    return {ks, static_cast<int>(z.size())};
}

std::string summary_json(const Table& table) {
    nlohmann::json j;
    const int ie = table.column_index("ell");
    if (ie < 0) throw std::invalid_argument("summary_json: table has no ell column");
    std::vector<int> ells;
    for (const auto& r : table.rows) {
        const int e = static_cast<int>(r[ie]);
        if (std::find(ells.begin(), ells.end(), e) == ells.end()) ells.push_back(e);
    }
    std::sort(ells.begin(), ells.end());

    j["n_rows"] = table.rows.size();
    j["ells"] = ells;
    auto& per = j["per_ell"];
    per = nlohmann::json::array();

    std::vector<std::string> stat_cols;
    for (const auto& c : table.columns) {
        if (c == "ell" || c == "replicate" || c == "seed") continue;
        stat_cols.push_back(c);
    }

    for (int ell : ells) {
        nlohmann::json je;
        je["ell"] = ell;
        int failures = 0;
        for (const auto& r : table.rows) {
            if (static_cast<int>(r[ie]) != ell) continue;
            bool any_nan = false;
            for (std::size_t c = 3; c < r.size(); ++c) any_nan = any_nan || std::isnan(r[c]);
            failures += any_nan ? 1 : 0;
        }
        je["failed_rows"] = failures;
        auto& moments = je["moments"];
        for (const auto& col : stat_cols) {
            const auto xs = table.column_for_ell(col, ell);
            const auto mv = mean_var(xs);
            moments[col] = {{"mean", mv.mean}, {"var", mv.var}, {"n", mv.n}};
        }
        auto& corr = je["correlations"];
        corr = nlohmann::json::array();
        for (std::size_t a = 0; a < stat_cols.size(); ++a) {
            for (std::size_t b = a + 1; b < stat_cols.size(); ++b) {
                const auto e = correlate_columns(table, ell, stat_cols[a], stat_cols[b]);
                if (e.degenerate) continue;
                corr.push_back({{"a", e.a},
                                {"b", e.b},
                                {"rho", e.rho},
                                {"rho2", e.rho2},
                                {"jackknife_se", e.jackknife_se},
                                {"n", e.n}});
            }
        }
        if (table.column_index("n_crit") >= 0) {
            const auto xs = table.column_for_ell("n_crit", ell);
            if (xs.size() >= 50) {
                const auto mv = mean_var(xs);
                if (mv.var > 0) {
                    const auto ks = clt_check(xs);
                    je["ks_ncrit"] = {{"ks", ks.ks_stat}, {"n", ks.n}};
                }
            }
        }
        per.push_back(je);
    }
    return j.dump(2);
}

}  // namespace harmlab
