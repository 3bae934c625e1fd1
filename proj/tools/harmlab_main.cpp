// Command-line front end: every statistical claim maps to a reproducible
// subcommand emitting CSV/JSON.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "harmlab/critical.hpp"
#include "harmlab/experiment.hpp"
#include "harmlab/field.hpp"
#include "harmlab/verify.hpp"

namespace {

using namespace harmlab;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitVerification = 3;
constexpr int kExitReplicateBudget = 4;

std::vector<Interval> parse_intervals(const std::string& text) {
    std::vector<Interval> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto comma = item.find(',');
        if (comma == std::string::npos)
            throw CLI::ValidationError("--intervals", "expected 'lo,hi' pairs separated by ';'");
        auto parse_bound = [](std::string s, double sign_inf) {
            if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
            if (s == "-inf") return -std::numeric_limits<double>::infinity();
            (void)sign_inf;
            return std::strtod(s.c_str(), nullptr);
        };
        out.push_back({parse_bound(item.substr(0, comma), -1.0),
                       parse_bound(item.substr(comma + 1), 1.0)});
    }
    return out;
}

std::vector<double> parse_thresholds(const std::string& text) {
    std::vector<double> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::strtod(item.c_str(), nullptr));
    return out;
}

StatToggles parse_stats(const std::string& text) {
    StatToggles t;
    t.crit = false;
    t.poly_qs.clear();
    t.nodal = false;
    t.area = false;
    t.euler = false;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "crit") t.crit = true;
        else if (item == "nodal") t.nodal = true;
        else if (item == "area") t.area = true;
        else if (item == "euler") t.euler = true;
        else if (item.size() == 2 && item[0] == 'h' && item[1] >= '0' && item[1] <= '8')
            t.poly_qs.push_back(item[1] - '0');
        else throw CLI::ValidationError("--stats", "unknown statistic '" + item + "'");
    }
    return t;
}

void apply_config_file(const std::string& path, ExperimentConfig& cfg, std::string& intervals,
                       std::string& thresholds, std::string& stats) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (j.contains("ell")) cfg.ells = j["ell"].get<std::vector<int>>();
    if (j.contains("replicates")) cfg.replicates = j["replicates"].get<int>();
    if (j.contains("seed")) cfg.master_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("grid_factor")) cfg.grid_factor = j["grid_factor"].get<int>();
    if (j.contains("resolution_factor")) cfg.resolution_factor = j["resolution_factor"].get<int>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("intervals")) intervals = j["intervals"].get<std::string>();
    if (j.contains("thresholds")) thresholds = j["thresholds"].get<std::string>();
    if (j.contains("stats")) stats = j["stats"].get<std::string>();
}

void print_checks(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks) {
        std::printf("[%s] %-28s value=%.10g target=%.10g tol=%.3g %s\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.target, c.tolerance,
                    c.detail.c_str());
    }
}

int cmd_simulate(const ExperimentConfig& cfg) {
    try {
        const auto result = run_experiment(cfg);
        std::fprintf(stderr, "wrote %zu rows to %s (failures: %d)\n", result.rows.size(),
                     cfg.out_dir.c_str(), result.failures);
        return kExitOk;
    } catch (const ExperimentAborted& e) {
        std::fprintf(stderr, "aborted: %s\n", e.what());
        return kExitReplicateBudget;
    }
}

int cmd_critpoints(int ell, std::uint64_t seed, int grid_factor, bool dump_csv) {
    const auto field = HarmonicField::sample(ell, seed);
    CritOptions opt;
    opt.grid_factor = grid_factor;
    const auto points = find_critical_points(field, opt);
    if (dump_csv) {
        std::printf("theta,phi,value,kind,residual\n");
        for (const auto& p : points) {
            const char* kind = p.kind == CritKind::minimum
                                   ? "minimum"
                                   : (p.kind == CritKind::saddle ? "saddle" : "maximum");
            std::printf("%.17g,%.17g,%.17g,%s,%.3e\n", p.point.theta, p.point.phi, p.value, kind,
                        p.residual);
        }
    } else {
        const auto s = summarize(points);
        std::printf("ell=%d seed=%llu: %d critical points (%d minima, %d saddles, %d maxima)\n",
                    ell, static_cast<unsigned long long>(seed), s.total(), s.n_min, s.n_saddle,
                    s.n_max);
    }
    return kExitOk;
}

int cmd_verify(const std::string& group, std::uint64_t mc_samples) {
    std::vector<CheckResult> checks;
    auto append = [&checks](std::vector<CheckResult> more) {
        checks.insert(checks.end(), more.begin(), more.end());
    };
    if (group == "sigma" || group == "all") append(verify_sigma());
    if (group == "densities" || group == "all") append(verify_densities());
    if (group == "coeffs" || group == "all") append(verify_coeffs(mc_samples));
    if (group == "integrals" || group == "all") append(verify_integrals());
    print_checks(checks);
    const bool ok = all_pass(checks);
    std::printf("%zu checks, %s\n", checks.size(), ok ? "all passed" : "FAILURES present");
    return ok ? kExitOk : kExitVerification;
}

int cmd_correlate(const std::string& in_dir, const std::string& pairs_text) {
    std::ifstream in(in_dir + "/rows.csv");
    if (!in) {
        std::fprintf(stderr, "cannot open %s/rows.csv\n", in_dir.c_str());
        return kExitConfig;
    }
    const Table table = read_rows_csv(in);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::stringstream ss(pairs_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            std::fprintf(stderr, "bad pair '%s', expected a:b\n", item.c_str());
            return kExitConfig;
        }
        pairs.emplace_back(item.substr(0, colon), item.substr(colon + 1));
    }
    const int ie = table.column_index("ell");
    std::vector<int> ells;
    for (const auto& r : table.rows) {
        const int e = static_cast<int>(r[ie]);
        if (std::find(ells.begin(), ells.end(), e) == ells.end()) ells.push_back(e);
    }
    std::sort(ells.begin(), ells.end());
    std::printf("ell,a,b,rho,rho2,jackknife_se,n\n");
    for (int ell : ells) {
        for (const auto& e : correlation_summary(table, ell, pairs)) {
            if (e.degenerate) {
                std::printf("%d,%s,%s,degenerate,,,%d\n", ell, e.a.c_str(), e.b.c_str(), e.n);
            } else {
                std::printf("%d,%s,%s,%.10g,%.10g,%.3g,%d\n", ell, e.a.c_str(), e.b.c_str(), e.rho,
                            e.rho2, e.jackknife_se, e.n);
            }
        }
    }
    return kExitOk;
}

int cmd_report(const std::string& in_dir, const std::string& format) {
    std::ifstream in(in_dir + "/rows.csv");
    if (!in) {
        std::fprintf(stderr, "cannot open %s/rows.csv\n", in_dir.c_str());
        return kExitConfig;
    }
    const Table table = read_rows_csv(in);
    const int ie = table.column_index("ell");
    const int ir = table.column_index("replicate");
    if (format == "csv") {
        std::printf("ell,replicate,statistic,value\n");
        for (const auto& r : table.rows) {
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                if (static_cast<int>(c) == ie || static_cast<int>(c) == ir ||
                    table.columns[c] == "seed")
                    continue;
                if (std::isnan(r[c])) continue;
                std::printf("%d,%d,%s,%.17g\n", static_cast<int>(r[ie]),
                            static_cast<int>(r[ir]), table.columns[c].c_str(), r[c]);
            }
        }
    } else {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : table.rows) {
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                if (static_cast<int>(c) == ie || static_cast<int>(c) == ir ||
                    table.columns[c] == "seed")
                    continue;
                if (std::isnan(r[c])) continue;
                j.push_back({{"ell", static_cast<int>(r[ie])},
                             {"replicate", static_cast<int>(r[ir])},
                             {"statistic", table.columns[c]},
                             {"value", r[c]}});
            }
        }
        std::printf("%s\n", j.dump(2).c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random spherical harmonics laboratory"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run a seeded replicate experiment");
    ExperimentConfig cfg;
    std::string config_path, intervals_text = "1,inf", thresholds_text = "0,1";
    std::string stats_text = "crit,h2,h3,h4,nodal,area,euler";
    sim->add_option("--config", config_path, "JSON config file (flags override)");
    sim->add_option("--ell", cfg.ells, "degrees to simulate")->delimiter(',');
    sim->add_option("--replicates", cfg.replicates, "replicates per degree");
    sim->add_option("--seed", cfg.master_seed, "master seed");
    sim->add_option("--out", cfg.out_dir, "output directory");
    sim->add_option("--grid-factor", cfg.grid_factor, "critical point grid factor kappa");
    sim->add_option("--resolution-factor", cfg.resolution_factor,
                    "level-set cells per great circle / ell");
    sim->add_option("--intervals", intervals_text, "value intervals 'lo,hi;lo,hi' (inf allowed)");
    sim->add_option("--thresholds", thresholds_text, "thresholds u for area/euler, 'u1,u2,...'");
    sim->add_option("--stats", stats_text, "statistics: crit,h2,h3,h4,nodal,area,euler");
    sim->add_option("--threads", cfg.threads, "worker threads (HC_THREADS also honoured)");

    // critpoints
    auto* crit = app.add_subcommand("critpoints", "critical points of one sampled field");
    int crit_ell = 10;
    std::uint64_t crit_seed = 1;
    int crit_grid = 8;
    std::string dump;
    crit->add_option("--ell", crit_ell, "degree")->required();
    crit->add_option("--seed", crit_seed, "field seed")->required();
    crit->add_option("--grid-factor", crit_grid, "grid factor kappa");
    crit->add_option("--dump", dump, "dump format (csv)");

    // verify
    auto* ver = app.add_subcommand("verify", "closed-form identity pass/fail table");
    std::string group = "all";
    std::uint64_t mc_samples = 10'000'000;
    double tol_unused = 0.0;
    ver->add_option("group", group, "coeffs|integrals|sigma|densities|all");
    ver->add_option("--mc-samples", mc_samples, "Monte Carlo sample count");
    ver->add_option("--tol", tol_unused, "(reserved) override tolerance");

    // correlate
    auto* cor = app.add_subcommand("correlate", "correlation table from an experiment directory");
    std::string cor_in, cor_pairs = "ncrit:h4,ncrit:nodal";
    cor->add_option("--in", cor_in, "experiment output directory")->required();
    cor->add_option("--pairs", cor_pairs, "colon pairs, comma separated");

    // report
    auto* rep = app.add_subcommand("report", "long-format plot-ready data");
    std::string rep_in, rep_format = "csv";
    rep->add_option("--in", rep_in, "experiment output directory")->required();
    rep->add_option("--format", rep_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed()) {
            if (!config_path.empty()) {
                // file first, command-line flags override
                ExperimentConfig file_cfg;
                std::string iv = intervals_text, th = thresholds_text, st = stats_text;
                apply_config_file(config_path, file_cfg, iv, th, st);
                if (sim->count("--ell") == 0) cfg.ells = file_cfg.ells;
                if (sim->count("--replicates") == 0) cfg.replicates = file_cfg.replicates;
                if (sim->count("--seed") == 0) cfg.master_seed = file_cfg.master_seed;
                if (sim->count("--out") == 0 && !file_cfg.out_dir.empty())
                    cfg.out_dir = file_cfg.out_dir;
                if (sim->count("--grid-factor") == 0) cfg.grid_factor = file_cfg.grid_factor;
                if (sim->count("--resolution-factor") == 0)
                    cfg.resolution_factor = file_cfg.resolution_factor;
                if (sim->count("--threads") == 0) cfg.threads = file_cfg.threads;
                if (sim->count("--intervals") == 0) intervals_text = iv;
                if (sim->count("--thresholds") == 0) thresholds_text = th;
                if (sim->count("--stats") == 0) stats_text = st;
            }
            if (cfg.ells.empty() || cfg.out_dir.empty()) {
                std::fprintf(stderr, "simulate: --ell and --out are required\n");
                return kExitConfig;
            }
            cfg.intervals = parse_intervals(intervals_text);
            cfg.thresholds = parse_thresholds(thresholds_text);
            cfg.stats = parse_stats(stats_text);
            return cmd_simulate(cfg);
        }
        if (crit->parsed()) {
            if (!dump.empty() && dump != "csv") {
                std::fprintf(stderr, "critpoints: unsupported dump format '%s'\n", dump.c_str());
                return kExitConfig;
            }
            return cmd_critpoints(crit_ell, crit_seed, crit_grid, dump == "csv");
        }
        if (ver->parsed()) {
            if (group != "all" && group != "coeffs" && group != "integrals" && group != "sigma" &&
                group != "densities") {
                std::fprintf(stderr, "verify: unknown group '%s'\n", group.c_str());
                return kExitConfig;
            }
            return cmd_verify(group, mc_samples);
        }
        if (cor->parsed()) return cmd_correlate(cor_in, cor_pairs);
        if (rep->parsed()) return cmd_report(rep_in, rep_format);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
