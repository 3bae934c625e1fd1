#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "harmlab/experiment.hpp"
#include "harmlab/rng.hpp"

using namespace harmlab;

namespace {
ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.ells = {2};
    cfg.replicates = 2;
    cfg.master_seed = 99;
    cfg.intervals = {Interval::ray(1.0)};
    cfg.thresholds = {0.0, 1.0};
    return cfg;
}
}

TEST_CASE("ell=2 rows always report six critical points") {
    const auto result = run_experiment(small_config());
    REQUIRE(result.rows.size() == 2);
    for (const auto& r : result.rows) {
        CHECK_FALSE(r.failed);
        CHECK(r.n_crit == 6);
        CHECK(r.n_min == 2);
        CHECK(r.n_saddle == 2);
        CHECK(r.n_max == 2);
    }
}

TEST_CASE("per-replicate seeds are stable under config growth") {
    // adding degrees or replicates must not perturb existing rows
    const auto s = replicate_seed(123, 50, 7);
    CHECK(replicate_seed(123, 50, 7) == s);
    CHECK(replicate_seed(123, 50, 8) != s);
    CHECK(replicate_seed(123, 51, 7) != s);
    CHECK(replicate_seed(124, 50, 7) != s);
}

TEST_CASE("CSV header matches the documented schema") {
    auto cfg = small_config();
    CHECK(rows_csv_header(cfg) ==
          "ell,replicate,seed,n_crit,n_min,n_saddle,n_max,n_crit_I1,h2,h3,h4,A_ell,nodal_len,"
          "area_u0,area_u1,euler_u0,euler_u1");
    cfg.intervals.push_back(Interval::ray(0.5));
    cfg.thresholds = {0.5, -0.25};
    CHECK(rows_csv_header(cfg) ==
          "ell,replicate,seed,n_crit,n_min,n_saddle,n_max,n_crit_I1,n_crit_I2,h2,h3,h4,A_ell,"
          "nodal_len,area_u0.5,area_u-0.25,euler_u0.5,euler_u-0.25");
}

TEST_CASE("deterministic output: same config, byte-identical CSV, any thread count") {
    auto cfg = small_config();
    cfg.ells = {2, 5};
    cfg.replicates = 4;

    cfg.threads = 1;
    const auto r1 = run_experiment(cfg);
    std::ostringstream a;
    write_rows_csv(r1, a);

    cfg.threads = 3;
    const auto r2 = run_experiment(cfg);
    std::ostringstream b;
    write_rows_csv(r2, b);

    CHECK(a.str() == b.str());

    cfg.threads = 1;
    const auto r3 = run_experiment(cfg);
    std::ostringstream c;
    write_rows_csv(r3, c);
    CHECK(a.str() == c.str());
}

TEST_CASE("summary recomputes bit-exactly from the CSV") {
    auto cfg = small_config();
    cfg.ells = {3};
    cfg.replicates = 12;
    const auto result = run_experiment(cfg);
    const std::string direct = summary_json(to_table(result));

    std::ostringstream csv;
    write_rows_csv(result, csv);
    std::istringstream in(csv.str());
    const Table back = read_rows_csv(in);
    CHECK(summary_json(back) == direct);
}

TEST_CASE("correlation summary and aliases") {
    auto cfg = small_config();
    cfg.ells = {6};
    cfg.replicates = 24;
    const auto result = run_experiment(cfg);
    const auto table = to_table(result);

    // A_ell is a deterministic negative multiple of h4
    const auto e = correlate_columns(table, 6, "h4", "A");
    CHECK_FALSE(e.degenerate);
    CHECK(e.rho == doctest::Approx(-1.0).epsilon(1e-12));

    const auto self = correlate_columns(table, 6, "ncrit", "n_crit");
    CHECK(self.rho == doctest::Approx(1.0).epsilon(1e-12));

    // constant column reported degenerate, not NaN
    Table t2 = table;
    t2.columns.push_back("const_col");
    for (auto& r : t2.rows) r.push_back(7.0);
    const auto d = correlate_columns(t2, 6, "h4", "const_col");
    CHECK(d.degenerate);

    const auto multi = correlation_summary(table, 6, {{"ncrit", "h4"}, {"ncrit", "nodal"}});
    CHECK(multi.size() == 2);
    CHECK_FALSE(multi[0].degenerate);
    CHECK(multi[0].n == 24);
}

TEST_CASE("clt_check behavior") {
    // seeded standard normal draws
    Rng rng(2718);
    std::vector<double> z(10000);
    for (auto& v : z) v = rng.gaussian();
    const auto ks = clt_check(z);
    CHECK(ks.ks_stat <= 0.02);
    CHECK(ks.n == 10000);

    std::vector<double> constant(100, 3.0);
    CHECK_THROWS_AS(clt_check(constant), std::invalid_argument);
    std::vector<double> tiny(10, 0.0);
    CHECK_THROWS_AS(clt_check(tiny), std::invalid_argument);
}

TEST_CASE("csv roundtrip preserves numeric content") {
    auto cfg = small_config();
    cfg.ells = {4};
    cfg.replicates = 3;
    const auto result = run_experiment(cfg);
    std::ostringstream csv;
    write_rows_csv(result, csv);
    std::istringstream in(csv.str());
    const auto table = read_rows_csv(in);
    const auto direct = to_table(result);
    REQUIRE(table.columns == direct.columns);
    REQUIRE(table.rows.size() == direct.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            if (std::isnan(direct.rows[i][j])) {
                CHECK(std::isnan(table.rows[i][j]));
            } else {
                CHECK(table.rows[i][j] == direct.rows[i][j]);
            }
        }
    }
}

TEST_CASE("config validation") {
    auto cfg = small_config();
    cfg.replicates = 1;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.ells = {1};
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("stat toggles shape the row") {
    auto cfg = small_config();
    cfg.stats.crit = false;
    cfg.stats.euler = false;
    cfg.stats.nodal = false;
    cfg.stats.poly_qs = {2, 4};
    cfg.stats.area = false;
    CHECK(rows_csv_header(cfg) == "ell,replicate,seed,h2,h4,A_ell");
    const auto result = run_experiment(cfg);
    CHECK(to_table(result).columns.size() == 6);
}
