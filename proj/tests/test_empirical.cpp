#include "adoptnet/empirical.hpp"

#include "adoptnet/csv.hpp"
#include "adoptnet/errors.hpp"
#include "adoptnet/graph.hpp"

#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

using namespace adoptnet;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

const char* PANEL_HEADER =
    "id,adoption_days,ceo_age,ceo_tenure,log_assets,region,latitude,longitude\n";

void write_small_panel(const std::string& path) {
    std::ofstream out(path);
    out << PANEL_HEADER;
    out << "101,0,55,8,28.5,north_america,40.7,-74.0\n";
    out << "102,0,58,9,28.9,europe,51.5,-0.1\n";
    out << "103,30,51,5,27.8,europe,48.9,2.3\n";
    out << "104,45,49,4,27.5,asia_pacific,35.7,139.7\n";
    out << "105,120,47,3,27.1,north_america,41.9,-87.6\n";
    out << "106,150,45,2,26.9,asia_pacific,1.35,103.8\n";
    out << "107,80,50,6,28.0,europe,50.1,8.7\n";
    out << "108,200,44,2,26.7,north_america,37.8,-122.4\n";
}

void write_small_exposures(const std::string& path) {
    std::ofstream out(path);
    out << "from,to,exposure\n";
    out << "101,102,10.0\n";
    out << "102,101,8.0\n";
    out << "101,103,4.0\n";
    out << "103,104,3.0\n";
    out << "104,105,2.0\n";
    out << "105,106,2.5\n";
    out << "106,107,1.5\n";
    out << "107,108,1.0\n";
    out << "102,108,2.0\n";
}

} // namespace

TEST_CASE("region names parse and round-trip") {
    for (Region r : {Region::north_america, Region::europe, Region::asia_pacific})
        CHECK(parse_region(to_string(r)) == r);
    CHECK_THROWS_AS(parse_region("antarctica"), ConfigError);
}

TEST_CASE("adoption wave boundaries") {
    CHECK(group_of(0.0) == AdoptionGroup::founding);
    CHECK(group_of(0.5) == AdoptionGroup::early);
    CHECK(group_of(100.0) == AdoptionGroup::early);
    CHECK(group_of(100.5) == AdoptionGroup::late);
    CHECK(group_of(101.0) == AdoptionGroup::late);
    CHECK(to_string(AdoptionGroup::founding) == "founding");
    CHECK(to_string(AdoptionGroup::early) == "early");
    CHECK(to_string(AdoptionGroup::late) == "late");
}

TEST_CASE("panel loads with typed columns and validates ids") {
    TempFile panel_file("emp_panel_small.csv");
    write_small_panel(panel_file.path);
    BankPanel panel = load_panel_csv(panel_file.path);
    REQUIRE(panel.size() == 8);
    CHECK(panel.records[0].id == 101);
    CHECK(panel.records[0].adoption_days == 0.0);
    CHECK(panel.records[3].region == Region::asia_pacific);
    CHECK(panel.records[7].longitude == -122.4);
    CHECK(panel.index_of(105) == 4);
    CHECK(panel.index_of(999) == -1);
}

TEST_CASE("duplicate ids and bad regions are named in errors") {
    TempFile panel_file("emp_panel_dup.csv");
    {
        std::ofstream out(panel_file.path);
        out << PANEL_HEADER;
        out << "101,0,55,8,28.5,north_america,40.7,-74.0\n";
        out << "101,5,54,7,28.2,europe,51.5,-0.1\n";
    }
    try {
        load_panel_csv(panel_file.path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("101") != std::string::npos);
    }

    TempFile region_file("emp_panel_region.csv");
    {
        std::ofstream out(region_file.path);
        out << PANEL_HEADER;
        out << "101,0,55,8,28.5,atlantis,40.7,-74.0\n";
    }
    try {
        load_panel_csv(region_file.path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("atlantis") != std::string::npos);
    }
}

TEST_CASE("exposure network symmetrizes and normalizes to a unit maximum") {
    TempFile panel_file("emp_panel_net.csv");
    TempFile expo_file("emp_expo_net.csv");
    write_small_panel(panel_file.path);
    write_small_exposures(expo_file.path);
    BankPanel panel = load_panel_csv(panel_file.path);
    SpatialNetwork net = load_exposures_csv(expo_file.path, panel,
                                            SpatialKernel::knn(3, 1.0));
    REQUIRE(net.n == 8);
    CHECK((net.adjacency - net.adjacency.transpose()).cwiseAbs().maxCoeff() == 0.0);
    // (10 + 8)/2 = 9 is the largest symmetrized exposure, scaled to 1
    CHECK(net.adjacency(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    // one-sided 101->103 of 4.0 becomes 2/9
    CHECK(net.adjacency(0, 2) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
    CHECK(net.adjacency.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    // coordinates are min-max scaled into the unit square
    CHECK(net.coords.minCoeff() >= 0.0);
    CHECK(net.coords.maxCoeff() <= 1.0);
}

TEST_CASE("exposures referencing unknown banks or self-links are rejected") {
    TempFile panel_file("emp_panel_bad.csv");
    write_small_panel(panel_file.path);
    BankPanel panel = load_panel_csv(panel_file.path);

    TempFile unknown_file("emp_expo_unknown.csv");
    {
        std::ofstream out(unknown_file.path);
        out << "from,to,exposure\n101,999,5.0\n";
    }
    try {
        load_exposures_csv(unknown_file.path, panel, SpatialKernel::knn(3, 1.0));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("999") != std::string::npos);
    }

    TempFile self_file("emp_expo_self.csv");
    {
        std::ofstream out(self_file.path);
        out << "from,to,exposure\n101,101,5.0\n";
    }
    CHECK_THROWS_AS(load_exposures_csv(self_file.path, panel,
                                       SpatialKernel::knn(3, 1.0)),
                    ConfigError);

    TempFile dup_file("emp_expo_dup.csv");
    {
        std::ofstream out(dup_file.path);
        out << "from,to,exposure\n101,102,5.0\n101,102,4.0\n";
    }
    CHECK_THROWS_AS(load_exposures_csv(dup_file.path, panel,
                                       SpatialKernel::knn(3, 1.0)),
                    ConfigError);

    TempFile negative_file("emp_expo_neg.csv");
    {
        std::ofstream out(negative_file.path);
        out << "from,to,exposure\n101,102,-5.0\n";
    }
    CHECK_THROWS_AS(load_exposures_csv(negative_file.path, panel,
                                       SpatialKernel::knn(3, 1.0)),
                    ConfigError);
}

TEST_CASE("two-bank exposure normalization is exact") {
    TempFile panel_file("emp_panel_two.csv");
    {
        std::ofstream out(panel_file.path);
        out << PANEL_HEADER;
        out << "1,0,50,5,28.0,europe,51.5,-0.1\n";
        out << "2,10,52,6,28.2,europe,48.9,2.3\n";
        out << "3,20,48,4,27.5,europe,50.1,8.7\n";
        out << "4,30,47,3,27.2,europe,52.4,4.9\n";
        out << "5,40,46,2,27.0,europe,40.4,-3.7\n";
        out << "6,50,45,2,26.8,europe,41.9,12.5\n";
        out << "7,60,44,1,26.6,europe,59.3,18.1\n";
        out << "8,70,43,1,26.4,europe,55.7,12.6\n";
    }
    TempFile expo_file("emp_expo_two.csv");
    {
        std::ofstream out(expo_file.path);
        out << "from,to,exposure\n";
        out << "1,2,42.0\n";
        out << "3,4,21.0\n";
        out << "5,6,10.5\n";
        out << "7,8,10.5\n";
        out << "2,3,10.5\n";
        out << "4,5,10.5\n";
        out << "6,7,10.5\n";
    }
    BankPanel panel = load_panel_csv(panel_file.path);
    SpatialNetwork net = load_exposures_csv(expo_file.path, panel,
                                            SpatialKernel::knn(2, 1.0));
    CHECK(net.adjacency(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(net.adjacency(2, 3) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(net.adjacency(4, 5) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("pipeline rejects panels that are too small") {
    TempFile panel_file("emp_panel_tiny.csv");
    {
        std::ofstream out(panel_file.path);
        out << PANEL_HEADER;
        out << "1,0,50,5,28.0,europe,51.5,-0.1\n";
        out << "2,10,52,6,28.2,europe,48.9,2.3\n";
    }
    TempFile expo_file("emp_expo_tiny.csv");
    {
        std::ofstream out(expo_file.path);
        out << "from,to,exposure\n1,2,5.0\n";
    }
    SpatialKernel kernel = SpatialKernel::knn(1, 1.0);
    auto [panel, net] = ingest(panel_file.path, expo_file.path, kernel);
    ModelParams params;
    params.nu_s = 0.5;
    params.nu_n = 0.8;
    params.lambda_x = 0.3;
    params.kappa = 0.15;
    CHECK_THROWS_AS(run_pipeline(panel, net, params, kernel), ConfigError);
}

TEST_CASE("pipeline regressions nest and groups partition the panel") {
    TempFile panel_file("emp_panel_run.csv");
    TempFile expo_file("emp_expo_run.csv");
    write_small_panel(panel_file.path);
    write_small_exposures(expo_file.path);
    SpatialKernel kernel = SpatialKernel::knn(3, 0.5);
    auto [panel, net] = ingest(panel_file.path, expo_file.path, kernel);
    ModelParams params;
    params.nu_s = 0.5;
    params.nu_n = 0.8;
    params.lambda_x = 0.3;
    params.kappa = 0.15;
    PipelineResult result = run_pipeline(panel, net, params, kernel);

    REQUIRE(result.regressions.size() == 4);
    // strictly growing design: each spec adds regressors
    for (std::size_t k = 1; k < 4; ++k) {
        CHECK(result.regressions[k].names.size() >
              result.regressions[k - 1].names.size());
        // nested least squares cannot lose explained variance
        CHECK(result.regressions[k].r_squared >=
              result.regressions[k - 1].r_squared - 1e-12);
    }
    for (const stats::OlsFit& fit : result.regressions) CHECK(fit.n_obs == 8);

    REQUIRE(result.groups.groups.size() == 3);
    int total = 0;
    double share = 0.0;
    for (const GroupStats& g : result.groups.groups) {
        total += g.count;
        share += g.amplification_share;
    }
    CHECK(total == 8);
    CHECK(share == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.groups.groups[0].group == AdoptionGroup::founding);
    CHECK(result.groups.groups[0].count == 2);
    CHECK(result.groups.groups[1].count == 3); // days 30, 45, 80
    CHECK(result.groups.groups[2].count == 3); // days 120, 150, 200

    // amplification entries cover every bank
    CHECK(result.amplification.entries.size() == 8);
    // rank correlation lies in [-1, 1] with a valid p-value
    CHECK(std::abs(result.spearman_days_amp) <= 1.0);
    CHECK(result.spearman_days_amp_p >= 0.0);
    CHECK(result.spearman_days_amp_p <= 1.0);
    // the s-curve saturates near the panel size
    CHECK(result.scurve.ceiling > 4.0);
    CHECK(result.scurve.ceiling < 16.0);
}

TEST_CASE("days driven by one regressor make that spec fit perfectly") {
    // adoption_days = 10 * ceo_age - 400 exactly; the spec with ceo_age
    // must reach r^2 = 1 regardless of the other columns
    TempFile panel_file("emp_panel_linear.csv");
    {
        std::ofstream out(panel_file.path);
        out << PANEL_HEADER;
        // two founding members (day 0), three early, three late, so every
        // adoption-wave group is populated
        int ages[] = {40, 40, 44, 46, 48, 52, 55, 58};
        double assets[] = {27.3, 26.9, 28.4, 27.1, 28.9, 26.6, 27.8, 28.1};
        const char* regions[] = {"europe",       "north_america", "asia_pacific",
                                 "europe",       "north_america", "asia_pacific",
                                 "europe",       "north_america"};
        for (int i = 0; i < 8; ++i) {
            double days = 10.0 * ages[i] - 400.0;
            out << (200 + i) << "," << days << "," << ages[i] << "," << (2 + i % 4)
                << "," << assets[i] << "," << regions[i] << "," << (40.0 + i) << ","
                << (-10.0 + 2.0 * i) << "\n";
        }
    }
    TempFile expo_file("emp_expo_linear.csv");
    {
        std::ofstream out(expo_file.path);
        out << "from,to,exposure\n";
        for (int i = 0; i < 7; ++i)
            out << (200 + i) << "," << (201 + i) << "," << (5.0 - 0.5 * i) << "\n";
    }
    SpatialKernel kernel = SpatialKernel::knn(2, 0.5);
    auto [panel, net] = ingest(panel_file.path, expo_file.path, kernel);
    ModelParams params;
    params.nu_s = 0.5;
    params.nu_n = 0.8;
    params.lambda_x = 0.3;
    params.kappa = 0.15;
    PipelineResult result = run_pipeline(panel, net, params, kernel);
    // every spec contains ceo_age, so every fit is essentially perfect
    CHECK(result.regressions[0].r_squared > 1.0 - 1e-9);
    CHECK(result.regressions[3].r_squared > 1.0 - 1e-9);
}

TEST_CASE("report files have the documented shapes") {
    TempFile panel_file("emp_panel_files.csv");
    TempFile expo_file("emp_expo_files.csv");
    write_small_panel(panel_file.path);
    write_small_exposures(expo_file.path);
    SpatialKernel kernel = SpatialKernel::knn(3, 0.5);
    auto [panel, net] = ingest(panel_file.path, expo_file.path, kernel);
    ModelParams params;
    params.nu_s = 0.5;
    params.nu_n = 0.8;
    params.lambda_x = 0.3;
    params.kappa = 0.15;
    PipelineResult result = run_pipeline(panel, net, params, kernel);

    TempFile reg_file("emp_regression_out.csv");
    write_regression_table(result.regressions, reg_file.path);
    csv::Table reg = csv::read_file(reg_file.path);
    CHECK(reg.header ==
          std::vector<std::string>{"spec", "term", "coef", "std_err", "t_stat",
                                   "p_value", "r_squared", "adj_r_squared", "n"});
    std::size_t expected_rows = 0;
    for (const stats::OlsFit& fit : result.regressions)
        expected_rows += fit.names.size();
    CHECK(reg.rows.size() == expected_rows);

    TempFile group_file("emp_group_out.csv");
    write_group_report(result.groups, group_file.path);
    csv::Table grp = csv::read_file(group_file.path);
    CHECK(grp.header ==
          std::vector<std::string>{"group", "count", "mean_days",
                                   "mean_amplification", "amplification_share"});
    CHECK(grp.rows.size() == 3);

    TempFile json_file("emp_scurve_out.json");
    write_scurve_json(result, json_file.path);
    std::ifstream in(json_file.path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find("\"ceiling\"") != std::string::npos);
    CHECK(text.find("\"founding_vs_rest_ttest\"") != std::string::npos);
    CHECK(text.find("\"post_threshold_spearman\"") != std::string::npos);
}
