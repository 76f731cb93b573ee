#include "adoptnet/empirical.hpp"

#include "adoptnet/csv.hpp"
#include "adoptnet/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace adoptnet {

Region parse_region(const std::string& text) {
    if (text == "north_america") {
        return Region::north_america;
    }
    if (text == "europe") {
        return Region::europe;
    }
    if (text == "asia_pacific") {
        return Region::asia_pacific;
    }
    throw ConfigError("unknown region '" + text +
                      "' (expected north_america, europe, or asia_pacific)");
}

std::string to_string(Region region) {
    switch (region) {
    case Region::north_america:
        return "north_america";
    case Region::europe:
        return "europe";
    case Region::asia_pacific:
        return "asia_pacific";
    }
    return "north_america";
}

int BankPanel::index_of(long id) const {
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].id == id) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

void BankPanel::validate() const {
    if (records.size() < 2) {
        throw ConfigError("panel needs at least two institutions");
    }
    std::set<long> ids;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const BankRecord& r = records[i];
        if (!ids.insert(r.id).second) {
            std::ostringstream msg;
            msg << "panel row " << i + 1 << ": duplicate id " << r.id;
            throw ConfigError(msg.str());
        }
        if (!std::isfinite(r.adoption_days) || r.adoption_days < 0.0) {
            std::ostringstream msg;
            msg << "panel row " << i + 1 << ": adoption_days must be finite and "
                << "non-negative";
            throw ConfigError(msg.str());
        }
        if (!std::isfinite(r.latitude) || !std::isfinite(r.longitude)) {
            std::ostringstream msg;
            msg << "panel row " << i + 1 << ": coordinates must be finite";
            throw ConfigError(msg.str());
        }
    }
}

AdoptionGroup group_of(double adoption_days) {
    if (adoption_days <= 0.0) {
        return AdoptionGroup::founding;
    }
    if (adoption_days <= 100.0) {
        return AdoptionGroup::early;
    }
    return AdoptionGroup::late;
}

std::string to_string(AdoptionGroup group) {
    switch (group) {
    case AdoptionGroup::founding:
        return "founding";
    case AdoptionGroup::early:
        return "early";
    case AdoptionGroup::late:
        return "late";
    }
    return "founding";
}

BankPanel load_panel_csv(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    const std::size_t id_col = table.column("id");
    const std::size_t days_col = table.column("adoption_days");
    const std::size_t age_col = table.column("ceo_age");
    const std::size_t tenure_col = table.column("ceo_tenure");
    const std::size_t assets_col = table.column("log_assets");
    const std::size_t region_col = table.column("region");
    const std::size_t lat_col = table.column("latitude");
    const std::size_t lon_col = table.column("longitude");

    BankPanel panel;
    panel.records.reserve(table.rows.size());
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
        BankRecord record;
        record.id = csv::to_long(table, row, id_col);
        record.adoption_days = csv::to_double(table, row, days_col);
        record.ceo_age = csv::to_double(table, row, age_col);
        record.ceo_tenure = csv::to_double(table, row, tenure_col);
        record.log_assets = csv::to_double(table, row, assets_col);
        try {
            record.region = parse_region(table.rows[row][region_col]);
        } catch (const ConfigError& e) {
            std::ostringstream msg;
            msg << path << ": row " << row + 1 << ": " << e.what();
            throw ConfigError(msg.str());
        }
        record.latitude = csv::to_double(table, row, lat_col);
        record.longitude = csv::to_double(table, row, lon_col);
        panel.records.push_back(record);
    }
    panel.validate();
    return panel;
}

namespace {

// Min-max scale one coordinate axis to [0,1]; a degenerate axis collapses to
// the midpoint.
double scale_axis(double value, double lo, double hi) {
    if (hi > lo) {
        return (value - lo) / (hi - lo);
    }
    return 0.5;
}

} // namespace

SpatialNetwork load_exposures_csv(const std::string& path, const BankPanel& panel,
                                  const SpatialKernel& kernel) {
    panel.validate();
    const int n = panel.size();
    const csv::Table table = csv::read_file(path);
    const std::size_t from_col = table.column("from");
    const std::size_t to_col = table.column("to");
    const std::size_t exposure_col = table.column("exposure");

    Eigen::MatrixXd exposures = Eigen::MatrixXd::Zero(n, n);
    std::set<std::pair<int, int>> seen;
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
        const long from_id = csv::to_long(table, row, from_col);
        const long to_id = csv::to_long(table, row, to_col);
        const double exposure = csv::to_double(table, row, exposure_col);
        const int from = panel.index_of(from_id);
        const int to = panel.index_of(to_id);
        if (from < 0 || to < 0) {
            std::ostringstream msg;
            msg << path << ": row " << row + 1 << ": id "
                << (from < 0 ? from_id : to_id) << " does not appear in the panel";
            throw ConfigError(msg.str());
        }
        if (from == to) {
            std::ostringstream msg;
            msg << path << ": row " << row + 1 << ": self-exposure for id "
                << from_id;
            throw ConfigError(msg.str());
        }
        if (exposure < 0.0 || !std::isfinite(exposure)) {
            std::ostringstream msg;
            msg << path << ": row " << row + 1
                << ": exposure must be finite and non-negative";
            throw ConfigError(msg.str());
        }
        if (!seen.insert({from, to}).second) {
            std::ostringstream msg;
            msg << path << ": row " << row + 1 << ": duplicate exposure for pair "
                << from_id << " -> " << to_id;
            throw ConfigError(msg.str());
        }
        exposures(from, to) = exposure;
    }

    Eigen::MatrixXd adjacency = 0.5 * (exposures + exposures.transpose());
    const double peak = adjacency.maxCoeff();
    if (peak <= 0.0) {
        throw ConfigError(path + ": exposure matrix has no positive entries");
    }
    adjacency /= peak;

    SpatialNetwork net;
    net.n = n;
    net.adjacency = adjacency;
    net.coords.resize(n, 2);
    double lat_lo = std::numeric_limits<double>::infinity();
    double lat_hi = -std::numeric_limits<double>::infinity();
    double lon_lo = std::numeric_limits<double>::infinity();
    double lon_hi = -std::numeric_limits<double>::infinity();
    for (const BankRecord& record : panel.records) {
        lat_lo = std::min(lat_lo, record.latitude);
        lat_hi = std::max(lat_hi, record.latitude);
        lon_lo = std::min(lon_lo, record.longitude);
        lon_hi = std::max(lon_hi, record.longitude);
    }
    for (int i = 0; i < n; ++i) {
        const BankRecord& record = panel.records[static_cast<std::size_t>(i)];
        net.coords(i, 0) = scale_axis(record.longitude, lon_lo, lon_hi);
        net.coords(i, 1) = scale_axis(record.latitude, lat_lo, lat_hi);
    }
    net.spatial_weights = Eigen::MatrixXd::Zero(n, n);
    build_operators(net, kernel); // fills spatial_weights, validates shapes
    return net;
}

std::pair<BankPanel, SpatialNetwork> ingest(const std::string& panel_csv,
                                            const std::string& exposures_csv,
                                            const SpatialKernel& kernel) {
    BankPanel panel = load_panel_csv(panel_csv);
    SpatialNetwork net = load_exposures_csv(exposures_csv, panel, kernel);
    return {std::move(panel), std::move(net)};
}

namespace {

std::vector<double> amplification_totals(const AmplificationReport& report) {
    std::vector<double> totals;
    totals.reserve(report.entries.size());
    for (const AmplificationEntry& entry : report.entries) {
        totals.push_back(entry.parts.total);
    }
    return totals;
}

GroupReport build_group_report(const BankPanel& panel,
                               const std::vector<double>& amp) {
    const std::vector<AdoptionGroup> order = {
        AdoptionGroup::founding, AdoptionGroup::early, AdoptionGroup::late};
    double amp_total = 0.0;
    for (double a : amp) {
        amp_total += a;
    }
    if (amp_total <= 0.0) {
        throw ConfigError("total amplification is not positive");
    }

    GroupReport report;
    for (AdoptionGroup group : order) {
        GroupStats stats_row;
        stats_row.group = group;
        double days_sum = 0.0;
        double amp_sum = 0.0;
        for (std::size_t i = 0; i < panel.records.size(); ++i) {
            if (group_of(panel.records[i].adoption_days) != group) {
                continue;
            }
            ++stats_row.count;
            days_sum += panel.records[i].adoption_days;
            amp_sum += amp[i];
        }
        if (stats_row.count == 0) {
            throw ConfigError("adoption group '" + to_string(group) +
                              "' is empty; the group analysis is degenerate");
        }
        stats_row.mean_days = days_sum / stats_row.count;
        stats_row.mean_amplification = amp_sum / stats_row.count;
        stats_row.amplification_share = amp_sum / amp_total;
        report.groups.push_back(stats_row);
    }

    std::vector<double> founding_amp;
    std::vector<double> rest_amp;
    std::vector<double> post_amp;
    std::vector<double> post_days;
    for (std::size_t i = 0; i < panel.records.size(); ++i) {
        const double days = panel.records[i].adoption_days;
        if (group_of(days) == AdoptionGroup::founding) {
            founding_amp.push_back(amp[i]);
        } else {
            rest_amp.push_back(amp[i]);
            post_amp.push_back(amp[i]);
            post_days.push_back(days);
        }
    }
    report.founding_vs_rest = stats::ttest_pooled(founding_amp, rest_amp);
    report.post_spearman = stats::spearman(post_amp, post_days);
    report.post_spearman_p = stats::correlation_pvalue(
        report.post_spearman, static_cast<int>(post_amp.size()));
    return report;
}

stats::ScurveFit fit_adoption_curve(const BankPanel& panel) {
    std::vector<double> days;
    days.reserve(panel.records.size());
    for (const BankRecord& record : panel.records) {
        days.push_back(record.adoption_days);
    }
    std::sort(days.begin(), days.end());

    std::vector<double> times;
    std::vector<double> cumulative;
    for (std::size_t i = 0; i < days.size(); ++i) {
        if (i + 1 < days.size() && days[i + 1] == days[i]) {
            continue; // record each distinct day once, with the full count
        }
        times.push_back(days[i]);
        cumulative.push_back(static_cast<double>(i + 1));
    }
    return stats::fit_scurve(times, cumulative);
}

} // namespace

PipelineResult run_pipeline(const BankPanel& panel, SpatialNetwork net,
                            const ModelParams& params,
                            const SpatialKernel& kernel) {
    panel.validate();
    if (panel.size() < 8) {
        std::ostringstream msg;
        msg << "pipeline needs at least 8 institutions for the full "
            << "specification, got " << panel.size();
        throw ConfigError(msg.str());
    }
    if (net.n != panel.size()) {
        std::ostringstream msg;
        msg << "network has " << net.n << " nodes but the panel has "
            << panel.size();
        throw ConfigError(msg.str());
    }

    const OperatorSet ops = build_operators(net, kernel);
    PipelineResult result;
    result.amplification = build_report(ops, params);
    const std::vector<double> amp = amplification_totals(result.amplification);

    const int n = panel.size();
    Eigen::VectorXd days(n);
    for (int i = 0; i < n; ++i) {
        days[i] = panel.records[static_cast<std::size_t>(i)].adoption_days;
    }

    // Four nested specifications of adoption days on bank characteristics.
    const int max_cols = 7;
    Eigen::MatrixXd design(n, max_cols);
    for (int i = 0; i < n; ++i) {
        const BankRecord& r = panel.records[static_cast<std::size_t>(i)];
        design(i, 0) = 1.0;
        design(i, 1) = r.ceo_age;
        design(i, 2) = amp[static_cast<std::size_t>(i)];
        design(i, 3) = r.log_assets;
        design(i, 4) = r.region == Region::europe ? 1.0 : 0.0;
        design(i, 5) = r.region == Region::asia_pacific ? 1.0 : 0.0;
        design(i, 6) = r.ceo_tenure;
    }
    const std::vector<std::string> names = {
        "intercept",     "ceo_age",
        "amplification", "log_assets",
        "region_europe", "region_asia_pacific",
        "ceo_tenure"};
    const std::vector<int> spec_cols = {3, 4, 6, 7};
    for (int cols : spec_cols) {
        const std::vector<std::string> spec_names(names.begin(),
                                                  names.begin() + cols);
        result.regressions.push_back(
            stats::ols(design.leftCols(cols), days, spec_names));
    }

    result.groups = build_group_report(panel, amp);
    result.scurve = fit_adoption_curve(panel);

    std::vector<double> days_vec(days.data(), days.data() + n);
    result.spearman_days_amp = stats::spearman(amp, days_vec);
    result.spearman_days_amp_p =
        stats::correlation_pvalue(result.spearman_days_amp, n);
    return result;
}

void write_regression_table(const std::vector<stats::OlsFit>& fits,
                            const std::string& path) {
    csv::Writer writer(path, {"spec", "term", "coef", "std_err", "t_stat",
                              "p_value", "r_squared", "adj_r_squared", "n"});
    for (std::size_t s = 0; s < fits.size(); ++s) {
        const stats::OlsFit& fit = fits[s];
        for (std::size_t j = 0; j < fit.names.size(); ++j) {
            writer.row({std::to_string(s + 1), fit.names[j],
                        csv::format_double(fit.coef[static_cast<Eigen::Index>(j)]),
                        csv::format_double(
                            fit.std_err[static_cast<Eigen::Index>(j)]),
                        csv::format_double(
                            fit.t_stat[static_cast<Eigen::Index>(j)]),
                        csv::format_double(
                            fit.p_value[static_cast<Eigen::Index>(j)]),
                        csv::format_double(fit.r_squared),
                        csv::format_double(fit.adj_r_squared),
                        std::to_string(fit.n_obs)});
        }
    }
}

void write_group_report(const GroupReport& report, const std::string& path) {
    csv::Writer writer(path, {"group", "count", "mean_days",
                              "mean_amplification", "amplification_share"});
    for (const GroupStats& g : report.groups) {
        writer.row({to_string(g.group), std::to_string(g.count),
                    csv::format_double(g.mean_days),
                    csv::format_double(g.mean_amplification),
                    csv::format_double(g.amplification_share)});
    }
}

void write_scurve_json(const PipelineResult& result, const std::string& path) {
    nlohmann::json doc;
    doc["scurve"] = {{"ceiling", result.scurve.ceiling},
                     {"steepness", result.scurve.steepness},
                     {"midpoint", result.scurve.midpoint},
                     {"sse", result.scurve.sse},
                     {"r_squared", result.scurve.r_squared},
                     {"refined", result.scurve.refined}};
    doc["founding_vs_rest_ttest"] = {
        {"t", result.groups.founding_vs_rest.statistic},
        {"df", result.groups.founding_vs_rest.df},
        {"p", result.groups.founding_vs_rest.p_value},
        {"mean_founding", result.groups.founding_vs_rest.mean_a},
        {"mean_rest", result.groups.founding_vs_rest.mean_b}};
    doc["spearman_days_amplification"] = {{"rho", result.spearman_days_amp},
                                          {"p", result.spearman_days_amp_p}};
    doc["post_threshold_spearman"] = {{"rho", result.groups.post_spearman},
                                      {"p", result.groups.post_spearman_p}};
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot open '" + path + "' for writing");
    }
    out << doc.dump(2) << "\n";
}

} // namespace adoptnet
