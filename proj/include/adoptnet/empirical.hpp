#pragma once

#include "adoptnet/amplification.hpp"
#include "adoptnet/dynamics.hpp"
#include "adoptnet/graph.hpp"
#include "adoptnet/stats.hpp"

#include <string>
#include <utility>
#include <vector>

// Applied pipeline: read an institution panel and a bilateral exposure
// network from CSV, build the coupled spatial-network model, compute
// amplification factors, and run the adoption-timing analyses (nested
// regressions, adoption-wave groups, logistic adoption curve).

namespace adoptnet {

enum class Region { north_america, europe, asia_pacific };

Region parse_region(const std::string& text); // throws ConfigError
std::string to_string(Region region);

struct BankRecord {
    long id = 0;
    double adoption_days = 0.0; // days since system launch; 0 = founding member
    double ceo_age = 0.0;
    double ceo_tenure = 0.0;
    double log_assets = 0.0;
    Region region = Region::north_america;
    double latitude = 0.0;
    double longitude = 0.0;
};

struct BankPanel {
    std::vector<BankRecord> records; // row order defines the node index

    int size() const { return static_cast<int>(records.size()); }
    int index_of(long id) const; // -1 when absent
    void validate() const;       // unique ids, finite non-negative adoption days
};

// Adoption-wave groups: founding members adopt on day 0, the early wave
// within the first 100 days, the late wave afterwards.
enum class AdoptionGroup { founding, early, late };

AdoptionGroup group_of(double adoption_days);
std::string to_string(AdoptionGroup group);

struct GroupStats {
    AdoptionGroup group = AdoptionGroup::founding;
    int count = 0;
    double mean_days = 0.0;
    double mean_amplification = 0.0;
    double amplification_share = 0.0; // shares across groups sum to 1
};

struct GroupReport {
    std::vector<GroupStats> groups;        // founding, early, late
    stats::TTestResult founding_vs_rest;   // amplification, pooled t-test
    double post_spearman = 0.0;            // amplification vs days, day >= 1
    double post_spearman_p = 1.0;
};

struct PipelineResult {
    AmplificationReport amplification;
    std::vector<stats::OlsFit> regressions; // four nested specifications
    GroupReport groups;
    stats::ScurveFit scurve;
    double spearman_days_amp = 0.0; // all institutions
    double spearman_days_amp_p = 1.0;
};

// Panel CSV columns: id, adoption_days, ceo_age, ceo_tenure, log_assets,
// region, latitude, longitude.
BankPanel load_panel_csv(const std::string& path);

// Exposure CSV columns: from, to, exposure (directed, ids from the panel).
// The adjacency is the symmetrized exposure matrix (E + E^T)/2 scaled so the
// largest entry is 1; coordinates are min-max scaled longitude/latitude.
SpatialNetwork load_exposures_csv(const std::string& path, const BankPanel& panel,
                                  const SpatialKernel& kernel);

std::pair<BankPanel, SpatialNetwork> ingest(const std::string& panel_csv,
                                            const std::string& exposures_csv,
                                            const SpatialKernel& kernel);

// Runs amplification, the four nested regressions of adoption days on bank
// characteristics, the adoption-wave group comparison, and the logistic fit
// to cumulative adoption.  Needs at least 8 institutions.
PipelineResult run_pipeline(const BankPanel& panel, SpatialNetwork net,
                            const ModelParams& params,
                            const SpatialKernel& kernel);

// CSV: "spec,term,coef,std_err,t_stat,p_value,r_squared,adj_r_squared,n".
void write_regression_table(const std::vector<stats::OlsFit>& fits,
                            const std::string& path);
// CSV: "group,count,mean_days,mean_amplification,amplification_share".
void write_group_report(const GroupReport& report, const std::string& path);
// JSON with the fitted curve, the founding-vs-rest t-test, and the rank
// correlations.
void write_scurve_json(const PipelineResult& result, const std::string& path);

} // namespace adoptnet
