#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

// Small statistics toolkit: descriptive moments, rank and product-moment
// correlation, Student-t tail probabilities and quantiles, two-sample tests,
// ordinary least squares with classical standard errors, and a logistic
// growth-curve fitter.  Everything is implemented here; no external
// statistics library is involved.

namespace adoptnet::stats {

double mean(const std::vector<double>& xs);
// Sample variance with the n-1 denominator.
double variance(const std::vector<double>& xs);
double stddev(const std::vector<double>& xs);
double median(std::vector<double> xs);
// Linear-interpolation sample quantile, p in [0, 1].
double quantile(std::vector<double> xs, double p);

double pearson(const std::vector<double>& xs, const std::vector<double>& ys);
// Rank correlation; ties receive mid-ranks.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);
// Two-sided p-value for a correlation of n pairs via the t transform.
double correlation_pvalue(double r, int n);

// P(T <= t) for Student's t with df degrees of freedom (df may be
// fractional, as produced by the Welch test).
double student_t_cdf(double t, double df);
// Quantile: the t with student_t_cdf(t, df) == p.
double student_t_quantile(double p, double df);

struct TTestResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    double mean_a = 0.0;
    double mean_b = 0.0;
};

// Equal-variance two-sample test.
TTestResult ttest_pooled(const std::vector<double>& a, const std::vector<double>& b);
// Welch's unequal-variance test with Welch-Satterthwaite df.
TTestResult ttest_welch(const std::vector<double>& a, const std::vector<double>& b);

struct OlsFit {
    std::vector<std::string> names;
    Eigen::VectorXd coef;
    Eigen::VectorXd std_err;
    Eigen::VectorXd t_stat;
    Eigen::VectorXd p_value;
    double sigma2 = 0.0;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    int n_obs = 0;
    int df_resid = 0;
};

// Least squares of y on the columns of design (the caller supplies the
// intercept column).  names labels the columns for error messages and
// reports.  Throws ConfigError when the design is rank deficient, naming a
// redundant column.
OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
           const std::vector<std::string>& names);

struct ScurveFit {
    double ceiling = 0.0;   // upper asymptote
    double steepness = 0.0; // growth rate
    double midpoint = 0.0;  // time of half-saturation
    double sse = 0.0;
    double r_squared = 0.0;
    bool refined = false; // Gauss-Newton reached its gradient tolerance
    int iterations = 0;
};

// Fits ceiling / (1 + exp(-steepness * (t - midpoint))) by a coarse grid
// over (steepness, midpoint) with the ceiling profiled out linearly,
// followed by damped Gauss-Newton refinement.
ScurveFit fit_scurve(const std::vector<double>& times,
                     const std::vector<double>& values);

// Value of a fitted curve at time t.
double scurve_value(const ScurveFit& fit, double t);

} // namespace adoptnet::stats
