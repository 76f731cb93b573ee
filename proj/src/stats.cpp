#include "adoptnet/stats.hpp"

#include "adoptnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace adoptnet::stats {

namespace {

// Continued fraction for the regularized incomplete beta function,
// evaluated with the modified Lentz scheme.
double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 3e-15;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) {
        d = tiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double coef = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + coef * d;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = 1.0 + coef / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;
        coef = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + coef * d;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = 1.0 + coef / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) {
            return h;
        }
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

void check_pair_sizes(const std::vector<double>& xs, const std::vector<double>& ys,
                      const char* what) {
    if (xs.size() != ys.size()) {
        std::ostringstream msg;
        msg << what << " requires equally sized samples, got " << xs.size()
            << " and " << ys.size();
        throw ConfigError(msg.str());
    }
    if (xs.size() < 2) {
        std::ostringstream msg;
        msg << what << " requires at least two paired observations";
        throw ConfigError(msg.str());
    }
}

// Ranks 1..n with ties assigned the average of the positions they span.
std::vector<double> midranks(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&xs](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t start = 0;
    while (start < n) {
        std::size_t stop = start + 1;
        while (stop < n && xs[order[stop]] == xs[order[start]]) {
            ++stop;
        }
        // start..stop-1 occupy ranks start+1..stop; share the average.
        const double shared = 0.5 * (static_cast<double>(start + 1) +
                                     static_cast<double>(stop));
        for (std::size_t k = start; k < stop; ++k) {
            ranks[order[k]] = shared;
        }
        start = stop;
    }
    return ranks;
}

double two_sided_pvalue(double t, double df) {
    return 2.0 * (1.0 - student_t_cdf(std::abs(t), df));
}

double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

struct ScurveObjective {
    const std::vector<double>& times;
    const std::vector<double>& values;

    double sse(double ceiling, double steepness, double midpoint) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double fitted =
                ceiling * logistic(steepness * (times[i] - midpoint));
            const double r = values[i] - fitted;
            acc += r * r;
        }
        return acc;
    }
};

} // namespace

double mean(const std::vector<double>& xs) {
    if (xs.empty()) {
        throw ConfigError("mean of an empty sample is undefined");
    }
    return std::accumulate(xs.begin(), xs.end(), 0.0) /
           static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
    if (xs.size() < 2) {
        throw ConfigError("variance requires at least two observations");
    }
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) {
        acc += (x - m) * (x - m);
    }
    return acc / (static_cast<double>(xs.size()) - 1.0);
}

double stddev(const std::vector<double>& xs) { return std::sqrt(variance(xs)); }

double median(std::vector<double> xs) {
    if (xs.empty()) {
        throw ConfigError("median of an empty sample is undefined");
    }
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    if (n % 2 == 1) {
        return xs[n / 2];
    }
    return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double quantile(std::vector<double> xs, double p) {
    if (xs.empty()) {
        throw ConfigError("quantile of an empty sample is undefined");
    }
    if (p < 0.0 || p > 1.0) {
        throw ConfigError("quantile probability must lie in [0, 1]");
    }
    std::sort(xs.begin(), xs.end());
    const double position = p * (static_cast<double>(xs.size()) - 1.0);
    const std::size_t lower = static_cast<std::size_t>(position);
    if (lower + 1 >= xs.size()) {
        return xs.back();
    }
    const double weight = position - static_cast<double>(lower);
    return (1.0 - weight) * xs[lower] + weight * xs[lower + 1];
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    check_pair_sizes(xs, ys, "pearson correlation");
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        throw ConfigError("correlation is undefined for a constant sample");
    }
    return sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    check_pair_sizes(xs, ys, "spearman correlation");
    return pearson(midranks(xs), midranks(ys));
}

double correlation_pvalue(double r, int n) {
    if (n < 3) {
        throw ConfigError("correlation p-value requires at least three pairs");
    }
    if (std::abs(r) >= 1.0) {
        return 0.0;
    }
    const double df = static_cast<double>(n - 2);
    const double t = r * std::sqrt(df / (1.0 - r * r));
    return two_sided_pvalue(t, df);
}

double student_t_cdf(double t, double df) {
    if (df <= 0.0) {
        throw ConfigError("degrees of freedom must be positive");
    }
    if (t == 0.0) {
        return 0.5;
    }
    const double x = df / (df + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
    if (df <= 0.0) {
        throw ConfigError("degrees of freedom must be positive");
    }
    if (p <= 0.0 || p >= 1.0) {
        throw ConfigError("quantile probability must lie strictly inside (0, 1)");
    }
    if (p == 0.5) {
        return 0.0;
    }
    if (p < 0.5) {
        return -student_t_quantile(1.0 - p, df);
    }
    double hi = 1.0;
    while (student_t_cdf(hi, df) < p) {
        hi *= 2.0;
        if (hi > 1e12) {
            throw NumericError("t quantile out of representable range");
        }
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, df) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

void check_sample(const std::vector<double>& xs, const char* label) {
    if (xs.size() < 2) {
        std::ostringstream msg;
        msg << "t-test sample " << label << " needs at least two observations";
        throw ConfigError(msg.str());
    }
}

} // namespace

TTestResult ttest_pooled(const std::vector<double>& a,
                         const std::vector<double>& b) {
    check_sample(a, "a");
    check_sample(b, "b");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    TTestResult out;
    out.mean_a = mean(a);
    out.mean_b = mean(b);
    out.df = na + nb - 2.0;
    const double pooled =
        ((na - 1.0) * variance(a) + (nb - 1.0) * variance(b)) / out.df;
    if (pooled <= 0.0) {
        throw ConfigError("pooled variance is zero; the t statistic is undefined");
    }
    out.statistic =
        (out.mean_a - out.mean_b) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
    out.p_value = two_sided_pvalue(out.statistic, out.df);
    return out;
}

TTestResult ttest_welch(const std::vector<double>& a,
                        const std::vector<double>& b) {
    check_sample(a, "a");
    check_sample(b, "b");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = variance(a) / na;
    const double vb = variance(b) / nb;
    if (va + vb <= 0.0) {
        throw ConfigError("both samples are constant; the t statistic is undefined");
    }
    TTestResult out;
    out.mean_a = mean(a);
    out.mean_b = mean(b);
    out.statistic = (out.mean_a - out.mean_b) / std::sqrt(va + vb);
    out.df = (va + vb) * (va + vb) /
             (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    out.p_value = two_sided_pvalue(out.statistic, out.df);
    return out;
}

OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
           const std::vector<std::string>& names) {
    const int n = static_cast<int>(design.rows());
    const int p = static_cast<int>(design.cols());
    if (p < 1) {
        throw ConfigError("regression design has no columns");
    }
    if (static_cast<int>(names.size()) != p) {
        std::ostringstream msg;
        msg << "regression has " << p << " columns but " << names.size()
            << " names";
        throw ConfigError(msg.str());
    }
    if (static_cast<int>(y.size()) != n) {
        std::ostringstream msg;
        msg << "regression has " << n << " rows but the response has " << y.size();
        throw ConfigError(msg.str());
    }
    if (n <= p) {
        std::ostringstream msg;
        msg << "regression needs more observations (" << n << ") than columns ("
            << p << ")";
        throw ConfigError(msg.str());
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < p) {
        const auto perm = qr.colsPermutation().indices();
        const int dropped = perm[qr.rank()];
        std::ostringstream msg;
        msg << "regression design is rank deficient: column '"
            << names[static_cast<std::size_t>(dropped)]
            << "' is collinear with the others";
        throw ConfigError(msg.str());
    }

    OlsFit fit;
    fit.names = names;
    fit.n_obs = n;
    fit.df_resid = n - p;
    fit.coef = qr.solve(y);

    const Eigen::VectorXd resid = y - design * fit.coef;
    const double rss = resid.squaredNorm();
    fit.sigma2 = rss / static_cast<double>(fit.df_resid);

    const Eigen::MatrixXd xtx_inv = (design.transpose() * design)
                                        .ldlt()
                                        .solve(Eigen::MatrixXd::Identity(p, p));
    fit.std_err.resize(p);
    fit.t_stat.resize(p);
    fit.p_value.resize(p);
    for (int j = 0; j < p; ++j) {
        fit.std_err[j] = std::sqrt(fit.sigma2 * xtx_inv(j, j));
        if (fit.std_err[j] > 0.0) {
            fit.t_stat[j] = fit.coef[j] / fit.std_err[j];
            fit.p_value[j] =
                two_sided_pvalue(fit.t_stat[j], static_cast<double>(fit.df_resid));
        } else {
            // Perfect fit: the statistic degenerates.
            fit.t_stat[j] = 0.0;
            fit.p_value[j] = fit.coef[j] == 0.0 ? 1.0 : 0.0;
        }
    }

    const double ym = y.mean();
    const double tss = (y.array() - ym).square().sum();
    if (tss <= 0.0) {
        throw ConfigError("regression response has zero variance");
    }
    fit.r_squared = 1.0 - rss / tss;
    fit.adj_r_squared = 1.0 - (1.0 - fit.r_squared) *
                                  (static_cast<double>(n) - 1.0) /
                                  static_cast<double>(fit.df_resid);
    return fit;
}

ScurveFit fit_scurve(const std::vector<double>& times,
                     const std::vector<double>& values) {
    check_pair_sizes(times, values, "s-curve fit");
    if (times.size() < 4) {
        throw ConfigError("s-curve fit needs at least four observations");
    }
    const auto [tmin_it, tmax_it] = std::minmax_element(times.begin(), times.end());
    const double range = *tmax_it - *tmin_it;
    if (range <= 0.0) {
        throw ConfigError("s-curve fit needs observations at distinct times");
    }
    const double vmin = *std::min_element(values.begin(), values.end());
    const double vmax = *std::max_element(values.begin(), values.end());
    if (vmax <= vmin) {
        throw ConfigError("s-curve fit needs varying values");
    }

    const ScurveObjective objective{times, values};
    const double box_lo = *tmin_it - 0.5 * range;
    const double box_hi = *tmax_it + 0.5 * range;

    // Coarse grid with the ceiling profiled out by linear least squares.
    double best_sse = std::numeric_limits<double>::infinity();
    double best_ceiling = vmax;
    double best_k = 1.0 / range;
    double best_t0 = 0.5 * (*tmin_it + *tmax_it);
    constexpr int k_points = 60;
    constexpr int t0_points = 48;
    for (int sign = -1; sign <= 1; sign += 2) {
        for (int ik = 0; ik < k_points; ++ik) {
            const double magnitude =
                1e-3 * std::pow(1e4, static_cast<double>(ik) / (k_points - 1));
            const double k = sign * magnitude;
            for (int it = 0; it < t0_points; ++it) {
                const double t0 =
                    box_lo + (box_hi - box_lo) * static_cast<double>(it) /
                                 (t0_points - 1);
                double gy = 0.0;
                double gg = 0.0;
                for (std::size_t i = 0; i < times.size(); ++i) {
                    const double g = logistic(k * (times[i] - t0));
                    gy += g * values[i];
                    gg += g * g;
                }
                if (gg < 1e-12) {
                    continue;
                }
                const double ceiling = gy / gg;
                const double sse = objective.sse(ceiling, k, t0);
                if (sse < best_sse) {
                    best_sse = sse;
                    best_ceiling = ceiling;
                    best_k = k;
                    best_t0 = t0;
                }
            }
        }
    }

    // Damped Gauss-Newton refinement from the grid optimum.
    ScurveFit fit;
    fit.ceiling = best_ceiling;
    fit.steepness = best_k;
    fit.midpoint = best_t0;
    fit.sse = best_sse;

    const std::size_t n = times.size();
    for (int iter = 0; iter < 200; ++iter) {
        fit.iterations = iter + 1;
        Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), 3);
        Eigen::VectorXd resid(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const double g = logistic(fit.steepness * (times[i] - fit.midpoint));
            const double fitted = fit.ceiling * g;
            resid[static_cast<Eigen::Index>(i)] = values[i] - fitted;
            const double slope = fit.ceiling * g * (1.0 - g);
            jac(static_cast<Eigen::Index>(i), 0) = g;
            jac(static_cast<Eigen::Index>(i), 1) = slope * (times[i] - fit.midpoint);
            jac(static_cast<Eigen::Index>(i), 2) = -slope * fit.steepness;
        }
        const Eigen::VectorXd gradient = jac.transpose() * resid;
        if (gradient.lpNorm<Eigen::Infinity>() < 1e-8) {
            fit.refined = true;
            break;
        }
        const Eigen::VectorXd step =
            (jac.transpose() * jac +
             1e-12 * Eigen::MatrixXd::Identity(3, 3))
                .ldlt()
                .solve(gradient);
        if (!step.allFinite()) {
            break;
        }
        double scale = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 30; ++halving) {
            const double ceiling = fit.ceiling + scale * step[0];
            const double steepness = fit.steepness + scale * step[1];
            const double midpoint =
                std::clamp(fit.midpoint + scale * step[2], box_lo, box_hi);
            const double sse = objective.sse(ceiling, steepness, midpoint);
            if (sse < fit.sse) {
                fit.ceiling = ceiling;
                fit.steepness = steepness;
                fit.midpoint = midpoint;
                fit.sse = sse;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) {
            break;
        }
    }

    double tss = 0.0;
    const double vm = mean(values);
    for (double v : values) {
        tss += (v - vm) * (v - vm);
    }
    fit.r_squared = tss > 0.0 ? 1.0 - fit.sse / tss : 0.0;
    return fit;
}

double scurve_value(const ScurveFit& fit, double t) {
    return fit.ceiling * logistic(fit.steepness * (t - fit.midpoint));
}

} // namespace adoptnet::stats
