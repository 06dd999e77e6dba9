#include "s2gen/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace s2gen {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double population_std(std::span<const double> v) {
    const std::size_t n = v.size();
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : v) {
        const double d = x - mean;
        var += d * d;
    }
    return std::sqrt(var / static_cast<double>(n));
}

double variance_of(std::span<const double> v) {
    const double sd = population_std(v);
    return sd * sd;
}

std::vector<std::complex<double>> dft(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> a(n);
    if ((n & (n - 1)) == 0 && n > 1) {
        // iterative radix-2
        for (std::size_t i = 0; i < n; ++i) a[i] = x[i];
        std::size_t j = 0;
        for (std::size_t i = 1; i < n; ++i) {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(a[i], a[j]);
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const double ang = -2.0 * kPi / static_cast<double>(len);
            const std::complex<double> wl(std::cos(ang), std::sin(ang));
            for (std::size_t i = 0; i < n; i += len) {
                std::complex<double> w(1.0, 0.0);
                for (std::size_t k = 0; k < len / 2; ++k) {
                    const auto u = a[i + k];
                    const auto v = a[i + k + len / 2] * w;
                    a[i + k] = u + v;
                    a[i + k + len / 2] = u - v;
                    w *= wl;
                }
            }
        }
        return a;
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * kPi * static_cast<double>(k) *
                               static_cast<double>(t) / static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        a[k] = acc;
    }
    return a;
}

}  // namespace

std::vector<double> periodogram(std::span<const double> series) {
    const std::size_t n = series.size();
    const auto spec = dft(series);
    const std::size_t bins = n / 2;
    std::vector<double> p(bins);
    for (std::size_t k = 1; k <= bins; ++k)
        p[k - 1] = std::norm(spec[k]) / static_cast<double>(n);
    return p;
}

// ---------------------------------------------------------------------------
// ADF
// ---------------------------------------------------------------------------

double mackinnon_p_const(double stat) {
    // MacKinnon (1994) approximate asymptotic surface, constant-only case.
    constexpr double tau_max = 2.74;
    constexpr double tau_min = -18.83;
    constexpr double tau_star = -1.61;
    if (stat > tau_max) return 1.0;
    if (stat < tau_min) return 0.0;
    double z;
    if (stat <= tau_star) {
        z = 2.1659 + 1.4412 * stat + 0.038269 * stat * stat;
    } else {
        z = 1.7339 + 0.93202 * stat - 0.12745 * stat * stat -
            0.010368 * stat * stat * stat;
    }
    const double p = 0.5 * std::erfc(-z / std::sqrt(2.0));
    return std::clamp(p, 0.0, 1.0);
}

AdfResult adf_test(std::span<const double> series) {
    const int n = static_cast<int>(series.size());
    if (n < 20) throw std::invalid_argument("adf_test: need at least 20 points");
    if (population_std(series) < 1e-12)
        throw DegenerateInputError("adf_test: constant series");

    const int lags = static_cast<int>(
        std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    const int rows = n - 1 - lags;
    const int cols = 2 + lags;  // constant, level, lagged diffs
    if (rows <= cols)
        throw std::invalid_argument("adf_test: series too short for lag order");

    std::vector<double> dy(static_cast<std::size_t>(n - 1));
    for (int i = 0; i + 1 < n; ++i) dy[static_cast<std::size_t>(i)] = series[i + 1] - series[i];

    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd b(rows);
    for (int r = 0; r < rows; ++r) {
        const int i = lags + r;  // dy index of the regression target
        b(r) = dy[static_cast<std::size_t>(i)];
        X(r, 0) = 1.0;
        X(r, 1) = series[i];  // level y_{t-1}
        for (int l = 1; l <= lags; ++l) X(r, 1 + l) = dy[static_cast<std::size_t>(i - l)];
    }

    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(b);
    const Eigen::VectorXd resid = b - X * beta;
    const double ssr = resid.squaredNorm();
    const int dof = rows - cols;
    const double sigma2 = ssr / static_cast<double>(dof);
    const Eigen::MatrixXd xtx_inv =
        (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(cols, cols));
    const double se = std::sqrt(sigma2 * xtx_inv(1, 1));
    const double stat = beta(1) / se;
    return AdfResult{stat, mackinnon_p_const(stat), lags};
}

// ---------------------------------------------------------------------------
// Spectral metrics
// ---------------------------------------------------------------------------

double forecastability(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 16) throw std::invalid_argument("forecastability: need at least 16 points");
    const double sd = population_std(series);
    if (sd < 1e-12) throw DegenerateInputError("forecastability: constant series");

    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(n);
    std::vector<double> z(n);
    for (std::size_t t = 0; t < n; ++t) z[t] = (series[t] - mean) / sd;

    const auto p = periodogram(z);
    double total = 0.0;
    for (double v : p) total += v;
    if (total <= 0.0) throw DegenerateInputError("forecastability: empty spectrum");
    double entropy = 0.0;
    for (double v : p) {
        const double q = v / total;
        if (q > 0.0) entropy -= q * std::log(q);
    }
    const double h_max = std::log(static_cast<double>(p.size()));
    return std::clamp(1.0 - entropy / h_max, 0.0, 1.0);
}

double fft_mean(std::span<const double> series) {
    if (series.size() < 2) throw std::invalid_argument("fft_mean: need at least 2 points");
    const auto p = periodogram(series);
    double sum = 0.0;
    for (double v : p) sum += v;
    return sum / static_cast<double>(p.size());
}

// ---------------------------------------------------------------------------
// Permutation entropy
// ---------------------------------------------------------------------------

double permutation_entropy(std::span<const double> series, int m, int tau) {
    const int n = static_cast<int>(series.size());
    if (m < 2 || tau < 1) throw std::invalid_argument("permutation_entropy: bad m or tau");
    if (n < m * tau + 1)
        throw std::invalid_argument("permutation_entropy: series too short");

    int factorial = 1;
    for (int i = 2; i <= m; ++i) factorial *= i;
    std::vector<long long> counts(static_cast<std::size_t>(factorial), 0);
    std::vector<int> order(static_cast<std::size_t>(m));

    const int windows = n - (m - 1) * tau;
    for (int t = 0; t < windows; ++t) {
        std::iota(order.begin(), order.end(), 0);
        // stable sort by value; equal values keep index order
        std::stable_sort(order.begin(), order.end(), [&](int a, int bI) {
            return series[static_cast<std::size_t>(t + a * tau)] <
                   series[static_cast<std::size_t>(t + bI * tau)];
        });
        // Lehmer code of the permutation
        int code = 0;
        for (int i = 0; i < m; ++i) {
            int smaller = 0;
            for (int j = i + 1; j < m; ++j)
                if (order[static_cast<std::size_t>(j)] < order[static_cast<std::size_t>(i)]) ++smaller;
            code = code * (m - i) + smaller;
        }
        ++counts[static_cast<std::size_t>(code)];
    }

    double entropy = 0.0;
    for (long long c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(windows);
        entropy -= p * std::log(p);
    }
    return entropy;
}

// ---------------------------------------------------------------------------
// STL
// ---------------------------------------------------------------------------

namespace {

// Loess fit of integer-position values, evaluated at position x (which may
// lie outside [0, k-1] for the seasonal extension). Tricube weights over the
// `span` nearest points; degree 0 or 1.
double loess_at(const std::vector<double>& v, int span, int degree, double x) {
    const int k = static_cast<int>(v.size());
    const int q = std::min(span, k);
    int lo = static_cast<int>(std::lround(x)) - (q - 1) / 2;
    lo = std::clamp(lo, 0, k - q);
    double lambda = std::max(x - lo, static_cast<double>(lo + q - 1) - x);
    if (span > k) lambda += static_cast<double>(span - k) / 2.0;
    if (lambda <= 0.0) lambda = 1.0;

    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (int i = lo; i < lo + q; ++i) {
        const double u = std::fabs(static_cast<double>(i) - x) / lambda;
        if (u >= 1.0) continue;
        const double c = 1.0 - u * u * u;
        const double w = c * c * c;
        sw += w;
        swx += w * i;
        swy += w * v[static_cast<std::size_t>(i)];
        swxx += w * static_cast<double>(i) * i;
        swxy += w * static_cast<double>(i) * v[static_cast<std::size_t>(i)];
    }
    if (sw <= 0.0) return v[static_cast<std::size_t>(std::clamp(static_cast<int>(std::lround(x)), 0, k - 1))];
    if (degree == 0) return swy / sw;
    const double denom = sw * swxx - swx * swx;
    if (std::fabs(denom) < 1e-12 * sw * swxx + 1e-300) return swy / sw;
    const double slope = (sw * swxy - swx * swy) / denom;
    const double intercept = (swy - slope * swx) / sw;
    return intercept + slope * x;
}

std::vector<double> loess_all(const std::vector<double>& v, int span, int degree) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = loess_at(v, span, degree, static_cast<double>(i));
    return out;
}

std::vector<double> moving_average(const std::vector<double>& v, int w) {
    const std::size_t n = v.size();
    std::vector<double> out(n - static_cast<std::size_t>(w) + 1);
    double acc = 0.0;
    for (int i = 0; i < w; ++i) acc += v[static_cast<std::size_t>(i)];
    out[0] = acc / w;
    for (std::size_t i = 1; i < out.size(); ++i) {
        acc += v[i + static_cast<std::size_t>(w) - 1] - v[i - 1];
        out[i] = acc / w;
    }
    return out;
}

int next_odd_at_least(double x) {
    int v = static_cast<int>(std::ceil(x));
    if (v % 2 == 0) ++v;
    return std::max(v, 3);
}

}  // namespace

StlResult stl_decompose(std::span<const double> series, int period) {
    const int n = static_cast<int>(series.size());
    if (period < 2) throw std::invalid_argument("stl_decompose: period must be >= 2");
    if (n < 3 * period)
        throw std::invalid_argument("stl_decompose: need at least 3 periods of data");

    const int n_s = 7;                      // seasonal span, degree 0
    const int n_l = next_odd_at_least(period);  // low-pass span, degree 1
    const int n_t = next_odd_at_least(1.5 * period / (1.0 - 1.5 / n_s));

    const std::vector<double> y(series.begin(), series.end());
    std::vector<double> trend(static_cast<std::size_t>(n), 0.0);
    std::vector<double> seasonal(static_cast<std::size_t>(n), 0.0);

    std::vector<double> detrended(static_cast<std::size_t>(n));
    std::vector<double> cycle(static_cast<std::size_t>(n + 2 * period));
    std::vector<double> sub;

    for (int iter = 0; iter < 2; ++iter) {
        for (int t = 0; t < n; ++t)
            detrended[static_cast<std::size_t>(t)] = y[static_cast<std::size_t>(t)] - trend[static_cast<std::size_t>(t)];

        // Cycle-subseries smoothing, extended one period at each end.
        for (int c = 0; c < period; ++c) {
            sub.clear();
            for (int t = c; t < n; t += period) sub.push_back(detrended[static_cast<std::size_t>(t)]);
            const int n_c = static_cast<int>(sub.size());
            for (int i = -1; i <= n_c; ++i) {
                const int idx = c + (i + 1) * period;
                cycle[static_cast<std::size_t>(idx)] = loess_at(sub, n_s, 0, static_cast<double>(i));
            }
        }

        // Low-pass: MA(p) twice, MA(3), then loess(n_l, degree 1).
        auto lp = moving_average(cycle, period);
        lp = moving_average(lp, period);
        lp = moving_average(lp, 3);
        lp = loess_all(lp, n_l, 1);

        for (int t = 0; t < n; ++t)
            seasonal[static_cast<std::size_t>(t)] =
                cycle[static_cast<std::size_t>(t + period)] - lp[static_cast<std::size_t>(t)];

        for (int t = 0; t < n; ++t)
            detrended[static_cast<std::size_t>(t)] = y[static_cast<std::size_t>(t)] - seasonal[static_cast<std::size_t>(t)];
        trend = loess_all(detrended, n_t, 1);
    }

    StlResult res;
    res.period = period;
    res.trend = std::move(trend);
    res.seasonal = std::move(seasonal);
    res.remainder.resize(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
        res.remainder[static_cast<std::size_t>(t)] =
            y[static_cast<std::size_t>(t)] - res.trend[static_cast<std::size_t>(t)] - res.seasonal[static_cast<std::size_t>(t)];
    return res;
}

SeasonalityResult stl_seasonality(std::span<const double> series,
                                  std::optional<int> period) {
    const int n = static_cast<int>(series.size());
    int p;
    if (period.has_value()) {
        p = *period;
    } else {
        if (n < 4 || population_std(series) < 1e-12)
            return SeasonalityResult{0.0, true};
        const auto pg = periodogram(series);
        double best = 0.0;
        int k_star = 0;
        for (std::size_t k = 0; k < pg.size(); ++k) {
            if (pg[k] > best) {
                best = pg[k];
                k_star = static_cast<int>(k) + 1;
            }
        }
        if (k_star == 0 || best <= 0.0) return SeasonalityResult{0.0, true};
        p = static_cast<int>(std::lround(static_cast<double>(n) / k_star));
        p = std::clamp(p, 2, n / 2);
    }

    const auto stl = stl_decompose(series, p);
    std::vector<double> sr(stl.seasonal.size());
    for (std::size_t i = 0; i < sr.size(); ++i) sr[i] = stl.seasonal[i] + stl.remainder[i];
    const double var_sr = variance_of(sr);
    if (var_sr < 1e-300) return SeasonalityResult{0.0, false};
    const double value = std::max(0.0, 1.0 - variance_of(stl.remainder) / var_sr);
    return SeasonalityResult{value, false};
}

// ---------------------------------------------------------------------------
// Mann-Kendall
// ---------------------------------------------------------------------------

long long mann_kendall_s(std::span<const double> series) {
    const std::size_t n = series.size();
    long long s = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (series[j] > series[i]) ++s;
            else if (series[j] < series[i]) --s;
        }
    }
    return s;
}

int mann_kendall(std::span<const double> series, double alpha) {
    const std::size_t n = series.size();
    if (n < 8) throw std::invalid_argument("mann_kendall: need at least 8 points");
    const long long s = mann_kendall_s(series);

    // tie-corrected variance
    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    const double dn = static_cast<double>(n);
    double var = dn * (dn - 1.0) * (2.0 * dn + 5.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) var -= t * (t - 1.0) * (2.0 * t + 5.0);
        i = j + 1;
    }
    var /= 18.0;

    if (s == 0 || var <= 0.0) return 0;
    const double z = (s > 0 ? static_cast<double>(s) - 1.0 : static_cast<double>(s) + 1.0) /
                     std::sqrt(var);
    // two-sided normal quantile via inverse erfc
    const double z_crit = [alpha] {
        // bisection on erfc; alpha is tiny-dimensional, precision 1e-12
        double lo = 0.0, hi = 40.0;
        const double target = alpha;  // P(|Z| > z) = erfc(z/sqrt(2))
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (std::erfc(mid / std::sqrt(2.0)) > target) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    }();
    if (std::fabs(z) > z_crit) return s > 0 ? 1 : -1;
    return 0;
}

// ---------------------------------------------------------------------------
// Profiles and Radviz
// ---------------------------------------------------------------------------

StatsProfile profile_series(std::span<const double> series) {
    if (series.empty()) throw std::invalid_argument("profile_series: empty series");
    StatsProfile p;
    try {
        const auto adf = adf_test(series);
        p.adf_stat = adf.stat;
        p.adf_p = adf.p;
    } catch (const std::invalid_argument&) {
        p.adf_stat = 0.0;
        p.adf_p = 1.0;
        p.adf_degenerate = true;
    }
    try {
        p.forecastability = forecastability(series);
    } catch (const std::invalid_argument&) {
        p.forecastability = 0.0;
        p.forecast_degenerate = true;
    }
    p.fft_mean = series.size() >= 2 ? fft_mean(series) : 0.0;
    try {
        p.perm_entropy = permutation_entropy(series);
    } catch (const std::invalid_argument&) {
        p.perm_entropy = 0.0;
    }
    try {
        const auto s = stl_seasonality(series);
        p.seasonality = s.value;
        p.seasonality_degenerate = s.period_unresolved;
    } catch (const std::invalid_argument&) {
        p.seasonality = 0.0;
        p.seasonality_degenerate = true;
    }
    try {
        p.mk_trend = mann_kendall(series);
    } catch (const std::invalid_argument&) {
        p.mk_trend = 0;
    }
    return p;
}

std::vector<RadvizPoint> radviz_project(const std::vector<StatsProfile>& profiles) {
    if (profiles.size() < 2)
        throw std::invalid_argument("radviz_project: need at least 2 profiles");
    constexpr int kDims = 6;
    const auto metric = [](const StatsProfile& p, int d) -> double {
        switch (d) {
            case 0: return p.adf_stat;
            case 1: return p.forecastability;
            case 2: return p.fft_mean;
            case 3: return p.perm_entropy;
            case 4: return p.seasonality;
            default: return (static_cast<double>(p.mk_trend) + 1.0) / 2.0;
        }
    };

    double mins[kDims], maxs[kDims];
    for (int d = 0; d < kDims; ++d) {
        mins[d] = metric(profiles[0], d);
        maxs[d] = mins[d];
        for (const auto& p : profiles) {
            mins[d] = std::min(mins[d], metric(p, d));
            maxs[d] = std::max(maxs[d], metric(p, d));
        }
    }

    double ax[kDims], ay[kDims];
    for (int d = 0; d < kDims; ++d) {
        const double ang = 2.0 * kPi * d / kDims;
        ax[d] = std::cos(ang);
        ay[d] = std::sin(ang);
    }

    std::vector<RadvizPoint> out;
    out.reserve(profiles.size());
    for (const auto& p : profiles) {
        double sx = 0.0, sy = 0.0, sw = 0.0;
        for (int d = 0; d < kDims; ++d) {
            const double range = maxs[d] - mins[d];
            const double w = range > 0.0 ? (metric(p, d) - mins[d]) / range : 0.0;
            sx += w * ax[d];
            sy += w * ay[d];
            sw += w;
        }
        if (sw <= 0.0) {
            out.push_back(RadvizPoint{0.0, 0.0});
        } else {
            out.push_back(RadvizPoint{sx / sw, sy / sw});
        }
    }
    return out;
}

}  // namespace s2gen
