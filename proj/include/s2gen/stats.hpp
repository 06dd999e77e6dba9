#ifndef S2GEN_STATS_HPP
#define S2GEN_STATS_HPP

#include <optional>
#include <span>
#include <vector>

#include "s2gen/common.hpp"

namespace s2gen {

/// Six-dimension characterization of one series (plus the ADF p-value).
struct StatsProfile {
    double adf_stat = 0.0;
    double adf_p = 1.0;
    double forecastability = 0.0;
    double fft_mean = 0.0;
    double perm_entropy = 0.0;
    double seasonality = 0.0;
    int mk_trend = 0;

    // degenerate-input metrics fall back to the defaults above and are flagged
    bool adf_degenerate = false;
    bool forecast_degenerate = false;
    bool seasonality_degenerate = false;
};

struct RadvizPoint {
    double x = 0.0;
    double y = 0.0;
};

struct AdfResult {
    double stat;
    double p;
    int lags;
};

/// Augmented Dickey-Fuller test, constant term, fixed lag order
/// floor(12 * (L/100)^(1/4)). p-value from the MacKinnon approximate
/// asymptotic surface for the constant-only case.
AdfResult adf_test(std::span<const double> series);

/// MacKinnon 1994 approximate asymptotic p-value, constant-only regression.
double mackinnon_p_const(double stat);

/// 1 - H(periodogram)/ln(#bins) of the standardized series, DC excluded.
double forecastability(std::span<const double> series);

/// Mean periodogram power |X_k|^2 / L over positive frequencies.
double fft_mean(std::span<const double> series);

/// Shannon entropy of ordinal patterns of consecutive m-tuples (delay tau);
/// ties rank by index order.
double permutation_entropy(std::span<const double> series, int m = 3, int tau = 1);

struct StlResult {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> remainder;
    int period = 0;
};

/// STL decomposition: 2 inner iterations, 0 robustness iterations, seasonal
/// loess span 7 (degree 0), trend span = next odd >= 1.5*period/(1 - 1.5/7).
StlResult stl_decompose(std::span<const double> series, int period);

struct SeasonalityResult {
    double value = 0.0;
    bool period_unresolved = false;
};

/// max{0, 1 - Var(R)/Var(S+R)}. When `period` is absent it is resolved from
/// the periodogram peak, round(L / k*), clamped to [2, L/2].
SeasonalityResult stl_seasonality(std::span<const double> series,
                                  std::optional<int> period = std::nullopt);

/// Mann-Kendall trend test with tie-corrected variance and continuity
/// correction. Returns -1, 0 or 1 at significance level alpha.
int mann_kendall(std::span<const double> series, double alpha = 0.05);

/// Raw Mann-Kendall S statistic (pairwise sign sum).
long long mann_kendall_s(std::span<const double> series);

/// Periodogram |X_k|^2 / L at k = 1..floor(L/2).
std::vector<double> periodogram(std::span<const double> series);

/// All six metrics with defaults; degenerate metrics fall back to flagged
/// defaults (adf_p = 1, forecastability = 0, seasonality = 0).
StatsProfile profile_series(std::span<const double> series);

/// Radviz projection: six anchors equally spaced on the unit circle in the
/// order (adf_stat, forecastability, fft_mean, perm_entropy, seasonality,
/// mk_trend); metrics min-max normalized across the input set, mk_trend
/// mapped through (v+1)/2 first.
std::vector<RadvizPoint> radviz_project(const std::vector<StatsProfile>& profiles);

}  // namespace s2gen

#endif
