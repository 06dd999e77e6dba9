#include "s2gen/imputeprep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace s2gen {

MaskedSeries point_mask(const std::vector<double>& series, double ratio, Rng& rng) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw std::invalid_argument("point_mask: ratio must be in (0, 1)");
    const std::size_t n = series.size();
    const std::size_t k = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(n - i));
        std::swap(idx[i], idx[j]);
    }

    MaskedSeries ms;
    ms.original = series;
    ms.values = series;
    ms.miss_mask.assign(n, false);
    for (std::size_t i = 0; i < k; ++i) {
        ms.miss_mask[idx[i]] = true;
        ms.values[idx[i]] = std::numeric_limits<double>::quiet_NaN();
    }
    return ms;
}

std::vector<double> pre_interpolate(const MaskedSeries& ms) {
    const std::size_t n = ms.values.size();
    if (n == 0) throw std::invalid_argument("pre_interpolate: empty series");
    std::vector<bool> missing = ms.miss_mask;
    if (std::all_of(missing.begin(), missing.end(), [](bool b) { return b; }))
        throw std::invalid_argument("pre_interpolate: all values missing");

    std::vector<double> values = ms.values;
    bool any_missing = std::any_of(missing.begin(), missing.end(), [](bool b) { return b; });
    while (any_missing) {
        const std::vector<bool> snapshot = missing;
        const std::vector<double> prev = values;
        any_missing = false;
        for (std::size_t t = 0; t < n; ++t) {
            if (!snapshot[t]) continue;
            const bool left_ok = t > 0 && !snapshot[t - 1];
            const bool right_ok = t + 1 < n && !snapshot[t + 1];
            if (left_ok && right_ok) {
                values[t] = 0.5 * (prev[t - 1] + prev[t + 1]);
                missing[t] = false;
            } else if (right_ok) {
                values[t] = prev[t + 1];
                missing[t] = false;
            } else if (left_ok) {
                values[t] = prev[t - 1];
                missing[t] = false;
            } else {
                any_missing = true;  // interior of a gap; next pass
            }
        }
    }
    return values;
}

}  // namespace s2gen
