#ifndef S2GEN_IMPUTEPREP_HPP
#define S2GEN_IMPUTEPREP_HPP

#include <vector>

#include "s2gen/common.hpp"
#include "s2gen/rng.hpp"

namespace s2gen {

struct MaskedSeries {
    std::vector<double> values;     // NaN at missing positions
    std::vector<bool> miss_mask;    // true exactly where values are missing
    std::vector<double> original;
};

/// Marks exactly floor(ratio * L) uniformly chosen positions missing.
MaskedSeries point_mask(const std::vector<double>& series, double ratio, Rng& rng);

/// Neighbor-average gap filling: both neighbors observed -> average, only
/// right -> copy right, only left -> copy left. Runs of missing values are
/// resolved by repeating the pass (each pass reads the mask state from the
/// start of the pass) until nothing is missing.
std::vector<double> pre_interpolate(const MaskedSeries& ms);

}  // namespace s2gen

#endif
