#ifndef NML_REGIMES_HPP
#define NML_REGIMES_HPP

#include <string>
#include <vector>

#include "nml/series.hpp"

namespace nml {

/// Policy regime labels. Dovish/Neutral/Hawkish come from index levels,
/// Falling/Flat/Rising from the sign of first differences of a rate series.
enum class Regime { Dovish, NeutralRegime, Hawkish, Falling, Flat, Rising };

const char* to_string(Regime r);

enum class RegimeMode { MpeMode, RateMode };

/// Dead band around zero: |level| <= 0.01 counts as neutral.
constexpr double kRegimeBand = 0.01;

struct RegimeLabels {
    std::vector<Date> dates;
    std::vector<Regime> labels; // one per date, missing weeks skipped
};

/// MpeMode thresholds levels at +/-0.01; RateMode labels the sign of the first
/// difference (the first date drops out).
RegimeLabels partition_regime(const WeeklySeries& s, RegimeMode mode);

/// Label for a single level under the MPE thresholds.
Regime mpe_regime_of(double level);

} // namespace nml

#endif
