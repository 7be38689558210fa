#include "nml/regimes.hpp"

namespace nml {

const char* to_string(Regime r) {
    switch (r) {
        case Regime::Dovish: return "Dovish";
        case Regime::NeutralRegime: return "Neutral";
        case Regime::Hawkish: return "Hawkish";
        case Regime::Falling: return "Falling";
        case Regime::Flat: return "Flat";
        case Regime::Rising: return "Rising";
    }
    return "?";
}

Regime mpe_regime_of(double level) {
    if (level > kRegimeBand) return Regime::Dovish;
    if (level < -kRegimeBand) return Regime::Hawkish;
    return Regime::NeutralRegime;
}

RegimeLabels partition_regime(const WeeklySeries& s, RegimeMode mode) {
    RegimeLabels out;
    if (mode == RegimeMode::MpeMode) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s.is_missing(i)) continue;
            out.dates.push_back(s.date(i));
            out.labels.push_back(mpe_regime_of(s.value(i)));
        }
    } else {
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (s.is_missing(i) || s.is_missing(i - 1)) continue;
            double d = s.value(i) - s.value(i - 1);
            out.dates.push_back(s.date(i));
            out.labels.push_back(d > 0 ? Regime::Rising : d < 0 ? Regime::Falling : Regime::Flat);
        }
    }
    return out;
}

} // namespace nml
