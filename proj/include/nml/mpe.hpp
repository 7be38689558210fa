#ifndef NML_MPE_HPP
#define NML_MPE_HPP

#include <array>
#include <vector>

#include "nml/messages.hpp"
#include "nml/regimes.hpp"
#include "nml/series.hpp"

namespace nml {

/// Weekly engagement-weighted stance index plus per-week support.
struct MpeSeries {
    WeeklySeries series;             // named "MPE", values in [-2, +2]
    std::vector<int> counts;         // messages per week
    std::vector<double> weight_sums; // total engagement weight per week
};

/// MPE_w = sum_i w_i s_i / sum_i w_i over the week's messages, with
/// w_i = 1 + likes_i + reshares_i. Weeks without messages are missing.
MpeSeries build_mpe_weekly(const std::vector<ClassifiedMessage>& classified);

/// Per-category corpus summary (share, mean likes/reshares/engagement).
struct StanceBreakdownRow {
    int stance;
    std::size_t count;
    double share_pct;
    double avg_likes;
    double avg_reshares;
    double avg_engagement;
};
std::vector<StanceBreakdownRow> stance_breakdown(const std::vector<ClassifiedMessage>& classified);

struct EventStudyGroup {
    Regime regime; // Hawkish / NeutralRegime / Dovish
    int event_count = 0;
    std::vector<double> mean_path; // index 0 == t-half_window
    std::vector<double> sd_path;
    std::vector<int> n_path; // observations behind each point
};

struct EventStudy {
    int half_window = 6;
    std::vector<EventStudyGroup> groups; // only populated groups
    int dropped_events = 0;              // window exceeded the series span
};

/// Event study around announcement dates. Events snap to their week's Friday;
/// each is assigned a regime from the mean index level over t-5..t-1 and the
/// +/-0.01 thresholds; output is the per-group mean/sd path over the window.
EventStudy event_study(const MpeSeries& mpe, const std::vector<Date>& events,
                       int half_window = 6);

std::vector<Date> read_event_dates_csv(const std::string& path);

} // namespace nml

#endif
