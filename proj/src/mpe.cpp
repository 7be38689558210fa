#include "nml/mpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "nml/csv.hpp"
#include "nml/errors.hpp"

namespace nml {

MpeSeries build_mpe_weekly(const std::vector<ClassifiedMessage>& classified) {
    if (classified.empty()) throw DataError("build_mpe_weekly: no messages");

    Date first = classified[0].message.date, last = first;
    for (const auto& c : classified) {
        first = std::min(first, c.message.date);
        last = std::max(last, c.message.date);
    }
    const Date start = first.week_friday();
    const std::size_t weeks = static_cast<std::size_t>((last.week_friday() - start) / 7) + 1;

    std::vector<double> wsum(weeks, 0.0), wssum(weeks, 0.0);
    std::vector<int> counts(weeks, 0);
    for (const auto& c : classified) {
        if (!StanceScore::valid(c.stance))
            throw DataError("build_mpe_weekly: stance outside scale for id " + c.message.id);
        std::size_t w = static_cast<std::size_t>((c.message.date.week_friday() - start) / 7);
        double weight = 1.0 + static_cast<double>(c.message.likes + c.message.reshares);
        wsum[w] += weight;
        wssum[w] += weight * c.stance;
        counts[w] += 1;
    }

    std::vector<double> values(weeks, std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> missing(weeks, true);
    for (std::size_t w = 0; w < weeks; ++w) {
        if (counts[w] > 0) {
            values[w] = wssum[w] / wsum[w];
            missing[w] = false;
        }
    }
    return MpeSeries{WeeklySeries("MPE", start, std::move(values), std::move(missing)),
                     std::move(counts), std::move(wsum)};
}

std::vector<StanceBreakdownRow> stance_breakdown(const std::vector<ClassifiedMessage>& classified) {
    std::map<int, std::array<double, 3>> acc; // stance -> {count, likes, reshares}
    for (int s = -2; s <= 2; ++s) acc[s] = {0, 0, 0};
    for (const auto& c : classified) {
        acc[c.stance][0] += 1;
        acc[c.stance][1] += static_cast<double>(c.message.likes);
        acc[c.stance][2] += static_cast<double>(c.message.reshares);
    }
    const double total = static_cast<double>(classified.size());
    std::vector<StanceBreakdownRow> rows;
    for (int s = -2; s <= 2; ++s) {
        const auto& a = acc[s];
        StanceBreakdownRow r;
        r.stance = s;
        r.count = static_cast<std::size_t>(a[0]);
        r.share_pct = total > 0 ? 100.0 * a[0] / total : 0.0;
        r.avg_likes = a[0] > 0 ? a[1] / a[0] : 0.0;
        r.avg_reshares = a[0] > 0 ? a[2] / a[0] : 0.0;
        r.avg_engagement = r.avg_likes + r.avg_reshares;
        rows.push_back(r);
    }
    return rows;
}

EventStudy event_study(const MpeSeries& mpe, const std::vector<Date>& events, int half_window) {
    if (half_window < 1) throw DataError("event_study: half_window must be >= 1");
    const WeeklySeries& s = mpe.series;

    EventStudy out;
    out.half_window = half_window;
    const int width = 2 * half_window + 1;

    struct Acc {
        std::vector<double> sum, sumsq;
        std::vector<int> n;
        int events = 0;
    };
    std::map<Regime, Acc> acc;

    for (Date ev : events) {
        Date anchor = ev.week_friday();
        auto idx = s.index_of(anchor);
        if (!idx || static_cast<int>(*idx) < half_window ||
            *idx + static_cast<std::size_t>(half_window) >= s.size()) {
            out.dropped_events += 1;
            continue;
        }
        // Pre-announcement mean over t-5..t-1 sets the group.
        double pre_sum = 0.0;
        int pre_n = 0;
        for (int k = 5; k >= 1; --k) {
            std::size_t i = *idx - static_cast<std::size_t>(k);
            if (!s.is_missing(i)) {
                pre_sum += s.value(i);
                ++pre_n;
            }
        }
        if (pre_n == 0) {
            out.dropped_events += 1;
            continue;
        }
        Regime group = mpe_regime_of(pre_sum / pre_n);

        Acc& a = acc[group];
        if (a.sum.empty()) {
            a.sum.assign(width, 0.0);
            a.sumsq.assign(width, 0.0);
            a.n.assign(width, 0);
        }
        a.events += 1;
        for (int k = -half_window; k <= half_window; ++k) {
            std::size_t i = static_cast<std::size_t>(static_cast<long>(*idx) + k);
            if (s.is_missing(i)) continue;
            int slot = k + half_window;
            a.sum[slot] += s.value(i);
            a.sumsq[slot] += s.value(i) * s.value(i);
            a.n[slot] += 1;
        }
    }

    if (acc.empty()) throw DataError("event_study: no usable events");

    for (auto& [regime, a] : acc) {
        EventStudyGroup g;
        g.regime = regime;
        g.event_count = a.events;
        g.mean_path.assign(width, std::numeric_limits<double>::quiet_NaN());
        g.sd_path.assign(width, std::numeric_limits<double>::quiet_NaN());
        g.n_path = a.n;
        for (int k = 0; k < width; ++k) {
            if (a.n[k] == 0) continue;
            double mean = a.sum[k] / a.n[k];
            double var = a.sumsq[k] / a.n[k] - mean * mean;
            g.mean_path[k] = mean;
            g.sd_path[k] = std::sqrt(std::max(0.0, var));
        }
        out.groups.push_back(std::move(g));
    }
    return out;
}

std::vector<Date> read_event_dates_csv(const std::string& path) {
    csv::Table t = csv::read_file(path);
    int dc = t.column("date");
    if (dc < 0) throw DataError("event dates CSV " + path + ": expected header 'date'");
    std::vector<Date> out;
    for (const auto& row : t.rows) out.push_back(parse_date(row[dc]));
    return out;
}

} // namespace nml
