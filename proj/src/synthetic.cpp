#include "nml/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "nml/csv.hpp"
#include "nml/dates.hpp"
#include "nml/errors.hpp"
#include "nml/messages.hpp"
#include "nml/rng.hpp"

namespace nml {

namespace {

namespace fs = std::filesystem;
constexpr double kTwoPi = 6.283185307179586476925287;

// Template bodies per stance; each scores exactly its stance under the
// shipped lexicon.
const std::vector<std::vector<std::string>>& stance_bodies() {
    static const std::vector<std::vector<std::string>> bodies{
        // -2
        {"fed must hike aggressively into year end",
         "expect 100bps and more tightening ahead",
         "inflation fight demands aggressive rate hikes now"},
        // -1
        {"another rate hike looks likely",
         "fed stays restrictive for now",
         "leaning toward a hike at the next meeting"},
        // 0
        {"watching the fomc decision today",
         "markets quiet ahead of the statement",
         "powell speaks later this afternoon",
         "cpi print lands tomorrow morning",
         "positioning unchanged into the meeting"},
        // +1
        {"fed should cut soon",
         "a pause looks sensible here",
         "easing would help the labor market"},
        // +2
        {"time for qe and deep rate cuts",
         "aggressive easing is overdue, cut hard",
         "stimulus now, big cuts and quantitative easing"},
    };
    return bodies;
}

struct WeeklyDraws {
    std::vector<double> values; // transformed-domain series
};

std::vector<double> ar1(Rng& rng, int n, double phi, double sd, double mean = 0.0) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double x = mean;
    for (int t = 0; t < n; ++t) {
        x = mean + phi * (x - mean) + sd * rng.normal();
        v[static_cast<std::size_t>(t)] = x;
    }
    return v;
}

std::vector<double> clip(std::vector<double> v, double lo, double hi) {
    for (double& x : v) x = std::clamp(x, lo, hi);
    return v;
}

void write_weekly_csv(const std::string& path, Date start, const std::vector<double>& levels) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "date,value\n";
    for (std::size_t i = 0; i < levels.size(); ++i)
        out << to_iso(start + static_cast<int>(7 * i)) << ',' << csv::format_double(levels[i])
            << '\n';
}

// Business-day rows; the Friday value is exact, Monday-Thursday interpolate
// geometrically with a small deterministic wiggle.
void write_daily_csv(const std::string& path, Date start_friday,
                     const std::vector<double>& levels, Rng& rng) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "date,value\n";
    for (std::size_t w = 0; w < levels.size(); ++w) {
        Date friday = start_friday + static_cast<int>(7 * w);
        double prev = w == 0 ? levels[0] : levels[w - 1];
        for (int d = 4; d >= 1; --d) {
            double frac = (5.0 - d) / 5.0;
            double v = prev * std::pow(levels[w] / prev, frac) *
                       std::exp(0.002 * rng.normal());
            out << to_iso(friday - d) << ',' << csv::format_double(v) << '\n';
        }
        out << to_iso(friday) << ',' << csv::format_double(levels[w]) << '\n';
    }
}

// Constant within each week so a weekly average recovers the value exactly.
void write_daily_constant_csv(const std::string& path, Date start_friday,
                              const std::vector<double>& levels) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "date,value\n";
    for (std::size_t w = 0; w < levels.size(); ++w) {
        Date friday = start_friday + static_cast<int>(7 * w);
        for (int d = 4; d >= 0; --d)
            out << to_iso(friday - d) << ',' << csv::format_double(levels[w]) << '\n';
    }
}

std::vector<double> integrate_log_returns(const std::vector<double>& r, double base) {
    std::vector<double> levels(r.size());
    double acc = std::log(base);
    levels[0] = base; // the first week's return is implicitly dropped
    for (std::size_t t = 1; t < r.size(); ++t) {
        acc += r[t];
        levels[t] = std::exp(acc);
    }
    return levels;
}

std::vector<double> integrate_growth(const std::vector<double>& g, double base) {
    std::vector<double> levels(g.size());
    levels[0] = base;
    for (std::size_t t = 1; t < g.size(); ++t) levels[t] = levels[t - 1] * (1.0 + g[t]);
    return levels;
}

} // namespace

const std::vector<std::string>& synthetic_series_names() {
    static const std::vector<std::string> names{
        "Btc",       "MPE",       "NewsSent",     "PolUncert", "SP500",
        "Brent",     "Gold",      "HighYield",    "GeopolRisk", "VIX",
        "USDollar",  "Infect",    "JoblessClaim", "ExchRate",  "FFR",
        "5yInflExp", "GgleInfl",  "GgleReces",    "GgleClimate"};
    return names;
}

SyntheticOutput gen_synthetic(const SyntheticSpec& spec, const std::string& out_dir) {
    if (spec.weeks < 120) throw DataError("gen_synthetic: need at least 120 weeks");
    const int n = spec.weeks;
    const Date start = make_date(2014, 9, 19); // a Friday

    fs::create_directories(out_dir);
    fs::create_directories(fs::path(out_dir) / "macro");

    SyntheticOutput out;
    out.macro_dir = (fs::path(out_dir) / "macro").string();

    // ---- messages and the index ---------------------------------------
    Rng msg_rng = Rng::substream(spec.seed, "messages");
    std::vector<RawMessage> messages;
    std::vector<double> mpe(static_cast<std::size_t>(n), 0.0);
    std::vector<double> target_mpe = clip(ar1(msg_rng, n, 0.75, 0.06), -0.6, 0.6);

    const auto& bodies = stance_bodies();
    int msg_id = 0;
    for (int w = 0; w < n; ++w) {
        int count = std::max(1, msg_rng.poisson(spec.messages_per_week));
        double tilt = 2.2 * target_mpe[static_cast<std::size_t>(w)];
        double wsum = 0.0, wssum = 0.0;
        for (int k = 0; k < count; ++k) {
            // Mostly neutral corpus with a stance tilt that tracks the target.
            int stance = 0;
            if (msg_rng.uniform() < 0.28) {
                double p[5];
                double z = 0.0;
                for (int s = -2; s <= 2; ++s) {
                    p[s + 2] = std::exp(tilt * s - 0.8 * std::abs(s));
                    z += p[s + 2];
                }
                double u = msg_rng.uniform() * z, acc = 0.0;
                for (int s = -2; s <= 2; ++s) {
                    acc += p[s + 2];
                    if (u < acc) {
                        stance = s;
                        break;
                    }
                }
            }
            RawMessage m;
            m.id = "m" + std::to_string(++msg_id);
            // Spread across Monday..Friday of the week.
            Date d = start + 7 * w - static_cast<int>(msg_rng.uniform_int(0, 4));
            m.date = d;
            m.created_at = to_iso(d) + "T" +
                           std::to_string(10 + msg_rng.uniform_int(0, 7)) + ":00:00Z";
            const auto& pool = bodies[static_cast<std::size_t>(stance + 2)];
            m.body = pool[static_cast<std::size_t>(msg_rng.uniform_int(
                0, static_cast<std::int64_t>(pool.size()) - 1))];
            m.likes = msg_rng.poisson(0.3 + 0.8 * std::abs(stance));
            m.reshares = msg_rng.poisson(0.05);
            messages.push_back(m);
            double weight = 1.0 + static_cast<double>(m.likes + m.reshares);
            wsum += weight;
            wssum += weight * stance;
        }
        mpe[static_cast<std::size_t>(w)] = wssum / wsum; // exact weekly index value
    }
    out.message_count = static_cast<int>(messages.size());
    out.messages_path = (fs::path(out_dir) / "messages.jsonl").string();
    write_messages_jsonl(out.messages_path, messages);

    // ---- macro system in the transformed domain ------------------------
    SyntheticTruth truth;
    Rng macro_rng = Rng::substream(spec.seed, "macro");

    // Mid-frequency narrowband cycle carried by the mid predictor.
    std::vector<double> mid(static_cast<std::size_t>(n), 0.0);
    {
        const double rho = 0.96, omega0 = 0.085;
        double a1 = 2.0 * rho * std::cos(kTwoPi * omega0), a2 = -rho * rho;
        double x1 = 0.0, x2 = 0.0;
        for (int t = 0; t < n; ++t) {
            double x = a1 * x1 + a2 * x2 + 0.01 * macro_rng.normal();
            mid[static_cast<std::size_t>(t)] = x;
            x2 = x1;
            x1 = x;
        }
    }
    std::vector<double> geo(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
        geo[static_cast<std::size_t>(t)] = mid[static_cast<std::size_t>(t)] + 0.02 * macro_rng.normal();

    // Target returns: index lags 3-5, the mid band at lag 2, a slow cycle,
    // and idiosyncratic noise.
    std::vector<double> btc(static_cast<std::size_t>(n), 0.0);
    for (int t = 0; t < n; ++t) {
        double v = 0.02 * std::sin(kTwoPi * 0.004 * t);
        for (std::size_t j = 0; j < truth.mpe_lags.size(); ++j) {
            int lag = truth.mpe_lags[j];
            if (t >= lag)
                v += truth.mpe_coefficients[j] * mpe[static_cast<std::size_t>(t - lag)];
        }
        if (t >= truth.mid_lag)
            v += truth.mid_coefficient * mid[static_cast<std::size_t>(t - truth.mid_lag)];
        v += 0.015 * macro_rng.normal();
        btc[static_cast<std::size_t>(t)] = v;
    }

    // Remaining predictors: independent processes at roughly realistic scales.
    std::map<std::string, std::vector<double>> transformed;
    transformed["Btc"] = btc;
    transformed["GeopolRisk"] = clip(geo, -0.5, 2.5);
    transformed["NewsSent"] = clip(ar1(macro_rng, n, 0.85, 0.09), -0.7, 0.4);
    transformed["PolUncert"] = clip(ar1(macro_rng, n, 0.2, 0.33), -0.6, 2.2);
    transformed["SP500"] = ar1(macro_rng, n, 0.05, 0.02);
    transformed["Brent"] = clip(ar1(macro_rng, n, 0.1, 0.05), -0.5, 0.5);
    transformed["Gold"] = ar1(macro_rng, n, 0.05, 0.02);
    transformed["HighYield"] = clip(ar1(macro_rng, n, 0.15, 0.01), -0.5, 0.5);
    transformed["VIX"] = clip(ar1(macro_rng, n, 0.25, 0.17), -0.5, 1.5);
    transformed["USDollar"] = clip(ar1(macro_rng, n, 0.1, 0.01), -0.5, 0.5);
    transformed["JoblessClaim"] = ar1(macro_rng, n, 0.3, 0.1);
    transformed["ExchRate"] = ar1(macro_rng, n, 0.1, 0.008);
    transformed["Infect"] = clip(ar1(macro_rng, n, 0.9, 2.5, 6.0), 0.0, 70.0);
    transformed["5yInflExp"] = clip(ar1(macro_rng, n, 0.97, 0.05, 2.05), 1.1, 2.7);
    transformed["GgleInfl"] = clip(ar1(macro_rng, n, 0.9, 3.5, 20.0), 8.0, 100.0);
    transformed["GgleReces"] = clip(ar1(macro_rng, n, 0.85, 2.5, 8.5), 2.0, 100.0);
    transformed["GgleClimate"] = clip(ar1(macro_rng, n, 0.7, 1.0, 2.5), 0.4, 100.0);

    // Policy-rate path: plateaus with ramps, so rate regimes have all three states.
    {
        std::vector<double> ffr(static_cast<std::size_t>(n));
        double level = 0.10;
        int t = 0;
        int phase = 0;
        Rng ffr_rng = Rng::substream(spec.seed, "ffr");
        while (t < n) {
            int hold = static_cast<int>(ffr_rng.uniform_int(20, 60));
            double step = 0.0;
            if (phase % 4 == 1) step = 0.25;   // hiking
            if (phase % 4 == 3) step = -0.25;  // cutting
            for (int k = 0; k < hold && t < n; ++k, ++t) {
                if (step != 0.0 && k % 6 == 5) level = std::clamp(level + step, 0.05, 5.4);
                ffr[static_cast<std::size_t>(t)] = level;
            }
            ++phase;
        }
        transformed["FFR"] = ffr;
    }

    // ---- emit raw files -------------------------------------------------
    struct Emit {
        const char* name;
        const char* kind; // transform of Table 9
        const char* freq; // daily | daily_const | weekly
        double base;
    };
    const Emit emits[] = {
        {"Btc", "log_return", "daily", 400.0},
        {"SP500", "log_return", "daily", 2000.0},
        {"Gold", "log_return", "weekly", 1200.0},
        {"JoblessClaim", "log_diff", "weekly", 300000.0},
        {"ExchRate", "log_diff", "daily_const", 100.0},
        {"HighYield", "growth_rate", "weekly", 1500.0},
        {"Brent", "growth_rate", "weekly", 90.0},
        {"VIX", "growth_rate", "weekly", 18.0},
        {"PolUncert", "growth_rate", "weekly", 120.0},
        {"GeopolRisk", "growth_rate", "daily_const", 100.0},
        {"USDollar", "growth_rate", "weekly", 95.0},
        {"NewsSent", "level", "daily_const", 0.0},
        {"Infect", "level", "daily_const", 0.0},
        {"FFR", "level", "weekly", 0.0},
        {"5yInflExp", "level", "weekly", 0.0},
        {"GgleInfl", "level", "weekly", 0.0},
        {"GgleReces", "level", "weekly", 0.0},
        {"GgleClimate", "level", "weekly", 0.0},
    };

    Rng daily_rng = Rng::substream(spec.seed, "daily");
    for (const Emit& e : emits) {
        const std::vector<double>& series = transformed.at(e.name);
        std::vector<double> levels;
        std::string kind = e.kind;
        if (kind == "log_return" || kind == "log_diff")
            levels = integrate_log_returns(series, e.base);
        else if (kind == "growth_rate")
            levels = integrate_growth(series, e.base);
        else
            levels = series;

        std::string path = (fs::path(out.macro_dir) / (std::string(e.name) + ".csv")).string();
        std::string freq = e.freq;
        if (freq == "daily")
            write_daily_csv(path, start, levels, daily_rng);
        else if (freq == "daily_const")
            write_daily_constant_csv(path, start, levels);
        else
            write_weekly_csv(path, start, levels);
        out.macro_files.push_back(path);
    }

    // ---- announcement dates (midweek, roughly every six weeks) ----------
    {
        out.fomc_path = (fs::path(out_dir) / "fomc_dates.csv").string();
        std::ofstream f(out.fomc_path);
        if (!f) throw DataError("cannot write " + out.fomc_path);
        f << "date\n";
        Rng ev_rng = Rng::substream(spec.seed, "events");
        for (int w = 8; w < n - 8; w += static_cast<int>(ev_rng.uniform_int(5, 8)))
            f << to_iso(start + 7 * w - 2) << '\n'; // Wednesdays
    }

    // ---- truth record ----------------------------------------------------
    {
        nlohmann::json j;
        j["seed"] = spec.seed;
        j["weeks"] = spec.weeks;
        j["mpe_lags"] = truth.mpe_lags;
        j["mpe_coefficients"] = truth.mpe_coefficients;
        j["mid_predictor"] = truth.mid_predictor;
        j["mid_lag"] = truth.mid_lag;
        j["mid_coefficient"] = truth.mid_coefficient;
        j["message_count"] = out.message_count;
        out.truth_path = (fs::path(out_dir) / "truth.json").string();
        std::ofstream f(out.truth_path);
        f << j.dump(2) << '\n';
    }
    return out;
}

} // namespace nml
