#include "nml/series.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "nml/csv.hpp"
#include "nml/errors.hpp"

namespace nml {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

const char* to_string(TransformKind k) {
    switch (k) {
        case TransformKind::Level: return "level";
        case TransformKind::LogReturn: return "log_return";
        case TransformKind::GrowthRate: return "growth_rate";
        case TransformKind::LogDiff: return "log_diff";
        case TransformKind::Diff1: return "diff1";
        case TransformKind::Diff2: return "diff2";
    }
    return "?";
}

TransformKind transform_from_string(const std::string& s) {
    if (s == "level") return TransformKind::Level;
    if (s == "log_return") return TransformKind::LogReturn;
    if (s == "growth_rate") return TransformKind::GrowthRate;
    if (s == "log_diff") return TransformKind::LogDiff;
    if (s == "diff1") return TransformKind::Diff1;
    if (s == "diff2") return TransformKind::Diff2;
    throw DataError("unknown transform kind: " + s);
}

WeeklySeries::WeeklySeries(std::string name, Date start_friday, std::vector<double> values,
                           std::vector<bool> missing)
    : name_(std::move(name)), start_(start_friday), values_(std::move(values)),
      missing_(std::move(missing)) {
    if (name_.empty()) throw DataError("WeeklySeries: name must be nonempty");
    if (values_.empty()) throw DataError("WeeklySeries '" + name_ + "': no values");
    if (missing_.size() != values_.size())
        throw DataError("WeeklySeries '" + name_ + "': mask/value length mismatch");
    if (!start_.is_friday())
        throw DataError("WeeklySeries '" + name_ + "': start date " + to_iso(start_) +
                        " is not a Friday");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (missing_[i]) {
            values_[i] = kNaN;
        } else if (!std::isfinite(values_[i])) {
            throw DataError("WeeklySeries '" + name_ + "': non-finite value at " +
                            to_iso(date(i)));
        }
    }
}

WeeklySeries::WeeklySeries(std::string name, Date start_friday, std::vector<double> values)
    : WeeklySeries(std::move(name), start_friday, values,
                   std::vector<bool>(values.size(), false)) {}

std::optional<std::size_t> WeeklySeries::index_of(Date d) const {
    int diff = d - start_;
    if (diff < 0 || diff % 7 != 0) return std::nullopt;
    std::size_t i = static_cast<std::size_t>(diff / 7);
    if (i >= size()) return std::nullopt;
    return i;
}

std::size_t WeeklySeries::count_present() const {
    std::size_t n = 0;
    for (bool m : missing_)
        if (!m) ++n;
    return n;
}

std::vector<double> WeeklySeries::present_values() const {
    std::vector<double> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i)
        if (!missing_[i]) out.push_back(values_[i]);
    return out;
}

WeeklySeries WeeklySeries::renamed(std::string new_name) const {
    WeeklySeries copy = *this;
    copy.name_ = std::move(new_name);
    if (copy.name_.empty()) throw DataError("WeeklySeries: name must be nonempty");
    return copy;
}

WeeklySeries align_weekly(const std::vector<Observation>& raw, AlignRule rule,
                          std::string name) {
    if (raw.empty()) throw DataError("align_weekly: empty input");
    for (std::size_t i = 1; i < raw.size(); ++i)
        if (raw[i].date < raw[i - 1].date)
            throw DataError("align_weekly: dates not sorted at row " + std::to_string(i));

    const Date first_friday = raw.front().date.week_friday();
    const Date last_friday = raw.back().date.week_friday();
    const std::size_t weeks = static_cast<std::size_t>((last_friday - first_friday) / 7) + 1;

    std::vector<double> values(weeks, kNaN);
    std::vector<bool> missing(weeks, true);
    std::vector<double> sums(weeks, 0.0);
    std::vector<std::size_t> counts(weeks, 0);

    for (const auto& obs : raw) {
        std::size_t w = static_cast<std::size_t>((obs.date.week_friday() - first_friday) / 7);
        if (rule == AlignRule::LastValue) {
            values[w] = obs.value; // input sorted, so the last write wins
            missing[w] = false;
        } else {
            sums[w] += obs.value;
            counts[w] += 1;
        }
    }
    if (rule == AlignRule::WeekMean) {
        for (std::size_t w = 0; w < weeks; ++w) {
            if (counts[w] > 0) {
                values[w] = sums[w] / static_cast<double>(counts[w]);
                missing[w] = false;
            }
        }
    }
    return WeeklySeries(std::move(name), first_friday, std::move(values), std::move(missing));
}

WeeklySeries transform(const WeeklySeries& s, TransformKind kind) {
    if (kind == TransformKind::Level) return s;

    const int drop = kind == TransformKind::Diff2 ? 2 : 1;
    if (s.size() <= static_cast<std::size_t>(drop))
        throw DataError("transform(" + std::string(to_string(kind)) + "): series '" + s.name() +
                        "' too short");

    const bool wants_log = kind == TransformKind::LogReturn || kind == TransformKind::LogDiff;
    if (wants_log) {
        for (std::size_t i = 0; i < s.size(); ++i)
            if (!s.is_missing(i) && s.value(i) <= 0.0)
                throw DataError("transform(" + std::string(to_string(kind)) + "): nonpositive value in '" +
                                s.name() + "' at " + to_iso(s.date(i)));
    }

    if (kind == TransformKind::Diff2) {
        WeeklySeries d1 = transform(s, TransformKind::Diff1);
        return transform(d1, TransformKind::Diff1);
    }

    std::vector<double> out(s.size() - 1, kNaN);
    std::vector<bool> miss(s.size() - 1, true);
    for (std::size_t t = 1; t < s.size(); ++t) {
        if (s.is_missing(t) || s.is_missing(t - 1)) continue;
        double cur = s.value(t), prev = s.value(t - 1);
        double v;
        switch (kind) {
            case TransformKind::LogReturn:
            case TransformKind::LogDiff: v = std::log(cur / prev); break;
            case TransformKind::GrowthRate: v = cur / prev - 1.0; break;
            case TransformKind::Diff1: v = cur - prev; break;
            default: v = cur;
        }
        out[t - 1] = v;
        miss[t - 1] = false;
    }
    return WeeklySeries(s.name(), s.date(1), std::move(out), std::move(miss));
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw DataError("percentile: empty sample");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    double pos = q * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo >= values.size() - 1) return values.back();
    double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

SummaryStats describe(std::vector<double> values) {
    if (values.empty()) throw DataError("describe: no non-missing values");
    const std::size_t n = values.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);

    SummaryStats st{};
    st.n = n;
    st.mean = mean;
    st.sd = std::sqrt(m2);
    // Degenerate samples keep comparable (zero) shape statistics.
    st.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    st.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;

    std::sort(values.begin(), values.end());
    st.min = values.front();
    st.max = values.back();
    auto interp = [&](double q) {
        double pos = q * static_cast<double>(n - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        if (lo >= n - 1) return values.back();
        double frac = pos - static_cast<double>(lo);
        return values[lo] + frac * (values[lo + 1] - values[lo]);
    };
    st.p5 = interp(0.05);
    st.p25 = interp(0.25);
    st.median = interp(0.50);
    st.p75 = interp(0.75);
    st.p95 = interp(0.95);
    return st;
}

SummaryStats describe(const WeeklySeries& s) { return describe(s.present_values()); }

void intersect_present(const WeeklySeries& a, const WeeklySeries& b,
                       std::vector<double>& out_a, std::vector<double>& out_b,
                       std::vector<Date>* out_dates) {
    out_a.clear();
    out_b.clear();
    if (out_dates) out_dates->clear();
    Date lo = std::max(a.start(), b.start());
    Date hi = std::min(a.end_date(), b.end_date());
    for (Date d = lo.week_friday(); d <= hi; d = d + 7) {
        auto ia = a.index_of(d), ib = b.index_of(d);
        if (!ia || !ib) continue;
        if (a.is_missing(*ia) || b.is_missing(*ib)) continue;
        out_a.push_back(a.value(*ia));
        out_b.push_back(b.value(*ib));
        if (out_dates) out_dates->push_back(d);
    }
}

double pearson_corr(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DataError("pearson_corr: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw DataError("pearson_corr: need at least 3 overlapping observations");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw NumericError("pearson_corr: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

double pearson_corr(const WeeklySeries& a, const WeeklySeries& b) {
    std::vector<double> x, y;
    intersect_present(a, b, x, y);
    return pearson_corr(x, y);
}

std::vector<Observation> read_observations_csv(const std::string& path,
                                               std::vector<Date>* missing_dates) {
    csv::Table t = csv::read_file(path);
    int dc = t.column("date"), vc = t.column("value");
    if (dc < 0 || vc < 0)
        throw DataError("CSV " + path + ": expected header 'date,value'");
    std::vector<Observation> out;
    for (const auto& row : t.rows) {
        if (row.size() <= static_cast<std::size_t>(std::max(dc, vc)))
            throw DataError("CSV " + path + ": short row");
        Date d = parse_date(row[dc]);
        const std::string& v = row[vc];
        if (v.empty()) {
            if (missing_dates) missing_dates->push_back(d);
            continue;
        }
        out.push_back({d, std::stod(v)});
    }
    return out;
}

std::vector<WeeklySeries> read_panel_csv(const std::string& path) {
    csv::Table t = csv::read_file(path);
    if (t.header.empty() || t.header[0] != "date")
        throw DataError("panel CSV " + path + ": first column must be 'date'");
    if (t.rows.empty()) throw DataError("panel CSV " + path + ": no rows");
    const std::size_t ncols = t.header.size();
    Date start = parse_date(t.rows[0][0]);
    std::vector<std::vector<double>> vals(ncols - 1, std::vector<double>(t.rows.size()));
    std::vector<std::vector<bool>> miss(ncols - 1, std::vector<bool>(t.rows.size(), false));
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != ncols) throw DataError("panel CSV " + path + ": ragged row");
        Date d = parse_date(row[0]);
        if (d - start != static_cast<int>(7 * r))
            throw DataError("panel CSV " + path + ": dates not on a weekly grid at " + row[0]);
        for (std::size_t c = 1; c < ncols; ++c) {
            if (row[c].empty()) {
                miss[c - 1][r] = true;
            } else {
                vals[c - 1][r] = std::stod(row[c]);
            }
        }
    }
    std::vector<WeeklySeries> out;
    for (std::size_t c = 1; c < ncols; ++c)
        out.emplace_back(t.header[c], start, std::move(vals[c - 1]), std::move(miss[c - 1]));
    return out;
}

void write_panel_csv(const std::string& path, const std::vector<WeeklySeries>& series) {
    if (series.empty()) throw DataError("write_panel_csv: no series");
    Date start = series[0].start();
    std::size_t len = series[0].size();
    for (const auto& s : series)
        if (s.start() != start || s.size() != len)
            throw DataError("write_panel_csv: series grids differ ('" + s.name() + "')");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "date";
    for (const auto& s : series) out << ',' << csv::escape(s.name());
    out << '\n';
    for (std::size_t i = 0; i < len; ++i) {
        out << to_iso(series[0].date(i));
        for (const auto& s : series) {
            out << ',';
            if (!s.is_missing(i)) out << csv::format_double(s.value(i));
        }
        out << '\n';
    }
}

} // namespace nml
