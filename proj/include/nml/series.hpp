#ifndef NML_SERIES_HPP
#define NML_SERIES_HPP

#include <optional>
#include <string>
#include <vector>

#include "nml/dates.hpp"

namespace nml {

/// A dated observation at native (daily/weekly/irregular) frequency.
struct Observation {
    Date date;
    double value;
};

enum class AlignRule { LastValue, WeekMean };

enum class TransformKind { Level, LogReturn, GrowthRate, LogDiff, Diff1, Diff2 };

const char* to_string(TransformKind k);
TransformKind transform_from_string(const std::string& s);

/// Named series on a week-ending-Friday grid. Storing the first Friday plus a
/// dense value vector makes the 7-day spacing invariant structural. Missing
/// weeks carry NaN and a set mask bit.
class WeeklySeries {
public:
    WeeklySeries() = default;
    WeeklySeries(std::string name, Date start_friday, std::vector<double> values,
                 std::vector<bool> missing);
    /// All-present convenience constructor.
    WeeklySeries(std::string name, Date start_friday, std::vector<double> values);

    const std::string& name() const { return name_; }
    std::size_t size() const { return values_.size(); }
    Date start() const { return start_; }
    Date date(std::size_t i) const { return start_ + static_cast<int>(7 * i); }
    Date end_date() const { return date(size() - 1); }
    double value(std::size_t i) const { return values_[i]; }
    bool is_missing(std::size_t i) const { return missing_[i]; }
    const std::vector<double>& values() const { return values_; }

    std::optional<std::size_t> index_of(Date d) const;
    std::size_t count_present() const;

    /// Non-missing values in date order.
    std::vector<double> present_values() const;

    WeeklySeries renamed(std::string new_name) const;

private:
    std::string name_;
    Date start_{};
    std::vector<double> values_;
    std::vector<bool> missing_;
};

struct SummaryStats {
    double mean, sd, skewness, kurtosis;
    double min, p5, p25, median, p75, p95, max;
    std::size_t n;
};

/// Resample raw observations onto the Friday grid spanning them.
/// LastValue keeps the latest observation in (prev Friday, Friday];
/// WeekMean averages all observations in that window. Empty weeks are missing.
WeeklySeries align_weekly(const std::vector<Observation>& raw, AlignRule rule,
                          std::string name = "series");

/// Apply one of the variable transformations. Log transforms require strictly
/// positive inputs and report the offending date otherwise. Differencing
/// transforms shorten the series from the front; missing values propagate.
WeeklySeries transform(const WeeklySeries& s, TransformKind kind);

/// Descriptive statistics over non-missing values. Moments use the n
/// denominator; kurtosis is non-excess (normal -> 3); skewness/kurtosis are 0
/// for zero-variance input; percentiles interpolate linearly between order
/// statistics.
SummaryStats describe(const WeeklySeries& s);
SummaryStats describe(std::vector<double> values);

/// Linear-interpolation percentile of a sample (q in [0,1]); sorts a copy.
double percentile(std::vector<double> values, double q);

/// Pearson correlation on the date intersection of non-missing entries.
double pearson_corr(const WeeklySeries& a, const WeeklySeries& b);
double pearson_corr(const std::vector<double>& x, const std::vector<double>& y);

/// Pairs of non-missing values on the shared date grid.
void intersect_present(const WeeklySeries& a, const WeeklySeries& b,
                       std::vector<double>& out_a, std::vector<double>& out_b,
                       std::vector<Date>* out_dates = nullptr);

/// CSV with header "date,value"; blank value field = missing week (the date
/// must still sit on the Friday grid once aligned).
std::vector<Observation> read_observations_csv(const std::string& path,
                                               std::vector<Date>* missing_dates = nullptr);

/// Multi-series CSV with header "date,<name1>,<name2>,..."; one row per Friday.
std::vector<WeeklySeries> read_panel_csv(const std::string& path);
void write_panel_csv(const std::string& path, const std::vector<WeeklySeries>& series);

} // namespace nml

#endif
