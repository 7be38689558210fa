#ifndef NML_SVG_HPP
#define NML_SVG_HPP

#include <string>
#include <vector>

namespace nml {

/// Static SVG chart emission for the report stage. Deliberately small: line
/// series with optional bands, horizontal box plots, bars and scatters share
/// one frame/axis layout.
namespace svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    std::vector<double> band_low;  // optional, same length as x
    std::vector<double> band_high;
};

struct ScatterSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> yerr; // optional
    std::string color = "#1f77b4";
    bool fit_line = false;
    double slope = 0.0, intercept = 0.0;
};

struct BoxStats {
    std::string label;
    double whisker_low, q1, median, q3, whisker_high, mean;
};

struct BarItem {
    std::string label;
    double value;
    double err = 0.0;
};

std::string line_chart(const std::string& title, const std::vector<Series>& series,
                       int width = 860, int height = 320);

std::string box_chart(const std::string& title, const std::vector<BoxStats>& boxes,
                      int width = 860, int height = 60 /*per box*/);

std::string bar_chart(const std::string& title, const std::vector<BarItem>& bars,
                      int width = 860, int bar_height = 18);

std::string scatter_chart(const std::string& title, const std::vector<ScatterSeries>& series,
                          int width = 860, int height = 360);

void write_file(const std::string& path, const std::string& svg);

} // namespace svg

} // namespace nml

#endif
