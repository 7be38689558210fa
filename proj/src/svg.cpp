#include "nml/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nml/errors.hpp"

namespace nml::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

struct Frame {
    double x0, y0, w, h;       // plot area in pixels
    double xmin, xmax, ymin, ymax;

    double px(double x) const {
        double span = xmax - xmin;
        if (span <= 0) span = 1.0;
        return x0 + (x - xmin) / span * w;
    }
    double py(double y) const {
        double span = ymax - ymin;
        if (span <= 0) span = 1.0;
        return y0 + h - (y - ymin) / span * h;
    }
};

void open_svg(std::ostringstream& os, int width, int height, const std::string& title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">"
       << esc(title) << "</text>\n";
}

void draw_axes(std::ostringstream& os, const Frame& f) {
    os << "<rect x=\"" << fmt(f.x0) << "\" y=\"" << fmt(f.y0) << "\" width=\"" << fmt(f.w)
       << "\" height=\"" << fmt(f.h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << fmt(f.x0) << "\" y=\"" << fmt(f.y0 + f.h + 14) << "\">" << fmt(f.xmin)
       << "</text>\n";
    os << "<text x=\"" << fmt(f.x0 + f.w) << "\" y=\"" << fmt(f.y0 + f.h + 14)
       << "\" text-anchor=\"end\">" << fmt(f.xmax) << "</text>\n";
    os << "<text x=\"" << fmt(f.x0 - 4) << "\" y=\"" << fmt(f.y0 + f.h) << "\" text-anchor=\"end\">"
       << fmt(f.ymin) << "</text>\n";
    os << "<text x=\"" << fmt(f.x0 - 4) << "\" y=\"" << fmt(f.y0 + 10) << "\" text-anchor=\"end\">"
       << fmt(f.ymax) << "</text>\n";
}

} // namespace

std::string line_chart(const std::string& title, const std::vector<Series>& series, int width,
                       int height) {
    if (series.empty()) throw DataError("line_chart: no series");
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (double x : s.x) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
        }
        for (double y : s.y) {
            if (!std::isfinite(y)) continue;
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
        for (double y : s.band_low)
            if (std::isfinite(y)) ymin = std::min(ymin, y);
        for (double y : s.band_high)
            if (std::isfinite(y)) ymax = std::max(ymax, y);
    }
    if (!std::isfinite(ymin)) {
        ymin = 0;
        ymax = 1;
    }
    std::ostringstream os;
    open_svg(os, width, height, title);
    Frame f{55, 26, width - 75.0, height - 60.0, xmin, xmax, ymin, ymax};
    draw_axes(os, f);

    int ci = 0;
    double legend_x = f.x0 + 6;
    for (const auto& s : series) {
        std::string color = s.color.empty() ? kPalette[ci % 10] : s.color;
        if (!s.band_low.empty() && s.band_low.size() == s.x.size()) {
            os << "<polygon fill=\"" << color << "\" opacity=\"0.15\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (std::isfinite(s.band_high[i]))
                    os << fmt(f.px(s.x[i])) << ',' << fmt(f.py(s.band_high[i])) << ' ';
            for (std::size_t i = s.x.size(); i-- > 0;)
                if (std::isfinite(s.band_low[i]))
                    os << fmt(f.px(s.x[i])) << ',' << fmt(f.py(s.band_low[i])) << ' ';
            os << "\"/>\n";
        }
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.3\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            os << fmt(f.px(s.x[i])) << ',' << fmt(f.py(s.y[i])) << ' ';
        }
        os << "\"/>\n";
        os << "<text x=\"" << fmt(legend_x) << "\" y=\"" << fmt(f.y0 + 12) << "\" fill=\"" << color
           << "\">" << esc(s.label) << "</text>\n";
        legend_x += 10.0 + 7.0 * static_cast<double>(s.label.size());
        ++ci;
    }
    os << "</svg>\n";
    return os.str();
}

std::string box_chart(const std::string& title, const std::vector<BoxStats>& boxes, int width,
                      int per_box) {
    if (boxes.empty()) throw DataError("box_chart: no boxes");
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& b : boxes) {
        ymin = std::min(ymin, b.whisker_low);
        ymax = std::max(ymax, b.whisker_high);
    }
    int height = 50 + per_box * static_cast<int>(boxes.size()) + 30;
    std::ostringstream os;
    open_svg(os, width, height, title);
    Frame f{110, 26, width - 130.0, height - 60.0, ymin, ymax, 0, 1};
    // Horizontal boxes: x axis carries the value scale.
    os << "<rect x=\"" << fmt(f.x0) << "\" y=\"" << fmt(f.y0) << "\" width=\"" << fmt(f.w)
       << "\" height=\"" << fmt(f.h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << fmt(f.x0) << "\" y=\"" << fmt(f.y0 + f.h + 14) << "\">" << fmt(ymin)
       << "</text>\n";
    os << "<text x=\"" << fmt(f.x0 + f.w) << "\" y=\"" << fmt(f.y0 + f.h + 14)
       << "\" text-anchor=\"end\">" << fmt(ymax) << "</text>\n";

    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto& b = boxes[i];
        double cy = f.y0 + (static_cast<double>(i) + 0.5) / static_cast<double>(boxes.size()) * f.h;
        double hh = 0.3 * f.h / static_cast<double>(boxes.size());
        auto X = [&](double v) { return f.px(v); };
        os << "<line x1=\"" << fmt(X(b.whisker_low)) << "\" y1=\"" << fmt(cy) << "\" x2=\""
           << fmt(X(b.whisker_high)) << "\" y2=\"" << fmt(cy) << "\" stroke=\"#444\"/>\n";
        os << "<rect x=\"" << fmt(X(b.q1)) << "\" y=\"" << fmt(cy - hh) << "\" width=\""
           << fmt(X(b.q3) - X(b.q1)) << "\" height=\"" << fmt(2 * hh)
           << "\" fill=\"#9ecae1\" stroke=\"#444\"/>\n";
        os << "<line x1=\"" << fmt(X(b.median)) << "\" y1=\"" << fmt(cy - hh) << "\" x2=\""
           << fmt(X(b.median)) << "\" y2=\"" << fmt(cy + hh)
           << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
        os << "<circle cx=\"" << fmt(X(b.mean)) << "\" cy=\"" << fmt(cy)
           << "\" r=\"3\" fill=\"white\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << fmt(f.x0 - 6) << "\" y=\"" << fmt(cy + 4)
           << "\" text-anchor=\"end\">" << esc(b.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string bar_chart(const std::string& title, const std::vector<BarItem>& bars, int width,
                      int bar_height) {
    if (bars.empty()) throw DataError("bar_chart: no bars");
    double vmax = 0.0;
    for (const auto& b : bars) vmax = std::max(vmax, b.value + b.err);
    if (vmax <= 0) vmax = 1.0;
    int height = 40 + bar_height * static_cast<int>(bars.size()) + 26;
    std::ostringstream os;
    open_svg(os, width, height, title);
    double x0 = 130, w = width - 160.0;
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const auto& b = bars[i];
        double y = 30 + bar_height * static_cast<double>(i);
        double bw = b.value / vmax * w;
        os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(bw)
           << "\" height=\"" << fmt(bar_height - 4.0) << "\" fill=\"#1f77b4\"/>\n";
        if (b.err > 0) {
            double e0 = (b.value - b.err) / vmax * w, e1 = (b.value + b.err) / vmax * w;
            double cy = y + (bar_height - 4.0) / 2;
            os << "<line x1=\"" << fmt(x0 + std::max(0.0, e0)) << "\" y1=\"" << fmt(cy)
               << "\" x2=\"" << fmt(x0 + e1) << "\" y2=\"" << fmt(cy) << "\" stroke=\"#444\"/>\n";
        }
        os << "<text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(y + bar_height - 8)
           << "\" text-anchor=\"end\">" << esc(b.label) << "</text>\n";
        os << "<text x=\"" << fmt(x0 + bw + 4) << "\" y=\"" << fmt(y + bar_height - 8) << "\">"
           << fmt(b.value) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string scatter_chart(const std::string& title, const std::vector<ScatterSeries>& series,
                          int width, int height) {
    if (series.empty()) throw DataError("scatter_chart: no series");
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            double e = s.yerr.empty() ? 0.0 : s.yerr[i];
            ymin = std::min(ymin, s.y[i] - e);
            ymax = std::max(ymax, s.y[i] + e);
        }
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    std::ostringstream os;
    open_svg(os, width, height, title);
    Frame f{55, 26, width - 75.0, height - 60.0, xmin, xmax, ymin, ymax};
    draw_axes(os, f);
    int ci = 0;
    double legend_x = f.x0 + 6;
    for (const auto& s : series) {
        std::string color = s.color.empty() ? kPalette[ci % 10] : s.color;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double px = f.px(s.x[i]), py = f.py(s.y[i]);
            if (!s.yerr.empty() && s.yerr[i] > 0) {
                os << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(f.py(s.y[i] - s.yerr[i]))
                   << "\" x2=\"" << fmt(px) << "\" y2=\"" << fmt(f.py(s.y[i] + s.yerr[i]))
                   << "\" stroke=\"" << color << "\" opacity=\"0.5\"/>\n";
            }
            os << "<circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(py) << "\" r=\"2.4\" fill=\""
               << color << "\" opacity=\"0.75\"/>\n";
        }
        if (s.fit_line) {
            os << "<line x1=\"" << fmt(f.px(xmin)) << "\" y1=\""
               << fmt(f.py(s.intercept + s.slope * xmin)) << "\" x2=\"" << fmt(f.px(xmax))
               << "\" y2=\"" << fmt(f.py(s.intercept + s.slope * xmax)) << "\" stroke=\"" << color
               << "\" stroke-width=\"1.6\" stroke-dasharray=\"5,3\"/>\n";
        }
        os << "<text x=\"" << fmt(legend_x) << "\" y=\"" << fmt(f.y0 + 12) << "\" fill=\"" << color
           << "\">" << esc(s.label) << "</text>\n";
        legend_x += 10.0 + 7.0 * static_cast<double>(s.label.size());
        ++ci;
    }
    os << "</svg>\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& svg_text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << svg_text;
}

} // namespace nml::svg
