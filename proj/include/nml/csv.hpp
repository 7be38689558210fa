#ifndef NML_CSV_HPP
#define NML_CSV_HPP

#include <string>
#include <vector>

namespace nml {

/// Minimal CSV support: comma separator, optional double-quote quoting,
/// no embedded newlines. Enough for the flat numeric artifacts we exchange.
namespace csv {

std::vector<std::string> split_line(const std::string& line);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const; // -1 if absent
};

Table read_file(const std::string& path);

std::string escape(const std::string& field);

/// Canonical float formatting for artifacts: shortest round-trip form.
std::string format_double(double v);

} // namespace csv

} // namespace nml

#endif
