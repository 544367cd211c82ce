#pragma once

#include <string>
#include <vector>

namespace spillnet::csv {

/// Split one CSV line on commas. No quoting support: tickers, sector codes
/// and numbers never contain commas in this pipeline.
std::vector<std::string> split(const std::string& line);

std::string trim(const std::string& s);

/// Shortest-ish decimal form that still round-trips doubles well enough for
/// staged re-reads ("%.15g"). NaN renders as an empty cell.
std::string format(double x);

double parse_double(const std::string& cell, const std::string& context);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Read a whole CSV file (first line is the header). Throws DataError.
Table read_file(const std::string& path);

/// Write header + rows. Throws DataError if the file cannot be opened.
void write_file(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

} // namespace spillnet::csv
