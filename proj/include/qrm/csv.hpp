#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qrm/series.hpp"

namespace qrm {

/// Named numeric columns of equal length.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    const std::vector<double>& column(const std::string& name) const;
};

/// 17 significant digits, so values round-trip exactly.
std::string format_number(double value);

void write_table(std::ostream& out, const Table& table);
void write_table(const std::filesystem::path& path, const Table& table);
/// Throws ParseError carrying the 1-based line number.
Table read_table(std::istream& in);
Table read_table(const std::filesystem::path& path);

/// The ten series columns t, x, p, q, sigma_x, sigma_z, p_in, norm, energy, leakage.
Table to_table(const ObservableSeries& series);
ObservableSeries to_series(const Table& table, const std::string& model);

void write_series(const std::filesystem::path& path, const ObservableSeries& series);
ObservableSeries read_series(const std::filesystem::path& path, const std::string& model = "");

} // namespace qrm
