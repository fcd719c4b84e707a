#include "qrm/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "qrm/errors.hpp"

namespace qrm {

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::string trimmed(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

const std::vector<double>& Table::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return columns[i];
    throw UsageError("table has no column '" + name + "'");
}

std::string format_number(double value)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_table(std::ostream& out, const Table& table)
{
    for (std::size_t c = 0; c < table.header.size(); ++c)
        out << (c ? "," : "") << table.header[c];
    out << '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            out << (c ? "," : "") << format_number(table.columns[c][r]);
        out << '\n';
    }
}

void write_table(const std::filesystem::path& path, const Table& table)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot open '" + path.string() + "' for writing");
    write_table(out, table);
    if (!out)
        throw UsageError("failed writing '" + path.string() + "'");
}

Table read_table(std::istream& in)
{
    Table table;
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("missing header row", 1);
    for (auto& name : split_fields(line)) {
        name = trimmed(name);
        if (name.empty())
            throw ParseError("empty column name in header", 1);
        table.header.push_back(name);
    }
    table.columns.resize(table.header.size());

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty())
            continue;
        const auto fields = split_fields(line);
        if (fields.size() != table.header.size())
            throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string f = trimmed(fields[c]);
            double value = 0.0;
            const auto res = std::from_chars(f.data(), f.data() + f.size(), value);
            if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size())
                throw ParseError("field '" + table.header[c] + "' is not a number: '" + f + "'", line_no);
            table.columns[c].push_back(value);
        }
    }
    return table;
}

Table read_table(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot open '" + path.string() + "'");
    return read_table(in);
}

Table to_table(const ObservableSeries& series)
{
    Table t;
    for (auto name : ObservableSeries::csv_columns) {
        t.header.emplace_back(name);
        t.columns.push_back(series.column(name));
    }
    return t;
}

ObservableSeries to_series(const Table& table, const std::string& model)
{
    ObservableSeries s;
    s.model = model;
    for (auto name : ObservableSeries::csv_columns) {
        const std::string key(name);
        bool found = false;
        for (std::size_t i = 0; i < table.header.size(); ++i)
            if (table.header[i] == key) {
                s.column(name) = table.columns[i];
                found = true;
            }
        if (!found)
            throw ParseError("missing column '" + key + "'", 1);
    }
    return s;
}

void write_series(const std::filesystem::path& path, const ObservableSeries& series)
{
    write_table(path, to_table(series));
}

ObservableSeries read_series(const std::filesystem::path& path, const std::string& model)
{
    return to_series(read_table(path), model.empty() ? path.stem().string() : model);
}

} // namespace qrm
