#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace stackcast {

using MaybeReal = std::optional<double>;

// Shortest round-trip representation; writing then parsing reproduces the bits.
std::string format_real(double v);
std::string format_real(const MaybeReal& v);  // missing -> ""

double parse_real(std::string_view s);
MaybeReal parse_maybe_real(std::string_view s);  // "" -> nullopt

// Minimal RFC 4180 reader: comma separated, double-quoted fields may contain
// commas, quotes ("") and newlines are not supported inside fields.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

class CsvTable {
public:
    static CsvTable read(const std::filesystem::path& path);
    static CsvTable parse(std::string_view text, std::string source = "<memory>");

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    // Throws naming the column and source when absent.
    std::size_t column(std::string_view name) const;
    std::optional<std::size_t> find_column(std::string_view name) const;
    const std::string& source() const { return source_; }

private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}
    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

// Writes atomically enough for re-runs: full content then rename.
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace stackcast
