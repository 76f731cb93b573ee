#pragma once

#include <string>
#include <vector>

// Minimal CSV reading/writing used by the file interfaces.  Values are plain
// (no quoting or embedded commas); numbers are written with enough digits to
// round-trip deterministically so repeated runs produce byte-identical files.

namespace adoptnet::csv {

struct Table {
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a named column; throws ConfigError naming the file and column.
    std::size_t column(const std::string& name) const;
};

Table read_file(const std::string& path);

// Parse helpers that report file, row (1-based, excluding header) and column
// name on failure.
double to_double(const Table& t, std::size_t row, std::size_t col);
long to_long(const Table& t, std::size_t row, std::size_t col);

// Deterministic, locale-independent number formatting ("%.12g").
std::string format_double(double v);

class Writer {
public:
    Writer(const std::string& path, const std::vector<std::string>& header);
    ~Writer();
    Writer(const Writer&) = delete;
    Writer& operator=(const Writer&) = delete;

    void row(const std::vector<std::string>& fields);

private:
    struct Impl;
    Impl* impl_;
};

} // namespace adoptnet::csv
