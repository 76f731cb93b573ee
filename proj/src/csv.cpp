#include "adoptnet/csv.hpp"

#include "adoptnet/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace adoptnet::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // Trim surrounding whitespace and a possible trailing CR.
        std::size_t b = field.find_first_not_of(" \t\r");
        std::size_t e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') {
        out.push_back("");
    }
    return out;
}

} // namespace

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw ConfigError(path + ": missing required column '" + name + "'");
}

Table read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open file: " + path);
    }
    Table t;
    t.path = path;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto fields = split_line(line);
        if (first) {
            t.header = fields;
            first = false;
        } else {
            if (fields.size() != t.header.size()) {
                throw ConfigError(path + ": row " + std::to_string(t.rows.size() + 1) +
                                  " has " + std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(t.header.size()));
            }
            t.rows.push_back(std::move(fields));
        }
    }
    if (first) {
        throw ConfigError(path + ": file has no header row");
    }
    return t;
}

double to_double(const Table& t, std::size_t row, std::size_t col) {
    const std::string& s = t.rows[row][col];
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(t.path + ": row " + std::to_string(row + 1) + ", column '" +
                          t.header[col] + "': cannot parse '" + s + "' as a number");
    }
}

long to_long(const Table& t, std::size_t row, std::size_t col) {
    const std::string& s = t.rows[row][col];
    try {
        std::size_t used = 0;
        long v = std::stol(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(t.path + ": row " + std::to_string(row + 1) + ", column '" +
                          t.header[col] + "': cannot parse '" + s + "' as an integer");
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Writer::Impl {
    std::ofstream out;
    std::string path;
    std::size_t width = 0;
};

Writer::Writer(const std::string& path, const std::vector<std::string>& header)
    : impl_(new Impl) {
    impl_->out.open(path);
    impl_->path = path;
    if (!impl_->out) {
        delete impl_;
        throw ConfigError("cannot open file for writing: " + path);
    }
    impl_->width = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        impl_->out << header[i] << (i + 1 < header.size() ? "," : "\n");
    }
}

Writer::~Writer() {
    delete impl_;
}

void Writer::row(const std::vector<std::string>& fields) {
    if (fields.size() != impl_->width) {
        throw ConfigError(impl_->path + ": row width " + std::to_string(fields.size()) +
                          " does not match header width " + std::to_string(impl_->width));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        impl_->out << fields[i] << (i + 1 < fields.size() ? "," : "\n");
    }
}

} // namespace adoptnet::csv
