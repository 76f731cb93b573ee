#include "adoptnet/csv.hpp"

#include "adoptnet/errors.hpp"

#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

using namespace adoptnet;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("writer and reader round-trip a small table") {
    TempFile tmp("csv_roundtrip.csv");
    {
        csv::Writer w(tmp.path, {"id", "value", "label"});
        w.row({"1", csv::format_double(0.25), "alpha"});
        w.row({"2", csv::format_double(-3.5), "beta"});
    }
    csv::Table t = csv::read_file(tmp.path);
    REQUIRE(t.header.size() == 3);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.column("id") == 0);
    CHECK(t.column("label") == 2);
    CHECK(csv::to_long(t, 0, 0) == 1);
    CHECK(csv::to_double(t, 1, 1) == -3.5);
    CHECK(t.rows[1][2] == "beta");
}

TEST_CASE("repeated writes are byte-identical") {
    TempFile a("csv_bytes_a.csv");
    TempFile b("csv_bytes_b.csv");
    for (const std::string& path : {a.path, b.path}) {
        csv::Writer w(path, {"x", "y"});
        w.row({csv::format_double(1.0 / 3.0), csv::format_double(2e-7)});
        w.row({csv::format_double(123456789.123), csv::format_double(0.0)});
    }
    CHECK(slurp(a.path) == slurp(b.path));
}

TEST_CASE("format_double keeps twelve significant digits") {
    // values whose shortest decimal form fits in 12 digits come back exactly
    for (double v : {0.0, 1.0, -1.5, 2.5e-12, 9.876e15, -0.1}) {
        std::string s = csv::format_double(v);
        CHECK(std::stod(s) == v);
    }
    // a repeating fraction survives to the documented 12 digits
    std::string third = csv::format_double(1.0 / 3.0);
    CHECK(std::abs(std::stod(third) - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("missing column is named in the error") {
    TempFile tmp("csv_missing_col.csv");
    {
        csv::Writer w(tmp.path, {"a", "b"});
        w.row({"1", "2"});
    }
    csv::Table t = csv::read_file(tmp.path);
    try {
        t.column("zzz");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("zzz") != std::string::npos);
        CHECK(msg.find(tmp.path) != std::string::npos);
    }
}

TEST_CASE("non-numeric cell reports file, row, and column") {
    TempFile tmp("csv_bad_cell.csv");
    {
        std::ofstream out(tmp.path);
        out << "a,b\n1,fine\n2,oops\n";
    }
    csv::Table t = csv::read_file(tmp.path);
    try {
        csv::to_double(t, 1, 1);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find(tmp.path) != std::string::npos);
        CHECK(msg.find('b') != std::string::npos);
        CHECK(msg.find('2') != std::string::npos);
    }
}

TEST_CASE("ragged rows are rejected") {
    TempFile tmp("csv_ragged.csv");
    {
        std::ofstream out(tmp.path);
        out << "a,b,c\n1,2,3\n4,5\n";
    }
    CHECK_THROWS_AS(csv::read_file(tmp.path), ConfigError);
}

TEST_CASE("missing file is rejected with its path") {
    try {
        csv::read_file("definitely_not_here_873.csv");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("definitely_not_here_873.csv") !=
              std::string::npos);
    }
}
