#include "doctest.h"

#include "acts/calendar.hpp"
#include "acts/csv.hpp"
#include "acts/errors.hpp"

#include <filesystem>
#include <random>

using namespace acts;

TEST_CASE("dates parse from ISO and US styles") {
    CHECK(Date::parse("2020-08-30")->iso() == "2020-08-30");
    CHECK(Date::parse("8/30/20")->iso() == "2020-08-30");
    CHECK(Date::parse("8/30/2020")->iso() == "2020-08-30");
    CHECK_FALSE(Date::parse("2020-02-30").has_value());
    CHECK_FALSE(Date::parse("yesterday").has_value());
    CHECK_THROWS_AS(Date::parse_or_throw("13/1/20"), FormatError);
}

TEST_CASE("date arithmetic crosses month and leap boundaries") {
    const Date d(2020, 2, 28);
    CHECK((d + 1).iso() == "2020-02-29");
    CHECK((d + 2).iso() == "2020-03-01");
    CHECK((Date(2020, 3, 1) - d) == 2);
    CHECK(d < d + 1);
}

TEST_CASE("csv rows keep quoted commas and skip blank lines") {
    auto rows = csv::parse("region,value\n\"Washington, DC\",3\n\n\"say \"\"hi\"\"\",4\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].fields[0] == "Washington, DC");
    CHECK(rows[2].fields[0] == "say \"hi\"");
    CHECK(rows[2].line == 4);
}

TEST_CASE("quoting round-trips through the parser") {
    for (std::string field : {"plain", "a,b", "quote\"inside", ""}) {
        auto rows = csv::parse(csv::quote_if_needed(field) + ",x\n");
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].fields[0] == field);
    }
}

TEST_CASE("doubles format to the shortest exact text") {
    CHECK(csv::format_double(0.0) == "0");
    CHECK(csv::format_double(0.1) == "0.1");
    CHECK(csv::format_double(-2.5) == "-2.5");
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = dist(rng);
        CHECK(csv::parse_double(csv::format_double(v), 1) == v);
    }
}

TEST_CASE("bad numbers name their line") {
    try {
        csv::parse_double("12x", 17);
        FAIL("expected a format error");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("17") != std::string::npos);
    }
    CHECK_THROWS_AS(csv::parse_double("nan", 1), FormatError);
}

TEST_CASE("atomic writes replace the file and leave no temporary behind") {
    const auto dir = std::filesystem::temp_directory_path() / "acts_csv_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.csv";
    csv::write_atomic(path, "first\n");
    csv::write_atomic(path, "second\n");
    CHECK(csv::read_text(path) == "second\n");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dir)) ++files;
    CHECK(files == 1);
    CHECK_THROWS_AS(csv::read_text(dir / "missing.csv"), IoError);
    std::filesystem::remove_all(dir);
}
