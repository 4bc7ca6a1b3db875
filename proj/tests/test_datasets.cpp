#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "efwe/datasets.hpp"
#include "efwe/errors.hpp"

using namespace efwe;
using Catch::Matchers::WithinAbs;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("efwe_test_" + name);
}

std::size_t row_of(const std::string& text) {
    std::istringstream in(text);
    try {
        read_csv(in);
    } catch (const DataError& e) {
        return e.row();
    }
    return 0;
}

}  // namespace

TEST_CASE("built-in Aarset data", "[datasets]") {
    const Dataset& d = aarset();
    CHECK(d.size() == 50);
    CHECK_THAT(d.sum(), WithinAbs(2284.3, 1e-9));
    CHECK(d.values().front() == 0.1);
    CHECK(d.values().back() == 86.0);
    CHECK(d.label() == "aarset");
    CHECK(std::count(d.values().begin(), d.values().end(), 18.0) == 5);
    CHECK(std::count_if(d.values().begin(), d.values().end(), [](double x) { return x <= 18.0; }) == 18);

    // Same object, bit-identical contents.
    CHECK(&aarset() == &d);
    const Dataset copy = aarset();
    CHECK(std::memcmp(copy.values().data(), d.values().data(), 50 * sizeof(double)) == 0);
}

TEST_CASE("Dataset validation and summaries", "[datasets]") {
    CHECK_THROWS_AS(Dataset({}, "empty"), DomainError);
    CHECK_THROWS_AS(Dataset({1.0, 0.0}, "zero"), DomainError);
    CHECK_THROWS_AS(Dataset({1.0, std::nan("")}, "nan"), DomainError);
    const Dataset d({3.0, 1.0, 2.0, 10.0}, "d");
    CHECK(d.values() == std::vector<double>{1.0, 2.0, 3.0, 10.0});
    CHECK(d.original() == std::vector<double>{3.0, 1.0, 2.0, 10.0});
    CHECK(d.mean() == 4.0);
    CHECK(d.median() == 2.5);
}

TEST_CASE("read_csv with a header", "[datasets][csv]") {
    std::istringstream in("time\n1.5\n2.0");
    const Dataset d = read_csv(in);
    CHECK(d.original() == std::vector<double>{1.5, 2.0});
}

TEST_CASE("read_csv tolerates BOM, CRLF, blanks and named columns", "[datasets][csv]") {
    std::istringstream a("\xEF\xBB\xBFid,time\r\n1,4.5\r\n\r\n2,+3\r\n");
    CHECK(read_csv(a, std::string("time")).original() == std::vector<double>{4.5, 3.0});
    std::istringstream b("7\n8\n");
    CHECK(read_csv(b).original() == std::vector<double>{7.0, 8.0});
    std::istringstream c("id,time\n1,4.5\n");
    CHECK(read_csv(c, std::size_t{1}).original() == std::vector<double>{4.5});
}

TEST_CASE("read_csv errors name the row", "[datasets][csv]") {
    std::istringstream in("time\n1.0\n-1\n");
    CHECK_THROWS_AS(read_csv(in), NonpositiveValueError);
    CHECK(row_of("time\n1.0\n-1\n") == 3);
    CHECK(row_of("time\n1.0\n0\n") == 3);
    CHECK(row_of("time\n1.0\n2.0\nabc\n") == 4);
    CHECK(row_of("time\n1.0\nnan\n") == 3);
    CHECK(row_of("a,b\n1,2\n3\n") == 0);  // column 0 is present on every row

    std::istringstream wide("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_csv(wide, std::size_t{1}), ParseError);
    std::istringstream named("a,b\n1,2\n");
    CHECK_THROWS_AS(read_csv(named, std::string("time")), ParseError);
    std::istringstream empty("time\n\n");
    CHECK_THROWS_AS(read_csv(empty), ParseError);
}

TEST_CASE("CSV round trip", "[datasets][csv]") {
    const auto path = temp_file("roundtrip.csv");
    write_csv(aarset(), path);
    const Dataset back = load_csv(path);
    CHECK(back.original() == aarset().original());
    CHECK(back.source() == path.string());
    std::filesystem::remove(path);

    const Dataset odd({0.1 + 0.2, 1e-300, 123456789.125}, "odd");
    std::stringstream s;
    write_csv(odd, s);
    CHECK(read_csv(s).original() == odd.original());
}

TEST_CASE("load_csv on a missing file", "[datasets][csv]") {
    CHECK_THROWS_AS(load_csv(temp_file("does_not_exist.csv")), MissingFileError);
}
