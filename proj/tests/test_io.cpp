#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "giantatom/error.hpp"
#include "giantatom/io.hpp"

using namespace giantatom;

namespace {
ComplexGrid sample_grid()
{
    ComplexGrid g(3, 2);
    for (int n = -3; n <= 3; ++n) {
        for (int m = -2; m <= 2; ++m) g.at(n, m) = {0.1 * n + 1.0 / 3.0, std::numbers::pi * m - 1e-9};
    }
    return g;
}
} // namespace

TEST_CASE("csv round trip reproduces doubles exactly")
{
    io::CsvTable t{{"a", "b", "c"}, {}};
    t.add_row({1.0 / 3.0, -2.5e-300, std::numbers::e});
    t.add_row({0.0, 1e308, -0.1});
    std::stringstream ss;
    io::write_csv(ss, t);
    const io::CsvTable back = io::read_csv(ss);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(back.column("c") == 2);
    CHECK_THROWS_AS(back.column("d"), InvalidInput);
}

TEST_CASE("csv reader rejects malformed input")
{
    io::CsvTable t{{"a", "b"}, {}};
    CHECK_THROWS_AS(t.add_row({1.0}), InvalidInput);
    std::stringstream empty;
    CHECK_THROWS_AS(io::read_csv(empty), InvalidInput);
    std::stringstream ragged("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(io::read_csv(ragged), InvalidInput);
    std::stringstream text("a,b\n1,x\n");
    CHECK_THROWS_AS(io::read_csv(text), InvalidInput);
    std::stringstream trailing("a,b\n1,2abc\n");
    CHECK_THROWS_AS(io::read_csv(trailing), InvalidInput);
}

TEST_CASE("position table round trip")
{
    const ComplexGrid g = sample_grid();
    const io::CsvTable t = io::position_table(g);
    CHECK(t.rows.size() == g.size());
    CHECK(t.rows.front()[0] == -3.0);
    CHECK(t.rows.front()[1] == -2.0);
    const ComplexGrid back = io::grid_from_position_table(t);
    REQUIRE(back.same_shape(g));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(back.values()[i] == g.values()[i]);

    io::CsvTable partial = t;
    partial.rows.pop_back();
    CHECK_THROWS_AS(io::grid_from_position_table(partial), InvalidInput);
}

TEST_CASE("momentum table lists ascending wavevectors")
{
    RealGrid values(2, 1);
    for (std::size_t i = 0; i < values.size(); ++i) values.values()[i] = double(i);
    const io::CsvTable t = io::momentum_table(values, "omega");
    CHECK(t.header == std::vector<std::string>{"kx", "ky", "omega"});
    REQUIRE(t.rows.size() == 15);
    CHECK(t.rows.front()[0] == doctest::Approx(-4.0 * std::numbers::pi / 5.0));
    CHECK(t.rows.front()[1] == doctest::Approx(-2.0 * std::numbers::pi / 3.0));
    CHECK(t.rows[7][0] == doctest::Approx(0.0));
    CHECK(t.rows[7][1] == doctest::Approx(0.0));
    for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(t.rows[i][2] == double(i));
}

TEST_CASE("binary grid round trip at single precision")
{
    const ComplexGrid g = sample_grid();
    std::stringstream ss;
    io::write_grid_binary(ss, g);
    CHECK(ss.str().size() == 8 + 8 + g.size() * 8);
    CHECK(ss.str().substr(0, 8) == "GATMGRID");
    const ComplexGrid back = io::read_grid_binary(ss);
    REQUIRE(back.same_shape(g));
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(back.values()[i].real() == static_cast<float>(g.values()[i].real()));
        CHECK(back.values()[i].imag() == static_cast<float>(g.values()[i].imag()));
    }
}

TEST_CASE("binary grid reader rejects bad files")
{
    std::stringstream magic("NOTAGRID\x01\0\0\0\x01\0\0\0");
    CHECK_THROWS_AS(io::read_grid_binary(magic), InvalidInput);

    std::string even = "GATMGRID";
    even += std::string("\x02\0\0\0\x01\0\0\0", 8);
    std::stringstream even_stream(even);
    CHECK_THROWS_AS(io::read_grid_binary(even_stream), InvalidInput);

    std::stringstream full;
    io::write_grid_binary(full, sample_grid());
    std::string bytes = full.str();
    bytes.resize(bytes.size() - 3);
    std::stringstream truncated(bytes);
    CHECK_THROWS_AS(io::read_grid_binary(truncated), InvalidInput);
}
