#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "giantatom/coupling.hpp"

using namespace giantatom;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("symmetric line expands to mirrored sites")
{
    const CouplingConfig c = expand(SymmetricLineConfig{0.1, 0.8, {1.0, -0.5, 0.25}});
    REQUIRE(c.points.size() == 5);
    CHECK(c.g == 0.8);
    CHECK(c.omega_a == 0.1);
    CHECK(c.weight_norm() == doctest::Approx(1.0 + 2 * 0.5 + 2 * 0.25));
    for (const auto& p : c.points) {
        CHECK(p.n == 0);
        if (p.m == 0) CHECK(p.weight == cplx{1.0, 0.0});
        if (std::abs(p.m) == 1) CHECK(p.weight == cplx{-0.5, 0.0});
        if (std::abs(p.m) == 2) CHECK(p.weight == cplx{0.25, 0.0});
    }
}

TEST_CASE("coupling factor of a line is a real cosine series")
{
    const SymmetricLineConfig line{0.0, 1.0, presets::single_window_ratios()};
    const CouplingConfig c = expand(line);
    const double norm = c.weight_norm();
    for (double ky : {0.0, 0.3, 1.2, 2.9}) {
        double series = line.ratios[0];
        for (std::size_t j = 1; j < line.ratios.size(); ++j) series += 2 * line.ratios[j] * std::cos(j * ky);
        const cplx g = coupling_factor(c, {0.7, ky});
        CHECK(g.real() == doctest::Approx(series / norm));
        CHECK(std::abs(g.imag()) < 1e-14);
    }
}

TEST_CASE("small atom couples with g at every momentum")
{
    const CouplingConfig c = small_atom(0.6);
    CHECK(std::abs(coupling_factor(c, {1.0, -2.0}) - cplx{0.6, 0.0}) < 1e-15);
}

TEST_CASE("coupling factor is invariant under weight scale and global phase")
{
    const CouplingConfig base = grid_config(presets::asymmetric_grid(), 1.0);
    CouplingConfig other = base;
    for (auto& p : other.points) p.weight *= 3.0;
    const cplx phase = std::polar(1.0, 0.4);
    CouplingConfig rotated = base;
    for (auto& p : rotated.points) p.weight *= phase;
    for (Vec2 k : {Vec2{0.1, 0.2}, Vec2{pi / 2, pi / 2}, Vec2{-2.0, 1.0}}) {
        CHECK(std::abs(coupling_factor(other, k) - coupling_factor(base, k)) < 1e-14);
        CHECK(std::abs(coupling_factor(rotated, k) - phase * coupling_factor(base, k)) < 1e-14);
    }
}

TEST_CASE("asymmetric grid preset")
{
    const auto rows = presets::asymmetric_grid();
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) CHECK(r.size() == 5);
    const CouplingConfig c = grid_config(rows, 1.0);
    CHECK(c.points.size() == 25);
    CHECK(c.weight_norm() == doctest::Approx(98.26582).epsilon(1e-9));
}

TEST_CASE("line presets start with the unit center weight")
{
    for (const auto& r : {presets::single_window_ratios(), presets::two_window_ratios(), presets::four_window_ratios()}) {
        REQUIRE(r.size() == 8);
        CHECK(r[0] == 1.0);
    }
    CHECK(presets::single_window_ratios()[1] == doctest::Approx(-0.00088));
}

TEST_CASE("validation rejects degenerate and misplaced couplings")
{
    CouplingConfig zero;
    zero.points = {{0, 0, 0.0}};
    CHECK_THROWS_AS(zero.validate(), InvalidInput);
    CouplingConfig dup;
    dup.points = {{0, 0, 1.0}, {0, 0, 2.0}};
    CHECK_THROWS_AS(dup.validate(), InvalidInput);
    const CouplingConfig wide = expand(SymmetricLineConfig{0.0, 1.0, presets::single_window_ratios()});
    CHECK_THROWS_AS(wide.validate(LatticeSpec{5, 5}), InvalidInput);
    CHECK_NOTHROW(wide.validate(LatticeSpec{5, 7}));
}

TEST_CASE("coupling table round trip")
{
    const CouplingConfig c = grid_config(presets::asymmetric_grid(), 1.0);
    std::stringstream ss;
    write_coupling_table(ss, c);
    const auto points = read_coupling_table(ss);
    REQUIRE(points.size() == c.points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        CHECK(points[i].n == c.points[i].n);
        CHECK(points[i].m == c.points[i].m);
        CHECK(points[i].weight == c.points[i].weight);
    }
}

TEST_CASE("malformed coupling table lines are rejected")
{
    std::stringstream ss("0 0 1.0\n");
    CHECK_THROWS_AS(read_coupling_table(ss), InvalidInput);
    std::stringstream bad("0 x 1.0 0.0\n");
    CHECK_THROWS_AS(read_coupling_table(bad), InvalidInput);
}
