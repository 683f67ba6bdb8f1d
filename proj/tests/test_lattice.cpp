#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "giantatom/lattice.hpp"

using namespace giantatom;

namespace {
constexpr double pi = std::numbers::pi;

ComplexGrid random_grid(int hx, int hy, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> d;
    ComplexGrid g(hx, hy);
    for (auto& v : g.values()) v = {d(rng), d(rng)};
    return g;
}
} // namespace

TEST_CASE("band edges and dispersion values")
{
    const LatticeSpec spec;
    CHECK(spec.band_bottom() == doctest::Approx(-1.4));
    CHECK(spec.band_top() == doctest::Approx(1.4));
    CHECK(dispersion(spec, {0.0, 0.0}) == doctest::Approx(-1.4));
    CHECK(dispersion(spec, {pi, pi}) == doctest::Approx(1.4));
    CHECK(dispersion(spec, {pi / 2, 0.0}) == doctest::Approx(-0.4));
}

TEST_CASE("group velocity is the gradient of the dispersion")
{
    const LatticeSpec spec{121, 61, 0.3, 0.7, 0.25};
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-pi, pi);
    for (int i = 0; i < 20; ++i) {
        const Vec2 k{u(rng), u(rng)};
        const double h = 1e-6;
        const Vec2 v = group_velocity(spec, k);
        CHECK(v.x == doctest::Approx((dispersion(spec, {k.x + h, k.y}) - dispersion(spec, {k.x - h, k.y})) / (2 * h)).epsilon(1e-7));
        CHECK(v.y == doctest::Approx((dispersion(spec, {k.x, k.y + h}) - dispersion(spec, {k.x, k.y - h})) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("momentum grid is symmetric about zero and the dispersion grid is even")
{
    const LatticeSpec spec{6, 4};
    const MomentumGrid k(spec);
    REQUIRE(k.kx().size() == 13);
    CHECK(k.kx()[6] == 0.0);
    for (int i = 0; i < 13; ++i) CHECK(k.kx()[static_cast<std::size_t>(i)] == -k.kx()[static_cast<std::size_t>(12 - i)]);
    const RealGrid w = dispersion_grid(spec);
    for (int i = 0; i < w.nx(); ++i) {
        for (int j = 0; j < w.ny(); ++j) CHECK(w(i, j) == w(w.nx() - 1 - i, w.ny() - 1 - j));
    }
}

TEST_CASE("Fourier transform is unitary and invertible")
{
    const ComplexGrid g = random_grid(7, 5, 1);
    const FourierTransform ft(7, 5);
    const ComplexGrid k = ft.to_momentum(g);
    CHECK(squared_norm(k) == doctest::Approx(squared_norm(g)).epsilon(1e-13));
    const ComplexGrid back = ft.to_position(k);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(back.values()[i] - g.values()[i]) < 1e-13);
}

TEST_CASE("a site at the origin transforms to a flat momentum distribution")
{
    ComplexGrid g(4, 3);
    g.at(0, 0) = 1.0;
    const ComplexGrid k = to_momentum(g);
    const double flat = 1.0 / std::sqrt(double(g.size()));
    for (const auto& v : k.values()) CHECK(std::abs(v - cplx{flat, 0.0}) < 1e-14);
}

TEST_CASE("plane wave lands on its momentum index")
{
    const LatticeSpec spec{5, 4};
    const MomentumGrid k(spec);
    ComplexGrid g(5, 4);
    const Vec2 q = k.at(7, 2);
    for (int n = -5; n <= 5; ++n) {
        for (int m = -4; m <= 4; ++m) g.at(n, m) = std::polar(1.0, q.x * n + q.y * m);
    }
    const ComplexGrid out = to_momentum(g);
    CHECK(std::norm(out(7, 2)) == doctest::Approx(double(g.size())));
}

TEST_CASE("mismatched transform shape is rejected")
{
    const FourierTransform ft(3, 3);
    CHECK_THROWS_AS(ft.to_momentum(ComplexGrid(3, 4)), InvalidInput);
}

TEST_CASE("energy shell arc length against an independent quadrature")
{
    // Adaptive quadrature of the contour length at E = -2 J_y, J_x = 0.5, J_y = 0.2.
    const double oracle = 13.206290008028466;
    const LatticeSpec spec;
    CHECK(energy_shell(spec, -0.4).total_length() == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(energy_shell(spec, -0.4, 1 << 16).total_length() == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("shell samples lie on the contour with matching gradients")
{
    const LatticeSpec spec;
    for (double e : {-1.1, -0.4, 0.25, 0.9}) {
        const EnergyShell shell = energy_shell(spec, e, 256);
        REQUIRE_FALSE(shell.samples.empty());
        for (const auto& s : shell.samples) {
            CHECK(std::abs(dispersion(spec, s.k) - e) <= shell_tolerance(spec));
            CHECK(s.grad_norm == doctest::Approx(norm(group_velocity(spec, s.k))));
            CHECK(s.dl > 0.0);
        }
    }
}

TEST_CASE("shell at energies outside the band is rejected")
{
    const LatticeSpec spec;
    CHECK_THROWS_AS(energy_shell(spec, 1.5), InvalidInput);
    CHECK_THROWS_AS(energy_shell(spec, -1.4), InvalidInput);
}

TEST_CASE("lattice validation")
{
    CHECK_THROWS_AS((LatticeSpec{0, 3}.validate()), InvalidInput);
    CHECK_THROWS_AS((LatticeSpec{3, 3, 0.0, -0.5, 0.2}.validate()), InvalidInput);
    CHECK_NOTHROW(LatticeSpec{}.validate());
}
