#include "doctest.h"

#include <cmath>
#include <numbers>

#include "giantatom/wavepacket.hpp"

using namespace giantatom;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("line and gaussian packets are normalized")
{
    const LatticeSpec spec{30, 20};
    const auto line = line_packet(spec, -4);
    CHECK(line.norm_squared() == doctest::Approx(1.0));
    CHECK(std::abs(line.photon.at(-4, 7)) == doctest::Approx(1.0 / std::sqrt(41.0)));
    CHECK(line.photon.at(-3, 7) == cplx{});
    const auto g = gaussian_packet(spec, 3, -2, 4.0, 3.0, {pi / 2, 0.3});
    CHECK(g.norm_squared() == doctest::Approx(1.0));
    const Vec2 c = center_of_mass(g.photon);
    CHECK(c.x == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(c.y == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK_THROWS_AS(line_packet(spec, 31), InvalidInput);
}

TEST_CASE("closed-form and momentum-space free evolution agree")
{
    const LatticeSpec spec{40, 12, 0.2, 0.5, 0.3};
    SingleExcitationState s = line_packet(spec, -10);
    const auto other = line_packet(spec, 7);
    for (std::size_t i = 0; i < s.photon.size(); ++i) s.photon.values()[i] += cplx{0.3, -0.6} * other.photon.values()[i];
    s.normalize();
    for (double t : {0.5, 7.0, 30.0}) {
        const auto a = free_evolve_analytic(spec, s, t);
        const auto b = free_evolve_fft(spec, s, t);
        double worst = 0.0;
        for (std::size_t i = 0; i < a.photon.size(); ++i) worst = std::max(worst, std::abs(a.photon.values()[i] - b.photon.values()[i]));
        CHECK(worst < 1e-12);
    }
    CHECK_THROWS_AS(free_evolve_analytic(spec, gaussian_packet(spec, 0, 0, 3, 3, {}), 1.0), InvalidInput);
}

TEST_CASE("free evolution preserves the norm and moves with the group velocity")
{
    const LatticeSpec spec{80, 30};
    const auto s = gaussian_packet(spec, -30, -5, 6.0, 6.0, {pi / 2, pi / 3});
    const auto e = free_evolve_fft(spec, s, 20.0);
    CHECK(e.norm_squared() == doctest::Approx(1.0).epsilon(1e-13));
    const Vec2 v = group_velocity(spec, {pi / 2, pi / 3});
    const Vec2 c0 = center_of_mass(s.photon);
    const Vec2 c1 = center_of_mass(e.photon);
    CHECK(c1.x - c0.x == doctest::Approx(20.0 * v.x).epsilon(0.02));
    CHECK(c1.y - c0.y == doctest::Approx(20.0 * v.y).epsilon(0.02));
}

TEST_CASE("translation and fidelity")
{
    const LatticeSpec spec{30, 20};
    const auto s = gaussian_packet(spec, -5, 0, 1.5, 1.5, {1.0, 0.0});
    CHECK(propagating_fidelity(translate(s, 3, 2), s, 3, 2) == doctest::Approx(1.0));
    const auto far = gaussian_packet(spec, 12, 0, 1.0, 1.0, {});
    CHECK(propagating_fidelity(far, line_packet(spec, -15), 0, 0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(translate(line_packet(spec, 28), 5, 0), InvalidInput);
}

TEST_CASE("windowed fidelity normalizes by the reference window")
{
    const LatticeSpec spec{20, 10};
    const auto s = gaussian_packet(spec, 0, 0, 2.0, 2.0, {});
    const PacketWindow w{0, 0, 5, 5, {}};
    const ComplexGrid moved = translate(restrict_to(s.photon, w), 4, -1);
    CHECK(windowed_fidelity(moved, s.photon, w, 4, -1) == doctest::Approx(1.0));
}

TEST_CASE("heaviest window finds the dominant lobe in the quadrant")
{
    const LatticeSpec spec{30, 30};
    ComplexGrid g(30, 30);
    g.at(10, 12) = 1.0;
    g.at(-10, 12) = 2.0;
    g.at(9, 11) = 0.5;
    const PacketWindow w = heaviest_window(g, 5, 5, 1, 1);
    CHECK(w.contains(10, 12));
    CHECK(w.contains(9, 11));
    CHECK(w.lo_n() >= 1);
}

TEST_CASE("stable packet with the reference preparation parameters")
{
    const LatticeSpec spec;
    StabilizationOptions o;
    o.stop_n = -48;
    const StablePacket p = prepare_stable_packet(spec, o);
    CHECK(std::abs(p.window.width_x - 25) <= 2);
    CHECK(std::abs(p.window.center_n + 48) <= 1);
    CHECK(p.fidelity > 0.9);
    CHECK(p.state.norm_squared() == doctest::Approx(1.0));
    CHECK(p.fidelity_trace.size() == static_cast<std::size_t>(p.iterations));
    const double travel = p.window.width_x / group_velocity(spec, p.window.carrier).x;
    CHECK(packet_fidelity(spec, p.state, travel, p.window.width_x, 0) > 0.9);
}

TEST_CASE("stabilization rejects windows that leave the lattice")
{
    const LatticeSpec spec{40, 10};
    StabilizationOptions o;
    o.window_x = 101;
    CHECK_THROWS_AS(prepare_stable_packet(spec, o), InvalidInput);
}

TEST_CASE("edge monitor flags amplitude reaching the boundary")
{
    const LatticeSpec spec{20, 10};
    const auto s = gaussian_packet(spec, 0, 0, 1.5, 1.5, {});
    const EdgeMonitor monitor(s.photon);
    CHECK_NOTHROW(monitor.check(s.photon));
    CHECK_THROWS_AS(monitor.check(free_evolve_fft(spec, s, 30.0).photon), LatticeTooSmall);
}
