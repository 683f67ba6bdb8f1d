#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "giantatom/dynamics.hpp"

using namespace giantatom;

namespace {
constexpr double pi = std::numbers::pi;

Eigen::MatrixXcd dense_hamiltonian(const Hamiltonian& h)
{
    const auto& spec = h.spec();
    const Eigen::Index dim = static_cast<Eigen::Index>(spec.site_count() + 1);
    Eigen::MatrixXcd out(dim, dim);
    SingleExcitationState in(spec);
    SingleExcitationState col(spec);
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (auto& v : in.photon.values()) v = 0.0;
        in.atom = j == dim - 1 ? 1.0 : 0.0;
        if (j < dim - 1) in.photon.values()[static_cast<std::size_t>(j)] = 1.0;
        h.apply(in, col);
        for (Eigen::Index i = 0; i < dim - 1; ++i) out(i, j) = col.photon.values()[static_cast<std::size_t>(i)];
        out(dim - 1, j) = col.atom;
    }
    return out;
}

SingleExcitationState random_state(const LatticeSpec& spec, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> d;
    SingleExcitationState s(spec);
    for (auto& v : s.photon.values()) v = {d(rng), d(rng)};
    s.atom = {d(rng), d(rng)};
    s.normalize();
    return s;
}
} // namespace

TEST_CASE("Hamiltonian is Hermitian with the expected bright-mode coupling")
{
    const LatticeSpec spec{4, 4, 0.1, 0.5, 0.2};
    const CouplingConfig c = expand(SymmetricLineConfig{0.3, 0.7, {1.0, -0.4}});
    const Eigen::MatrixXcd h = dense_hamiltonian(Hamiltonian(spec, c));
    CHECK((h - h.adjoint()).norm() < 1e-14);
    const Eigen::Index atom = h.rows() - 1;
    CHECK(h(atom, atom).real() == doctest::Approx(0.3));
    const double scale = 0.7 / 1.8;
    CHECK(std::abs(h(atom, static_cast<Eigen::Index>(spec.site_count() / 2)) - scale) < 1e-14);
}

TEST_CASE("Chebyshev propagation matches the dense matrix exponential on 21x21")
{
    const LatticeSpec spec{10, 10, 0.05, 0.5, 0.2};
    CouplingConfig c;
    c.g = 0.9;
    c.omega_a = 0.2;
    c.points = {{0, 0, 1.0}, {2, -1, cplx{0.0, 0.5}}, {-3, 4, cplx{-0.3, 0.8}}};
    const Hamiltonian h(spec, c);
    const Eigen::MatrixXcd dense = dense_hamiltonian(h);
    const SingleExcitationState start = random_state(spec, 4);
    Eigen::VectorXcd v(dense.rows());
    for (std::size_t i = 0; i < spec.site_count(); ++i) v(static_cast<Eigen::Index>(i)) = start.photon.values()[i];
    v(dense.rows() - 1) = start.atom;
    const ChebyshevPropagator prop(h);
    for (double t : {0.3, 4.0, 12.5}) {
        const Eigen::VectorXcd expected = (cplx{0.0, -t} * dense).exp() * v;
        const SingleExcitationState got = prop.step(start, t);
        double worst = std::abs(got.atom - expected(dense.rows() - 1));
        for (std::size_t i = 0; i < spec.site_count(); ++i) {
            worst = std::max(worst, std::abs(got.photon.values()[i] - expected(static_cast<Eigen::Index>(i))));
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("long propagation conserves norm and energy")
{
    LatticeSpec spec{20, 20};
    CouplingConfig c = expand(SymmetricLineConfig{0.1, 1.0, presets::single_window_ratios()});
    const Hamiltonian h(spec, c);
    const ChebyshevPropagator prop(h);
    SingleExcitationState s = random_state(spec, 8);
    const double e0 = h.expectation(s);
    for (int i = 0; i < 20; ++i) s = prop.step(s, 10.0);
    CHECK(std::abs(s.norm_squared() - 1.0) < 1e-10);
    CHECK(std::abs(h.expectation(s) - e0) < 1e-10 * std::max(1.0, std::abs(e0)));
}

TEST_CASE("spectral bounds enclose the dense spectrum")
{
    const LatticeSpec spec{5, 5};
    const Hamiltonian h(spec, small_atom(1.3, 0.4));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dense_hamiltonian(h));
    CHECK(eig.eigenvalues().minCoeff() >= h.lower_bound() - 1e-12);
    CHECK(eig.eigenvalues().maxCoeff() <= h.upper_bound() + 1e-12);
}

TEST_CASE("uncoupled evolution equals free propagation")
{
    const LatticeSpec spec{60, 20};
    const auto packet = gaussian_packet(spec, -20, 0, 4.0, 4.0, {pi / 2, 0.0});
    const auto times = uniform_times(10.0, 3);
    const EvolutionRun run = evolve(spec, small_atom(0.0), packet, times);
    const EvolutionRun free = free_run(spec, packet, times);
    const auto diff = background_subtract(run, free);
    for (const auto& d : diff) CHECK(squared_norm(d) < 1e-24);
    for (double p : atom_population(run)) CHECK(p == 0.0);
}

TEST_CASE("uniform snapshot times")
{
    const auto t = uniform_times(8.0, 5);
    REQUIRE(t.size() == 5);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 8.0);
    CHECK(t[1] == doctest::Approx(2.0));
    CHECK_THROWS_AS(uniform_times(1.0, 1), InvalidInput);
}

TEST_CASE("evolution that reaches the edge raises")
{
    const LatticeSpec spec{15, 10};
    const auto packet = gaussian_packet(spec, 0, 0, 1.5, 1.5, {pi / 2, 0.0});
    CHECK_THROWS_AS(evolve(spec, small_atom(0.5), packet, 40.0, 4), LatticeTooSmall);
}

TEST_CASE("emission starts from a fully excited atom")
{
    const LatticeSpec spec;
    const EvolutionRun run = emission_run(spec, small_atom(0.2), 10.0, 3);
    const auto pop = atom_population(run);
    CHECK(pop.front() == 1.0);
    CHECK(pop.back() < 1.0);
}

TEST_CASE("small-atom decay follows the golden-rule rate")
{
    const LatticeSpec spec;
    const CouplingConfig c = small_atom(0.2);
    const EvolutionRun run = emission_run(spec, c, 40.0, 81);
    const DecayFit fit = fit_exponential(run.times, atom_population(run));
    const double golden = 2.0 * self_energy(c, spec, 0.0).decay();
    CHECK(fit.rate == doctest::Approx(golden).epsilon(0.10));
    CHECK(fit.max_relative_residual < 0.05);
}

TEST_CASE("exponential fit recovers synthetic data")
{
    std::vector<double> t;
    std::vector<double> p;
    for (int i = 0; i <= 40; ++i) {
        t.push_back(0.25 * i);
        p.push_back(0.9 * std::exp(-0.3 * t.back()));
    }
    const DecayFit fit = fit_exponential(t, p);
    CHECK(fit.rate == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(fit.amplitude == doctest::Approx(0.9).epsilon(1e-10));
    CHECK(fit.max_relative_residual < 1e-10);
}

TEST_CASE("revival detection")
{
    CHECK_FALSE(has_revival({1.0, 0.8, 0.6, 0.5, 0.5}));
    CHECK(has_revival({1.0, 0.5, 0.2, 0.25, 0.1}));
    CHECK_FALSE(has_revival({1.0, 0.5, 0.2, 0.205, 0.1}));
}

TEST_CASE("crosscheck of a small-atom scattering run")
{
    LatticeSpec spec;
    spec.half_x = 201;
    StabilizationOptions o;
    o.stop_n = -48;
    const StablePacket packet = prepare_stable_packet(spec, o);
    const CouplingConfig c = small_atom(1.0);
    const auto times = uniform_times(80.0, 5);
    const EvolutionRun run = evolve(spec, c, packet.state, times);
    const auto diff = background_subtract(run, free_run(spec, packet.state, times));
    const CrossCheck cc = smatrix_crosscheck(spec, diff.back(), s_minus_one(c, spec, {pi / 2, 0.0}));
    CHECK_FALSE(cc.inconclusive);
    CHECK(cc.similarity > 0.9);
    CHECK(cc.dynamic_bins.size() == static_cast<std::size_t>(kCrossCheckBins));
    for (const auto& snap : run.snapshots) CHECK(snap.norm_squared() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("crosscheck without scattered weight is inconclusive")
{
    const LatticeSpec spec;
    const CrossCheck cc = smatrix_crosscheck(spec, ComplexGrid(spec.half_x, spec.half_y), s_minus_one(small_atom(1.0), spec, {pi / 2, 0.0}));
    CHECK(cc.inconclusive);
}
