// dynamics.hpp: Single-excitation evolution of the atom plus lattice and scattering analysis

#pragma once

#include <vector>

#include "giantatom/coupling.hpp"
#include "giantatom/greens.hpp"
#include "giantatom/wavepacket.hpp"

namespace giantatom {

// H = H_0 + omega_a |e><e| + sum_p (g/L) (w_p a_p sigma+ + h.c.) on photon grid plus atom amplitude.
class Hamiltonian {
public:
    Hamiltonian(const LatticeSpec& spec, const CouplingConfig& config);

    const LatticeSpec& spec() const noexcept { return spec_; }
    const CouplingConfig& config() const noexcept { return config_; }

    // out = H in. Shapes must match the lattice.
    void apply(const SingleExcitationState& in, SingleExcitationState& out) const;
    double expectation(const SingleExcitationState& state) const;

    // Interval guaranteed to contain the spectrum.
    double lower_bound() const noexcept { return lower_; }
    double upper_bound() const noexcept { return upper_; }

private:
    LatticeSpec spec_;
    CouplingConfig config_;
    std::vector<std::size_t> sites_;  // flat grid index of every coupling point
    std::vector<cplx> weights_;       // (g / sum|w|) w_p
    double lower_{0.0};
    double upper_{0.0};
};

// exp(-i H t) by Chebyshev expansion. Terms are added until the Bessel coefficients drop
// below the tolerance, so each call is accurate to roughly tolerance times the state norm.
class ChebyshevPropagator {
public:
    explicit ChebyshevPropagator(const Hamiltonian& hamiltonian, double tolerance = 1e-15);

    SingleExcitationState step(const SingleExcitationState& state, double t) const;
    // Number of Hamiltonian applications used by the last step.
    int last_terms() const noexcept { return last_terms_; }

private:
    const Hamiltonian& h_;
    double tolerance_;
    mutable int last_terms_{0};
};

struct EvolutionRun {
    LatticeSpec spec;
    CouplingConfig config;
    SingleExcitationState initial;
    std::vector<double> times;
    std::vector<SingleExcitationState> snapshots;
};

inline constexpr int kDefaultSnapshots = 40;
inline constexpr double kMaxChebyshevArgument = 40.0; // spectral half-width times slice duration

// Snapshot times 0, t/(count-1), ..., t.
std::vector<double> uniform_times(double t, int count = kDefaultSnapshots);

// Evolves through the given strictly increasing times (first must be 0). Every snapshot is
// checked against the edge monitor built from the initial state and against the norm.
EvolutionRun evolve(const LatticeSpec& spec, const CouplingConfig& config, const SingleExcitationState& initial,
                    const std::vector<double>& times);
EvolutionRun evolve(const LatticeSpec& spec, const CouplingConfig& config, const SingleExcitationState& initial,
                    double t, int snapshots = kDefaultSnapshots);

// Decoupled evolution with the same schedule (g = 0), through the momentum representation.
EvolutionRun free_run(const LatticeSpec& spec, const SingleExcitationState& initial, const std::vector<double>& times);

// psi_full - psi_free per snapshot (photon part).
std::vector<ComplexGrid> background_subtract(const EvolutionRun& run, const EvolutionRun& free);

std::vector<double> atom_population(const EvolutionRun& run);

// Run started from the excited atom and an empty lattice.
EvolutionRun emission_run(const LatticeSpec& spec, const CouplingConfig& config, double t,
                          int snapshots = kDefaultSnapshots);

// |psi_k|^2 of the photon part.
RealGrid momentum_snapshot(const ComplexGrid& photon);

// Comparison of a dynamically scattered momentum distribution with the analytic shell density.
struct CrossCheck {
    double similarity{0.0};      // cosine similarity of binned weights
    double scattered_weight{0.0}; // |difference|^2 summed over the lattice
    double band_fraction{0.0};   // share of that weight inside the energy band around E_i
    bool inconclusive{false};
    std::vector<double> dynamic_bins;
    std::vector<double> analytic_bins;
};

inline constexpr double kCrossCheckBand = 0.05;    // full band width, fraction of the bandwidth
inline constexpr double kInconclusiveWeight = 1e-6;
inline constexpr int kCrossCheckBins = 64;

CrossCheck smatrix_crosscheck(const LatticeSpec& spec, const ComplexGrid& difference, const ShellAmplitude& analytic,
                              int bins = kCrossCheckBins);

// Exponential fit of a population series over the samples with population >= floor.
struct DecayFit {
    double rate{0.0};
    double amplitude{1.0};
    double max_relative_residual{0.0};
    int samples{0};
};

DecayFit fit_exponential(const std::vector<double>& times, const std::vector<double>& population, double floor = 0.1);

// True when the series rises by more than rise after some local minimum.
bool has_revival(const std::vector<double>& population, double rise = 0.01);

} // namespace giantatom
