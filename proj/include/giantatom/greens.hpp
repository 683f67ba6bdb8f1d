// greens.hpp: Lattice resolvent integrals, atomic self-energy and on-shell scattering amplitudes

#pragma once

#include <vector>

#include "giantatom/coupling.hpp"
#include "giantatom/lattice.hpp"

namespace giantatom {

struct SelfEnergy {
    cplx value{0.0, 0.0};

    double lamb_shift() const noexcept { return value.real(); }
    double decay() const noexcept { return std::abs(value.imag()); }
};

// Retarded lattice resolvent between two sites separated by (dn, dm):
//   (1/4pi^2) integral d^2k exp(i(k_x dn + k_y dm)) / (E - omega(k) + i0+).
// The k_x integral is done in closed form, k_y by adaptive Gauss-Kronrod.
// Throws OutOfBand for E outside the open band and NumericalError at a saddle-point
// (van Hove) energy, where the on-site value diverges logarithmically.
cplx lattice_resolvent(const LatticeSpec& spec, double energy, int dn, int dm);

// Resolvent values for all offsets |dn| <= max_dn, |dm| <= max_dm at one energy.
class ResolventTable {
public:
    ResolventTable(const LatticeSpec& spec, double energy, int max_dn, int max_dm);

    double energy() const noexcept { return energy_; }
    int max_dn() const noexcept { return max_dn_; }
    int max_dm() const noexcept { return max_dm_; }
    cplx operator()(int dn, int dm) const;

private:
    double energy_;
    int max_dn_;
    int max_dm_;
    std::vector<cplx> values_;
};

// Resolvent table covering every pairwise offset of the config's points.
ResolventTable resolvent_table_for(const CouplingConfig& config, const LatticeSpec& spec, double energy);

// Self-energy as the quadratic form (g/sum|w|)^2 sum_pq w_p conj(w_q) K(r_p - r_q).
SelfEnergy self_energy(const CouplingConfig& config, const ResolventTable& table);

// (2J_x/4pi^2) integral d^2k cos(m1 k_y) cos(m2 k_y) / (E - omega(k) + i0+).
cplx xi(int m1, int m2, const LatticeSpec& spec, double energy);

// Sum over the |G|^2 cosine expansion of a mirror-symmetric line, built from xi().
SelfEnergy self_energy_xi_route(const SymmetricLineConfig& line, const LatticeSpec& spec, double energy);

// Integral over k of |G(k)|^2 / (E - omega + i eta), midpoint rule on a points x points grid,
// Richardson-extrapolated over eta, eta/2, eta/4. Independent check of self_energy().
SelfEnergy self_energy_broadened(const CouplingConfig& config, const LatticeSpec& spec, double energy,
                                 double eta, int points);

SelfEnergy self_energy(const CouplingConfig& config, const LatticeSpec& spec, double energy);

struct ShellAmplitude {
    EnergyShell shell;
    Vec2 incident;
    SelfEnergy sigma;
    std::vector<cplx> amplitudes; // smooth factor of <k_f|S-1|k_i> per shell sample

    // Sum of |amplitude|^2 dl over samples with k_y strictly inside (lo, hi).
    double weight(double ky_lo, double ky_hi) const;
};

// -(i/2pi) G*(k_f) G(k_i) / (|grad E(k_f)| (E_i - omega_a - Sigma)) on every shell sample.
// Throws InvalidInput if the shell energy differs from omega(k_i).
ShellAmplitude s_minus_one(const CouplingConfig& config, const LatticeSpec& spec, Vec2 k_in,
                           const EnergyShell& shell);
ShellAmplitude s_minus_one(const CouplingConfig& config, const LatticeSpec& spec, Vec2 k_in,
                           int samples_per_branch = kDefaultShellSamples);

// Forward-scattering probability |1 - i|G(k_i)|^2 / (2pi |grad E| (E_i - omega_a - Sigma))|^2.
struct TransmissionReport {
    double energy{0.0};
    double group_speed{0.0};
    cplx coupling{0.0, 0.0};
    SelfEnergy sigma;
    double probability{1.0};
};

TransmissionReport transmission_report(const CouplingConfig& config, const LatticeSpec& spec, Vec2 k_in);
double transmission(const CouplingConfig& config, const LatticeSpec& spec, Vec2 k_in);

// Transmission over coupling strengths g and detunings Delta = omega_l - omega_a, using
// the template's weights. Row i is g_values[i], column j is delta_values[j].
struct TransmissionGrid {
    std::vector<double> g_values;
    std::vector<double> delta_values;
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const { return values[i * delta_values.size() + j]; }
    double minimum() const;
};

TransmissionGrid transmission_sweep(const CouplingConfig& shape, const LatticeSpec& spec, Vec2 k_in,
                                    const std::vector<double>& g_values, const std::vector<double>& delta_values);

// count values spread evenly over [lo, hi].
std::vector<double> linspace(double lo, double hi, int count);

} // namespace giantatom
