// lattice.hpp: 2D coupled-resonator lattice: dispersion, momentum grid, Fourier pair, energy shells

#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "giantatom/grid.hpp"

namespace giantatom {

struct Vec2 {
    double x{0.0};
    double y{0.0};
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

struct LatticeSpec {
    int half_x{121};     // sites n in [-half_x, half_x]
    int half_y{61};      // sites m in [-half_y, half_y]
    double omega_l{0.0}; // resonator frequency
    double hop_x{0.5};   // J_x
    double hop_y{0.2};   // J_y

    int nx() const noexcept { return 2 * half_x + 1; }
    int ny() const noexcept { return 2 * half_y + 1; }
    std::size_t site_count() const noexcept
    {
        return static_cast<std::size_t>(nx()) * static_cast<std::size_t>(ny());
    }
    double band_bottom() const noexcept { return omega_l - 2.0 * hop_x - 2.0 * hop_y; }
    double band_top() const noexcept { return omega_l + 2.0 * hop_x + 2.0 * hop_y; }
    double bandwidth() const noexcept { return band_top() - band_bottom(); }

    // Throws InvalidInput unless half extents are positive, J_x > 0 and J_y >= 0.
    void validate() const;

    // Same hopping and frequency, different extent. Used for co-moving work frames.
    LatticeSpec resized(int new_half_x, int new_half_y) const;
};

double dispersion(const LatticeSpec& spec, Vec2 k);
Vec2 group_velocity(const LatticeSpec& spec, Vec2 k);

// Discrete momenta of the periodic lattice, k_j = 2 pi j / (2N+1) with j in [-N, N].
class MomentumGrid {
public:
    explicit MomentumGrid(const LatticeSpec& spec);

    const std::vector<double>& kx() const noexcept { return kx_; }
    const std::vector<double>& ky() const noexcept { return ky_; }
    // Momentum at array indices (i, j) of a momentum-space grid.
    Vec2 at(int i, int j) const { return {kx_[static_cast<std::size_t>(i)], ky_[static_cast<std::size_t>(j)]}; }

private:
    std::vector<double> kx_;
    std::vector<double> ky_;
};

// omega(k) over the momentum grid, stored in a grid of the lattice shape.
RealGrid dispersion_grid(const LatticeSpec& spec);

// Unitary 2D discrete Fourier pair
//   psi_k = (nx ny)^(-1/2) sum_r psi_r exp(-i k.r),  psi_r = (nx ny)^(-1/2) sum_k psi_k exp(+i k.r).
// Owns FFTW plans; one instance must not be used from several threads at once.
class FourierTransform {
public:
    FourierTransform(int half_x, int half_y);
    explicit FourierTransform(const LatticeSpec& spec) : FourierTransform(spec.half_x, spec.half_y) {}
    ~FourierTransform();
    FourierTransform(FourierTransform&&) noexcept;
    FourierTransform& operator=(FourierTransform&&) noexcept;
    FourierTransform(const FourierTransform&) = delete;
    FourierTransform& operator=(const FourierTransform&) = delete;

    ComplexGrid to_momentum(const ComplexGrid& position) const;
    ComplexGrid to_position(const ComplexGrid& momentum) const;

    int half_x() const noexcept;
    int half_y() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

ComplexGrid to_momentum(const ComplexGrid& position);
ComplexGrid to_position(const ComplexGrid& momentum);

struct ShellSample {
    Vec2 k;
    double grad_norm{0.0}; // |grad omega(k)|
    double dl{0.0};        // arc-length weight of this sample
};

struct EnergyShell {
    double energy{0.0};
    std::vector<ShellSample> samples;

    double total_length() const;
};

inline constexpr int kDefaultShellSamples = 2048;

// Tolerance used to validate shell samples: 1e-9 of the bandwidth.
double shell_tolerance(const LatticeSpec& spec);

// Constant-energy contour omega(k) = E, parametrized by k_y. Each branch (sign of k_x)
// carries samples_per_branch samples covering k_y in [-pi, pi] (or the admissible part
// of it). Sample points cluster toward turning points so the arc-length weights stay
// bounded. Throws OutOfBand unless E lies strictly inside the band, and EmptyShell if
// no k_y admits a solution.
EnergyShell energy_shell(const LatticeSpec& spec, double energy, int samples_per_branch = kDefaultShellSamples);

} // namespace giantatom
