// lattice.cpp: Dispersion, momentum transforms and constant-energy contours

#include "giantatom/lattice.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

namespace giantatom {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

int wrap_index(int value, int period)
{
    const int r = value % period;
    return r < 0 ? r + period : r;
}

} // namespace

void LatticeSpec::validate() const
{
    if (half_x <= 0) throw InvalidInput("lattice.N must be a positive integer");
    if (half_y <= 0) throw InvalidInput("lattice.M must be a positive integer");
    if (!(hop_x > 0.0)) throw InvalidInput("lattice.J_x must be positive");
    if (!(hop_y >= 0.0)) throw InvalidInput("lattice.J_y must be non-negative");
    if (!std::isfinite(omega_l)) throw InvalidInput("lattice.omega_l must be finite");
}

LatticeSpec LatticeSpec::resized(int new_half_x, int new_half_y) const
{
    LatticeSpec out = *this;
    out.half_x = new_half_x;
    out.half_y = new_half_y;
    return out;
}

double dispersion(const LatticeSpec& spec, Vec2 k)
{
    return spec.omega_l - 2.0 * spec.hop_x * std::cos(k.x) - 2.0 * spec.hop_y * std::cos(k.y);
}

Vec2 group_velocity(const LatticeSpec& spec, Vec2 k)
{
    return {2.0 * spec.hop_x * std::sin(k.x), 2.0 * spec.hop_y * std::sin(k.y)};
}

MomentumGrid::MomentumGrid(const LatticeSpec& spec)
{
    const double two_pi = 2.0 * std::numbers::pi;
    kx_.reserve(static_cast<std::size_t>(spec.nx()));
    for (int j = -spec.half_x; j <= spec.half_x; ++j) kx_.push_back(two_pi * j / spec.nx());
    ky_.reserve(static_cast<std::size_t>(spec.ny()));
    for (int j = -spec.half_y; j <= spec.half_y; ++j) ky_.push_back(two_pi * j / spec.ny());
}

RealGrid dispersion_grid(const LatticeSpec& spec)
{
    const MomentumGrid grid(spec);
    RealGrid out(spec.half_x, spec.half_y);
    for (int i = 0; i < spec.nx(); ++i) {
        for (int j = 0; j < spec.ny(); ++j) out(i, j) = dispersion(spec, grid.at(i, j));
    }
    return out;
}

struct FourierTransform::Impl {
    int half_x{0};
    int half_y{0};
    int nx{0};
    int ny{0};
    fftw_complex* buffer{nullptr};
    fftw_plan forward{nullptr};
    fftw_plan backward{nullptr};

    Impl(int hx, int hy) : half_x(hx), half_y(hy), nx(2 * hx + 1), ny(2 * hy + 1)
    {
        const std::size_t n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
        buffer = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        if (buffer == nullptr) throw std::bad_alloc();
        std::lock_guard lock(planner_mutex());
        forward = fftw_plan_dft_2d(nx, ny, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_dft_2d(nx, ny, buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    ~Impl()
    {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (buffer) fftw_free(buffer);
    }

    // Lattice coordinate n maps to FFT slot n mod nx; momentum index j maps to slot (j - N) mod nx.
    ComplexGrid run(const ComplexGrid& in, fftw_plan plan) const
    {
        if (in.half_x() != half_x || in.half_y() != half_y) {
            throw InvalidInput("Fourier transform input shape " + std::to_string(in.nx()) + "x"
                               + std::to_string(in.ny()) + " does not match lattice "
                               + std::to_string(nx) + "x" + std::to_string(ny));
        }
        for (int i = 0; i < nx; ++i) {
            const int p = wrap_index(i - half_x, nx);
            for (int j = 0; j < ny; ++j) {
                const int q = wrap_index(j - half_y, ny);
                const cplx v = in(i, j);
                buffer[p * ny + q][0] = v.real();
                buffer[p * ny + q][1] = v.imag();
            }
        }
        fftw_execute(plan);
        const double scale = 1.0 / std::sqrt(static_cast<double>(nx) * static_cast<double>(ny));
        ComplexGrid out(half_x, half_y);
        for (int i = 0; i < nx; ++i) {
            const int p = wrap_index(i - half_x, nx);
            for (int j = 0; j < ny; ++j) {
                const int q = wrap_index(j - half_y, ny);
                out(i, j) = cplx(buffer[p * ny + q][0], buffer[p * ny + q][1]) * scale;
            }
        }
        return out;
    }
};

FourierTransform::FourierTransform(int half_x, int half_y)
    : impl_(std::make_unique<Impl>(half_x, half_y))
{
}

FourierTransform::~FourierTransform() = default;
FourierTransform::FourierTransform(FourierTransform&&) noexcept = default;
FourierTransform& FourierTransform::operator=(FourierTransform&&) noexcept = default;

ComplexGrid FourierTransform::to_momentum(const ComplexGrid& position) const
{
    return impl_->run(position, impl_->forward);
}

ComplexGrid FourierTransform::to_position(const ComplexGrid& momentum) const
{
    return impl_->run(momentum, impl_->backward);
}

int FourierTransform::half_x() const noexcept { return impl_->half_x; }
int FourierTransform::half_y() const noexcept { return impl_->half_y; }

ComplexGrid to_momentum(const ComplexGrid& position)
{
    return FourierTransform(position.half_x(), position.half_y()).to_momentum(position);
}

ComplexGrid to_position(const ComplexGrid& momentum)
{
    return FourierTransform(momentum.half_x(), momentum.half_y()).to_position(momentum);
}

double EnergyShell::total_length() const
{
    double sum = 0.0;
    for (const auto& s : samples) sum += s.dl;
    return sum;
}

double shell_tolerance(const LatticeSpec& spec) { return 1e-9 * spec.bandwidth(); }

EnergyShell energy_shell(const LatticeSpec& spec, double energy, int samples_per_branch)
{
    spec.validate();
    if (samples_per_branch < 2) throw InvalidInput("energy shell needs at least 2 samples per branch");
    if (!(energy > spec.band_bottom() && energy < spec.band_top())) {
        throw OutOfBand("energy " + std::to_string(energy) + " is outside the open band ("
                        + std::to_string(spec.band_bottom()) + ", " + std::to_string(spec.band_top()) + ")");
    }

    const double pi = std::numbers::pi;
    const double tx = 2.0 * spec.hop_x;
    const double ty = 2.0 * spec.hop_y;
    const double offset = spec.omega_l - energy;
    // cos(k_x) = (omega_l - E - 2 J_y cos k_y) / (2 J_x), increasing in |k_y|.
    auto cos_kx = [&](double ky) { return (offset - ty * std::cos(ky)) / tx; };

    double lo = 0.0;
    double hi = pi;
    if (ty > 0.0) {
        if (cos_kx(0.0) < -1.0) lo = std::acos(std::clamp((offset + tx) / ty, -1.0, 1.0));
        if (cos_kx(pi) > 1.0) hi = std::acos(std::clamp((offset - tx) / ty, -1.0, 1.0));
    } else if (std::abs(offset / tx) > 1.0) {
        lo = hi = 0.0;
    }
    if (!(hi > lo)) {
        throw EmptyShell("no k_y admits a solution of omega(k) = " + std::to_string(energy));
    }

    const int per_half = std::max(1, samples_per_branch / 2);
    const double dtheta = pi / per_half;
    const double tol = shell_tolerance(spec);
    const double grad_floor = 1e-14 * spec.bandwidth();

    // Half-contour with k_x >= 0, k_y >= 0; the other quadrants follow by reflection.
    std::vector<ShellSample> quarter;
    quarter.reserve(static_cast<std::size_t>(per_half));
    for (int i = 0; i < per_half; ++i) {
        const double theta = (i + 0.5) * dtheta;
        const double ky = lo + 0.5 * (hi - lo) * (1.0 - std::cos(theta));
        const double dky = 0.5 * (hi - lo) * std::sin(theta) * dtheta;
        const double c = std::clamp(cos_kx(ky), -1.0, 1.0);
        const double kx = std::acos(c);
        const double sin_kx = std::sqrt(std::max(0.0, 1.0 - c * c));
        const Vec2 k{kx, ky};
        const double grad = norm(group_velocity(spec, k));
        if (grad <= grad_floor || sin_kx <= 0.0) continue;
        if (std::abs(dispersion(spec, k) - energy) >= tol) continue;
        quarter.push_back({k, grad, dky * grad / (tx * sin_kx)});
    }
    if (quarter.empty()) {
        throw EmptyShell("energy shell at " + std::to_string(energy) + " has no regular samples");
    }

    EnergyShell shell;
    shell.energy = energy;
    shell.samples.reserve(4 * quarter.size());
    for (const double sx : {1.0, -1.0}) {
        // k_y from -hi to -lo, then lo to hi.
        for (auto it = quarter.rbegin(); it != quarter.rend(); ++it) {
            shell.samples.push_back({{sx * it->k.x, -it->k.y}, it->grad_norm, it->dl});
        }
        for (const auto& s : quarter) {
            shell.samples.push_back({{sx * s.k.x, s.k.y}, s.grad_norm, s.dl});
        }
    }
    return shell;
}

} // namespace giantatom
