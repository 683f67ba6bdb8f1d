// wavepacket.hpp: Single-excitation states, free propagation and packet stabilization

#pragma once

#include <optional>
#include <vector>

#include "giantatom/grid.hpp"
#include "giantatom/lattice.hpp"

namespace giantatom {

struct SingleExcitationState {
    ComplexGrid photon;
    cplx atom{0.0, 0.0};

    SingleExcitationState() = default;
    explicit SingleExcitationState(const LatticeSpec& spec) : photon(spec.half_x, spec.half_y) {}
    SingleExcitationState(ComplexGrid grid, cplx atom_amplitude) : photon(std::move(grid)), atom(atom_amplitude) {}

    double norm_squared() const { return squared_norm(photon) + std::norm(atom); }
    void normalize();
};

struct PacketWindow {
    int center_n{0};
    int center_m{0};
    int width_x{1}; // sites [center_n - width_x/2, center_n - width_x/2 + width_x - 1]
    int width_y{1};
    Vec2 carrier;

    int half_x() const noexcept { return width_x / 2; }
    int half_y() const noexcept { return width_y / 2; }
    int lo_n() const noexcept { return center_n - width_x / 2; }
    int hi_n() const noexcept { return lo_n() + width_x - 1; }
    int lo_m() const noexcept { return center_m - width_y / 2; }
    int hi_m() const noexcept { return lo_m() + width_y - 1; }
    bool contains(int n, int m) const noexcept { return n >= lo_n() && n <= hi_n() && m >= lo_m() && m <= hi_m(); }
};

// Amplitude 1/sqrt(2M+1) on every site of column n = column.
SingleExcitationState line_packet(const LatticeSpec& spec, int column);

// exp(-(n-n0)^2/(2 sx^2) - (m-m0)^2/(2 sy^2)) exp(i k.r), normalized, with the tail below
// exp(-40) of the peak set to zero.
SingleExcitationState gaussian_packet(const LatticeSpec& spec, int n0, int m0, double sigma_x, double sigma_y,
                                      Vec2 carrier);

// Free evolution exp(-i H_0 t) through the momentum representation. Reuses FFT plans.
class FreePropagator {
public:
    explicit FreePropagator(const LatticeSpec& spec);

    const LatticeSpec& spec() const noexcept { return spec_; }
    // Photon-only states; throws InvalidInput if the atom amplitude is nonzero.
    SingleExcitationState evolve(const SingleExcitationState& state, double t) const;
    ComplexGrid evolve(const ComplexGrid& photon, double t) const;
    const FourierTransform& transform() const noexcept { return fft_; }

private:
    LatticeSpec spec_;
    FourierTransform fft_;
    RealGrid omega_;
};

SingleExcitationState free_evolve_fft(const LatticeSpec& spec, const SingleExcitationState& state, double t);

// Closed-form evolution of a state that is uniform along y: each column spreads with the
// kernel i^d J_d(2 J_x t) exp(-i (omega_l - 2 J_y) t), summed over periodic images.
// Throws InvalidInput when some column varies along y.
SingleExcitationState free_evolve_analytic(const LatticeSpec& spec, const SingleExcitationState& state, double t);

// Moves the amplitude at (n, m) to (n + dn, m + dm). Throws InvalidInput if nonzero
// amplitude would leave the lattice.
SingleExcitationState translate(const SingleExcitationState& state, int dn, int dm);
ComplexGrid translate(const ComplexGrid& grid, int dn, int dm);

// Zero everything outside the window.
ComplexGrid restrict_to(const ComplexGrid& grid, const PacketWindow& window);

// |<evolved | translate(reference)>|^2.
double propagating_fidelity(const SingleExcitationState& evolved, const SingleExcitationState& reference, int dn,
                            int dm);
// |<evolved | translate(reference restricted to window)>|^2 / |reference in window|^4.
double windowed_fidelity(const ComplexGrid& evolved, const ComplexGrid& reference, const PacketWindow& window, int dn,
                         int dm);

// Window of the given size with the largest enclosed |amplitude|^2 among placements whose
// sites all satisfy n >= min_n and m >= min_m.
PacketWindow heaviest_window(const ComplexGrid& grid, int width_x, int width_y, int min_n, int min_m);

// Aborts an evolution once amplitude reaches the boundary band of the lattice. Axes whose
// boundary band is already populated by the initial state (for example a column packet that
// spans all of y) are not monitored.
class EdgeMonitor {
public:
    static constexpr int kBand = 3;
    static constexpr double kThreshold = 1e-6;

    explicit EdgeMonitor(const ComplexGrid& initial);
    void check(const ComplexGrid& grid) const;
    bool watches_x() const noexcept { return watch_x_; }
    bool watches_y() const noexcept { return watch_y_; }
    double edge_amplitude(const ComplexGrid& grid) const;

private:
    bool watch_x_{true};
    bool watch_y_{true};
};

struct StabilizationOptions {
    int start_n{-1048};
    int start_m{0};
    double step_time{25.0};      // evolution time between truncations
    int window_x{0};             // 0 selects round(v_x step_time), forced odd
    int window_y{0};             // 0 keeps the full y extent (column packets)
    bool move_y{false};          // also stabilize along y (diagonal packets)
    double threshold{0.9};
    int max_iters{100};
    std::optional<int> stop_n;   // keep iterating until the center reaches this column
    std::optional<int> stop_m;
    int work_margin{96};         // half extent of the co-moving work frame beyond the window
};

struct StablePacket {
    SingleExcitationState state; // embedded in the target lattice
    PacketWindow window;
    int iterations{0};
    double fidelity{0.0};
    std::vector<double> fidelity_trace; // PF after each iteration
};

// Iterates {evolve freely for step_time, cut to the window following the packet center,
// renormalize}. The loop runs in a co-moving frame, so the absolute starting column may lie
// far outside the target lattice. Throws NotConverged when the threshold is not reached.
StablePacket prepare_stable_packet(const LatticeSpec& spec, const StabilizationOptions& options);

// Packet moving along (1, 1) with carrier near (pi/2, pi/2): stabilization from a single
// site along both axes.
StablePacket diagonal_packet(const LatticeSpec& spec, int window, int start_n, int start_m, int stop_n, int stop_m,
                             double threshold = 0.9);

// Fidelity of a packet after propagating over displacement (dn, dm) in time t.
double packet_fidelity(const LatticeSpec& spec, const SingleExcitationState& packet, double t, int dn, int dm);

// Expectation of position over |photon|^2.
Vec2 center_of_mass(const ComplexGrid& grid);

} // namespace giantatom
