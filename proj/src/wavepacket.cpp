// wavepacket.cpp: Packet construction, free propagation and iterative stabilization

#include "giantatom/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace giantatom {

namespace {

constexpr double kPi = std::numbers::pi;

cplx i_power(int d)
{
    switch (((d % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

double bessel_j(int order, double x)
{
    const double v = std::cyl_bessel_j(static_cast<double>(std::abs(order)), x);
    return (order < 0 && (order % 2 != 0)) ? -v : v;
}

int wrap(int value, int half)
{
    const int period = 2 * half + 1;
    int r = (value + half) % period;
    if (r < 0) r += period;
    return r - half;
}

double max_abs(const ComplexGrid& g)
{
    double out = 0.0;
    for (const auto& v : g.values()) out = std::max(out, std::abs(v));
    return out;
}

Vec2 momentum_peak(const LatticeSpec& spec, const ComplexGrid& photon)
{
    const MomentumGrid grid(spec);
    const ComplexGrid k = to_momentum(photon);
    std::size_t best = 0;
    auto values = k.values();
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (std::norm(values[i]) > std::norm(values[best])) best = i;
    }
    const int i = static_cast<int>(best / static_cast<std::size_t>(k.ny()));
    const int j = static_cast<int>(best % static_cast<std::size_t>(k.ny()));
    return grid.at(i, j);
}

} // namespace

void SingleExcitationState::normalize()
{
    const double n = std::sqrt(norm_squared());
    if (!(n > 0.0)) throw InvalidInput("cannot normalize a zero state");
    for (auto& v : photon.values()) v /= n;
    atom /= n;
}

SingleExcitationState line_packet(const LatticeSpec& spec, int column)
{
    spec.validate();
    if (std::abs(column) > spec.half_x) {
        throw InvalidInput("line packet column " + std::to_string(column) + " lies outside the lattice");
    }
    SingleExcitationState out(spec);
    const double alpha = 1.0 / std::sqrt(static_cast<double>(spec.ny()));
    for (int m = -spec.half_y; m <= spec.half_y; ++m) out.photon.at(column, m) = alpha;
    return out;
}

// Tail amplitudes below exp(-40) of the peak are left at zero so the support is finite.
constexpr double kGaussianCutoff = 40.0;

SingleExcitationState gaussian_packet(const LatticeSpec& spec, int n0, int m0, double sigma_x, double sigma_y,
                                      Vec2 carrier)
{
    spec.validate();
    if (!(sigma_x > 0.0) || !(sigma_y > 0.0)) throw InvalidInput("gaussian packet widths must be positive");
    if (std::abs(n0) > spec.half_x || std::abs(m0) > spec.half_y) {
        throw InvalidInput("gaussian packet center lies outside the lattice");
    }
    SingleExcitationState out(spec);
    for (int n = -spec.half_x; n <= spec.half_x; ++n) {
        const double ex = (n - n0) * (n - n0) / (2.0 * sigma_x * sigma_x);
        for (int m = -spec.half_y; m <= spec.half_y; ++m) {
            const double ey = (m - m0) * (m - m0) / (2.0 * sigma_y * sigma_y);
            if (ex + ey > kGaussianCutoff) continue;
            out.photon.at(n, m) = std::exp(-ex - ey) * std::polar(1.0, carrier.x * n + carrier.y * m);
        }
    }
    out.normalize();
    return out;
}

FreePropagator::FreePropagator(const LatticeSpec& spec)
    : spec_(spec), fft_(spec), omega_(dispersion_grid(spec))
{
}

ComplexGrid FreePropagator::evolve(const ComplexGrid& photon, double t) const
{
    ComplexGrid k = fft_.to_momentum(photon);
    auto kv = k.values();
    auto wv = omega_.values();
    for (std::size_t i = 0; i < kv.size(); ++i) kv[i] *= std::polar(1.0, -wv[i] * t);
    return fft_.to_position(k);
}

SingleExcitationState FreePropagator::evolve(const SingleExcitationState& state, double t) const
{
    if (state.atom != cplx{0.0, 0.0}) {
        throw InvalidInput("free evolution acts on photon-only states; atom amplitude is nonzero");
    }
    return {evolve(state.photon, t), {0.0, 0.0}};
}

SingleExcitationState free_evolve_fft(const LatticeSpec& spec, const SingleExcitationState& state, double t)
{
    return FreePropagator(spec).evolve(state, t);
}

SingleExcitationState free_evolve_analytic(const LatticeSpec& spec, const SingleExcitationState& state, double t)
{
    if (state.atom != cplx{0.0, 0.0}) throw InvalidInput("analytic free evolution needs a photon-only state");
    const ComplexGrid& in = state.photon;
    if (in.half_x() != spec.half_x || in.half_y() != spec.half_y) {
        throw InvalidInput("state shape does not match the lattice");
    }
    const double scale = std::max(max_abs(in), 1e-300);
    std::vector<cplx> profile(static_cast<std::size_t>(spec.nx()));
    for (int i = 0; i < spec.nx(); ++i) {
        const cplx first = in(i, 0);
        for (int j = 1; j < spec.ny(); ++j) {
            if (std::abs(in(i, j) - first) > 1e-13 * scale) {
                throw InvalidInput("analytic free evolution requires every column to be uniform along y");
            }
        }
        profile[static_cast<std::size_t>(i)] = first;
    }

    const double x = 2.0 * spec.hop_x * t;
    const int nx = spec.nx();
    const int images = static_cast<int>(std::ceil((x + 120.0) / nx)) + 1;
    std::vector<cplx> kernel(static_cast<std::size_t>(nx));
    for (int d = -spec.half_x; d <= spec.half_x; ++d) {
        cplx sum{0.0, 0.0};
        for (int w = -images; w <= images; ++w) {
            const int order = d + w * nx;
            sum += i_power(order) * bessel_j(order, x);
        }
        kernel[static_cast<std::size_t>(d + spec.half_x)] = sum;
    }
    const cplx phase = std::polar(1.0, -(spec.omega_l - 2.0 * spec.hop_y) * t);

    SingleExcitationState out(spec);
    for (int n = -spec.half_x; n <= spec.half_x; ++n) {
        cplx value{0.0, 0.0};
        for (int src = -spec.half_x; src <= spec.half_x; ++src) {
            const cplx p = profile[static_cast<std::size_t>(src + spec.half_x)];
            if (p == cplx{0.0, 0.0}) continue;
            value += p * kernel[static_cast<std::size_t>(wrap(n - src, spec.half_x) + spec.half_x)];
        }
        value *= phase;
        for (int m = -spec.half_y; m <= spec.half_y; ++m) out.photon.at(n, m) = value;
    }
    return out;
}

ComplexGrid translate(const ComplexGrid& grid, int dn, int dm)
{
    ComplexGrid out(grid.half_x(), grid.half_y());
    for (int n = -grid.half_x(); n <= grid.half_x(); ++n) {
        for (int m = -grid.half_y(); m <= grid.half_y(); ++m) {
            const cplx v = grid.at(n, m);
            if (v == cplx{0.0, 0.0}) continue;
            if (!out.contains(n + dn, m + dm)) {
                throw InvalidInput("translation by (" + std::to_string(dn) + ", " + std::to_string(dm)
                                   + ") moves amplitude outside the lattice");
            }
            out.at(n + dn, m + dm) = v;
        }
    }
    return out;
}

SingleExcitationState translate(const SingleExcitationState& state, int dn, int dm)
{
    return {translate(state.photon, dn, dm), state.atom};
}

ComplexGrid restrict_to(const ComplexGrid& grid, const PacketWindow& window)
{
    ComplexGrid out(grid.half_x(), grid.half_y());
    for (int n = window.lo_n(); n <= window.hi_n(); ++n) {
        for (int m = window.lo_m(); m <= window.hi_m(); ++m) {
            if (grid.contains(n, m)) out.at(n, m) = grid.at(n, m);
        }
    }
    return out;
}

double propagating_fidelity(const SingleExcitationState& evolved, const SingleExcitationState& reference, int dn,
                            int dm)
{
    const ComplexGrid moved = translate(reference.photon, dn, dm);
    return std::norm(inner(evolved.photon, moved) + std::conj(evolved.atom) * reference.atom);
}

double windowed_fidelity(const ComplexGrid& evolved, const ComplexGrid& reference, const PacketWindow& window, int dn,
                         int dm)
{
    const ComplexGrid cut = restrict_to(reference, window);
    const double weight = squared_norm(cut);
    if (!(weight > 0.0)) throw InvalidInput("reference window carries no amplitude");
    return std::norm(inner(evolved, translate(cut, dn, dm))) / (weight * weight);
}

PacketWindow heaviest_window(const ComplexGrid& grid, int width_x, int width_y, int min_n, int min_m)
{
    if (width_x < 1 || width_y < 1) throw InvalidInput("window widths must be positive");
    const int lo_n = std::max(min_n, -grid.half_x());
    const int lo_m = std::max(min_m, -grid.half_y());
    if (lo_n + width_x - 1 > grid.half_x() || lo_m + width_y - 1 > grid.half_y()) {
        throw InvalidInput("window does not fit in the search region");
    }
    // Summed-area table over the search region.
    const int rows = grid.half_x() - lo_n + 1;
    const int cols = grid.half_y() - lo_m + 1;
    std::vector<double> area(static_cast<std::size_t>(rows + 1) * static_cast<std::size_t>(cols + 1), 0.0);
    auto at = [&](int r, int c) -> double& { return area[static_cast<std::size_t>(r) * (cols + 1) + c]; };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            at(r + 1, c + 1) = std::norm(grid.at(lo_n + r, lo_m + c)) + at(r, c + 1) + at(r + 1, c) - at(r, c);
        }
    }
    PacketWindow best{0, 0, width_x, width_y, {}};
    double best_weight = -1.0;
    for (int r = 0; r + width_x <= rows; ++r) {
        for (int c = 0; c + width_y <= cols; ++c) {
            const double w = at(r + width_x, c + width_y) - at(r, c + width_y) - at(r + width_x, c) + at(r, c);
            if (w > best_weight) {
                best_weight = w;
                best.center_n = lo_n + r + width_x / 2;
                best.center_m = lo_m + c + width_y / 2;
            }
        }
    }
    return best;
}

EdgeMonitor::EdgeMonitor(const ComplexGrid& initial)
{
    double x_band = 0.0;
    double y_band = 0.0;
    for (int n = -initial.half_x(); n <= initial.half_x(); ++n) {
        for (int m = -initial.half_y(); m <= initial.half_y(); ++m) {
            const double a = std::abs(initial.at(n, m));
            if (initial.half_x() - std::abs(n) < kBand) x_band = std::max(x_band, a);
            if (initial.half_y() - std::abs(m) < kBand) y_band = std::max(y_band, a);
        }
    }
    watch_x_ = x_band < kThreshold;
    watch_y_ = y_band < kThreshold;
}

double EdgeMonitor::edge_amplitude(const ComplexGrid& grid) const
{
    double worst = 0.0;
    for (int n = -grid.half_x(); n <= grid.half_x(); ++n) {
        const bool x_edge = watch_x_ && grid.half_x() - std::abs(n) < kBand;
        for (int m = -grid.half_y(); m <= grid.half_y(); ++m) {
            const bool y_edge = watch_y_ && grid.half_y() - std::abs(m) < kBand;
            if (x_edge || y_edge) worst = std::max(worst, std::abs(grid.at(n, m)));
        }
    }
    return worst;
}

void EdgeMonitor::check(const ComplexGrid& grid) const
{
    const double a = edge_amplitude(grid);
    if (a >= kThreshold) {
        throw LatticeTooSmall("amplitude " + std::to_string(a) + " reached the lattice boundary band of "
                              + std::to_string(kBand) + " sites");
    }
}

double packet_fidelity(const LatticeSpec& spec, const SingleExcitationState& packet, double t, int dn, int dm)
{
    const FreePropagator prop(spec);
    return propagating_fidelity(prop.evolve(packet, t), packet, dn, dm);
}

Vec2 center_of_mass(const ComplexGrid& grid)
{
    double w = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    for (int n = -grid.half_x(); n <= grid.half_x(); ++n) {
        for (int m = -grid.half_y(); m <= grid.half_y(); ++m) {
            const double p = std::norm(grid.at(n, m));
            w += p;
            sx += p * n;
            sy += p * m;
        }
    }
    if (!(w > 0.0)) throw InvalidInput("center of mass of a zero grid");
    return {sx / w, sy / w};
}

StablePacket prepare_stable_packet(const LatticeSpec& spec, const StabilizationOptions& options)
{
    spec.validate();
    if (!(options.step_time > 0.0)) throw InvalidInput("packet.step_time must be positive");
    if (options.max_iters < 1) throw InvalidInput("packet.max_iters must be at least 1");
    if (!(options.threshold > 0.0 && options.threshold <= 1.0)) throw InvalidInput("packet.threshold must lie in (0, 1]");
    if (options.work_margin < 8) throw InvalidInput("packet.work_margin must be at least 8");

    const double vx = 2.0 * spec.hop_x;
    const double vy = options.move_y ? 2.0 * spec.hop_y : 0.0;
    if (options.move_y && !(vy > 0.0)) throw InvalidInput("diagonal stabilization needs J_y > 0");

    int width_x = options.window_x > 0 ? options.window_x : static_cast<int>(std::lround(vx * options.step_time));
    if (width_x % 2 == 0) ++width_x;
    int width_y = spec.ny();
    if (options.move_y) {
        width_y = options.window_y > 0 ? options.window_y : static_cast<int>(std::lround(vy * options.step_time));
        if (width_y % 2 == 0) ++width_y;
    } else if (options.window_y > 0) {
        throw InvalidInput("packet.window_y applies only to packets stabilized along y");
    }
    if (width_x > spec.nx() || width_y > spec.ny()) throw InvalidInput("packet window exceeds the lattice");

    // Co-moving work frame: the window sits at its origin after every cut.
    const LatticeSpec frame = spec.resized(width_x / 2 + options.work_margin,
                                           options.move_y ? width_y / 2 + options.work_margin : spec.half_y);
    const FreePropagator prop(frame);
    PacketWindow local{0, 0, width_x, width_y, {kPi / 2.0, options.move_y ? kPi / 2.0 : 0.0}};

    SingleExcitationState packet(frame);
    if (options.move_y) {
        packet.photon.at(0, 0) = 1.0;
    } else {
        packet = line_packet(frame, 0);
    }

    // Trial propagation over the window width.
    const double trial_time = width_x / vx;
    const int trial_dn = width_x;
    const int trial_dm = static_cast<int>(std::lround(vy * trial_time));

    StablePacket result;
    long long center_n = options.start_n;
    long long center_m = options.start_m;
    for (int iter = 1; iter <= options.max_iters; ++iter) {
        const long long next_n = options.start_n + std::llround(iter * vx * options.step_time);
        const long long next_m = options.start_m + std::llround(iter * vy * options.step_time);
        const int dn = static_cast<int>(next_n - center_n);
        const int dm = static_cast<int>(next_m - center_m);

        SingleExcitationState evolved = prop.evolve(packet, options.step_time);
        EdgeMonitor(packet.photon).check(evolved.photon);
        PacketWindow cut = local;
        cut.center_n = dn;
        cut.center_m = dm;
        packet.photon = translate(restrict_to(evolved.photon, cut), -dn, -dm);
        packet.normalize();
        center_n = next_n;
        center_m = next_m;

        const SingleExcitationState trial = prop.evolve(packet, trial_time);
        EdgeMonitor(packet.photon).check(trial.photon);
        const double pf = propagating_fidelity(trial, packet, trial_dn, trial_dm);
        result.fidelity_trace.push_back(pf);
        result.fidelity = pf;
        result.iterations = iter;

        const bool reached_n = !options.stop_n || center_n >= *options.stop_n;
        const bool reached_m = !options.stop_m || center_m >= *options.stop_m;
        if (pf >= options.threshold && reached_n && reached_m) break;
        if (iter == options.max_iters) {
            throw NotConverged("packet stabilization stopped after " + std::to_string(iter)
                                   + " iterations with propagating fidelity " + std::to_string(pf),
                               pf);
        }
    }

    // Embed the co-moving packet in the target lattice.
    PacketWindow placed{static_cast<int>(center_n), static_cast<int>(center_m), width_x, width_y, {}};
    if (std::abs(center_n) + placed.half_x() > spec.half_x
        || (options.move_y && std::abs(center_m) + placed.half_y() > spec.half_y)) {
        throw InvalidInput("stabilized packet centered at (" + std::to_string(center_n) + ", " + std::to_string(center_m)
                           + ") does not fit in the lattice");
    }
    SingleExcitationState state(spec);
    for (int n = -local.half_x(); n <= local.half_x(); ++n) {
        for (int m = -frame.half_y; m <= frame.half_y; ++m) {
            const cplx v = packet.photon.at(n, m);
            if (v == cplx{0.0, 0.0}) continue;
            state.photon.at(n + placed.center_n, m + placed.center_m) = v;
        }
    }
    placed.carrier = momentum_peak(spec, state.photon);
    result.state = std::move(state);
    result.window = placed;
    return result;
}

StablePacket diagonal_packet(const LatticeSpec& spec, int window, int start_n, int start_m, int stop_n, int stop_m,
                             double threshold)
{
    StabilizationOptions options;
    options.start_n = start_n;
    options.start_m = start_m;
    options.window_x = window;
    options.window_y = window;
    options.step_time = window / (2.0 * spec.hop_x);
    options.move_y = true;
    options.threshold = threshold;
    options.stop_n = stop_n;
    options.stop_m = stop_m;
    return prepare_stable_packet(spec, options);
}

} // namespace giantatom
