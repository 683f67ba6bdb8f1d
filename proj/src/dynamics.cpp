// dynamics.cpp: Chebyshev propagation, background subtraction and shell cross-check

#include "giantatom/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace giantatom {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNormTolerance = 1e-8;

double periodic_distance2(Vec2 a, Vec2 b)
{
    auto d = [](double x, double y) {
        double r = std::remainder(x - y, 2.0 * kPi);
        return r * r;
    };
    return d(a.x, b.x) + d(a.y, b.y);
}

} // namespace

Hamiltonian::Hamiltonian(const LatticeSpec& spec, const CouplingConfig& config) : spec_(spec), config_(config)
{
    spec.validate();
    config.validate(spec);
    const ComplexGrid shape(spec.half_x, spec.half_y);
    const double scale = config.g / config.weight_norm();
    double weight2 = 0.0;
    for (const auto& p : config.points) {
        sites_.push_back(shape.index(p.n, p.m));
        weights_.push_back(scale * p.weight);
        weight2 += std::norm(scale * p.weight);
    }
    // Weyl bound: the coupling block has operator norm sqrt(sum |scaled w|^2).
    const double coupling = std::sqrt(weight2);
    lower_ = std::min(spec.band_bottom(), config.omega_a) - coupling;
    upper_ = std::max(spec.band_top(), config.omega_a) + coupling;
}

void Hamiltonian::apply(const SingleExcitationState& in, SingleExcitationState& out) const
{
    if (in.photon.half_x() != spec_.half_x || in.photon.half_y() != spec_.half_y) {
        throw InvalidInput("state shape does not match the Hamiltonian lattice");
    }
    if (!out.photon.same_shape(in.photon)) out.photon = ComplexGrid(spec_.half_x, spec_.half_y);

    const int nx = spec_.nx();
    const int ny = spec_.ny();
    const cplx* src = in.photon.data();
    cplx* dst = out.photon.data();
    const double jx = spec_.hop_x;
    const double jy = spec_.hop_y;
    const double wl = spec_.omega_l;
#pragma omp parallel for schedule(static) if (nx * ny > 20000)
    for (int i = 0; i < nx; ++i) {
        const cplx* row = src + static_cast<std::size_t>(i) * ny;
        const cplx* up = src + static_cast<std::size_t>(i + 1 == nx ? 0 : i + 1) * ny;
        const cplx* down = src + static_cast<std::size_t>(i == 0 ? nx - 1 : i - 1) * ny;
        cplx* o = dst + static_cast<std::size_t>(i) * ny;
        for (int j = 0; j < ny; ++j) {
            const int jp = j + 1 == ny ? 0 : j + 1;
            const int jm = j == 0 ? ny - 1 : j - 1;
            o[j] = wl * row[j] - jx * (up[j] + down[j]) - jy * (row[jp] + row[jm]);
        }
    }
    cplx atom = config_.omega_a * in.atom;
    for (std::size_t p = 0; p < sites_.size(); ++p) {
        atom += weights_[p] * src[sites_[p]];
        dst[sites_[p]] += std::conj(weights_[p]) * in.atom;
    }
    out.atom = atom;
}

double Hamiltonian::expectation(const SingleExcitationState& state) const
{
    SingleExcitationState h(spec_);
    apply(state, h);
    return (inner(state.photon, h.photon) + std::conj(state.atom) * h.atom).real();
}

ChebyshevPropagator::ChebyshevPropagator(const Hamiltonian& hamiltonian, double tolerance)
    : h_(hamiltonian), tolerance_(tolerance)
{
}

SingleExcitationState ChebyshevPropagator::step(const SingleExcitationState& state, double t) const
{
    if (t == 0.0) return state;
    const double half_width = 0.5 * (h_.upper_bound() - h_.lower_bound()) * 1.01;
    const double center = 0.5 * (h_.upper_bound() + h_.lower_bound());
    const double x = half_width * std::abs(t);

    std::vector<double> bessel;
    for (int k = 0;; ++k) {
        const double jk = std::cyl_bessel_j(static_cast<double>(k), x);
        bessel.push_back(jk);
        if (k > x && std::abs(jk) < tolerance_ && k > 4) break;
        if (k > static_cast<int>(x) + 400) throw NumericalError("Chebyshev expansion failed to converge");
    }
    const int terms = static_cast<int>(bessel.size());
    last_terms_ = terms;

    // Scaled operator (H - center) / half_width; the sign of t enters through the coefficients.
    const cplx minus_i = t > 0.0 ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
    const double inv = 1.0 / half_width;
    SingleExcitationState h_curr(h_.spec());
    SingleExcitationState t_prev = state;
    SingleExcitationState t_curr(h_.spec());
    h_.apply(t_prev, h_curr);
    {
        auto hv = h_curr.photon.values();
        auto pv = t_prev.photon.values();
        auto cv = t_curr.photon.values();
        for (std::size_t i = 0; i < cv.size(); ++i) cv[i] = (hv[i] - center * pv[i]) * inv;
        t_curr.atom = (h_curr.atom - center * t_prev.atom) * inv;
    }

    cplx phase_k = minus_i;
    SingleExcitationState result(h_.spec());
    {
        const cplx c1 = 2.0 * phase_k * bessel[1];
        auto rv = result.photon.values();
        auto pv = t_prev.photon.values();
        auto cv = t_curr.photon.values();
        for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = bessel[0] * pv[i] + c1 * cv[i];
        result.atom = bessel[0] * t_prev.atom + c1 * t_curr.atom;
    }

    for (int k = 2; k < terms; ++k) {
        h_.apply(t_curr, h_curr);
        phase_k *= minus_i;
        const cplx coef = 2.0 * phase_k * bessel[static_cast<std::size_t>(k)];
        // T_{k+1} = 2 H~ T_k - T_{k-1}, written into t_prev.
        auto hv = h_curr.photon.values();
        auto pv = t_prev.photon.values();
        auto cv = t_curr.photon.values();
        auto rv = result.photon.values();
        for (std::size_t i = 0; i < pv.size(); ++i) {
            pv[i] = 2.0 * (hv[i] - center * cv[i]) * inv - pv[i];
            rv[i] += coef * pv[i];
        }
        t_prev.atom = 2.0 * (h_curr.atom - center * t_curr.atom) * inv - t_prev.atom;
        result.atom += coef * t_prev.atom;
        std::swap(t_prev, t_curr);
    }
    const cplx global = std::polar(1.0, -center * t);
    for (auto& v : result.photon.values()) v *= global;
    result.atom *= global;
    return result;
}

std::vector<double> uniform_times(double t, int count)
{
    if (!(t >= 0.0)) throw InvalidInput("run.t must be non-negative");
    if (count < 2) throw InvalidInput("run.snapshots must be at least 2");
    return linspace(0.0, t, count);
}

EvolutionRun evolve(const LatticeSpec& spec, const CouplingConfig& config, const SingleExcitationState& initial,
                    const std::vector<double>& times)
{
    if (times.empty() || times.front() != 0.0) throw InvalidInput("snapshot times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw InvalidInput("snapshot times must be strictly increasing");
    }
    if (initial.photon.half_x() != spec.half_x || initial.photon.half_y() != spec.half_y) {
        throw InvalidInput("initial state shape does not match the lattice");
    }
    const double norm0 = initial.norm_squared();
    if (std::abs(norm0 - 1.0) > 1e-9) throw InvalidInput("initial state must be normalized");

    const Hamiltonian h(spec, config);
    const ChebyshevPropagator prop(h);
    const EdgeMonitor monitor(initial.photon);
    const double half_width = 0.5 * (h.upper_bound() - h.lower_bound());

    EvolutionRun run{spec, config, initial, times, {}};
    run.snapshots.reserve(times.size());
    run.snapshots.push_back(initial);
    SingleExcitationState state = initial;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double interval = times[i] - times[i - 1];
        const int slices = std::max(1, static_cast<int>(std::ceil(interval * half_width / kMaxChebyshevArgument)));
        for (int s = 0; s < slices; ++s) state = prop.step(state, interval / slices);
        monitor.check(state.photon);
        const double drift = std::abs(state.norm_squared() - norm0);
        if (drift > kNormTolerance) {
            throw NumericalError("norm drift " + std::to_string(drift) + " at t = " + std::to_string(times[i])
                                 + " exceeds the accuracy budget");
        }
        run.snapshots.push_back(state);
    }
    return run;
}

EvolutionRun evolve(const LatticeSpec& spec, const CouplingConfig& config, const SingleExcitationState& initial,
                    double t, int snapshots)
{
    return evolve(spec, config, initial, uniform_times(t, snapshots));
}

EvolutionRun free_run(const LatticeSpec& spec, const SingleExcitationState& initial, const std::vector<double>& times)
{
    const FreePropagator prop(spec);
    const EdgeMonitor monitor(initial.photon);
    EvolutionRun run{spec, CouplingConfig{0.0, 0.0, {{0, 0, 1.0}}}, initial, times, {}};
    const SingleExcitationState photon_only{initial.photon, {0.0, 0.0}};
    for (const double t : times) {
        SingleExcitationState s = prop.evolve(photon_only, t);
        monitor.check(s.photon);
        run.snapshots.push_back(std::move(s));
    }
    return run;
}

std::vector<ComplexGrid> background_subtract(const EvolutionRun& run, const EvolutionRun& free)
{
    if (run.times != free.times) throw InvalidInput("background subtraction needs identical snapshot schedules");
    std::vector<ComplexGrid> out;
    out.reserve(run.snapshots.size());
    for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
        const auto& a = run.snapshots[i].photon;
        const auto& b = free.snapshots[i].photon;
        if (!a.same_shape(b)) throw InvalidInput("background subtraction needs matching lattices");
        ComplexGrid d(a.half_x(), a.half_y());
        auto dv = d.values();
        auto av = a.values();
        auto bv = b.values();
        for (std::size_t k = 0; k < dv.size(); ++k) dv[k] = av[k] - bv[k];
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<double> atom_population(const EvolutionRun& run)
{
    std::vector<double> out;
    out.reserve(run.snapshots.size());
    for (const auto& s : run.snapshots) out.push_back(std::norm(s.atom));
    return out;
}

EvolutionRun emission_run(const LatticeSpec& spec, const CouplingConfig& config, double t, int snapshots)
{
    SingleExcitationState initial(spec);
    initial.atom = 1.0;
    return evolve(spec, config, initial, t, snapshots);
}

RealGrid momentum_snapshot(const ComplexGrid& photon)
{
    return probability(to_momentum(photon));
}

CrossCheck smatrix_crosscheck(const LatticeSpec& spec, const ComplexGrid& difference, const ShellAmplitude& analytic,
                              int bins)
{
    if (bins < 2) throw InvalidInput("cross-check needs at least two bins");
    const auto& samples = analytic.shell.samples;
    if (samples.empty()) throw EmptyShell("cross-check shell has no samples");
    CrossCheck out;
    out.dynamic_bins.assign(static_cast<std::size_t>(bins), 0.0);
    out.analytic_bins.assign(static_cast<std::size_t>(bins), 0.0);
    out.scattered_weight = squared_norm(difference);
    if (out.scattered_weight < kInconclusiveWeight) {
        out.inconclusive = true;
        return out;
    }

    auto bin_of = [&](std::size_t s) {
        return std::min<std::size_t>(s * static_cast<std::size_t>(bins) / samples.size(), static_cast<std::size_t>(bins) - 1);
    };
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& sm = samples[s];
        out.analytic_bins[bin_of(s)] += std::norm(analytic.amplitudes[s]) * sm.grad_norm * sm.dl;
    }

    const MomentumGrid grid(spec);
    const RealGrid weight = momentum_snapshot(difference);
    const double half_band = 0.5 * kCrossCheckBand * spec.bandwidth();
    double in_band = 0.0;
    for (int i = 0; i < spec.nx(); ++i) {
        for (int j = 0; j < spec.ny(); ++j) {
            const Vec2 k = grid.at(i, j);
            if (std::abs(dispersion(spec, k) - analytic.shell.energy) >= half_band) continue;
            std::size_t nearest = 0;
            double best = periodic_distance2(k, samples[0].k);
            for (std::size_t s = 1; s < samples.size(); ++s) {
                const double d = periodic_distance2(k, samples[s].k);
                if (d < best) {
                    best = d;
                    nearest = s;
                }
            }
            out.dynamic_bins[bin_of(nearest)] += weight(i, j);
            in_band += weight(i, j);
        }
    }
    out.band_fraction = in_band / out.scattered_weight;

    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t b = 0; b < out.dynamic_bins.size(); ++b) {
        dot += out.dynamic_bins[b] * out.analytic_bins[b];
        na += out.dynamic_bins[b] * out.dynamic_bins[b];
        nb += out.analytic_bins[b] * out.analytic_bins[b];
    }
    if (na > 0.0 && nb > 0.0) {
        out.similarity = dot / std::sqrt(na * nb);
    } else {
        out.inconclusive = true;
    }
    return out;
}

DecayFit fit_exponential(const std::vector<double>& times, const std::vector<double>& population, double floor)
{
    if (times.size() != population.size()) throw InvalidInput("fit needs equally long series");
    double st = 0.0;
    double sy = 0.0;
    double stt = 0.0;
    double sty = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (population[i] < floor) break;
        const double y = std::log(population[i]);
        st += times[i];
        sy += y;
        stt += times[i] * times[i];
        sty += times[i] * y;
        ++count;
    }
    if (count < 3) throw NumericalError("too few samples above the fit floor for an exponential fit");
    const double denom = count * stt - st * st;
    const double slope = (count * sty - st * sy) / denom;
    const double intercept = (sy - slope * st) / count;
    DecayFit fit{-slope, std::exp(intercept), 0.0, count};
    for (int i = 0; i < count; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double model = fit.amplitude * std::exp(-fit.rate * times[u]);
        fit.max_relative_residual = std::max(fit.max_relative_residual, std::abs(model - population[u]) / population[u]);
    }
    return fit;
}

bool has_revival(const std::vector<double>& population, double rise)
{
    double lowest = std::numeric_limits<double>::infinity();
    for (const double p : population) {
        if (p - lowest > rise) return true;
        lowest = std::min(lowest, p);
    }
    return false;
}

} // namespace giantatom
