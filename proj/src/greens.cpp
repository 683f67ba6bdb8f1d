// greens.cpp: Semi-analytic resolvent integrals, self-energy and scattering amplitudes

#include "giantatom/greens.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace giantatom {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadTolerance = 1e-12;
constexpr unsigned kQuadDepth = 18;
constexpr double kEdgeNudge = 1e-6;

void require_in_band(const LatticeSpec& spec, double energy)
{
    if (!(energy > spec.band_bottom() && energy < spec.band_top())) {
        throw OutOfBand("energy " + std::to_string(energy) + " is outside the open band ("
                        + std::to_string(spec.band_bottom()) + ", " + std::to_string(spec.band_top()) + ")");
    }
}

// Integral over k_x in [-pi, pi] of cos(d k_x) / (a + cos k_x + i0+).
cplx kx_integral(double a, int d)
{
    d = std::abs(d);
    if (std::abs(a) > 1.0) {
        const double s = std::copysign(std::sqrt(a * a - 1.0), a);
        const double rho = a - s;
        return 2.0 * kPi * std::pow(-rho, d) / s;
    }
    const double theta = std::acos(a);
    return cplx(0.0, -2.0 * kPi) * std::polar(1.0, d * (kPi - theta)) / std::sqrt(1.0 - a * a);
}

// (1/4pi^2) integral over k_y in [-pi, pi] of weight(k_y) * (1/2J_x) * kx_integral(A(k_y), dn),
// for weight even in k_y. Integration runs over [0, pi] between the points where |A| = 1;
// a cosine substitution on each piece absorbs the inverse-square-root endpoint behavior.
template <typename Weight>
cplx ky_integral(const LatticeSpec& spec, double energy, int dn, Weight&& weight)
{
    const double tx = 2.0 * spec.hop_x;
    const double ty = 2.0 * spec.hop_y;
    const double shift = energy - spec.omega_l;
    auto a_of = [&](double ky) { return (shift + ty * std::cos(ky)) / tx; };

    const double edge_tol = 1e-12;
    for (const double ky : {0.0, kPi}) {
        const double a = a_of(ky);
        if (std::abs(std::abs(a) - 1.0) < edge_tol) {
            throw NumericalError("resolvent diverges at energy " + std::to_string(energy)
                                 + ": it coincides with a saddle point of the dispersion");
        }
    }

    std::vector<double> cuts{0.0, kPi};
    if (ty > 0.0) {
        for (const double target : {1.0, -1.0}) {
            const double c = (target * tx - shift) / ty;
            if (c > -1.0 && c < 1.0) cuts.push_back(std::acos(c));
        }
    }
    std::sort(cuts.begin(), cuts.end());

    auto integrand = [&](double ky) { return weight(ky) * kx_integral(a_of(ky), dn); };

    cplx total{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        if (!(hi > lo)) continue;
        const double half = 0.5 * (hi - lo);
        auto at = [&](double u) {
            const double ky = lo + half * (1.0 - std::cos(u));
            return integrand(ky) * (half * std::sin(u));
        };
        // A node next to a cut can round onto |A| = 1 exactly. The mapped integrand stays
        // bounded there, so take its value just inside the interval.
        auto mapped = [&](double u) {
            const cplx v = at(u);
            if (std::isfinite(v.real()) && std::isfinite(v.imag())) return v;
            return at(std::clamp(u, kEdgeNudge, kPi - kEdgeNudge));
        };
        double err = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(mapped, 0.0, kPi, kQuadDepth,
                                                                               kQuadTolerance, &err);
    }
    // Factor 2 for k_y in [-pi, 0].
    return 2.0 * total / (tx * 4.0 * kPi * kPi);
}

std::pair<int, int> max_offsets(const CouplingConfig& config)
{
    int min_n = config.points.front().n;
    int max_n = min_n;
    int min_m = config.points.front().m;
    int max_m = min_m;
    for (const auto& p : config.points) {
        min_n = std::min(min_n, p.n);
        max_n = std::max(max_n, p.n);
        min_m = std::min(min_m, p.m);
        max_m = std::max(max_m, p.m);
    }
    return {max_n - min_n, max_m - min_m};
}

} // namespace

cplx lattice_resolvent(const LatticeSpec& spec, double energy, int dn, int dm)
{
    spec.validate();
    require_in_band(spec, energy);
    return ky_integral(spec, energy, dn, [dm](double ky) { return std::cos(dm * ky); });
}

ResolventTable::ResolventTable(const LatticeSpec& spec, double energy, int max_dn, int max_dm)
    : energy_(energy), max_dn_(std::abs(max_dn)), max_dm_(std::abs(max_dm))
{
    spec.validate();
    require_in_band(spec, energy);
    values_.reserve(static_cast<std::size_t>(max_dn_ + 1) * static_cast<std::size_t>(max_dm_ + 1));
    for (int dn = 0; dn <= max_dn_; ++dn) {
        for (int dm = 0; dm <= max_dm_; ++dm) {
            values_.push_back(ky_integral(spec, energy, dn, [dm](double ky) { return std::cos(dm * ky); }));
        }
    }
}

cplx ResolventTable::operator()(int dn, int dm) const
{
    dn = std::abs(dn);
    dm = std::abs(dm);
    if (dn > max_dn_ || dm > max_dm_) {
        throw InvalidInput("resolvent offset (" + std::to_string(dn) + ", " + std::to_string(dm)
                           + ") exceeds the table range");
    }
    return values_[static_cast<std::size_t>(dn) * static_cast<std::size_t>(max_dm_ + 1) + static_cast<std::size_t>(dm)];
}

ResolventTable resolvent_table_for(const CouplingConfig& config, const LatticeSpec& spec, double energy)
{
    config.validate();
    const auto [dn, dm] = max_offsets(config);
    return ResolventTable(spec, energy, dn, dm);
}

SelfEnergy self_energy(const CouplingConfig& config, const ResolventTable& table)
{
    config.validate();
    const double scale = config.g / config.weight_norm();
    cplx sum{0.0, 0.0};
    for (const auto& p : config.points) {
        for (const auto& q : config.points) {
            sum += p.weight * std::conj(q.weight) * table(p.n - q.n, p.m - q.m);
        }
    }
    return {scale * scale * sum};
}

SelfEnergy self_energy(const CouplingConfig& config, const LatticeSpec& spec, double energy)
{
    config.validate();
    if (config.g == 0.0) {
        require_in_band(spec, energy);
        return {};
    }
    return self_energy(config, resolvent_table_for(config, spec, energy));
}

cplx xi(int m1, int m2, const LatticeSpec& spec, double energy)
{
    spec.validate();
    require_in_band(spec, energy);
    const cplx k = ky_integral(spec, energy, 0, [m1, m2](double ky) { return std::cos(m1 * ky) * std::cos(m2 * ky); });
    return 2.0 * spec.hop_x * k;
}

SelfEnergy self_energy_xi_route(const SymmetricLineConfig& line, const LatticeSpec& spec, double energy)
{
    const CouplingConfig full = expand(line);
    full.validate();
    // G(k) = (g/norm) sum_j c_j cos(j k_y) with c_0 = ratios[0], c_j = 2 ratios[j].
    std::vector<double> c(line.ratios);
    for (std::size_t j = 1; j < c.size(); ++j) c[j] *= 2.0;
    cplx sum{0.0, 0.0};
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = i; j < c.size(); ++j) {
            const double mult = (i == j) ? 1.0 : 2.0;
            sum += mult * c[i] * c[j] * xi(static_cast<int>(i), static_cast<int>(j), spec, energy);
        }
    }
    const double scale = line.g / full.weight_norm();
    return {scale * scale * sum / (2.0 * spec.hop_x)};
}

SelfEnergy self_energy_broadened(const CouplingConfig& config, const LatticeSpec& spec, double energy,
                                 double eta, int points)
{
    config.validate();
    spec.validate();
    require_in_band(spec, energy);
    if (!(eta > 0.0)) throw InvalidInput("broadening must be positive");
    if (points < 8) throw InvalidInput("broadened quadrature needs at least 8 points per axis");

    const double h = 2.0 * kPi / points;
    const double scale = config.g / config.weight_norm();
    const std::array<double, 3> etas{eta, eta / 2.0, eta / 4.0};
    std::array<cplx, 3> sums{};

    std::vector<cplx> row_phase(config.points.size());
    std::vector<cplx> col_phase(static_cast<std::size_t>(points) * config.points.size());
    for (int j = 0; j < points; ++j) {
        const double ky = -kPi + (j + 0.5) * h;
        for (std::size_t p = 0; p < config.points.size(); ++p) {
            col_phase[static_cast<std::size_t>(j) * config.points.size() + p] = std::polar(1.0, ky * config.points[p].m);
        }
    }
    for (int i = 0; i < points; ++i) {
        const double kx = -kPi + (i + 0.5) * h;
        for (std::size_t p = 0; p < config.points.size(); ++p) {
            row_phase[p] = config.points[p].weight * std::polar(1.0, kx * config.points[p].n);
        }
        for (int j = 0; j < points; ++j) {
            const double ky = -kPi + (j + 0.5) * h;
            cplx g{0.0, 0.0};
            const cplx* col = &col_phase[static_cast<std::size_t>(j) * config.points.size()];
            for (std::size_t p = 0; p < config.points.size(); ++p) g += row_phase[p] * col[p];
            const double g2 = std::norm(g);
            const double detuning = energy - dispersion(spec, {kx, ky});
            for (std::size_t e = 0; e < etas.size(); ++e) sums[e] += g2 / cplx(detuning, etas[e]);
        }
    }
    const double norm = scale * scale / (static_cast<double>(points) * points);
    const cplx extrapolated = (sums[0] - 6.0 * sums[1] + 8.0 * sums[2]) / 3.0;
    return {extrapolated * norm};
}

double ShellAmplitude::weight(double ky_lo, double ky_hi) const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        const double ky = shell.samples[i].k.y;
        if (ky > ky_lo && ky < ky_hi) sum += std::norm(amplitudes[i]) * shell.samples[i].dl;
    }
    return sum;
}

ShellAmplitude s_minus_one(const CouplingConfig& config, const LatticeSpec& spec, Vec2 k_in, const EnergyShell& shell)
{
    config.validate(spec);
    const double energy = dispersion(spec, k_in);
    if (std::abs(shell.energy - energy) > shell_tolerance(spec)) {
        throw InvalidInput("shell energy " + std::to_string(shell.energy) + " differs from incident energy "
                           + std::to_string(energy));
    }
    ShellAmplitude out;
    out.shell = shell;
    out.incident = k_in;
    out.amplitudes.assign(shell.samples.size(), cplx{});
    if (config.g == 0.0) return out;

    out.sigma = self_energy(config, spec, energy);
    const cplx g_in = coupling_factor(config, k_in);
    const cplx denom = energy - config.omega_a - out.sigma.value;
    const cplx prefactor = cplx(0.0, -1.0 / (2.0 * kPi)) * g_in / denom;
    for (std::size_t i = 0; i < shell.samples.size(); ++i) {
        const auto& s = shell.samples[i];
        out.amplitudes[i] = prefactor * std::conj(coupling_factor(config, s.k)) / s.grad_norm;
    }
    return out;
}

ShellAmplitude s_minus_one(const CouplingConfig& config, const LatticeSpec& spec, Vec2 k_in, int samples_per_branch)
{
    return s_minus_one(config, spec, k_in, energy_shell(spec, dispersion(spec, k_in), samples_per_branch));
}

TransmissionReport transmission_report(const CouplingConfig& config, const LatticeSpec& spec, Vec2 k_in)
{
    config.validate(spec);
    TransmissionReport out;
    out.energy = dispersion(spec, k_in);
    require_in_band(spec, out.energy);
    out.group_speed = norm(group_velocity(spec, k_in));
    if (!(out.group_speed > 1e-12 * spec.bandwidth())) {
        throw InvalidInput("incident mode has zero group velocity");
    }
    if (config.g == 0.0) return out;
    out.coupling = coupling_factor(config, k_in);
    out.sigma = self_energy(config, spec, out.energy);
    const cplx denom = 2.0 * kPi * out.group_speed * (out.energy - config.omega_a - out.sigma.value);
    out.probability = std::norm(1.0 - cplx(0.0, 1.0) * std::norm(out.coupling) / denom);
    return out;
}

double transmission(const CouplingConfig& config, const LatticeSpec& spec, Vec2 k_in)
{
    return transmission_report(config, spec, k_in).probability;
}

double TransmissionGrid::minimum() const
{
    if (values.empty()) throw InvalidInput("empty transmission grid");
    return *std::min_element(values.begin(), values.end());
}

TransmissionGrid transmission_sweep(const CouplingConfig& shape, const LatticeSpec& spec, Vec2 k_in,
                                    const std::vector<double>& g_values, const std::vector<double>& delta_values)
{
    if (g_values.empty() || delta_values.empty()) throw InvalidInput("transmission sweep needs non-empty axes");
    CouplingConfig unit = shape;
    unit.g = 1.0;
    unit.validate(spec);
    const double energy = dispersion(spec, k_in);
    require_in_band(spec, energy);
    const double speed = norm(group_velocity(spec, k_in));
    if (!(speed > 1e-12 * spec.bandwidth())) throw InvalidInput("incident mode has zero group velocity");

    // Sigma scales as g^2 and |G|^2 as g^2, so one resolvent evaluation serves the whole grid.
    const cplx sigma_unit = self_energy(unit, spec, energy).value;
    const double coupling_unit = std::norm(coupling_factor(unit, k_in));

    TransmissionGrid out;
    out.g_values = g_values;
    out.delta_values = delta_values;
    out.values.reserve(g_values.size() * delta_values.size());
    for (const double g : g_values) {
        for (const double delta : delta_values) {
            if (g == 0.0) {
                out.values.push_back(1.0);
                continue;
            }
            const double omega_a = spec.omega_l - delta;
            const cplx denom = 2.0 * kPi * speed * (energy - omega_a - g * g * sigma_unit);
            out.values.push_back(std::norm(1.0 - cplx(0.0, 1.0) * g * g * coupling_unit / denom));
        }
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, int count)
{
    if (count < 1) throw InvalidInput("linspace needs at least one point");
    std::vector<double> out(static_cast<std::size_t>(count));
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    return out;
}

} // namespace giantatom
