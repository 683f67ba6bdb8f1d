#include "giantatom/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "giantatom/experiment.hpp"

namespace giantatom::acceptance {
namespace {

constexpr double kPi = std::numbers::pi;
const Vec2 kIncident{kPi / 2.0, 0.0};

// Pinned tolerances.
constexpr double kXiTolLarge = 0.01;
constexpr double kXiTolSmall = 0.002;
constexpr double kXiLargeCutoff = 0.01;
constexpr double kTransmissionTol = 0.005;
constexpr double kSweepMinTol = 0.01;
constexpr double kSweepSymmetryTol = 1e-3;
constexpr int kPacketWidth = 25;
constexpr int kPacketWidthTol = 2;
constexpr int kPacketCenter = -48;
constexpr int kPacketCenterTol = 1;
constexpr double kPacketFidelityMin = 0.9;
constexpr double kSimilaritySmall = 0.9;
constexpr double kSimilarityGiant = 0.85;
constexpr double kMirrorTol = 1e-3;
constexpr double kQuadrantFidelity = 0.8;
constexpr double kQuadrantFidelityTol = 0.05;
constexpr double kFitResidualMax = 0.05;
constexpr double kRateTol = 0.10;
constexpr double kRevivalRise = 0.01;
constexpr double kNormDriftMax = 1e-8;
constexpr double kEnergyDriftMax = 1e-8;
constexpr double kParsevalTol = 1e-12;
constexpr double kBesselTol = 1e-9;
constexpr double kDenseTol = 1e-8;
constexpr double kInvarianceTol = 1e-12;
constexpr double kWeightTol = 1e-10;

// Tabulated of xi(m1, m2) at J_y/(2J_x) = 0.2 and E = -2J_y, upper triangle by rows.
constexpr std::array<double, 36> kTabulatedXi{
    -1.9985, 0.1470, -0.0598, 0.0173, -0.0061, 0.00207, -0.00073, 0.000259,
    -0.6298, 0.08215, -0.03295, 0.009679, -0.0034, 0.001163, -0.0004117,
    -0.5208, 0.07454, -0.0303, 0.0088, -0.00309, 0.001082,
    -0.6003, 0.0736, -0.02996, 0.008663, -0.003048,
    -0.59997, 0.0735, -0.02992, 0.008648,
    -0.5994, 0.07351, -0.02991,
    -0.59993, 0.07351,
    -0.59993};
// The (0,7) entry is tabulated without the imaginary unit.
constexpr int kRealTabulatedIndex = 7;

std::string fmt(double v, int digits = 4)
{
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

LatticeSpec desk_lattice() { return LatticeSpec{}; }

LatticeSpec scattering_lattice()
{
    // Wider in x so the stabilized packet tail stays clear of the edges over 2J_x t = 80.
    LatticeSpec spec;
    spec.half_x = 201;
    return spec;
}

CouplingConfig line_config(std::vector<double> ratios, double g = 1.0)
{
    return expand(SymmetricLineConfig{0.0, g, std::move(ratios)});
}

struct ReferenceDesign {
    std::string name;
    CouplingConfig config;
};

std::vector<ReferenceDesign> giant_configs()
{
    return {{"single-window", line_config(presets::single_window_ratios())},
            {"two-window", line_config(presets::two_window_ratios())},
            {"four-window", line_config(presets::four_window_ratios())}};
}

class Context {
public:
    const ScatteringStudy& study(bool giant)
    {
        auto& slot = giant ? giant_ : small_;
        if (!slot) {
            const LatticeSpec spec = scattering_lattice();
            if (!packet_) {
                StabilizationOptions o;
                o.stop_n = kPacketCenter;
                packet_ = prepare_stable_packet(spec, o);
            }
            const CouplingConfig config = giant ? line_config(presets::single_window_ratios()) : small_atom(1.0);
            std::vector<double> extra;
            if (giant) extra.push_back(80.0 + quadrant_travel_time(spec, kIncident, kPi / 2.0, 20));
            slot = scattering_study(spec, config, packet_->state, kIncident, 80.0, 41, extra);
        }
        return *slot;
    }

private:
    std::optional<StablePacket> packet_;
    std::optional<ScatteringStudy> small_;
    std::optional<ScatteringStudy> giant_;
};

struct Outcome {
    bool passed{true};
    std::ostringstream detail;

    void check(bool ok, const std::string& text)
    {
        passed = passed && ok;
        if (detail.tellp() > 0) detail << "; ";
        detail << text << (ok ? "" : " [miss]");
    }
};

void table_regression(Outcome& out)
{
    const LatticeSpec spec = desk_lattice();
    const double energy = -2.0 * spec.hop_y;
    int index = 0;
    int misses = 0;
    double worst = 0.0;
    std::ostringstream missed;
    for (int a = 0; a < 8; ++a) {
        for (int b = a; b < 8; ++b, ++index) {
            const cplx tabulated = index == kRealTabulatedIndex ? cplx{kTabulatedXi[static_cast<std::size_t>(index)], 0.0}
                                                            : cplx{0.0, kTabulatedXi[static_cast<std::size_t>(index)]};
            const cplx value = xi(a, b, spec, energy);
            const double tol = std::abs(tabulated) >= kXiLargeCutoff ? kXiTolLarge : kXiTolSmall;
            const double err = std::abs(value - tabulated);
            worst = std::max(worst, err / tol);
            if (err > tol) {
                ++misses;
                missed << " (" << a << "," << b << "): " << fmt(value.imag(), 5) << "i vs " << fmt(tabulated.imag(), 5)
                       << "i";
            }
        }
    }
    out.check(misses == 0, std::to_string(36 - misses) + "/36 within tolerance" + missed.str());
}

void transmission_points(Outcome& out)
{
    const LatticeSpec spec = desk_lattice();
    const std::vector<std::pair<std::string, std::pair<CouplingConfig, double>>> cases{
        {"small", {small_atom(1.0), 0.7771}},
        {"single-window", {line_config(presets::single_window_ratios()), 0.9951}},
        {"two-window", {line_config(presets::two_window_ratios()), 0.9749}},
        {"four-window", {line_config(presets::four_window_ratios()), 0.9940}}};
    for (const auto& [name, c] : cases) {
        const double t = transmission(c.first, spec, kIncident);
        out.check(std::abs(t - c.second) <= kTransmissionTol, name + " T=" + fmt(t) + " (target " + fmt(c.second) + ")");
    }
}

void sweep_minima(Outcome& out)
{
    const LatticeSpec spec = desk_lattice();
    const double axis = 2.0 * spec.hop_y;
    const auto gs = linspace(0.0, 2.0, 101);
    const auto ds = linspace(axis - 2.0 * spec.hop_x, axis + 2.0 * spec.hop_x, 101);
    const std::vector<std::pair<std::string, std::pair<CouplingConfig, double>>> cases{
        {"small", {small_atom(1.0), 0.7523}}, {"giant", {line_config(presets::single_window_ratios()), 0.9774}}};
    for (const auto& [name, c] : cases) {
        const TransmissionGrid grid = transmission_sweep(c.first, spec, kIncident, gs, ds);
        double on_axis = 1.0;
        double asymmetry = 0.0;
        for (std::size_t i = 0; i < gs.size(); ++i) {
            on_axis = std::min(on_axis, grid.at(i, ds.size() / 2));
            for (std::size_t j = 0; j < ds.size(); ++j) {
                asymmetry = std::max(asymmetry, std::abs(grid.at(i, j) - grid.at(i, ds.size() - 1 - j)));
            }
        }
        out.check(std::abs(on_axis - c.second) <= kSweepMinTol && std::abs(grid.minimum() - on_axis) <= kSweepMinTol,
                  name + " T_min=" + fmt(on_axis) + " (target " + fmt(c.second) + ", grid min " + fmt(grid.minimum())
                      + ")");
        out.check(asymmetry <= kSweepSymmetryTol, name + " mirror deviation " + fmt(asymmetry, 2));
    }
}

void packet_preparation(Outcome& out)
{
    const LatticeSpec spec = desk_lattice();
    StabilizationOptions o;
    o.stop_n = kPacketCenter;
    const StablePacket p = prepare_stable_packet(spec, o);
    out.check(std::abs(p.window.width_x - kPacketWidth) <= kPacketWidthTol, "width " + std::to_string(p.window.width_x));
    out.check(std::abs(p.window.center_n - kPacketCenter) <= kPacketCenterTol,
              "center " + std::to_string(p.window.center_n));
    const Vec2 v = group_velocity(spec, p.window.carrier);
    const double travel = p.window.width_x / v.x;
    const double pf = packet_fidelity(spec, p.state, travel, p.window.width_x, 0);
    out.check(pf > kPacketFidelityMin, "PF over L_x " + fmt(pf) + " after " + std::to_string(p.iterations) + " iterations");
}

void scattering_crosscheck(Outcome& out, Context& ctx)
{
    const auto& small = ctx.study(false).crosscheck;
    out.check(!small.inconclusive && small.similarity > kSimilaritySmall, "small similarity " + fmt(small.similarity));
    const auto& giant = ctx.study(true).crosscheck;
    out.check(!giant.inconclusive && giant.similarity > kSimilarityGiant, "giant similarity " + fmt(giant.similarity));
}

void mirror_symmetry(Outcome& out, Context& ctx)
{
    const auto& s = ctx.study(false);
    const auto& d = s.scattered[s.final_index];
    double peak = 0.0;
    double asymmetry = 0.0;
    for (int n = -d.half_x(); n <= d.half_x(); ++n) {
        for (int m = -d.half_y(); m <= d.half_y(); ++m) {
            peak = std::max(peak, std::norm(d.at(n, m)));
            asymmetry = std::max(asymmetry, std::abs(std::norm(d.at(n, m)) - std::norm(d.at(n, -m))));
        }
    }
    out.check(asymmetry <= kMirrorTol * peak, "deviation/peak " + fmt(asymmetry / peak, 3));
}

void quadrant_packet(Outcome& out, Context& ctx)
{
    const auto& s = ctx.study(true);
    const QuadrantFidelity q = quadrant_fidelity(scattering_lattice(), s.scattered[s.final_index],
                                                 s.scattered[s.final_index + 1], kIncident, kPi / 2.0, 20, 18);
    out.check(std::abs(q.fidelity - kQuadrantFidelity) <= kQuadrantFidelityTol,
              "PF " + fmt(q.fidelity) + " at window (" + std::to_string(q.window.center_n) + ","
                  + std::to_string(q.window.center_m) + "), shift (" + std::to_string(q.shift_n) + ","
                  + std::to_string(q.shift_m) + ")");
}

void optimizer_parity(Outcome& out, const Options& options)
{
    struct Case {
        std::string name;
        LatticeSpec spec;
        OptimizationTarget target;
        CouplingConfig design;
        Parametrization par;
        Algorithm algorithm;
    };
    const LatticeSpec desk = desk_lattice();
    LatticeSpec square = desk;
    square.half_x = 61;
    square.half_y = 61;
    square.hop_y = 0.5;
    std::vector<Case> cases;
    const auto line = Parametrization::line(7, 1.0, 0.0);
    cases.push_back({"single-window", desk, {{{kPi / 2, kPi / 7}}, kIncident, ShellDomain::UpperHalf},
                     line_config(presets::single_window_ratios()), line, Algorithm::GradientDescent});
    cases.push_back({"two-window", desk, {{{kPi / 28, kPi / 14}, {kPi / 2, kPi / 7}}, kIncident, ShellDomain::UpperHalf},
                     line_config(presets::two_window_ratios()), line, Algorithm::GradientDescent});
    cases.push_back({"four-window", desk,
                     {{{kPi / 7, kPi / 7}, {3 * kPi / 7, kPi / 7}, {5 * kPi / 7, kPi / 7}, {27 * kPi / 28, kPi / 14}},
                      kIncident, ShellDomain::UpperHalf},
                     line_config(presets::four_window_ratios()), line, Algorithm::GradientDescent});
    cases.push_back({"5x5 grid", square, {{{0.0, kPi / 13}}, {kPi / 2, kPi / 2}, ShellDomain::Full},
                     grid_config(presets::asymmetric_grid(), 1.0, 0.0), Parametrization::grid(2, 2, 1.0, 0.0),
                     Algorithm::ParticleSwarm});
    for (const auto& c : cases) {
        const ObjectiveEvaluator evaluator(c.spec, c.target, c.par.layout());
        const double reference = q_value(c.design, c.spec, c.target).q;
        RestartOptions ro;
        ro.restarts = options.optimizer_restarts;
        ro.seed = options.seed;
        ro.algorithm = c.algorithm;
        const double best = optimize(evaluator, c.par, ro).best.best.q;
        out.check(best >= reference, c.name + " Q " + fmt(best) + " vs reference " + fmt(reference));
    }
}

void emission(Outcome& out)
{
    const LatticeSpec spec = desk_lattice();
    const CouplingConfig small = small_atom(0.2);
    const EvolutionRun run = emission_run(spec, small, 40.0, 81);
    const auto pop = atom_population(run);
    const DecayFit fit = fit_exponential(run.times, pop);
    const double golden = 2.0 * self_energy(small, spec, small.omega_a).decay();
    out.check(fit.max_relative_residual < kFitResidualMax, "small residual " + fmt(fit.max_relative_residual, 3));
    out.check(std::abs(fit.rate / golden - 1.0) <= kRateTol,
              "small rate " + fmt(fit.rate) + " vs 2|Im Sigma| " + fmt(golden));

    const EvolutionRun giant = emission_run(spec, line_config(presets::single_window_ratios()), 60.0, 601);
    const auto gp = atom_population(giant);
    double lowest = gp.front();
    double rise = 0.0;
    for (double p : gp) {
        rise = std::max(rise, p - lowest);
        lowest = std::min(lowest, p);
    }
    out.check(has_revival(gp, kRevivalRise), "giant largest rise after a minimum " + fmt(rise, 3));
}

SingleExcitationState sample_state(const LatticeSpec& spec, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    SingleExcitationState s(spec);
    for (auto& v : s.photon.values()) v = {normal(rng), normal(rng)};
    s.atom = {normal(rng), normal(rng)};
    s.normalize();
    return s;
}

double max_difference(const ComplexGrid& a, const ComplexGrid& b)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
    return worst;
}

void invariants(Outcome& out)
{
    {
        LatticeSpec spec;
        spec.half_x = 20;
        spec.half_y = 20;
        CouplingConfig config = line_config(presets::single_window_ratios());
        config.omega_a = 0.1;
        const Hamiltonian h(spec, config);
        const ChebyshevPropagator prop(h);
        SingleExcitationState state = gaussian_packet(spec, 0, 0, 3.0, 3.0, {kPi / 3, kPi / 4});
        state.atom = {0.3, -0.2};
        state.normalize();
        const double e0 = h.expectation(state);
        double norm_drift = 0.0;
        double energy_drift = 0.0;
        for (int step = 0; step < 20; ++step) {
            state = prop.step(state, 10.0);
            norm_drift = std::max(norm_drift, std::abs(state.norm_squared() - 1.0));
            energy_drift = std::max(energy_drift, std::abs(h.expectation(state) - e0) / std::abs(e0));
        }
        out.check(norm_drift < kNormDriftMax, "norm drift " + fmt(norm_drift, 2));
        out.check(energy_drift < kEnergyDriftMax, "energy drift " + fmt(energy_drift, 2));
    }
    {
        const LatticeSpec spec = desk_lattice();
        const SingleExcitationState s = sample_state(spec, 11);
        const double pos = squared_norm(s.photon);
        const double mom = squared_norm(to_momentum(s.photon));
        out.check(std::abs(pos - mom) <= kParsevalTol * pos, "Parseval " + fmt(std::abs(pos - mom) / pos, 2));

        SingleExcitationState packet = line_packet(spec, -20);
        const SingleExcitationState other = line_packet(spec, 15);
        for (std::size_t i = 0; i < packet.photon.size(); ++i) {
            packet.photon.values()[i] += cplx{0.0, 0.5} * other.photon.values()[i];
        }
        packet.normalize();
        const double diff =
            max_difference(free_evolve_analytic(spec, packet, 20.0).photon, free_evolve_fft(spec, packet, 20.0).photon);
        out.check(diff < kBesselTol, "Bessel vs momentum " + fmt(diff, 2));
    }
    {
        LatticeSpec spec;
        spec.half_x = 10;
        spec.half_y = 10;
        spec.omega_l = 0.05;
        CouplingConfig config = expand(SymmetricLineConfig{0.1, 0.8, {1.0, -0.5, 0.3}});
        const Hamiltonian h(spec, config);
        const std::size_t sites = spec.site_count();
        const Eigen::Index dim = static_cast<Eigen::Index>(sites + 1);
        Eigen::MatrixXcd dense(dim, dim);
        SingleExcitationState basis(spec);
        SingleExcitationState column(spec);
        for (Eigen::Index j = 0; j < dim; ++j) {
            std::fill(basis.photon.values().begin(), basis.photon.values().end(), cplx{});
            basis.atom = 0.0;
            if (j < dim - 1) basis.photon.values()[static_cast<std::size_t>(j)] = 1.0;
            else basis.atom = 1.0;
            h.apply(basis, column);
            for (std::size_t i = 0; i < sites; ++i) dense(static_cast<Eigen::Index>(i), j) = column.photon.values()[i];
            dense(dim - 1, j) = column.atom;
        }
        const double t = 7.0;
        const Eigen::MatrixXcd u = (cplx{0.0, -t} * dense).exp();
        const SingleExcitationState start = sample_state(spec, 5);
        Eigen::VectorXcd v(dim);
        for (std::size_t i = 0; i < sites; ++i) v(static_cast<Eigen::Index>(i)) = start.photon.values()[i];
        v(dim - 1) = start.atom;
        const Eigen::VectorXcd expected = u * v;
        const SingleExcitationState got = ChebyshevPropagator(h).step(start, t);
        double diff = std::abs(got.atom - expected(dim - 1));
        for (std::size_t i = 0; i < sites; ++i) {
            diff = std::max(diff, std::abs(got.photon.values()[i] - expected(static_cast<Eigen::Index>(i))));
        }
        out.check(diff < kDenseTol, "dense exponential " + fmt(diff, 2));
    }
    {
        const LatticeSpec spec = desk_lattice();
        const OptimizationTarget target{
            {{kPi / 7, kPi / 7}, {3 * kPi / 7, kPi / 7}, {5 * kPi / 7, kPi / 7}, {27 * kPi / 28, kPi / 14}},
            kIncident,
            ShellDomain::UpperHalf};
        const CouplingConfig base = line_config(presets::four_window_ratios());
        const double q = q_value(base, spec, target).q;
        CouplingConfig scaled = base;
        CouplingConfig rotated = base;
        for (auto& p : scaled.points) p.weight *= 2.0;
        for (auto& p : rotated.points) p.weight *= std::polar(1.0, 0.7);
        const double qs = q_value(scaled, spec, target).q;
        const double qr = q_value(rotated, spec, target).q;
        const double dev = std::max(std::abs(qs - q), std::abs(qr - q)) / q;
        out.check(dev <= kInvarianceTol, "Q scale/phase deviation " + fmt(dev, 2));

        double previous = 0.0;
        bool monotone = true;
        for (double width : {0.05, 0.1, 0.2, 0.4, 0.8}) {
            const double w = window_weight(base, spec, kIncident, {kPi / 2, width});
            monotone = monotone && w >= previous - kWeightTol;
            previous = w;
        }
        double windows = 0.0;
        for (const auto& w : target.windows) windows += window_weight(base, spec, kIncident, w);
        const double total = half_shell_weight(base, spec, kIncident);
        out.check(monotone, "window weight monotone in width");
        out.check(total >= windows - kWeightTol, "O - sum P = " + fmt(total - windows, 3));
    }
}

} // namespace

std::string title(int id)
{
    static const std::map<int, std::string> titles{
        {1, "table regression"},     {2, "transmission points"},  {3, "sweep minima"},
        {4, "packet preparation"},   {5, "scattering crosscheck"}, {6, "mirror symmetry"},
        {7, "quadrant fidelity"},    {8, "optimizer parity"},     {9, "emission dynamics"},
        {10, "numerical invariants"}};
    const auto it = titles.find(id);
    return it == titles.end() ? "unknown" : it->second;
}

std::vector<CriterionResult> run(const Options& options, const std::function<void(const CriterionResult&)>& on_result)
{
    Context ctx;
    std::vector<CriterionResult> results;
    for (int id = 1; id <= kCriterionCount; ++id) {
        if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
            continue;
        }
        const auto started = std::chrono::steady_clock::now();
        Outcome out;
        try {
            switch (id) {
            case 1: table_regression(out); break;
            case 2: transmission_points(out); break;
            case 3: sweep_minima(out); break;
            case 4: packet_preparation(out); break;
            case 5: scattering_crosscheck(out, ctx); break;
            case 6: mirror_symmetry(out, ctx); break;
            case 7: quadrant_packet(out, ctx); break;
            case 8: optimizer_parity(out, options); break;
            case 9: emission(out); break;
            case 10: invariants(out); break;
            }
        } catch (const std::exception& e) {
            out.check(false, std::string("error: ") + e.what());
        }
        CriterionResult r{id, title(id), out.passed, out.detail.str(),
                          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()};
        if (on_result) on_result(r);
        results.push_back(std::move(r));
    }
    return results;
}

std::string format_line(const CriterionResult& r)
{
    std::ostringstream os;
    os << (r.passed ? "[PASS] " : "[FAIL] ") << std::setw(2) << r.id << "  " << std::left << std::setw(22) << r.title
       << std::right << " (" << std::fixed << std::setprecision(1) << r.seconds << " s)  " << r.detail;
    return os.str();
}

} // namespace giantatom::acceptance
