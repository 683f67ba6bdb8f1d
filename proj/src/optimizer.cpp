#include "giantatom/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "giantatom/error.hpp"

namespace giantatom {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInitialVelocity = 0.1; // fraction of the coordinate range
constexpr double kMaxVelocity = 0.5;
constexpr int kMaxBacktracks = 40;

double log_q(const ObjectiveReport& r)
{
    return r.q > 0.0 ? std::log(r.q) : -std::numeric_limits<double>::infinity();
}

double wrap_phase(double x)
{
    x = std::fmod(x, kTwoPi);
    return x < 0.0 ? x + kTwoPi : x;
}

// Shortest signed difference a - b on the circle.
double phase_difference(double a, double b)
{
    double d = std::fmod(a - b, kTwoPi);
    if (d > kPi) d -= kTwoPi;
    if (d < -kPi) d += kTwoPi;
    return d;
}

void wrap_periodic(const Parametrization& p, std::vector<double>& x)
{
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (p.periodic(i)) x[i] = wrap_phase(x[i]);
        if (p.pinned(i)) x[i] = 0.0;
    }
}

// Q is invariant under a common positive rescaling of the non-periodic coordinates; keep them
// inside the bounds so the ascent never drifts along that flat direction.
void rescale_into_bounds(const Parametrization& p, std::vector<double>& x)
{
    double largest = 0.0;
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (p.periodic(i) || p.pinned(i)) continue;
        largest = std::max(largest, std::abs(x[i]));
        bound = std::min(bound, std::min(std::abs(p.lower(i)), std::abs(p.upper(i))));
    }
    if (largest > bound) {
        const double s = bound / largest;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!p.periodic(i) && !p.pinned(i)) x[i] *= s;
        }
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::vector<double> uniform_point(const Parametrization& p, std::mt19937_64& rng)
{
    std::vector<double> x(p.dimension(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (p.pinned(i)) continue;
        x[i] = std::uniform_real_distribution<double>(p.lower(i), p.upper(i))(rng);
    }
    return x;
}

bool better(const ObjectiveReport& a, const ObjectiveReport& b) { return a.q > b.q; }

} // namespace

double OptimizationTarget::domain_lo() const noexcept { return domain == ShellDomain::UpperHalf ? 0.0 : -kPi; }
double OptimizationTarget::domain_hi() const noexcept { return kPi; }

void OptimizationTarget::validate() const
{
    if (windows.empty()) throw InvalidInput("optimize.windows must not be empty");
    for (std::size_t j = 0; j < windows.size(); ++j) {
        const auto& w = windows[j];
        const std::string name = "optimize.windows[" + std::to_string(j) + "]";
        if (!std::isfinite(w.center) || !(w.width > 0.0)) throw InvalidInput(name + " needs a positive width");
        if (w.lo() < domain_lo() - 1e-12 || w.hi() > domain_hi() + 1e-12) {
            throw InvalidInput(name + " extends outside the k_y domain");
        }
        for (std::size_t i = 0; i < j; ++i) {
            if (w.lo() < windows[i].hi() && windows[i].lo() < w.hi()) {
                throw InvalidInput(name + " overlaps window " + std::to_string(i));
            }
        }
    }
}

double ObjectiveReport::off_target() const noexcept
{
    double sum = 0.0;
    for (double p : window_weights) sum += p;
    return domain_weight - sum;
}

ObjectiveEvaluator::ObjectiveEvaluator(const LatticeSpec& spec, const OptimizationTarget& target,
                                       const CouplingConfig& layout, const EvaluatorOptions& options)
    : spec_(spec), target_(target), layout_(layout)
{
    spec_.validate();
    target_.validate();
    layout_.validate(spec_);
    if (!(options.regularization > 0.0)) throw InvalidInput("regularization constant must be positive");
    energy_ = dispersion(spec_, target_.incident);
    const EnergyShell shell = energy_shell(spec_, energy_, options.samples_per_branch);

    const std::size_t count = layout_.points.size();
    for (const auto& p : layout_.points) {
        incident_.push_back(std::polar(1.0, target_.incident.x * p.n + target_.incident.y * p.m));
    }
    for (const auto& s : shell.samples) {
        if (!(s.k.y > target_.domain_lo() && s.k.y < target_.domain_hi())) continue;
        weights_.push_back(options.regularization * s.dl / (s.grad_norm * s.grad_norm));
        int window = -1;
        for (std::size_t j = 0; j < target_.windows.size(); ++j) {
            if (s.k.y > target_.windows[j].lo() && s.k.y < target_.windows[j].hi()) window = static_cast<int>(j);
        }
        window_of_.push_back(window);
        for (const auto& p : layout_.points) phases_.push_back(std::polar(1.0, s.k.x * p.n + s.k.y * p.m));
    }
    if (weights_.empty()) throw EmptyShell("no shell samples inside the k_y domain");

    try {
        const ResolventTable table = resolvent_table_for(layout_, spec_, energy_);
        kernel_.resize(count * count);
        for (std::size_t p = 0; p < count; ++p) {
            for (std::size_t q = 0; q < count; ++q) {
                const auto& a = layout_.points[p];
                const auto& b = layout_.points[q];
                kernel_[p * count + q] = table(a.n - b.n, a.m - b.m);
            }
        }
        has_table_ = true;
    } catch (const NumericalError&) {
        if (target_.windows.size() > 1) throw;
    }
}

ObjectiveReport ObjectiveEvaluator::evaluate(std::span<const cplx> weights) const
{
    const std::size_t count = layout_.points.size();
    if (weights.size() != count) throw InvalidInput("weight count differs from the coupling layout");

    ObjectiveReport out;
    out.config = layout_;
    for (std::size_t p = 0; p < count; ++p) out.config.points[p].weight = weights[p];
    out.window_weights.assign(target_.windows.size(), 0.0);
    out.sigma_included = has_table_;

    double lambda = 0.0;
    for (const auto& w : weights) lambda += std::abs(w);
    if (layout_.g == 0.0 || !(lambda > 0.0)) {
        out.degenerate = true;
        return out;
    }
    const double scale = layout_.g / lambda;

    double prefactor = scale * scale;
    if (has_table_) {
        cplx sigma{0.0, 0.0};
        cplx incident{0.0, 0.0};
        for (std::size_t p = 0; p < count; ++p) {
            incident += weights[p] * incident_[p];
            for (std::size_t q = 0; q < count; ++q) sigma += weights[p] * std::conj(weights[q]) * kernel_[p * count + q];
        }
        sigma *= scale * scale;
        const double g_in = std::norm(scale * incident);
        prefactor *= g_in / (4.0 * kPi * kPi * std::norm(energy_ - layout_.omega_a - sigma));
    }

    for (std::size_t s = 0; s < weights_.size(); ++s) {
        const cplx* row = phases_.data() + s * count;
        cplx sum{0.0, 0.0};
        for (std::size_t p = 0; p < count; ++p) sum += weights[p] * row[p];
        const double density = prefactor * std::norm(sum) * weights_[s];
        out.domain_weight += density;
        if (window_of_[s] >= 0) out.window_weights[static_cast<std::size_t>(window_of_[s])] += density;
    }

    if (!(out.domain_weight > 0.0)) {
        out.degenerate = true;
        return out;
    }
    double numerator = 1.0;
    for (double p : out.window_weights) numerator *= p;
    double denominator = out.off_target();
    const double floor = kDenominatorFloor * out.domain_weight;
    if (denominator < floor) {
        denominator = floor;
        out.floored = true;
    }
    out.q = numerator / denominator;
    return out;
}

ObjectiveReport ObjectiveEvaluator::evaluate(const CouplingConfig& config) const
{
    if (config.points.size() != layout_.points.size()) throw InvalidInput("config sites differ from the layout");
    std::vector<cplx> w;
    w.reserve(config.points.size());
    for (std::size_t p = 0; p < config.points.size(); ++p) {
        const auto& a = config.points[p];
        const auto& b = layout_.points[p];
        if (a.n != b.n || a.m != b.m) throw InvalidInput("config sites differ from the layout");
        w.push_back(a.weight);
    }
    return evaluate(w);
}

double window_weight(const CouplingConfig& config, const LatticeSpec& spec, Vec2 k_in, const TargetWindow& window,
                     int samples_per_branch)
{
    return s_minus_one(config, spec, k_in, samples_per_branch).weight(window.lo(), window.hi());
}

double half_shell_weight(const CouplingConfig& config, const LatticeSpec& spec, Vec2 k_in, int samples_per_branch)
{
    return s_minus_one(config, spec, k_in, samples_per_branch).weight(0.0, kPi);
}

ObjectiveReport q_value(const CouplingConfig& config, const LatticeSpec& spec, const OptimizationTarget& target,
                        const EvaluatorOptions& options)
{
    return ObjectiveEvaluator(spec, target, config, options).evaluate(config);
}

Parametrization Parametrization::line(int half_count, double g, double omega_a, double ratio_bound)
{
    if (half_count < 0) throw InvalidInput("line half count must be non-negative");
    if (!(ratio_bound > 0.0)) throw InvalidInput("ratio bound must be positive");
    Parametrization p;
    p.kind_ = Kind::Line;
    p.half_count_ = half_count;
    p.layout_ = expand(SymmetricLineConfig{omega_a, g, std::vector<double>(static_cast<std::size_t>(half_count) + 1, 1.0)});
    const auto dim = static_cast<std::size_t>(half_count) + 1;
    p.lower_.assign(dim, -ratio_bound);
    p.upper_.assign(dim, ratio_bound);
    p.periodic_.assign(dim, false);
    p.pinned_.assign(dim, false);
    return p;
}

Parametrization Parametrization::grid(int half_n, int half_m, double g, double omega_a, double modulus_bound)
{
    if (half_n < 0 || half_m < 0) throw InvalidInput("grid half extents must be non-negative");
    if (!(modulus_bound > 0.0)) throw InvalidInput("modulus bound must be positive");
    Parametrization p;
    p.kind_ = Kind::Grid;
    const std::vector<std::vector<cplx>> ones(static_cast<std::size_t>(2 * half_m + 1),
                                              std::vector<cplx>(static_cast<std::size_t>(2 * half_n + 1), 1.0));
    p.layout_ = grid_config(ones, g, omega_a);
    for (std::size_t i = 0; i < p.layout_.points.size(); ++i) {
        p.lower_.insert(p.lower_.end(), {-modulus_bound, 0.0});
        p.upper_.insert(p.upper_.end(), {modulus_bound, kTwoPi});
        p.periodic_.insert(p.periodic_.end(), {false, true});
        p.pinned_.insert(p.pinned_.end(), {false, i == 0});
    }
    return p;
}

std::vector<cplx> Parametrization::weights(std::span<const double> x) const
{
    if (x.size() != dimension()) throw InvalidInput("parameter vector has the wrong dimension");
    std::vector<cplx> w;
    w.reserve(layout_.points.size());
    if (kind_ == Kind::Line) {
        w.push_back(x[0]);
        for (int j = 1; j <= half_count_; ++j) {
            const double r = x[static_cast<std::size_t>(j)];
            w.insert(w.end(), {r, r});
        }
    } else {
        for (std::size_t p = 0; p < layout_.points.size(); ++p) {
            const double phase = pinned_[2 * p + 1] ? 0.0 : x[2 * p + 1];
            w.push_back(x[2 * p] * std::polar(1.0, phase));
        }
    }
    return w;
}

CouplingConfig Parametrization::decode(std::span<const double> x) const
{
    CouplingConfig out = layout_;
    const auto w = weights(x);
    for (std::size_t p = 0; p < w.size(); ++p) out.points[p].weight = w[p];
    return out;
}

std::vector<double> Parametrization::encode(const CouplingConfig& config) const
{
    if (config.points.size() != layout_.points.size()) throw InvalidInput("config sites differ from the layout");
    for (std::size_t p = 0; p < config.points.size(); ++p) {
        if (config.points[p].n != layout_.points[p].n || config.points[p].m != layout_.points[p].m) {
            throw InvalidInput("config sites differ from the layout");
        }
    }
    std::vector<double> x(dimension(), 0.0);
    if (kind_ == Kind::Line) {
        x[0] = config.points[0].weight.real();
        for (int j = 1; j <= half_count_; ++j) {
            const auto& a = config.points[static_cast<std::size_t>(2 * j - 1)].weight;
            const auto& b = config.points[static_cast<std::size_t>(2 * j)].weight;
            if (a != b || a.imag() != 0.0) throw InvalidInput("config is not a real mirror-symmetric line");
            x[static_cast<std::size_t>(j)] = a.real();
        }
        return x;
    }
    const double reference = std::arg(config.points[0].weight);
    for (std::size_t p = 0; p < config.points.size(); ++p) {
        const cplx w = config.points[p].weight * std::polar(1.0, -reference);
        x[2 * p] = std::abs(w);
        x[2 * p + 1] = p == 0 ? 0.0 : wrap_phase(std::arg(w));
    }
    return x;
}

OptimizationResult gradient_descent(const ObjectiveEvaluator& evaluator, const Parametrization& parametrization,
                                    std::vector<double> initial, const GradientOptions& options)
{
    if (initial.size() != parametrization.dimension()) throw InvalidInput("initial point has the wrong dimension");
    if (!(options.difference_step > 0.0) || !(options.initial_step > 0.0) || !(options.backtrack > 0.0)
        || !(options.backtrack < 1.0) || options.max_iterations < 0) {
        throw InvalidInput("invalid gradient options");
    }
    const auto objective = [&](const std::vector<double>& x) {
        return evaluator.evaluate(parametrization.weights(x));
    };

    std::vector<double> x = std::move(initial);
    wrap_periodic(parametrization, x);
    ObjectiveReport current = objective(x);
    double f = log_q(current);

    OptimizationResult out;
    out.trace.push_back(current.q);
    double step = options.initial_step;
    std::vector<double> grad(x.size(), 0.0);
    for (int it = 0; it < options.max_iterations && std::isfinite(f); ++it) {
        double grad_sq = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            grad[i] = 0.0;
            if (parametrization.pinned(i)) continue;
            auto xp = x;
            auto xm = x;
            xp[i] += options.difference_step;
            xm[i] -= options.difference_step;
            grad[i] = (log_q(objective(xp)) - log_q(objective(xm))) / (2.0 * options.difference_step);
            if (!std::isfinite(grad[i])) grad[i] = 0.0;
            grad_sq += grad[i] * grad[i];
        }
        if (!(grad_sq > 0.0)) {
            if (it == 0) out.flat_start = true;
            break;
        }
        bool accepted = false;
        double alpha = step;
        for (int b = 0; b < kMaxBacktracks; ++b, alpha *= options.backtrack) {
            std::vector<double> trial = x;
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] += alpha * grad[i];
            wrap_periodic(parametrization, trial);
            rescale_into_bounds(parametrization, trial);
            ObjectiveReport r = objective(trial);
            const double ft = log_q(r);
            if (ft >= f + options.sufficient_increase * alpha * grad_sq) {
                x = std::move(trial);
                current = std::move(r);
                f = ft;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        step = 2.0 * alpha;
        out.trace.push_back(current.q);
    }
    out.parameters = std::move(x);
    out.best = std::move(current);
    return out;
}

OptimizationResult particle_swarm(const ObjectiveEvaluator& evaluator, const Parametrization& parametrization,
                                  std::uint64_t seed, const SwarmOptions& options)
{
    if (options.particles < 1 || options.iterations < 0) throw InvalidInput("swarm needs particles and iterations");
    const std::size_t dim = parametrization.dimension();
    for (std::size_t i = 0; i < dim; ++i) {
        if (!(parametrization.upper(i) > parametrization.lower(i))) throw InvalidInput("infeasible swarm bounds");
    }
    const auto n = static_cast<std::size_t>(options.particles);

    std::vector<std::mt19937_64> rng;
    rng.reserve(n);
    for (std::size_t i = 0; i < n; ++i) rng.emplace_back(derive_seed(seed, i));

    std::vector<std::vector<double>> x(n), v(n), best_x(n);
    std::vector<ObjectiveReport> best(n), now(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = uniform_point(parametrization, rng[i]);
        v[i].assign(dim, 0.0);
        for (std::size_t d = 0; d < dim; ++d) {
            if (parametrization.pinned(d)) continue;
            const double range = parametrization.upper(d) - parametrization.lower(d);
            v[i][d] = std::uniform_real_distribution<double>(-kInitialVelocity * range, kInitialVelocity * range)(rng[i]);
        }
    }

    const auto evaluate_all = [&] {
        const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < count; ++i) {
            const auto k = static_cast<std::size_t>(i);
            now[k] = evaluator.evaluate(parametrization.weights(x[k]));
        }
    };

    evaluate_all();
    std::size_t leader = 0;
    for (std::size_t i = 0; i < n; ++i) {
        best[i] = now[i];
        best_x[i] = x[i];
        if (better(best[i], best[leader])) leader = i;
    }

    OptimizationResult out;
    out.seed = seed;
    out.trace.push_back(best[leader].q);
    for (int it = 0; it < options.iterations; ++it) {
        const std::vector<double> global = best_x[leader];
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            for (std::size_t d = 0; d < dim; ++d) {
                if (parametrization.pinned(d)) continue;
                const bool periodic = parametrization.periodic(d);
                const double to_own = periodic ? phase_difference(best_x[i][d], x[i][d]) : best_x[i][d] - x[i][d];
                const double to_global = periodic ? phase_difference(global[d], x[i][d]) : global[d] - x[i][d];
                const double r1 = unit(rng[i]);
                const double r2 = unit(rng[i]);
                const double range = parametrization.upper(d) - parametrization.lower(d);
                double vd = options.inertia * v[i][d] + options.cognitive * r1 * to_own + options.social * r2 * to_global;
                vd = std::clamp(vd, -kMaxVelocity * range, kMaxVelocity * range);
                double xd = x[i][d] + vd;
                if (periodic) {
                    xd = wrap_phase(xd);
                } else if (xd < parametrization.lower(d) || xd > parametrization.upper(d)) {
                    xd = std::clamp(xd, parametrization.lower(d), parametrization.upper(d));
                    vd = 0.0;
                }
                x[i][d] = xd;
                v[i][d] = vd;
            }
        }
        evaluate_all();
        for (std::size_t i = 0; i < n; ++i) {
            if (better(now[i], best[i])) {
                best[i] = now[i];
                best_x[i] = x[i];
            }
            if (better(best[i], best[leader])) leader = i;
        }
        out.trace.push_back(best[leader].q);
    }
    out.parameters = best_x[leader];
    out.best = best[leader];
    return out;
}

RestartSummary optimize(const ObjectiveEvaluator& evaluator, const Parametrization& parametrization,
                        const RestartOptions& options)
{
    if (options.restarts < 1) throw InvalidInput("optimize.restarts must be positive");
    RestartSummary out;
    out.runs.resize(static_cast<std::size_t>(options.restarts));
    const auto run = [&](int r) {
        const std::uint64_t seed = derive_seed(options.seed, static_cast<std::uint64_t>(r));
        OptimizationResult result;
        if (options.algorithm == Algorithm::GradientDescent) {
            std::mt19937_64 rng(seed);
            result = gradient_descent(evaluator, parametrization, uniform_point(parametrization, rng), options.gradient);
        } else {
            result = particle_swarm(evaluator, parametrization, seed, options.swarm);
            if (options.polish) {
                OptimizationResult polished =
                    gradient_descent(evaluator, parametrization, result.parameters, options.gradient);
                if (better(polished.best, result.best)) {
                    result.parameters = std::move(polished.parameters);
                    result.best = std::move(polished.best);
                }
                result.trace.push_back(result.best.q);
            }
        }
        result.seed = seed;
        result.restart = r;
        out.runs[static_cast<std::size_t>(r)] = std::move(result);
    };

    if (options.algorithm == Algorithm::GradientDescent) {
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < options.restarts; ++r) run(r);
    } else {
        for (int r = 0; r < options.restarts; ++r) run(r);
    }

    std::size_t leader = 0;
    for (std::size_t r = 1; r < out.runs.size(); ++r) {
        if (better(out.runs[r].best, out.runs[leader].best)) leader = r;
    }
    out.best = out.runs[leader];
    return out;
}

std::vector<double> normalized_ratios(std::span<const double> ratios)
{
    double largest = 0.0;
    double sign = 1.0;
    for (double r : ratios) {
        if (std::abs(r) > largest) {
            largest = std::abs(r);
            sign = r < 0.0 ? -1.0 : 1.0;
        }
    }
    if (!(largest > 0.0)) throw DegenerateCoupling("all ratios vanish");
    std::vector<double> out(ratios.begin(), ratios.end());
    for (double& r : out) r *= sign / largest;
    return out;
}

} // namespace giantatom
