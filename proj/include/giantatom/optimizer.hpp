// optimizer.hpp: Scattering-design objective over coupling weights and its maximizers

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "giantatom/coupling.hpp"
#include "giantatom/greens.hpp"

namespace giantatom {

// Shell samples with k_y strictly inside (center - width/2, center + width/2) belong to the window.
struct TargetWindow {
    double center{0.0};
    double width{0.0};

    double lo() const noexcept { return center - 0.5 * width; }
    double hi() const noexcept { return center + 0.5 * width; }
};

// Region of the shell the off-target weight is measured on: k_y in (0, pi), or the whole shell
// for targets that break the k_y -> -k_y mirror.
enum class ShellDomain { UpperHalf, Full };

struct OptimizationTarget {
    std::vector<TargetWindow> windows;
    Vec2 incident;
    ShellDomain domain{ShellDomain::UpperHalf};

    double domain_lo() const noexcept;
    double domain_hi() const noexcept;
    // Windows must be nonempty, lie inside the domain and be pairwise disjoint.
    void validate() const;
};

struct ObjectiveReport {
    double q{0.0};
    std::vector<double> window_weights;
    double domain_weight{0.0};
    CouplingConfig config;
    bool degenerate{false};     // no scattering at all (g = 0 or G vanishes on the shell)
    bool floored{false};        // off-target weight below the floor; q uses the floor
    bool sigma_included{true};  // false when the self-energy was dropped (see ObjectiveEvaluator)

    double off_target() const noexcept;
};

inline constexpr double kDenominatorFloor = 1e-12; // relative to the domain weight

struct EvaluatorOptions {
    int samples_per_branch{kDefaultShellSamples};
    double regularization{1.0}; // overall constant of the shell density
};

// Precomputes everything that does not depend on the weights: the shell restricted to the
// domain, the per-sample phase factors of every coupling site and the resolvent table.
// Weights are supplied per evaluation in the order of the layout's points.
//
// With a single window Q is homogeneous of degree zero in the common prefactor of the
// amplitude, so Sigma drops out. When Sigma cannot be evaluated (incident energy at a
// saddle point of the band) a single-window evaluator omits it and reports
// sigma_included = false; a multi-window evaluator throws NumericalError.
class ObjectiveEvaluator {
public:
    ObjectiveEvaluator(const LatticeSpec& spec, const OptimizationTarget& target, const CouplingConfig& layout,
                       const EvaluatorOptions& options = {});

    ObjectiveReport evaluate(std::span<const cplx> weights) const;
    ObjectiveReport evaluate(const CouplingConfig& config) const; // same sites as the layout

    const LatticeSpec& spec() const noexcept { return spec_; }
    const OptimizationTarget& target() const noexcept { return target_; }
    const CouplingConfig& layout() const noexcept { return layout_; }
    std::size_t sample_count() const noexcept { return weights_.size(); }
    bool sigma_available() const noexcept { return has_table_; }

private:
    LatticeSpec spec_;
    OptimizationTarget target_;
    CouplingConfig layout_;
    double energy_{0.0};
    std::vector<cplx> phases_;      // sample-major: phases_[s * P + p] = exp(i k_s . r_p)
    std::vector<cplx> incident_;    // exp(i k_in . r_p)
    std::vector<double> weights_;   // regularization * dl / |grad|^2 per sample
    std::vector<int> window_of_;    // window index per sample, -1 if none
    bool has_table_{false};
    std::vector<cplx> kernel_;      // K(r_p - r_q), P x P
};

// Arc-length integral of |<k_f|S-1|k_i>|^2 over the window, from s_minus_one().
double window_weight(const CouplingConfig& config, const LatticeSpec& spec, Vec2 k_in, const TargetWindow& window,
                     int samples_per_branch = kDefaultShellSamples);
// Same integral over k_y in (0, pi).
double half_shell_weight(const CouplingConfig& config, const LatticeSpec& spec, Vec2 k_in,
                         int samples_per_branch = kDefaultShellSamples);

// Q = prod_j P_j / (O - sum_j P_j), with the denominator floored at kDenominatorFloor * O.
ObjectiveReport q_value(const CouplingConfig& config, const LatticeSpec& spec, const OptimizationTarget& target,
                        const EvaluatorOptions& options = {});

// Maps a real parameter vector onto coupling weights.
//   line: M+1 real ratios on the y axis (first entry is the center weight).
//   grid: (modulus, phase) per site of a (2N+1) x (2M+1) block, rows by m; the phase of the
//         first site is pinned to zero.
class Parametrization {
public:
    static Parametrization line(int half_count, double g, double omega_a, double ratio_bound = 5.0);
    static Parametrization grid(int half_n, int half_m, double g, double omega_a, double modulus_bound = 5.0);

    std::size_t dimension() const noexcept { return lower_.size(); }
    double lower(std::size_t i) const { return lower_.at(i); }
    double upper(std::size_t i) const { return upper_.at(i); }
    bool periodic(std::size_t i) const { return periodic_.at(i); }
    bool pinned(std::size_t i) const { return pinned_.at(i); }

    const CouplingConfig& layout() const noexcept { return layout_; }
    std::vector<cplx> weights(std::span<const double> x) const;
    CouplingConfig decode(std::span<const double> x) const;
    // Inverse of decode up to a global phase; throws InvalidInput if the sites differ.
    std::vector<double> encode(const CouplingConfig& config) const;

private:
    enum class Kind { Line, Grid };
    Kind kind_{Kind::Line};
    int half_count_{0};
    CouplingConfig layout_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<bool> periodic_;
    std::vector<bool> pinned_;
};

struct GradientOptions {
    double difference_step{1e-4};
    double backtrack{0.5};
    double initial_step{0.1};
    double sufficient_increase{1e-4};
    int max_iterations{500};
};

struct SwarmOptions {
    int particles{60};
    double inertia{0.72};
    double cognitive{1.49};
    double social{1.49};
    int iterations{300};
};

struct OptimizationResult {
    std::vector<double> parameters;
    ObjectiveReport best;
    std::vector<double> trace;  // best Q after each iteration (entry 0 is the start)
    std::uint64_t seed{0};
    int restart{0};
    bool flat_start{false};     // gradient vanished at the starting point
};

// Ascent on ln Q from the given start. Pinned coordinates stay fixed; periodic ones wrap.
OptimizationResult gradient_descent(const ObjectiveEvaluator& evaluator, const Parametrization& parametrization,
                                    std::vector<double> initial, const GradientOptions& options = {});

// Canonical global-best swarm. Each particle draws from its own generator seeded by
// (seed, particle index), so results do not depend on evaluation order.
OptimizationResult particle_swarm(const ObjectiveEvaluator& evaluator, const Parametrization& parametrization,
                                  std::uint64_t seed, const SwarmOptions& options = {});

enum class Algorithm { GradientDescent, ParticleSwarm };

struct RestartOptions {
    int restarts{20};
    std::uint64_t seed{20240101};
    Algorithm algorithm{Algorithm::GradientDescent};
    GradientOptions gradient;
    SwarmOptions swarm;
    bool polish{false}; // run gradient ascent from every swarm result
};

struct RestartSummary {
    OptimizationResult best;
    std::vector<OptimizationResult> runs;
};

// Independent runs with per-restart seeds derived from options.seed; gradient runs start
// from uniform random points inside the bounds.
RestartSummary optimize(const ObjectiveEvaluator& evaluator, const Parametrization& parametrization,
                        const RestartOptions& options = {});

// Ratio list scaled so the entry of largest magnitude is +1.
std::vector<double> normalized_ratios(std::span<const double> ratios);

} // namespace giantatom
