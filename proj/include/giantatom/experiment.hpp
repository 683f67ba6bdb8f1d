// experiment.hpp: Run configuration files and the workflows behind each CLI subcommand

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "giantatom/dynamics.hpp"
#include "giantatom/optimizer.hpp"

namespace giantatom {

enum class PacketKind { Line, Stable, Gaussian, Diagonal };

struct PacketSection {
    PacketKind kind{PacketKind::Stable};
    int column{0};                   // line
    StabilizationOptions stable;     // stable
    int n0{-50};                     // gaussian
    int m0{0};
    double sigma_x{10.0};
    double sigma_y{10.0};
    Vec2 carrier{1.5707963267948966, 0.0};
    int window{15};                  // diagonal
    int start_n{-1000};
    int start_m{-1000};
    int stop_n{-35};
    int stop_m{-35};
    double threshold{0.85};
};

struct RunSection {
    double t{80.0};
    int snapshots{41};
    bool subtract_background{true};
    bool write_snapshots{false};
    int quadrant_width_x{0};         // scattered-packet fidelity window; 0 disables
    int quadrant_width_y{18};
    double quadrant_ky{1.5707963267948966};
};

struct SweepSection {
    double g_lo{0.0};
    double g_hi{2.0};
    int g_count{101};
    std::optional<double> delta_lo; // default: 2 J_y - 2 J_x
    std::optional<double> delta_hi; // default: 2 J_y + 2 J_x
    int delta_count{101};
};

struct SmatrixSection {
    Vec2 incident{1.5707963267948966, 0.0};
    int samples{kDefaultShellSamples};
    std::optional<SweepSection> sweep;
};

enum class ParametrizationKind { Line, Grid };

struct OptimizeSection {
    OptimizationTarget target;
    ParametrizationKind kind{ParametrizationKind::Line};
    int half_count{7};
    int half_n{2};
    int half_m{2};
    double bound{5.0};
    double g{1.0};
    double omega_a{0.0};
    RestartOptions restarts;
    EvaluatorOptions evaluator;
    std::optional<CouplingConfig> reference; // reference configuration to compare against
};

struct ExperimentConfig {
    LatticeSpec lattice;
    std::optional<CouplingConfig> coupling;
    std::optional<PacketSection> packet;
    std::optional<RunSection> run;
    std::optional<SmatrixSection> smatrix;
    std::optional<OptimizeSection> optimize;
    std::string output;
    nlohmann::json source;
};

enum class Subcommand { Dispersion, Prepare, Scatter, Smatrix, Optimize, Emit };

Subcommand parse_subcommand(const std::string& name);
std::string to_string(Subcommand command);

// Parses and validates every present section. Messages name the offending field, for
// example "coupling.ratios[3] must be a number".
ExperimentConfig parse_config(const nlohmann::json& document);
ExperimentConfig load_config(const std::string& path);

// Throws InvalidInput naming the first section the subcommand needs but the file lacks, and
// runs the cross-section checks (coupling points inside the lattice, and so on).
void require_sections(const ExperimentConfig& config, Subcommand command);

enum class GridFormat { Csv, Binary };

struct RunOptions {
    std::string output;                 // overrides the config's output directory
    std::optional<std::uint64_t> seed;  // overrides optimize.seed
    GridFormat format{GridFormat::Csv};
    std::string version{"0.1.0"};
};

// Validates, creates a fresh run directory, executes the workflow and writes manifest.json
// plus report.json. Returns the report. Nothing is written when validation fails.
nlohmann::json run_experiment(Subcommand command, const ExperimentConfig& config, const RunOptions& options);

// Workflow pieces shared with the acceptance suite.
StablePacket build_packet(const LatticeSpec& spec, const PacketSection& packet);

struct ScatteringStudy {
    EvolutionRun run;
    EvolutionRun free;
    std::vector<ComplexGrid> scattered; // background-subtracted photon grids per snapshot
    std::vector<double> population;
    CrossCheck crosscheck;
    ShellAmplitude analytic;
    std::size_t final_index{0};         // snapshot at the configured final time
};

// Evolves the packet with and without the atom through uniform snapshots up to t, plus any
// extra times (appended in increasing order after t), and compares the scattered momentum
// distribution at t with the analytic shell density for incident momentum k_in.
ScatteringStudy scattering_study(const LatticeSpec& spec, const CouplingConfig& coupling,
                                 const SingleExcitationState& packet, Vec2 k_in, double t, int snapshots,
                                 const std::vector<double>& extra_times = {});

// Fidelity of the heaviest scattered sub-packet in the quadrant n >= 1, m >= 1 after it has
// moved width_x columns. The row displacement follows the group velocity of the shell mode
// at k_y = target_ky.
struct QuadrantFidelity {
    PacketWindow window;
    double travel_time{0.0};
    int shift_n{0};
    int shift_m{0};
    double fidelity{0.0};
};

double quadrant_travel_time(const LatticeSpec& spec, Vec2 k_in, double target_ky, int width_x);
QuadrantFidelity quadrant_fidelity(const LatticeSpec& spec, const ComplexGrid& at_t, const ComplexGrid& later,
                                   Vec2 k_in, double target_ky, int width_x, int width_y);

} // namespace giantatom
