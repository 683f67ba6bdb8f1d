// Command-line front end: one subcommand per invocation, each driven by a JSON config.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "giantatom/acceptance.hpp"
#include "giantatom/error.hpp"
#include "giantatom/experiment.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitAcceptance = 4;

struct Flags {
    std::string config;
    std::string out;
    std::uint64_t seed{0};
    int threads{0};
    std::string format{"csv"};
};

void add_common(CLI::App& cmd, Flags& flags, bool needs_config)
{
    auto* c = cmd.add_option("--config", flags.config, "JSON experiment file")->check(CLI::ExistingFile);
    if (needs_config) c->required();
    cmd.add_option("--out", flags.out, "output directory (must not exist or be empty)");
    cmd.add_option("--seed", flags.seed, "seed overriding optimize.seed");
    cmd.add_option("--threads", flags.threads, "OpenMP threads (0 keeps the runtime default)")->check(CLI::NonNegativeNumber);
    cmd.add_option("--format", flags.format, "grid output format")->check(CLI::IsMember({"csv", "bin"}));
}

void apply_threads(int threads)
{
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int run_subcommand(const std::string& name, const Flags& flags, const CLI::App& cmd)
{
    using namespace giantatom;
    apply_threads(flags.threads);
    const Subcommand command = parse_subcommand(name);
    const ExperimentConfig config = load_config(flags.config);
    RunOptions options;
    options.output = flags.out;
    if (cmd.count("--seed") > 0) options.seed = flags.seed;
    options.format = flags.format == "bin" ? GridFormat::Binary : GridFormat::Csv;
    const nlohmann::json report = run_experiment(command, config, options);
    std::cout << report.dump(2) << '\n';
    return EXIT_SUCCESS;
}

int run_verify(const Flags& flags, const std::vector<int>& only, int restarts, const CLI::App& cmd)
{
    namespace acc = giantatom::acceptance;
    apply_threads(flags.threads);
    acc::Options options;
    options.only = only;
    options.optimizer_restarts = restarts;
    if (cmd.count("--seed") > 0) options.seed = flags.seed;
    const auto results = acc::run(options, [](const acc::CriterionResult& r) { std::cout << acc::format_line(r) << std::endl; });
    std::size_t passed = 0;
    for (const auto& r : results) passed += r.passed ? 1 : 0;
    std::cout << passed << "/" << results.size() << " criteria passed\n";
    return passed == results.size() ? EXIT_SUCCESS : kExitAcceptance;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Giant-atom scattering in a 2D resonator array"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "giantatom 0.1.0");

    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"dispersion", "band energy over the momentum grid"},
        {"prepare", "stabilized incident wave packet and its propagating fidelity"},
        {"scatter", "time-domain scattering with background subtraction"},
        {"smatrix", "analytic shell distribution and transmission"},
        {"optimize", "coupling weights maximizing the target objective"},
        {"emit", "spontaneous emission of the excited atom"}};
    for (const auto& [name, help] : commands) add_common(*app.add_subcommand(name, help), flags, true);

    auto* verify = app.add_subcommand("verify", "run the acceptance criteria and print a pass/fail table");
    add_common(*verify, flags, false);
    std::vector<int> only;
    int restarts = 20;
    verify->add_option("--only", only, "criterion numbers to run")->check(CLI::Range(1, giantatom::acceptance::kCriterionCount));
    verify->add_option("--restarts", restarts, "optimizer restarts per parity case")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (verify->parsed()) return run_verify(flags, only, restarts, *verify);
        for (auto* sub : app.get_subcommands()) return run_subcommand(sub->get_name(), flags, *sub);
    } catch (const giantatom::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const giantatom::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return EXIT_SUCCESS;
}
