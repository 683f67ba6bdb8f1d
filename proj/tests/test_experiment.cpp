#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <unistd.h>

#include "giantatom/error.hpp"
#include "giantatom/experiment.hpp"
#include "giantatom/io.hpp"

using namespace giantatom;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string error_of(const json& document)
{
    try {
        parse_config(document);
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return {};
}

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("giantatom-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++)))
    {
        fs::remove_all(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const noexcept { return path_; }

private:
    static inline int counter_ = 0;
    fs::path path_;
};

json read_json(const fs::path& p)
{
    std::ifstream is(p);
    return json::parse(is);
}

} // namespace

TEST_CASE("subcommand names round trip")
{
    for (Subcommand c : {Subcommand::Dispersion, Subcommand::Prepare, Subcommand::Scatter, Subcommand::Smatrix,
                         Subcommand::Optimize, Subcommand::Emit}) {
        CHECK(parse_subcommand(to_string(c)) == c);
    }
    CHECK_THROWS_AS(parse_subcommand("launch"), InvalidInput);
}

TEST_CASE("config errors name the offending field")
{
    CHECK(error_of({{"lattice", {{"N", 0}}}}).find("lattice.N") != std::string::npos);
    CHECK(error_of({{"lattice", {{"J_x", "big"}}}}).find("lattice.J_x") != std::string::npos);
    CHECK(error_of({{"lattice", {{"colour", 1}}}}).find("colour") != std::string::npos);
    CHECK(error_of({{"launch", {}}}).find("launch") != std::string::npos);
    CHECK(error_of({{"coupling", {{"mode", "line"}, {"g", 1.0}, {"ratios", {1.0, 2.0, "x"}}}}}).find("coupling.ratios[2]")
          != std::string::npos);
    CHECK(error_of({{"optimize", {{"windows", {{{"center", "pi/2"}, {"width", "pie"}}}}}}}).find("optimize.windows[0].width")
          != std::string::npos);
    CHECK(error_of({{"optimize", {{"windows", {{{"center", "pi/2"}, {"width", "pi/7"}}}}, {"domain", "left"}}}})
              .find("optimize.domain")
          != std::string::npos);
}

TEST_CASE("angles accept multiples of pi")
{
    const ExperimentConfig c = parse_config(
        {{"optimize", {{"windows", {{{"center", "3pi/7"}, {"width", "pi/14"}}}}, {"k_in", {"pi/2", 0}}}}});
    REQUIRE(c.optimize);
    CHECK(c.optimize->target.windows[0].center == doctest::Approx(3.0 * std::numbers::pi / 7.0));
    CHECK(c.optimize->target.windows[0].width == doctest::Approx(std::numbers::pi / 14.0));
    CHECK(c.optimize->target.incident.x == doctest::Approx(std::numbers::pi / 2.0));
}

TEST_CASE("subcommands require their sections")
{
    const ExperimentConfig bare = parse_config({{"lattice", {{"N", 21}, {"M", 11}}}});
    CHECK_NOTHROW(require_sections(bare, Subcommand::Dispersion));
    CHECK_THROWS_AS(require_sections(bare, Subcommand::Emit), InvalidInput);
    CHECK_THROWS_AS(require_sections(bare, Subcommand::Scatter), InvalidInput);
    CHECK_THROWS_AS(require_sections(bare, Subcommand::Optimize), InvalidInput);

    const ExperimentConfig outside = parse_config({{"lattice", {{"N", 21}, {"M", 11}}},
                                                   {"coupling", {{"mode", "line"}, {"g", 1.0}, {"ratios", std::vector<double>(15, 1.0)}}},
                                                   {"run", {{"t", 1.0}}}});
    CHECK_THROWS_AS(require_sections(outside, Subcommand::Emit), InvalidInput);

    const ExperimentConfig edge = parse_config({{"lattice", {{"N", 21}, {"M", 11}}},
                                                {"coupling", {{"mode", "small"}, {"g", 1.0}}},
                                                {"smatrix", {{"k_in", {0, 0}}}}});
    CHECK_THROWS_AS(require_sections(edge, Subcommand::Smatrix), InvalidInput);
}

TEST_CASE("dispersion run writes its files and manifest")
{
    TempDir tmp;
    const ExperimentConfig config = parse_config({{"lattice", {{"N", 21}, {"M", 11}}}});
    RunOptions options;
    options.output = tmp.path().string();
    const json report = run_experiment(Subcommand::Dispersion, config, options);
    CHECK(report["even_symmetric"].get<bool>());
    for (const char* name : {"report.json", "manifest.json", "index.json", "dispersion.csv"}) CHECK(fs::exists(tmp.path() / name));

    const json manifest = read_json(tmp.path() / "manifest.json");
    CHECK(manifest["subcommand"] == "dispersion");
    CHECK(manifest["config"]["lattice"]["N"] == 21);
    CHECK(manifest.contains("tolerances"));

    const io::CsvTable table = io::load_csv((tmp.path() / "dispersion.csv").string());
    CHECK(table.rows.size() == 43u * 23u);

    // Reusing a non-empty directory is refused.
    CHECK_THROWS_AS(run_experiment(Subcommand::Dispersion, config, options), InvalidInput);
}

TEST_CASE("failed validation writes nothing")
{
    TempDir tmp;
    const ExperimentConfig config = parse_config({{"lattice", {{"N", 21}, {"M", 11}}}});
    RunOptions options;
    options.output = tmp.path().string();
    CHECK_THROWS_AS(run_experiment(Subcommand::Emit, config, options), InvalidInput);
    CHECK_FALSE(fs::exists(tmp.path()));
}

TEST_CASE("emission run starts fully excited")
{
    TempDir tmp;
    const ExperimentConfig config = parse_config({{"lattice", {{"N", 41}, {"M", 21}}},
                                                  {"coupling", {{"mode", "small"}, {"g", 0.2}}},
                                                  {"run", {{"t", 5.0}, {"snapshots", 6}}}});
    RunOptions options;
    options.output = tmp.path().string();
    options.format = GridFormat::Binary;
    const json report = run_experiment(Subcommand::Emit, config, options);
    CHECK(report["initial_population"].get<double>() == 1.0);
    const io::CsvTable pop = io::load_csv((tmp.path() / "population.csv").string());
    CHECK(pop.rows.front()[pop.column("population")] == 1.0);
    CHECK(pop.rows.size() == 6);
    const ComplexGrid photon = io::load_grid_binary((tmp.path() / "final.bin").string());
    CHECK(photon.half_x() == 41);
}

TEST_CASE("seeded optimize runs produce identical traces")
{
    const json document = {{"optimize",
                            {{"windows", {{{"center", "pi/2"}, {"width", "pi/7"}}}},
                             {"half_count", 3},
                             {"algorithm", "swarm"},
                             {"restarts", 2},
                             {"samples", 256},
                             {"swarm", {{"particles", 8}, {"iterations", 10}}}}}};
    const ExperimentConfig config = parse_config(document);
    std::string traces[2];
    for (auto& trace : traces) {
        TempDir tmp;
        RunOptions options;
        options.output = tmp.path().string();
        options.seed = 1234;
        run_experiment(Subcommand::Optimize, config, options);
        std::ifstream is(tmp.path() / "trace.csv");
        trace.assign(std::istreambuf_iterator<char>(is), {});
        CHECK(read_json(tmp.path() / "manifest.json")["config"]["optimize"]["seed"] == 1234);
    }
    CHECK_FALSE(traces[0].empty());
    CHECK(traces[0] == traces[1]);
}
