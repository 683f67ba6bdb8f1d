#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "giantatom/dynamics.hpp"
#include "giantatom/error.hpp"
#include "giantatom/experiment.hpp"
#include "giantatom/optimizer.hpp"

namespace py = pybind11;
using namespace giantatom;

namespace {

// Copies a lattice grid into a (nx, ny) array indexed [n + half_x, m + half_y].
template <typename T>
py::array_t<T> to_array(const LatticeGrid<T>& grid)
{
    py::array_t<T> out({grid.nx(), grid.ny()});
    std::copy(grid.values().begin(), grid.values().end(), out.mutable_data());
    return out;
}

ComplexGrid from_array(const py::array_t<cplx, py::array::c_style | py::array::forcecast>& a)
{
    if (a.ndim() != 2 || a.shape(0) % 2 == 0 || a.shape(1) % 2 == 0) {
        throw InvalidInput("grid must be a 2-D array with odd dimensions");
    }
    ComplexGrid grid(static_cast<int>(a.shape(0) / 2), static_cast<int>(a.shape(1) / 2));
    std::copy(a.data(), a.data() + a.size(), grid.values().begin());
    return grid;
}

Vec2 vec(std::pair<double, double> k) { return {k.first, k.second}; }

OptimizationTarget make_target(const std::vector<std::pair<double, double>>& windows, std::pair<double, double> k_in,
                               const std::string& domain)
{
    OptimizationTarget t;
    for (const auto& [center, width] : windows) t.windows.push_back({center, width});
    t.incident = vec(k_in);
    if (domain == "upper") t.domain = ShellDomain::UpperHalf;
    else if (domain == "full") t.domain = ShellDomain::Full;
    else throw InvalidInput("domain must be 'upper' or 'full'");
    t.validate();
    return t;
}

py::dict report_dict(const ObjectiveReport& r)
{
    py::dict d;
    d["q"] = r.q;
    d["window_weights"] = r.window_weights;
    d["domain_weight"] = r.domain_weight;
    d["degenerate"] = r.degenerate;
    d["floored"] = r.floored;
    d["sigma_included"] = r.sigma_included;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Scattering of lattice photons off small and giant atoms";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<LatticeSpec>(m, "Lattice")
        .def(py::init([](int half_x, int half_y, double omega_l, double hop_x, double hop_y) {
                 LatticeSpec s{half_x, half_y, omega_l, hop_x, hop_y};
                 s.validate();
                 return s;
             }),
             py::arg("half_x") = 121, py::arg("half_y") = 61, py::arg("omega_l") = 0.0, py::arg("hop_x") = 0.5,
             py::arg("hop_y") = 0.2)
        .def_readonly("half_x", &LatticeSpec::half_x)
        .def_readonly("half_y", &LatticeSpec::half_y)
        .def_readonly("omega_l", &LatticeSpec::omega_l)
        .def_readonly("hop_x", &LatticeSpec::hop_x)
        .def_readonly("hop_y", &LatticeSpec::hop_y)
        .def_property_readonly("band", [](const LatticeSpec& s) { return std::pair{s.band_bottom(), s.band_top()}; })
        .def("__repr__", [](const LatticeSpec& s) {
            return "Lattice(half_x=" + std::to_string(s.half_x) + ", half_y=" + std::to_string(s.half_y) + ")";
        });

    py::class_<CouplingConfig>(m, "Coupling")
        .def_static("small", &small_atom, py::arg("g"), py::arg("omega_a") = 0.0)
        .def_static(
            "line",
            [](std::vector<double> ratios, double g, double omega_a) {
                return expand(SymmetricLineConfig{omega_a, g, std::move(ratios)});
            },
            py::arg("ratios"), py::arg("g"), py::arg("omega_a") = 0.0,
            "Mirror-symmetric line on the y axis; ratios[j] weights the sites (0, +-j).")
        .def_static("grid", &grid_config, py::arg("rows"), py::arg("g"), py::arg("omega_a") = 0.0)
        .def_readwrite("g", &CouplingConfig::g)
        .def_readwrite("omega_a", &CouplingConfig::omega_a)
        .def_property_readonly("points", [](const CouplingConfig& c) {
            std::vector<std::tuple<int, int, cplx>> out;
            for (const auto& p : c.points) out.emplace_back(p.n, p.m, p.weight);
            return out;
        });

    py::module_ presets = m.def_submodule("presets", "Coupling tables from the reference designs");
    presets.def("single_window_ratios", &presets::single_window_ratios);
    presets.def("two_window_ratios", &presets::two_window_ratios);
    presets.def("four_window_ratios", &presets::four_window_ratios);
    presets.def("asymmetric_grid", &presets::asymmetric_grid);

    m.def("dispersion", [](const LatticeSpec& s, double kx, double ky) { return dispersion(s, {kx, ky}); },
          py::arg("lattice"), py::arg("kx"), py::arg("ky"));
    m.def("dispersion_grid", [](const LatticeSpec& s) { return to_array(dispersion_grid(s)); }, py::arg("lattice"),
          "Band energy on the momentum grid, rows k_x ascending.");
    m.def("resolvent", &lattice_resolvent, py::arg("lattice"), py::arg("energy"), py::arg("dn"), py::arg("dm"));
    m.def("xi", &xi, py::arg("m1"), py::arg("m2"), py::arg("lattice"), py::arg("energy"));
    m.def("self_energy",
          [](const CouplingConfig& c, const LatticeSpec& s, double energy) { return self_energy(c, s, energy).value; },
          py::arg("coupling"), py::arg("lattice"), py::arg("energy"));
    m.def("transmission",
          [](const CouplingConfig& c, const LatticeSpec& s, std::pair<double, double> k) { return transmission(c, s, vec(k)); },
          py::arg("coupling"), py::arg("lattice"), py::arg("k_in"));
    m.def(
        "transmission_sweep",
        [](const CouplingConfig& shape, const LatticeSpec& s, std::pair<double, double> k, std::vector<double> g,
           std::vector<double> delta) {
            const TransmissionGrid grid = transmission_sweep(shape, s, vec(k), g, delta);
            py::array_t<double> out({grid.g_values.size(), grid.delta_values.size()});
            std::copy(grid.values.begin(), grid.values.end(), out.mutable_data());
            return out;
        },
        py::arg("shape"), py::arg("lattice"), py::arg("k_in"), py::arg("g"), py::arg("delta"),
        "Transmission on a (g, delta) grid with delta = omega_l - omega_a.");
    m.def(
        "shell_amplitude",
        [](const CouplingConfig& c, const LatticeSpec& s, std::pair<double, double> k, int samples) {
            const ShellAmplitude a = s_minus_one(c, s, vec(k), samples);
            const auto count = static_cast<py::ssize_t>(a.amplitudes.size());
            py::array_t<double> kx(count), ky(count), dl(count);
            py::array_t<cplx> amp(count);
            for (py::ssize_t i = 0; i < count; ++i) {
                const auto& smp = a.shell.samples[static_cast<std::size_t>(i)];
                kx.mutable_at(i) = smp.k.x;
                ky.mutable_at(i) = smp.k.y;
                dl.mutable_at(i) = smp.dl;
                amp.mutable_at(i) = a.amplitudes[static_cast<std::size_t>(i)];
            }
            return py::make_tuple(kx, ky, dl, amp);
        },
        py::arg("coupling"), py::arg("lattice"), py::arg("k_in"), py::arg("samples") = kDefaultShellSamples,
        "Energy-shell samples (kx, ky, dl, amplitude) of the scattering amplitude.");

    m.def(
        "q_value",
        [](const CouplingConfig& c, const LatticeSpec& s, const std::vector<std::pair<double, double>>& windows,
           std::pair<double, double> k, const std::string& domain) {
            return report_dict(q_value(c, s, make_target(windows, k, domain)));
        },
        py::arg("coupling"), py::arg("lattice"), py::arg("windows"), py::arg("k_in"), py::arg("domain") = "upper",
        "Directional quality factor; windows are (center, width) pairs in k_y.");
    m.def(
        "optimize_line",
        [](const LatticeSpec& s, const std::vector<std::pair<double, double>>& windows, std::pair<double, double> k,
           int half_count, int restarts, std::uint64_t seed, const std::string& algorithm) {
            const auto par = Parametrization::line(half_count, 1.0, 0.0);
            RestartOptions o;
            o.restarts = restarts;
            o.seed = seed;
            if (algorithm == "swarm") o.algorithm = Algorithm::ParticleSwarm;
            else if (algorithm != "gradient") throw InvalidInput("algorithm must be 'gradient' or 'swarm'");
            RestartSummary summary;
            {
                py::gil_scoped_release release;
                const ObjectiveEvaluator ev(s, make_target(windows, k, "upper"), par.layout());
                summary = optimize(ev, par, o);
            }
            py::dict d = report_dict(summary.best.best);
            d["ratios"] = normalized_ratios(summary.best.parameters);
            d["trace"] = summary.best.trace;
            return d;
        },
        py::arg("lattice"), py::arg("windows"), py::arg("k_in"), py::arg("half_count") = 7, py::arg("restarts") = 4,
        py::arg("seed") = 20240101, py::arg("algorithm") = "gradient");

    m.def(
        "emission",
        [](const LatticeSpec& s, const CouplingConfig& c, double t, int snapshots) {
            EvolutionRun run;
            {
                py::gil_scoped_release release;
                run = emission_run(s, c, t, snapshots);
            }
            return py::make_tuple(run.times, atom_population(run), to_array(run.snapshots.back().photon));
        },
        py::arg("lattice"), py::arg("coupling"), py::arg("t"), py::arg("snapshots") = kDefaultSnapshots,
        "Spontaneous emission: (times, atom population, final photon grid).");
    m.def("to_momentum", [](const py::array_t<cplx, py::array::c_style | py::array::forcecast>& a) {
        return to_array(to_momentum(from_array(a)));
    });
    m.def("to_position", [](const py::array_t<cplx, py::array::c_style | py::array::forcecast>& a) {
        return to_array(to_position(from_array(a)));
    });

    m.def(
        "run",
        [](const std::string& subcommand, const std::string& config_path, const std::string& output) {
            RunOptions options;
            options.output = output;
            const nlohmann::json report = run_experiment(parse_subcommand(subcommand), load_config(config_path), options);
            return report.dump();
        },
        py::arg("subcommand"), py::arg("config"), py::arg("output") = "",
        "Runs a CLI workflow and returns report.json as a string.");
}
