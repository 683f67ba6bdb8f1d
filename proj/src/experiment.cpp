#include "giantatom/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <regex>
#include <sstream>

#include <unistd.h>

#include "giantatom/error.hpp"
#include "giantatom/io.hpp"

namespace giantatom {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kPi = std::numbers::pi;

// Typed access to one JSON object with error messages that carry the dotted field path.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (!node_.is_object()) throw InvalidInput(path_ + " must be an object");
    }

    std::string field(const std::string& key) const { return path_ + "." + key; }
    bool has(const std::string& key) const { return node_.contains(key); }
    const json& raw(const std::string& key) const { return node_.at(key); }

    void allow_only(std::initializer_list<const char*> keys) const
    {
        for (const auto& [key, value] : node_.items()) {
            bool known = false;
            for (const char* k : keys) known = known || key == k;
            if (!known) throw InvalidInput(field(key) + " is not a recognized field");
        }
    }

    double number(const std::string& key, double fallback) const
    {
        if (!has(key)) return fallback;
        return as_number(raw(key), field(key));
    }

    double angle(const std::string& key, double fallback) const
    {
        if (!has(key)) return fallback;
        return as_angle(raw(key), field(key));
    }

    int integer(const std::string& key, int fallback) const
    {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_integer()) throw InvalidInput(field(key) + " must be an integer");
        return v.get<int>();
    }

    bool flag(const std::string& key, bool fallback) const
    {
        if (!has(key)) return fallback;
        if (!raw(key).is_boolean()) throw InvalidInput(field(key) + " must be true or false");
        return raw(key).get<bool>();
    }

    std::string text(const std::string& key, const std::string& fallback) const
    {
        if (!has(key)) return fallback;
        if (!raw(key).is_string()) throw InvalidInput(field(key) + " must be a string");
        return raw(key).get<std::string>();
    }

    Vec2 momentum(const std::string& key, Vec2 fallback) const
    {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_array() || v.size() != 2) throw InvalidInput(field(key) + " must be a pair [k_x, k_y]");
        return {as_angle(v[0], field(key) + "[0]"), as_angle(v[1], field(key) + "[1]")};
    }

    std::pair<int, int> site(const std::string& key, std::pair<int, int> fallback) const
    {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
            throw InvalidInput(field(key) + " must be an integer pair [n, m]");
        }
        return {v[0].get<int>(), v[1].get<int>()};
    }

    Section child(const std::string& key) const { return Section(raw(key), field(key)); }

    static double as_number(const json& v, const std::string& name)
    {
        if (!v.is_number()) throw InvalidInput(name + " must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw InvalidInput(name + " must be finite");
        return x;
    }

    // Plain number or a multiple of pi written as "pi", "-pi/2", "3pi/7", "0.5*pi".
    static double as_angle(const json& v, const std::string& name)
    {
        if (v.is_number()) return as_number(v, name);
        if (!v.is_string()) throw InvalidInput(name + " must be a number or a multiple of pi");
        static const std::regex pattern(R"(\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*)");
        std::smatch m;
        const std::string s = v.get<std::string>();
        if (!std::regex_match(s, m, pattern)) throw InvalidInput(name + ": cannot read '" + s + "' as an angle");
        double factor = 1.0;
        const std::string head = m[1].str();
        if (head == "-") {
            factor = -1.0;
        } else if (!head.empty() && head != "+") {
            factor = std::stod(head);
        }
        const double divisor = m[2].matched ? std::stod(m[2].str()) : 1.0;
        if (divisor == 0.0) throw InvalidInput(name + ": division by zero");
        return factor * kPi / divisor;
    }

private:
    const json& node_;
    std::string path_;
};

LatticeSpec parse_lattice(const Section& s)
{
    s.allow_only({"N", "M", "omega_l", "J_x", "J_y"});
    LatticeSpec spec;
    spec.half_x = s.integer("N", spec.half_x);
    spec.half_y = s.integer("M", spec.half_y);
    spec.omega_l = s.number("omega_l", spec.omega_l);
    spec.hop_x = s.number("J_x", spec.hop_x);
    spec.hop_y = s.number("J_y", spec.hop_y);
    if (spec.half_x < 1) throw InvalidInput(s.field("N") + " must be positive");
    if (spec.half_y < 1) throw InvalidInput(s.field("M") + " must be positive");
    if (!(spec.hop_x > 0.0)) throw InvalidInput(s.field("J_x") + " must be positive");
    if (!(spec.hop_y >= 0.0)) throw InvalidInput(s.field("J_y") + " must be non-negative");
    return spec;
}

cplx parse_weight(const json& v, const std::string& name)
{
    if (v.is_number()) return Section::as_number(v, name);
    if (v.is_array() && v.size() == 2) {
        return {Section::as_number(v[0], name + "[0]"), Section::as_number(v[1], name + "[1]")};
    }
    if (v.is_object()) {
        const Section w(v, name);
        w.allow_only({"modulus", "phase"});
        if (!w.has("modulus")) throw InvalidInput(w.field("modulus") + " is required");
        return w.number("modulus", 0.0) * std::polar(1.0, w.angle("phase", 0.0));
    }
    throw InvalidInput(name + " must be a number, [re, im] or {modulus, phase}");
}

CouplingConfig parse_coupling(const Section& s)
{
    s.allow_only({"mode", "g", "omega_a", "ratios", "preset", "rows", "path"});
    const std::string mode = s.text("mode", "small");
    const double g = s.number("g", 1.0);
    const double omega_a = s.number("omega_a", 0.0);
    CouplingConfig out;
    if (mode == "small") {
        out = small_atom(g, omega_a);
    } else if (mode == "line") {
        std::vector<double> ratios;
        if (s.has("ratios") == s.has("preset")) throw InvalidInput(s.field("ratios") + " or " + s.field("preset") + " (exactly one) is required");
        if (s.has("preset")) {
            const std::string preset = s.text("preset", "");
            if (preset == "single_window") ratios = presets::single_window_ratios();
            else if (preset == "two_window") ratios = presets::two_window_ratios();
            else if (preset == "four_window") ratios = presets::four_window_ratios();
            else throw InvalidInput(s.field("preset") + " must be single_window, two_window or four_window");
        } else {
            const json& r = s.raw("ratios");
            if (!r.is_array() || r.empty()) throw InvalidInput(s.field("ratios") + " must be a non-empty array");
            for (std::size_t i = 0; i < r.size(); ++i) {
                ratios.push_back(Section::as_number(r[i], s.field("ratios") + "[" + std::to_string(i) + "]"));
            }
        }
        out = expand(SymmetricLineConfig{omega_a, g, ratios});
    } else if (mode == "grid") {
        if (s.has("rows") == s.has("preset")) throw InvalidInput(s.field("rows") + " or " + s.field("preset") + " (exactly one) is required");
        std::vector<std::vector<cplx>> rows;
        if (s.has("preset")) {
            if (s.text("preset", "") != "asymmetric") throw InvalidInput(s.field("preset") + " must be asymmetric");
            rows = presets::asymmetric_grid();
        } else {
            const json& r = s.raw("rows");
            if (!r.is_array() || r.empty()) throw InvalidInput(s.field("rows") + " must be a non-empty array");
            for (std::size_t i = 0; i < r.size(); ++i) {
                const std::string row_name = s.field("rows") + "[" + std::to_string(i) + "]";
                if (!r[i].is_array()) throw InvalidInput(row_name + " must be an array");
                std::vector<cplx> row;
                for (std::size_t j = 0; j < r[i].size(); ++j) {
                    row.push_back(parse_weight(r[i][j], row_name + "[" + std::to_string(j) + "]"));
                }
                rows.push_back(std::move(row));
            }
        }
        try {
            out = grid_config(rows, g, omega_a);
        } catch (const InvalidInput& e) {
            throw InvalidInput(s.field("rows") + ": " + e.what());
        }
    } else if (mode == "table") {
        if (!s.has("path")) throw InvalidInput(s.field("path") + " is required for mode table");
        out.g = g;
        out.omega_a = omega_a;
        try {
            out.points = load_coupling_table(s.text("path", ""));
        } catch (const InvalidInput& e) {
            throw InvalidInput(s.field("path") + ": " + e.what());
        }
    } else {
        throw InvalidInput(s.field("mode") + " must be small, line, grid or table");
    }
    try {
        out.validate();
    } catch (const InvalidInput& e) {
        throw InvalidInput(s.field("mode") + " " + mode + ": " + e.what());
    }
    return out;
}

PacketSection parse_packet(const Section& s)
{
    PacketSection p;
    const std::string kind = s.text("kind", "stable");
    if (kind == "line") {
        s.allow_only({"kind", "column"});
        p.kind = PacketKind::Line;
        p.column = s.integer("column", p.column);
    } else if (kind == "stable") {
        s.allow_only({"kind", "start_n", "start_m", "step_time", "window_x", "threshold", "max_iters", "stop_n",
                      "work_margin"});
        p.kind = PacketKind::Stable;
        auto& o = p.stable;
        o.start_n = s.integer("start_n", o.start_n);
        o.start_m = s.integer("start_m", o.start_m);
        o.step_time = s.number("step_time", o.step_time);
        o.window_x = s.integer("window_x", o.window_x);
        o.threshold = s.number("threshold", o.threshold);
        o.max_iters = s.integer("max_iters", o.max_iters);
        o.work_margin = s.integer("work_margin", o.work_margin);
        if (s.has("stop_n")) o.stop_n = s.integer("stop_n", 0);
        if (!(o.step_time > 0.0)) throw InvalidInput(s.field("step_time") + " must be positive");
        if (o.window_x < 0) throw InvalidInput(s.field("window_x") + " must be non-negative (0 selects automatically)");
        if (!(o.threshold > 0.0 && o.threshold <= 1.0)) throw InvalidInput(s.field("threshold") + " must lie in (0, 1]");
        if (o.max_iters < 1) throw InvalidInput(s.field("max_iters") + " must be positive");
        if (o.work_margin < 1) throw InvalidInput(s.field("work_margin") + " must be positive");
    } else if (kind == "gaussian") {
        s.allow_only({"kind", "n0", "m0", "sigma_x", "sigma_y", "carrier"});
        p.kind = PacketKind::Gaussian;
        p.n0 = s.integer("n0", p.n0);
        p.m0 = s.integer("m0", p.m0);
        p.sigma_x = s.number("sigma_x", p.sigma_x);
        p.sigma_y = s.number("sigma_y", p.sigma_y);
        p.carrier = s.momentum("carrier", p.carrier);
        if (!(p.sigma_x > 0.0)) throw InvalidInput(s.field("sigma_x") + " must be positive");
        if (!(p.sigma_y > 0.0)) throw InvalidInput(s.field("sigma_y") + " must be positive");
    } else if (kind == "diagonal") {
        s.allow_only({"kind", "window", "start", "stop", "threshold"});
        p.kind = PacketKind::Diagonal;
        p.window = s.integer("window", p.window);
        std::tie(p.start_n, p.start_m) = s.site("start", {p.start_n, p.start_m});
        std::tie(p.stop_n, p.stop_m) = s.site("stop", {p.stop_n, p.stop_m});
        p.threshold = s.number("threshold", p.threshold);
        if (p.window < 1) throw InvalidInput(s.field("window") + " must be positive");
        if (!(p.threshold > 0.0 && p.threshold <= 1.0)) throw InvalidInput(s.field("threshold") + " must lie in (0, 1]");
    } else {
        throw InvalidInput(s.field("kind") + " must be line, stable, gaussian or diagonal");
    }
    return p;
}

RunSection parse_run(const Section& s)
{
    s.allow_only({"t", "snapshots", "subtract_background", "write_snapshots", "quadrant_window", "quadrant_ky"});
    RunSection r;
    r.t = s.number("t", r.t);
    r.snapshots = s.integer("snapshots", r.snapshots);
    r.subtract_background = s.flag("subtract_background", r.subtract_background);
    r.write_snapshots = s.flag("write_snapshots", r.write_snapshots);
    if (s.has("quadrant_window")) std::tie(r.quadrant_width_x, r.quadrant_width_y) = s.site("quadrant_window", {0, 0});
    r.quadrant_ky = s.angle("quadrant_ky", r.quadrant_ky);
    if (!(r.t >= 0.0)) throw InvalidInput(s.field("t") + " must be non-negative");
    if (r.snapshots < 2) throw InvalidInput(s.field("snapshots") + " must be at least 2");
    if (r.quadrant_width_x < 0 || r.quadrant_width_y < 0) throw InvalidInput(s.field("quadrant_window") + " must be non-negative");
    if (!(r.quadrant_ky > 0.0 && r.quadrant_ky < kPi)) throw InvalidInput(s.field("quadrant_ky") + " must lie in (0, pi)");
    return r;
}

void parse_range(const Section& s, const std::string& key, double& lo, double& hi, int& count)
{
    const json& v = s.raw(key);
    if (!v.is_array() || v.size() != 3 || !v[2].is_number_integer()) {
        throw InvalidInput(s.field(key) + " must be [low, high, count]");
    }
    lo = Section::as_number(v[0], s.field(key) + "[0]");
    hi = Section::as_number(v[1], s.field(key) + "[1]");
    count = v[2].get<int>();
    if (count < 1) throw InvalidInput(s.field(key) + "[2] must be positive");
    if (count > 1 && !(hi > lo)) throw InvalidInput(s.field(key) + " needs high > low");
}

SmatrixSection parse_smatrix(const Section& s)
{
    s.allow_only({"k_in", "samples", "sweep"});
    SmatrixSection out;
    out.incident = s.momentum("k_in", out.incident);
    out.samples = s.integer("samples", out.samples);
    if (out.samples < 16) throw InvalidInput(s.field("samples") + " must be at least 16");
    if (s.has("sweep")) {
        const Section w = s.child("sweep");
        w.allow_only({"g", "delta"});
        SweepSection sweep;
        if (w.has("g")) parse_range(w, "g", sweep.g_lo, sweep.g_hi, sweep.g_count);
        if (w.has("delta")) {
            double lo = 0.0;
            double hi = 0.0;
            parse_range(w, "delta", lo, hi, sweep.delta_count);
            sweep.delta_lo = lo;
            sweep.delta_hi = hi;
        }
        out.sweep = sweep;
    }
    return out;
}

OptimizeSection parse_optimize(const Section& s)
{
    s.allow_only({"windows", "k_in", "domain", "parametrization", "half_count", "half_n", "half_m", "bound", "g",
                  "omega_a", "algorithm", "restarts", "seed", "polish", "samples", "regularization", "gradient",
                  "swarm", "reference"});
    OptimizeSection o;
    if (!s.has("windows") || !s.raw("windows").is_array()) throw InvalidInput(s.field("windows") + " must be an array");
    const json& windows = s.raw("windows");
    for (std::size_t j = 0; j < windows.size(); ++j) {
        const Section w(windows[j], s.field("windows") + "[" + std::to_string(j) + "]");
        w.allow_only({"center", "width"});
        if (!w.has("center") || !w.has("width")) throw InvalidInput(w.field("center") + " and width are required");
        o.target.windows.push_back({w.angle("center", 0.0), w.angle("width", 0.0)});
    }
    o.target.incident = s.momentum("k_in", {kPi / 2.0, 0.0});
    const std::string domain = s.text("domain", "upper");
    if (domain == "upper") o.target.domain = ShellDomain::UpperHalf;
    else if (domain == "full") o.target.domain = ShellDomain::Full;
    else throw InvalidInput(s.field("domain") + " must be upper or full");
    try {
        o.target.validate();
    } catch (const InvalidInput& e) {
        throw InvalidInput(s.field("windows") + ": " + e.what());
    }

    const std::string kind = s.text("parametrization", "line");
    if (kind == "line") o.kind = ParametrizationKind::Line;
    else if (kind == "grid") o.kind = ParametrizationKind::Grid;
    else throw InvalidInput(s.field("parametrization") + " must be line or grid");
    o.half_count = s.integer("half_count", o.half_count);
    o.half_n = s.integer("half_n", o.half_n);
    o.half_m = s.integer("half_m", o.half_m);
    o.bound = s.number("bound", o.bound);
    if (o.half_count < 0) throw InvalidInput(s.field("half_count") + " must be non-negative");
    if (o.half_n < 0 || o.half_m < 0) throw InvalidInput(s.field("half_n") + "/half_m must be non-negative");
    if (!(o.bound > 0.0)) throw InvalidInput(s.field("bound") + " must be positive");

    auto& r = o.restarts;
    const std::string algorithm = s.text("algorithm", "gradient");
    if (algorithm == "gradient") r.algorithm = Algorithm::GradientDescent;
    else if (algorithm == "swarm") r.algorithm = Algorithm::ParticleSwarm;
    else throw InvalidInput(s.field("algorithm") + " must be gradient or swarm");
    r.restarts = s.integer("restarts", r.restarts);
    if (r.restarts < 1) throw InvalidInput(s.field("restarts") + " must be positive");
    if (s.has("seed")) {
        const json& seed = s.raw("seed");
        if (!seed.is_number_unsigned()) throw InvalidInput(s.field("seed") + " must be a non-negative integer");
        r.seed = seed.get<std::uint64_t>();
    }
    r.polish = s.flag("polish", r.polish);
    if (s.has("gradient")) {
        const Section gsec = s.child("gradient");
        gsec.allow_only({"difference_step", "backtrack", "initial_step", "sufficient_increase", "max_iterations"});
        auto& g = r.gradient;
        g.difference_step = gsec.number("difference_step", g.difference_step);
        g.backtrack = gsec.number("backtrack", g.backtrack);
        g.initial_step = gsec.number("initial_step", g.initial_step);
        g.sufficient_increase = gsec.number("sufficient_increase", g.sufficient_increase);
        g.max_iterations = gsec.integer("max_iterations", g.max_iterations);
        if (!(g.difference_step > 0.0)) throw InvalidInput(gsec.field("difference_step") + " must be positive");
        if (!(g.backtrack > 0.0 && g.backtrack < 1.0)) throw InvalidInput(gsec.field("backtrack") + " must lie in (0, 1)");
        if (!(g.initial_step > 0.0)) throw InvalidInput(gsec.field("initial_step") + " must be positive");
        if (g.max_iterations < 0) throw InvalidInput(gsec.field("max_iterations") + " must be non-negative");
    }
    if (s.has("swarm")) {
        const Section wsec = s.child("swarm");
        wsec.allow_only({"particles", "inertia", "cognitive", "social", "iterations"});
        auto& w = r.swarm;
        w.particles = wsec.integer("particles", w.particles);
        w.inertia = wsec.number("inertia", w.inertia);
        w.cognitive = wsec.number("cognitive", w.cognitive);
        w.social = wsec.number("social", w.social);
        w.iterations = wsec.integer("iterations", w.iterations);
        if (w.particles < 1) throw InvalidInput(wsec.field("particles") + " must be positive");
        if (w.iterations < 0) throw InvalidInput(wsec.field("iterations") + " must be non-negative");
    }
    o.evaluator.samples_per_branch = s.integer("samples", o.evaluator.samples_per_branch);
    o.evaluator.regularization = s.number("regularization", o.evaluator.regularization);
    if (o.evaluator.samples_per_branch < 16) throw InvalidInput(s.field("samples") + " must be at least 16");
    if (!(o.evaluator.regularization > 0.0)) throw InvalidInput(s.field("regularization") + " must be positive");

    const double g = s.number("g", 1.0);
    const double omega_a = s.number("omega_a", 0.0);
    if (s.has("reference")) {
        o.reference = parse_coupling(s.child("reference"));
        o.reference->g = g;
        o.reference->omega_a = omega_a;
    }
    o.restarts = r;
    o.g = g;
    o.omega_a = omega_a;
    return o;
}

} // namespace

Subcommand parse_subcommand(const std::string& name)
{
    if (name == "dispersion") return Subcommand::Dispersion;
    if (name == "prepare") return Subcommand::Prepare;
    if (name == "scatter") return Subcommand::Scatter;
    if (name == "smatrix") return Subcommand::Smatrix;
    if (name == "optimize") return Subcommand::Optimize;
    if (name == "emit") return Subcommand::Emit;
    throw InvalidInput("unknown subcommand '" + name + "'");
}

std::string to_string(Subcommand command)
{
    switch (command) {
    case Subcommand::Dispersion: return "dispersion";
    case Subcommand::Prepare: return "prepare";
    case Subcommand::Scatter: return "scatter";
    case Subcommand::Smatrix: return "smatrix";
    case Subcommand::Optimize: return "optimize";
    case Subcommand::Emit: return "emit";
    }
    return "unknown";
}

ExperimentConfig parse_config(const json& document)
{
    const Section root(document, "config");
    root.allow_only({"lattice", "coupling", "packet", "run", "smatrix", "optimize", "output"});
    ExperimentConfig config;
    config.source = document;
    if (root.has("lattice")) config.lattice = parse_lattice(root.child("lattice"));
    if (root.has("coupling")) config.coupling = parse_coupling(root.child("coupling"));
    if (root.has("packet")) config.packet = parse_packet(root.child("packet"));
    if (root.has("run")) config.run = parse_run(root.child("run"));
    if (root.has("smatrix")) config.smatrix = parse_smatrix(root.child("smatrix"));
    if (root.has("optimize")) config.optimize = parse_optimize(root.child("optimize"));
    config.output = root.text("output", "");
    return config;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open config '" + path + "'");
    json document;
    try {
        document = json::parse(is, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw InvalidInput("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(document);
}

void require_sections(const ExperimentConfig& config, Subcommand command)
{
    const auto need = [&](bool present, const char* name) {
        if (!present) throw InvalidInput("config." + std::string(name) + " is required by " + to_string(command));
    };
    config.lattice.validate();
    switch (command) {
    case Subcommand::Dispersion:
        break;
    case Subcommand::Prepare:
        need(config.packet.has_value(), "packet");
        break;
    case Subcommand::Scatter:
        need(config.coupling.has_value(), "coupling");
        need(config.packet.has_value(), "packet");
        need(config.run.has_value(), "run");
        break;
    case Subcommand::Smatrix:
        need(config.coupling.has_value(), "coupling");
        need(config.smatrix.has_value(), "smatrix");
        break;
    case Subcommand::Optimize:
        need(config.optimize.has_value(), "optimize");
        break;
    case Subcommand::Emit:
        need(config.coupling.has_value(), "coupling");
        need(config.run.has_value(), "run");
        break;
    }
    const auto& spec = config.lattice;
    if (config.coupling && command != Subcommand::Dispersion && command != Subcommand::Prepare
        && command != Subcommand::Optimize) {
        try {
            config.coupling->validate(spec);
        } catch (const InvalidInput& e) {
            throw InvalidInput(std::string("config.coupling: ") + e.what());
        }
    }
    if (config.packet && (command == Subcommand::Prepare || command == Subcommand::Scatter)) {
        const auto& p = *config.packet;
        const auto inside = [&](int n, int m) { return std::abs(n) <= spec.half_x && std::abs(m) <= spec.half_y; };
        if (p.kind == PacketKind::Line && !inside(p.column, 0)) throw InvalidInput("config.packet.column lies outside the lattice");
        if (p.kind == PacketKind::Gaussian && !inside(p.n0, p.m0)) throw InvalidInput("config.packet.n0/m0 lies outside the lattice");
        if (p.kind == PacketKind::Stable) {
            if (p.stable.stop_n && !inside(*p.stable.stop_n, 0)) throw InvalidInput("config.packet.stop_n lies outside the lattice");
            if (p.stable.window_x > spec.nx()) throw InvalidInput("config.packet.window_x exceeds the lattice width");
        }
        if (p.kind == PacketKind::Diagonal) {
            if (!inside(p.stop_n, p.stop_m)) throw InvalidInput("config.packet.stop lies outside the lattice");
            if (p.window > spec.nx() || p.window > spec.ny()) throw InvalidInput("config.packet.window exceeds the lattice");
        }
    }
    if (command == Subcommand::Scatter || command == Subcommand::Emit) {
        const auto& r = *config.run;
        if (r.quadrant_width_x > 0 && (r.quadrant_width_x > spec.half_x || r.quadrant_width_y > spec.half_y)) {
            throw InvalidInput("config.run.quadrant_window exceeds the lattice quadrant");
        }
    }
    if (command == Subcommand::Smatrix) {
        const double e = dispersion(spec, config.smatrix->incident);
        if (!(e > spec.band_bottom() && e < spec.band_top())) throw InvalidInput("config.smatrix.k_in lies at a band edge");
    }
    if (command == Subcommand::Optimize) {
        const auto& o = *config.optimize;
        const double e = dispersion(spec, o.target.incident);
        if (!(e > spec.band_bottom() && e < spec.band_top())) throw InvalidInput("config.optimize.k_in lies at a band edge");
        const int reach_n = o.kind == ParametrizationKind::Line ? 0 : o.half_n;
        const int reach_m = o.kind == ParametrizationKind::Line ? o.half_count : o.half_m;
        if (reach_n > spec.half_x || reach_m > spec.half_y) throw InvalidInput("config.optimize coupling block exceeds the lattice");
    }
}

StablePacket build_packet(const LatticeSpec& spec, const PacketSection& packet)
{
    switch (packet.kind) {
    case PacketKind::Stable:
        return prepare_stable_packet(spec, packet.stable);
    case PacketKind::Diagonal:
        return diagonal_packet(spec, packet.window, packet.start_n, packet.start_m, packet.stop_n, packet.stop_m,
                               packet.threshold);
    case PacketKind::Line: {
        StablePacket out;
        out.state = line_packet(spec, packet.column);
        out.window = PacketWindow{packet.column, 0, 1, spec.ny(), {}};
        return out;
    }
    case PacketKind::Gaussian: {
        StablePacket out;
        out.state = gaussian_packet(spec, packet.n0, packet.m0, packet.sigma_x, packet.sigma_y, packet.carrier);
        out.window = PacketWindow{packet.n0, packet.m0, 2 * static_cast<int>(std::lround(packet.sigma_x)) + 1,
                                  2 * static_cast<int>(std::lround(packet.sigma_y)) + 1, packet.carrier};
        return out;
    }
    }
    throw InvalidInput("unknown packet kind");
}

ScatteringStudy scattering_study(const LatticeSpec& spec, const CouplingConfig& coupling,
                                 const SingleExcitationState& packet, Vec2 k_in, double t, int snapshots,
                                 const std::vector<double>& extra_times)
{
    std::vector<double> times = uniform_times(t, snapshots);
    for (double x : extra_times) {
        if (!(x > times.back())) throw InvalidInput("extra snapshot times must increase beyond t");
        times.push_back(x);
    }
    ScatteringStudy out;
    out.run = evolve(spec, coupling, packet, times);
    out.free = free_run(spec, packet, times);
    out.scattered = background_subtract(out.run, out.free);
    out.population = atom_population(out.run);
    out.final_index = static_cast<std::size_t>(snapshots - 1);
    out.analytic = s_minus_one(coupling, spec, k_in);
    out.crosscheck = smatrix_crosscheck(spec, out.scattered[out.final_index], out.analytic);
    return out;
}

namespace {

Vec2 shell_mode(const LatticeSpec& spec, Vec2 k_in, double target_ky)
{
    const double energy = dispersion(spec, k_in);
    const double c = (spec.omega_l - energy - 2.0 * spec.hop_y * std::cos(target_ky)) / (2.0 * spec.hop_x);
    if (std::abs(c) >= 1.0) throw InvalidInput("no propagating shell mode at the requested k_y");
    return {std::acos(c), target_ky};
}

} // namespace

double quadrant_travel_time(const LatticeSpec& spec, Vec2 k_in, double target_ky, int width_x)
{
    const Vec2 v = group_velocity(spec, shell_mode(spec, k_in, target_ky));
    return width_x / v.x;
}

QuadrantFidelity quadrant_fidelity(const LatticeSpec& spec, const ComplexGrid& at_t, const ComplexGrid& later,
                                   Vec2 k_in, double target_ky, int width_x, int width_y)
{
    QuadrantFidelity out;
    const Vec2 v = group_velocity(spec, shell_mode(spec, k_in, target_ky));
    out.travel_time = width_x / v.x;
    out.shift_n = width_x;
    out.shift_m = static_cast<int>(std::lround(v.y * out.travel_time));
    out.window = heaviest_window(at_t, width_x, width_y, 1, 1);
    out.fidelity = windowed_fidelity(later, at_t, out.window, out.shift_n, out.shift_m);
    return out;
}

namespace {

json to_json(Vec2 v) { return json::array({v.x, v.y}); }
json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const PacketWindow& w)
{
    return {{"center", {w.center_n, w.center_m}}, {"width", {w.width_x, w.width_y}}, {"carrier", to_json(w.carrier)}};
}

json to_json(const ObjectiveReport& r)
{
    return {{"q", r.q},
            {"window_weights", r.window_weights},
            {"domain_weight", r.domain_weight},
            {"off_target", r.off_target()},
            {"degenerate", r.degenerate},
            {"floored", r.floored},
            {"sigma_included", r.sigma_included}};
}

// Energies are in the unit of the config's hopping values and times in its inverse.
std::string unit_of(const std::string& column)
{
    static const std::map<std::string, std::string> units{
        {"n", "site"},          {"m", "site"},          {"shift_n", "site"},     {"shift_m", "site"},
        {"kx", "rad/site"},     {"ky", "rad/site"},     {"dl", "rad/site"},      {"t", "1/energy"},
        {"omega", "energy"},    {"g", "energy"},        {"delta", "energy"},     {"re", "amplitude"},
        {"im", "amplitude"},    {"probability", "1"},   {"population", "1"},     {"fidelity", "1"},
        {"transmission", "1"},  {"q", "1"},             {"iteration", "count"},  {"restart", "count"},
        {"density", "site^2"},  {"density_shape", "1/energy^2"}, {"grad_norm", "energy*site"}};
    const auto it = units.find(column);
    return it == units.end() ? "1" : it->second;
}

// Output directory with an index of every file written.
class RunDirectory {
public:
    RunDirectory(fs::path root, GridFormat format) : root_(std::move(root)), format_(format) {}

    const fs::path& root() const noexcept { return root_; }
    bool binary() const noexcept { return format_ == GridFormat::Binary; }

    void table(const std::string& stem, const io::CsvTable& t, const std::string& description)
    {
        const std::string name = stem + ".csv";
        io::save_csv((root_ / name).string(), t);
        json units = json::object();
        for (const auto& c : t.header) units[c] = unit_of(c);
        index_.push_back({{"file", name}, {"description", description}, {"columns", t.header}, {"units", units}});
    }

    void position_grid(const std::string& stem, const ComplexGrid& grid, const std::string& description)
    {
        if (format_ == GridFormat::Binary) {
            const std::string name = stem + ".bin";
            io::save_grid_binary((root_ / name).string(), grid);
            index_.push_back({{"file", name}, {"description", description}, {"layout", "position, rows n ascending"}});
        } else {
            table(stem, io::position_table(grid), description);
        }
    }

    void momentum_grid(const std::string& stem, const ComplexGrid& momentum, const std::string& description)
    {
        if (format_ == GridFormat::Binary) {
            const std::string name = stem + ".bin";
            io::save_grid_binary((root_ / name).string(), momentum);
            index_.push_back({{"file", name}, {"description", description}, {"layout", "momentum, rows k_x ascending"}});
        } else {
            table(stem, io::momentum_table(momentum), description);
        }
    }

    void record(const std::string& name, const std::string& description)
    {
        index_.push_back({{"file", name}, {"description", description}});
    }

    const json& index() const noexcept { return index_; }

private:
    fs::path root_;
    GridFormat format_;
    json index_ = json::array();
};

io::CsvTable series(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns)
{
    io::CsvTable t{header, {}};
    for (std::size_t i = 0; i < columns.front().size(); ++i) {
        std::vector<double> row;
        for (const auto& c : columns) row.push_back(c[i]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

io::CsvTable shell_table(const ShellAmplitude& a)
{
    io::CsvTable t{{"kx", "ky", "grad_norm", "dl", "re", "im", "density"}, {}};
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
        const auto& s = a.shell.samples[i];
        const cplx v = a.amplitudes[i];
        t.rows.push_back({s.k.x, s.k.y, s.grad_norm, s.dl, v.real(), v.imag(), std::norm(v)});
    }
    return t;
}

json dispersion_workflow(const ExperimentConfig& config, RunDirectory& dir)
{
    const auto& spec = config.lattice;
    const RealGrid omega = dispersion_grid(spec);
    ComplexGrid as_complex(omega.half_x(), omega.half_y());
    for (std::size_t i = 0; i < omega.size(); ++i) as_complex.values()[i] = omega.values()[i];
    double lo = omega.values()[0];
    double hi = lo;
    double asymmetry = 0.0;
    for (int i = 0; i < omega.nx(); ++i) {
        for (int j = 0; j < omega.ny(); ++j) {
            const double v = omega(i, j);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            asymmetry = std::max(asymmetry, std::abs(v - omega(omega.nx() - 1 - i, omega.ny() - 1 - j)));
        }
    }
    if (dir.binary()) {
        dir.momentum_grid("dispersion", as_complex, "band energy omega(k) in the real part");
    } else {
        dir.table("dispersion", io::momentum_table(omega, "omega"), "band energy omega(k), units of the hopping");
    }
    return {{"grid_min", lo},
            {"grid_max", hi},
            {"band_bottom", spec.band_bottom()},
            {"band_top", spec.band_top()},
            {"even_symmetry_deviation", asymmetry},
            {"even_symmetric", asymmetry == 0.0}};
}

json prepare_workflow(const ExperimentConfig& config, RunDirectory& dir)
{
    const auto& spec = config.lattice;
    const StablePacket packet = build_packet(spec, *config.packet);
    dir.position_grid("packet", packet.state.photon, "prepared packet amplitude");
    dir.momentum_grid("packet_momentum", to_momentum(packet.state.photon), "prepared packet in momentum space");
    if (!packet.fidelity_trace.empty()) {
        std::vector<double> it(packet.fidelity_trace.size());
        for (std::size_t i = 0; i < it.size(); ++i) it[i] = static_cast<double>(i + 1);
        dir.table("stabilization", series({"iteration", "fidelity"}, {it, packet.fidelity_trace}),
                  "fidelity after each stabilization iteration");
    }
    json report = {{"window", to_json(packet.window)},
                   {"center_of_mass", to_json(center_of_mass(packet.state.photon))}};
    if (!packet.fidelity_trace.empty()) {
        report["iterations"] = packet.iterations;
        report["stabilization_fidelity"] = packet.fidelity;
    }

    const Vec2 v = group_velocity(spec, packet.window.carrier);
    if (v.x > 1e-9) {
        const int width = packet.window.width_x;
        const double travel = width / v.x;
        std::vector<double> ts = linspace(0.0, 2.0 * travel, 21);
        std::vector<double> dn, dm, pf;
        for (double t : ts) {
            dn.push_back(std::round(v.x * t));
            dm.push_back(std::round(v.y * t));
            pf.push_back(packet_fidelity(spec, packet.state, t, static_cast<int>(dn.back()), static_cast<int>(dm.back())));
        }
        dir.table("fidelity_vs_time", series({"t", "shift_n", "shift_m", "fidelity"}, {ts, dn, dm, pf}),
                  "propagating fidelity against free evolution over up to twice the packet width");
        const double over_width =
            packet_fidelity(spec, packet.state, travel, width, static_cast<int>(std::lround(v.y * travel)));
        report["travel_time"] = travel;
        report["fidelity_over_width"] = over_width;
    } else {
        report["fidelity_over_width"] = nullptr;
    }
    return report;
}

json scatter_workflow(const ExperimentConfig& config, RunDirectory& dir)
{
    const auto& spec = config.lattice;
    const auto& run = *config.run;
    const auto& coupling = *config.coupling;
    const StablePacket packet = build_packet(spec, *config.packet);
    const Vec2 k_in = config.smatrix ? config.smatrix->incident : packet.window.carrier;

    std::vector<double> extra;
    if (run.quadrant_width_x > 0) extra.push_back(run.t + quadrant_travel_time(spec, k_in, run.quadrant_ky, run.quadrant_width_x));
    const ScatteringStudy study = scattering_study(spec, coupling, packet.state, k_in, run.t, run.snapshots, extra);

    dir.table("population", series({"t", "population"}, {study.run.times, study.population}),
              "excited-state population of the atom");
    const std::size_t last = study.final_index;
    dir.position_grid("final", study.run.snapshots[last].photon, "photon amplitude at the final time");
    if (run.subtract_background) {
        dir.position_grid("scattered", study.scattered[last], "photon amplitude minus the free evolution");
        dir.momentum_grid("scattered_momentum", to_momentum(study.scattered[last]),
                          "background-subtracted amplitude in momentum space");
    }
    dir.table("shell", shell_table(study.analytic), "analytic S-1 amplitude and density on the energy shell");
    if (run.write_snapshots) {
        for (std::size_t i = 0; i < study.run.snapshots.size(); ++i) {
            std::ostringstream name;
            name << "snapshot_" << std::setw(3) << std::setfill('0') << i;
            dir.position_grid(name.str(), study.run.snapshots[i].photon, "photon amplitude at t = " + std::to_string(study.run.times[i]));
        }
    }

    double peak = 0.0;
    double asymmetry = 0.0;
    const auto& d = study.scattered[last];
    for (int n = -d.half_x(); n <= d.half_x(); ++n) {
        for (int m = -d.half_y(); m <= d.half_y(); ++m) {
            peak = std::max(peak, std::norm(d.at(n, m)));
            asymmetry = std::max(asymmetry, std::abs(std::norm(d.at(n, m)) - std::norm(d.at(n, -m))));
        }
    }
    const auto& cc = study.crosscheck;
    json report = {{"trivial", coupling.g == 0.0},
                   {"incident", to_json(k_in)},
                   {"packet_window", to_json(packet.window)},
                   {"max_population", *std::max_element(study.population.begin(), study.population.end())},
                   {"crosscheck",
                    {{"similarity", cc.similarity},
                     {"scattered_weight", cc.scattered_weight},
                     {"band_fraction", cc.band_fraction},
                     {"inconclusive", cc.inconclusive}}},
                   {"mirror_asymmetry", peak > 0.0 ? asymmetry / peak : 0.0},
                   {"sigma", to_json(study.analytic.sigma.value)}};
    if (run.quadrant_width_x > 0) {
        const auto q = quadrant_fidelity(spec, study.scattered[last], study.scattered[last + 1], k_in,
                                         run.quadrant_ky, run.quadrant_width_x, run.quadrant_width_y);
        report["quadrant"] = {{"window", to_json(q.window)},
                              {"travel_time", q.travel_time},
                              {"shift", {q.shift_n, q.shift_m}},
                              {"fidelity", q.fidelity}};
    }
    return report;
}

json smatrix_workflow(const ExperimentConfig& config, RunDirectory& dir)
{
    const auto& spec = config.lattice;
    const auto& coupling = *config.coupling;
    const auto& sm = *config.smatrix;
    const TransmissionReport t = transmission_report(coupling, spec, sm.incident);
    const ShellAmplitude a = s_minus_one(coupling, spec, sm.incident, sm.samples);
    dir.table("shell", shell_table(a), "analytic S-1 amplitude and density on the energy shell");
    json report = {{"incident", to_json(sm.incident)},
                   {"energy", t.energy},
                   {"group_speed", t.group_speed},
                   {"coupling", to_json(t.coupling)},
                   {"sigma", to_json(t.sigma.value)},
                   {"transmission", t.probability},
                   {"shell_length", a.shell.total_length()},
                   {"upper_half_weight", a.weight(0.0, kPi)},
                   {"full_weight", a.weight(-kPi - 1.0, kPi + 1.0)}};
    if (sm.sweep) {
        const auto& s = *sm.sweep;
        const double axis = 2.0 * spec.hop_y;
        const double lo = s.delta_lo.value_or(axis - 2.0 * spec.hop_x);
        const double hi = s.delta_hi.value_or(axis + 2.0 * spec.hop_x);
        const auto gs = linspace(s.g_lo, s.g_hi, s.g_count);
        const auto ds = linspace(lo, hi, s.delta_count);
        const TransmissionGrid grid = transmission_sweep(coupling, spec, sm.incident, gs, ds);
        io::CsvTable table{{"g", "delta", "transmission"}, {}};
        double asymmetry = 0.0;
        const bool mirrored = std::abs((lo + hi) - 2.0 * axis) < 1e-12 * (1.0 + std::abs(axis));
        std::size_t arg_i = 0;
        std::size_t arg_j = 0;
        for (std::size_t i = 0; i < gs.size(); ++i) {
            for (std::size_t j = 0; j < ds.size(); ++j) {
                table.rows.push_back({gs[i], ds[j], grid.at(i, j)});
                if (grid.at(i, j) < grid.at(arg_i, arg_j)) {
                    arg_i = i;
                    arg_j = j;
                }
                if (mirrored) asymmetry = std::max(asymmetry, std::abs(grid.at(i, j) - grid.at(i, ds.size() - 1 - j)));
            }
        }
        dir.table("sweep", table, "transmission over coupling strength g and detuning delta = omega_l - omega_a");
        report["sweep"] = {{"minimum", grid.minimum()},
                           {"argmin", {gs[arg_i], ds[arg_j]}},
                           {"axis_delta", axis},
                           {"mirror_asymmetry", mirrored ? json(asymmetry) : json(nullptr)}};
    }
    return report;
}

json optimize_workflow(const ExperimentConfig& config, const RunOptions& options, RunDirectory& dir)
{
    const auto& spec = config.lattice;
    const auto& o = *config.optimize;
    const Parametrization par = o.kind == ParametrizationKind::Line
                                    ? Parametrization::line(o.half_count, o.g, o.omega_a, o.bound)
                                    : Parametrization::grid(o.half_n, o.half_m, o.g, o.omega_a, o.bound);
    const ObjectiveEvaluator evaluator(spec, o.target, par.layout(), o.evaluator);
    RestartOptions restarts = o.restarts;
    if (options.seed) restarts.seed = *options.seed;
    const RestartSummary summary = optimize(evaluator, par, restarts);
    const auto& best = summary.best;

    save_coupling_table((dir.root() / "best_coupling.txt").string(), best.best.config);
    dir.record("best_coupling.txt", "coupling table of the best configuration (n m re im)");
    io::CsvTable trace{{"restart", "iteration", "q"}, {}};
    for (const auto& run : summary.runs) {
        for (std::size_t i = 0; i < run.trace.size(); ++i) {
            trace.rows.push_back({double(run.restart), double(i), run.trace[i]});
        }
    }
    dir.table("trace", trace, "best Q after each iteration of every restart");

    // Shell export of the best configuration. Without Sigma only the shape |G|^2/|grad E|^2 is known.
    json shell_note = "amplitude";
    try {
        dir.table("shell", shell_table(s_minus_one(best.best.config, spec, o.target.incident, o.evaluator.samples_per_branch)),
                  "analytic S-1 amplitude and density of the best configuration");
    } catch (const NumericalError&) {
        const EnergyShell shell = energy_shell(spec, dispersion(spec, o.target.incident), o.evaluator.samples_per_branch);
        io::CsvTable t{{"kx", "ky", "grad_norm", "dl", "density_shape"}, {}};
        for (const auto& s : shell.samples) {
            t.rows.push_back({s.k.x, s.k.y, s.grad_norm, s.dl, std::norm(coupling_factor(best.best.config, s.k)) / (s.grad_norm * s.grad_norm)});
        }
        dir.table("shell", t, "|G|^2 / |grad omega|^2 of the best configuration (self-energy unavailable)");
        shell_note = "shape";
    }

    std::vector<double> per_restart;
    for (const auto& run : summary.runs) per_restart.push_back(run.best.q);
    json report = {{"best", to_json(best.best)},
                   {"best_restart", best.restart},
                   {"best_seed", best.seed},
                   {"seed", restarts.seed},
                   {"parameters", best.parameters},
                   {"restart_q", per_restart},
                   {"shell_export", shell_note}};
    if (o.kind == ParametrizationKind::Line) report["normalized_ratios"] = normalized_ratios(best.parameters);
    if (o.reference) {
        const ObjectiveReport ref = q_value(*o.reference, spec, o.target, o.evaluator);
        report["reference"] = to_json(ref);
        report["beats_reference"] = best.best.q >= ref.q;
    }
    return report;
}

json emit_workflow(const ExperimentConfig& config, RunDirectory& dir)
{
    const auto& spec = config.lattice;
    const auto& coupling = *config.coupling;
    const auto& run = *config.run;
    const EvolutionRun r = emission_run(spec, coupling, run.t, run.snapshots);
    const auto pop = atom_population(r);
    dir.table("population", series({"t", "population"}, {r.times, pop}), "excited-state population of the atom");
    dir.position_grid("final", r.snapshots.back().photon, "emitted photon amplitude at the final time");
    dir.momentum_grid("final_momentum", to_momentum(r.snapshots.back().photon), "emitted photon in momentum space");

    json report = {{"initial_population", pop.front()}, {"final_population", pop.back()}, {"oscillation", has_revival(pop)}};
    try {
        const DecayFit fit = fit_exponential(r.times, pop);
        report["fit"] = {{"rate", fit.rate},
                         {"amplitude", fit.amplitude},
                         {"max_relative_residual", fit.max_relative_residual},
                         {"samples", fit.samples}};
    } catch (const InvalidInput& e) {
        report["fit"] = {{"error", e.what()}};
    }
    try {
        const SelfEnergy sigma = self_energy(coupling, spec, coupling.omega_a);
        report["sigma"] = to_json(sigma.value);
        report["golden_rule_rate"] = 2.0 * sigma.decay();
    } catch (const std::exception& e) {
        report["sigma"] = nullptr;
        report["sigma_error"] = e.what();
    }
    return report;
}

std::string timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
    return os.str();
}

fs::path fresh_directory(Subcommand command, const ExperimentConfig& config, const RunOptions& options)
{
    fs::path dir = !options.output.empty() ? fs::path(options.output)
                 : !config.output.empty()  ? fs::path(config.output)
                                           : fs::path("runs") / (to_string(command) + "-" + timestamp() + "-"
                                                                 + std::to_string(::getpid()));
    if (fs::exists(dir) && !(fs::is_directory(dir) && fs::is_empty(dir))) {
        throw InvalidInput("output directory '" + dir.string() + "' already exists and is not empty");
    }
    return dir;
}

void write_json(const fs::path& path, const json& value)
{
    std::ofstream os(path);
    if (!os) throw InvalidInput("cannot write '" + path.string() + "'");
    os << value.dump(2) << '\n';
}

} // namespace

json run_experiment(Subcommand command, const ExperimentConfig& config, const RunOptions& options)
{
    require_sections(config, command);
    const fs::path root = fresh_directory(command, config, options);
    fs::create_directories(root);
    RunDirectory dir(root, options.format);

    const auto started = std::chrono::steady_clock::now();
    json report;
    switch (command) {
    case Subcommand::Dispersion: report = dispersion_workflow(config, dir); break;
    case Subcommand::Prepare: report = prepare_workflow(config, dir); break;
    case Subcommand::Scatter: report = scatter_workflow(config, dir); break;
    case Subcommand::Smatrix: report = smatrix_workflow(config, dir); break;
    case Subcommand::Optimize: report = optimize_workflow(config, options, dir); break;
    case Subcommand::Emit: report = emit_workflow(config, dir); break;
    }
    report["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    json effective = config.source;
    if (command == Subcommand::Optimize && options.seed) effective["optimize"]["seed"] = *options.seed;
    const json manifest = {{"tool", "giantatom"},
                           {"version", options.version},
                           {"subcommand", to_string(command)},
                           {"created", timestamp()},
                           {"format", options.format == GridFormat::Binary ? "bin" : "csv"},
                           {"config", effective},
                           {"tolerances",
                            {{"chebyshev", 1e-15},
                             {"norm_drift_per_snapshot", 1e-8},
                             {"edge_threshold", EdgeMonitor::kThreshold},
                             {"edge_band", EdgeMonitor::kBand},
                             {"resolvent_quadrature", 1e-12},
                             {"denominator_floor", kDenominatorFloor}}}};
    write_json(root / "report.json", report);
    write_json(root / "manifest.json", manifest);
    json index = dir.index();
    index.push_back({{"file", "report.json"}, {"description", "summary values of the run"}});
    index.push_back({{"file", "manifest.json"}, {"description", "inputs, tolerances and version needed to rerun"}});
    write_json(root / "index.json", index);
    report["directory"] = root.string();
    return report;
}

} // namespace giantatom
