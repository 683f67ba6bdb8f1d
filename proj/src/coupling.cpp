// coupling.cpp: Coupling configurations, factor G(k) and table I/O

#include "giantatom/coupling.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

namespace giantatom {

double CouplingConfig::weight_norm() const
{
    double sum = 0.0;
    for (const auto& p : points) sum += std::abs(p.weight);
    return sum;
}

void CouplingConfig::validate() const
{
    if (points.empty()) throw InvalidInput("coupling.points must not be empty");
    if (!std::isfinite(g)) throw InvalidInput("coupling.g must be finite");
    if (!std::isfinite(omega_a)) throw InvalidInput("coupling.omega_a must be finite");
    std::set<std::pair<int, int>> seen;
    for (const auto& p : points) {
        if (!std::isfinite(p.weight.real()) || !std::isfinite(p.weight.imag())) {
            throw InvalidInput("coupling weight at (" + std::to_string(p.n) + ", " + std::to_string(p.m)
                               + ") is not finite");
        }
        if (!seen.emplace(p.n, p.m).second) {
            throw InvalidInput("duplicate coupling point (" + std::to_string(p.n) + ", " + std::to_string(p.m) + ")");
        }
    }
    if (!(weight_norm() > 0.0)) throw DegenerateCoupling("coupling weights sum to zero modulus");
}

void CouplingConfig::validate(const LatticeSpec& spec) const
{
    validate();
    for (const auto& p : points) {
        if (std::abs(p.n) > spec.half_x || std::abs(p.m) > spec.half_y) {
            throw InvalidInput("coupling point (" + std::to_string(p.n) + ", " + std::to_string(p.m)
                               + ") lies outside the lattice");
        }
    }
}

CouplingConfig expand(const SymmetricLineConfig& line)
{
    if (line.ratios.empty()) throw InvalidInput("line coupling needs at least the center ratio");
    CouplingConfig out;
    out.omega_a = line.omega_a;
    out.g = line.g;
    out.points.push_back({0, 0, line.ratios[0]});
    for (int j = 1; j <= line.half_count(); ++j) {
        const double w = line.ratios[static_cast<std::size_t>(j)];
        out.points.push_back({0, j, w});
        out.points.push_back({0, -j, w});
    }
    return out;
}

CouplingConfig small_atom(double g, double omega_a)
{
    return CouplingConfig{omega_a, g, {{0, 0, 1.0}}};
}

CouplingConfig grid_config(const std::vector<std::vector<cplx>>& rows, double g, double omega_a)
{
    if (rows.empty() || rows.size() % 2 == 0) throw InvalidInput("coupling grid needs an odd number of rows");
    const std::size_t cols = rows.front().size();
    if (cols == 0 || cols % 2 == 0) throw InvalidInput("coupling grid needs an odd number of columns");
    const int half_rows = static_cast<int>(rows.size() / 2);
    const int half_cols = static_cast<int>(cols / 2);
    CouplingConfig out;
    out.omega_a = omega_a;
    out.g = g;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw InvalidInput("coupling grid rows differ in length");
        for (std::size_t c = 0; c < cols; ++c) {
            out.points.push_back({static_cast<int>(c) - half_cols, static_cast<int>(r) - half_rows, rows[r][c]});
        }
    }
    return out;
}

cplx coupling_factor(const CouplingConfig& config, Vec2 k)
{
    const double norm = config.weight_norm();
    if (!(norm > 0.0)) throw DegenerateCoupling("coupling weights sum to zero modulus");
    cplx sum{0.0, 0.0};
    for (const auto& p : config.points) {
        sum += p.weight * std::polar(1.0, k.x * p.n + k.y * p.m);
    }
    return sum * (config.g / norm);
}

namespace presets {

std::vector<double> single_window_ratios()
{
    return {1.0, -0.00088, -2.0547, -0.0476, 2.1248, 0.0026, -2.6811, -0.2156};
}

std::vector<double> two_window_ratios()
{
    return {1.0, -1.4332, -3.2858, -1.3093, 1.1984, -1.3141, -3.2387, -0.9584};
}

std::vector<double> four_window_ratios()
{
    return {1.0, 0.3509, 0.2903, -0.0347, 0.00684, 0.1582, -0.1743, -0.9628};
}

std::vector<std::vector<cplx>> asymmetric_grid()
{
    auto e = [](double r, double phase) { return std::polar(1.0, phase) * r; };
    return {
        {1.0, e(-7.3486, 3.6150), e(1.862, 0.3726), e(-5.6226, 6.4033), e(-2.0644, 8.2818)},
        {e(8.8558, -1.7604), e(-0.6985, 0.8562), e(-4.237, 7.1122), e(1.3402, -2.7336), e(-7.4992, 10.518)},
        {e(14.8622, 9.9101), e(-1.8706, -7.5751), e(1.0688, 4.2449), e(5.8708, 0.6388), e(-0.1683, 8.8095)},
        {e(8.0156, 7.4858), e(-5.6802, 4.7246), e(8.2794, 10.1560), e(0.1046, 4.9715), e(-2.9367, 15.0590)},
        {e(-0.9356, 0.6925), e(4.2987, -2.0054), e(2.7451, 11.0834), e(-0.6985, 1.0629), e(-0.20242, 10.7395)},
    };
}

} // namespace presets

void write_coupling_table(std::ostream& os, const CouplingConfig& config)
{
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf << "# omega_a " << std::setprecision(17) << config.omega_a << "\n";
    buf << "# g " << config.g << "\n";
    buf << "# n m re im\n";
    for (const auto& p : config.points) {
        buf << p.n << ' ' << p.m << ' ' << p.weight.real() << ' ' << p.weight.imag() << '\n';
    }
    os << buf.str();
}

std::vector<CouplingPoint> read_coupling_table(std::istream& is)
{
    std::vector<CouplingPoint> points;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        row.imbue(std::locale::classic());
        CouplingPoint p;
        double re = 0.0;
        double im = 0.0;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!(row >> p.n >> p.m >> re >> im)) {
            throw InvalidInput("coupling table line " + std::to_string(line_no) + ": expected 'n m re im'");
        }
        std::string extra;
        if (row >> extra) {
            throw InvalidInput("coupling table line " + std::to_string(line_no) + ": trailing field '" + extra + "'");
        }
        p.weight = {re, im};
        points.push_back(p);
    }
    if (points.empty()) throw InvalidInput("coupling table has no points");
    return points;
}

void save_coupling_table(const std::string& path, const CouplingConfig& config)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_coupling_table(os, config);
}

std::vector<CouplingPoint> load_coupling_table(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open coupling table " + path);
    return read_coupling_table(is);
}

} // namespace giantatom
