// coupling.hpp: Atom-lattice coupling configurations and the momentum-space coupling factor

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "giantatom/grid.hpp"
#include "giantatom/lattice.hpp"

namespace giantatom {

struct CouplingPoint {
    int n{0};
    int m{0};
    cplx weight{1.0, 0.0};
};

struct CouplingConfig {
    double omega_a{0.0};
    double g{1.0};
    std::vector<CouplingPoint> points;

    // Sum of |weight| over all points.
    double weight_norm() const;
    // Throws DegenerateCoupling when the weights vanish, InvalidInput on duplicates or empty list.
    void validate() const;
    // Additionally checks every point lies inside the lattice.
    void validate(const LatticeSpec& spec) const;
};

// Real weights on the y axis, stored as a ratio list whose first entry is the doubled
// center weight: points (0,0) carries ratios[0], (0,+-j) carries ratios[j].
struct SymmetricLineConfig {
    double omega_a{0.0};
    double g{1.0};
    std::vector<double> ratios;

    int half_count() const noexcept { return static_cast<int>(ratios.size()) - 1; }
};

CouplingConfig expand(const SymmetricLineConfig& line);

// Single site at the origin with unit weight.
CouplingConfig small_atom(double g, double omega_a = 0.0);

// rows[r][c] is the weight at (n, m) = (c - cols/2, r - rows/2); both counts must be odd.
CouplingConfig grid_config(const std::vector<std::vector<cplx>>& rows, double g, double omega_a = 0.0);

// (g / sum|w|) * sum_p w_p exp(i (k_x n_p + k_y m_p)).
cplx coupling_factor(const CouplingConfig& config, Vec2 k);

// Reference coupling designs, with ratios in their original convention.
namespace presets {
std::vector<double> single_window_ratios();   // one target window at k_y = pi/2
std::vector<double> two_window_ratios();      // windows at pi/28 and pi/2
std::vector<double> four_window_ratios();     // windows at pi/7, 3pi/7, 5pi/7, 27pi/28
std::vector<std::vector<cplx>> asymmetric_grid(); // 5x5 complex table, rows by m
} // namespace presets

// Plain-text table: one point per line "n m re im"; '#' starts a comment.
void write_coupling_table(std::ostream& os, const CouplingConfig& config);
std::vector<CouplingPoint> read_coupling_table(std::istream& is);
void save_coupling_table(const std::string& path, const CouplingConfig& config);
std::vector<CouplingPoint> load_coupling_table(const std::string& path);

} // namespace giantatom
