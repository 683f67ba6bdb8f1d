// io.hpp: Locale-independent CSV tables and the compact binary grid format

#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "giantatom/grid.hpp"
#include "giantatom/lattice.hpp"

namespace giantatom::io {

// Numeric table with named columns. Values are written with 17 significant digits, so a
// write/read cycle reproduces every double exactly.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    std::size_t column(const std::string& name) const; // throws InvalidInput if absent
};

void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);
void save_csv(const std::string& path, const CsvTable& table);
CsvTable load_csv(const std::string& path);

// Position-space grid as rows "n,m,re,im,probability".
CsvTable position_table(const ComplexGrid& grid);
ComplexGrid grid_from_position_table(const CsvTable& table);

// Momentum-space grid (array index i holds k_x index i - N) as rows "kx,ky,value".
CsvTable momentum_table(const RealGrid& momentum, const std::string& value_name);
CsvTable momentum_table(const ComplexGrid& momentum); // kx,ky,re,im,probability

// Binary grid: 8 magic bytes "GATMGRID", uint32 nx, uint32 ny (both odd), then nx*ny
// (float32 re, float32 im) pairs, row-major with rows along x. All little-endian.
inline constexpr std::array<char, 8> kGridMagic{'G', 'A', 'T', 'M', 'G', 'R', 'I', 'D'};

void write_grid_binary(std::ostream& os, const ComplexGrid& grid);
ComplexGrid read_grid_binary(std::istream& is);
void save_grid_binary(const std::string& path, const ComplexGrid& grid);
ComplexGrid load_grid_binary(const std::string& path);

} // namespace giantatom::io
