#include "giantatom/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <locale>
#include <sstream>

#include "giantatom/error.hpp"

namespace giantatom::io {
namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& text, std::size_t line)
{
    std::istringstream ss(text);
    ss.imbue(std::locale::classic());
    double v = 0.0;
    ss >> v;
    if (ss.fail() || !(ss >> std::ws).eof()) {
        throw InvalidInput("csv line " + std::to_string(line) + ": cannot parse '" + text + "'");
    }
    return v;
}

template <typename U>
void put_le(std::ostream& os, U value)
{
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    unsigned char bytes[sizeof(U)];
    std::memcpy(bytes, &value, sizeof(U));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U get_le(std::istream& is)
{
    unsigned char bytes[sizeof(U)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U))) throw InvalidInput("binary grid is truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    U value;
    std::memcpy(&value, bytes, sizeof(U));
    return value;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream os(path, mode);
    if (!os) throw InvalidInput("cannot open '" + path + "' for writing");
    return os;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in)
{
    std::ifstream is(path, mode);
    if (!is) throw InvalidInput("cannot open '" + path + "'");
    return is;
}

} // namespace

void CsvTable::add_row(std::vector<double> row)
{
    if (row.size() != header.size()) throw InvalidInput("csv row width differs from header");
    rows.push_back(std::move(row));
}

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw InvalidInput("csv has no column '" + name + "'");
}

void write_csv(std::ostream& os, const CsvTable& table)
{
    std::ostringstream ss;
    ss.imbue(std::locale::classic());
    ss.precision(17);
    for (std::size_t i = 0; i < table.header.size(); ++i) ss << (i ? "," : "") << table.header[i];
    ss << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) ss << (i ? "," : "") << row[i];
        ss << '\n';
    }
    os << ss.str();
}

CsvTable read_csv(std::istream& is)
{
    CsvTable table;
    std::string line;
    if (!std::getline(is, line)) throw InvalidInput("csv is empty");
    table.header = split(line);
    std::size_t number = 1;
    while (std::getline(is, line)) {
        ++number;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != table.header.size()) {
            throw InvalidInput("csv line " + std::to_string(number) + " has " + std::to_string(fields.size())
                               + " fields, expected " + std::to_string(table.header.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_double(f, number));
        table.rows.push_back(std::move(row));
    }
    return table;
}

void save_csv(const std::string& path, const CsvTable& table)
{
    auto os = open_out(path);
    write_csv(os, table);
    if (!os) throw NumericalError("failed writing '" + path + "'");
}

CsvTable load_csv(const std::string& path)
{
    auto is = open_in(path);
    return read_csv(is);
}

CsvTable position_table(const ComplexGrid& grid)
{
    CsvTable t{{"n", "m", "re", "im", "probability"}, {}};
    t.rows.reserve(grid.size());
    for (int n = -grid.half_x(); n <= grid.half_x(); ++n) {
        for (int m = -grid.half_y(); m <= grid.half_y(); ++m) {
            const cplx v = grid.at(n, m);
            t.rows.push_back({double(n), double(m), v.real(), v.imag(), std::norm(v)});
        }
    }
    return t;
}

ComplexGrid grid_from_position_table(const CsvTable& table)
{
    const auto cn = table.column("n");
    const auto cm = table.column("m");
    const auto cre = table.column("re");
    const auto cim = table.column("im");
    int hx = 0;
    int hy = 0;
    for (const auto& r : table.rows) {
        hx = std::max(hx, static_cast<int>(std::abs(r[cn])));
        hy = std::max(hy, static_cast<int>(std::abs(r[cm])));
    }
    ComplexGrid grid(hx, hy);
    if (table.rows.size() != grid.size()) throw InvalidInput("position table does not cover a full grid");
    for (const auto& r : table.rows) {
        const int n = static_cast<int>(r[cn]);
        const int m = static_cast<int>(r[cm]);
        if (n != r[cn] || m != r[cm]) throw InvalidInput("position table has non-integer coordinates");
        grid.at(n, m) = {r[cre], r[cim]};
    }
    return grid;
}

CsvTable momentum_table(const RealGrid& momentum, const std::string& value_name)
{
    const MomentumGrid k(LatticeSpec{momentum.half_x(), momentum.half_y()});
    CsvTable t{{"kx", "ky", value_name}, {}};
    t.rows.reserve(momentum.size());
    for (int i = 0; i < momentum.nx(); ++i) {
        for (int j = 0; j < momentum.ny(); ++j) {
            const Vec2 q = k.at(i, j);
            t.rows.push_back({q.x, q.y, momentum(i, j)});
        }
    }
    return t;
}

CsvTable momentum_table(const ComplexGrid& momentum)
{
    const MomentumGrid k(LatticeSpec{momentum.half_x(), momentum.half_y()});
    CsvTable t{{"kx", "ky", "re", "im", "probability"}, {}};
    t.rows.reserve(momentum.size());
    for (int i = 0; i < momentum.nx(); ++i) {
        for (int j = 0; j < momentum.ny(); ++j) {
            const Vec2 q = k.at(i, j);
            const cplx v = momentum(i, j);
            t.rows.push_back({q.x, q.y, v.real(), v.imag(), std::norm(v)});
        }
    }
    return t;
}

void write_grid_binary(std::ostream& os, const ComplexGrid& grid)
{
    os.write(kGridMagic.data(), kGridMagic.size());
    put_le(os, static_cast<std::uint32_t>(grid.nx()));
    put_le(os, static_cast<std::uint32_t>(grid.ny()));
    for (const auto& v : grid.values()) {
        put_le(os, static_cast<float>(v.real()));
        put_le(os, static_cast<float>(v.imag()));
    }
}

ComplexGrid read_grid_binary(std::istream& is)
{
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kGridMagic) throw InvalidInput("not a binary grid file");
    const auto nx = get_le<std::uint32_t>(is);
    const auto ny = get_le<std::uint32_t>(is);
    if (nx % 2 == 0 || ny % 2 == 0) throw InvalidInput("binary grid dimensions must be odd");
    ComplexGrid grid(static_cast<int>(nx / 2), static_cast<int>(ny / 2));
    for (auto& v : grid.values()) {
        const float re = get_le<float>(is);
        const float im = get_le<float>(is);
        v = {re, im};
    }
    return grid;
}

void save_grid_binary(const std::string& path, const ComplexGrid& grid)
{
    auto os = open_out(path, std::ios::out | std::ios::binary);
    write_grid_binary(os, grid);
    if (!os) throw NumericalError("failed writing '" + path + "'");
}

ComplexGrid load_grid_binary(const std::string& path)
{
    auto is = open_in(path, std::ios::in | std::ios::binary);
    return read_grid_binary(is);
}

} // namespace giantatom::io
