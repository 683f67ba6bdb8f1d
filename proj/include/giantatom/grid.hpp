// grid.hpp: Row-major value grid addressed by centered lattice coordinates

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "giantatom/error.hpp"

namespace giantatom {

using cplx = std::complex<double>;

// Sites run n in [-half_x, half_x] (rows) and m in [-half_y, half_y] (columns).
// Storage is row-major, so row i = n + half_x holds ny contiguous values.
template <typename T>
class LatticeGrid {
public:
    LatticeGrid() = default;
    LatticeGrid(int half_x, int half_y, T fill = T{})
        : half_x_(half_x), half_y_(half_y),
          data_(static_cast<std::size_t>(2 * half_x + 1) * static_cast<std::size_t>(2 * half_y + 1), fill)
    {
        if (half_x < 0 || half_y < 0) {
            throw InvalidInput("grid half extents must be non-negative");
        }
    }

    int half_x() const noexcept { return half_x_; }
    int half_y() const noexcept { return half_y_; }
    int nx() const noexcept { return 2 * half_x_ + 1; }
    int ny() const noexcept { return 2 * half_y_ + 1; }
    std::size_t size() const noexcept { return data_.size(); }

    bool contains(int n, int m) const noexcept
    {
        return n >= -half_x_ && n <= half_x_ && m >= -half_y_ && m <= half_y_;
    }

    std::size_t index(int n, int m) const noexcept
    {
        return static_cast<std::size_t>(n + half_x_) * static_cast<std::size_t>(ny())
             + static_cast<std::size_t>(m + half_y_);
    }

    T& at(int n, int m) { return data_[index(n, m)]; }
    const T& at(int n, int m) const { return data_[index(n, m)]; }

    // Raw array indices, 0 <= i < nx, 0 <= j < ny.
    T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * ny() + j]; }
    const T& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * ny() + j]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }

    bool same_shape(const LatticeGrid& other) const noexcept
    {
        return half_x_ == other.half_x_ && half_y_ == other.half_y_;
    }

private:
    int half_x_{0};
    int half_y_{0};
    std::vector<T> data_;
};

using ComplexGrid = LatticeGrid<cplx>;
using RealGrid = LatticeGrid<double>;

inline double squared_norm(const ComplexGrid& grid)
{
    double sum = 0.0;
    for (const auto& v : grid.values()) sum += std::norm(v);
    return sum;
}

inline RealGrid probability(const ComplexGrid& grid)
{
    RealGrid out(grid.half_x(), grid.half_y());
    auto src = grid.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::norm(src[i]);
    return out;
}

// <a|b> with the conjugate on the left argument.
inline cplx inner(const ComplexGrid& a, const ComplexGrid& b)
{
    if (!a.same_shape(b)) throw InvalidInput("inner product of grids with different shapes");
    cplx sum{0.0, 0.0};
    auto av = a.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) sum += std::conj(av[i]) * bv[i];
    return sum;
}

} // namespace giantatom
