#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "brane/error.hpp"

namespace brane {

/// Finite-difference stencil order.
enum class StencilOrder { second = 2, fourth = 4 };

/// Periodic rectangular lattice in one or two spatial dimensions.
///
/// Points sit at x_i = origin + i*dx along each axis and index n wraps to 0.
/// The default origin is the cell-centred -(n-1)/2 * dx = -L/2 + dx/2, which
/// makes the point set symmetric about 0. Storage is row-major: axis 0 is the slowest index.
class Grid {
public:
    /// Throws ConfigError unless m is 1 or 2, each n is even and >= 8 and
    /// each length is finite and positive.
    static Grid make(std::span<const std::size_t> n, std::span<const double> length);
    static Grid make(std::span<const std::size_t> n, std::span<const double> length,
                     std::span<const double> origin);
    /// Rebuilds a grid from a stored spacing, choosing the length so that
    /// length/n reproduces dx bit-exactly.
    static Grid from_spacing(std::span<const std::size_t> n, std::span<const double> dx,
                             std::span<const double> origin);

    /// Convenience constructors for the common cases.
    static Grid line(std::size_t n, double length);
    static Grid square(std::size_t n, double length);

    int m() const noexcept { return m_; }
    std::size_t n(int axis) const { return n_[axis]; }
    double length(int axis) const { return length_[axis]; }
    double dx(int axis) const { return dx_[axis]; }
    double origin(int axis) const { return origin_[axis]; }
    double min_dx() const;
    double cell_volume() const;
    std::size_t size() const noexcept;

    /// Midpoint of the lattice points along `axis`, origin + (n-1)/2 * dx.
    double centre(int axis) const { return origin_[axis] + half_span(axis) * dx_[axis]; }
    /// origin + i*dx, evaluated about the centre so that a grid centred on
    /// zero has exactly antisymmetric coordinates.
    double coordinate(int axis, std::size_t i) const {
        return centre(axis) + (static_cast<double>(i) - half_span(axis)) * dx_[axis];
    }

    /// Distance in the flat array between neighbours along `axis`.
    std::size_t stride(int axis) const noexcept { return (m_ == 2 && axis == 0) ? n_[1] : 1; }
    /// Lattice multi-index of a flat index.
    std::vector<std::size_t> unflatten(std::size_t flat) const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Grid() = default;
    double half_span(int axis) const { return 0.5 * static_cast<double>(n_[axis] - 1); }

    int m_ = 1;
    std::array<std::size_t, 2> n_{};
    std::array<double, 2> length_{};
    std::array<double, 2> dx_{};
    std::array<double, 2> origin_{};
};

/// A real value at every lattice point. All values are finite; construction
/// throws NonFiniteError otherwise.
class ScalarLattice {
public:
    ScalarLattice(const Grid& grid, std::vector<double> values);
    /// Constant lattice.
    ScalarLattice(const Grid& grid, double value);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    double max_abs() const noexcept;
    double min() const noexcept;
    double max() const noexcept;

    /// Builds a lattice by evaluating fn(flat_index) at every point.
    template <class Fn>
    static ScalarLattice generate(const Grid& grid, Fn&& fn) {
        std::vector<double> out(grid.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(i);
        return ScalarLattice(grid, std::move(out));
    }

    /// Samples fn(x0) (m=1) or fn(x0, x1) (m=2) at the lattice points.
    template <class Fn>
    static ScalarLattice sample(const Grid& grid, Fn&& fn);

private:
    Grid grid_;
    std::vector<double> values_;
};

template <class Fn>
ScalarLattice ScalarLattice::sample(const Grid& grid, Fn&& fn) {
    std::vector<double> out(grid.size());
    if constexpr (std::is_invocable_v<Fn&, double>) {
        if (grid.m() != 1) throw GridMismatch("sample: one-argument profile on a 2-d grid");
        for (std::size_t i = 0; i < grid.n(0); ++i) out[i] = fn(grid.coordinate(0, i));
    } else {
        if (grid.m() != 2) throw GridMismatch("sample: two-argument profile on a 1-d grid");
        for (std::size_t i = 0; i < grid.n(0); ++i)
            for (std::size_t j = 0; j < grid.n(1); ++j)
                out[i * grid.n(1) + j] = fn(grid.coordinate(0, i), grid.coordinate(1, j));
    }
    return ScalarLattice(grid, std::move(out));
}

/// Centred periodic first derivative along `axis`.
ScalarLattice deriv1(const ScalarLattice& f, int axis, StencilOrder order);

/// Second derivative: the compact centred stencil when axis1 == axis2,
/// otherwise the composition of two first derivatives.
ScalarLattice deriv2(const ScalarLattice& f, int axis1, int axis2, StencilOrder order);

/// Undivided periodic fourth difference f[i+2] - 4f[i+1] + 6f[i] - 4f[i-1] + f[i-2].
ScalarLattice fourth_difference(const ScalarLattice& f, int axis);

/// Riemann sum of f times the cell volume. The sum is exactly rounded, so
/// the result does not depend on the order of the values.
double integrate(const ScalarLattice& f);

/// Exactly rounded sum of a sequence of doubles.
double exact_sum(std::span<const double> values);

/// Same extents, doubled resolution on every axis.
Grid refine(const Grid& g);

/// Observed order log2(coarse/fine) for a refinement ratio of 2.
/// Throws NonPositiveError if either error is not strictly positive.
double convergence_order(double coarse_err, double fine_err);

}  // namespace brane
