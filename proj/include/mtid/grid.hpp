#ifndef MTID_GRID_HPP
#define MTID_GRID_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace mtid {

/// Tensor-product grid: strictly increasing knots per dimension.
/// Flat storage is row-major with dimension 0 varying slowest.
struct Grid {
    std::vector<std::vector<double>> knots;

    Grid() = default;
    explicit Grid(std::vector<std::vector<double>> k);

    static Grid uniform(const std::vector<double>& lo, const std::vector<double>& hi,
                        const std::vector<int>& points);

    int dim() const { return static_cast<int>(knots.size()); }
    std::vector<std::size_t> shape() const;
    std::size_t size() const;

    std::size_t flatten(const std::vector<int>& mi) const;
    void unflatten(std::size_t idx, std::vector<int>& mi) const;
    std::vector<double> node(std::size_t idx) const;

    /// Checks the unit-cube contract used for heterogeneity grids:
    /// interior knots and at least 4 per dimension.
    void require_unit_interior(int min_points = 4) const;
};

/// Composite trapezoid weights for one knot sequence. With extend01 the two
/// end panels are widened to cover [0, k0] and [k_last, 1] by constant
/// extrapolation of the edge values.
std::vector<double> trapezoid_weights(const std::vector<double>& knots, bool extend01 = false);

/// Tensor trapezoid integral of a value tensor over the grid region
/// (optionally extended to the full unit cube).
double trapezoid_integral(const Grid& grid, const std::vector<double>& values,
                          bool extend01 = false);

/// Integrate out the trailing dimensions beyond `keep`, returning a tensor
/// over the leading `keep` dims.
std::vector<double> trapezoid_marginalize(const Grid& grid, const std::vector<double>& values,
                                          int keep, bool extend01 = false);

} // namespace mtid

#endif
