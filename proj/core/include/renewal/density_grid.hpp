#ifndef RENEWAL_DENSITY_GRID_HPP
#define RENEWAL_DENSITY_GRID_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "renewal/catalog.hpp"

namespace renewal {

/// Piecewise-constant estimate of the 2-D background rate, points per square
/// micron, on an nx-by-ny tiling of the plate bounds. Boxes are half-open
/// except that the top/right plate edges close the last row/column.
/// Immutable after construction; concurrent lookups are safe.
class DensityGrid {
public:
    DensityGrid(Rect bounds, std::size_t nx, std::size_t ny,
                std::vector<double> rates, std::vector<std::int64_t> counts = {});

    const Rect& bounds() const { return bounds_; }
    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double box_area() const { return box_w_ * box_h_; }

    /// Box column/row of a point inside bounds.
    std::size_t index_x(double x) const;
    std::size_t index_y(double y) const;

    /// 2-D rate of the box containing (x, y). Throws std::out_of_range for
    /// points outside bounds.
    double lookup(double x, double y) const;

    /// 1-D rate (points per micron) along a strip of width w through (x, y).
    double linear_rate(double x, double y, double w) const {
        return lookup(x, y) * w;
    }

    double rate_at(std::size_t ix, std::size_t iy) const { return rates_[iy * nx_ + ix]; }
    std::int64_t count_at(std::size_t ix, std::size_t iy) const {
        return counts_.empty() ? -1 : counts_[iy * nx_ + ix];
    }

    /// Debug dump, one row per box: ix,iy,count,rate.
    void dump_csv(std::ostream& out) const;

private:
    Rect bounds_;
    std::size_t nx_;
    std::size_t ny_;
    double box_w_;
    double box_h_;
    std::vector<double> rates_;
    std::vector<std::int64_t> counts_;
};

/// Counts records per box and converts to rates with the empty-box floor
/// rate = max(count, 1) / box_area, which keeps every rate positive so the
/// background exponential emission stays proper. Throws on degenerate bounds.
DensityGrid estimate_grid(const Catalog& catalog, std::size_t nx, std::size_t ny);

}  // namespace renewal

#endif
