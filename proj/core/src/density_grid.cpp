#include "renewal/density_grid.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace renewal {

DensityGrid::DensityGrid(Rect bounds, std::size_t nx, std::size_t ny, std::vector<double> rates,
                         std::vector<std::int64_t> counts)
    : bounds_(bounds), nx_(nx), ny_(ny), rates_(std::move(rates)), counts_(std::move(counts)) {
    if (nx_ == 0 || ny_ == 0) throw std::invalid_argument("grid needs at least one box per axis");
    if (!bounds_.valid()) throw std::invalid_argument("grid bounds are degenerate");
    if (rates_.size() != nx_ * ny_) throw std::invalid_argument("rate table size mismatch");
    if (!counts_.empty() && counts_.size() != nx_ * ny_)
        throw std::invalid_argument("count table size mismatch");
    box_w_ = bounds_.width() / static_cast<double>(nx_);
    box_h_ = bounds_.height() / static_cast<double>(ny_);
}

std::size_t DensityGrid::index_x(double x) const {
    auto ix = static_cast<std::int64_t>(std::floor((x - bounds_.x_min) / box_w_));
    // The right plate edge closes the last column.
    if (ix >= static_cast<std::int64_t>(nx_)) ix = static_cast<std::int64_t>(nx_) - 1;
    if (ix < 0) ix = 0;
    return static_cast<std::size_t>(ix);
}

std::size_t DensityGrid::index_y(double y) const {
    auto iy = static_cast<std::int64_t>(std::floor((y - bounds_.y_min) / box_h_));
    if (iy >= static_cast<std::int64_t>(ny_)) iy = static_cast<std::int64_t>(ny_) - 1;
    if (iy < 0) iy = 0;
    return static_cast<std::size_t>(iy);
}

double DensityGrid::lookup(double x, double y) const {
    if (!bounds_.contains(x, y))
        throw std::out_of_range("density lookup outside the plate bounds");
    return rates_[index_y(y) * nx_ + index_x(x)];
}

void DensityGrid::dump_csv(std::ostream& out) const {
    out << "ix,iy,count,rate\n";
    for (std::size_t iy = 0; iy < ny_; ++iy)
        for (std::size_t ix = 0; ix < nx_; ++ix)
            out << ix << ',' << iy << ',' << count_at(ix, iy) << ',' << rate_at(ix, iy) << '\n';
}

DensityGrid estimate_grid(const Catalog& catalog, std::size_t nx, std::size_t ny) {
    if (nx == 0 || ny == 0) throw std::invalid_argument("estimate_grid: nx, ny must be >= 1");
    if (!catalog.bounds.valid())
        throw std::invalid_argument("estimate_grid: catalog bounds have zero area");

    const Rect& b = catalog.bounds;
    const double box_w = b.width() / static_cast<double>(nx);
    const double box_h = b.height() / static_cast<double>(ny);
    std::vector<std::int64_t> counts(nx * ny, 0);
    for (const ObjectRecord& r : catalog.records) {
        auto ix = static_cast<std::int64_t>(std::floor((r.x - b.x_min) / box_w));
        auto iy = static_cast<std::int64_t>(std::floor((r.y - b.y_min) / box_h));
        if (ix >= static_cast<std::int64_t>(nx)) ix = static_cast<std::int64_t>(nx) - 1;
        if (iy >= static_cast<std::int64_t>(ny)) iy = static_cast<std::int64_t>(ny) - 1;
        if (ix < 0 || iy < 0)
            throw std::out_of_range("record outside catalog bounds during grid estimation");
        ++counts[static_cast<std::size_t>(iy) * nx + static_cast<std::size_t>(ix)];
    }
    const double area = box_w * box_h;
    std::vector<double> rates(nx * ny);
    for (std::size_t i = 0; i < rates.size(); ++i)
        rates[i] = static_cast<double>(std::max<std::int64_t>(counts[i], 1)) / area;
    return DensityGrid(b, nx, ny, std::move(rates), std::move(counts));
}

}  // namespace renewal
