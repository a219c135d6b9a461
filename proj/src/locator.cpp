#include "miscible/locator.hpp"

#include <algorithm>
#include <cmath>

namespace miscible {

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh)
{
    Vec2 lo = mesh.vertex(0);
    Vec2 hi = lo;
    for (const Vec2& p : mesh.vertices()) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const int target = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.n_triangles()))));
    cell_ = std::max(hi.x - lo.x, hi.y - lo.y) / target * (1.0 + 1e-9);
    if (!(cell_ > 0.0)) {
        cell_ = 1.0;
    }
    origin_ = lo;
    nx_ = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / cell_)));

    auto bucket_range = [&](int t) {
        const auto c = mesh.corners(t);
        const double x0 = std::min({c[0].x, c[1].x, c[2].x});
        const double x1 = std::max({c[0].x, c[1].x, c[2].x});
        const double y0 = std::min({c[0].y, c[1].y, c[2].y});
        const double y1 = std::max({c[0].y, c[1].y, c[2].y});
        auto clampx = [&](double v) { return std::clamp(static_cast<int>(std::floor((v - origin_.x) / cell_)), 0, nx_ - 1); };
        auto clampy = [&](double v) { return std::clamp(static_cast<int>(std::floor((v - origin_.y) / cell_)), 0, ny_ - 1); };
        return std::array<int, 4>{clampx(x0), clampx(x1), clampy(y0), clampy(y1)};
    };

    std::vector<int> counts(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto r = bucket_range(t);
        for (int j = r[2]; j <= r[3]; ++j) {
            for (int i = r[0]; i <= r[1]; ++i) {
                ++counts[j * nx_ + i + 1];
            }
        }
    }
    for (std::size_t k = 1; k < counts.size(); ++k) {
        counts[k] += counts[k - 1];
    }
    offsets_ = counts;
    items_.resize(offsets_.back());
    std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto r = bucket_range(t);
        for (int j = r[2]; j <= r[3]; ++j) {
            for (int i = r[0]; i <= r[1]; ++i) {
                items_[fill[j * nx_ + i]++] = t;
            }
        }
    }
}

int PointLocator::locate(Vec2 x) const
{
    const int i = static_cast<int>(std::floor((x.x - origin_.x) / cell_));
    const int j = static_cast<int>(std::floor((x.y - origin_.y) / cell_));
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) {
        return -1;
    }
    const int bucket = j * nx_ + i;
    int best = -1;
    double best_score = -1e-10;
    for (int k = offsets_[bucket]; k < offsets_[bucket + 1]; ++k) {
        const int t = items_[k];
        const auto c = mesh_->corners(t);
        const double two_area = 2.0 * mesh_->area(t);
        const double l0 = orient(x, c[1], c[2]) / two_area;
        const double l1 = orient(c[0], x, c[2]) / two_area;
        const double l2 = 1.0 - l0 - l1;
        const double score = std::min({l0, l1, l2});
        if (score > best_score) {
            best_score = score;
            best = t;
        }
    }
    return best;
}

}  // namespace miscible
