#include "mtid/grid.hpp"

#include <stdexcept>

namespace mtid {

Grid::Grid(std::vector<std::vector<double>> k) : knots(std::move(k)) {
    for (const auto& kd : knots) {
        if (kd.empty()) throw std::invalid_argument("Grid: empty dimension");
        for (std::size_t i = 1; i < kd.size(); ++i)
            if (!(kd[i] > kd[i - 1]))
                throw std::invalid_argument("Grid: knots must be strictly increasing");
    }
}

Grid Grid::uniform(const std::vector<double>& lo, const std::vector<double>& hi,
                   const std::vector<int>& points) {
    if (lo.size() != hi.size() || lo.size() != points.size())
        throw std::invalid_argument("Grid::uniform: size mismatch");
    std::vector<std::vector<double>> k(lo.size());
    for (std::size_t d = 0; d < lo.size(); ++d) {
        if (points[d] < 2) throw std::invalid_argument("Grid::uniform: need >= 2 points");
        if (!(hi[d] > lo[d])) throw std::invalid_argument("Grid::uniform: hi must exceed lo");
        k[d].resize(points[d]);
        for (int i = 0; i < points[d]; ++i)
            k[d][i] = lo[d] + (hi[d] - lo[d]) * i / (points[d] - 1);
    }
    return Grid(std::move(k));
}

std::vector<std::size_t> Grid::shape() const {
    std::vector<std::size_t> s(knots.size());
    for (std::size_t d = 0; d < knots.size(); ++d) s[d] = knots[d].size();
    return s;
}

std::size_t Grid::size() const {
    std::size_t n = 1;
    for (const auto& kd : knots) n *= kd.size();
    return n;
}

std::size_t Grid::flatten(const std::vector<int>& mi) const {
    std::size_t idx = 0;
    for (std::size_t d = 0; d < knots.size(); ++d)
        idx = idx * knots[d].size() + static_cast<std::size_t>(mi[d]);
    return idx;
}

void Grid::unflatten(std::size_t idx, std::vector<int>& mi) const {
    mi.resize(knots.size());
    for (std::size_t d = knots.size(); d-- > 0;) {
        mi[d] = static_cast<int>(idx % knots[d].size());
        idx /= knots[d].size();
    }
}

std::vector<double> Grid::node(std::size_t idx) const {
    std::vector<int> mi;
    unflatten(idx, mi);
    std::vector<double> x(knots.size());
    for (std::size_t d = 0; d < knots.size(); ++d) x[d] = knots[d][mi[d]];
    return x;
}

void Grid::require_unit_interior(int min_points) const {
    for (const auto& kd : knots) {
        if (static_cast<int>(kd.size()) < min_points)
            throw std::invalid_argument("Grid: too few knots per dimension");
        if (!(kd.front() > 0.0 && kd.back() < 1.0))
            throw std::invalid_argument("Grid: knots must be interior to (0,1)");
    }
}

std::vector<double> trapezoid_weights(const std::vector<double>& knots, bool extend01) {
    const std::size_t m = knots.size();
    std::vector<double> w(m, 0.0);
    if (m == 1) {
        w[0] = extend01 ? 1.0 : 0.0;
        return w;
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double h = knots[i + 1] - knots[i];
        w[i] += h / 2.0;
        w[i + 1] += h / 2.0;
    }
    if (extend01) {
        w.front() += knots.front();
        w.back() += 1.0 - knots.back();
    }
    return w;
}

double trapezoid_integral(const Grid& grid, const std::vector<double>& values, bool extend01) {
    if (values.size() != grid.size())
        throw std::invalid_argument("trapezoid_integral: tensor does not conform to grid");
    std::vector<std::vector<double>> w(grid.dim());
    for (int d = 0; d < grid.dim(); ++d) w[d] = trapezoid_weights(grid.knots[d], extend01);
    double total = 0.0;
    std::vector<int> mi;
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        grid.unflatten(idx, mi);
        double ww = 1.0;
        for (int d = 0; d < grid.dim(); ++d) ww *= w[d][mi[d]];
        total += ww * values[idx];
    }
    return total;
}

std::vector<double> trapezoid_marginalize(const Grid& grid, const std::vector<double>& values,
                                          int keep, bool extend01) {
    if (values.size() != grid.size())
        throw std::invalid_argument("trapezoid_marginalize: tensor size mismatch");
    if (keep < 0 || keep > grid.dim())
        throw std::invalid_argument("trapezoid_marginalize: bad keep count");
    std::size_t head = 1, tail = 1;
    for (int d = 0; d < keep; ++d) head *= grid.knots[d].size();
    for (int d = keep; d < grid.dim(); ++d) tail *= grid.knots[d].size();

    std::vector<std::vector<double>> w(grid.dim() - keep);
    for (int d = keep; d < grid.dim(); ++d)
        w[d - keep] = trapezoid_weights(grid.knots[d], extend01);

    std::vector<double> out(head, 0.0);
    std::vector<int> mi(grid.dim() - keep);
    for (std::size_t t = 0; t < tail; ++t) {
        std::size_t rest = t;
        for (int d = grid.dim() - 1; d >= keep; --d) {
            mi[d - keep] = static_cast<int>(rest % grid.knots[d].size());
            rest /= grid.knots[d].size();
        }
        double ww = 1.0;
        for (std::size_t j = 0; j < mi.size(); ++j) ww *= w[j][mi[j]];
        for (std::size_t hIdx = 0; hIdx < head; ++hIdx)
            out[hIdx] += ww * values[hIdx * tail + t];
    }
    return out;
}

} // namespace mtid
