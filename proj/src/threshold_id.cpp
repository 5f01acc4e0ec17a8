#include "mtid/threshold_id.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mtid/io.hpp"

namespace mtid {

namespace {

void require_2d(const Surface& s, const char* who) {
    if (s.grid.dim() != 2)
        throw std::invalid_argument(std::string(who) + ": expected a 2-d surface");
}

int find_knot(const std::vector<double>& knots, double value, const char* who) {
    for (std::size_t i = 0; i < knots.size(); ++i)
        if (std::fabs(knots[i] - value) < 1e-9) return static_cast<int>(i);
    throw std::invalid_argument(std::string(who) + ": anchor is not a grid knot");
}

double interp_monotone(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = it - xs.begin();
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

double inverse_monotone(const std::vector<double>& xs, const std::vector<double>& ys, double y) {
    if (y <= ys.front()) return xs.front();
    if (y >= ys.back()) return xs.back();
    const auto it = std::upper_bound(ys.begin(), ys.end(), y);
    const std::size_t i = it - ys.begin();
    const double denom = ys[i] - ys[i - 1];
    const double t = denom > 0.0 ? (y - ys[i - 1]) / denom : 0.5;
    return xs[i - 1] + t * (xs[i] - xs[i - 1]);
}

struct MixedDerivs {
    std::vector<std::size_t> flat;
    std::vector<double> h, h1, h2, h12;
};

// H, H1, H2, H12 at interior nodes: stored derivative tensors when present,
// value-based central differences otherwise.
MixedDerivs surface_mixed(const Surface& s) {
    require_2d(s, "surface_mixed");
    const auto& k0 = s.grid.knots[0];
    const auto& k1 = s.grid.knots[1];
    const int n0 = static_cast<int>(k0.size());
    const int n1 = static_cast<int>(k1.size());
    const bool stored = s.derivatives.count({1, 0}) && s.derivatives.count({0, 1}) &&
                        s.derivatives.count({1, 1});

    MixedDerivs md;
    auto at = [&](int a, int b) { return static_cast<std::size_t>(a) * n1 + b; };
    for (int a = 1; a + 1 < n0; ++a) {
        for (int b = 1; b + 1 < n1; ++b) {
            const std::size_t idx = at(a, b);
            if (!s.node_reliable(idx)) continue;
            double d1, d2, d12;
            if (stored) {
                d1 = s.deriv({1, 0})[idx];
                d2 = s.deriv({0, 1})[idx];
                d12 = s.deriv({1, 1})[idx];
            } else {
                const double dz0 = k0[a + 1] - k0[a - 1];
                const double dz1 = k1[b + 1] - k1[b - 1];
                d1 = (s.values[at(a + 1, b)] - s.values[at(a - 1, b)]) / dz0;
                d2 = (s.values[at(a, b + 1)] - s.values[at(a, b - 1)]) / dz1;
                d12 = (s.values[at(a + 1, b + 1)] - s.values[at(a + 1, b - 1)] -
                       s.values[at(a - 1, b + 1)] + s.values[at(a - 1, b - 1)]) /
                      (dz0 * dz1);
            }
            md.flat.push_back(idx);
            md.h.push_back(s.values[idx]);
            md.h1.push_back(d1);
            md.h2.push_back(d2);
            md.h12.push_back(d12);
        }
    }
    if (md.flat.empty()) throw std::invalid_argument("surface has no usable interior nodes");
    return md;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    double hi = v[m];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + m - 1, v.end());
    return 0.5 * (hi + v[m - 1]);
}

double quantile_of(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * (v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    const double t = pos - i;
    return v[i] * (1.0 - t) + v[i + 1] * t;
}

} // namespace

// --- two-way flows: threshold recovery ---------------------------------------

RecoveredThresholds identify_two_way(const Surface& p0, const Surface& p2,
                                     const TwoWayOptions& opt) {
    require_2d(p0, "identify_two_way");
    require_2d(p2, "identify_two_way");
    if (p0.grid.knots != p2.grid.knots)
        throw std::invalid_argument("identify_two_way: surfaces must share a grid");
    if (opt.anchor.size() != 2)
        throw std::invalid_argument("identify_two_way: anchor must have two coordinates");

    const auto& k0 = p0.grid.knots[0];
    const auto& k1 = p0.grid.knots[1];
    const int a0 = find_knot(k0, opt.anchor[0], "identify_two_way");
    const int a1 = find_knot(k1, opt.anchor[1], "identify_two_way");
    const int n0 = static_cast<int>(k0.size());
    const int n1 = static_cast<int>(k1.size());
    auto at = [&](int a, int b) { return static_cast<std::size_t>(a) * n1 + b; };

    // the separable combination: 2 P0 + P2 = Q1 + Q2 under the model algebra
    std::vector<double> p(p0.values.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = 2.0 * p0.values[i] + p2.values[i];

    const double p_anchor = p[at(a0, a1)];

    // admissible constants keep every treatment's probability positive on the grid
    double row_min = 1e300, col_min = 1e300, col_max = -1e300;
    for (int a = 0; a < n0; ++a) row_min = std::min(row_min, p[at(a, a1)]);
    for (int b = 0; b < n1; ++b) {
        col_min = std::min(col_min, p[at(a0, b)]);
        col_max = std::max(col_max, p[at(a0, b)]);
    }
    const double lo = std::max(p_anchor - row_min, col_min - 1.0);
    const double hi = std::min(col_max, 1.0 + p_anchor - row_min);
    if (!(lo < hi))
        throw std::runtime_error(
            "identify_two_way: empty admissible constant interval (model misspecified?)");

    const double c10 = opt.c10 ? *opt.c10 : 0.5 * (lo + hi);
    if (!(c10 > lo && c10 < hi))
        throw std::invalid_argument("identify_two_way: c10 outside the admissible interval");

    RecoveredThresholds out;
    out.anchor = opt.anchor;
    out.c10 = c10;
    out.c10_lo = lo;
    out.c10_hi = hi;
    out.z_knots = {k0, k1};
    out.q_values.resize(2);
    out.q_values[0].resize(n0);
    out.q_values[1].resize(n1);
    for (int a = 0; a < n0; ++a) out.q_values[0][a] = p[at(a, a1)] - p_anchor + c10;
    for (int b = 0; b < n1; ++b) out.q_values[1][b] = p[at(a0, b)] - c10;
    return out;
}

double RecoveredThresholds::eval(int j, double zj) const {
    return interp_monotone(z_knots.at(j), q_values.at(j), zj);
}

void RecoveredThresholds::save(const std::string& path) const {
    ColumnarFile f;
    f.meta["thresholds"] = std::to_string(z_knots.size());
    std::string anc;
    for (double a : anchor) anc += (anc.empty() ? "" : " ") + format_g17(a);
    f.meta["anchor"] = anc;
    f.meta["c10"] = format_g17(c10);
    f.meta["c10_lo"] = format_g17(c10_lo);
    f.meta["c10_hi"] = format_g17(c10_hi);
    f.columns = {"j", "z", "q"};
    for (std::size_t j = 0; j < z_knots.size(); ++j)
        for (std::size_t i = 0; i < z_knots[j].size(); ++i)
            f.rows.push_back(
                {std::to_string(j), format_g17(z_knots[j][i]), format_g17(q_values[j][i])});
    write_file(path, f.serialize("mtid-thresholds v1"));
}

RecoveredThresholds RecoveredThresholds::load(const std::string& path) {
    const auto f = ColumnarFile::parse(read_file(path), "mtid-thresholds v1");
    RecoveredThresholds t;
    const std::size_t nj = std::stoul(f.meta.at("thresholds"));
    t.z_knots.resize(nj);
    t.q_values.resize(nj);
    std::istringstream as(f.meta.at("anchor"));
    double av;
    while (as >> av) t.anchor.push_back(av);
    t.c10 = parse_double(f.meta.at("c10"));
    t.c10_lo = parse_double(f.meta.at("c10_lo"));
    t.c10_hi = parse_double(f.meta.at("c10_hi"));
    for (const auto& row : f.rows) {
        const std::size_t j = std::stoul(row.at(0));
        t.z_knots.at(j).push_back(parse_double(row.at(1)));
        t.q_values.at(j).push_back(parse_double(row.at(2)));
    }
    return t;
}

SeparabilityResult separability_test(const Surface& p, std::optional<double> tolerance) {
    const auto md = surface_mixed(p);
    SeparabilityResult r;
    for (double v : md.h12) r.statistic = std::max(r.statistic, std::fabs(v));
    r.tolerance = tolerance ? *tolerance : std::max(10.0 * p.noise_floor, 1e-8);
    r.pass = r.statistic <= r.tolerance;
    return r;
}

// --- double hurdle, global route ----------------------------------------------

namespace {

// d(values)/dz along `axis` at a fixed index of the other axis.
std::vector<double> edge_slope(const Surface& s, int axis, int other_index) {
    const auto& ka = s.grid.knots[axis];
    const int na = static_cast<int>(ka.size());
    const int nb = static_cast<int>(s.grid.knots[1 - axis].size());
    auto value = [&](int ia, int ib) {
        const std::size_t idx = axis == 0 ? static_cast<std::size_t>(ia) * nb + ib
                                          : static_cast<std::size_t>(ib) * na + ia;
        return s.values[idx];
    };
    std::vector<double> out(na);
    for (int i = 0; i < na; ++i) {
        const int il = std::max(0, i - 1);
        const int ir = std::min(na - 1, i + 1);
        out[i] = (value(ir, other_index) - value(il, other_index)) / (ka[ir] - ka[il]);
    }
    return out;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& xs,
                                         const std::vector<double>& ys) {
    std::vector<double> out(xs.size(), 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    return out;
}

} // namespace

HurdleGlobalResult identify_double_hurdle_global(const Surface& h, const HurdleGlobalOptions& opt) {
    require_2d(h, "identify_double_hurdle_global");
    const auto& k0 = h.grid.knots[0];
    const auto& k1 = h.grid.knots[1];
    const int n0 = static_cast<int>(k0.size());
    const int n1 = static_cast<int>(k1.size());
    auto at = [&](int a, int b) { return static_cast<std::size_t>(a) * n1 + b; };

    for (int a = 0; a + 1 < n0; ++a)
        for (int b = 0; b < n1; ++b)
            if (h.values[at(a + 1, b)] < h.values[at(a, b)] - 1e-9)
                throw std::runtime_error("hurdle surface is not increasing in z1");
    for (int a = 0; a < n0; ++a)
        for (int b = 0; b + 1 < n1; ++b)
            if (h.values[at(a, b + 1)] < h.values[at(a, b)] - 1e-9)
                throw std::runtime_error("hurdle surface is not increasing in z2");

    double top_sup = 0.0;
    for (int a = 0; a < n0; ++a) top_sup = std::max(top_sup, h.values[at(a, n1 - 1)]);
    for (int b = 0; b < n1; ++b) top_sup = std::max(top_sup, h.values[at(n0 - 1, b)]);
    if (top_sup < opt.min_top_coverage)
        throw std::runtime_error("hurdle surface: top-edge coverage insufficient (sup H = " +
                                 format_g17(top_sup) + ")");

    // boundary-limit slopes: last grid line plus linear edge extrapolation
    const double w = opt.edge_extrapolation_steps;
    auto extrapolate = [w](const std::vector<double>& last, const std::vector<double>& prev) {
        std::vector<double> out(last.size());
        for (std::size_t i = 0; i < last.size(); ++i) out[i] = last[i] + w * (last[i] - prev[i]);
        return out;
    };
    const auto slope1 = extrapolate(edge_slope(h, 0, n1 - 1), edge_slope(h, 0, n1 - 2));
    const auto slope2 = extrapolate(edge_slope(h, 1, n0 - 1), edge_slope(h, 1, n0 - 2));

    HurdleGlobalResult res;
    res.z1_knots = k0;
    res.z2_knots = k1;
    res.g1 = cumulative_trapezoid(k0, slope1);
    res.g2 = cumulative_trapezoid(k1, slope2);
    res.g1_top = res.g1.back();
    res.g2_top = res.g2.back();
    res.h = h;

    for (std::size_t i = 1; i < res.g1.size(); ++i)
        if (res.g1[i] < res.g1[i - 1] - 1e-9)
            throw std::runtime_error("recovered G1 is not monotone (misspecification signal)");
    for (std::size_t i = 1; i < res.g2.size(); ++i)
        if (res.g2[i] < res.g2[i - 1] - 1e-9)
            throw std::runtime_error("recovered G2 is not monotone (misspecification signal)");
    return res;
}

double HurdleGlobalResult::g_eval(int which, double z) const {
    return which == 0 ? interp_monotone(z1_knots, g1, z) : interp_monotone(z2_knots, g2, z);
}

double HurdleGlobalResult::g_inverse(int which, double v) const {
    return which == 0 ? inverse_monotone(z1_knots, g1, v) : inverse_monotone(z2_knots, g2, v);
}

double HurdleGlobalResult::f_v(double v1, double v2) const {
    const double z1 = g_inverse(0, v1);
    const double z2 = g_inverse(1, v2);
    const auto& k0 = h.grid.knots[0];
    const auto& k1 = h.grid.knots[1];
    const int nc = static_cast<int>(k1.size());
    auto cell = [](const std::vector<double>& ks, double x) {
        const int n = static_cast<int>(ks.size());
        if (x <= ks.front()) return std::pair<int, double>{0, 0.0};
        if (x >= ks.back()) return std::pair<int, double>{n - 2, 1.0};
        const auto it = std::upper_bound(ks.begin(), ks.end(), x);
        const int i = static_cast<int>(it - ks.begin()) - 1;
        return std::pair<int, double>{i, (x - ks[i]) / (ks[i + 1] - ks[i])};
    };
    const auto [i, t] = cell(k0, z1);
    const auto [j, u] = cell(k1, z2);
    auto at = [&](int a, int b) { return static_cast<std::size_t>(a) * nc + b; };
    return (1 - t) * (1 - u) * h.values[at(i, j)] + t * (1 - u) * h.values[at(i + 1, j)] +
           (1 - t) * u * h.values[at(i, j + 1)] + t * u * h.values[at(i + 1, j + 1)];
}

// --- Archimedean route ---------------------------------------------------------

ArchimedeanResult identify_archimedean(const Surface& h, const ArchimedeanOptions& opt) {
    const auto md = surface_mixed(h);
    const std::size_t n = md.h.size();

    double min_abs_slope = 1e300;
    for (std::size_t i = 0; i < n; ++i)
        min_abs_slope = std::min({min_abs_slope, std::fabs(md.h1[i]), std::fabs(md.h2[i])});
    if (min_abs_slope < 1e-12)
        throw std::runtime_error("identify_archimedean: surface slopes not bounded away from zero");

    std::vector<double> level(md.h), ratio(n);
    double min_r = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
        ratio[i] = md.h12[i] / (md.h1[i] * md.h2[i]);
        min_r = std::min(min_r, ratio[i]);
    }
    if (opt.enforce_diagnostics && min_r < -opt.negative_r_tolerance)
        throw std::runtime_error(
            "identify_archimedean: negative H12/(H1 H2) violates generator convexity");

    std::vector<std::size_t> ord(n);
    for (std::size_t i = 0; i < n; ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(),
              [&](std::size_t a, std::size_t b) { return level[a] < level[b]; });

    // quantile bins in the level; R may only depend on h, so within-bin
    // dispersion (after removing the small within-bin level trend) is the
    // level-dependence diagnostic
    const int bins = std::max(4, opt.bins);
    std::vector<double> bin_h, bin_r, bin_disp;
    for (int b = 0; b < bins; ++b) {
        const std::size_t i0 = b * n / bins;
        const std::size_t i1 = (b + 1) * n / bins;
        if (i1 <= i0) continue;
        std::vector<double> hs, rs;
        for (std::size_t i = i0; i < i1; ++i) {
            hs.push_back(level[ord[i]]);
            rs.push_back(ratio[ord[i]]);
        }
        const double hm = median_of(hs);
        const double rm = median_of(rs);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < hs.size(); ++i) {
            sxx += (hs[i] - hm) * (hs[i] - hm);
            sxy += (hs[i] - hm) * (rs[i] - rm);
        }
        const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
        std::vector<double> resid(hs.size());
        for (std::size_t i = 0; i < hs.size(); ++i)
            resid[i] = rs[i] - (rm + slope * (hs[i] - hm));
        bin_h.push_back(hm);
        bin_r.push_back(rm);
        bin_disp.push_back((quantile_of(resid, 0.75) - quantile_of(resid, 0.25)) /
                           std::max(std::fabs(rm), 1e-12));
    }

    ArchimedeanResult res;
    res.gen.h_lo = level[ord.front()];
    // the attained maximum includes the grid edges (values need no derivatives)
    res.gen.h_bar = level[ord.back()];
    for (double v : h.values) res.gen.h_bar = std::max(res.gen.h_bar, v);
    res.gen.min_r = min_r;
    res.gen.constancy = median_of(bin_disp);
    res.constancy_pass = res.gen.constancy <= opt.constancy_threshold;
    if (opt.enforce_diagnostics && !res.constancy_pass)
        throw std::runtime_error(
            "identify_archimedean: R is not constant on level sets "
            "(copula is not Archimedean); diagnostic = " +
            format_g17(res.gen.constancy));

    std::vector<double> hk(bin_h), rk(bin_r);
    if (hk.back() < res.gen.h_bar) {
        hk.push_back(res.gen.h_bar);
        rk.push_back(bin_r.back());
    }
    const std::size_t m = hk.size();

    // inner integral I(t) = int_t^hbar R; T(h) = int_h^hbar exp(I(k)) dk.
    // phi(h) = phi(hbar) - phi'(hbar) T(h) with the scale pinned at
    // phi'(hbar) = -1.
    std::vector<double> inner(m, 0.0), tfun(m, 0.0);
    for (std::size_t i = m - 1; i-- > 0;)
        inner[i] = inner[i + 1] + 0.5 * (rk[i] + rk[i + 1]) * (hk[i + 1] - hk[i]);
    for (std::size_t i = m - 1; i-- > 0;)
        tfun[i] = tfun[i + 1] +
                  0.5 * (std::exp(inner[i]) + std::exp(inner[i + 1])) * (hk[i + 1] - hk[i]);

    res.gen.point_identified = res.gen.h_bar >= 1.0 - opt.eps_top;
    res.gen.location_lo = 0.0;
    res.gen.location_hi = std::max(0.0, 1.0 - res.gen.h_bar);
    if (res.gen.point_identified)
        res.gen.location = 0.0;
    else
        res.gen.location =
            opt.location ? *opt.location : 0.5 * (res.gen.location_lo + res.gen.location_hi);
    if (res.gen.location < res.gen.location_lo - 1e-12 ||
        res.gen.location > res.gen.location_hi + 1e-12)
        throw std::invalid_argument("identify_archimedean: location outside [0, 1-h_bar]");

    res.gen.h = hk;
    res.gen.r = rk;
    res.gen.phi.resize(m);
    for (std::size_t i = 0; i < m; ++i) res.gen.phi[i] = res.gen.location + tfun[i];

    // G1, G2 up to the common-constant ambiguity. At the attained corner,
    // phi(G1(top)) + phi(G2(top)) = phi(h_bar); split it evenly (both terms
    // vanish in the point-identified case) and anchor each threshold on the
    // middle row/column of the other instrument.
    const auto& k0 = h.grid.knots[0];
    const auto& k1 = h.grid.knots[1];
    const int n0 = static_cast<int>(k0.size());
    const int n1 = static_cast<int>(k1.size());
    auto at = [&](int a, int b) { return static_cast<std::size_t>(a) * n1 + b; };
    const int top0 = n0 - 2, top1 = n1 - 2;
    const int mid0 = n0 / 2, mid1 = n1 / 2;

    const double corner = res.gen.phi_at(h.values[at(top0, top1)]);
    const double phi_g1_top = 0.5 * corner;
    const double phi_g2_top = 0.5 * corner;
    const double phi_g2_mid = res.gen.phi_at(h.values[at(top0, mid1)]) - phi_g1_top;
    const double phi_g1_mid = res.gen.phi_at(h.values[at(mid0, top1)]) - phi_g2_top;

    res.z1_knots.assign(k0.begin() + 1, k0.end() - 1);
    res.z2_knots.assign(k1.begin() + 1, k1.end() - 1);
    for (int a = 1; a + 1 < n0; ++a) {
        const double val = res.gen.phi_at(h.values[at(a, mid1)]) - phi_g2_mid;
        res.g1.push_back(res.gen.phi_inv(std::max(0.0, val)));
    }
    for (int b = 1; b + 1 < n1; ++b) {
        const double val = res.gen.phi_at(h.values[at(mid0, b)]) - phi_g1_mid;
        res.g2.push_back(res.gen.phi_inv(std::max(0.0, val)));
    }

    double inf_phi_g1 = 1e300, inf_phi_g2 = 1e300;
    for (double g : res.g1) inf_phi_g1 = std::min(inf_phi_g1, res.gen.phi_at(g));
    for (double g : res.g2) inf_phi_g2 = std::min(inf_phi_g2, res.gen.phi_at(g));
    res.k_lo = -inf_phi_g2;
    res.k_hi = inf_phi_g1;
    return res;
}

// Outside the identified range (h_lo, h_bar) the generator is extended:
// above h_bar linearly with the normalized slope phi'(h_bar) = -1 (the
// location bound 0 <= phi(h_bar) <= 1 - h_bar makes this hit zero inside
// (h_bar, 1]), below h_lo with the slope of the first table segment.

double RecoveredGenerator::phi_at(double level) const {
    if (level >= h.back()) return std::max(0.0, phi.back() - (level - h.back()));
    if (level <= h.front()) {
        const double slope = (phi[1] - phi[0]) / (h[1] - h[0]);
        return phi.front() + slope * (level - h.front());
    }
    const auto it = std::upper_bound(h.begin(), h.end(), level);
    const std::size_t i = it - h.begin();
    const double t = (level - h[i - 1]) / (h[i] - h[i - 1]);
    return phi[i - 1] + t * (phi[i] - phi[i - 1]);
}

double RecoveredGenerator::phi_inv(double value) const {
    if (value >= phi.front()) {
        const double slope = (phi[1] - phi[0]) / (h[1] - h[0]);
        return h.front() + (value - phi.front()) / slope;
    }
    if (value <= phi.back()) return h.back() + (phi.back() - value);
    for (std::size_t i = 1; i < phi.size(); ++i) {
        if (value <= phi[i - 1] && value >= phi[i]) {
            const double denom = phi[i - 1] - phi[i];
            const double t = denom > 0.0 ? (phi[i - 1] - value) / denom : 0.5;
            return h[i - 1] + t * (h[i] - h[i - 1]);
        }
    }
    return h.back();
}

double ArchimedeanResult::reconstruct(double z1, double z2) const {
    const double g1v = interp_monotone(z1_knots, g1, z1);
    const double g2v = interp_monotone(z2_knots, g2, z2);
    return gen.phi_inv(gen.phi_at(g1v) + gen.phi_at(g2v));
}

ClaytonThetaResult identify_clayton_theta(const Surface& h) {
    const auto md = surface_mixed(h);
    ClaytonThetaResult res;
    res.theta_nodes.resize(md.h.size());
    for (std::size_t i = 0; i < md.h.size(); ++i)
        res.theta_nodes[i] = md.h[i] * md.h12[i] / (md.h1[i] * md.h2[i]) - 1.0;
    res.pooled_median = median_of(res.theta_nodes);
    res.dispersion = quantile_of(res.theta_nodes, 0.75) - quantile_of(res.theta_nodes, 0.25);
    return res;
}

} // namespace mtid
