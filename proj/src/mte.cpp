#include "mtid/mte.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "mtid/bootstrap.hpp"
#include "mtid/parallel.hpp"
#include "mtid/special.hpp"

namespace mtid {

namespace {

std::vector<int> ones_index(int d) { return std::vector<int>(d, 1); }

long long require_nonzero_index(const DgpSpec& spec, int k) {
    if (k < 0 || k >= spec.model.treatments())
        throw std::invalid_argument("unknown treatment id");
    const auto id = index_and_degree(spec.model.rules[k]);
    if (id.index == 0)
        throw std::domain_error(
            "treatment " + std::to_string(k) +
            " has zero index; use the zero-index (leading-subset) estimator");
    return id.index;
}

// P_k(q) from the heterogeneity CDF and the rule coefficients.
double propensity_value(const DgpSpec& spec, int k, const std::vector<double>& q) {
    const auto& coeffs = spec.model.rules[k].coefficients();
    double total = 0.0;
    for (std::uint32_t m = 0; m < coeffs.size(); ++m)
        if (coeffs[m] != 0)
            total += static_cast<double>(coeffs[m]) * spec.heterogeneity.margin_cdf(m, q);
    return total;
}

// integral of gbar(v) f(v) over [0, hi], with a panel split per dimension to
// tame corner behavior of copula densities
double weighted_rect_integral(const JointHeterogeneity& het,
                              const std::function<double(const std::vector<double>&)>& gbar,
                              const std::vector<double>& hi, int nq) {
    const int d = het.dim();
    const auto& gl = gauss_legendre(std::max(4, nq / 2));
    const int g = static_cast<int>(gl.nodes.size());

    std::vector<std::array<double, 2>> splits(d);
    for (int c = 0; c < d; ++c) splits[c] = {hi[c] * 0.25, hi[c]};

    double total = 0.0;
    std::vector<double> v(d);
    for (std::uint32_t panel = 0; panel < (1u << d); ++panel) {
        std::vector<double> lo_p(d), hi_p(d);
        for (int c = 0; c < d; ++c) {
            const bool upper = panel & (1u << c);
            lo_p[c] = upper ? splits[c][0] : 0.0;
            hi_p[c] = upper ? splits[c][1] : splits[c][0];
        }
        std::vector<int> cursor(d, 0);
        for (;;) {
            double w = 1.0;
            for (int c = 0; c < d; ++c) {
                const double c1 = (hi_p[c] - lo_p[c]) / 2.0;
                const double c2 = (hi_p[c] + lo_p[c]) / 2.0;
                v[c] = c1 * gl.nodes[cursor[c]] + c2;
                w *= c1 * gl.weights[cursor[c]];
            }
            total += w * gbar(v) * het.density(v);
            int c = d - 1;
            while (c >= 0) {
                if (++cursor[c] < g) break;
                cursor[c] = 0;
                --c;
            }
            if (c < 0) break;
        }
    }
    return total;
}

// E[G(Y) D_k | Q = q]: inclusion-exclusion over rule subsets. The constant
// part of the conditional mean integrates exactly against the CDF; only the
// residual needs quadrature.
double outcome_numerator(const DgpSpec& spec, int k, const Transform& g,
                         const std::vector<double>& q, int quad_points) {
    const int d = spec.heterogeneity.dim();
    const auto& coeffs = spec.model.rules[k].coefficients();
    double total = 0.0;
    std::vector<double> hi(d), center(d);
    for (std::uint32_t m = 0; m < coeffs.size(); ++m) {
        if (coeffs[m] == 0) continue;
        for (int c = 0; c < d; ++c) {
            hi[c] = (m & (1u << c)) ? q[c] : 1.0;
            center[c] = hi[c] / 2.0;
        }
        const double cbar = true_counterfactual_mean(spec, k, center, g);
        const double mass = spec.heterogeneity.cdf(hi);
        auto resid = [&](const std::vector<double>& v) {
            return true_counterfactual_mean(spec, k, v, g) - cbar;
        };
        const double correction =
            weighted_rect_integral(spec.heterogeneity, resid, hi, quad_points);
        total += static_cast<double>(coeffs[m]) * (cbar * mass + correction);
    }
    return total;
}

struct EstimationPoints {
    std::vector<double> q;  // n x J
    std::size_t n = 0;
};

EstimationPoints record_q_points(const DgpSpec& spec, const SampleSet& data,
                                 const MteOptions& opt) {
    const int jd = spec.heterogeneity.dim();
    EstimationPoints pts;
    pts.n = data.size();
    pts.q.resize(pts.n * jd);
    std::vector<double> zi(data.z_dim);
    for (std::size_t i = 0; i < pts.n; ++i) {
        for (int c = 0; c < data.z_dim; ++c) zi[c] = data.z[i * data.z_dim + c];
        if (opt.recovered_q) {
            for (int j = 0; j < jd; ++j)
                pts.q[i * jd + j] =
                    opt.recovered_q->eval(j, zi[spec.thresholds.components[j].z_index]);
        } else {
            const auto qv = spec.thresholds.eval(zi);
            for (int j = 0; j < jd; ++j) pts.q[i * jd + j] = qv[j];
        }
    }
    return pts;
}

FitOptions make_fit_options(const EstimationPoints& pts, int jd, const MteOptions& opt,
                            const std::vector<std::vector<int>>& derivs) {
    FitOptions f;
    f.bandwidth = opt.bandwidth.empty()
                      ? bandwidth_rule(pts.q, jd, ones_index(jd), opt.poly_order)
                      : opt.bandwidth;
    f.poly_order = opt.poly_order;
    f.derivatives = derivs;
    f.min_ess = opt.min_ess;
    f.threads = opt.threads;
    return f;
}

Surface oracle_scaled_derivative(const std::function<double(const std::vector<double>&)>& fn,
                                 const Grid& grid, const std::vector<int>& alpha, double scale,
                                 const MteOptions& opt) {
    Surface out;
    out.grid = grid;
    out.values.assign(grid.size(), 0.0);
    out.noise_floor = 1e-9;
    FiniteDiffOptions fd;
    fd.step = opt.fd_step;
    fd.richardson = opt.richardson;
    parallel_chunks(grid.size(), opt.threads, [&](std::size_t a, std::size_t b) {
        for (std::size_t idx = a; idx < b; ++idx)
            out.values[idx] = scale * finite_diff(fn, grid.node(idx), alpha, fd);
    });
    return out;
}

} // namespace

Surface estimate_density(const DgpSpec& spec, const SampleSet* data, int k, const Grid& grid,
                         const MteOptions& opt) {
    spec.validate();
    const int jd = spec.heterogeneity.dim();
    if (grid.dim() != jd) throw std::invalid_argument("estimate_density: grid dimension mismatch");
    const long long index = require_nonzero_index(spec, k);

    if (opt.mode == Mode::Oracle) {
        auto pk = [&](const std::vector<double>& q) { return propensity_value(spec, k, q); };
        return oracle_scaled_derivative(pk, grid, ones_index(jd), 1.0 / index, opt);
    }

    if (!data) throw std::invalid_argument("estimation mode requires data");
    const auto pts = record_q_points(spec, *data, opt);
    std::vector<double> resp(pts.n);
    for (std::size_t i = 0; i < pts.n; ++i) resp[i] = data->d[i] == k ? 1.0 : 0.0;
    const auto fo = make_fit_options(pts, jd, opt, {ones_index(jd)});
    Surface fit = fit_local_poly(pts.q, resp, grid, fo);

    Surface out;
    out.grid = grid;
    out.values = fit.deriv(ones_index(jd));
    for (double& v : out.values) v /= static_cast<double>(index);
    out.ess = fit.ess;
    out.reliable = fit.reliable;
    out.bandwidth = fit.bandwidth;
    return out;
}

Surface estimate_counterfactual_mean(const DgpSpec& spec, const SampleSet* data, int k,
                                     const Transform& g, const Grid& grid,
                                     const MteOptions& opt) {
    spec.validate();
    const int jd = spec.heterogeneity.dim();
    require_nonzero_index(spec, k);
    const auto alpha = ones_index(jd);

    Surface num, den;
    if (opt.mode == Mode::Oracle) {
        auto bk = [&](const std::vector<double>& q) {
            return outcome_numerator(spec, k, g, q, opt.quad_points);
        };
        auto pk = [&](const std::vector<double>& q) { return propensity_value(spec, k, q); };
        num = oracle_scaled_derivative(bk, grid, alpha, 1.0, opt);
        den = oracle_scaled_derivative(pk, grid, alpha, 1.0, opt);
    } else {
        if (!data) throw std::invalid_argument("estimation mode requires data");
        const auto pts = record_q_points(spec, *data, opt);
        std::vector<double> rnum(pts.n), rden(pts.n);
        for (std::size_t i = 0; i < pts.n; ++i) {
            const double dk = data->d[i] == k ? 1.0 : 0.0;
            rden[i] = dk;
            rnum[i] = dk * g.apply(data->y[i]);
        }
        const auto fo = make_fit_options(pts, jd, opt, {alpha});
        std::vector<const std::vector<double>*> rs{&rnum, &rden};
        auto fits = fit_local_poly_multi(pts.q, rs, grid, fo);
        num = std::move(fits[0]);
        den = std::move(fits[1]);
        num.values = num.deriv(alpha);
        den.values = den.deriv(alpha);
    }

    Surface out;
    out.grid = grid;
    out.values.assign(grid.size(), 0.0);
    out.reliable.assign(grid.size(), 1);
    out.ess = den.ess;
    out.bandwidth = den.bandwidth;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double tn = num.values[i];
        const double td = den.values[i];
        const bool fit_ok = num.node_reliable(i) && den.node_reliable(i);
        if (!fit_ok || std::fabs(td) < opt.denominator_floor) {
            out.reliable[i] = 0;
            out.values[i] = 0.0;
        } else {
            out.values[i] = tn / td;
        }
    }
    return out;
}

Surface estimate_outcome_derivative(const DgpSpec& spec, const SampleSet* data, int k,
                                    const Transform& g, const Grid& grid,
                                    const MteOptions& opt) {
    spec.validate();
    const int jd = spec.heterogeneity.dim();
    const auto alpha = ones_index(jd);
    if (opt.mode == Mode::Oracle) {
        auto bk = [&](const std::vector<double>& q) {
            return outcome_numerator(spec, k, g, q, opt.quad_points);
        };
        return oracle_scaled_derivative(bk, grid, alpha, 1.0, opt);
    }
    if (!data) throw std::invalid_argument("estimation mode requires data");
    const auto pts = record_q_points(spec, *data, opt);
    std::vector<double> rnum(pts.n);
    for (std::size_t i = 0; i < pts.n; ++i)
        rnum[i] = data->d[i] == k ? g.apply(data->y[i]) : 0.0;
    const auto fo = make_fit_options(pts, jd, opt, {alpha});
    Surface fit = fit_local_poly(pts.q, rnum, grid, fo);
    Surface out;
    out.grid = grid;
    out.values = fit.deriv(alpha);
    out.ess = fit.ess;
    out.reliable = fit.reliable;
    out.bandwidth = fit.bandwidth;
    return out;
}

Surface estimate_mte(const DgpSpec& spec, const SampleSet* data, int k, int l,
                     const Transform& g, const Grid& grid, const MteOptions& opt) {
    require_nonzero_index(spec, k);
    require_nonzero_index(spec, l);
    Surface mk = estimate_counterfactual_mean(spec, data, k, g, grid, opt);
    Surface ml = estimate_counterfactual_mean(spec, data, l, g, grid, opt);
    Surface out = mk;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = mk.values[i] - ml.values[i];
        out.reliable[i] = mk.node_reliable(i) && ml.node_reliable(i) ? 1 : 0;
    }
    return out;
}

// --- zero-index route ---------------------------------------------------------

namespace {

std::vector<int> subset_dims(std::uint32_t subset, int jd) {
    std::vector<int> dims;
    for (int j = 0; j < jd; ++j)
        if (subset & (1u << j)) dims.push_back(j);
    return dims;
}

// full-dimension grid with singleton knots on the off-subset coordinates
Grid embed_grid(const Grid& subset_grid, std::uint32_t subset, int jd,
                const std::vector<double>& fixed_off) {
    std::vector<std::vector<double>> knots(jd);
    int si = 0, oi = 0;
    for (int j = 0; j < jd; ++j) {
        if (subset & (1u << j))
            knots[j] = subset_grid.knots.at(si++);
        else
            knots[j] = {fixed_off.at(oi++)};
    }
    return Grid(std::move(knots));
}

} // namespace

ZeroIndexEstimate estimate_zero_index(const DgpSpec& spec, const SampleSet* data, int k,
                                      std::uint32_t subset, const Grid& subset_grid,
                                      const std::vector<double>& fixed_off, const Transform& g,
                                      const MteOptions& opt) {
    spec.validate();
    const int jd = spec.heterogeneity.dim();
    const auto& rule = spec.model.rules.at(k);
    const auto leading = leading_subsets(rule);
    if (std::find(leading.begin(), leading.end(), subset) == leading.end())
        throw std::invalid_argument(
            "estimate_zero_index: subset is not a leading subset of the rule");
    const long long coeff = rule.coeff(subset);
    const auto dims = subset_dims(subset, jd);
    if (subset_grid.dim() != static_cast<int>(dims.size()))
        throw std::invalid_argument("estimate_zero_index: subset grid dimension mismatch");
    if (static_cast<int>(fixed_off.size()) != jd - static_cast<int>(dims.size()))
        throw std::invalid_argument("estimate_zero_index: wrong number of fixed coordinates");

    std::vector<int> alpha(jd, 0);
    for (int j : dims) alpha[j] = 1;
    const Grid full = embed_grid(subset_grid, subset, jd, fixed_off);

    Surface numf, denf;
    if (opt.mode == Mode::Oracle) {
        auto pk = [&](const std::vector<double>& q) { return propensity_value(spec, k, q); };
        auto bk = [&](const std::vector<double>& q) {
            return outcome_numerator(spec, k, g, q, opt.quad_points);
        };
        denf = oracle_scaled_derivative(pk, full, alpha, 1.0, opt);
        numf = oracle_scaled_derivative(bk, full, alpha, 1.0, opt);
    } else {
        if (!data) throw std::invalid_argument("estimation mode requires data");
        const auto pts = record_q_points(spec, *data, opt);
        std::vector<double> rnum(pts.n), rden(pts.n);
        for (std::size_t i = 0; i < pts.n; ++i) {
            const double dk = data->d[i] == k ? 1.0 : 0.0;
            rden[i] = dk;
            rnum[i] = dk * g.apply(data->y[i]);
        }
        const auto fo = make_fit_options(pts, jd, opt, {alpha});
        std::vector<const std::vector<double>*> rs{&rnum, &rden};
        auto fits = fit_local_poly_multi(pts.q, rs, full, fo);
        numf = std::move(fits[0]);
        denf = std::move(fits[1]);
        numf.values = numf.deriv(alpha);
        denf.values = denf.deriv(alpha);
    }

    ZeroIndexEstimate out;
    out.subset = subset;
    out.coeff = coeff;
    out.density.grid = subset_grid;
    out.mean.grid = subset_grid;
    const std::size_t n = subset_grid.size();
    out.density.values.assign(n, 0.0);
    out.density.reliable.assign(n, 1);
    out.mean.values.assign(n, 0.0);
    out.mean.reliable.assign(n, 1);
    // singleton off-dimensions collapse, so flat indices coincide
    for (std::size_t i = 0; i < n; ++i) {
        const double td = denf.values[i];
        const double tn = numf.values[i];
        const bool ok = denf.node_reliable(i) && numf.node_reliable(i);
        out.density.values[i] = td / static_cast<double>(coeff);
        out.density.reliable[i] = ok ? 1 : 0;
        if (!ok || std::fabs(td) < opt.denominator_floor) {
            out.mean.reliable[i] = 0;
        } else {
            out.mean.values[i] = tn / td;
        }
    }
    if (!denf.ess.empty()) {
        out.density.ess = denf.ess;
        out.mean.ess = denf.ess;
    }
    return out;
}

Surface estimate_mte_zero_index(const DgpSpec& spec, const SampleSet* data, int k, int l,
                                std::uint32_t subset, const Grid& subset_grid,
                                const std::vector<double>& fixed_off, const Transform& g,
                                const MteOptions& opt) {
    const auto lead_k = leading_subsets(spec.model.rules.at(k));
    const auto lead_l = leading_subsets(spec.model.rules.at(l));
    const bool in_k = std::find(lead_k.begin(), lead_k.end(), subset) != lead_k.end();
    const bool in_l = std::find(lead_l.begin(), lead_l.end(), subset) != lead_l.end();
    if (!in_k || !in_l)
        throw std::invalid_argument(
            "estimate_mte_zero_index: treatments condition on different heterogeneity "
            "subsets; refusing to mix estimands");
    auto ek = estimate_zero_index(spec, data, k, subset, subset_grid, fixed_off, g, opt);
    auto el = estimate_zero_index(spec, data, l, subset, subset_grid, fixed_off, g, opt);
    Surface out = ek.mean;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = ek.mean.values[i] - el.mean.values[i];
        out.reliable[i] = ek.mean.node_reliable(i) && el.mean.node_reliable(i) ? 1 : 0;
    }
    return out;
}

// --- specification test ---------------------------------------------------------

SpecificationTest specification_test(const DgpSpec& spec, const SampleSet* data, const Grid& grid,
                                     const MteOptions& opt) {
    spec.validate();
    const int jd = spec.heterogeneity.dim();
    const auto alpha = ones_index(jd);

    std::vector<int> ks;
    std::vector<long long> idxc;
    for (int k = 0; k < spec.model.treatments(); ++k) {
        const auto id = index_and_degree(spec.model.rules[k]);
        if (id.index != 0) {
            ks.push_back(k);
            idxc.push_back(id.index);
        }
    }
    if (ks.size() < 2)
        throw std::domain_error("specification test needs at least two nonzero-index treatments");

    SpecificationTest res;
    res.grid = grid;
    for (std::size_t a = 0; a < ks.size(); ++a)
        for (std::size_t b = a + 1; b < ks.size(); ++b) res.pairs.push_back({ks[a], ks[b]});

    const std::size_t nodes = grid.size();
    std::vector<std::vector<double>> dens(ks.size());

    if (opt.mode == Mode::Oracle) {
        for (std::size_t a = 0; a < ks.size(); ++a)
            dens[a] = estimate_density(spec, nullptr, ks[a], grid, opt).values;
        res.diffs.resize(res.pairs.size());
        std::size_t pi = 0;
        for (std::size_t a = 0; a < ks.size(); ++a) {
            for (std::size_t b = a + 1; b < ks.size(); ++b, ++pi) {
                res.diffs[pi].resize(nodes);
                for (std::size_t i = 0; i < nodes; ++i) {
                    const double d = dens[a][i] - dens[b][i];
                    res.diffs[pi][i] = d;
                    res.max_abs_diff = std::max(res.max_abs_diff, std::fabs(d));
                }
            }
        }
        res.pass = res.max_abs_diff <= opt.spec_test_abs_tol;
        return res;
    }

    if (!data) throw std::invalid_argument("estimation mode requires data");

    auto density_stack = [&](const SampleSet& s) {
        const auto pts = record_q_points(spec, s, opt);
        std::vector<std::vector<double>> resp(ks.size(), std::vector<double>(pts.n));
        std::vector<const std::vector<double>*> rs;
        for (std::size_t a = 0; a < ks.size(); ++a) {
            for (std::size_t i = 0; i < pts.n; ++i)
                resp[a][i] = s.d[i] == ks[a] ? 1.0 : 0.0;
            rs.push_back(&resp[a]);
        }
        MteOptions inner = opt;
        inner.threads = 1;
        const auto fo = make_fit_options(pts, jd, inner, {alpha});
        auto fits = fit_local_poly_multi(pts.q, rs, grid, fo);
        std::vector<std::vector<double>> out(ks.size());
        for (std::size_t a = 0; a < ks.size(); ++a) {
            out[a] = fits[a].deriv(alpha);
            for (double& v : out[a]) v /= static_cast<double>(idxc[a]);
        }
        return out;
    };

    dens = density_stack(*data);
    const auto reps =
        bootstrap_replicates(*data, opt.bootstrap_reps, opt.seed, opt.threads, density_stack);

    res.diffs.resize(res.pairs.size());
    res.ses.resize(res.pairs.size());
    std::size_t pi = 0;
    for (std::size_t a = 0; a < ks.size(); ++a) {
        for (std::size_t b = a + 1; b < ks.size(); ++b, ++pi) {
            res.diffs[pi].resize(nodes);
            res.ses[pi].resize(nodes);
            std::vector<double> repvals(reps.size());
            for (std::size_t i = 0; i < nodes; ++i) {
                for (std::size_t r = 0; r < reps.size(); ++r)
                    repvals[r] = reps[r][a][i] - reps[r][b][i];
                const double se = sample_sd(repvals);
                const double d = dens[a][i] - dens[b][i];
                res.diffs[pi][i] = d;
                res.ses[pi][i] = se;
                res.max_abs_diff = std::max(res.max_abs_diff, std::fabs(d));
                if (se > 0.0) res.max_t = std::max(res.max_t, std::fabs(d) / se);
            }
        }
    }
    res.pass = res.max_t <= opt.spec_test_t;
    return res;
}

// --- counterfactual quantiles ----------------------------------------------------

QuantileResult counterfactual_quantile(const DgpSpec& spec, const SampleSet* data, int k,
                                       const std::vector<double>& q_node, double u,
                                       const std::vector<double>& y_grid,
                                       const MteOptions& opt) {
    spec.validate();
    const int jd = spec.heterogeneity.dim();
    if (static_cast<int>(q_node.size()) != jd)
        throw std::invalid_argument("counterfactual_quantile: node dimension mismatch");
    if (y_grid.size() < 2) throw std::invalid_argument("counterfactual_quantile: need a y grid");
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile level must be in (0,1)");
    require_nonzero_index(spec, k);

    QuantileResult res;
    res.y_grid = y_grid;
    res.cdf.assign(y_grid.size(), 0.0);

    if (opt.mode == Mode::Oracle) {
        const auto alpha = ones_index(jd);
        FiniteDiffOptions fd;
        fd.step = opt.fd_step;
        fd.richardson = opt.richardson;
        auto pk = [&](const std::vector<double>& q) { return propensity_value(spec, k, q); };
        const double den = finite_diff(pk, q_node, alpha, fd);
        for (std::size_t yi = 0; yi < y_grid.size(); ++yi) {
            Transform g{Transform::IndicatorLeq, y_grid[yi]};
            auto bk = [&](const std::vector<double>& q) {
                return outcome_numerator(spec, k, g, q, opt.quad_points);
            };
            res.cdf[yi] = finite_diff(bk, q_node, alpha, fd) / den;
        }
    } else {
        if (!data) throw std::invalid_argument("estimation mode requires data");
        const auto pts = record_q_points(spec, *data, opt);
        std::vector<std::vector<double>> knots(jd);
        for (int j = 0; j < jd; ++j) knots[j] = {q_node[j]};
        const Grid node_grid{std::vector<std::vector<double>>(knots)};

        std::vector<std::vector<double>> resp(y_grid.size() + 1,
                                              std::vector<double>(pts.n, 0.0));
        for (std::size_t i = 0; i < pts.n; ++i) {
            if (data->d[i] != k) continue;
            resp[0][i] = 1.0;
            for (std::size_t yi = 0; yi < y_grid.size(); ++yi)
                resp[yi + 1][i] = data->y[i] <= y_grid[yi] ? 1.0 : 0.0;
        }
        std::vector<const std::vector<double>*> rs;
        for (auto& r : resp) rs.push_back(&r);
        const auto alpha = ones_index(jd);
        const auto fo = make_fit_options(pts, jd, opt, {alpha});
        auto fits = fit_local_poly_multi(pts.q, rs, node_grid, fo);
        const double den = fits[0].deriv(alpha)[0];
        if (std::fabs(den) < opt.denominator_floor)
            throw std::runtime_error("counterfactual_quantile: denominator below floor at node");
        for (std::size_t yi = 0; yi < y_grid.size(); ++yi)
            res.cdf[yi] = fits[yi + 1].deriv(alpha)[0] / den;
    }

    // smoothing does not preserve monotonicity; rearrange before inverting
    std::sort(res.cdf.begin(), res.cdf.end());
    for (double& c : res.cdf) c = std::clamp(c, 0.0, 1.0);

    if (u < res.cdf.front() || u > res.cdf.back())
        throw std::domain_error("quantile level outside the attained CDF range at this node");
    for (std::size_t i = 0; i < res.cdf.size(); ++i) {
        if (res.cdf[i] >= u) {
            if (i == 0 || res.cdf[i] == res.cdf[i - 1]) {
                res.quantile = res.y_grid[i];
            } else {
                const double t = (u - res.cdf[i - 1]) / (res.cdf[i] - res.cdf[i - 1]);
                res.quantile = res.y_grid[i - 1] + t * (res.y_grid[i] - res.y_grid[i - 1]);
            }
            return res;
        }
    }
    res.quantile = res.y_grid.back();
    return res;
}

} // namespace mtid
