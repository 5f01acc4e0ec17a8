#include "mtid/aggregates.hpp"

#include <cmath>
#include <stdexcept>

#include "mtid/parallel.hpp"

namespace mtid {

InstrumentPanel InstrumentPanel::make(const InstrumentLaw& law, std::size_t draws,
                                      std::uint64_t seed) {
    InstrumentPanel p;
    p.z_dim = law.dim();
    p.draws = draws;
    p.z.resize(draws * p.z_dim);
    Rng rng(derive_seed(seed, "instrument-panel"));
    for (std::size_t i = 0; i < draws; ++i) law.draw(rng, &p.z[i * p.z_dim]);
    return p;
}

namespace {

// Pr[d_k(v, Q(Z)) = 1] per grid node, averaged over the panel.
std::vector<double> selection_probability(const Grid& grid, const SelectionModel& model,
                                          const ThresholdMap& qmap, int k,
                                          const InstrumentPanel& panel) {
    const int jd = model.rules.front().thresholds();
    // thresholds per panel draw, computed once
    std::vector<double> qz(panel.draws * jd);
    std::vector<double> zi(panel.z_dim);
    for (std::size_t i = 0; i < panel.draws; ++i) {
        for (int c = 0; c < panel.z_dim; ++c) zi[c] = panel.z[i * panel.z_dim + c];
        const auto q = qmap.eval(zi);
        for (int j = 0; j < jd; ++j) qz[i * jd + j] = q[j];
    }
    std::vector<double> pr(grid.size(), 0.0);
    const auto& rule = model.rules.at(k);
    parallel_chunks(grid.size(), 0, [&](std::size_t a, std::size_t b) {
        for (std::size_t idx = a; idx < b; ++idx) {
            const auto v = grid.node(idx);
            std::size_t hits = 0;
            for (std::size_t i = 0; i < panel.draws; ++i) {
                std::uint32_t vertex = 0;
                for (int j = 0; j < jd; ++j)
                    if (v[j] < qz[i * jd + j]) vertex |= (1u << j);
                hits += rule.value(vertex);
            }
            pr[idx] = static_cast<double>(hits) / static_cast<double>(panel.draws);
        }
    });
    return pr;
}

void require_same_grid(const Surface& a, const Surface& b, const char* who) {
    if (a.grid.knots != b.grid.knots)
        throw std::invalid_argument(std::string(who) + ": surfaces live on different grids");
}

} // namespace

double ate(const Surface& mte, const Surface& fhat, double coverage_tol) {
    require_same_grid(mte, fhat, "ate");
    const double mass = trapezoid_integral(fhat.grid, fhat.values, true);
    if (std::fabs(mass - 1.0) > coverage_tol)
        throw std::runtime_error(
            "ate: density mass on the grid is " + std::to_string(mass) +
            "; grid does not cover the heterogeneity support - use bounds instead");
    std::vector<double> integrand(mte.values.size());
    for (std::size_t i = 0; i < integrand.size(); ++i)
        integrand[i] = mte.values[i] * fhat.values[i];
    return trapezoid_integral(mte.grid, integrand, true);
}

AttResult att(const Surface& mte, const Surface& fhat, const SelectionModel& model,
              const ThresholdMap& qmap, int k, const InstrumentPanel& panel,
              std::optional<double> pr_treated, double normalization_tol) {
    require_same_grid(mte, fhat, "att");
    const auto pr = selection_probability(mte.grid, model, qmap, k, panel);

    std::vector<double> wf(pr.size());
    for (std::size_t i = 0; i < pr.size(); ++i) wf[i] = pr[i] * fhat.values[i];
    const double denom_quadrature = trapezoid_integral(mte.grid, wf, true);

    AttResult res;
    res.pr_treated = pr_treated ? *pr_treated : denom_quadrature;
    if (!(res.pr_treated > 0.0)) throw std::domain_error("att: Pr(D=k) must be positive");
    res.weight_mass = denom_quadrature / res.pr_treated;
    if (std::fabs(res.weight_mass - 1.0) > normalization_tol)
        throw std::runtime_error("att: weight normalization failed (mass = " +
                                 std::to_string(res.weight_mass) + ")");
    std::vector<double> integrand(pr.size());
    for (std::size_t i = 0; i < pr.size(); ++i) integrand[i] = mte.values[i] * wf[i];
    res.value = trapezoid_integral(mte.grid, integrand, true) / res.pr_treated;
    return res;
}

PrteResult prte(const std::vector<const Surface*>& means_per_k, const Surface& fhat,
                const SelectionModel& model, const PolicyShift& shift,
                const InstrumentPanel& panel) {
    const int kc = model.treatments();
    if (static_cast<int>(means_per_k.size()) != kc)
        throw std::invalid_argument("prte: need one mean surface per treatment");
    for (const auto* m : means_per_k)
        if (m) require_same_grid(*m, fhat, "prte");

    PrteResult res;
    res.d_share.assign(kc, 0.0);
    const std::size_t nodes = fhat.grid.size();
    for (int k = 0; k < kc; ++k) {
        const auto pr_base = selection_probability(fhat.grid, model, shift.baseline, k, panel);
        const auto pr_star =
            selection_probability(fhat.grid, model, shift.counterfactual, k, panel);
        std::vector<double> flow(nodes), flow_mean(nodes);
        for (std::size_t i = 0; i < nodes; ++i) {
            const double ups = pr_star[i] - pr_base[i];
            flow[i] = ups * fhat.values[i];
            flow_mean[i] = means_per_k[k] ? flow[i] * means_per_k[k]->values[i] : 0.0;
        }
        const double dshare = trapezoid_integral(fhat.grid, flow, true);
        res.d_share[k] = dshare;
        res.d_treatment_level += k * dshare;
        res.d_outcome += trapezoid_integral(fhat.grid, flow_mean, true);
    }
    return res;
}

BoundsResult bounds(long long index_coeff, const Transform& g, const Surface& outcome_derivative,
                    double coverage_mass) {
    if (g.kind != Transform::IndicatorLeq)
        throw std::invalid_argument(
            "bounds: transform must be bounded in [0,1] (indicator transforms qualify)");
    if (index_coeff == 0) throw std::invalid_argument("bounds: treatment index must be nonzero");
    if (!(coverage_mass >= 0.0 && coverage_mass <= 1.0 + 1e-9))
        throw std::invalid_argument("bounds: coverage mass must lie in [0,1]");
    BoundsResult res;
    res.lo = trapezoid_integral(outcome_derivative.grid, outcome_derivative.values, false) /
             static_cast<double>(index_coeff);
    res.hi = res.lo + 1.0 - std::min(coverage_mass, 1.0);
    return res;
}

} // namespace mtid
