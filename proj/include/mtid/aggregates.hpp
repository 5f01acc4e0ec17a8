#ifndef MTID_AGGREGATES_HPP
#define MTID_AGGREGATES_HPP

#include <optional>
#include <vector>

#include "mtid/dgp.hpp"
#include "mtid/smoother.hpp"

namespace mtid {

/// Baseline and counterfactual threshold maps over a shared instrument law.
struct PolicyShift {
    ThresholdMap baseline;
    ThresholdMap counterfactual;
};

/// Fixed seeded panel of instrument draws, shared across heterogeneity nodes
/// for variance reduction and determinism.
struct InstrumentPanel {
    int z_dim = 0;
    std::size_t draws = 0;
    std::vector<double> z;  // draws x z_dim

    static InstrumentPanel make(const InstrumentLaw& law, std::size_t draws, std::uint64_t seed);
};

/// ATE = integral of MTE against the recovered density (tensor trapezoid,
/// boundary panels extended to the unit cube). Refuses to aggregate when the
/// density mass on the grid falls short of one: that is bounds territory.
double ate(const Surface& mte, const Surface& fhat, double coverage_tol = 0.1);

struct AttResult {
    double value = 0.0;
    double weight_mass = 0.0;  // integral of the ATT weights (should be 1)
    double pr_treated = 0.0;   // Pr(D = k) used in the denominator
};

/// ATT via the selection-probability weights Pr[d_k(v, Q(Z)) = 1] f(v)/Pr(D=k),
/// with the conditional-on-v probability computed as a marginal over the
/// instrument panel. If pr_treated is supplied (e.g. an empirical share),
/// the weight normalization is verified and a failure aborts.
AttResult att(const Surface& mte, const Surface& fhat, const SelectionModel& model,
              const ThresholdMap& qmap, int k, const InstrumentPanel& panel,
              std::optional<double> pr_treated = std::nullopt,
              double normalization_tol = 0.01);

struct PrteResult {
    double d_outcome = 0.0;          // E[G(Y*)] - E[G(Y)]
    double d_treatment_level = 0.0;  // E[D*] - E[D]
    std::vector<double> d_share;     // Pr(D*_k = 1) - Pr(D_k = 1), per k
};

/// Policy-relevant effects of moving thresholds from Q to Q*: three
/// quadratures of the flow weights against means and density.
PrteResult prte(const std::vector<const Surface*>& means_per_k, const Surface& fhat,
                const SelectionModel& model, const PolicyShift& shift,
                const InstrumentPanel& panel);

struct BoundsResult {
    double lo = 0.0;
    double hi = 0.0;
};

/// Partial-identification bounds for E[G(Y_k)] when the threshold range is
/// limited and G is bounded in [0,1]: the identified mass plus the worst
/// case on the uncovered remainder.
BoundsResult bounds(long long index_coeff, const Transform& g, const Surface& outcome_derivative,
                    double coverage_mass);

} // namespace mtid

#endif
