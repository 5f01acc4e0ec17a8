#ifndef MTID_MTE_HPP
#define MTID_MTE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mtid/dgp.hpp"
#include "mtid/smoother.hpp"
#include "mtid/threshold_id.hpp"

namespace mtid {

enum class Mode { Oracle, Estimation };

/// Shared knobs for the identification engine. Oracle mode differentiates
/// closed-form surfaces by finite differences; estimation mode smooths the
/// simulated sample. Both paths apply the same scaling by the treatment
/// index coefficient.
struct MteOptions {
    Mode mode = Mode::Oracle;

    // oracle mode
    double fd_step = 1e-3;
    bool richardson = true;
    int quad_points = 32;  // Gauss-Legendre nodes per dimension for outcome integrals

    // estimation mode
    std::vector<double> bandwidth;  // empty: rule-of-thumb
    int poly_order = 2;
    double min_ess = 30.0;
    const RecoveredThresholds* recovered_q = nullptr;  // default: the spec's true map

    double denominator_floor = 1e-4;
    int threads = 0;

    // specification test
    double spec_test_abs_tol = 1e-5;  // oracle mode
    double spec_test_t = 4.0;         // estimation mode, units of bootstrap SEs
    int bootstrap_reps = 24;
    std::uint64_t seed = 20240401;
};

/// f_V on the grid via Theorem-style scaling of the J-order mixed partial of
/// the propensity surface. Values are the density estimates; reliability
/// flags carry over from the fit.
Surface estimate_density(const DgpSpec& spec, const SampleSet* data, int k, const Grid& grid,
                         const MteOptions& opt);

/// E[G(Y_k) | V = q]: ratio of the mixed partials of the outcome and
/// propensity surfaces, sharing one local design. Nodes whose denominator
/// falls below the floor are flagged, not divided.
Surface estimate_counterfactual_mean(const DgpSpec& spec, const SampleSet* data, int k,
                                     const Transform& g, const Grid& grid,
                                     const MteOptions& opt);

/// Node-wise difference of counterfactual means for two full-index treatments.
Surface estimate_mte(const DgpSpec& spec, const SampleSet* data, int k, int l,
                     const Transform& g, const Grid& grid, const MteOptions& opt);

/// The raw J-order mixed partial of E[G(Y) D_k | Q = q] (no ratio, no index
/// scaling); the integrand of the partial-identification bounds.
Surface estimate_outcome_derivative(const DgpSpec& spec, const SampleSet* data, int k,
                                    const Transform& g, const Grid& grid,
                                    const MteOptions& opt);

struct ZeroIndexEstimate {
    std::uint32_t subset = 0;
    long long coeff = 0;
    Surface density;  // f_{V^l} over the subset grid
    Surface mean;     // E[G(Y_k) | V^l = .]
};

/// Zero-index identification: an m-order mixed partial over the coordinates
/// of a leading subset, at fixed values of the remaining coordinates.
ZeroIndexEstimate estimate_zero_index(const DgpSpec& spec, const SampleSet* data, int k,
                                      std::uint32_t subset, const Grid& subset_grid,
                                      const std::vector<double>& fixed_off,
                                      const Transform& g, const MteOptions& opt);

/// Same-subset MTE for two zero-index (or mixed-degree) treatments; rejects
/// mismatched conditioning sets outright.
Surface estimate_mte_zero_index(const DgpSpec& spec, const SampleSet* data, int k, int l,
                                std::uint32_t subset, const Grid& subset_grid,
                                const std::vector<double>& fixed_off, const Transform& g,
                                const MteOptions& opt);

struct SpecificationTest {
    std::vector<std::pair<int, int>> pairs;  // treatment pairs compared
    double max_abs_diff = 0.0;
    double max_t = 0.0;   // estimation mode only
    bool pass = false;
    Grid grid;
    std::vector<std::vector<double>> diffs;  // per pair, per node
    std::vector<std::vector<double>> ses;    // per pair, per node (estimation mode)
};

/// Cross-treatment overidentification: the same f_V must come out of every
/// treatment with a nonzero index.
SpecificationTest specification_test(const DgpSpec& spec, const SampleSet* data,
                                     const Grid& grid, const MteOptions& opt);

struct QuantileResult {
    double quantile = 0.0;
    std::vector<double> y_grid;
    std::vector<double> cdf;  // monotone-rearranged node-wise CDF
};

/// Quantile of Y_k given V = q from the indicator-transform CDF on a y-grid.
QuantileResult counterfactual_quantile(const DgpSpec& spec, const SampleSet* data, int k,
                                       const std::vector<double>& q_node, double u,
                                       const std::vector<double>& y_grid,
                                       const MteOptions& opt);

} // namespace mtid

#endif
