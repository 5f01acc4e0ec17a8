#ifndef MTID_THRESHOLD_ID_HPP
#define MTID_THRESHOLD_ID_HPP

#include <optional>
#include <string>
#include <vector>

#include "mtid/smoother.hpp"

namespace mtid {

/// Q_j recovered on instrument grids, together with the normalization that
/// pins down the remaining ambiguity (anchor point and additive constant).
struct RecoveredThresholds {
    std::vector<std::vector<double>> z_knots;  // per threshold
    std::vector<std::vector<double>> q_values;

    std::vector<double> anchor;
    double c10 = 0.0;
    double c10_lo = 0.0;
    double c10_hi = 0.0;

    double eval(int j, double zj) const;  // monotone linear interpolation

    void save(const std::string& path) const;
    static RecoveredThresholds load(const std::string& path);
};

struct TwoWayOptions {
    std::vector<double> anchor;        // must coincide with grid knots
    std::optional<double> c10;         // default: midpoint of the admissible interval
};

/// Threshold recovery for the two-way-flows model: 2*P0 + P2 is additively
/// separable and equals Q1 + Q2, so differencing against an anchor recovers
/// each threshold up to one shared constant. The admissible range of that
/// constant comes from requiring every treatment to keep positive
/// probability on the grid.
RecoveredThresholds identify_two_way(const Surface& p0, const Surface& p2,
                                     const TwoWayOptions& opt);

struct SeparabilityResult {
    double statistic = 0.0;  // sup of |d2 P / dz1 dz2| over interior nodes
    double tolerance = 0.0;
    bool pass = false;
};

SeparabilityResult separability_test(const Surface& p,
                                     std::optional<double> tolerance = std::nullopt);

struct HurdleGlobalOptions {
    double min_top_coverage = 0.97;
    double edge_extrapolation_steps = 1.0;
};

/// Double-hurdle global identification: cumulative integrals of the boundary
/// slopes of the propensity surface recover G1 and G2, then the copula CDF
/// follows by inversion.
struct HurdleGlobalResult {
    std::vector<double> z1_knots, g1;
    std::vector<double> z2_knots, g2;
    double g1_top = 0.0;  // recovered G_j at the upper end (should be near 1)
    double g2_top = 0.0;
    Surface h;            // the input surface, kept for F_V evaluation

    double g_eval(int which, double z) const;
    double g_inverse(int which, double v) const;
    /// F_V(v1, v2) = H(G1^{-1}(v1), G2^{-1}(v2)).
    double f_v(double v1, double v2) const;
};

HurdleGlobalResult identify_double_hurdle_global(const Surface& h,
                                                 const HurdleGlobalOptions& opt = {});

/// Generator recovered up to scale (normalized phi'(h_bar) = -1) and
/// location; point-identified when the propensity range reaches one.
struct RecoveredGenerator {
    std::vector<double> h;    // increasing level grid (bin medians + h_bar)
    std::vector<double> r;    // R(h) table
    std::vector<double> phi;  // recovered generator at h

    double h_lo = 0.0;
    double h_bar = 0.0;
    double location = 0.0;      // phi(h_bar)
    double location_lo = 0.0;   // bounds [0, 1 - h_bar]
    double location_hi = 0.0;
    bool point_identified = false;

    double constancy = 0.0;  // within-bin dispersion of R (level-dependence check)
    double min_r = 0.0;

    double phi_at(double level) const;
    double phi_inv(double value) const;
};

struct ArchimedeanOptions {
    int bins = 40;
    double eps_top = 0.01;               // h_bar >= 1 - eps_top => point identification
    std::optional<double> location;      // else midpoint of [0, 1-h_bar]
    double constancy_threshold = 0.05;
    double negative_r_tolerance = 1e-6;
    bool enforce_diagnostics = true;     // throw when R is negative / not level-constant
};

struct ArchimedeanResult {
    RecoveredGenerator gen;
    std::vector<double> z1_knots, g1;
    std::vector<double> z2_knots, g2;
    double k_lo = 0.0;  // common-constant ambiguity bounds for (G1, G2)
    double k_hi = 0.0;
    bool constancy_pass = false;

    /// phi^{-1}(phi(G1(z1)) + phi(G2(z2))): reconstruction of H.
    double reconstruct(double z1, double z2) const;
};

ArchimedeanResult identify_archimedean(const Surface& h, const ArchimedeanOptions& opt = {});

struct ClaytonThetaResult {
    std::vector<double> theta_nodes;  // per interior node
    double pooled_median = 0.0;
    double dispersion = 0.0;  // interquartile range
};

/// Closed-form Clayton parameter: theta = h * H12 / (H1 H2) - 1 node-wise.
ClaytonThetaResult identify_clayton_theta(const Surface& h);

} // namespace mtid

#endif
