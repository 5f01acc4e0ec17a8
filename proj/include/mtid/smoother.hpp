#ifndef MTID_SMOOTHER_HPP
#define MTID_SMOOTHER_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mtid/grid.hpp"

namespace mtid {

/// Conditional-expectation estimate on a tensor grid, with any requested
/// mixed partial derivatives and per-node diagnostics.
struct Surface {
    Grid grid;
    std::vector<double> values;
    std::map<std::vector<int>, std::vector<double>> derivatives;
    std::vector<double> ess;        // effective sample size per node (empty in oracle mode)
    std::vector<std::uint8_t> reliable;
    std::vector<double> bandwidth;  // per-dim bandwidth used (empty in oracle mode)
    double noise_floor = 0.0;       // scale of numerical/statistical noise in derivatives

    const std::vector<double>& deriv(const std::vector<int>& alpha) const;
    bool node_reliable(std::size_t idx) const { return reliable.empty() || reliable[idx]; }

    void save(const std::string& path) const;
    static Surface load(const std::string& path);
};

struct FitOptions {
    std::vector<double> bandwidth;               // per-dim, positive
    int poly_order = 2;                          // tensor basis degree per dimension
    std::vector<std::vector<int>> derivatives;   // multi-indices to extract
    double min_ess = 30.0;
    int threads = 0;                             // 0 = hardware default
};

/// Locally weighted least squares at every grid node with a full tensor
/// polynomial basis and a product Epanechnikov kernel. The coefficient on
/// prod (q_j - node_j)^{alpha_j} times prod alpha_j! is the mixed partial.
Surface fit_local_poly(const std::vector<double>& x, const std::vector<double>& response,
                       const Grid& grid, const FitOptions& opt);

/// Same fit applied to several response vectors sharing one local design;
/// numerators and denominators of ratio estimands keep identical weights.
std::vector<Surface> fit_local_poly_multi(const std::vector<double>& x,
                                          const std::vector<const std::vector<double>*>& responses,
                                          const Grid& grid, const FitOptions& opt);

struct FiniteDiffOptions {
    double step = 1e-3;
    bool richardson = false;
    std::vector<double> domain_lo;  // defaults to the unit cube
    std::vector<double> domain_hi;
};

/// Centered-difference tensor stencil (order 2 per differentiated dimension,
/// derivative order <= 2 per dimension) with optional one-step Richardson
/// extrapolation.
double finite_diff(const std::function<double(const std::vector<double>&)>& f,
                   const std::vector<double>& point, const std::vector<int>& alpha,
                   const FiniteDiffOptions& opt = {});

/// Tabulates an analytic function (and requested derivatives, by finite
/// differences) on a grid: the oracle-mode counterpart of fit_local_poly.
Surface surface_from_function(const Grid& grid,
                              const std::function<double(const std::vector<double>&)>& f,
                              const std::vector<std::vector<int>>& derivatives,
                              const FiniteDiffOptions& opt = {}, double noise_floor = 1e-9);

/// Rule-of-thumb bandwidth: per-dim sd * n^(-1/(2*poly_order + d + 2)),
/// inflated by 1.5 per total derivative order. A default, not a tuner.
std::vector<double> bandwidth_rule(const std::vector<double>& x, int dim,
                                   const std::vector<int>& target_derivative,
                                   int poly_order = 2);

} // namespace mtid

#endif
