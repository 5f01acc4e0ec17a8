#ifndef MTID_SPECIAL_HPP
#define MTID_SPECIAL_HPP

#include <vector>
#include <Eigen/Dense>

namespace mtid {

double norm_pdf(double x);
double norm_cdf(double x);

/// Inverse standard normal CDF (Wichura's PPND16), |error| ~ 1e-15.
double norm_quantile(double p);

/// Pr(X < x, Y < y) for standard bivariate normal with correlation rho.
double bvn_cdf(double x, double y, double rho);

/// Multivariate normal CDF Pr(X_i < x_i) for a correlation matrix R.
/// Exact reductions for dim <= 2, nested Gauss-Legendre conditioning above.
double mvn_cdf(const std::vector<double>& x, const Eigen::MatrixXd& R);

struct GaussLegendre {
    std::vector<double> nodes;   // on (-1,1)
    std::vector<double> weights;
};

/// Gauss-Legendre rule of order n (cached).
const GaussLegendre& gauss_legendre(int n);

} // namespace mtid

#endif
