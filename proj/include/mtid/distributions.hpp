#ifndef MTID_DISTRIBUTIONS_HPP
#define MTID_DISTRIBUTIONS_HPP

#include <cstdint>
#include <vector>
#include <Eigen/Dense>

#include "mtid/rng.hpp"

namespace mtid {

enum class CopulaFamily { Independence, Clayton, Frank, Gumbel };

const char* family_name(CopulaFamily f);
CopulaFamily family_from_name(const std::string& s);

/// Archimedean generator phi: strictly decreasing, convex, phi(1)=0.
struct GeneratorSpec {
    CopulaFamily family = CopulaFamily::Independence;
    double theta = 0.0;
};

struct GeneratorValues {
    double phi;
    double dphi;
    double d2phi;
};

void validate_generator(const GeneratorSpec& g);

/// phi(u), phi'(u), phi''(u). u in (0,1]; evaluation is clamped at u >= 1e-12.
GeneratorValues generator_eval(const GeneratorSpec& g, double u);

/// phi^{-1}(t), t >= 0.
double inverse_generator(const GeneratorSpec& g, double t);

/// Joint law of the heterogeneity vector V on [0,1]^J with uniform marginals.
/// Immutable after construction; sampling takes an explicit generator state.
class JointHeterogeneity {
public:
    enum class Kind { Independence, Archimedean, GaussianCopula, LinearIndex };
    enum class LatentLaw { StdNormal, Uniform01 };

    static JointHeterogeneity independence(int dim);
    static JointHeterogeneity archimedean(const GeneratorSpec& g);
    static JointHeterogeneity gaussian(const Eigen::MatrixXd& corr);

    /// Law of V_j = H_j(alpha_j . U) for a latent vector U. With a standard
    /// normal latent the result is an exact Gaussian copula; otherwise H_j is
    /// tabulated from a calibration sample.
    static JointHeterogeneity linear_index(LatentLaw latent, const Eigen::MatrixXd& alpha,
                                           std::size_t calibration_n = 200000,
                                           std::uint64_t calibration_seed = 99991);

    int dim() const { return dim_; }
    Kind kind() const { return kind_; }
    bool closed_form_cdf() const;

    double cdf(const std::vector<double>& v) const;
    double density(const std::vector<double>& v) const;

    /// CDF of the margin over the coordinates in `subset_mask` (bit j =>
    /// coordinate j), evaluated at the corresponding entries of v.
    double margin_cdf(std::uint32_t subset_mask, const std::vector<double>& v) const;

    /// Pr(lo < V <= hi) by inclusion-exclusion over box corners.
    double box_mass(const std::vector<double>& lo, const std::vector<double>& hi) const;

    void draw(Rng& rng, double* out) const;
    /// n draws, row-major n x dim. Deterministic given seed.
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

    const GeneratorSpec& generator() const;
    const Eigen::MatrixXd& correlation() const;

private:
    JointHeterogeneity() = default;

    Kind kind_ = Kind::Independence;
    int dim_ = 0;
    GeneratorSpec gen_;
    Eigen::MatrixXd corr_;      // gaussian-copula correlation
    Eigen::MatrixXd chol_;      // its Cholesky factor
    Eigen::MatrixXd corr_inv_;
    double corr_logdet_ = 0.0;

    // linear-index data
    LatentLaw latent_ = LatentLaw::StdNormal;
    Eigen::MatrixXd alpha_;
    std::vector<std::vector<double>> h_table_;  // per-row sorted calibration values
};

/// Conditional CDF Pr(U2 <= u2 | U1 = u1) for a bivariate Archimedean copula.
double archimedean_conditional(const GeneratorSpec& g, double u1, double u2);

} // namespace mtid

#endif
