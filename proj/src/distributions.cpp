#include "mtid/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mtid/special.hpp"

namespace mtid {

namespace {
constexpr double kUClamp = 1e-12;
}

const char* family_name(CopulaFamily f) {
    switch (f) {
        case CopulaFamily::Independence: return "independence";
        case CopulaFamily::Clayton: return "clayton";
        case CopulaFamily::Frank: return "frank";
        case CopulaFamily::Gumbel: return "gumbel";
    }
    return "?";
}

CopulaFamily family_from_name(const std::string& s) {
    if (s == "independence") return CopulaFamily::Independence;
    if (s == "clayton") return CopulaFamily::Clayton;
    if (s == "frank") return CopulaFamily::Frank;
    if (s == "gumbel") return CopulaFamily::Gumbel;
    throw std::invalid_argument("unknown copula family: " + s);
}

void validate_generator(const GeneratorSpec& g) {
    switch (g.family) {
        case CopulaFamily::Independence:
            break;
        case CopulaFamily::Clayton:
            if (!(g.theta > 0.0))
                throw std::domain_error("clayton generator requires theta > 0");
            break;
        case CopulaFamily::Frank:
            if (g.theta == 0.0)
                throw std::domain_error("frank generator requires theta != 0");
            break;
        case CopulaFamily::Gumbel:
            if (!(g.theta >= 1.0))
                throw std::domain_error("gumbel generator requires theta >= 1");
            break;
    }
}

GeneratorValues generator_eval(const GeneratorSpec& g, double u) {
    validate_generator(g);
    if (!(u > 0.0 && u <= 1.0))
        throw std::domain_error("generator_eval: u must be in (0,1]");
    u = std::max(u, kUClamp);
    GeneratorValues v{};
    const double th = g.theta;
    switch (g.family) {
        case CopulaFamily::Independence:
            v.phi = -std::log(u);
            v.dphi = -1.0 / u;
            v.d2phi = 1.0 / (u * u);
            break;
        case CopulaFamily::Clayton:
            v.phi = (std::pow(u, -th) - 1.0) / th;
            v.dphi = -std::pow(u, -th - 1.0);
            v.d2phi = (th + 1.0) * std::pow(u, -th - 2.0);
            break;
        case CopulaFamily::Frank: {
            const double e = std::expm1(-th * u);
            const double d = std::expm1(-th);
            const double eu = std::exp(-th * u);
            v.phi = -std::log(e / d);
            v.dphi = th * eu / e;
            v.d2phi = th * th * eu / (e * e);
            break;
        }
        case CopulaFamily::Gumbel: {
            const double L = -std::log(u);
            v.phi = std::pow(L, th);
            v.dphi = -th * std::pow(L, th - 1.0) / u;
            v.d2phi = th * std::pow(L, th - 2.0) * ((th - 1.0) + L) / (u * u);
            break;
        }
    }
    return v;
}

double inverse_generator(const GeneratorSpec& g, double t) {
    validate_generator(g);
    if (!(t >= 0.0)) throw std::domain_error("inverse_generator: t must be >= 0");
    const double th = g.theta;
    switch (g.family) {
        case CopulaFamily::Independence:
            return std::exp(-t);
        case CopulaFamily::Clayton:
            return std::pow(1.0 + th * t, -1.0 / th);
        case CopulaFamily::Frank:
            return -std::log1p(std::expm1(-th) * std::exp(-t)) / th;
        case CopulaFamily::Gumbel:
            return std::exp(-std::pow(t, 1.0 / th));
    }
    return 0.0;
}

double archimedean_conditional(const GeneratorSpec& g, double u1, double u2) {
    if (u2 <= 0.0) return 0.0;
    if (u2 >= 1.0) return 1.0;
    const auto g1 = generator_eval(g, u1);
    const auto g2 = generator_eval(g, u2);
    const double c = inverse_generator(g, g1.phi + g2.phi);
    const auto gc = generator_eval(g, std::max(c, kUClamp));
    return g1.dphi / gc.dphi;
}

// ---------------------------------------------------------------------------

JointHeterogeneity JointHeterogeneity::independence(int dim) {
    if (dim < 1) throw std::invalid_argument("heterogeneity dimension must be >= 1");
    JointHeterogeneity h;
    h.kind_ = Kind::Independence;
    h.dim_ = dim;
    return h;
}

JointHeterogeneity JointHeterogeneity::archimedean(const GeneratorSpec& g) {
    validate_generator(g);
    JointHeterogeneity h;
    h.kind_ = g.family == CopulaFamily::Independence ? Kind::Independence : Kind::Archimedean;
    h.dim_ = 2;
    h.gen_ = g;
    return h;
}

JointHeterogeneity JointHeterogeneity::gaussian(const Eigen::MatrixXd& corr) {
    const int d = static_cast<int>(corr.rows());
    if (corr.cols() != d || d < 1)
        throw std::invalid_argument("gaussian copula: correlation matrix must be square");
    for (int i = 0; i < d; ++i) {
        if (std::fabs(corr(i, i) - 1.0) > 1e-12)
            throw std::invalid_argument("gaussian copula: unit diagonal required");
        for (int j = 0; j < d; ++j)
            if (std::fabs(corr(i, j) - corr(j, i)) > 1e-12)
                throw std::invalid_argument("gaussian copula: matrix must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("gaussian copula: matrix not positive definite");
    JointHeterogeneity h;
    h.kind_ = Kind::GaussianCopula;
    h.dim_ = d;
    h.corr_ = corr;
    h.chol_ = llt.matrixL();
    h.corr_inv_ = llt.solve(Eigen::MatrixXd::Identity(d, d));
    h.corr_logdet_ = 0.0;
    for (int i = 0; i < d; ++i) h.corr_logdet_ += 2.0 * std::log(h.chol_(i, i));
    return h;
}

JointHeterogeneity JointHeterogeneity::linear_index(LatentLaw latent, const Eigen::MatrixXd& alpha,
                                                    std::size_t calibration_n,
                                                    std::uint64_t calibration_seed) {
    const int j = static_cast<int>(alpha.rows());
    const int l = static_cast<int>(alpha.cols());
    if (j < 1 || l < 1) throw std::invalid_argument("linear_index: empty alpha");
    for (int r = 0; r < j; ++r)
        if (alpha.row(r).norm() == 0.0)
            throw std::invalid_argument("linear_index: degenerate alpha row (all zeros)");

    if (latent == LatentLaw::StdNormal) {
        // alpha_j . U is normal; H_j is an exact probit, and the joint law is
        // the Gaussian copula of the normalized Gram matrix.
        Eigen::MatrixXd gram = alpha * alpha.transpose();
        Eigen::VectorXd s = gram.diagonal().cwiseSqrt();
        Eigen::MatrixXd corr(j, j);
        for (int a = 0; a < j; ++a)
            for (int b = 0; b < j; ++b) corr(a, b) = gram(a, b) / (s(a) * s(b));
        for (int a = 0; a < j; ++a) corr(a, a) = 1.0;
        JointHeterogeneity h = gaussian(corr);
        h.kind_ = Kind::LinearIndex;
        h.latent_ = latent;
        h.alpha_ = alpha;
        return h;
    }

    JointHeterogeneity h;
    h.kind_ = Kind::LinearIndex;
    h.latent_ = latent;
    h.dim_ = j;
    h.alpha_ = alpha;
    // Identity map needs no calibration table.
    const bool identity = (j == l) && alpha.isIdentity(1e-14);
    if (!identity) {
        h.h_table_.resize(j);
        Rng rng(derive_seed(calibration_seed, "linear-index-calibration"));
        std::vector<double> u(l);
        for (std::size_t i = 0; i < calibration_n; ++i) {
            for (int c = 0; c < l; ++c) u[c] = rng.uniform();
            for (int r = 0; r < j; ++r) {
                double dot = 0.0;
                for (int c = 0; c < l; ++c) dot += alpha(r, c) * u[c];
                h.h_table_[r].push_back(dot);
            }
        }
        for (auto& t : h.h_table_) std::sort(t.begin(), t.end());
    }
    return h;
}

bool JointHeterogeneity::closed_form_cdf() const {
    switch (kind_) {
        case Kind::Independence:
        case Kind::Archimedean:
        case Kind::GaussianCopula:
            return true;
        case Kind::LinearIndex:
            return latent_ == LatentLaw::StdNormal || h_table_.empty();
    }
    return false;
}

const GeneratorSpec& JointHeterogeneity::generator() const {
    if (kind_ != Kind::Archimedean)
        throw std::logic_error("generator(): not an Archimedean law");
    return gen_;
}

const Eigen::MatrixXd& JointHeterogeneity::correlation() const {
    if (corr_.size() == 0) throw std::logic_error("correlation(): not a Gaussian copula");
    return corr_;
}

double JointHeterogeneity::cdf(const std::vector<double>& v) const {
    if (static_cast<int>(v.size()) != dim_)
        throw std::invalid_argument("cdf: dimension mismatch");
    const std::uint32_t full = (dim_ >= 32) ? 0xffffffffu : ((1u << dim_) - 1u);
    return margin_cdf(full, v);
}

double JointHeterogeneity::margin_cdf(std::uint32_t subset_mask, const std::vector<double>& v) const {
    if (static_cast<int>(v.size()) != dim_)
        throw std::invalid_argument("margin_cdf: dimension mismatch");
    // Coordinates at or above 1 contribute probability one and drop out;
    // any coordinate at or below 0 kills the whole probability.
    std::vector<int> active;
    for (int j = 0; j < dim_; ++j) {
        if (!(subset_mask & (1u << j))) continue;
        if (v[j] <= 0.0) return 0.0;
        if (v[j] < 1.0) active.push_back(j);
    }
    if (active.empty()) return 1.0;

    switch (kind_) {
        case Kind::Independence: {
            double p = 1.0;
            for (int j : active) p *= v[j];
            return p;
        }
        case Kind::Archimedean: {
            if (active.size() == 1) return v[active[0]];
            double s = 0.0;
            for (int j : active) s += generator_eval(gen_, v[j]).phi;
            return inverse_generator(gen_, s);
        }
        case Kind::GaussianCopula:
        case Kind::LinearIndex: {
            if (kind_ == Kind::LinearIndex && !closed_form_cdf())
                throw std::runtime_error("margin_cdf: no closed-form CDF for this linear-index law");
            if (kind_ == Kind::LinearIndex && corr_.size() == 0) {
                // identity transform of uniform latent
                double p = 1.0;
                for (int j : active) p *= v[j];
                return p;
            }
            const int m = static_cast<int>(active.size());
            std::vector<double> x(m);
            for (int a = 0; a < m; ++a) x[a] = norm_quantile(v[active[a]]);
            if (m == 1) return v[active[0]];
            Eigen::MatrixXd sub(m, m);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) sub(a, b) = corr_(active[a], active[b]);
            return mvn_cdf(x, sub);
        }
    }
    return 0.0;
}

double JointHeterogeneity::density(const std::vector<double>& v) const {
    if (static_cast<int>(v.size()) != dim_)
        throw std::invalid_argument("density: dimension mismatch");
    for (double x : v)
        if (x < 0.0 || x > 1.0) return 0.0;
    switch (kind_) {
        case Kind::Independence:
            return 1.0;
        case Kind::Archimedean: {
            const double u1 = std::clamp(v[0], kUClamp, 1.0);
            const double u2 = std::clamp(v[1], kUClamp, 1.0);
            const auto g1 = generator_eval(gen_, u1);
            const auto g2 = generator_eval(gen_, u2);
            const double c = std::max(inverse_generator(gen_, g1.phi + g2.phi), kUClamp);
            const auto gc = generator_eval(gen_, c);
            return -gc.d2phi * g1.dphi * g2.dphi / (gc.dphi * gc.dphi * gc.dphi);
        }
        case Kind::GaussianCopula:
        case Kind::LinearIndex: {
            if (corr_.size() == 0) {
                if (kind_ == Kind::LinearIndex && !h_table_.empty())
                    throw std::runtime_error("density: not available for calibrated linear-index law");
                return 1.0;  // identity / independence case
            }
            Eigen::VectorXd x(dim_);
            for (int j = 0; j < dim_; ++j)
                x(j) = norm_quantile(std::clamp(v[j], kUClamp, 1.0 - kUClamp));
            const double quad = x.dot((corr_inv_ - Eigen::MatrixXd::Identity(dim_, dim_)) * x);
            return std::exp(-0.5 * (quad + corr_logdet_));
        }
    }
    return 0.0;
}

double JointHeterogeneity::box_mass(const std::vector<double>& lo, const std::vector<double>& hi) const {
    if (static_cast<int>(lo.size()) != dim_ || static_cast<int>(hi.size()) != dim_)
        throw std::invalid_argument("box_mass: dimension mismatch");
    double total = 0.0;
    std::vector<double> corner(dim_);
    for (std::uint32_t m = 0; m < (1u << dim_); ++m) {
        int bits = 0;
        for (int j = 0; j < dim_; ++j) {
            const bool pick_lo = m & (1u << j);
            corner[j] = pick_lo ? lo[j] : hi[j];
            bits += pick_lo ? 1 : 0;
        }
        total += ((bits % 2) ? -1.0 : 1.0) * cdf(corner);
    }
    return total;
}

void JointHeterogeneity::draw(Rng& rng, double* out) const {
    switch (kind_) {
        case Kind::Independence:
            for (int j = 0; j < dim_; ++j) out[j] = rng.uniform();
            return;
        case Kind::Archimedean: {
            const double u1 = rng.uniform();
            const double t = rng.uniform();
            // invert the conditional CDF in u2 by bracketing bisection
            double lo = kUClamp, hi = 1.0;
            for (int it = 0; it < 200 && (hi - lo) > 1e-10; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (archimedean_conditional(gen_, u1, mid) < t)
                    lo = mid;
                else
                    hi = mid;
            }
            out[0] = u1;
            out[1] = 0.5 * (lo + hi);
            return;
        }
        case Kind::GaussianCopula: {
            Eigen::VectorXd z(dim_);
            for (int j = 0; j < dim_; ++j) z(j) = rng.normal();
            Eigen::VectorXd x = chol_ * z;
            for (int j = 0; j < dim_; ++j) out[j] = norm_cdf(x(j));
            return;
        }
        case Kind::LinearIndex: {
            const int l = static_cast<int>(alpha_.cols());
            Eigen::VectorXd u(l);
            if (latent_ == LatentLaw::StdNormal) {
                for (int c = 0; c < l; ++c) u(c) = rng.normal();
                Eigen::VectorXd idx = alpha_ * u;
                for (int j = 0; j < dim_; ++j)
                    out[j] = norm_cdf(idx(j) / alpha_.row(j).norm());
            } else {
                for (int c = 0; c < l; ++c) u(c) = rng.uniform();
                if (h_table_.empty()) {
                    for (int j = 0; j < dim_; ++j) out[j] = u(j);
                } else {
                    Eigen::VectorXd idx = alpha_ * u;
                    for (int j = 0; j < dim_; ++j) {
                        const auto& tab = h_table_[j];
                        const auto it = std::lower_bound(tab.begin(), tab.end(), idx(j));
                        double rank = static_cast<double>(it - tab.begin());
                        out[j] = std::clamp((rank + 0.5) / (tab.size() + 1.0), kUClamp, 1.0 - kUClamp);
                    }
                }
            }
            return;
        }
    }
}

std::vector<double> JointHeterogeneity::sample(std::size_t n, std::uint64_t seed) const {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    std::vector<double> out(n * static_cast<std::size_t>(dim_));
    Rng rng(derive_seed(seed, "heterogeneity-sample"));
    for (std::size_t i = 0; i < n; ++i) draw(rng, &out[i * dim_]);
    return out;
}

} // namespace mtid
