#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mtid/distributions.hpp"
#include "mtid/special.hpp"

using namespace mtid;

namespace {

const GeneratorSpec kClayton2{CopulaFamily::Clayton, 2.0};
const GeneratorSpec kFrank3{CopulaFamily::Frank, 3.0};
const GeneratorSpec kGumbel15{CopulaFamily::Gumbel, 1.5};
const GeneratorSpec kIndep{CopulaFamily::Independence, 0.0};

// empirical CDF at a point from a sample matrix
double ecdf_at(const std::vector<double>& sample, int dim, double x1, double x2) {
    std::size_t n = sample.size() / dim;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (sample[i * dim] < x1 && sample[i * dim + 1] < x2) ++hits;
    return static_cast<double>(hits) / n;
}

double ks_statistic_uniform(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        d = std::max(d, std::fabs((i + 1) / n - xs[i]));
        d = std::max(d, std::fabs(xs[i] - i / n));
    }
    return d;
}

} // namespace

TEST_CASE("generator closed forms") {
    // clayton: phi''/phi'(h) = -(1+theta)/h
    for (double h : {0.2, 0.5, 0.8}) {
        const auto g = generator_eval(kClayton2, h);
        CHECK(g.d2phi / g.dphi == doctest::Approx(-(1.0 + 2.0) / h).epsilon(1e-12));
    }
    // independence: -1/h
    for (double h : {0.3, 0.6}) {
        const auto g = generator_eval(kIndep, h);
        CHECK(g.d2phi / g.dphi == doctest::Approx(-1.0 / h).epsilon(1e-12));
    }
    // clayton theta=1 at u=0.5: phi = 1 and phi''/phi'(0.5) = -4
    const GeneratorSpec c1{CopulaFamily::Clayton, 1.0};
    const auto g = generator_eval(c1, 0.5);
    CHECK(g.phi == doctest::Approx(1.0));
    CHECK(g.d2phi / g.dphi == doctest::Approx(-4.0));
}

TEST_CASE("generator inverse round-trips") {
    for (const auto& spec : {kClayton2, kFrank3, kGumbel15, kIndep}) {
        for (double u : {0.05, 0.3, 0.5, 0.7, 0.99}) {
            const auto g = generator_eval(spec, u);
            CHECK(inverse_generator(spec, g.phi) == doctest::Approx(u).epsilon(1e-12));
        }
        CHECK(generator_eval(spec, 1.0).phi == doctest::Approx(0.0));
    }
}

TEST_CASE("generator domain errors") {
    CHECK_THROWS(generator_eval(kClayton2, 0.0));
    CHECK_THROWS(generator_eval(kClayton2, 1.2));
    CHECK_THROWS(generator_eval(GeneratorSpec{CopulaFamily::Clayton, -1.0}, 0.5));
    CHECK_THROWS(generator_eval(GeneratorSpec{CopulaFamily::Frank, 0.0}, 0.5));
    CHECK_THROWS(generator_eval(GeneratorSpec{CopulaFamily::Gumbel, 0.5}, 0.5));
    CHECK_THROWS(inverse_generator(kClayton2, -1.0));
}

TEST_CASE("phi'' matches centered differences of phi'") {
    const double h = 1e-5;
    for (const auto& spec : {kClayton2, kFrank3, kGumbel15, kIndep}) {
        for (double u = 0.05; u < 0.951; u += 0.05) {
            const auto g = generator_eval(spec, u);
            const double fd =
                (generator_eval(spec, u + h).dphi - generator_eval(spec, u - h).dphi) / (2 * h);
            CHECK(g.d2phi == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("joint cdf and density values") {
    const auto ind = JointHeterogeneity::independence(2);
    CHECK(ind.cdf({0.3, 0.4}) == doctest::Approx(0.12));
    CHECK(ind.density({0.3, 0.4}) == doctest::Approx(1.0));

    const auto cl = JointHeterogeneity::archimedean(kClayton2);
    // closed form: (2 * 0.5^-2 - 1)^(-1/2) = 7^(-1/2)
    CHECK(cl.cdf({0.5, 0.5}) == doctest::Approx(1.0 / std::sqrt(7.0)).epsilon(1e-12));

    // boundary
    CHECK(cl.cdf({0.0, 0.7}) == 0.0);
    CHECK(cl.cdf({0.7, 1.0}) == doctest::Approx(0.7));
    CHECK_THROWS(cl.cdf({0.5, 0.5, 0.5}));
}

TEST_CASE("density is the mixed difference of the cdf") {
    const double h = 1e-4;
    for (const auto& het :
         {JointHeterogeneity::archimedean(kClayton2), JointHeterogeneity::archimedean(kFrank3),
          JointHeterogeneity::archimedean(kGumbel15)}) {
        for (double u = 0.2; u < 0.81; u += 0.2) {
            for (double v = 0.2; v < 0.81; v += 0.2) {
                const double fd = (het.cdf({u + h, v + h}) - het.cdf({u + h, v - h}) -
                                   het.cdf({u - h, v + h}) + het.cdf({u - h, v - h})) /
                                  (4 * h * h);
                CHECK(het.density({u, v}) == doctest::Approx(fd).epsilon(5e-4));
            }
        }
    }
}

TEST_CASE("gaussian copula cdf, density and margins") {
    Eigen::MatrixXd r(3, 3);
    r << 1.0, 0.3, 0.3, 0.3, 1.0, 0.3, 0.3, 0.3, 1.0;
    const auto g = JointHeterogeneity::gaussian(r);

    // two-dim margin equals the bivariate gaussian copula
    const double c2 = bvn_cdf(norm_quantile(0.4), norm_quantile(0.7), 0.3);
    CHECK(g.margin_cdf(0b011, {0.4, 0.7, 0.9}) == doctest::Approx(c2).epsilon(1e-9));
    CHECK(g.margin_cdf(0b001, {0.4, 0.7, 0.9}) == doctest::Approx(0.4));

    // density vs mixed finite difference of the 2-d margin law
    Eigen::MatrixXd r2(2, 2);
    r2 << 1.0, 0.5, 0.5, 1.0;
    const auto g2 = JointHeterogeneity::gaussian(r2);
    const double h = 1e-4;
    for (double u = 0.3; u < 0.71; u += 0.2) {
        const double fd = (g2.cdf({u + h, u + h}) - g2.cdf({u + h, u - h}) -
                           g2.cdf({u - h, u + h}) + g2.cdf({u - h, u - h})) /
                          (4 * h * h);
        CHECK(g2.density({u, u}) == doctest::Approx(fd).epsilon(1e-4));
    }

    CHECK_THROWS(JointHeterogeneity::gaussian(Eigen::MatrixXd::Zero(2, 2)));
}

TEST_CASE("copulas are 2-increasing on random rectangles") {
    Rng rng(5);
    Eigen::MatrixXd r2(2, 2);
    r2 << 1.0, -0.4, -0.4, 1.0;
    const std::vector<JointHeterogeneity> laws{
        JointHeterogeneity::archimedean(kClayton2), JointHeterogeneity::archimedean(kFrank3),
        JointHeterogeneity::archimedean(kGumbel15), JointHeterogeneity::gaussian(r2)};
    for (const auto& law : laws) {
        for (int rep = 0; rep < 50; ++rep) {
            double a1 = rng.uniform(), b1 = rng.uniform();
            double a2 = rng.uniform(), b2 = rng.uniform();
            if (a1 > b1) std::swap(a1, b1);
            if (a2 > b2) std::swap(a2, b2);
            CHECK(law.box_mass({a1, a2}, {b1, b2}) >= -1e-12);
        }
    }
}

TEST_CASE("copula boundary identities") {
    const auto cl = JointHeterogeneity::archimedean(kClayton2);
    for (double u : {0.1, 0.4, 0.9}) {
        CHECK(cl.cdf({u, 1.0}) == doctest::Approx(u).epsilon(1e-12));
        CHECK(cl.cdf({u, 0.0}) == 0.0);
    }
}

TEST_CASE("sampling: uniform marginals (KS at the 1% level)") {
    const std::size_t n = 100000;
    const double crit = 1.63 / std::sqrt(static_cast<double>(n));
    for (const auto& het : {JointHeterogeneity::independence(2),
                            JointHeterogeneity::archimedean(kClayton2),
                            JointHeterogeneity::archimedean(kGumbel15)}) {
        const auto s = het.sample(n, 99);
        for (int c = 0; c < 2; ++c) {
            std::vector<double> xs(n);
            for (std::size_t i = 0; i < n; ++i) xs[i] = s[i * 2 + c];
            CHECK(ks_statistic_uniform(std::move(xs)) < crit);
        }
    }
}

TEST_CASE("sampling: clayton empirical cdf matches the closed form") {
    const std::size_t n = 100000;
    const auto cl = JointHeterogeneity::archimedean(kClayton2);
    const auto s = cl.sample(n, 123);
    const double truth = 1.0 / std::sqrt(7.0);
    const double se = std::sqrt(truth * (1.0 - truth) / n);
    CHECK(std::fabs(ecdf_at(s, 2, 0.5, 0.5) - truth) < 3.0 * se);
}

TEST_CASE("sampling: errors and determinism") {
    const auto cl = JointHeterogeneity::archimedean(kClayton2);
    CHECK_THROWS(cl.sample(0, 1));
    const auto a = cl.sample(1000, 7);
    const auto b = cl.sample(1000, 7);
    CHECK(a == b);
}

TEST_CASE("linear index transform") {
    // identity on uniforms: exact pass-through law
    const auto id = JointHeterogeneity::linear_index(JointHeterogeneity::LatentLaw::Uniform01,
                                                     Eigen::MatrixXd::Identity(2, 2));
    CHECK(id.cdf({0.3, 0.4}) == doctest::Approx(0.12));

    // normal latent with a correlation-rho mixing row gives the gaussian copula
    const double rho = 0.6;
    Eigen::MatrixXd alpha(2, 2);
    alpha << 1.0, 0.0, rho, std::sqrt(1.0 - rho * rho);
    const auto law = JointHeterogeneity::linear_index(JointHeterogeneity::LatentLaw::StdNormal,
                                                      alpha);
    Eigen::MatrixXd r2(2, 2);
    r2 << 1.0, rho, rho, 1.0;
    const auto gauss = JointHeterogeneity::gaussian(r2);
    for (double u : {0.3, 0.5, 0.8})
        CHECK(law.cdf({u, u}) == doctest::Approx(gauss.cdf({u, u})).epsilon(1e-10));

    // sampled empirical CDF against the analytic law
    const std::size_t n = 100000;
    const auto s = law.sample(n, 2718);
    const double truth = gauss.cdf({0.5, 0.5});
    const double se = std::sqrt(truth * (1.0 - truth) / n);
    CHECK(std::fabs(ecdf_at(s, 2, 0.5, 0.5) - truth) < 3.0 * se);

    // marginal uniformity survives a non-trivial mix of uniforms
    Eigen::MatrixXd mix(2, 3);
    mix << 1.0, 0.5, 0.0, 0.0, 0.5, 1.0;
    const auto mixed =
        JointHeterogeneity::linear_index(JointHeterogeneity::LatentLaw::Uniform01, mix);
    const auto ms = mixed.sample(50000, 11);
    const double crit = 1.63 / std::sqrt(50000.0);
    for (int c = 0; c < 2; ++c) {
        std::vector<double> xs(50000);
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = ms[i * 2 + c];
        CHECK(ks_statistic_uniform(std::move(xs)) < crit);
    }

    // degenerate row
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.0, 0.0, 0.0;
    CHECK_THROWS(JointHeterogeneity::linear_index(JointHeterogeneity::LatentLaw::StdNormal, bad));
}

TEST_CASE("box mass matches quadrature of the density") {
    const auto cl = JointHeterogeneity::archimedean(kClayton2);
    const std::vector<double> lo{0.2, 0.3}, hi{0.7, 0.9};
    // tensor midpoint quadrature of the density over the box
    const int m = 400;
    double total = 0.0;
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            const double u = lo[0] + (hi[0] - lo[0]) * (a + 0.5) / m;
            const double v = lo[1] + (hi[1] - lo[1]) * (b + 0.5) / m;
            total += cl.density({u, v});
        }
    }
    total *= (hi[0] - lo[0]) * (hi[1] - lo[1]) / (m * m);
    CHECK(total == doctest::Approx(cl.box_mass(lo, hi)).epsilon(1e-4));
}

TEST_CASE("bivariate normal cdf cross-checked by quadrature") {
    // independent route: integrate phi(t) * Phi((x - rho t)/sqrt(1-rho^2))
    auto quad = [](double x, double y, double rho) {
        const int m = 4000;
        const double lo = -9.0;
        double total = 0.0;
        const double s = std::sqrt(1.0 - rho * rho);
        for (int i = 0; i < m; ++i) {
            const double t = lo + (y - lo) * (i + 0.5) / m;
            total += norm_pdf(t) * norm_cdf((x - rho * t) / s);
        }
        return total * (y - lo) / m;
    };
    for (double rho : {-0.95, -0.5, 0.0, 0.3, 0.8, 0.95}) {
        for (double x : {-1.5, 0.0, 0.7}) {
            for (double y : {-0.5, 0.4, 2.0}) {
                CHECK(bvn_cdf(x, y, rho) == doctest::Approx(quad(x, y, rho)).epsilon(5e-6));
            }
        }
    }
}
