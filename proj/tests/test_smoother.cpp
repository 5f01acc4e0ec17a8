#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mtid/bootstrap.hpp"
#include "mtid/distributions.hpp"
#include "mtid/rng.hpp"
#include "mtid/smoother.hpp"

using namespace mtid;

namespace {

// uniform design on (0,1)^2
std::vector<double> uniform_design(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n * 2);
    for (auto& v : x) v = rng.uniform();
    return x;
}

Grid interior_grid(double lo, double hi, int pts) {
    return Grid::uniform({lo, lo}, {hi, hi}, {pts, pts});
}

} // namespace

TEST_CASE("noiseless bilinear target: mixed partial is exact") {
    const std::size_t n = 20000;
    const auto x = uniform_design(n, 1);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = x[2 * i] * x[2 * i + 1];

    FitOptions opt;
    opt.bandwidth = {0.2, 0.2};
    opt.poly_order = 1;
    opt.derivatives = {{1, 1}};
    const auto s = fit_local_poly(x, w, interior_grid(0.2, 0.8, 7), opt);
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        CHECK(s.node_reliable(i));
        CHECK(std::fabs(s.deriv({1, 1})[i] - 1.0) < 1e-6);
    }
}

TEST_CASE("noiseless quadratic target with order-2 basis") {
    const std::size_t n = 60000;
    const auto x = uniform_design(n, 2);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = x[2 * i], b = x[2 * i + 1];
        w[i] = a * a * b * b;
    }
    FitOptions opt;
    opt.bandwidth = {0.22, 0.22};
    opt.poly_order = 2;
    opt.derivatives = {{1, 1}};
    const auto grid = interior_grid(0.25, 0.75, 6);
    const auto s = fit_local_poly(x, w, grid, opt);
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto node = grid.node(i);
        sup = std::max(sup, std::fabs(s.deriv({1, 1})[i] - 4.0 * node[0] * node[1]));
    }
    CHECK(sup < 1e-3);
}

TEST_CASE("polynomial reproduction up to the basis order") {
    const std::size_t n = 30000;
    const auto x = uniform_design(n, 3);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = x[2 * i], b = x[2 * i + 1];
        w[i] = 2.0 + a - 3.0 * b + 0.5 * a * b + a * a - b * b;
    }
    FitOptions opt;
    opt.bandwidth = {0.25, 0.25};
    opt.poly_order = 2;
    opt.derivatives = {{1, 1}};
    const auto grid = interior_grid(0.3, 0.7, 5);
    const auto s = fit_local_poly(x, w, grid, opt);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto node = grid.node(i);
        const double truth = 2.0 + node[0] - 3.0 * node[1] + 0.5 * node[0] * node[1] +
                             node[0] * node[0] - node[1] * node[1];
        CHECK(std::fabs(s.values[i] - truth) < 1e-9);
        CHECK(std::fabs(s.deriv({1, 1})[i] - 0.5) < 1e-9);
    }
}

TEST_CASE("constant target has zero derivatives") {
    const std::size_t n = 20000;
    const auto x = uniform_design(n, 4);
    std::vector<double> w(n, 1.0);
    FitOptions opt;
    opt.bandwidth = {0.2, 0.2};
    opt.poly_order = 2;
    opt.derivatives = {{1, 1}, {1, 0}, {0, 1}};
    const auto s = fit_local_poly(x, w, interior_grid(0.3, 0.7, 5), opt);
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        CHECK(std::fabs(s.deriv({1, 1})[i]) < 1e-9);
        CHECK(std::fabs(s.deriv({1, 0})[i]) < 1e-9);
        CHECK(std::fabs(s.values[i] - 1.0) < 1e-12);
    }
}

TEST_CASE("symmetric targets give symmetric fits") {
    const std::size_t n = 40000;
    Rng rng(6);
    std::vector<double> x(n * 2), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        // a design symmetric under coordinate swap
        const double a = rng.uniform(), b = rng.uniform();
        if (i % 2 == 0) {
            x[2 * i] = a;
            x[2 * i + 1] = b;
        } else {
            x[2 * i] = b;
            x[2 * i + 1] = a;
        }
        w[i] = x[2 * i] * x[2 * i + 1] + x[2 * i] + x[2 * i + 1];
    }
    FitOptions opt;
    opt.bandwidth = {0.2, 0.2};
    opt.poly_order = 2;
    opt.derivatives = {{1, 1}};
    const auto grid = interior_grid(0.3, 0.7, 5);
    const auto s = fit_local_poly(x, w, grid, opt);
    const auto shape = grid.shape();
    for (std::size_t a = 0; a < shape[0]; ++a)
        for (std::size_t b = 0; b < shape[1]; ++b)
            CHECK(s.values[a * shape[1] + b] ==
                  doctest::Approx(s.values[b * shape[1] + a]).epsilon(1e-9));
}

TEST_CASE("noisy fit lands within bootstrap error bands") {
    const std::size_t n = 200000;
    Rng rng(7);
    SampleSet data;  // reuse the resampling harness through a fake sample
    data.j_dim = 2;
    data.z_dim = 2;
    data.k_count = 1;
    data.y.resize(n);
    data.d.assign(n, 0);
    data.z.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.uniform(), b = rng.uniform();
        data.z[2 * i] = a;
        data.z[2 * i + 1] = b;
        data.y[i] = a * a * b + 0.1 * rng.normal();
    }
    FitOptions opt;
    opt.bandwidth = {0.25, 0.25};
    opt.poly_order = 2;
    opt.derivatives = {{1, 1}};
    const Grid grid({{0.5}, {0.5}});

    auto estimate = [&](const SampleSet& s) {
        return fit_local_poly(s.z, s.y, grid, opt).deriv({1, 1})[0];
    };
    const double point = estimate(data);
    const auto reps = bootstrap_replicates(data, 30, 99, 0, estimate);
    const double se = sample_sd(reps);
    CHECK(std::fabs(point - 2.0 * 0.5) < 3.0 * se);
}

TEST_CASE("effective-sample-size flagging and input checks") {
    const std::size_t n = 200;
    const auto x = uniform_design(n, 8);
    std::vector<double> w(n, 0.5);
    FitOptions opt;
    opt.bandwidth = {0.03, 0.03};  // tiny window: almost no points
    opt.poly_order = 2;
    opt.derivatives = {{1, 1}};
    const auto s = fit_local_poly(x, w, interior_grid(0.3, 0.7, 4), opt);
    bool any_unreliable = false;
    for (std::size_t i = 0; i < s.grid.size(); ++i) any_unreliable |= !s.node_reliable(i);
    CHECK(any_unreliable);

    CHECK_THROWS(fit_local_poly({}, {}, interior_grid(0.3, 0.7, 4), opt));
    FitOptions bad = opt;
    bad.bandwidth = {0.2};
    CHECK_THROWS(fit_local_poly(x, w, interior_grid(0.3, 0.7, 4), bad));
    FitOptions low_order = opt;
    low_order.bandwidth = {0.2, 0.2};
    low_order.poly_order = 0;
    CHECK_THROWS(fit_local_poly(x, w, interior_grid(0.3, 0.7, 4), low_order));
}

TEST_CASE("finite differences") {
    auto f_bilinear = [](const std::vector<double>& q) { return q[0] * q[1]; };
    FiniteDiffOptions fd;
    fd.step = 1e-3;
    CHECK(std::fabs(finite_diff(f_bilinear, {0.4, 0.6}, {1, 1}, fd) - 1.0) < 1e-10);

    // zero-order multi-index returns the function value
    CHECK(finite_diff(f_bilinear, {0.4, 0.6}, {0, 0}, fd) == doctest::Approx(0.24));

    // clayton cdf mixed partial = copula density
    const auto cl = JointHeterogeneity::archimedean(GeneratorSpec{CopulaFamily::Clayton, 2.0});
    auto fcl = [&](const std::vector<double>& q) { return cl.cdf(q); };
    fd.step = 1e-3;
    fd.richardson = true;
    CHECK(std::fabs(finite_diff(fcl, {0.5, 0.5}, {1, 1}, fd) - cl.density({0.5, 0.5})) < 1e-6);

    // quadratics with total order <= 2 are exact
    auto fq = [](const std::vector<double>& q) {
        return 1.0 + 2.0 * q[0] + 3.0 * q[1] + 4.0 * q[0] * q[0] + 5.0 * q[0] * q[1];
    };
    fd.richardson = false;
    fd.step = 1e-2;
    CHECK(std::fabs(finite_diff(fq, {0.5, 0.5}, {2, 0}, fd) - 8.0) < 1e-9);
    CHECK(std::fabs(finite_diff(fq, {0.5, 0.5}, {1, 1}, fd) - 5.0) < 1e-9);

    // stencil leaving the domain
    CHECK_THROWS(finite_diff(f_bilinear, {0.00005, 0.5}, {1, 1}, fd));
    // explicit wider domain admits the same point
    fd.domain_lo = {-1.0, -1.0};
    fd.domain_hi = {2.0, 2.0};
    CHECK_NOTHROW(finite_diff(f_bilinear, {0.00005, 0.5}, {1, 1}, fd));
    // unsupported stencil order
    CHECK_THROWS(finite_diff(f_bilinear, {0.5, 0.5}, {3, 0}, fd));
}

TEST_CASE("bandwidth rule") {
    const std::size_t n = 10000;
    const auto x = uniform_design(n, 9);
    const auto bw = bandwidth_rule(x, 2, {1, 1}, 2);
    for (double b : bw) {
        CHECK(b > 0.05);
        CHECK(b < 0.5);
    }

    // doubling n shrinks the bandwidth
    const auto x2 = uniform_design(2 * n, 9);
    const auto bw2 = bandwidth_rule(x2, 2, {1, 1}, 2);
    CHECK(bw2[0] < bw[0]);

    // degenerate dimension
    std::vector<double> flat(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        flat[2 * i] = 0.5;
        flat[2 * i + 1] = x[2 * i + 1];
    }
    CHECK_THROWS(bandwidth_rule(flat, 2, {1, 1}, 2));
    CHECK_THROWS(bandwidth_rule(uniform_design(50, 10), 2, {1, 1}, 2));
}

TEST_CASE("surface persistence round-trip") {
    const auto grid = interior_grid(0.2, 0.8, 5);
    auto f = [](const std::vector<double>& q) { return q[0] + 2.0 * q[1]; };
    FiniteDiffOptions fd;
    fd.step = 1e-3;
    auto s = surface_from_function(grid, f, {{1, 1}, {1, 0}}, fd, 1e-9);
    const std::string path = "/tmp/mtid_test_surface.txt";
    s.save(path);
    const auto r = Surface::load(path);
    CHECK(r.grid.knots == s.grid.knots);
    CHECK(r.values == s.values);
    CHECK(r.deriv({1, 1}) == s.deriv({1, 1}));
    CHECK(r.deriv({1, 0}) == s.deriv({1, 0}));
    CHECK(r.noise_floor == s.noise_floor);
    std::remove(path.c_str());
}
