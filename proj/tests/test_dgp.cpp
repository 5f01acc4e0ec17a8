#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "mtid/dgp.hpp"
#include "mtid/special.hpp"

using namespace mtid;

namespace {

// fixed thresholds: a piecewise map that is constant at q over the z range
ThresholdComponent const_component(int z_index, double q) {
    ThresholdComponent c;
    c.kind = LinkKind::PiecewiseLinear;
    c.z_index = z_index;
    c.knots = {{-4.0, q}, {4.0, q}};
    return c;
}

DgpSpec fixed_threshold_dgp(const std::string& name, double q1, double q2) {
    DgpSpec spec = builtin_dgp(name);
    spec.thresholds.components[0] = const_component(0, q1);
    spec.thresholds.components[1] = const_component(1, q2);
    spec.validate();
    return spec;
}

} // namespace

TEST_CASE("simulate: double hurdle share at fixed thresholds") {
    auto spec = fixed_threshold_dgp("double_hurdle", 0.5, 0.5);
    const std::size_t n = 100000;
    const auto s = simulate(spec, n, 31);
    std::size_t treated = 0;
    for (int d : s.d) treated += d == 1;
    const double share = static_cast<double>(treated) / n;
    const double se = std::sqrt(0.25 * 0.75 / n);
    CHECK(std::fabs(share - 0.25) < 3.0 * se);
}

TEST_CASE("simulate: opposite-signs share matches q1 + q2 - 2 q1 q2") {
    const double q1 = 0.3, q2 = 0.6;
    auto spec = fixed_threshold_dgp("two_way_flows", q1, q2);
    const std::size_t n = 100000;
    const auto s = simulate(spec, n, 32);
    std::size_t hits = 0;
    for (int d : s.d) hits += d == 2;
    const double truth = q1 + q2 - 2 * q1 * q2;
    const double se = std::sqrt(truth * (1 - truth) / n);
    CHECK(std::fabs(static_cast<double>(hits) / n - truth) < 3.0 * se);
}

TEST_CASE("simulate: determinism and validation") {
    const auto spec = builtin_dgp("double_hurdle");
    const auto a = simulate(spec, 20000, 777);
    const auto b = simulate(spec, 20000, 777);
    CHECK(a.y == b.y);
    CHECK(a.d == b.d);
    CHECK(a.z == b.z);
    CHECK(a.v == b.v);
    CHECK_THROWS(simulate(spec, 0, 1));
}

TEST_CASE("latent block is consistent with the assignment rule") {
    const auto spec = builtin_dgp("two_way_flows");
    const auto s = simulate(spec, 20000, 5150);
    REQUIRE(s.has_latent);
    std::vector<double> zi(s.z_dim);
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (int c = 0; c < s.z_dim; ++c) zi[c] = s.z[i * s.z_dim + c];
        const auto q = spec.thresholds.eval(zi);
        std::uint32_t vertex = 0;
        for (int j = 0; j < s.j_dim; ++j)
            if (s.v[i * s.j_dim + j] < q[j]) vertex |= (1u << j);
        CHECK(spec.model.assign(vertex) == s.d[i]);
    }
}

TEST_CASE("true propensity values") {
    auto spec = fixed_threshold_dgp("two_way_flows", 0.5, 0.5);

    SUBCASE("independence") {
        const auto p = true_propensity(spec, {0.5, 0.5});
        CHECK(p[0] == doctest::Approx(0.25));
        CHECK(p[1] == doctest::Approx(0.25));
        CHECK(p[2] == doctest::Approx(0.5));
    }

    SUBCASE("clayton") {
        spec.heterogeneity =
            JointHeterogeneity::archimedean(GeneratorSpec{CopulaFamily::Clayton, 2.0});
        const auto p = true_propensity(spec, {0.5, 0.5});
        const double f = 1.0 / std::sqrt(7.0);
        CHECK(p[0] == doctest::Approx(f).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(f).epsilon(1e-12));
        CHECK(p[2] == doctest::Approx(1.0 - 2.0 * f).epsilon(1e-12));
    }

    SUBCASE("double hurdle propensity is the joint cdf") {
        auto dh = builtin_dgp("double_hurdle");
        dh.heterogeneity =
            JointHeterogeneity::archimedean(GeneratorSpec{CopulaFamily::Clayton, 2.0});
        const auto p = true_propensity(dh, {0.4, 0.7});
        CHECK(p[1] == doctest::Approx(dh.heterogeneity.cdf({0.4, 0.7})).epsilon(1e-12));
        CHECK(p[0] + p[1] == doctest::Approx(1.0));
    }

    SUBCASE("propensities sum to one at random points") {
        Rng rng(4);
        for (const auto& name : builtin_dgp_names()) {
            auto bspec = builtin_dgp(name);
            const int j = bspec.heterogeneity.dim();
            std::vector<double> q(j);
            for (int c = 0; c < j; ++c) q[c] = rng.uniform(0.1, 0.9);
            const auto p = true_propensity(bspec, q);
            double total = 0.0;
            for (double v : p) total += v;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("empirical shares match propensities averaged over instruments") {
    auto spec = builtin_dgp("two_way_flows");
    const std::size_t n = 100000;
    const auto s = simulate(spec, n, 909);
    // average the closed-form propensities over an instrument sample
    Rng rng(derive_seed(909, "share-check"));
    std::vector<double> avg(3, 0.0), zi(spec.instruments.dim());
    const std::size_t m = 40000;
    for (std::size_t i = 0; i < m; ++i) {
        spec.instruments.draw(rng, zi.data());
        const auto p = true_propensity(spec, spec.thresholds.eval(zi));
        for (int k = 0; k < 3; ++k) avg[k] += p[k];
    }
    for (int k = 0; k < 3; ++k) {
        avg[k] /= m;
        std::size_t hits = 0;
        for (int d : s.d) hits += d == k;
        const double share = static_cast<double>(hits) / n;
        const double se = std::sqrt(avg[k] * (1 - avg[k]) * (1.0 / n + 1.0 / m));
        CHECK(std::fabs(share - avg[k]) < 3.5 * se);
    }
}

TEST_CASE("true MTE under both transforms") {
    auto spec = builtin_dgp("double_hurdle");
    // mu_0 = 0, mu_1 = v1 + v2 by construction
    CHECK(true_mte(spec, 1, 0, {0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(true_mte(spec, 1, 1, {0.3, 0.9}) == doctest::Approx(0.0));
    CHECK_THROWS(true_mte(spec, 5, 0, {0.5, 0.5}));

    // indicator transform: difference of normal CDFs
    Transform g{Transform::IndicatorLeq, 0.8};
    const double s0 = spec.outcomes.sigma[0], s1 = spec.outcomes.sigma[1];
    const double truth = norm_cdf((0.8 - 1.0) / s1) - norm_cdf((0.8 - 0.0) / s0);
    CHECK(true_mte(spec, 1, 0, {0.5, 0.5}, g) == doctest::Approx(truth).epsilon(1e-12));
}

TEST_CASE("exclusion structure: thresholds ignore excluded instruments") {
    const auto spec = builtin_dgp("two_way_flows");
    const std::vector<double> z{0.5, -1.0};
    for (int j = 0; j < 2; ++j) {
        for (int c = 0; c < 2; ++c) {
            if (c == spec.thresholds.components[j].z_index) continue;
            std::vector<double> z2 = z;
            z2[c] += 0.37;
            CHECK(spec.thresholds.eval(z)[j] == spec.thresholds.eval(z2)[j]);
        }
    }
}

TEST_CASE("builtins") {
    for (const auto& name : builtin_dgp_names()) {
        const auto spec = builtin_dgp(name);
        CHECK(check_partition(spec.model).ok);
    }
    CHECK_THROWS(builtin_dgp("no_such_model"));

    const auto eg = builtin_dgp("entry_game");
    CHECK(eg.heterogeneity.dim() == 5);
    CHECK(eg.model.treatments() == 3);

    const auto z3 = builtin_dgp("zero_index_example3");
    CHECK(index_and_degree(z3.model.rules[0]).index == 0);
    CHECK(index_and_degree(z3.model.rules[0]).degree == 2);
    CHECK(index_and_degree(z3.model.rules[1]).index == 3);
    CHECK(index_and_degree(z3.model.rules[2]).index == -3);
}

TEST_CASE("entry game: equilibrium composition of the one-entrant rule") {
    const auto m = builtin_model("entry_game");
    // one entrant iff ((not S1) and (S2 or (S4 and S5))) or the firm-2 mirror
    for (std::uint32_t v = 0; v < 32; ++v) {
        const bool s1 = v & 1u, s2 = v & 2u, s3 = v & 4u, s4 = v & 8u, s5 = v & 16u;
        const bool firm1 = !s1 && (s2 || (s4 && s5));
        const bool firm2 = !s2 && (s1 || (s3 && !s5));
        CHECK(m.rules[1].value(v) == ((firm1 || firm2) ? 1 : 0));
        CHECK(m.rules[0].value(v) == ((s1 && s2) ? 1 : 0));
    }
}

TEST_CASE("sample file round-trip is exact") {
    const auto spec = builtin_dgp("double_hurdle");
    auto s = simulate(spec, 500, 63);
    const std::string path = "/tmp/mtid_test_samples.txt";
    s.save(path);
    const auto r = SampleSet::load(path);
    CHECK(r.y == s.y);
    CHECK(r.d == s.d);
    CHECK(r.z == s.z);
    CHECK(r.v == s.v);
    CHECK(r.yk == s.yk);
    CHECK(r.has_latent);

    s.strip_latent();
    s.save(path);
    const auto r2 = SampleSet::load(path);
    CHECK_FALSE(r2.has_latent);
    CHECK(r2.y == s.y);
    std::remove(path.c_str());
}

TEST_CASE("threshold map validation") {
    DgpSpec spec = builtin_dgp("double_hurdle");
    spec.thresholds.components[0].z_index = 5;
    CHECK_THROWS(spec.validate());

    ThresholdComponent bad;
    bad.kind = LinkKind::PiecewiseLinear;
    bad.knots = {{0.0, 0.8}, {1.0, 0.2}};  // decreasing
    CHECK_THROWS(bad.validate(1));

    ThresholdComponent out_of_range;
    out_of_range.kind = LinkKind::Logistic;
    out_of_range.range_lo = -0.1;
    CHECK_THROWS(out_of_range.validate(1));
}
