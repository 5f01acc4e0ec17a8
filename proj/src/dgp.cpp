#include "mtid/dgp.hpp"

#include <cmath>
#include <stdexcept>

#include "mtid/io.hpp"
#include "mtid/special.hpp"

namespace mtid {

double ThresholdComponent::eval(const std::vector<double>& z) const {
    const double x = z.at(z_index);
    switch (kind) {
        case LinkKind::Logistic: {
            const double t = intercept + slope * x;
            return range_lo + (range_hi - range_lo) / (1.0 + std::exp(-t));
        }
        case LinkKind::ProbitCdf: {
            const double t = intercept + slope * x;
            return range_lo + (range_hi - range_lo) * norm_cdf(t);
        }
        case LinkKind::PiecewiseLinear: {
            if (x <= knots.front().first) return knots.front().second;
            if (x >= knots.back().first) return knots.back().second;
            for (std::size_t i = 1; i < knots.size(); ++i) {
                if (x <= knots[i].first) {
                    const auto& [z0, q0] = knots[i - 1];
                    const auto& [z1, q1] = knots[i];
                    return q0 + (q1 - q0) * (x - z0) / (z1 - z0);
                }
            }
            return knots.back().second;
        }
    }
    return 0.5;
}

void ThresholdComponent::validate(int z_dim) const {
    if (z_index < 0 || z_index >= z_dim)
        throw std::invalid_argument("threshold component: instrument index out of range");
    if (kind == LinkKind::PiecewiseLinear) {
        if (knots.size() < 2)
            throw std::invalid_argument("piecewise-linear threshold needs >= 2 knots");
        for (std::size_t i = 0; i < knots.size(); ++i) {
            if (!(knots[i].second > 0.0 && knots[i].second < 1.0))
                throw std::invalid_argument("threshold knot values must lie strictly inside (0,1)");
            if (i > 0 && !(knots[i].first > knots[i - 1].first &&
                           knots[i].second >= knots[i - 1].second))
                throw std::invalid_argument("piecewise-linear threshold must be monotone");
        }
    } else {
        if (!(range_lo > 0.0 && range_hi < 1.0 && range_lo < range_hi))
            throw std::invalid_argument("threshold range must sit strictly inside (0,1)");
    }
}

std::vector<double> ThresholdMap::eval(const std::vector<double>& z) const {
    std::vector<double> q(components.size());
    for (std::size_t j = 0; j < components.size(); ++j) q[j] = components[j].eval(z);
    return q;
}

void ThresholdMap::validate() const {
    if (components.empty()) throw std::invalid_argument("threshold map: no components");
    for (const auto& c : components) c.validate(z_dim);
}

double PolyInV::eval(const std::vector<double>& v) const {
    double total = 0.0;
    for (const auto& t : terms) {
        double prod = t.coef;
        for (std::size_t j = 0; j < t.expo.size(); ++j) {
            for (int e = 0; e < t.expo[j]; ++e) prod *= v[j];
        }
        total += prod;
    }
    return total;
}

PolyInV PolyInV::constant(double c) {
    PolyInV p;
    p.terms.push_back({c, {}});
    return p;
}

PolyInV PolyInV::coordinate_sum(int dim) {
    PolyInV p;
    for (int j = 0; j < dim; ++j) {
        std::vector<int> e(dim, 0);
        e[j] = 1;
        p.terms.push_back({1.0, e});
    }
    return p;
}

void InstrumentLaw::draw(Rng& rng, double* out) const {
    for (std::size_t c = 0; c < components.size(); ++c) {
        const auto& comp = components[c];
        out[c] = comp.normal ? comp.a + comp.b * rng.normal() : rng.uniform(comp.a, comp.b);
    }
}

void DgpSpec::validate() const {
    thresholds.validate();
    const int j = heterogeneity.dim();
    if (thresholds.threshold_count() != j)
        throw std::invalid_argument("dgp: threshold count does not match heterogeneity dimension");
    if (model.rules.empty() || model.rules.front().thresholds() != j)
        throw std::invalid_argument("dgp: selection model does not match threshold count");
    const auto part = check_partition(model);
    if (!part.ok) throw std::invalid_argument("dgp: selection model is not a valid partition");
    if (outcomes.mu.size() != model.rules.size() || outcomes.sigma.size() != model.rules.size())
        throw std::invalid_argument("dgp: outcome model must cover every treatment");
    if (instruments.dim() != thresholds.z_dim)
        throw std::invalid_argument("dgp: instrument law does not match threshold map");
}

void SampleSet::strip_latent() {
    has_latent = false;
    v.clear();
    yk.clear();
}

SampleSet simulate(const DgpSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    if (n == 0) throw std::invalid_argument("simulate: n must be positive");

    const int jd = spec.heterogeneity.dim();
    const int zd = spec.instruments.dim();
    const int kc = spec.model.treatments();

    SampleSet s;
    s.j_dim = jd;
    s.z_dim = zd;
    s.k_count = kc;
    s.has_latent = true;
    s.y.resize(n);
    s.d.resize(n);
    s.z.resize(n * zd);
    s.v.resize(n * jd);
    s.yk.resize(n * kc);

    // fixed-size chunks with independently derived seed streams: the result
    // does not depend on how chunks are scheduled
    const std::size_t chunk = 16384;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> zi(zd), vi(jd);
    for (std::size_t c = 0; c < nchunks; ++c) {
        Rng rng(derive_seed(seed, "simulate", c));
        const std::size_t i0 = c * chunk;
        const std::size_t i1 = std::min(n, i0 + chunk);
        for (std::size_t i = i0; i < i1; ++i) {
            spec.instruments.draw(rng, zi.data());
            spec.heterogeneity.draw(rng, vi.data());
            const auto q = spec.thresholds.eval(zi);
            std::uint32_t vertex = 0;
            for (int j = 0; j < jd; ++j)
                if (vi[j] < q[j]) vertex |= (1u << j);
            const int k = spec.model.assign(vertex);
            for (int kk = 0; kk < kc; ++kk) {
                const double noise = rng.normal();
                s.yk[i * kc + kk] = spec.outcomes.mu[kk].eval(vi) + spec.outcomes.sigma[kk] * noise;
            }
            s.d[i] = k;
            s.y[i] = s.yk[i * kc + k];
            for (int zc = 0; zc < zd; ++zc) s.z[i * zd + zc] = zi[zc];
            for (int j = 0; j < jd; ++j) s.v[i * jd + j] = vi[j];
        }
    }
    return s;
}

std::vector<double> true_propensity(const DgpSpec& spec, const std::vector<double>& q) {
    if (!spec.heterogeneity.closed_form_cdf())
        throw std::runtime_error("true_propensity: heterogeneity law lacks a closed-form CDF");
    const int jd = spec.heterogeneity.dim();
    if (static_cast<int>(q.size()) != jd)
        throw std::invalid_argument("true_propensity: dimension mismatch");

    // P_k(q) = sum_l c^k_l Pr(V_j < q_j for all j in l)
    const std::size_t nsub = std::size_t{1} << jd;
    std::vector<double> margins(nsub);
    for (std::uint32_t m = 0; m < nsub; ++m)
        margins[m] = spec.heterogeneity.margin_cdf(m, q);

    std::vector<double> p(spec.model.treatments(), 0.0);
    for (int k = 0; k < spec.model.treatments(); ++k) {
        const auto& coeffs = spec.model.rules[k].coefficients();
        double total = 0.0;
        for (std::uint32_t m = 0; m < nsub; ++m)
            if (coeffs[m] != 0) total += static_cast<double>(coeffs[m]) * margins[m];
        p[k] = total;
    }
    return p;
}

double true_counterfactual_mean(const DgpSpec& spec, int k, const std::vector<double>& v,
                                const Transform& g) {
    if (k < 0 || k >= spec.model.treatments())
        throw std::invalid_argument("unknown treatment id");
    const double mu = spec.outcomes.mu[k].eval(v);
    if (g.kind == Transform::Identity) return mu;
    const double sd = spec.outcomes.sigma[k];
    if (sd <= 0.0) return mu <= g.y ? 1.0 : 0.0;
    return norm_cdf((g.y - mu) / sd);
}

double true_mte(const DgpSpec& spec, int k, int l, const std::vector<double>& v,
                const Transform& g) {
    return true_counterfactual_mean(spec, k, v, g) - true_counterfactual_mean(spec, l, v, g);
}

// --- built-ins --------------------------------------------------------------

namespace {

RulePolynomial rule_from_table(int j, std::initializer_list<int> t) {
    return RulePolynomial::from_truth_table(j, std::vector<int>(t));
}

SelectionModel model_two_way_flows() {
    // D=0: both below; D=1: both above; D=2: opposite sides.
    const EventSet ev = EventSet::make({"V1_below", "V2_below"});
    const std::size_t n = 4;
    std::vector<int> t0(n), t1(n), t2(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        const bool s1 = v & 1u, s2 = v & 2u;
        t0[v] = (s1 && s2) ? 1 : 0;
        t1[v] = (!s1 && !s2) ? 1 : 0;
        t2[v] = (s1 != s2) ? 1 : 0;
    }
    SelectionModel m;
    m.events = ev;
    m.rules = {RulePolynomial::from_truth_table(2, t0), RulePolynomial::from_truth_table(2, t1),
               RulePolynomial::from_truth_table(2, t2)};
    return m;
}

SelectionModel model_double_hurdle() {
    const EventSet ev = EventSet::make({"V1_below", "V2_below"});
    SelectionModel m;
    m.events = ev;
    m.rules = {rule_from_table(2, {1, 1, 1, 0}),   // D=0 unless both hurdles crossed
               rule_from_table(2, {0, 0, 0, 1})};  // D=1 iff both below
    return m;
}

SelectionModel model_zero_index() {
    const EventSet ev = EventSet::make({"V1_below", "V2_below", "V3_below"});
    const std::size_t n = 8;
    std::vector<int> t0(n), t1(n), t2(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        const int cnt = ((v >> 0) & 1) + ((v >> 1) & 1) + ((v >> 2) & 1);
        t0[v] = (cnt == 0 || cnt == 3) ? 1 : 0;  // all above or all below: zero index
        t1[v] = (cnt == 1) ? 1 : 0;
        t2[v] = (cnt == 2) ? 1 : 0;
    }
    SelectionModel m;
    m.events = ev;
    m.rules = {RulePolynomial::from_truth_table(3, t0), RulePolynomial::from_truth_table(3, t1),
               RulePolynomial::from_truth_table(3, t2)};
    return m;
}

SelectionModel model_entry_game() {
    // Events: S1 = {pi1_m < 0}, S2 = {pi2_m < 0}, S3 = {pi1_d < 0},
    // S4 = {pi2_d < 0}, S5 = {selection draw picks firm 1}.
    const EventSet ev =
        EventSet::make({"mono1_neg", "mono2_neg", "duo1_neg", "duo2_neg", "pick_firm1"});
    const std::size_t n = 32;
    std::vector<int> none(n), one(n), both(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        const bool s1 = v & 1u, s2 = v & 2u, s3 = v & 4u, s4 = v & 8u, s5 = v & 16u;
        // only firm 1: pi1_m > 0 and (pi2_m < 0 or (pi2_d < 0 and selected))
        const bool firm1 = !s1 && (s2 || (s4 && s5));
        const bool firm2 = !s2 && (s1 || (s3 && !s5));
        const bool no_entry = s1 && s2;
        none[v] = no_entry ? 1 : 0;
        one[v] = (firm1 || firm2) ? 1 : 0;
        both[v] = (!no_entry && !firm1 && !firm2) ? 1 : 0;
    }
    SelectionModel m;
    m.events = ev;
    m.rules = {RulePolynomial::from_truth_table(5, none), RulePolynomial::from_truth_table(5, one),
               RulePolynomial::from_truth_table(5, both)};
    return m;
}

ThresholdComponent linear_component(int z_index, double z_lo, double z_hi, double q_lo,
                                    double q_hi) {
    ThresholdComponent c;
    c.kind = LinkKind::PiecewiseLinear;
    c.z_index = z_index;
    c.knots = {{z_lo, q_lo}, {z_hi, q_hi}};
    return c;
}

ThresholdComponent logistic_component(int z_index) {
    ThresholdComponent c;
    c.kind = LinkKind::Logistic;
    c.z_index = z_index;
    c.intercept = 0.0;
    c.slope = 1.0;
    c.range_lo = 0.02;
    c.range_hi = 0.98;
    return c;
}

InstrumentLaw uniform_instruments(int dim, double a, double b) {
    InstrumentLaw law;
    for (int c = 0; c < dim; ++c) law.components.push_back({false, a, b});
    return law;
}

} // namespace

SelectionModel builtin_model(const std::string& name) {
    if (name == "two_way_flows") return model_two_way_flows();
    if (name == "double_hurdle") return model_double_hurdle();
    if (name == "zero_index_example3") return model_zero_index();
    if (name == "entry_game") return model_entry_game();
    throw std::invalid_argument("unknown builtin model: " + name);
}

std::vector<std::string> builtin_dgp_names() {
    return {"two_way_flows", "double_hurdle", "zero_index_example3", "entry_game"};
}

DgpSpec builtin_dgp(const std::string& name) {
    DgpSpec spec;
    spec.name = name;
    spec.model = builtin_model(name);
    const int j = spec.model.rules.front().thresholds();
    const int k = spec.model.treatments();

    // Instruments uniform on (-4,4), one per threshold; linear maps put the
    // Q range tight on [0.02, 0.98] so estimation sees a uniform Q design.
    spec.instruments = uniform_instruments(j, -4.0, 4.0);
    spec.thresholds.z_dim = j;
    for (int c = 0; c < j; ++c)
        spec.thresholds.components.push_back(linear_component(c, -4.0, 4.0, 0.02, 0.98));

    spec.heterogeneity = JointHeterogeneity::independence(j);

    spec.outcomes.mu.clear();
    spec.outcomes.sigma.assign(k, 0.25);
    for (int kk = 0; kk < k; ++kk) {
        if (kk == 0) {
            spec.outcomes.mu.push_back(PolyInV::constant(0.0));
        } else if (kk == 1) {
            spec.outcomes.mu.push_back(PolyInV::coordinate_sum(j));
        } else {
            auto p = PolyInV::coordinate_sum(j);
            p.terms.push_back({0.5 * kk, {}});
            spec.outcomes.mu.push_back(p);
        }
    }
    spec.validate();
    return spec;
}

// --- sample persistence ------------------------------------------------------

void SampleSet::save(const std::string& path) const {
    ColumnarFile f;
    f.meta["j_dim"] = std::to_string(j_dim);
    f.meta["z_dim"] = std::to_string(z_dim);
    f.meta["k_count"] = std::to_string(k_count);
    f.meta["latent"] = has_latent ? "1" : "0";
    f.meta["n"] = std::to_string(size());
    f.columns = {"y", "d"};
    for (int c = 0; c < z_dim; ++c) f.columns.push_back("z" + std::to_string(c));
    if (has_latent) {
        for (int c = 0; c < j_dim; ++c) f.columns.push_back("v" + std::to_string(c));
        for (int c = 0; c < k_count; ++c) f.columns.push_back("yk" + std::to_string(c));
    }
    f.rows.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        std::vector<std::string> row;
        row.reserve(f.columns.size());
        row.push_back(format_g17(y[i]));
        row.push_back(std::to_string(d[i]));
        for (int c = 0; c < z_dim; ++c) row.push_back(format_g17(z[i * z_dim + c]));
        if (has_latent) {
            for (int c = 0; c < j_dim; ++c) row.push_back(format_g17(v[i * j_dim + c]));
            for (int c = 0; c < k_count; ++c) row.push_back(format_g17(yk[i * k_count + c]));
        }
        f.rows.push_back(std::move(row));
    }
    write_file(path, f.serialize("mtid-samples v1"));
}

SampleSet SampleSet::load(const std::string& path) {
    const auto f = ColumnarFile::parse(read_file(path), "mtid-samples v1");
    SampleSet s;
    s.j_dim = std::stoi(f.meta.at("j_dim"));
    s.z_dim = std::stoi(f.meta.at("z_dim"));
    s.k_count = std::stoi(f.meta.at("k_count"));
    s.has_latent = f.meta.at("latent") == "1";
    const std::size_t n = std::stoul(f.meta.at("n"));
    if (f.rows.size() != n) throw std::runtime_error("sample file: row count mismatch");
    s.y.resize(n);
    s.d.resize(n);
    s.z.resize(n * s.z_dim);
    if (s.has_latent) {
        s.v.resize(n * s.j_dim);
        s.yk.resize(n * s.k_count);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = f.rows[i];
        std::size_t c = 0;
        s.y[i] = parse_double(row.at(c++));
        s.d[i] = std::stoi(row.at(c++));
        for (int zc = 0; zc < s.z_dim; ++zc) s.z[i * s.z_dim + zc] = parse_double(row.at(c++));
        if (s.has_latent) {
            for (int j = 0; j < s.j_dim; ++j) s.v[i * s.j_dim + j] = parse_double(row.at(c++));
            for (int kk = 0; kk < s.k_count; ++kk)
                s.yk[i * s.k_count + kk] = parse_double(row.at(c++));
        }
    }
    return s;
}

} // namespace mtid
