#include "mtid/config.hpp"

#include <stdexcept>

#include "mtid/io.hpp"

namespace mtid {

using nlohmann::json;

namespace {

json heterogeneity_to_json(const JointHeterogeneity& h) {
    json j;
    switch (h.kind()) {
        case JointHeterogeneity::Kind::Independence:
            j["family"] = "independence";
            j["dim"] = h.dim();
            break;
        case JointHeterogeneity::Kind::Archimedean:
            j["family"] = family_name(h.generator().family);
            j["theta"] = h.generator().theta;
            break;
        case JointHeterogeneity::Kind::GaussianCopula: {
            j["family"] = "gaussian";
            const auto& r = h.correlation();
            json rows = json::array();
            for (int a = 0; a < r.rows(); ++a) {
                json row = json::array();
                for (int b = 0; b < r.cols(); ++b) row.push_back(r(a, b));
                rows.push_back(row);
            }
            j["correlation"] = rows;
            break;
        }
        case JointHeterogeneity::Kind::LinearIndex:
            throw std::runtime_error("linear-index laws have no config serialization");
    }
    return j;
}

JointHeterogeneity heterogeneity_from_json(const json& j, int default_dim) {
    const std::string family = j.value("family", "independence");
    if (family == "independence") return JointHeterogeneity::independence(j.value("dim", default_dim));
    if (family == "gaussian") {
        if (j.contains("correlation")) {
            const auto& rows = j.at("correlation");
            const int d = static_cast<int>(rows.size());
            Eigen::MatrixXd r(d, d);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) r(a, b) = rows.at(a).at(b).get<double>();
            return JointHeterogeneity::gaussian(r);
        }
        // equicorrelation shortcut
        const int d = j.value("dim", default_dim);
        const double rho = j.at("rho").get<double>();
        Eigen::MatrixXd r = Eigen::MatrixXd::Constant(d, d, rho);
        for (int a = 0; a < d; ++a) r(a, a) = 1.0;
        return JointHeterogeneity::gaussian(r);
    }
    GeneratorSpec g{family_from_name(family), j.value("theta", 0.0)};
    return JointHeterogeneity::archimedean(g);
}

json thresholds_to_json(const ThresholdMap& t) {
    json arr = json::array();
    for (const auto& c : t.components) {
        json jc;
        jc["z_index"] = c.z_index;
        switch (c.kind) {
            case LinkKind::Logistic:
                jc["kind"] = "logistic";
                break;
            case LinkKind::ProbitCdf:
                jc["kind"] = "probit";
                break;
            case LinkKind::PiecewiseLinear:
                jc["kind"] = "piecewise";
                break;
        }
        if (c.kind == LinkKind::PiecewiseLinear) {
            json kn = json::array();
            for (const auto& [z, q] : c.knots) kn.push_back({z, q});
            jc["knots"] = kn;
        } else {
            jc["intercept"] = c.intercept;
            jc["slope"] = c.slope;
            jc["range"] = {c.range_lo, c.range_hi};
        }
        arr.push_back(jc);
    }
    json out;
    out["z_dim"] = t.z_dim;
    out["components"] = arr;
    return out;
}

ThresholdMap thresholds_from_json(const json& j) {
    ThresholdMap t;
    t.z_dim = j.at("z_dim").get<int>();
    for (const auto& jc : j.at("components")) {
        ThresholdComponent c;
        c.z_index = jc.at("z_index").get<int>();
        const std::string kind = jc.at("kind").get<std::string>();
        if (kind == "logistic") c.kind = LinkKind::Logistic;
        else if (kind == "probit") c.kind = LinkKind::ProbitCdf;
        else if (kind == "piecewise") c.kind = LinkKind::PiecewiseLinear;
        else throw std::invalid_argument("unknown threshold link kind: " + kind);
        if (c.kind == LinkKind::PiecewiseLinear) {
            for (const auto& kn : jc.at("knots"))
                c.knots.emplace_back(kn.at(0).get<double>(), kn.at(1).get<double>());
        } else {
            c.intercept = jc.value("intercept", 0.0);
            c.slope = jc.value("slope", 1.0);
            if (jc.contains("range")) {
                c.range_lo = jc.at("range").at(0).get<double>();
                c.range_hi = jc.at("range").at(1).get<double>();
            }
        }
        t.components.push_back(std::move(c));
    }
    return t;
}

json outcomes_to_json(const OutcomeModel& o) {
    json mus = json::array();
    for (const auto& p : o.mu) {
        json terms = json::array();
        for (const auto& t : p.terms) {
            json jt;
            jt["coef"] = t.coef;
            jt["expo"] = t.expo;
            terms.push_back(jt);
        }
        mus.push_back(terms);
    }
    json out;
    out["mu"] = mus;
    out["sigma"] = o.sigma;
    return out;
}

OutcomeModel outcomes_from_json(const json& j) {
    OutcomeModel o;
    for (const auto& terms : j.at("mu")) {
        PolyInV p;
        for (const auto& jt : terms) {
            PolyInV::Term t;
            t.coef = jt.at("coef").get<double>();
            if (jt.contains("expo")) t.expo = jt.at("expo").get<std::vector<int>>();
            p.terms.push_back(std::move(t));
        }
        o.mu.push_back(std::move(p));
    }
    o.sigma = j.at("sigma").get<std::vector<double>>();
    return o;
}

json instruments_to_json(const InstrumentLaw& law) {
    json arr = json::array();
    for (const auto& c : law.components) {
        json jc;
        jc["law"] = c.normal ? "normal" : "uniform";
        jc[c.normal ? "mean" : "a"] = c.a;
        jc[c.normal ? "sd" : "b"] = c.b;
        arr.push_back(jc);
    }
    return arr;
}

InstrumentLaw instruments_from_json(const json& j) {
    InstrumentLaw law;
    for (const auto& jc : j) {
        InstrumentLaw::Component c;
        c.normal = jc.at("law").get<std::string>() == "normal";
        c.a = c.normal ? jc.at("mean").get<double>() : jc.at("a").get<double>();
        c.b = c.normal ? jc.at("sd").get<double>() : jc.at("b").get<double>();
        law.components.push_back(c);
    }
    return law;
}

json rules_to_json(const SelectionModel& m) {
    json arr = json::array();
    for (const auto& r : m.rules) {
        json jr;
        jr["truth_table"] = r.truth_table();
        arr.push_back(jr);
    }
    return arr;
}

SelectionModel rules_from_json(const json& j, const EventSet& events) {
    SelectionModel m;
    m.events = events;
    for (const auto& jr : j.at("rules")) {
        if (jr.contains("truth_table")) {
            m.rules.push_back(RulePolynomial::from_truth_table(
                events.count, jr.at("truth_table").get<std::vector<int>>()));
        } else if (jr.contains("expression")) {
            m.rules.push_back(
                parse_rule_expression(jr.at("expression").get<std::string>(), events));
        } else if (jr.contains("builtin")) {
            throw std::invalid_argument("per-rule builtins are not supported; use dgp.builtin");
        } else {
            throw std::invalid_argument("rule needs a truth_table or an expression");
        }
    }
    return m;
}

Grid grid_from_json(const json& j) {
    if (j.contains("knots")) {
        std::vector<std::vector<double>> knots;
        for (const auto& kd : j.at("knots")) knots.push_back(kd.get<std::vector<double>>());
        return Grid(std::move(knots));
    }
    return Grid::uniform(j.at("lo").get<std::vector<double>>(),
                         j.at("hi").get<std::vector<double>>(),
                         j.at("points").get<std::vector<int>>());
}

} // namespace

json dgp_to_json(const DgpSpec& spec) {
    json j;
    if (!spec.name.empty()) j["builtin"] = spec.name;
    j["events"] = spec.model.events.labels;
    j["rules"] = rules_to_json(spec.model);
    j["heterogeneity"] = heterogeneity_to_json(spec.heterogeneity);
    j["thresholds"] = thresholds_to_json(spec.thresholds);
    j["outcomes"] = outcomes_to_json(spec.outcomes);
    j["instruments"] = instruments_to_json(spec.instruments);
    return j;
}

DgpSpec dgp_from_json(const json& j) {
    DgpSpec spec;
    if (j.contains("builtin")) {
        spec = builtin_dgp(j.at("builtin").get<std::string>());
    } else {
        const auto labels = j.at("events").get<std::vector<std::string>>();
        const EventSet events = EventSet::make(labels);
        spec.model = rules_from_json(j, events);
        spec.thresholds = thresholds_from_json(j.at("thresholds"));
        spec.outcomes = outcomes_from_json(j.at("outcomes"));
        spec.instruments = instruments_from_json(j.at("instruments"));
        spec.heterogeneity = heterogeneity_from_json(
            j.value("heterogeneity", json{{"family", "independence"}}), events.count);
    }
    // overrides on top of a builtin
    const int jd = spec.model.rules.empty() ? 1 : spec.model.rules.front().thresholds();
    if (j.contains("builtin")) {
        if (j.contains("heterogeneity"))
            spec.heterogeneity = heterogeneity_from_json(j.at("heterogeneity"), jd);
        if (j.contains("thresholds")) spec.thresholds = thresholds_from_json(j.at("thresholds"));
        if (j.contains("outcomes")) spec.outcomes = outcomes_from_json(j.at("outcomes"));
        if (j.contains("instruments"))
            spec.instruments = instruments_from_json(j.at("instruments"));
    }
    spec.validate();
    return spec;
}

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    cfg.raw = j;
    cfg.dgp = dgp_from_json(j.at("dgp"));

    const auto& run = j.at("run");
    if (!run.contains("seed"))
        throw std::invalid_argument("config: run.seed is mandatory");
    cfg.seed = run.at("seed").get<std::uint64_t>();
    cfg.n = run.value("n", std::size_t{100000});
    const std::string mode = run.value("mode", "estimation");
    if (mode == "oracle") cfg.mode = Mode::Oracle;
    else if (mode == "estimation") cfg.mode = Mode::Estimation;
    else throw std::invalid_argument("config: run.mode must be 'oracle' or 'estimation'");

    if (j.contains("grid")) cfg.v_grid = grid_from_json(j.at("grid"));
    if (j.contains("zgrid")) cfg.z_grid = grid_from_json(j.at("zgrid"));
    if (j.contains("bandwidth")) cfg.bandwidth = j.at("bandwidth").get<std::vector<double>>();
    cfg.poly_order = j.value("poly_order", 2);
    cfg.fd_step = j.value("fd_step", 1e-3);
    cfg.richardson = j.value("richardson", true);

    if (j.contains("transform")) {
        const auto& t = j.at("transform");
        const std::string kind = t.value("kind", "identity");
        if (kind == "identity") cfg.transform.kind = Transform::Identity;
        else if (kind == "indicator") {
            cfg.transform.kind = Transform::IndicatorLeq;
            cfg.transform.y = t.at("y").get<double>();
        } else {
            throw std::invalid_argument("config: unknown transform kind");
        }
    }

    if (j.contains("identify")) {
        const auto& idj = j.at("identify");
        cfg.identify_method = idj.value("method", "two_way");
        if (idj.contains("anchor")) cfg.anchor = idj.at("anchor").get<std::vector<double>>();
        if (idj.contains("c10") && !idj.at("c10").is_null())
            cfg.c10 = idj.at("c10").get<double>();
    }

    if (j.contains("aggregate")) {
        const auto& ag = j.at("aggregate");
        cfg.estimand = ag.value("estimand", "ate");
        cfg.treat_k = ag.value("k", 1);
        cfg.treat_l = ag.value("l", 0);
        cfg.policy_shift = ag.value("shift", 0.1);
        cfg.bound_y = ag.value("y", 1.0);
    }

    cfg.out_dir = j.value("out", "out");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return parse_config(json::parse(read_file(path)));
}

} // namespace mtid
