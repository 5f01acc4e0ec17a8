#include "mtid/algebra.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace mtid {

namespace {
constexpr int kMaxThresholds = 16;

void check_j(int j) {
    if (j < 1 || j > kMaxThresholds)
        throw std::invalid_argument("threshold count must be in [1,16]");
}
} // namespace

EventSet EventSet::make(int j) {
    check_j(j);
    EventSet e;
    e.count = j;
    for (int i = 0; i < j; ++i) e.labels.push_back("S" + std::to_string(i + 1));
    return e;
}

EventSet EventSet::make(std::vector<std::string> labels) {
    check_j(static_cast<int>(labels.size()));
    for (std::size_t a = 0; a < labels.size(); ++a)
        for (std::size_t b = a + 1; b < labels.size(); ++b)
            if (labels[a] == labels[b])
                throw std::invalid_argument("event labels must be distinct");
    EventSet e;
    e.count = static_cast<int>(labels.size());
    e.labels = std::move(labels);
    return e;
}

RulePolynomial RulePolynomial::from_truth_table(int j, const std::vector<int>& table) {
    check_j(j);
    const std::size_t n = std::size_t{1} << j;
    if (table.size() != n)
        throw std::invalid_argument("truth table must have exactly 2^J entries");
    for (int t : table)
        if (t != 0 && t != 1)
            throw std::invalid_argument("truth table entries must be 0 or 1");

    RulePolynomial r;
    r.j_ = j;
    r.table_.assign(table.begin(), table.end());
    // subset Moebius transform: c_l = sum_{m subset of l} (-1)^{|l|-|m|} table[m]
    r.coeffs_.assign(table.begin(), table.end());
    for (std::size_t bit = 1; bit < n; bit <<= 1)
        for (std::size_t m = 0; m < n; ++m)
            if (m & bit) r.coeffs_[m] -= r.coeffs_[m ^ bit];
    return r;
}

RulePolynomial RulePolynomial::from_coefficients(int j, std::vector<long long> coeffs) {
    check_j(j);
    const std::size_t n = std::size_t{1} << j;
    if (coeffs.size() != n)
        throw std::invalid_argument("coefficient vector must have exactly 2^J entries");
    RulePolynomial r;
    r.j_ = j;
    r.coeffs_ = std::move(coeffs);
    // zeta transform gives vertex values
    r.table_ = r.coeffs_;
    for (std::size_t bit = 1; bit < n; bit <<= 1)
        for (std::size_t m = 0; m < n; ++m)
            if (m & bit) r.table_[m] += r.table_[m ^ bit];
    for (long long v : r.table_)
        if (v != 0 && v != 1)
            throw std::invalid_argument("coefficients do not define a 0/1-valued rule");
    return r;
}

std::vector<int> RulePolynomial::truth_table() const {
    std::vector<int> t(table_.size());
    for (std::size_t i = 0; i < table_.size(); ++i) t[i] = static_cast<int>(table_[i]);
    return t;
}

bool RulePolynomial::is_constant() const {
    for (std::size_t i = 1; i < coeffs_.size(); ++i)
        if (coeffs_[i] != 0) return false;
    return true;
}

std::uint32_t RulePolynomial::support() const {
    std::uint32_t s = 0;
    for (std::size_t m = 1; m < coeffs_.size(); ++m)
        if (coeffs_[m] != 0) s |= static_cast<std::uint32_t>(m);
    return s;
}

long long RulePolynomial::gradient(int j, std::uint32_t vertex) const {
    const std::uint32_t bit = 1u << j;
    return table_[vertex | bit] - table_[vertex & ~bit];
}

RulePolynomial RulePolynomial::operator+(const RulePolynomial& o) const {
    if (j_ != o.j_) throw std::invalid_argument("rule sum: mismatched event sets");
    RulePolynomial r;
    r.j_ = j_;
    r.coeffs_.resize(coeffs_.size());
    r.table_.resize(table_.size());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        r.coeffs_[i] = coeffs_[i] + o.coeffs_[i];
        r.table_[i] = table_[i] + o.table_[i];
    }
    return r;
}

IndexDegree index_and_degree(const RulePolynomial& rule) {
    if (rule.is_constant())
        throw std::domain_error(
            "rule is constant: treatment would have probability 0 or 1, "
            "violating the positivity requirement");
    int degree = 0;
    for (std::size_t m = 1; m < rule.coefficients().size(); ++m)
        if (rule.coefficients()[m] != 0)
            degree = std::max(degree, std::popcount(static_cast<std::uint32_t>(m)));
    const std::uint32_t full = (1u << rule.thresholds()) - 1u;
    return IndexDegree{rule.coeff(full), degree};
}

std::vector<std::uint32_t> leading_subsets(const RulePolynomial& rule) {
    const auto id = index_and_degree(rule);
    std::vector<std::uint32_t> out;
    for (std::size_t m = 1; m < rule.coefficients().size(); ++m)
        if (rule.coefficients()[m] != 0 &&
            std::popcount(static_cast<std::uint32_t>(m)) == id.degree)
            out.push_back(static_cast<std::uint32_t>(m));
    return out;
}

int SelectionModel::assign(std::uint32_t vertex) const {
    for (int k = 0; k < treatments(); ++k)
        if (rules[k].value(vertex) == 1) return k;
    throw std::logic_error("selection model: no treatment attained at vertex (invalid partition)");
}

PartitionReport check_partition(const SelectionModel& model) {
    PartitionReport rep;
    if (model.rules.empty()) {
        rep.ok = false;
        return rep;
    }
    const int j = model.rules.front().thresholds();
    const std::size_t n = std::size_t{1} << j;
    std::vector<bool> attained(model.rules.size(), false);
    for (std::size_t v = 0; v < n; ++v) {
        long long sum = 0;
        for (std::size_t k = 0; k < model.rules.size(); ++k) {
            const int val = model.rules[k].value(static_cast<std::uint32_t>(v));
            sum += val;
            if (val == 1) attained[k] = true;
        }
        if (sum != 1)
            rep.violations.push_back({static_cast<std::uint32_t>(v), sum});
    }
    for (std::size_t k = 0; k < attained.size(); ++k)
        if (!attained[k]) rep.empty_treatments.push_back(static_cast<int>(k));
    rep.ok = rep.violations.empty() && rep.empty_treatments.empty();
    return rep;
}

const char* verdict_name(FlowVerdict v) {
    switch (v) {
        case FlowVerdict::OneWayDirectionsExist: return "ONE_WAY_DIRECTIONS_EXIST";
        case FlowVerdict::AlwaysTwoWay: return "ALWAYS_TWO_WAY";
        case FlowVerdict::ConstantRule: return "CONSTANT_RULE";
        case FlowVerdict::UnclassifiedByTheorem: return "UNCLASSIFIED_BY_THEOREM";
    }
    return "?";
}

FlowClassification classify_flows(const RulePolynomial& rule) {
    FlowClassification out;
    if (rule.is_constant()) {
        out.verdict = FlowVerdict::ConstantRule;
        return out;
    }
    const int j = rule.thresholds();
    const std::size_t n = std::size_t{1} << j;
    const std::uint32_t supp = rule.support();

    // Sign pattern of each partial difference over the vertex cube.
    std::vector<bool> has_pos(j, false), has_neg(j, false);
    std::vector<std::uint32_t> pos_at(j, 0), neg_at(j, 0);
    for (int c = 0; c < j; ++c) {
        if (!(supp & (1u << c))) continue;
        for (std::size_t v = 0; v < n; ++v) {
            const long long g = rule.gradient(c, static_cast<std::uint32_t>(v));
            if (g > 0 && !has_pos[c]) { has_pos[c] = true; pos_at[c] = static_cast<std::uint32_t>(v); }
            if (g < 0 && !has_neg[c]) { has_neg[c] = true; neg_at[c] = static_cast<std::uint32_t>(v); }
        }
    }

    int active = std::popcount(supp);
    if (active == 1) {
        // single-threshold rules are monotone outright
        out.verdict = FlowVerdict::OneWayDirectionsExist;
        out.oneway_direction.assign(j, 0);
        const int c = std::countr_zero(supp);
        out.oneway_direction[c] = has_pos[c] ? 1 : -1;
        return out;
    }

    bool all_constant_sign = true;
    bool all_both_signs = true;
    for (int c = 0; c < j; ++c) {
        if (!(supp & (1u << c))) continue;
        if (has_pos[c] && has_neg[c]) all_constant_sign = false;
        else all_both_signs = false;
    }

    if (all_constant_sign) {
        out.verdict = FlowVerdict::OneWayDirectionsExist;
        out.oneway_direction.assign(j, 0);
        for (int c = 0; c < j; ++c) {
            if (!(supp & (1u << c))) continue;
            out.oneway_direction[c] = has_pos[c] ? 1 : (has_neg[c] ? -1 : 0);
        }
        return out;
    }
    if (all_both_signs) {
        out.verdict = FlowVerdict::AlwaysTwoWay;
        for (int c = 0; c < j; ++c) {
            if ((supp & (1u << c)) && has_pos[c] && has_neg[c]) {
                out.twoway_component = c;
                out.vertex_positive = pos_at[c];
                out.vertex_negative = neg_at[c];
                break;
            }
        }
        return out;
    }
    // Mixed pattern: the gradient of some coordinate changes sign only with
    // other coordinates. The theorem's two cases do not cover this; defer to
    // the brute-force oracle.
    out.verdict = FlowVerdict::UnclassifiedByTheorem;
    return out;
}

namespace {

std::uint32_t vertex_from(const std::vector<double>& v, const std::vector<double>& q) {
    std::uint32_t s = 0;
    for (std::size_t j = 0; j < q.size(); ++j)
        if (v[j] < q[j]) s |= (1u << j);
    return s;
}

void check_interior(const std::vector<double>& q) {
    for (double x : q)
        if (!(x > 0.0 && x < 1.0))
            throw std::domain_error("threshold vector must be interior to (0,1)^J");
}

} // namespace

std::vector<FlowMass> brute_force_flows(const SelectionModel& model,
                                        const std::vector<double>& q,
                                        const std::vector<double>& dq, double eps,
                                        const JointHeterogeneity& het, std::size_t n,
                                        std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("brute_force_flows: n must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("brute_force_flows: degenerate epsilon");
    const int j = het.dim();
    if (static_cast<int>(q.size()) != j || static_cast<int>(dq.size()) != j)
        throw std::invalid_argument("brute_force_flows: dimension mismatch");
    std::vector<double> q2(q);
    for (int c = 0; c < j; ++c) q2[c] += eps * dq[c];
    check_interior(q);
    check_interior(q2);

    const int k = model.treatments();
    std::vector<std::size_t> in(k, 0), out(k, 0);
    Rng rng(derive_seed(seed, "brute-force-flows"));
    std::vector<double> v(j);
    for (std::size_t i = 0; i < n; ++i) {
        het.draw(rng, v.data());
        const std::uint32_t s0 = vertex_from(v, q);
        const std::uint32_t s1 = vertex_from(v, q2);
        if (s0 == s1) continue;
        for (int t = 0; t < k; ++t) {
            const int d0 = model.rules[t].value(s0);
            const int d1 = model.rules[t].value(s1);
            if (d0 == 0 && d1 == 1) ++in[t];
            if (d0 == 1 && d1 == 0) ++out[t];
        }
    }
    std::vector<FlowMass> res(k);
    for (int t = 0; t < k; ++t) {
        res[t].inflow = static_cast<double>(in[t]) / n / eps;
        res[t].outflow = static_cast<double>(out[t]) / n / eps;
    }
    return res;
}

std::vector<FlowMass> exact_flows(const SelectionModel& model, const std::vector<double>& q,
                                  const std::vector<double>& q2,
                                  const JointHeterogeneity& het) {
    const int j = het.dim();
    if (static_cast<int>(q.size()) != j || static_cast<int>(q2.size()) != j)
        throw std::invalid_argument("exact_flows: dimension mismatch");
    if (!het.closed_form_cdf())
        throw std::invalid_argument("exact_flows: heterogeneity law lacks a closed-form CDF");
    check_interior(q);
    check_interior(q2);

    const int k = model.treatments();
    std::vector<FlowMass> res(k);

    // Each coordinate splits [0,1] into three cells: below both thresholds,
    // between them, above both. Every cell maps to a fixed (S, S') pair.
    std::size_t cells = 1;
    for (int c = 0; c < j; ++c) cells *= 3;

    std::vector<double> lo(j), hi(j);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        std::size_t rest = cell;
        std::uint32_t s0 = 0, s1 = 0;
        bool empty = false;
        for (int c = 0; c < j; ++c) {
            const int cat = static_cast<int>(rest % 3);
            rest /= 3;
            const double mn = std::min(q[c], q2[c]);
            const double mx = std::max(q[c], q2[c]);
            switch (cat) {
                case 0:
                    lo[c] = 0.0; hi[c] = mn;
                    s0 |= (1u << c); s1 |= (1u << c);
                    break;
                case 1:
                    lo[c] = mn; hi[c] = mx;
                    if (mx <= mn) empty = true;
                    if (q[c] > q2[c]) s0 |= (1u << c);
                    else s1 |= (1u << c);
                    break;
                default:
                    lo[c] = mx; hi[c] = 1.0;
                    break;
            }
        }
        if (empty || s0 == s1) continue;
        const double mass = het.box_mass(lo, hi);
        if (mass <= 0.0) continue;
        for (int t = 0; t < k; ++t) {
            const int d0 = model.rules[t].value(s0);
            const int d1 = model.rules[t].value(s1);
            if (d0 == 0 && d1 == 1) res[t].inflow += mass;
            if (d0 == 1 && d1 == 0) res[t].outflow += mass;
        }
    }
    return res;
}

std::vector<bool> unordered_monotonicity_check(const SelectionModel& model,
                                               const std::vector<double>& q,
                                               const std::vector<double>& q2,
                                               const JointHeterogeneity& het,
                                               const MonotonicityOptions& opt) {
    const int k = model.treatments();
    std::vector<bool> res(k);
    if (het.closed_form_cdf() && !opt.force_monte_carlo) {
        const auto flows = exact_flows(model, q, q2, het);
        for (int t = 0; t < k; ++t)
            res[t] = std::min(flows[t].inflow, flows[t].outflow) <= 1e-12;
        return res;
    }
    // Monte Carlo fallback: flows below a few standard errors count as zero.
    std::vector<double> dq(q.size());
    for (std::size_t c = 0; c < q.size(); ++c) dq[c] = q2[c] - q[c];
    const auto flows = brute_force_flows(model, q, dq, 1.0, het, opt.mc_draws, opt.seed);
    for (int t = 0; t < k; ++t) {
        const double tol = opt.mc_tolerance_se *
                           std::sqrt(std::max(flows[t].inflow, flows[t].outflow) /
                                     static_cast<double>(opt.mc_draws)) +
                           opt.mc_tolerance_se / static_cast<double>(opt.mc_draws);
        res[t] = std::min(flows[t].inflow, flows[t].outflow) <= tol;
    }
    return res;
}

// --- boolean expression parser (AND / OR / NOT over event labels) ----------

namespace {

struct Parser {
    const std::string& text;
    const EventSet& events;
    std::size_t pos = 0;

    explicit Parser(const std::string& t, const EventSet& e) : text(t), events(e) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }

    std::string peek_word() {
        skip_ws();
        std::size_t p = pos;
        std::string w;
        while (p < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_'))
            w += text[p++];
        return w;
    }

    std::string take_word() {
        std::string w = peek_word();
        pos += w.size();
        return w;
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    // truth table over 2^J vertices, entries 0/1
    std::vector<int> parse_or() {
        auto lhs = parse_and();
        for (;;) {
            skip_ws();
            std::string w = peek_word();
            if (w == "OR" || w == "or") {
                take_word();
                auto rhs = parse_and();
                for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] = lhs[i] | rhs[i];
            } else {
                return lhs;
            }
        }
    }

    std::vector<int> parse_and() {
        auto lhs = parse_unary();
        for (;;) {
            skip_ws();
            std::string w = peek_word();
            if (w == "AND" || w == "and") {
                take_word();
                auto rhs = parse_unary();
                for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] = lhs[i] & rhs[i];
            } else {
                return lhs;
            }
        }
    }

    std::vector<int> parse_unary() {
        skip_ws();
        std::string w = peek_word();
        if (w == "NOT" || w == "not") {
            take_word();
            auto t = parse_unary();
            for (auto& x : t) x = 1 - x;
            return t;
        }
        return parse_atom();
    }

    std::vector<int> parse_atom() {
        skip_ws();
        if (pos < text.size() && text[pos] == '(') {
            ++pos;
            auto t = parse_or();
            skip_ws();
            if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
            ++pos;
            return t;
        }
        std::string w = take_word();
        if (w.empty()) fail("expected event name, NOT, or '('");
        if (w == "AND" || w == "OR" || w == "and" || w == "or")
            fail("operator '" + w + "' where an operand was expected");
        for (int j = 0; j < events.count; ++j) {
            if (events.labels[j] == w) {
                const std::size_t n = std::size_t{1} << events.count;
                std::vector<int> t(n, 0);
                for (std::size_t v = 0; v < n; ++v)
                    if (v & (1u << j)) t[v] = 1;
                return t;
            }
        }
        fail("unknown event '" + w + "'");
    }
};

} // namespace

RulePolynomial parse_rule_expression(const std::string& text, const EventSet& events) {
    Parser p(text, events);
    auto table = p.parse_or();
    if (!p.at_end()) p.fail("unexpected trailing input");
    return RulePolynomial::from_truth_table(events.count, table);
}

} // namespace mtid
