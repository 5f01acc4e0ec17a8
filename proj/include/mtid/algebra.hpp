#ifndef MTID_ALGEBRA_HPP
#define MTID_ALGEBRA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mtid/distributions.hpp"

namespace mtid {

/// The J threshold-crossing events S_j = 1(V_j < Q_j(Z)).
struct EventSet {
    int count = 0;
    std::vector<std::string> labels;

    static EventSet make(int j);
    static EventSet make(std::vector<std::string> labels);
};

/// Multilinear 0/1-valued polynomial sum_l c_l prod_{j in l} S_j.
/// Subsets are J-bit masks; coefficients are exact integers, stored densely.
class RulePolynomial {
public:
    /// Unique coefficients from a 2^J truth table (Moebius inversion).
    static RulePolynomial from_truth_table(int j, const std::vector<int>& table);
    /// From explicit coefficients; verifies the 0/1-valued invariant.
    static RulePolynomial from_coefficients(int j, std::vector<long long> coeffs);

    int thresholds() const { return j_; }
    long long coeff(std::uint32_t subset) const { return coeffs_[subset]; }
    const std::vector<long long>& coefficients() const { return coeffs_; }

    /// Value at a vertex of {0,1}^J (bit j of `vertex` is S_j).
    int value(std::uint32_t vertex) const { return static_cast<int>(table_[vertex]); }
    std::vector<int> truth_table() const;

    bool is_constant() const;
    /// Set of threshold indices the rule actually depends on (bit mask).
    std::uint32_t support() const;

    /// Partial difference in S_j, evaluated at a vertex (the bit j of the
    /// vertex is ignored). Equals dD/dS_j for the multilinear extension.
    long long gradient(int j, std::uint32_t vertex) const;

    RulePolynomial operator+(const RulePolynomial& o) const;

private:
    RulePolynomial() = default;
    int j_ = 0;
    std::vector<long long> coeffs_;  // size 2^J, index = subset mask
    std::vector<long long> table_;   // vertex values (zeta transform of coeffs)
};

struct IndexDegree {
    long long index;  // coefficient on the full product S_1...S_J
    int degree;       // largest |l| with c_l != 0
};

/// Index and degree of a non-constant rule. Throws on constant rules
/// (they violate the positivity part of the selection assumption).
IndexDegree index_and_degree(const RulePolynomial& rule);

/// All subsets l with |l| == degree and c_l != 0.
std::vector<std::uint32_t> leading_subsets(const RulePolynomial& rule);

/// K exclusive, exhaustive treatment rules over a shared event set.
struct SelectionModel {
    EventSet events;
    std::vector<RulePolynomial> rules;

    int treatments() const { return static_cast<int>(rules.size()); }
    /// The unique k with rule_k(vertex) = 1; requires a valid partition.
    int assign(std::uint32_t vertex) const;
};

struct PartitionReport {
    struct Violation {
        std::uint32_t vertex;
        long long sum;
    };
    bool ok = true;
    std::vector<Violation> violations;
    /// Treatments whose rule never attains 1 (positivity failure at the
    /// vertex level).
    std::vector<int> empty_treatments;
};

PartitionReport check_partition(const SelectionModel& model);

enum class FlowVerdict {
    OneWayDirectionsExist,
    AlwaysTwoWay,
    ConstantRule,
    UnclassifiedByTheorem,
};

const char* verdict_name(FlowVerdict v);

struct FlowClassification {
    FlowVerdict verdict = FlowVerdict::ConstantRule;
    /// For OneWayDirectionsExist: threshold-change signs (+1/0/-1 per j)
    /// along which flows are one-way.
    std::vector<int> oneway_direction;
    /// For AlwaysTwoWay: a coordinate whose gradient takes both signs, and
    /// two vertices witnessing the opposite-signed changes.
    int twoway_component = -1;
    std::uint32_t vertex_positive = 0;
    std::uint32_t vertex_negative = 0;
};

/// Theorem-based classification from the signs of the partial differences
/// dD/dS_j over the vertex cube. Rules whose gradient pattern matches
/// neither case are handed to the brute-force oracle.
FlowClassification classify_flows(const RulePolynomial& rule);

struct FlowMass {
    double inflow = 0.0;   // Pr(0 -> 1), divided by epsilon in the MC version
    double outflow = 0.0;  // Pr(1 -> 0)
};

/// Monte Carlo flow rates between Q and Q + eps*dQ for every treatment.
std::vector<FlowMass> brute_force_flows(const SelectionModel& model,
                                        const std::vector<double>& q,
                                        const std::vector<double>& dq, double eps,
                                        const JointHeterogeneity& het, std::size_t n,
                                        std::uint64_t seed);

/// Exact flow masses between two threshold vectors by enumerating the 3^J
/// cells cut out by the coordinate pairs (min, max). Requires a closed-form
/// CDF on the heterogeneity law.
std::vector<FlowMass> exact_flows(const SelectionModel& model, const std::vector<double>& q,
                                  const std::vector<double>& q2,
                                  const JointHeterogeneity& het);

struct MonotonicityOptions {
    bool force_monte_carlo = false;
    std::size_t mc_draws = 200000;
    std::uint64_t seed = 1;
    double mc_tolerance_se = 3.0;  // flows below this many MC SEs count as zero
};

/// Per-treatment unordered-monotonicity between threshold vectors q and q2:
/// true iff at most one directed flow is (significantly) nonzero.
std::vector<bool> unordered_monotonicity_check(const SelectionModel& model,
                                               const std::vector<double>& q,
                                               const std::vector<double>& q2,
                                               const JointHeterogeneity& het,
                                               const MonotonicityOptions& opt = {});

struct ParseError : std::runtime_error {
    std::size_t position;
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg), position(pos) {}
};

/// Boolean expression over event labels: AND / OR / NOT, parentheses.
RulePolynomial parse_rule_expression(const std::string& text, const EventSet& events);

} // namespace mtid

#endif
