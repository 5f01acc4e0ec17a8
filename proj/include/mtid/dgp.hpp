#ifndef MTID_DGP_HPP
#define MTID_DGP_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtid/algebra.hpp"
#include "mtid/distributions.hpp"

namespace mtid {

enum class LinkKind { Logistic, ProbitCdf, PiecewiseLinear };

/// One threshold map Q_j: a monotone map of a single designated instrument
/// coordinate into a range strictly inside (0,1).
struct ThresholdComponent {
    LinkKind kind = LinkKind::Logistic;
    int z_index = 0;
    // affine-then-link forms: range_lo + (range_hi-range_lo) * link(intercept + slope*z)
    double intercept = 0.0;
    double slope = 1.0;
    double range_lo = 0.02;
    double range_hi = 0.98;
    // piecewise-linear monotone form: (z, q) knots, q strictly increasing
    std::vector<std::pair<double, double>> knots;

    double eval(const std::vector<double>& z) const;
    void validate(int z_dim) const;
};

struct ThresholdMap {
    std::vector<ThresholdComponent> components;
    int z_dim = 0;

    int threshold_count() const { return static_cast<int>(components.size()); }
    std::vector<double> eval(const std::vector<double>& z) const;
    void validate() const;
};

/// Mean functions E[Y_k | V = v] as sparse polynomials in v, plus an
/// additive normal noise scale per treatment.
struct PolyInV {
    struct Term {
        double coef;
        std::vector<int> expo;  // one exponent per V coordinate
    };
    std::vector<Term> terms;

    double eval(const std::vector<double>& v) const;
    static PolyInV constant(double c);
    static PolyInV coordinate_sum(int dim);  // v_1 + ... + v_dim
};

struct OutcomeModel {
    std::vector<PolyInV> mu;     // one per treatment
    std::vector<double> sigma;   // noise sd per treatment
};

/// Product instrument law: each coordinate uniform(a,b) or normal(mean,sd).
struct InstrumentLaw {
    struct Component {
        bool normal = false;
        double a = 0.0;  // lo or mean
        double b = 1.0;  // hi or sd
    };
    std::vector<Component> components;

    int dim() const { return static_cast<int>(components.size()); }
    void draw(Rng& rng, double* out) const;
};

struct DgpSpec {
    JointHeterogeneity heterogeneity = JointHeterogeneity::independence(1);
    ThresholdMap thresholds;
    SelectionModel model;
    OutcomeModel outcomes;
    InstrumentLaw instruments;
    std::string name;  // builtin name when applicable

    void validate() const;
};

/// Simulated observations; the latent block (V and all potential outcomes)
/// is retained for oracle use and flagged as such.
struct SampleSet {
    int j_dim = 0;
    int z_dim = 0;
    int k_count = 0;
    bool has_latent = false;

    std::vector<double> y;
    std::vector<int> d;
    std::vector<double> z;   // n x z_dim row-major
    std::vector<double> v;   // n x j_dim (latent)
    std::vector<double> yk;  // n x k_count (latent potential outcomes)

    std::size_t size() const { return y.size(); }
    void strip_latent();

    void save(const std::string& path) const;
    static SampleSet load(const std::string& path);
};

/// Draw n records. Chunked seed derivation keeps the output independent of
/// any parallel scheduling.
SampleSet simulate(const DgpSpec& spec, std::size_t n, std::uint64_t seed);

/// Generalized propensity vector P_k(q) = Pr(D = k | Q(Z) = q), computed by
/// inclusion-exclusion from the heterogeneity CDF.
std::vector<double> true_propensity(const DgpSpec& spec, const std::vector<double>& q);

struct Transform {
    enum Kind { Identity, IndicatorLeq } kind = Identity;
    double y = 0.0;

    double apply(double value) const { return kind == Identity ? value : (value <= y ? 1.0 : 0.0); }
};

/// E[G(Y_k) - G(Y_l) | V = v] under the spec's outcome model.
double true_mte(const DgpSpec& spec, int k, int l, const std::vector<double>& v,
                const Transform& g = {});

/// E[G(Y_k) | V = v].
double true_counterfactual_mean(const DgpSpec& spec, int k, const std::vector<double>& v,
                                const Transform& g = {});

/// Built-in data-generating processes:
///   "two_way_flows"       K=3, J=2 model whose third treatment always has
///                         two-way flows
///   "double_hurdle"       binary treatment, both thresholds must be crossed
///   "zero_index_example3" J=3 partition whose first treatment has zero index
///   "entry_game"          J=5 market-entry model with a threshold
///                         equilibrium-selection draw
DgpSpec builtin_dgp(const std::string& name);
std::vector<std::string> builtin_dgp_names();

/// The selection models alone (same names).
SelectionModel builtin_model(const std::string& name);

} // namespace mtid

#endif
