#ifndef MTID_CONFIG_HPP
#define MTID_CONFIG_HPP

#include <optional>
#include <string>

#include "json.hpp"
#include "mtid/dgp.hpp"
#include "mtid/grid.hpp"
#include "mtid/mte.hpp"

namespace mtid {

nlohmann::json dgp_to_json(const DgpSpec& spec);
DgpSpec dgp_from_json(const nlohmann::json& j);

/// Config-driven batch run: one mandatory master seed, a DGP block (builtin
/// name or full spec), run parameters and per-stage knobs.
struct ExperimentConfig {
    DgpSpec dgp;
    std::size_t n = 100000;
    std::uint64_t seed = 0;
    Mode mode = Mode::Estimation;

    Grid v_grid;                       // heterogeneity-space grid
    std::optional<Grid> z_grid;        // instrument-space grid for identify-q
    std::vector<double> bandwidth;
    int poly_order = 2;
    double fd_step = 1e-3;
    bool richardson = true;
    Transform transform;

    std::string identify_method = "two_way";
    std::vector<double> anchor;
    std::optional<double> c10;

    std::string estimand = "ate";
    int treat_k = 1;
    int treat_l = 0;
    double policy_shift = 0.1;
    double bound_y = 1.0;

    std::string out_dir = "out";
    nlohmann::json raw;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

} // namespace mtid

#endif
