#pragma once

#include "htsim/beamforming.hpp"
#include "htsim/channels.hpp"
#include "htsim/feeder.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace htsim {

// Configuration problem: message carries the offending field path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shipped parameter presets. Values follow the conventions widely used in
// the FSO and land-mobile-satellite literature; they are configuration
// defaults, not measurements. Turbulence presets share unit mean irradiance
// so capacities are comparable across severities.
const std::map<std::string, MalagaParams>& turbulence_presets();
const std::map<std::string, ShadowedRicianParams>& shadowing_presets();

struct UserLinkConfig {
    BeamGeometry geometry;
    ShadowedRicianParams fading;
    std::string fading_preset; // empty when custom parameters were given
    Eigen::VectorXd power;     // per-user transmit power (W)
    double noise = 1.0;        // W
    double sinr_threshold = 0; // linear
    bool common_interference_power = true;

    BfProblem problem() const;
};

struct SweepConfig {
    std::string variable = "userlink.tx_power_dbw";
    std::vector<double> grid_dbw;
    long mc_samples = 200000;
    std::uint64_t seed = 42;
};

struct ScenarioConfig {
    FeederConfig feeder;
    std::vector<std::string> feeder_presets; // per gateway, empty = custom
    QuadratureSpec quadrature;
    UserLinkConfig userlink;
    AlgorithmConfig algorithm;
    SweepConfig sweep;
};

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& json_text);

} // namespace htsim
