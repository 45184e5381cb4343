#include "htsim/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace htsim {

namespace {

using nlohmann::json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing required field");
    return *it;
}

double number(const json& obj, const std::string& path, const std::string& key) {
    const json& v = require(obj, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& path, const std::string& key,
                 double fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) fail(path + "." + key, "expected a number");
    return it->get<double>();
}

} // namespace

const std::map<std::string, MalagaParams>& turbulence_presets() {
    // (alpha, beta) severity pairs over a common unit-mean small-scale model
    static const std::map<std::string, MalagaParams> presets = {
        {"weak", MalagaParams{8.0, 4, 0.0376, 0.596, 0.9248, 0.0, std::numbers::pi / 2}},
        {"moderate",
         MalagaParams{4.2, 3, 0.0376, 0.596, 0.9248, 0.0, std::numbers::pi / 2}},
        {"strong",
         MalagaParams{2.296, 2, 0.0376, 0.596, 0.9248, 0.0, std::numbers::pi / 2}},
    };
    return presets;
}

const std::map<std::string, ShadowedRicianParams>& shadowing_presets() {
    static const std::map<std::string, ShadowedRicianParams> presets = {
        {"heavy", ShadowedRicianParams{1, 0.063, 8.97e-4}},
        {"average", ShadowedRicianParams{10, 0.126, 0.835}},
        {"overall", ShadowedRicianParams{5, 0.251, 0.279}},
        {"light", ShadowedRicianParams{19, 0.158, 1.29}},
    };
    return presets;
}

BfProblem UserLinkConfig::problem() const {
    BfProblem prob;
    prob.steering.resize(geometry.n_beams, geometry.n_users);
    for (int k = 0; k < geometry.n_users; ++k)
        prob.steering.col(k) = steering_vector(geometry, k).cast<std::complex<double>>();
    prob.power = power;
    prob.noise = noise;
    prob.common_interference_power = common_interference_power;
    prob.validate();
    return prob;
}

namespace {

MalagaParams parse_turbulence(const json& node, const std::string& path,
                              std::string* preset_name) {
    if (node.contains("turbulence_preset")) {
        const std::string name = node["turbulence_preset"].get<std::string>();
        auto it = turbulence_presets().find(name);
        if (it == turbulence_presets().end())
            fail(path + ".turbulence_preset", "unknown preset '" + name + "'");
        if (preset_name) *preset_name = name;
        return it->second;
    }
    if (!node.contains("turbulence"))
        fail(path, "need either turbulence_preset or turbulence");
    const json& t = node["turbulence"];
    const std::string tp = path + ".turbulence";
    MalagaParams p;
    p.alpha = number(t, tp, "alpha");
    const double beta = number(t, tp, "beta");
    if (beta != std::floor(beta) || beta < 1) fail(tp + ".beta", "must be a positive integer");
    p.beta = static_cast<int>(beta);
    p.b0 = number(t, tp, "b0");
    p.rho0 = number(t, tp, "rho0");
    p.Omega0 = number(t, tp, "omega0");
    p.phiA = number_or(t, tp, "phi_a_rad", 0.0);
    p.phiB = number_or(t, tp, "phi_b_rad", std::numbers::pi / 2);
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        fail(tp, e.what());
    }
    return p;
}

ShadowedRicianParams parse_shadowing(const json& node, const std::string& path,
                                     std::string* preset_name) {
    if (node.contains("shadowing_preset")) {
        const std::string name = node["shadowing_preset"].get<std::string>();
        auto it = shadowing_presets().find(name);
        if (it == shadowing_presets().end())
            fail(path + ".shadowing_preset", "unknown preset '" + name + "'");
        if (preset_name) *preset_name = name;
        return it->second;
    }
    if (!node.contains("shadowing"))
        fail(path, "need either shadowing_preset or shadowing");
    const json& s = node["shadowing"];
    const std::string sp = path + ".shadowing";
    ShadowedRicianParams p;
    const double m = number(s, sp, "m");
    if (m != std::floor(m) || m < 1) fail(sp + ".m", "must be a positive integer");
    p.m = static_cast<int>(m);
    p.b = number(s, sp, "b");
    p.Omega = number(s, sp, "omega");
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        fail(sp, e.what());
    }
    return p;
}

FeederConfig parse_feeder(const json& node, std::vector<std::string>* presets) {
    FeederConfig cfg;
    cfg.tx_power = db_to_linear(number(node, "feeder", "tx_power_dbw"));
    cfg.oe_coeff = number_or(node, "feeder", "oe_coeff", 0.8);
    cfg.noise_power = db_to_linear(number(node, "feeder", "noise_power_dbw"));
    const json& gws = require(node, "feeder", "gateways");
    if (!gws.is_array() || gws.empty() || gws.size() > 2)
        fail("feeder.gateways", "expected an array of 1 or 2 gateways");
    for (std::size_t i = 0; i < gws.size(); ++i) {
        const std::string path = "feeder.gateways[" + std::to_string(i) + "]";
        const json& g = gws[i];
        FsoGateway gw;
        gw.path.tx_gain = db_to_linear(number_or(g, path, "tx_gain_db", 0.0));
        gw.path.rx_gain = db_to_linear(number_or(g, path, "rx_gain_db", 0.0));
        gw.path.pointing = number_or(g, path, "pointing_loss", 1.0);
        gw.path.free_space = number_or(g, path, "free_space_loss", 1.0);
        std::string preset;
        gw.turbulence = parse_turbulence(g, path, &preset);
        presets->push_back(preset);
        try {
            gw.path.validate();
        } catch (const std::invalid_argument& e) {
            fail(path, e.what());
        }
        cfg.gateways.push_back(gw);
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        fail("feeder", e.what());
    }
    return cfg;
}

UserLinkConfig parse_userlink(const json& node) {
    const std::string path = "userlink";
    UserLinkConfig cfg;
    BeamGeometry& geom = cfg.geometry;

    const json& beams = require(node, path, "beam_centers_deg");
    const json& users = require(node, path, "user_positions_deg");
    if (!beams.is_array() || beams.empty()) fail(path + ".beam_centers_deg", "expected array");
    if (!users.is_array() || users.empty())
        fail(path + ".user_positions_deg", "expected array");
    geom.n_beams = static_cast<int>(beams.size());
    geom.n_users = static_cast<int>(users.size());
    geom.phi.resize(geom.n_users, geom.n_beams);
    auto point = [&](const json& arr, const std::string& p, std::size_t i) {
        const json& e = arr[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            fail(p + "[" + std::to_string(i) + "]", "expected [x_deg, y_deg]");
        return std::pair<double, double>(e[0].get<double>(), e[1].get<double>());
    };
    for (int k = 0; k < geom.n_users; ++k) {
        auto [ux, uy] = point(users, path + ".user_positions_deg", k);
        for (int n = 0; n < geom.n_beams; ++n) {
            auto [bx, by] = point(beams, path + ".beam_centers_deg", n);
            // planar angular coordinates seen from the satellite
            geom.phi(k, n) = deg_to_rad(std::hypot(ux - bx, uy - by));
        }
    }
    geom.phi_3db = deg_to_rad(number(node, path, "phi_3db_deg"));
    geom.g_max = db_to_linear(number(node, path, "g_max_db"));
    geom.rx_gain = db_to_linear(number(node, path, "rx_gain_db"));
    geom.carrier_hz = number(node, path, "carrier_ghz") * 1e9;
    const json& dist = require(node, path, "distance_km");
    geom.distance.assign(geom.n_users, 0.0);
    if (dist.is_number()) {
        std::fill(geom.distance.begin(), geom.distance.end(), dist.get<double>() * 1e3);
    } else if (dist.is_array() && static_cast<int>(dist.size()) == geom.n_users) {
        for (int k = 0; k < geom.n_users; ++k) geom.distance[k] = dist[k].get<double>() * 1e3;
    } else {
        fail(path + ".distance_km", "expected a number or one entry per user");
    }
    try {
        geom.validate();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }

    cfg.fading = parse_shadowing(node, path, &cfg.fading_preset);

    const json& pw = require(node, path, "tx_power_dbw");
    cfg.power.resize(geom.n_users);
    if (pw.is_number()) {
        cfg.power.setConstant(db_to_linear(pw.get<double>()));
    } else if (pw.is_array() && static_cast<int>(pw.size()) == geom.n_users) {
        for (int k = 0; k < geom.n_users; ++k)
            cfg.power(k) = db_to_linear(pw[k].get<double>());
    } else {
        fail(path + ".tx_power_dbw", "expected a number or one entry per user");
    }
    cfg.noise = db_to_linear(number(node, path, "noise_power_dbw"));
    if (node.contains("sinr_threshold_db"))
        cfg.sinr_threshold = db_to_linear(number(node, path, "sinr_threshold_db"));
    if (node.contains("per_user_interference_power"))
        cfg.common_interference_power = !node["per_user_interference_power"].get<bool>();
    return cfg;
}

AlgorithmConfig parse_algorithm(const json& root) {
    AlgorithmConfig cfg;
    if (!root.contains("algorithm")) return cfg;
    const json& a = root["algorithm"];
    cfg.epsilon = number_or(a, "algorithm", "epsilon", cfg.epsilon);
    cfg.max_iters = static_cast<int>(number_or(a, "algorithm", "max_iters", cfg.max_iters));
    if (a.contains("initializer")) {
        const std::string init = a["initializer"].get<std::string>();
        if (init == "matched-filter")
            cfg.initializer = AlgorithmConfig::Init::matched_filter;
        else if (init == "random-seeded")
            cfg.initializer = AlgorithmConfig::Init::random_seeded;
        else
            fail("algorithm.initializer", "expected matched-filter or random-seeded");
    }
    cfg.init_seed = static_cast<std::uint64_t>(
        number_or(a, "algorithm", "init_seed", static_cast<double>(cfg.init_seed)));
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        fail("algorithm", e.what());
    }
    return cfg;
}

SweepConfig parse_sweep(const json& root) {
    SweepConfig cfg;
    if (!root.contains("sweep")) return cfg;
    const json& s = root["sweep"];
    if (s.contains("variable")) cfg.variable = s["variable"].get<std::string>();
    if (cfg.variable != "userlink.tx_power_dbw" && cfg.variable != "feeder.tx_power_dbw")
        fail("sweep.variable", "expected userlink.tx_power_dbw or feeder.tx_power_dbw");
    if (s.contains("grid_dbw")) {
        if (!s["grid_dbw"].is_array() || s["grid_dbw"].empty())
            fail("sweep.grid_dbw", "expected a non-empty array");
        for (const auto& v : s["grid_dbw"]) cfg.grid_dbw.push_back(v.get<double>());
    }
    cfg.mc_samples = static_cast<long>(
        number_or(s, "sweep", "mc_samples", static_cast<double>(cfg.mc_samples)));
    if (cfg.mc_samples < 10000) fail("sweep.mc_samples", "must be >= 1e4");
    cfg.seed = static_cast<std::uint64_t>(
        number_or(s, "sweep", "seed", static_cast<double>(cfg.seed)));
    return cfg;
}

} // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    ScenarioConfig cfg;
    cfg.feeder = parse_feeder(require(root, "config", "feeder"), &cfg.feeder_presets);
    cfg.quadrature.order = static_cast<int>(
        number_or(root["feeder"], "feeder", "quadrature_order", 30.0));
    try {
        cfg.quadrature.validate();
    } catch (const std::invalid_argument& e) {
        fail("feeder.quadrature_order", e.what());
    }
    cfg.userlink = parse_userlink(require(root, "config", "userlink"));
    cfg.algorithm = parse_algorithm(root);
    cfg.algorithm.sinr_threshold = cfg.userlink.sinr_threshold;
    cfg.sweep = parse_sweep(root);
    if (cfg.sweep.grid_dbw.empty())
        cfg.sweep.grid_dbw = {0, 5, 10, 15, 20, 25, 30};
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

} // namespace htsim
