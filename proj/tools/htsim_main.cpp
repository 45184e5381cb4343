// htsim: forward-link capacity simulator for a multibeam satellite with an
// optical feeder link. Subcommands mirror the pipeline stages: `feeder` and
// `userlink` evaluate one hop, `e2e` combines them, `sweep` writes the CSV
// grid, `validate` runs the model-validation suite.
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error.

#include "htsim/capacity.hpp"
#include "htsim/scenario.hpp"
#include "htsim/sweep.hpp"
#include "htsim/validate.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace htsim;

struct CommonOpts {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    long samples = 0;
    std::string output;
    std::string scheme = "proposed";
    std::string preset;
};

ScenarioConfig load(const CommonOpts& o) {
    ScenarioConfig cfg = load_scenario(o.config);
    if (o.seed_set) cfg.sweep.seed = o.seed;
    if (o.samples > 0) cfg.sweep.mc_samples = o.samples;
    return cfg;
}

void apply_turbulence_preset(ScenarioConfig& cfg, const std::string& name) {
    auto it = turbulence_presets().find(name);
    if (it == turbulence_presets().end())
        throw ConfigError("--preset: unknown turbulence preset '" + name + "'");
    for (std::size_t i = 0; i < cfg.feeder.gateways.size(); ++i) {
        cfg.feeder.gateways[i].turbulence = it->second;
        cfg.feeder_presets[i] = name;
    }
}

void apply_shadowing_preset(ScenarioConfig& cfg, const std::string& name) {
    auto it = shadowing_presets().find(name);
    if (it == shadowing_presets().end())
        throw ConfigError("--preset: unknown shadowing preset '" + name + "'");
    cfg.userlink.fading = it->second;
    cfg.userlink.fading_preset = name;
}

BeamformerSet make_scheme(const ScenarioConfig& cfg, const BfProblem& prob,
                          const std::string& scheme, const RngStream& rng) {
    if (scheme == "zf") return baseline_bf(prob, BaselineKind::zero_forcing);
    if (scheme == "slnr") return baseline_bf(prob, BaselineKind::slnr);
    if (scheme != "proposed")
        throw ConfigError("--scheme: expected proposed, zf or slnr");

    AlgorithmConfig algo = cfg.algorithm;
    algo.sinr_threshold = cfg.userlink.sinr_threshold;
    long round = 0;
    FeedbackFn feedback = [&, rng](int user, const Eigen::MatrixXcd& weights,
                                   const std::vector<int>& active) mutable {
        auto eng = rng.substream(round++).make_engine();
        const int K = prob.n_users();
        std::vector<Eigen::VectorXcd> h(K);
        for (int k : active)
            h[k] = build_channel(eng, cfg.userlink.geometry, cfg.userlink.fading, k);
        Eigen::VectorXd pw = Eigen::VectorXd::Zero(K);
        for (int k : active) pw(k) = prob.power(k);
        return instantaneous_sinr(h, weights, pw, prob.noise, user);
    };
    return run_algorithm1(prob, algo, feedback);
}

int cmd_feeder(const CommonOpts& o) {
    ScenarioConfig cfg = load(o);
    if (!o.preset.empty()) apply_turbulence_preset(cfg, o.preset);
    const FeederCapacityResult cf = feeder_capacity(cfg.feeder, cfg.quadrature);
    const McEstimate mc =
        feeder_capacity_mc({cfg.sweep.seed, 1}, cfg.feeder, cfg.sweep.mc_samples);
    std::printf("c1_cf=%.10g c1_mc=%.10g c1_mc_se=%.3g order=%d convergence=%.3g\n",
                cf.value, mc.mean, mc.std_error, cf.order, cf.convergence_estimate);
    return 0;
}

int cmd_userlink(const CommonOpts& o) {
    ScenarioConfig cfg = load(o);
    if (!o.preset.empty()) apply_shadowing_preset(cfg, o.preset);
    const BfProblem prob = cfg.userlink.problem();
    const BeamformerSet bf = make_scheme(cfg, prob, o.scheme, {cfg.sweep.seed, 2});
    const auto inputs =
        capacity_user_inputs(prob, bf, cfg.userlink.fading, cfg.userlink.sinr_threshold);
    const UserLinkCapacity cf = user_link_capacity(inputs);
    const McEstimate mc =
        user_link_capacity_mc({cfg.sweep.seed, 3}, prob, bf, cfg.userlink.fading,
                              cfg.userlink.sinr_threshold, cfg.sweep.mc_samples);
    std::printf("scheme=%s c2_cf=%.10g c2_mc=%.10g c2_mc_se=%.3g selected=%zu "
                "iterations=%d converged=%d\n",
                o.scheme.c_str(), cf.total, mc.mean, mc.std_error, bf.selected.size(),
                bf.iterations, bf.converged ? 1 : 0);
    for (std::size_t i = 0; i < inputs.size(); ++i)
        std::printf("user=%d c2_cf_user=%.10g feasible=%d\n", inputs[i].user,
                    cf.per_user[i], inputs[i].feasible ? 1 : 0);
    return 0;
}

int cmd_e2e(const CommonOpts& o) {
    ScenarioConfig cfg = load(o);
    const FeederCapacityResult c1 = feeder_capacity(cfg.feeder, cfg.quadrature);
    const BfProblem prob = cfg.userlink.problem();
    const BeamformerSet bf = make_scheme(cfg, prob, o.scheme, {cfg.sweep.seed, 2});
    const auto inputs =
        capacity_user_inputs(prob, bf, cfg.userlink.fading, cfg.userlink.sinr_threshold);
    const UserLinkCapacity c2 = user_link_capacity(inputs);
    const CapacityResult r = end_to_end_capacity(c1.value, c2.total);
    std::printf("scheme=%s c1=%.10g c2=%.10g c=%.10g\n", o.scheme.c_str(), r.c1, r.c2,
                r.c);
    return 0;
}

int cmd_sweep(const CommonOpts& o) {
    ScenarioConfig cfg = load(o);
    const std::string out = o.output.empty() ? "sweep.csv" : o.output;
    const auto rows = run_sweep_to_file(cfg, out);
    std::printf("rows=%zu output=%s\n", rows.size(), out.c_str());
    return 0;
}

int cmd_validate(const CommonOpts& o) {
    ScenarioConfig cfg = load(o);
    const auto results = validate_models(cfg);
    bool ok;
    if (!o.output.empty()) {
        std::ofstream f(o.output);
        ok = write_report(results, f);
        write_report(results, std::cout);
    } else {
        ok = write_report(results, std::cout);
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"forward-link capacity simulator (FSO feeder + multibeam RF user link)"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto add_common = [&](CLI::App* sub, bool with_scheme) {
        sub->add_option("--config", opts.config, "scenario config (JSON)")->required();
        sub->add_option("--seed", opts.seed, "RNG seed override")
            ->each([&](const std::string&) { opts.seed_set = true; });
        sub->add_option("--samples", opts.samples, "Monte Carlo sample count override");
        sub->add_option("--output", opts.output, "output file path");
        sub->add_option("--preset", opts.preset, "parameter preset override");
        if (with_scheme)
            sub->add_option("--scheme", opts.scheme, "beamforming scheme")
                ->check(CLI::IsMember({"proposed", "zf", "slnr"}));
    };

    auto* feeder = app.add_subcommand("feeder", "feeder-link ergodic capacity");
    add_common(feeder, false);
    auto* userlink = app.add_subcommand("userlink", "user-link ergodic capacity");
    add_common(userlink, true);
    auto* e2e = app.add_subcommand("e2e", "end-to-end capacity min(C1, C2)");
    add_common(e2e, true);
    auto* sweep = app.add_subcommand("sweep", "capacity sweep over a power grid (CSV)");
    add_common(sweep, false);
    auto* validate = app.add_subcommand("validate", "run the model-validation suite");
    add_common(validate, false);

    try {
        app.parse(argc, argv);
        if (feeder->parsed()) return cmd_feeder(opts);
        if (userlink->parsed()) return cmd_userlink(opts);
        if (e2e->parsed()) return cmd_e2e(opts);
        if (sweep->parsed()) return cmd_sweep(opts);
        if (validate->parsed()) return cmd_validate(opts);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const htsim::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
