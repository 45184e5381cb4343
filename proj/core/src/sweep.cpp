#include "htsim/sweep.hpp"

#include "htsim/capacity.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <ostream>
#include <stdexcept>

namespace htsim {

const char* const kSweepCsvHeader =
    "swept_dbw,c1_cf,c1_mc,c1_mc_se,c1_single_cf,c1_single_mc,c1_single_mc_se,"
    "c2_cf_proposed,c2_mc_proposed,c2_mc_se_proposed,"
    "c2_cf_zf,c2_mc_zf,c2_mc_se_zf,"
    "c2_cf_slnr,c2_mc_slnr,c2_mc_se_slnr,"
    "e2e_proposed,e2e_zf,e2e_slnr,selected_users";

namespace {

struct FeederNumbers {
    double cf = 0, mc = 0, mc_se = 0;
    double single_cf = 0, single_mc = 0, single_mc_se = 0;
};

FeederNumbers feeder_numbers(const FeederConfig& cfg, const QuadratureSpec& quad,
                             const RngStream& rng, long samples) {
    FeederNumbers out;
    out.cf = feeder_capacity(cfg, quad).value;
    const McEstimate mc = feeder_capacity_mc(rng.substream(1), cfg, samples);
    out.mc = mc.mean;
    out.mc_se = mc.std_error;
    FeederConfig single = cfg;
    single.gateways.resize(1);
    out.single_cf = feeder_capacity(single, quad).value;
    const McEstimate smc = feeder_capacity_mc(rng.substream(2), single, samples);
    out.single_mc = smc.mean;
    out.single_mc_se = smc.std_error;
    return out;
}

SweepRow sweep_point(const ScenarioConfig& cfg, double value_dbw, const RngStream& rng,
                     const FeederNumbers* cached_feeder) {
    ScenarioConfig point = cfg;
    const double linear = std::pow(10.0, value_dbw / 10.0);
    if (cfg.sweep.variable == "feeder.tx_power_dbw")
        point.feeder.tx_power = linear;
    else
        point.userlink.power.setConstant(linear);

    SweepRow row;
    row.swept_dbw = value_dbw;

    FeederNumbers fn = cached_feeder
                           ? *cached_feeder
                           : feeder_numbers(point.feeder, point.quadrature, rng,
                                            point.sweep.mc_samples);
    row.c1_cf = fn.cf;
    row.c1_mc = fn.mc;
    row.c1_mc_se = fn.mc_se;
    row.c1_single_cf = fn.single_cf;
    row.c1_single_mc = fn.single_mc;
    row.c1_single_mc_se = fn.single_mc_se;

    const BfProblem prob = point.userlink.problem();
    const int K = prob.n_users();

    // one-bit feedback probes an independent channel realization per round
    auto feedback_rng = rng.substream(3);
    long round = 0;
    FeedbackFn feedback = [&](int user, const Eigen::MatrixXcd& weights,
                              const std::vector<int>& active) {
        auto eng = feedback_rng.substream(round++).make_engine();
        std::vector<Eigen::VectorXcd> h(K);
        for (int k : active)
            h[k] = build_channel(eng, point.userlink.geometry, point.userlink.fading, k);
        Eigen::VectorXd pw = Eigen::VectorXd::Zero(K);
        for (int k : active) pw(k) = prob.power(k);
        Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(weights.rows(), K);
        for (int k : active) w.col(k) = weights.col(k);
        return instantaneous_sinr(h, w, pw, prob.noise, user);
    };

    AlgorithmConfig algo = point.algorithm;
    algo.sinr_threshold = point.userlink.sinr_threshold;
    BeamformerSet schemes[3];
    schemes[0] = run_algorithm1(prob, algo, feedback);
    schemes[1] = baseline_bf(prob, BaselineKind::zero_forcing);
    schemes[2] = baseline_bf(prob, BaselineKind::slnr);
    row.selected_users = static_cast<int>(schemes[0].selected.size());

    // common random numbers: one squared-fade draw matrix shared by schemes
    auto eng = rng.substream(4).make_engine();
    std::vector<double> draws(static_cast<std::size_t>(point.sweep.mc_samples) * K);
    for (auto& d : draws) d = std::norm(sr_draw_complex(eng, point.userlink.fading));

    for (int s = 0; s < 3; ++s) {
        const auto inputs = capacity_user_inputs(prob, schemes[s], point.userlink.fading,
                                                 point.userlink.sinr_threshold);
        row.c2_cf[s] = user_link_capacity(inputs).total;
        const McEstimate mc = user_link_sum_rate_on_draws(
            draws, K, prob, schemes[s], point.userlink.sinr_threshold);
        row.c2_mc[s] = mc.mean;
        row.c2_mc_se[s] = mc.std_error;
        row.e2e_cf[s] = end_to_end_capacity(row.c1_cf, row.c2_cf[s]).c;
    }
    return row;
}

} // namespace

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg) {
    const RngStream root{cfg.sweep.seed, 0};
    const bool feeder_static = cfg.sweep.variable != "feeder.tx_power_dbw";
    FeederNumbers cached;
    if (feeder_static)
        cached = feeder_numbers(cfg.feeder, cfg.quadrature, root.substream(0xfeed),
                                cfg.sweep.mc_samples);

    // grid points run concurrently on per-point substreams; row order is by
    // grid index, independent of completion order
    std::vector<std::future<SweepRow>> futures;
    futures.reserve(cfg.sweep.grid_dbw.size());
    for (std::size_t i = 0; i < cfg.sweep.grid_dbw.size(); ++i) {
        futures.push_back(std::async(std::launch::async, [&, i] {
            return sweep_point(cfg, cfg.sweep.grid_dbw[i], root.substream(i),
                               feeder_static ? &cached : nullptr);
        }));
    }
    std::vector<SweepRow> rows;
    rows.reserve(futures.size());
    for (auto& f : futures) rows.push_back(f.get());
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << kSweepCsvHeader << '\n';
    char buf[64];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.10g%c", v, sep);
        out << buf;
    };
    for (const auto& r : rows) {
        put(r.swept_dbw, ',');
        put(r.c1_cf, ',');
        put(r.c1_mc, ',');
        put(r.c1_mc_se, ',');
        put(r.c1_single_cf, ',');
        put(r.c1_single_mc, ',');
        put(r.c1_single_mc_se, ',');
        for (int s = 0; s < 3; ++s) {
            put(r.c2_cf[s], ',');
            put(r.c2_mc[s], ',');
            put(r.c2_mc_se[s], ',');
        }
        for (int s = 0; s < 3; ++s) put(r.e2e_cf[s], ',');
        out << r.selected_users << '\n';
    }
}

std::vector<SweepRow> run_sweep_to_file(const ScenarioConfig& cfg,
                                        const std::string& output_path) {
    std::vector<SweepRow> rows = run_sweep(cfg);
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw std::runtime_error("run_sweep: cannot write '" + output_path + "'");
    write_sweep_csv(rows, out);
    return rows;
}

} // namespace htsim
