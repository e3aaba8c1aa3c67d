#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "lsa/config.hpp"
#include "lsa/embodiment.hpp"
#include "lsa/metrics.hpp"
#include "lsa/network.hpp"
#include "lsa/topology.hpp"

namespace lsa {

inline std::unique_ptr<Environment> make_environment(const EnvSpec& spec, EnvKind kind, const Network& net,
                                                     std::uint64_t seed) {
    switch (kind) {
        case EnvKind::reinforcement: return std::make_unique<ReinforcementEnv>(spec, net.input_ids());
        case EnvKind::weakening: return std::make_unique<WeakeningEnv>(spec, net.input_ids());
        case EnvKind::wallworld: return std::make_unique<WallWorldEnv>(spec, net.input_ids());
        case EnvKind::predictable_pair: {
            const auto& in = net.input_ids();
            if (in.size() < 2) throw ConfigError("predictable_pair needs at least two input neurons");
            const auto half = (in.size() + 1) / 2;
            return std::make_unique<PredictablePairEnv>(spec, std::vector<NeuronId>(in.begin(), in.begin() + half),
                                                        std::vector<NeuronId>(in.begin() + half, in.end()), seed);
        }
        case EnvKind::yoked: throw ConfigError("environment.kind 'yoked' needs a source run; set environment.yoked");
    }
    throw ConfigError("unhandled environment kind");
}

/// Closed loop: env decides stimulation for t+1 from spikes at t, then the
/// network advances one step.
inline RunRecord simulate(const ExperimentConfig& cfg, Network& net, Environment& env) {
    RunRecord rec;
    rec.seed = cfg.seed;
    rec.config_hash = config_hash(cfg);
    rec.env_kind = env.kind();
    rec.duration = cfg.duration;
    rec.snapshot_period = cfg.snapshot_period;
    rec.n_neurons = net.size();
    rec.input_ids = net.input_ids();
    rec.output_ids = net.output_ids();
    rec.inhibitory_ids = net.inhibitory_ids();
    rec.synapses = net.synapses();
    for (std::size_t i = 0; i < rec.synapses.size(); ++i) rec.synapses[i].weight = net.initial_weights()[i];

    std::vector<char> is_out(net.size(), 0), is_inh(net.size(), 0);
    for (auto id : net.output_ids()) is_out[id] = 1;
    for (auto id : net.inhibitory_ids()) is_inh[id] = 1;

    std::vector<NeuronId> outs, inh;
    rec.snapshots.push_back({net.clock(), net.weights()});
    try {
        for (TimeMs t = net.clock(); t < cfg.duration; ++t) {
            auto o = env.step(t, outs, inh);
            net.inject_stimulus(o.stimulate);
            for (auto id : o.suppressed) net.log_suppressed(t + 1, id);
            const auto& spiked = net.advance();
            outs.clear();
            inh.clear();
            for (auto id : spiked) {
                if (is_out[id]) outs.push_back(id);
                if (is_inh[id]) inh.push_back(id);
            }
            if (net.clock() % cfg.snapshot_period == 0 || net.clock() == cfg.duration)
                rec.snapshots.push_back({net.clock(), net.weights()});
        }
    } catch (const NumericalFault& f) {
        rec.faulted = true;
        rec.fault = f.what();
        rec.snapshots.push_back({net.clock(), net.weights()});
    }
    rec.spikes = net.spike_log();
    rec.stimulation = net.stimulation_log();
    rec.env_trace = env.trace();
    return rec;
}

inline std::string default_run_id(const ExperimentConfig& cfg) { return cfg.name + "-s" + std::to_string(cfg.seed); }

inline Network make_network(const ExperimentConfig& cfg) {
    return Network(build(cfg.topology, cfg.seed), cfg.sim, cfg.stdp, cfg.seed);
}

/// Execute one configured run. Yoked configs first run a controllable
/// source agent under a derived seed, then replay its delivered stimulation
/// on the network this seed builds, so a controllable and a yoked run with
/// the same seed share network and noise and differ only in who controls
/// the stimulation.
inline RunRecord run(const ExperimentConfig& cfg) {
    cfg.validate();
    RunRecord rec;
    if (cfg.environment.yoked) {
        auto source_cfg = cfg;
        source_cfg.environment.yoked = false;
        source_cfg.environment.kind = cfg.environment.yoked_source;
        source_cfg.seed = combine_seed(cfg.seed, kYokedSourceStream);
        auto src_net = make_network(source_cfg);
        auto src_env = make_environment(source_cfg.environment, source_cfg.environment.kind, src_net, source_cfg.seed);
        const auto source = simulate(source_cfg, src_net, *src_env);
        if (source.faulted) {
            rec = source;
        } else {
            auto net = make_network(cfg);
            auto env = make_yoked(cfg.environment, source.stimulation);
            rec = simulate(cfg, net, *env);
        }
    } else {
        auto net = make_network(cfg);
        auto env = make_environment(cfg.environment, cfg.environment.kind, net, cfg.seed);
        rec = simulate(cfg, net, *env);
    }
    rec.config_hash = config_hash(cfg);
    rec.run_id = default_run_id(cfg);
    return rec;
}

// ---------------------------------------------------------------------------
// Metrics table

inline constexpr int kDefaultConnectivityThreshold = 20;  // ms, one STDP window

struct MetricRow {
    std::string run_id;
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0.0;
};

/// Standard metrics for a record; which ones appear depends on the environment.
inline std::vector<std::pair<std::string, double>> standard_metrics(const RunRecord& rec, const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, double>> m;
    m.emplace_back("total_spikes", static_cast<double>(rec.spikes.size()));
    std::size_t delivered = 0;
    for (const auto& e : rec.stimulation) delivered += e.delivered ? 1 : 0;
    m.emplace_back("stimulations_delivered", static_cast<double>(delivered));
    m.emplace_back("faulted", rec.faulted ? 1.0 : 0.0);
    if (!rec.input_ids.empty() && !rec.output_ids.empty())
        m.emplace_back("connectivity", connectivity_measure(rec.synapses, rec.n_neurons, rec.input_ids, rec.output_ids,
                                                            rec.inhibitory_ids, kDefaultConnectivityThreshold));
    if (cfg.topology.builder == Builder::minimal_lsa && rec.snapshots.size() >= 2) {
        const auto io = rec.synapse_index(0, 1), ih = rec.synapse_index(0, 2);
        if (io && ih) {
            const double w0 = rec.snapshots.front().weights[*io], w1 = rec.final_weights()[*io];
            const double h0 = rec.snapshots.front().weights[*ih], h1 = rec.final_weights()[*ih];
            m.emplace_back("w_in_out_initial", w0);
            m.emplace_back("w_in_out_final", w1);
            m.emplace_back("delta_w_in_out", w1 - w0);
            m.emplace_back("w_in_hidden_initial", h0);
            m.emplace_back("w_in_hidden_final", h1);
            m.emplace_back("delta_w_in_hidden", h1 - h0);
            const auto pi = pairing_intervals(rec.spikes, 0, 1, rec.duration * 2 / 3, rec.duration);
            m.emplace_back("mean_in_to_out_ms", pi.mean_pre_to_post);
            m.emplace_back("mean_out_to_in_ms", pi.mean_post_to_pre);
        }
    }
    if (rec.env_kind == EnvKind::wallworld || rec.env_kind == EnvKind::yoked) {
        const auto rts = reaction_time_series(rec);
        m.emplace_back("episodes", static_cast<double>(rts.size()));
        m.emplace_back("learning_success", rts.size() >= 4 ? learning_success(rts) : std::nan(""));
    }
    if (rec.env_kind == EnvKind::predictable_pair) {
        std::size_t targets = 0;
        for (const auto& e : rec.env_trace) targets += e.kind == EnvEventKind::target ? 1 : 0;
        if (targets > 0) {
            m.emplace_back("prediction_error_rate", prediction_error_rate(rec));
            const TimeMs from = rec.duration * 2 / 3;
            bool any = false;
            for (const auto& e : rec.env_trace) any = any || (e.kind == EnvEventKind::target && e.time >= from);
            m.emplace_back("prediction_error_final_third", any ? prediction_error_rate(rec, from) : std::nan(""));
        }
    }
    if (delivered > 0) {
        const auto s = snr(rec, cfg.response_window);
        m.emplace_back("snr", s.value);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepPoint {
    std::vector<Json> values;  // one per axis
    int replicate = 0;
    std::uint64_t seed = 0;
    ExperimentConfig config;
};

struct SweepRun {
    SweepPoint point;
    std::vector<std::pair<std::string, double>> metrics;
    bool faulted = false;
    std::string fault;
};

inline std::string axis_tuple_string(const std::vector<Json>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += ",";
        s += values[i].dump();
    }
    return s;
}

/// Seed of replicate r at one axis tuple; reproducible without the sweep.
inline std::uint64_t replicate_seed(std::uint64_t master, const std::vector<Json>& values, int r) {
    return combine_seed(combine_seed(master, fnv1a(axis_tuple_string(values))), static_cast<std::uint64_t>(r));
}

/// Cartesian product of the axes (first axis slowest) times replicates.
inline std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg) {
    if (cfg.sweep.empty()) throw ConfigError("sweep: config has no sweep axes");
    std::vector<SweepPoint> pts;
    std::vector<std::size_t> idx(cfg.sweep.size(), 0);
    while (true) {
        std::vector<Json> values;
        ExperimentConfig base = cfg;
        base.sweep.clear();
        for (std::size_t a = 0; a < cfg.sweep.size(); ++a) {
            values.push_back(cfg.sweep[a].values[idx[a]]);
            base = with_parameter(base, cfg.sweep[a].path, values.back());
        }
        for (int r = 0; r < cfg.replicates; ++r) {
            SweepPoint p{values, r, replicate_seed(cfg.seed, values, r), base};
            p.config.seed = p.seed;
            p.config.name = cfg.name;
            pts.push_back(std::move(p));
        }
        std::size_t a = cfg.sweep.size();
        while (a > 0) {
            --a;
            if (++idx[a] < cfg.sweep[a].values.size()) break;
            idx[a] = 0;
            if (a == 0) return pts;
        }
        if (cfg.sweep.empty()) return pts;
    }
}

/// Runs every sweep point; results come back in expansion order whatever
/// the parallelism. `on_record` (if set) is called from worker threads.
template <class OnRecord>
std::vector<SweepRun> sweep(const ExperimentConfig& cfg, int jobs, OnRecord&& on_record) {
    auto points = expand_sweep(cfg);
    std::vector<SweepRun> results(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            auto& out = results[i];
            out.point = points[i];
            try {
                auto rec = run(points[i].config);
                rec.run_id = cfg.name + "-" + std::to_string(i);
                out.faulted = rec.faulted;
                out.fault = rec.fault;
                out.metrics = standard_metrics(rec, points[i].config);
                on_record(i, rec);
            } catch (const std::exception& e) {
                out.faulted = true;
                out.fault = e.what();
            }
        }
    };
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return results;
}

inline std::vector<SweepRun> sweep(const ExperimentConfig& cfg, int jobs = 1) {
    return sweep(cfg, jobs, [](std::size_t, const RunRecord&) {});
}

inline std::vector<MetricRow> metrics_table(const std::string& name, const std::vector<SweepRun>& runs) {
    std::vector<MetricRow> rows;
    for (std::size_t i = 0; i < runs.size(); ++i)
        for (const auto& [k, v] : runs[i].metrics)
            rows.push_back({name + "-" + std::to_string(i), runs[i].point.seed, k, v});
    return rows;
}

}  // namespace lsa
