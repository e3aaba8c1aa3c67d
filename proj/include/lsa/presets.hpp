#pragma once

#include <string>
#include <vector>

#include "lsa/config.hpp"

namespace lsa {

struct Preset {
    std::string name;
    std::string description;
    ExperimentConfig config;
};

namespace detail {

inline ExperimentConfig minimal_base(const std::string& name, EnvKind kind) {
    ExperimentConfig c;
    c.name = name;
    c.duration = 60000;
    c.topology.builder = Builder::minimal_lsa;
    c.environment.kind = kind;
    return c;
}

inline ExperimentConfig wallworld_base(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    c.duration = 600000;
    c.snapshot_period = 10000;
    c.topology.builder = Builder::random;
    c.topology.size = 100;
    c.environment.kind = EnvKind::wallworld;
    c.environment.decoder_threshold = 2;
    return c;
}

inline ExperimentConfig prediction_base(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    c.duration = 120000;
    c.topology.builder = Builder::prediction_triad;
    c.topology.interval_capacity = 10;
    c.environment.kind = EnvKind::predictable_pair;
    c.environment.delta = 10;
    c.environment.mean_interarrival = 100;
    // A lone synapse at w_max must fire the inhibitory neuron on its own.
    c.sim.synaptic_gain = 4.0;
    return c;
}

}  // namespace detail

/// Shipped experiment configurations, one per reproduced result.
inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = [] {
        std::vector<Preset> v;
        {
            auto c = detail::minimal_base("fig3a-reinforcement", EnvKind::reinforcement);
            v.push_back({c.name, "3-neuron net; stimulation stops when the output fires (input->output grows)", c});
        }
        {
            auto c = detail::minimal_base("fig3b-weakening", EnvKind::weakening);
            c.topology.initial_weight = 5.0;
            v.push_back({c.name, "3-neuron net; output spikes start stimulation (input->output decays)", c});
        }
        {
            auto c = detail::wallworld_base("fig4-wallworld");
            v.push_back({c.name, "100-neuron random net steering a 1D robot away from walls", c});
        }
        {
            auto c = detail::wallworld_base("fig4-yoked-control");
            c.environment.yoked = true;
            v.push_back({c.name, "same net, replaying another agent's wall stimulation (no control)", c});
        }
        {
            auto c = detail::wallworld_base("connectivity-sweep");
            c.replicates = 5;
            c.sweep = {{"topology.connection_prob", {0.01, 0.02, 0.05, 0.1, 0.2}}};
            v.push_back({c.name, "wall-world learning versus random connection density", c});
        }
        {
            auto c = detail::wallworld_base("loopdelay-sweep");
            c.replicates = 20;
            c.sweep = {{"environment.actuation_delay", {0, 20, 60, 120}}};
            v.push_back({c.name, "wall-world learning versus action-to-effect delay", c});
        }
        {
            auto c = detail::prediction_base("fig6-prediction");
            v.push_back({c.name, "triad learns to inhibit a target that follows a cue by 10 ms", c});
        }
        {
            auto c = detail::prediction_base("fig6-ablations");
            c.replicates = 5;
            c.sweep = {{"environment.delta", {10, 200}},
                       {"topology.interval_capacity", {10, 200}},
                       {"environment.delta_random", {false, true}}};
            v.push_back({c.name, "prediction with randomized or 200 ms cue-target intervals", c});
        }
        {
            ExperimentConfig c;
            c.name = "fig7-proactive";
            c.duration = 120000;
            c.topology.builder = Builder::proactive;
            c.topology.n_inputs = 4;
            c.topology.n_outputs = 4;
            c.environment.kind = EnvKind::predictable_pair;
            v.push_back({c.name, "input->output->inhibitory->input loop on a predictable input pair", c});
        }
        {
            ExperimentConfig c;
            c.name = "snr-size-sweep";
            c.duration = 60000;
            c.replicates = 20;
            c.topology.builder = Builder::random;
            c.environment.kind = EnvKind::reinforcement;
            c.stdp.enabled = false;
            c.sweep = {{"topology.size", {100, 400, 1600}}};
            v.push_back({c.name, "evoked/baseline output rate versus network size", c});
        }
        return v;
    }();
    return all;
}

inline const Preset* find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

}  // namespace lsa
