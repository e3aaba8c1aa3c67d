#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "lsa/common.hpp"

namespace lsa {

enum class StdpKernel { rectangular, exponential };

/// nearest: a spike pairs with the partner's latest spike, however many of
/// its own spikes came in between. reduced: only immediate neighbours pair,
/// so each partner spike is used at most once per side.
enum class StdpPairing { nearest, reduced };

struct StdpConfig {
    StdpKernel kernel = StdpKernel::exponential;
    StdpPairing pairing = StdpPairing::reduced;
    double a_plus = 0.1;
    double a_minus = 0.1;
    double tau_window = 20.0;  // ms
    double w_max = 10.0;
    bool enabled = true;

    void validate() const {
        if (!(tau_window > 0.0) || !std::isfinite(tau_window))
            throw ConfigError("stdp.tau_window must be > 0");
        if (!(a_plus > 0.0) || !std::isfinite(a_plus)) throw ConfigError("stdp.a_plus must be > 0");
        if (!(a_minus > 0.0) || !std::isfinite(a_minus)) throw ConfigError("stdp.a_minus must be > 0");
        if (!(w_max > 0.0) || !std::isfinite(w_max)) throw ConfigError("stdp.w_max must be > 0");
    }
};

/// Weight change for a spike pair with dt = t_post - t_pre.
/// The window is open: |dt| >= tau_window gives zero, as does dt == 0.
inline double stdp_delta(double dt, const StdpConfig& cfg) noexcept {
    if (dt == 0.0 || !(std::abs(dt) < cfg.tau_window)) return 0.0;
    const double mag = std::abs(dt);
    const double k = cfg.kernel == StdpKernel::rectangular ? 1.0 : std::exp(-mag / cfg.tau_window);
    return dt > 0.0 ? cfg.a_plus * k : -cfg.a_minus * k;
}

inline double clamp_weight(double w, const StdpConfig& cfg) noexcept {
    return std::clamp(w, 0.0, cfg.w_max);
}

/// Nearest-neighbour update for a neuron that spiked at t: every incoming
/// synapse pairs with its presynaptic neuron's latest spike (LTP side),
/// every outgoing synapse with its postsynaptic neuron's latest spike
/// (LTD side). Net is anything exposing the synapse/last-spike surface of
/// lsa::Network; last_spike(spiked) must already be t.
template <class Net>
void on_spike_update(Net& net, NeuronId spiked, TimeMs t, const StdpConfig& cfg) {
    if (!cfg.enabled) return;
    // Under reduced pairing a partner spike at or before our previous spike
    // was already paired with that one.
    const TimeMs own_prev = cfg.pairing == StdpPairing::reduced ? net.previous_spike(spiked) : kNever;
    auto pairs = [&](TimeMs other) { return other != kNever && other > own_prev; };
    for (auto idx : net.incoming(spiked)) {
        auto& syn = net.synapse_mut(idx);
        if (!syn.plastic) continue;
        const TimeMs pre_t = net.last_spike(syn.pre);
        if (!pairs(pre_t)) continue;
        const double dw = stdp_delta(static_cast<double>(t - pre_t), cfg);
        if (dw != 0.0) syn.weight = clamp_weight(syn.weight + dw, cfg);
    }
    for (auto idx : net.outgoing(spiked)) {
        auto& syn = net.synapse_mut(idx);
        if (!syn.plastic) continue;
        const TimeMs post_t = net.last_spike(syn.post);
        if (!pairs(post_t)) continue;
        const double dw = stdp_delta(static_cast<double>(post_t - t), cfg);
        if (dw != 0.0) syn.weight = clamp_weight(syn.weight + dw, cfg);
    }
}

inline std::string to_string(StdpKernel k) { return k == StdpKernel::rectangular ? "rectangular" : "exponential"; }

inline StdpKernel parse_kernel(const std::string& s) {
    if (s == "rectangular") return StdpKernel::rectangular;
    if (s == "exponential") return StdpKernel::exponential;
    throw ConfigError("stdp.kernel: unknown kernel '" + s + "'");
}

inline std::string to_string(StdpPairing p) { return p == StdpPairing::reduced ? "reduced" : "nearest"; }

inline StdpPairing parse_pairing(const std::string& s) {
    if (s == "reduced") return StdpPairing::reduced;
    if (s == "nearest") return StdpPairing::nearest;
    throw ConfigError("stdp.pairing: unknown pairing '" + s + "'");
}

}  // namespace lsa
