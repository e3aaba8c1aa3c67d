#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lsa/common.hpp"
#include "lsa/network.hpp"

namespace lsa {

enum class Builder { minimal_lsa, random, prediction_triad, proactive };

inline std::string to_string(Builder b) {
    switch (b) {
        case Builder::minimal_lsa: return "minimal_lsa";
        case Builder::random: return "random";
        case Builder::prediction_triad: return "prediction_triad";
        case Builder::proactive: return "proactive";
    }
    return "?";
}

inline Builder parse_builder(const std::string& s) {
    if (s == "minimal_lsa") return Builder::minimal_lsa;
    if (s == "random") return Builder::random;
    if (s == "prediction_triad") return Builder::prediction_triad;
    if (s == "proactive") return Builder::proactive;
    throw ConfigError("topology.builder: unknown builder '" + s + "'");
}

/// Declarative description of a network shape. Fields irrelevant to the
/// chosen builder are ignored.
struct TopologySpec {
    Builder builder = Builder::random;
    int size = 100;
    double connection_prob = 0.1;
    double fraction_inhibitory = 0.2;
    int n_inputs = 10;
    int n_outputs = 10;
    bool overlap_io = false;
    // Explicit index sets override n_inputs / n_outputs when non-empty.
    std::vector<NeuronId> input_ids;
    std::vector<NeuronId> output_ids;
    int delay_min = 1;
    int delay_max = 20;
    double weight_min = 0.0;
    double weight_max = 5.0;
    std::optional<double> initial_weight;  // fixed initial weight for every synapse
    int interval_capacity = 10;            // prediction triad
    int triad_lead = 4;                    // ms between cue arrival at the inhibitory neuron and interval end
    int n_inhibitory_pop = 5;              // proactive
    int hidden_size = 20;                  // proactive
    double hidden_prob = 0.2;              // proactive
    double loop_prob = 0.5;                // proactive input->output->inhibitory->input wiring

    void validate() const {
        if (!(fraction_inhibitory >= 0.0 && fraction_inhibitory <= 1.0))
            throw ConfigError("topology.fraction_inhibitory must lie in [0, 1]");
        if (!(connection_prob >= 0.0 && connection_prob <= 1.0))
            throw ConfigError("topology.connection_prob must lie in [0, 1]");
        if (delay_min < 1 || delay_max < delay_min)
            throw ConfigError("topology.delay_min/delay_max must satisfy 1 <= min <= max");
        if (!(weight_min >= 0.0 && weight_max >= weight_min))
            throw ConfigError("topology.weight_min/weight_max must satisfy 0 <= min <= max");
        if (initial_weight && *initial_weight < 0.0) throw ConfigError("topology.initial_weight must be >= 0");
        if (triad_lead < 1) throw ConfigError("topology.triad_lead must be >= 1 ms");
    }
};

namespace detail {

inline double draw_weight(const TopologySpec& spec, Rng& rng) {
    if (spec.initial_weight) return *spec.initial_weight;
    return std::uniform_real_distribution<double>(spec.weight_min, spec.weight_max)(rng);
}

inline int draw_delay(const TopologySpec& spec, Rng& rng) {
    return std::uniform_int_distribution<int>(spec.delay_min, spec.delay_max)(rng);
}

}  // namespace detail

/// Three excitatory neurons: input (0), output (1), hidden (2). The input
/// drives both others with one shared initial weight and 1 ms delays; the
/// hidden neuron has no outgoing synapses.
inline NetworkBlueprint build_minimal_lsa(std::uint64_t seed, const TopologySpec& spec = {}) {
    Rng rng(combine_seed(seed, kTopologyStream));
    const double w = detail::draw_weight(spec, rng);
    NetworkBlueprint bp;
    bp.neurons.assign(3, NeuronParams::regular_spiking());
    bp.synapses = {{0, 1, w, 1, true}, {0, 2, w, 1, true}};
    bp.input_ids = {0};
    bp.output_ids = {1};
    return bp;
}

/// Directed Erdos-Renyi graph without self-loops. Inhibitory neurons take
/// the highest indices; inputs and outputs are drawn from the excitatory
/// block (inputs first, outputs next, or shared when overlap_io is set).
inline NetworkBlueprint build_random(const TopologySpec& spec, std::uint64_t seed) {
    spec.validate();
    if (spec.size < 3) throw ConfigError("topology.size must be >= 3 for the random builder");
    const int n = spec.size;
    const int n_inh = static_cast<int>(std::lround(spec.fraction_inhibitory * n));
    const int n_exc = n - n_inh;

    NetworkBlueprint bp;
    for (int i = 0; i < n; ++i)
        bp.neurons.push_back(i < n_exc ? NeuronParams::regular_spiking() : NeuronParams::fast_spiking());

    if (!spec.input_ids.empty() || !spec.output_ids.empty()) {
        bp.input_ids = spec.input_ids;
        bp.output_ids = spec.output_ids;
        for (auto id : bp.input_ids)
            if (static_cast<int>(id) >= n) throw ConfigError("topology.input_ids: index out of range");
        for (auto id : bp.output_ids)
            if (static_cast<int>(id) >= n) throw ConfigError("topology.output_ids: index out of range");
    } else {
        if (spec.n_inputs < 0 || spec.n_outputs < 0) throw ConfigError("topology.n_inputs/n_outputs must be >= 0");
        const int needed = spec.overlap_io ? std::max(spec.n_inputs, spec.n_outputs) : spec.n_inputs + spec.n_outputs;
        if (needed > n_exc)
            throw ConfigError("topology: " + std::to_string(needed) + " input/output neurons requested but only " +
                              std::to_string(n_exc) + " excitatory neurons exist");
        for (int i = 0; i < spec.n_inputs; ++i) bp.input_ids.push_back(static_cast<NeuronId>(i));
        const int out0 = spec.overlap_io ? 0 : spec.n_inputs;
        for (int i = 0; i < spec.n_outputs; ++i) bp.output_ids.push_back(static_cast<NeuronId>(out0 + i));
    }

    Rng rng(combine_seed(seed, kTopologyStream));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int pre = 0; pre < n; ++pre) {
        for (int post = 0; post < n; ++post) {
            if (pre == post) continue;
            if (u01(rng) >= spec.connection_prob) continue;
            const int d = detail::draw_delay(spec, rng);
            const double w = detail::draw_weight(spec, rng);
            bp.synapses.push_back({static_cast<NeuronId>(pre), static_cast<NeuronId>(post), w, d, true});
        }
    }
    return bp;
}

/// Anticipatory input (0) -> inhibitory (1) -> target input (2). The
/// anticipatory delay is chosen so that a prompt inhibitory spike lands
/// just before an interval_capacity-delayed target; both delays are capped
/// at delay_max, so long intervals cannot be bridged.
inline NetworkBlueprint build_prediction_triad(int interval_capacity, std::uint64_t seed,
                                               const TopologySpec& spec = {}) {
    if (interval_capacity < 3) throw ConfigError("topology.interval_capacity must be >= 3 ms");
    Rng rng(combine_seed(seed, kTopologyStream));
    const int to_target = 1;
    const int to_inhibitory = std::clamp(interval_capacity - spec.triad_lead, spec.delay_min, spec.delay_max);
    NetworkBlueprint bp;
    bp.neurons = {NeuronParams::regular_spiking(), NeuronParams::fast_spiking(), NeuronParams::regular_spiking()};
    const double w_ai = detail::draw_weight(spec, rng);
    const double w_it = detail::draw_weight(spec, rng);
    bp.synapses = {{0, 1, w_ai, to_inhibitory, true}, {1, 2, w_it, to_target, true}};
    bp.input_ids = {0, 2};
    bp.output_ids = {1};
    return bp;
}

/// Named populations of a proactive network, in index order.
struct ProactiveLayout {
    std::vector<NeuronId> inputs, outputs, inhibitory, hidden;
};

inline ProactiveLayout proactive_layout(const TopologySpec& spec) {
    ProactiveLayout l;
    NeuronId next = 0;
    auto take = [&next](int k, std::vector<NeuronId>& into) {
        for (int i = 0; i < k; ++i) into.push_back(next++);
    };
    take(spec.n_inputs, l.inputs);
    take(spec.n_outputs, l.outputs);
    take(spec.n_inhibitory_pop, l.inhibitory);
    take(spec.hidden_size, l.hidden);
    return l;
}

/// Input, output, inhibitory and hidden populations wired so that
/// input -> output -> inhibitory -> input always exists. Inhibitory neurons
/// receive only from outputs, so deleting the output population cuts every
/// input -> inhibitory path.
inline NetworkBlueprint build_proactive(const TopologySpec& spec, std::uint64_t seed) {
    spec.validate();
    if (spec.n_inputs < 1 || spec.n_outputs < 1 || spec.n_inhibitory_pop < 1 || spec.hidden_size < 0)
        throw ConfigError("topology: proactive builder needs at least one input, output and inhibitory neuron");
    const auto lay = proactive_layout(spec);
    const auto n = lay.inputs.size() + lay.outputs.size() + lay.inhibitory.size() + lay.hidden.size();

    NetworkBlueprint bp;
    bp.neurons.assign(n, NeuronParams::regular_spiking());
    for (auto id : lay.inhibitory) bp.neurons[id] = NeuronParams::fast_spiking();
    bp.input_ids = lay.inputs;
    bp.output_ids = lay.outputs;

    Rng rng(combine_seed(seed, kTopologyStream));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto connect = [&](NeuronId a, NeuronId b) {
        bp.synapses.push_back({a, b, detail::draw_weight(spec, rng), detail::draw_delay(spec, rng), true});
    };
    // Random projection that guarantees every source at least one target.
    auto project = [&](const std::vector<NeuronId>& from, const std::vector<NeuronId>& to, double p) {
        for (auto a : from) {
            bool any = false;
            for (auto b : to) {
                if (a == b) continue;
                if (u01(rng) < p) {
                    connect(a, b);
                    any = true;
                }
            }
            if (!any) {
                const auto k = std::uniform_int_distribution<std::size_t>(0, to.size() - 1)(rng);
                if (to[k] != a) connect(a, to[k]);
            }
        }
    };
    auto sparse = [&](const std::vector<NeuronId>& from, const std::vector<NeuronId>& to, double p) {
        for (auto a : from)
            for (auto b : to)
                if (a != b && u01(rng) < p) connect(a, b);
    };
    project(lay.inputs, lay.outputs, spec.loop_prob);
    project(lay.outputs, lay.inhibitory, spec.loop_prob);
    project(lay.inhibitory, lay.inputs, spec.loop_prob);
    sparse(lay.inputs, lay.hidden, spec.hidden_prob);
    sparse(lay.hidden, lay.hidden, spec.hidden_prob);
    sparse(lay.hidden, lay.outputs, spec.hidden_prob);
    return bp;
}

/// True when some node of `to` is reachable from some node of `from`
/// without passing through `blocked`.
inline bool has_path(const std::vector<Synapse>& synapses, std::size_t n, const std::vector<NeuronId>& from,
                     const std::vector<NeuronId>& to, const std::vector<NeuronId>& blocked = {}) {
    std::vector<std::vector<NeuronId>> adj(n);
    for (const auto& s : synapses) adj[s.pre].push_back(s.post);
    std::vector<char> seen(n, 0), target(n, 0), cut(n, 0);
    for (auto b : blocked) cut[b] = 1;
    for (auto t : to) target[t] = 1;
    std::deque<NeuronId> q;
    for (auto f : from)
        if (!cut[f]) {
            seen[f] = 1;
            q.push_back(f);
        }
    while (!q.empty()) {
        const auto v = q.front();
        q.pop_front();
        for (auto w : adj[v]) {
            if (cut[w] || seen[w]) continue;
            if (target[w]) return true;
            seen[w] = 1;
            q.push_back(w);
        }
    }
    return false;
}

/// Fraction of (input, output) pairs joined by a path of at most two hops
/// whose summed delay is <= delay_threshold. Intermediate neurons must be
/// excitatory; a neuron that is both input and output counts as joined.
inline double connectivity_measure(const std::vector<Synapse>& synapses, std::size_t n,
                                   const std::vector<NeuronId>& ins, const std::vector<NeuronId>& outs,
                                   const std::vector<NeuronId>& inhibitory, int delay_threshold) {
    if (ins.empty() || outs.empty()) throw ConfigError("connectivity_measure: input and output sets must be non-empty");
    constexpr int inf = std::numeric_limits<int>::max() / 4;
    std::vector<std::vector<std::pair<NeuronId, int>>> adj(n);
    for (const auto& s : synapses) adj[s.pre].emplace_back(s.post, s.delay);
    std::vector<char> inh(n, 0);
    for (auto id : inhibitory) inh[id] = 1;
    std::vector<int> one_hop(n), two_hop(n);
    std::size_t joined = 0;
    for (auto i : ins) {
        std::fill(one_hop.begin(), one_hop.end(), inf);
        std::fill(two_hop.begin(), two_hop.end(), inf);
        for (auto [post, d] : adj[i]) one_hop[post] = std::min(one_hop[post], d);
        for (NeuronId m = 0; m < n; ++m) {
            if (one_hop[m] == inf || m == i || inh[m]) continue;
            for (auto [post, d] : adj[m]) two_hop[post] = std::min(two_hop[post], one_hop[m] + d);
        }
        for (auto o : outs)
            if (o == i || std::min(one_hop[o], two_hop[o]) <= delay_threshold) ++joined;
    }
    return static_cast<double>(joined) / static_cast<double>(ins.size() * outs.size());
}

inline double connectivity_measure(const Network& net, int delay_threshold) {
    return connectivity_measure(net.synapses(), net.size(), net.input_ids(), net.output_ids(), net.inhibitory_ids(),
                                delay_threshold);
}

/// Dispatch on spec.builder.
inline NetworkBlueprint build(const TopologySpec& spec, std::uint64_t seed) {
    switch (spec.builder) {
        case Builder::minimal_lsa: return build_minimal_lsa(seed, spec);
        case Builder::random: return build_random(spec, seed);
        case Builder::prediction_triad: return build_prediction_triad(spec.interval_capacity, seed, spec);
        case Builder::proactive: return build_proactive(spec, seed);
    }
    throw ConfigError("topology.builder: unhandled builder");
}

}  // namespace lsa
