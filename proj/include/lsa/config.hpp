#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lsa/common.hpp"
#include "lsa/embodiment.hpp"
#include "lsa/network.hpp"
#include "lsa/plasticity.hpp"
#include "lsa/topology.hpp"

namespace lsa {

using Json = nlohmann::ordered_json;

/// One sweep axis: dotted config path and the values it takes.
struct SweepAxis {
    std::string path;
    std::vector<Json> values;
};

/// Full declarative description of a run (and optionally a sweep).
struct ExperimentConfig {
    std::string name = "experiment";
    std::uint64_t seed = 1;
    TimeMs duration = 10000;
    TimeMs snapshot_period = 1000;
    int replicates = 1;
    int response_window = 20;
    SimParams sim;
    TopologySpec topology;
    StdpConfig stdp;
    EnvSpec environment;
    std::vector<SweepAxis> sweep;

    void validate() const {
        if (duration <= 0) throw ConfigError("duration_ms: must be > 0");
        if (snapshot_period <= 0) throw ConfigError("snapshot_period_ms: must be > 0");
        if (replicates < 1) throw ConfigError("replicates: must be >= 1");
        if (response_window < 1) throw ConfigError("response_window_ms: must be >= 1");
        if (!(sim.noise_sd >= 0.0)) throw ConfigError("sim.noise_sd: must be >= 0");
        topology.validate();
        stdp.validate();
        environment.validate();
        if (topology.initial_weight && *topology.initial_weight > stdp.w_max)
            throw ConfigError("topology.initial_weight: exceeds stdp.w_max");
        if (topology.weight_max > stdp.w_max) throw ConfigError("topology.weight_max: exceeds stdp.w_max");
    }
};

namespace detail {

/// Reads fields of one JSON object and rejects keys nobody asked for.
class StrictObject {
public:
    StrictObject(const Json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
        if (!j_.is_object()) throw ConfigError(where("") + ": expected an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).template get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(where(key) + ": wrong type");
        }
    }

    const Json* child(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError("unknown config key '" + where(it.key()) + "'");
    }

    std::string where(const std::string& key) const {
        if (prefix_.empty()) return key;
        return key.empty() ? prefix_ : prefix_ + "." + key;
    }

private:
    const Json& j_;
    std::string prefix_;
    std::set<std::string> seen_;
};

inline std::string mode_name(StimulusMode m) { return m == StimulusMode::forced_spike ? "forced_spike" : "current_pulse"; }

inline StimulusMode parse_mode(const std::string& s) {
    if (s == "forced_spike") return StimulusMode::forced_spike;
    if (s == "current_pulse") return StimulusMode::current_pulse;
    throw ConfigError("sim.stimulus_mode: unknown mode '" + s + "'");
}

}  // namespace detail

inline Json to_json(const ExperimentConfig& c) {
    Json j;
    j["name"] = c.name;
    j["seed"] = c.seed;
    j["duration_ms"] = c.duration;
    j["snapshot_period_ms"] = c.snapshot_period;
    j["replicates"] = c.replicates;
    j["response_window_ms"] = c.response_window;

    auto& s = j["sim"];
    s["noise_sd"] = c.sim.noise_sd;
    s["synaptic_gain"] = c.sim.synaptic_gain;
    s["pulse_current"] = c.sim.pulse_current;
    s["stimulus_mode"] = detail::mode_name(c.sim.stimulus_mode);
    s["record_spikes"] = c.sim.record_spikes;

    const auto& t = c.topology;
    auto& tj = j["topology"];
    tj["builder"] = to_string(t.builder);
    tj["size"] = t.size;
    tj["connection_prob"] = t.connection_prob;
    tj["fraction_inhibitory"] = t.fraction_inhibitory;
    tj["n_inputs"] = t.n_inputs;
    tj["n_outputs"] = t.n_outputs;
    tj["overlap_io"] = t.overlap_io;
    tj["input_ids"] = t.input_ids;
    tj["output_ids"] = t.output_ids;
    tj["delay_min"] = t.delay_min;
    tj["delay_max"] = t.delay_max;
    tj["weight_min"] = t.weight_min;
    tj["weight_max"] = t.weight_max;
    tj["initial_weight"] = t.initial_weight ? Json(*t.initial_weight) : Json(nullptr);
    tj["interval_capacity"] = t.interval_capacity;
    tj["triad_lead"] = t.triad_lead;
    tj["n_inhibitory_pop"] = t.n_inhibitory_pop;
    tj["hidden_size"] = t.hidden_size;
    tj["hidden_prob"] = t.hidden_prob;
    tj["loop_prob"] = t.loop_prob;

    auto& p = j["stdp"];
    p["kernel"] = to_string(c.stdp.kernel);
    p["pairing"] = to_string(c.stdp.pairing);
    p["a_plus"] = c.stdp.a_plus;
    p["a_minus"] = c.stdp.a_minus;
    p["tau_window"] = c.stdp.tau_window;
    p["w_max"] = c.stdp.w_max;
    p["enabled"] = c.stdp.enabled;

    const auto& e = c.environment;
    auto& ej = j["environment"];
    ej["kind"] = to_string(e.kind);
    ej["stim_period"] = e.stim_period;
    ej["action_window"] = e.action_window;
    ej["relief_duration"] = e.relief_duration;
    ej["punish_duration"] = e.punish_duration;
    ej["decoder_threshold"] = e.decoder_threshold;
    ej["length"] = e.length;
    ej["speed"] = e.speed;
    ej["sensor_range"] = e.sensor_range;
    ej["actuation_delay"] = e.actuation_delay;
    ej["start_position"] = e.start_position;
    ej["start_direction"] = e.start_direction;
    ej["mean_interarrival"] = e.mean_interarrival;
    ej["delta"] = e.delta;
    ej["delta_random"] = e.delta_random;
    ej["delta_min"] = e.delta_min;
    ej["delta_max"] = e.delta_max;
    ej["gate_window"] = e.gate_window;
    ej["yoked"] = e.yoked;
    ej["yoked_source"] = to_string(e.yoked_source);

    Json sw = Json::object();
    for (const auto& ax : c.sweep) sw[ax.path] = ax.values;
    j["sweep"] = sw;
    return j;
}

inline ExperimentConfig config_from_json(const Json& j) {
    ExperimentConfig c;
    detail::StrictObject root(j, "");
    root.get("name", c.name);
    root.get("seed", c.seed);
    root.get("duration_ms", c.duration);
    root.get("snapshot_period_ms", c.snapshot_period);
    root.get("replicates", c.replicates);
    root.get("response_window_ms", c.response_window);

    if (const Json* sj = root.child("sim")) {
        detail::StrictObject s(*sj, "sim");
        std::string mode = detail::mode_name(c.sim.stimulus_mode);
        s.get("noise_sd", c.sim.noise_sd);
        s.get("synaptic_gain", c.sim.synaptic_gain);
        s.get("pulse_current", c.sim.pulse_current);
        s.get("stimulus_mode", mode);
        s.get("record_spikes", c.sim.record_spikes);
        c.sim.stimulus_mode = detail::parse_mode(mode);
        s.finish();
    }
    if (const Json* tj = root.child("topology")) {
        auto& t = c.topology;
        detail::StrictObject o(*tj, "topology");
        std::string builder = to_string(t.builder);
        o.get("builder", builder);
        t.builder = parse_builder(builder);
        o.get("size", t.size);
        o.get("connection_prob", t.connection_prob);
        o.get("fraction_inhibitory", t.fraction_inhibitory);
        o.get("n_inputs", t.n_inputs);
        o.get("n_outputs", t.n_outputs);
        o.get("overlap_io", t.overlap_io);
        o.get("input_ids", t.input_ids);
        o.get("output_ids", t.output_ids);
        o.get("delay_min", t.delay_min);
        o.get("delay_max", t.delay_max);
        o.get("weight_min", t.weight_min);
        o.get("weight_max", t.weight_max);
        if (const Json* w = o.child("initial_weight"); w && !w->is_null()) {
            if (!w->is_number()) throw ConfigError("topology.initial_weight: wrong type");
            t.initial_weight = w->get<double>();
        }
        o.get("interval_capacity", t.interval_capacity);
        o.get("triad_lead", t.triad_lead);
        o.get("n_inhibitory_pop", t.n_inhibitory_pop);
        o.get("hidden_size", t.hidden_size);
        o.get("hidden_prob", t.hidden_prob);
        o.get("loop_prob", t.loop_prob);
        o.finish();
    }
    if (const Json* pj = root.child("stdp")) {
        detail::StrictObject o(*pj, "stdp");
        std::string kernel = to_string(c.stdp.kernel);
        o.get("kernel", kernel);
        c.stdp.kernel = parse_kernel(kernel);
        std::string pairing = to_string(c.stdp.pairing);
        o.get("pairing", pairing);
        c.stdp.pairing = parse_pairing(pairing);
        o.get("a_plus", c.stdp.a_plus);
        o.get("a_minus", c.stdp.a_minus);
        o.get("tau_window", c.stdp.tau_window);
        o.get("w_max", c.stdp.w_max);
        o.get("enabled", c.stdp.enabled);
        o.finish();
    }
    if (const Json* ej = root.child("environment")) {
        auto& e = c.environment;
        detail::StrictObject o(*ej, "environment");
        std::string kind = to_string(e.kind), source = to_string(e.yoked_source);
        o.get("kind", kind);
        e.kind = parse_env_kind(kind);
        o.get("stim_period", e.stim_period);
        o.get("action_window", e.action_window);
        o.get("relief_duration", e.relief_duration);
        o.get("punish_duration", e.punish_duration);
        o.get("decoder_threshold", e.decoder_threshold);
        o.get("length", e.length);
        o.get("speed", e.speed);
        o.get("sensor_range", e.sensor_range);
        o.get("actuation_delay", e.actuation_delay);
        o.get("start_position", e.start_position);
        o.get("start_direction", e.start_direction);
        o.get("mean_interarrival", e.mean_interarrival);
        o.get("delta", e.delta);
        o.get("delta_random", e.delta_random);
        o.get("delta_min", e.delta_min);
        o.get("delta_max", e.delta_max);
        o.get("gate_window", e.gate_window);
        o.get("yoked", e.yoked);
        o.get("yoked_source", source);
        e.yoked_source = parse_env_kind(source);
        o.finish();
    }
    if (const Json* sj = root.child("sweep")) {
        if (!sj->is_object()) throw ConfigError("sweep: expected an object of path -> value list");
        for (auto it = sj->begin(); it != sj->end(); ++it) {
            if (!it.value().is_array() || it.value().empty())
                throw ConfigError("sweep." + it.key() + ": expected a non-empty list of values");
            c.sweep.push_back({it.key(), std::vector<Json>(it.value().begin(), it.value().end())});
        }
    }
    root.finish();
    return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    auto c = config_from_json(j);
    for (const auto& ax : c.sweep) {
        // Reject axes that do not name a schema field.
        Json probe = to_json(ExperimentConfig{});
        probe.erase("sweep");
        const auto ptr = Json::json_pointer("/" + [&] {
            std::string p = ax.path;
            for (auto& ch : p)
                if (ch == '.') ch = '/';
            return p;
        }());
        if (!probe.contains(ptr)) throw ConfigError("sweep: '" + ax.path + "' is not a config parameter");
    }
    return c;
}

inline std::string dump_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

inline std::uint64_t config_hash(const ExperimentConfig& c) { return fnv1a(to_json(c).dump()); }

/// Copy of `base` with `path` (dotted) set to `value`; the result is re-validated.
inline ExperimentConfig with_parameter(const ExperimentConfig& base, const std::string& path, const Json& value) {
    Json j = to_json(base);
    std::string p = path;
    for (auto& ch : p)
        if (ch == '.') ch = '/';
    const auto ptr = Json::json_pointer("/" + p);
    if (!j.contains(ptr) || path.rfind("sweep", 0) == 0) throw ConfigError("'" + path + "' is not a config parameter");
    j[ptr] = value;
    return config_from_json(j);
}

}  // namespace lsa
