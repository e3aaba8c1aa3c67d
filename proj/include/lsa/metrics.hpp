#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lsa/common.hpp"
#include "lsa/embodiment.hpp"
#include "lsa/network.hpp"

namespace lsa {

struct WeightSnapshot {
    TimeMs time = 0;
    std::vector<double> weights;
    friend bool operator==(const WeightSnapshot&, const WeightSnapshot&) = default;
};

/// Everything a finished run leaves behind. Metrics read only this.
struct RunRecord {
    std::string run_id;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    EnvKind env_kind = EnvKind::reinforcement;
    TimeMs duration = 0;
    TimeMs snapshot_period = 1000;
    std::size_t n_neurons = 0;
    std::vector<NeuronId> input_ids, output_ids, inhibitory_ids;
    std::vector<Synapse> synapses;  // weights are the initial values
    SpikeLog spikes;
    StimulationLog stimulation;
    std::vector<WeightSnapshot> snapshots;
    EnvTrace env_trace;
    bool faulted = false;
    std::string fault;

    std::optional<std::size_t> synapse_index(NeuronId pre, NeuronId post) const {
        for (std::size_t i = 0; i < synapses.size(); ++i)
            if (synapses[i].pre == pre && synapses[i].post == post) return i;
        return std::nullopt;
    }
    const std::vector<double>& final_weights() const { return snapshots.back().weights; }
};

struct ReactionTime {
    std::size_t episode = 0;
    double ms = 0.0;
    bool censored = false;
};

/// Per wall-contact episode: time from first in-range stimulation to the
/// decoded turn; episodes without a turn are censored at their length.
inline std::vector<ReactionTime> reaction_time_series(const RunRecord& rec) {
    if (rec.env_kind != EnvKind::wallworld && rec.env_kind != EnvKind::yoked)
        throw ConfigError("reaction_time_series: record comes from a '" + to_string(rec.env_kind) +
                          "' environment, not a wall world");
    std::vector<ReactionTime> out;
    TimeMs start = kNever, decided = kNever;
    for (const auto& e : rec.env_trace) {
        switch (e.kind) {
            case EnvEventKind::episode_start:
                start = e.time;
                decided = kNever;
                break;
            case EnvEventKind::decision:
                if (start != kNever && decided == kNever) decided = e.time;
                break;
            case EnvEventKind::episode_end:
                if (start != kNever) {
                    const bool cens = decided == kNever;
                    const TimeMs end = cens ? e.time : decided;
                    out.push_back({out.size(), static_cast<double>(end - start), cens});
                }
                start = kNever;
                decided = kNever;
                break;
            default: break;
        }
    }
    return out;
}

/// Mean of the first quartile of episodes minus mean of the last quartile
/// (at least one episode each). Positive means reactions got faster.
inline double learning_success(const std::vector<double>& series) {
    if (series.size() < 4) throw ConfigError("learning_success needs at least 4 episodes");
    const std::size_t q = std::max<std::size_t>(1, series.size() / 4);
    const double head = std::accumulate(series.begin(), series.begin() + q, 0.0) / q;
    const double tail = std::accumulate(series.end() - q, series.end(), 0.0) / q;
    return head - tail;
}

inline double learning_success(const std::vector<ReactionTime>& series) {
    std::vector<double> v;
    v.reserve(series.size());
    for (const auto& r : series) v.push_back(r.ms);
    return learning_success(v);
}

enum class SnrFlag { finite, infinite, undefined };

struct SnrResult {
    double value = 0.0;
    SnrFlag flag = SnrFlag::finite;
    double evoked_rate = 0.0;    // output spikes per ms inside response windows
    double baseline_rate = 0.0;  // output spikes per ms elsewhere
};

/// Evoked/baseline output rate ratio. Response windows are (s, s + window]
/// after each delivered stimulation time s, merged where they overlap.
inline SnrResult snr(const RunRecord& rec, int response_window = 20) {
    std::vector<TimeMs> stim;
    for (const auto& e : rec.stimulation)
        if (e.delivered) stim.push_back(e.time);
    if (stim.empty()) throw ConfigError("snr: no delivered stimulation in record");
    std::sort(stim.begin(), stim.end());
    stim.erase(std::unique(stim.begin(), stim.end()), stim.end());

    std::vector<std::pair<TimeMs, TimeMs>> windows;  // (lo, hi]
    for (auto s : stim) {
        const TimeMs lo = s, hi = std::min<TimeMs>(s + response_window, rec.duration);
        if (!windows.empty() && lo <= windows.back().second)
            windows.back().second = std::max(windows.back().second, hi);
        else
            windows.emplace_back(lo, hi);
    }
    TimeMs evoked_ms = 0;
    for (auto [lo, hi] : windows) evoked_ms += std::max<TimeMs>(0, hi - lo);
    const TimeMs other_ms = rec.duration - evoked_ms;

    std::vector<char> is_out(rec.n_neurons, 0);
    for (auto id : rec.output_ids) is_out[id] = 1;
    std::size_t evoked = 0, other = 0;
    std::size_t w = 0;
    for (const auto& sp : rec.spikes) {  // spikes are time-ordered
        if (!is_out[sp.neuron]) continue;
        while (w < windows.size() && windows[w].second < sp.time) ++w;
        if (w < windows.size() && sp.time > windows[w].first && sp.time <= windows[w].second)
            ++evoked;
        else
            ++other;
    }
    SnrResult r;
    if (evoked + other == 0) {
        r.value = std::numeric_limits<double>::quiet_NaN();
        r.flag = SnrFlag::undefined;
        return r;
    }
    r.evoked_rate = evoked_ms > 0 ? static_cast<double>(evoked) / evoked_ms : 0.0;
    r.baseline_rate = other_ms > 0 ? static_cast<double>(other) / other_ms : 0.0;
    if (r.baseline_rate == 0.0) {
        r.value = std::numeric_limits<double>::infinity();
        r.flag = SnrFlag::infinite;
    } else {
        r.value = r.evoked_rate / r.baseline_rate;
    }
    return r;
}

/// Fraction of target stimulation events that were delivered, over target
/// times in [from, to].
inline double prediction_error_rate(const RunRecord& rec, TimeMs from = 0,
                                    TimeMs to = std::numeric_limits<TimeMs>::max()) {
    if (rec.env_kind != EnvKind::predictable_pair)
        throw ConfigError("prediction_error_rate: record is not from a predictable_pair environment");
    std::size_t total = 0, delivered = 0;
    for (const auto& e : rec.env_trace) {
        if (e.kind != EnvEventKind::target || e.time < from || e.time > to) continue;
        ++total;
        if (e.value > 0.5) ++delivered;
    }
    if (total == 0) throw ConfigError("prediction_error_rate: no target events in range");
    return static_cast<double>(delivered) / static_cast<double>(total);
}

/// Snapshot series of one synapse's weight.
inline std::vector<std::pair<TimeMs, double>> weight_trajectory(const RunRecord& rec, NeuronId pre, NeuronId post) {
    const auto idx = rec.synapse_index(pre, post);
    if (!idx) throw ConfigError("weight_trajectory: no synapse " + std::to_string(pre) + "->" + std::to_string(post));
    std::vector<std::pair<TimeMs, double>> out;
    out.reserve(rec.snapshots.size());
    for (const auto& s : rec.snapshots) out.emplace_back(s.time, s.weights[*idx]);
    return out;
}

/// Nearest-neighbour spike intervals between a presynaptic and a
/// postsynaptic neuron, over post spikes in [from, to]: for each post spike,
/// the lag since the latest pre spike (potentiation side) and the lag to the
/// next pre spike (depression side).
struct PairingIntervals {
    double mean_pre_to_post = std::numeric_limits<double>::quiet_NaN();
    double mean_post_to_pre = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_pre_to_post = 0;
    std::size_t n_post_to_pre = 0;
};

inline PairingIntervals pairing_intervals(const SpikeLog& spikes, NeuronId pre, NeuronId post, TimeMs from, TimeMs to) {
    std::vector<TimeMs> pre_t, post_t;
    for (const auto& s : spikes) {
        if (s.neuron == pre) pre_t.push_back(s.time);
        if (s.neuron == post) post_t.push_back(s.time);
    }
    PairingIntervals r;
    double sum_p = 0.0, sum_d = 0.0;
    for (auto tp : post_t) {
        if (tp < from || tp > to) continue;
        auto it = std::upper_bound(pre_t.begin(), pre_t.end(), tp);  // first pre strictly after
        if (it != pre_t.end()) {
            sum_d += static_cast<double>(*it - tp);
            ++r.n_post_to_pre;
        }
        auto jt = std::lower_bound(pre_t.begin(), pre_t.end(), tp);  // first pre >= tp
        if (jt != pre_t.begin()) {
            sum_p += static_cast<double>(tp - *std::prev(jt));
            ++r.n_pre_to_post;
        }
    }
    if (r.n_pre_to_post) r.mean_pre_to_post = sum_p / r.n_pre_to_post;
    if (r.n_post_to_pre) r.mean_post_to_pre = sum_d / r.n_post_to_pre;
    return r;
}

}  // namespace lsa
