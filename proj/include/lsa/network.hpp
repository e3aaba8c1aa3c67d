#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsa/common.hpp"
#include "lsa/neuron.hpp"
#include "lsa/plasticity.hpp"

namespace lsa {

struct Synapse {
    NeuronId pre = 0;
    NeuronId post = 0;
    double weight = 0.0;
    int delay = 1;  // ms, >= 1
    bool plastic = true;
};

struct SpikeEvent {
    TimeMs time = 0;
    NeuronId neuron = 0;
    friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};
using SpikeLog = std::vector<SpikeEvent>;

enum class StimulusMode { forced_spike, current_pulse };

struct StimulationEvent {
    TimeMs time = 0;
    NeuronId input = 0;
    bool delivered = true;
    friend bool operator==(const StimulationEvent&, const StimulationEvent&) = default;
};
using StimulationLog = std::vector<StimulationEvent>;

/// Run-wide simulation constants that are not part of the topology.
struct SimParams {
    double noise_sd = 3.7;          // isolated RS neuron fires ~1.5 Hz
    double synaptic_gain = 1.0;     // current per unit weight on spike arrival
    double pulse_current = 40.0;    // current-pulse stimulus amplitude
    StimulusMode stimulus_mode = StimulusMode::forced_spike;
    bool record_spikes = true;
};

/// Spike in flight.
struct Arrival {
    TimeMs sent = 0;
    TimeMs arrival = 0;
    NeuronId pre = 0;
    NeuronId post = 0;
    double current = 0.0;
};

/// Ring of per-millisecond slots; slot (t mod span) holds arrivals due at t.
class DelayQueue {
public:
    explicit DelayQueue(int max_delay = 1) : slots_(static_cast<std::size_t>(max_delay) + 1) {}

    void push(const Arrival& a) {
        slots_[slot(a.arrival)].push_back(a);
        ++enqueued_;
    }

    /// Hands every arrival due at t to fn and empties that slot.
    template <class Fn>
    void deliver(TimeMs t, Fn&& fn) {
        auto& s = slots_[slot(t)];
        for (const auto& a : s) fn(a);
        delivered_ += s.size();
        s.clear();
    }

    std::size_t pending() const noexcept { return enqueued_ - delivered_; }
    std::size_t enqueued() const noexcept { return enqueued_; }
    std::size_t delivered() const noexcept { return delivered_; }

    /// Earliest pending arrival time, or nullopt when empty.
    std::optional<TimeMs> earliest() const {
        std::optional<TimeMs> best;
        for (const auto& s : slots_)
            for (const auto& a : s)
                if (!best || a.arrival < *best) best = a.arrival;
        return best;
    }

    void clear() {
        for (auto& s : slots_) s.clear();
        enqueued_ = delivered_ = 0;
    }

private:
    std::size_t slot(TimeMs t) const noexcept {
        const auto n = static_cast<TimeMs>(slots_.size());
        return static_cast<std::size_t>(((t % n) + n) % n);
    }

    std::vector<std::vector<Arrival>> slots_;
    std::size_t enqueued_ = 0;
    std::size_t delivered_ = 0;
};

/// Everything a builder hands to Network.
struct NetworkBlueprint {
    std::vector<NeuronParams> neurons;
    std::vector<Synapse> synapses;
    std::vector<NeuronId> input_ids;
    std::vector<NeuronId> output_ids;
};

/// Clock-driven network of quadratic spiking neurons with per-synapse
/// conduction delays. Single-threaded; move it between threads if needed.
class Network {
public:
    Network(NetworkBlueprint bp, SimParams sim, StdpConfig stdp, std::uint64_t seed)
        : params_(std::move(bp.neurons)),
          synapses_(std::move(bp.synapses)),
          input_ids_(std::move(bp.input_ids)),
          output_ids_(std::move(bp.output_ids)),
          sim_(sim),
          stdp_(stdp) {
        validate();
        const auto n = params_.size();
        incoming_.resize(n);
        outgoing_.resize(n);
        int max_delay = 1;
        for (std::size_t i = 0; i < synapses_.size(); ++i) {
            const auto& s = synapses_[i];
            incoming_[s.post].push_back(static_cast<std::uint32_t>(i));
            outgoing_[s.pre].push_back(static_cast<std::uint32_t>(i));
            max_delay = std::max(max_delay, s.delay);
        }
        for (NeuronId i = 0; i < n; ++i)
            if (params_[i].is_inhibitory()) inhibitory_ids_.push_back(i);
        is_input_.assign(n, false);
        for (auto id : input_ids_) is_input_[id] = true;
        initial_weights_.reserve(synapses_.size());
        for (const auto& s : synapses_) initial_weights_.push_back(s.weight);
        queue_ = DelayQueue(max_delay);
        reset(seed);
    }

    /// Re-initialise state, clock, queue and logs; restore initial weights.
    void reset(std::uint64_t seed) {
        const auto n = params_.size();
        state_.resize(n);
        for (std::size_t i = 0; i < n; ++i) state_[i] = NeuronState::resting(params_[i]);
        for (std::size_t i = 0; i < synapses_.size(); ++i) synapses_[i].weight = initial_weights_[i];
        last_spike_.assign(n, kNever);
        prev_spike_.assign(n, kNever);
        forced_.assign(n, false);
        pulse_.assign(n, 0.0);
        syn_current_.assign(n, 0.0);
        spiked_.clear();
        spike_log_.clear();
        stim_log_.clear();
        queue_.clear();
        clock_ = 0;
        total_spikes_ = 0;
        rng_.seed(combine_seed(seed, kNoiseStream));
        noise_ = std::normal_distribution<double>(0.0, 1.0);
    }

    /// Queue stimulation of input neurons for the next advance().
    void inject_stimulus(std::span<const NeuronId> targets) { inject_stimulus(targets, sim_.stimulus_mode); }

    void inject_stimulus(std::span<const NeuronId> targets, StimulusMode mode) {
        for (auto id : targets)
            if (id >= size() || !is_input_[id])
                throw ConfigError("stimulus target " + std::to_string(id) + " is not an input neuron");
        for (auto id : targets) {
            if (mode == StimulusMode::forced_spike)
                forced_[id] = true;
            else
                pulse_[id] += sim_.pulse_current;
            stim_log_.push_back({clock_ + 1, id, true});
        }
    }

    /// Record a stimulus that the environment withheld (e.g. suppressed target).
    void log_suppressed(TimeMs t, NeuronId input) { stim_log_.push_back({t, input, false}); }

    /// Advance the clock by 1 ms. Returns the neurons that fired at the new time.
    const std::vector<NeuronId>& advance(std::span<const double> external = {}) {
        const TimeMs t = ++clock_;
        const auto n = params_.size();
        std::fill(syn_current_.begin(), syn_current_.end(), 0.0);
        queue_.deliver(t, [&](const Arrival& a) {
            syn_current_[a.post] += a.current;
            if (on_delivery_) on_delivery_(a);
        });

        spiked_.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const double noise = sim_.noise_sd * noise_(rng_);
            auto& st = state_[i];
            if (forced_[i]) {
                force_spike(st, params_[i]);
            } else {
                double current = syn_current_[i] + pulse_[i] + noise;
                if (!external.empty()) current += external[i];
                integrate_step(st, params_[i], current);
                if (!std::isfinite(st.v) || !std::isfinite(st.u))
                    throw NumericalFault(static_cast<NeuronId>(i), t);
            }
            if (st.fired) spiked_.push_back(static_cast<NeuronId>(i));
        }
        std::fill(forced_.begin(), forced_.end(), false);
        std::fill(pulse_.begin(), pulse_.end(), 0.0);

        for (auto id : spiked_) {
            prev_spike_[id] = last_spike_[id];
            last_spike_[id] = t;
            if (sim_.record_spikes) spike_log_.push_back({t, id});
            const double sign = params_[id].is_inhibitory() ? -1.0 : 1.0;
            for (auto idx : outgoing_[id]) {
                const auto& s = synapses_[idx];
                queue_.push({t, t + s.delay, s.pre, s.post, sign * sim_.synaptic_gain * s.weight});
            }
        }
        for (auto id : spiked_) on_spike_update(*this, id, t, stdp_);
        total_spikes_ += spiked_.size();
        return spiked_;
    }

    // --- topology access -------------------------------------------------
    std::size_t size() const noexcept { return params_.size(); }
    TimeMs clock() const noexcept { return clock_; }
    const std::vector<Synapse>& synapses() const noexcept { return synapses_; }
    const Synapse& synapse(std::size_t idx) const { return synapses_.at(idx); }
    Synapse& synapse_mut(std::size_t idx) { return synapses_[idx]; }
    std::span<const std::uint32_t> incoming(NeuronId n) const { return incoming_[n]; }
    std::span<const std::uint32_t> outgoing(NeuronId n) const { return outgoing_[n]; }
    const NeuronParams& params(NeuronId n) const { return params_.at(n); }
    const NeuronState& state(NeuronId n) const { return state_.at(n); }
    const std::vector<NeuronId>& input_ids() const noexcept { return input_ids_; }
    const std::vector<NeuronId>& output_ids() const noexcept { return output_ids_; }
    const std::vector<NeuronId>& inhibitory_ids() const noexcept { return inhibitory_ids_; }
    bool is_input(NeuronId n) const { return is_input_.at(n); }

    std::optional<std::size_t> find_synapse(NeuronId pre, NeuronId post) const {
        if (pre >= size()) return std::nullopt;
        for (auto idx : outgoing_[pre])
            if (synapses_[idx].post == post) return idx;
        return std::nullopt;
    }

    double weight(std::size_t idx) const { return synapses_.at(idx).weight; }
    void set_weight(std::size_t idx, double w) { synapses_.at(idx).weight = clamp_weight(w, stdp_); }
    std::vector<double> weights() const {
        std::vector<double> w;
        w.reserve(synapses_.size());
        for (const auto& s : synapses_) w.push_back(s.weight);
        return w;
    }
    const std::vector<double>& initial_weights() const noexcept { return initial_weights_; }

    // --- activity --------------------------------------------------------
    TimeMs last_spike(NeuronId n) const { return last_spike_[n]; }
    TimeMs previous_spike(NeuronId n) const { return prev_spike_[n]; }
    const SpikeLog& spike_log() const noexcept { return spike_log_; }
    const StimulationLog& stimulation_log() const noexcept { return stim_log_; }
    const DelayQueue& queue() const noexcept { return queue_; }
    std::size_t total_spikes() const noexcept { return total_spikes_; }

    const SimParams& sim() const noexcept { return sim_; }
    const StdpConfig& stdp() const noexcept { return stdp_; }
    StdpConfig& stdp_mut() noexcept { return stdp_; }

    /// Test hook: observe every delivered arrival.
    void set_delivery_observer(std::function<void(const Arrival&)> fn) { on_delivery_ = std::move(fn); }

private:
    void validate() const {
        const auto n = params_.size();
        if (n == 0) throw ConfigError("network has no neurons");
        for (std::size_t i = 0; i < n; ++i)
            if (!params_[i].finite()) throw ConfigError("neuron " + std::to_string(i) + " has non-finite parameters");
        for (const auto& s : synapses_) {
            if (s.pre >= n || s.post >= n) throw ConfigError("synapse endpoint out of range");
            if (s.pre == s.post) throw ConfigError("self-loop on neuron " + std::to_string(s.pre));
            if (s.delay < 1) throw ConfigError("synapse delay must be >= 1 ms");
            if (!(s.weight >= 0.0 && s.weight <= stdp_.w_max))
                throw ConfigError("synapse weight outside [0, w_max]");
        }
        for (auto id : input_ids_)
            if (id >= n) throw ConfigError("input id out of range");
        for (auto id : output_ids_)
            if (id >= n) throw ConfigError("output id out of range");
    }

    std::vector<NeuronParams> params_;
    std::vector<NeuronState> state_;
    std::vector<Synapse> synapses_;
    std::vector<double> initial_weights_;
    std::vector<std::vector<std::uint32_t>> incoming_, outgoing_;
    std::vector<NeuronId> input_ids_, output_ids_, inhibitory_ids_;
    std::vector<bool> is_input_;

    SimParams sim_;
    StdpConfig stdp_;

    DelayQueue queue_;
    std::vector<TimeMs> last_spike_;
    std::vector<TimeMs> prev_spike_;
    std::vector<bool> forced_;
    std::vector<double> pulse_;
    std::vector<double> syn_current_;
    std::vector<NeuronId> spiked_;
    SpikeLog spike_log_;
    StimulationLog stim_log_;
    TimeMs clock_ = 0;
    std::size_t total_spikes_ = 0;

    Rng rng_;
    std::normal_distribution<double> noise_;
    std::function<void(const Arrival&)> on_delivery_;
};

}  // namespace lsa
