#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsa/common.hpp"
#include "lsa/network.hpp"

namespace lsa {

enum class EnvKind { reinforcement, weakening, wallworld, predictable_pair, yoked };

inline std::string to_string(EnvKind k) {
    switch (k) {
        case EnvKind::reinforcement: return "reinforcement";
        case EnvKind::weakening: return "weakening";
        case EnvKind::wallworld: return "wallworld";
        case EnvKind::predictable_pair: return "predictable_pair";
        case EnvKind::yoked: return "yoked";
    }
    return "?";
}

inline EnvKind parse_env_kind(const std::string& s) {
    if (s == "reinforcement") return EnvKind::reinforcement;
    if (s == "weakening") return EnvKind::weakening;
    if (s == "wallworld") return EnvKind::wallworld;
    if (s == "predictable_pair") return EnvKind::predictable_pair;
    if (s == "yoked") return EnvKind::yoked;
    throw ConfigError("environment.kind: unknown environment '" + s + "'");
}

enum class Action { none, turn };

/// Motor decoder: turn iff the output spike count in the window reaches the threshold.
inline Action decode_action(int count, int threshold) noexcept {
    return count >= threshold ? Action::turn : Action::none;
}

inline Action decode_action(std::span<const int> per_output_counts, int threshold) noexcept {
    int total = 0;
    for (int c : per_output_counts) total += c;
    return decode_action(total, threshold);
}

/// Sliding count of output spikes over the last `window` ms, i.e. (t - window, t].
class SpikeWindow {
public:
    explicit SpikeWindow(int window = 20) : window_(std::max(1, window)) {}

    void add(TimeMs t, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) times_.push_back(t);
    }
    int count(TimeMs t) {
        while (!times_.empty() && times_.front() <= t - window_) times_.pop_front();
        return static_cast<int>(times_.size());
    }
    void clear() { times_.clear(); }

private:
    int window_;
    std::deque<TimeMs> times_;
};

enum class EnvEventKind { episode_start, decision, turn, episode_end, bounce, relief, punish, anticipatory, target };

inline std::string to_string(EnvEventKind k) {
    switch (k) {
        case EnvEventKind::episode_start: return "episode_start";
        case EnvEventKind::decision: return "decision";
        case EnvEventKind::turn: return "turn";
        case EnvEventKind::episode_end: return "episode_end";
        case EnvEventKind::bounce: return "bounce";
        case EnvEventKind::relief: return "relief";
        case EnvEventKind::punish: return "punish";
        case EnvEventKind::anticipatory: return "anticipatory";
        case EnvEventKind::target: return "target";
    }
    return "?";
}

inline EnvEventKind parse_env_event(const std::string& s) {
    for (auto k : {EnvEventKind::episode_start, EnvEventKind::decision, EnvEventKind::turn, EnvEventKind::episode_end,
                   EnvEventKind::bounce, EnvEventKind::relief, EnvEventKind::punish, EnvEventKind::anticipatory,
                   EnvEventKind::target})
        if (to_string(k) == s) return k;
    throw ConfigError("unknown environment event '" + s + "'");
}

struct EnvEvent {
    TimeMs time = 0;
    EnvEventKind kind = EnvEventKind::episode_start;
    double value = 0.0;
    friend bool operator==(const EnvEvent&, const EnvEvent&) = default;
};
using EnvTrace = std::vector<EnvEvent>;

/// Parameters for every environment variant; each variant reads its own.
struct EnvSpec {
    EnvKind kind = EnvKind::reinforcement;
    int stim_period = 10;
    int action_window = 20;
    int relief_duration = 50;
    int punish_duration = 50;
    int decoder_threshold = 1;
    // wall world
    double length = 100.0;
    double speed = 0.1;
    double sensor_range = 5.0;
    int actuation_delay = 0;
    double start_position = 50.0;
    int start_direction = 1;
    // predictable pair
    double mean_interarrival = 500.0;
    int delta = 10;
    bool delta_random = false;
    int delta_min = 1;
    int delta_max = 200;
    int gate_window = 5;
    // yoked control: run a controllable source first, then replay it
    bool yoked = false;
    EnvKind yoked_source = EnvKind::wallworld;

    void validate() const {
        if (stim_period < 1) throw ConfigError("environment.stim_period must be >= 1");
        if (action_window < 1) throw ConfigError("environment.action_window must be >= 1");
        if (relief_duration < 0 || punish_duration < 0) throw ConfigError("environment durations must be >= 0");
        if (decoder_threshold < 1) throw ConfigError("environment.decoder_threshold must be >= 1");
        if (!(length > 0.0) || !(speed > 0.0) || !(sensor_range >= 0.0))
            throw ConfigError("environment: length and speed must be > 0, sensor_range >= 0");
        if (actuation_delay < 0) throw ConfigError("environment.actuation_delay must be >= 0");
        if (!(start_position >= 0.0 && start_position <= length))
            throw ConfigError("environment.start_position must lie in [0, length]");
        if (start_direction != 1 && start_direction != -1) throw ConfigError("environment.start_direction must be +1 or -1");
        if (!(mean_interarrival >= 1.0)) throw ConfigError("environment.mean_interarrival must be >= 1");
        if (!delta_random && delta <= 0) throw ConfigError("environment.delta must be > 0");
        if (delta_random && (delta_min < 1 || delta_max < delta_min))
            throw ConfigError("environment.delta_min/delta_max must satisfy 1 <= min <= max");
        if (gate_window < 1) throw ConfigError("environment.gate_window must be >= 1");
    }
};

/// What the environment does at the boundary between step t and t+1.
struct EnvOutput {
    std::vector<NeuronId> stimulate;   // deliver at t+1
    std::vector<NeuronId> suppressed;  // withheld at t+1, logged delivered=false
};

/// Closed-loop environment. step() sees the output and inhibitory spikes
/// emitted at time t and decides the stimulation for t+1.
class Environment {
public:
    virtual ~Environment() = default;
    virtual EnvKind kind() const = 0;
    /// Whether some output pattern can change the stimulation source.
    virtual bool controllable() const = 0;
    virtual EnvOutput step(TimeMs t, std::span<const NeuronId> output_spikes,
                           std::span<const NeuronId> inhibitory_spikes) = 0;

    const EnvTrace& trace() const noexcept { return trace_; }

protected:
    void emit(TimeMs t, EnvEventKind k, double v = 0.0) { trace_.push_back({t, k, v}); }
    EnvTrace trace_;
};

/// Periodic stimulation that an output spike switches off for relief_duration ms.
class ReinforcementEnv final : public Environment {
public:
    ReinforcementEnv(const EnvSpec& spec, std::vector<NeuronId> inputs) : spec_(spec), inputs_(std::move(inputs)) {}

    EnvKind kind() const override { return EnvKind::reinforcement; }
    bool controllable() const override { return true; }

    EnvOutput step(TimeMs t, std::span<const NeuronId> outs, std::span<const NeuronId>) override {
        if (!outs.empty()) {
            if (!relieved(t)) emit(t, EnvEventKind::relief);
            last_output_ = t;
        }
        EnvOutput o;
        const TimeMs next = t + 1;
        if (next % spec_.stim_period == 0 && !relieved(t)) o.stimulate = inputs_;
        return o;
    }

private:
    bool relieved(TimeMs t) const {
        if (last_output_ == kNever) return false;
        return t - last_output_ < spec_.action_window || t + 1 - last_output_ <= spec_.relief_duration;
    }

    EnvSpec spec_;
    std::vector<NeuronId> inputs_;
    TimeMs last_output_ = kNever;
};

/// Silent until an output spike; then periodic stimulation for punish_duration ms.
class WeakeningEnv final : public Environment {
public:
    WeakeningEnv(const EnvSpec& spec, std::vector<NeuronId> inputs) : spec_(spec), inputs_(std::move(inputs)) {}

    EnvKind kind() const override { return EnvKind::weakening; }
    bool controllable() const override { return true; }

    EnvOutput step(TimeMs t, std::span<const NeuronId> outs, std::span<const NeuronId>) override {
        const TimeMs next = t + 1;
        if (active_ && next > until_) active_ = false;
        if (!outs.empty()) {
            if (!active_) {
                active_ = true;
                start_ = next;
                emit(t, EnvEventKind::punish);
            }
            until_ = t + spec_.punish_duration;
        }
        EnvOutput o;
        if (active_ && next <= until_ && (next - start_) % spec_.stim_period == 0) o.stimulate = inputs_;
        return o;
    }

private:
    EnvSpec spec_;
    std::vector<NeuronId> inputs_;
    bool active_ = false;
    TimeMs start_ = 0;
    TimeMs until_ = 0;
};

/// Robot on a segment [0, length]. A forward-facing distance sensor
/// stimulates the inputs while the robot heads toward a wall closer than
/// sensor_range. Output spikes decoded while the sensor is active issue a
/// turn that takes effect actuation_delay ms later. At a wall the robot
/// bounces.
class WallWorldEnv final : public Environment {
public:
    WallWorldEnv(const EnvSpec& spec, std::vector<NeuronId> inputs)
        : spec_(spec),
          inputs_(std::move(inputs)),
          decoder_(spec.action_window),
          position_(spec.start_position),
          direction_(spec.start_direction) {}

    EnvKind kind() const override { return EnvKind::wallworld; }
    bool controllable() const override { return true; }

    double position() const noexcept { return position_; }
    int direction() const noexcept { return direction_; }
    bool sensing() const noexcept { return in_episode_; }

    EnvOutput step(TimeMs t, std::span<const NeuronId> outs, std::span<const NeuronId>) override {
        decoder_.add(t, outs.size());
        const int count = decoder_.count(t);
        if (in_episode_ && !decided_ && decode_action(count, spec_.decoder_threshold) == Action::turn) {
            decided_ = true;
            pending_turn_ = t + spec_.actuation_delay;
            emit(t, EnvEventKind::decision, static_cast<double>(count));
        }
        if (pending_turn_ && t >= *pending_turn_) {
            direction_ = -direction_;
            pending_turn_.reset();
            emit(t, EnvEventKind::turn, position_);
        }

        position_ += direction_ * spec_.speed;
        if (position_ <= 0.0 || position_ >= spec_.length) {
            position_ = std::clamp(position_, 0.0, spec_.length);
            direction_ = -direction_;
            pending_turn_.reset();
            emit(t, EnvEventKind::bounce, position_);
        }

        const TimeMs next = t + 1;
        const bool in_range = wall_ahead_distance() < spec_.sensor_range;
        if (in_range && !in_episode_) {
            in_episode_ = true;
            decided_ = false;
            episode_start_ = next;
            emit(next, EnvEventKind::episode_start, position_);
        } else if (!in_range && in_episode_) {
            in_episode_ = false;
            pending_turn_.reset();
            emit(next, EnvEventKind::episode_end, position_);
        }

        EnvOutput o;
        if (in_episode_ && (next - episode_start_) % spec_.stim_period == 0) o.stimulate = inputs_;
        return o;
    }

private:
    double wall_ahead_distance() const { return direction_ > 0 ? spec_.length - position_ : position_; }

    EnvSpec spec_;
    std::vector<NeuronId> inputs_;
    SpikeWindow decoder_;
    double position_;
    int direction_;
    bool in_episode_ = false;
    bool decided_ = false;
    TimeMs episode_start_ = 0;
    std::optional<TimeMs> pending_turn_;
};

/// Anticipatory stimulus at Poisson times T1, target stimulus at T2 = T1 + delta
/// unless an inhibitory spike fell in [T2 - gate_window, T2).
class PredictablePairEnv final : public Environment {
public:
    PredictablePairEnv(const EnvSpec& spec, std::vector<NeuronId> anticipatory, std::vector<NeuronId> target,
                       std::uint64_t seed)
        : spec_(spec),
          anticipatory_(std::move(anticipatory)),
          target_(std::move(target)),
          rng_(combine_seed(seed, kEnvStream)) {
        next_t1_ = draw_gap();
    }

    EnvKind kind() const override { return EnvKind::predictable_pair; }
    bool controllable() const override { return true; }

    EnvOutput step(TimeMs t, std::span<const NeuronId>, std::span<const NeuronId> inh) override {
        if (!inh.empty()) last_inhibitory_ = t;
        const TimeMs next = t + 1;
        EnvOutput o;
        if (next == next_t1_) {
            o.stimulate = anticipatory_;
            const int d = spec_.delta_random
                              ? std::uniform_int_distribution<int>(spec_.delta_min, spec_.delta_max)(rng_)
                              : spec_.delta;
            pending_.push_back(next + d);
            std::sort(pending_.begin(), pending_.end());
            emit(next, EnvEventKind::anticipatory, d);
            next_t1_ = next + draw_gap();
        }
        bool due = false;
        while (!pending_.empty() && pending_.front() <= next) {
            due = due || pending_.front() == next;
            pending_.erase(pending_.begin());
        }
        if (due) {
            const bool blocked = last_inhibitory_ != kNever && last_inhibitory_ >= next - spec_.gate_window;
            emit(next, EnvEventKind::target, blocked ? 0.0 : 1.0);
            auto& into = blocked ? o.suppressed : o.stimulate;
            into.insert(into.end(), target_.begin(), target_.end());
        }
        return o;
    }

private:
    TimeMs draw_gap() {
        const double g = std::exponential_distribution<double>(1.0 / spec_.mean_interarrival)(rng_);
        return std::max<TimeMs>(1, static_cast<TimeMs>(std::llround(g)));
    }

    EnvSpec spec_;
    std::vector<NeuronId> anticipatory_, target_;
    Rng rng_;
    TimeMs next_t1_ = 0;
    TimeMs last_inhibitory_ = kNever;
    std::vector<TimeMs> pending_;
};

/// Replays a recorded delivered-stimulation schedule; outputs never affect
/// it. Output spikes are still decoded into decisions, and bursts of the
/// schedule are traced as episodes, so reaction times can be scored with
/// the same rules as the source run. Each episode is scored over a fixed
/// window of `episode_cap` ms from its onset.
class YokedEnv final : public Environment {
public:
    YokedEnv(const EnvSpec& spec, const StimulationLog& source, TimeMs episode_cap)
        : spec_(spec), decoder_(spec.action_window), cap_(episode_cap) {
        for (const auto& e : source)
            if (e.delivered) schedule_[e.time].push_back(e.input);
        if (schedule_.empty()) throw ConfigError("yoked environment needs a non-empty source stimulation log");
    }

    EnvKind kind() const override { return EnvKind::yoked; }
    bool controllable() const override { return false; }

    std::size_t scheduled_count() const {
        std::size_t n = 0;
        for (const auto& [t, ids] : schedule_) n += ids.size();
        return n;
    }

    EnvOutput step(TimeMs t, std::span<const NeuronId> outs, std::span<const NeuronId>) override {
        decoder_.add(t, outs.size());
        const int count = decoder_.count(t);
        if (in_episode_ && !decided_ && decode_action(count, spec_.decoder_threshold) == Action::turn) {
            decided_ = true;
            emit(t, EnvEventKind::decision, static_cast<double>(count));
        }
        const TimeMs next = t + 1;
        if (in_episode_ && next >= episode_start_ + cap_) {
            in_episode_ = false;
            emit(next, EnvEventKind::episode_end);
        }
        EnvOutput o;
        if (auto it = schedule_.find(next); it != schedule_.end()) {
            o.stimulate = it->second;
            if (!in_episode_ && (last_stim_ == kNever || next - last_stim_ > spec_.stim_period)) {
                in_episode_ = true;
                decided_ = false;
                episode_start_ = next;
                emit(next, EnvEventKind::episode_start);
            }
            last_stim_ = next;
        }
        return o;
    }

private:
    EnvSpec spec_;
    std::map<TimeMs, std::vector<NeuronId>> schedule_;
    SpikeWindow decoder_;
    TimeMs cap_;
    bool in_episode_ = false;
    bool decided_ = false;
    TimeMs episode_start_ = 0;
    TimeMs last_stim_ = kNever;
};

/// Longest possible wall-world episode: the approach from sensor range to the wall.
inline TimeMs wallworld_episode_cap(const EnvSpec& spec) {
    return static_cast<TimeMs>(std::ceil(spec.sensor_range / spec.speed)) + 1;
}

inline std::unique_ptr<Environment> make_yoked(const EnvSpec& spec, const StimulationLog& source_log) {
    return std::make_unique<YokedEnv>(spec, source_log, wallworld_episode_cap(spec));
}

}  // namespace lsa
