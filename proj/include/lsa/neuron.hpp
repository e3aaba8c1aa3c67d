#pragma once

#include <cmath>

namespace lsa {

enum class NeuronKind { excitatory, inhibitory };

/// Constants of the two-variable quadratic spiking model
///   v' = 0.04 v^2 + 5 v + 140 - u + I
///   u' = a (b v - u)
/// with reset v <- c, u <- u + d once v reaches the cutoff.
struct NeuronParams {
    double a = 0.02;
    double b = 0.2;
    double c = -65.0;
    double d = 8.0;
    NeuronKind kind = NeuronKind::excitatory;

    static constexpr NeuronParams regular_spiking() { return {0.02, 0.2, -65.0, 8.0, NeuronKind::excitatory}; }
    static constexpr NeuronParams fast_spiking() { return {0.1, 0.2, -65.0, 2.0, NeuronKind::inhibitory}; }
    static constexpr NeuronParams for_kind(NeuronKind k) {
        return k == NeuronKind::inhibitory ? fast_spiking() : regular_spiking();
    }

    bool is_inhibitory() const noexcept { return kind == NeuronKind::inhibitory; }
    bool finite() const noexcept {
        return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
    }
};

struct NeuronState {
    double v = -65.0;
    double u = -13.0;
    bool fired = false;

    static NeuronState resting(const NeuronParams& p) noexcept { return {p.c, p.b * p.c, false}; }
};

inline constexpr double kSpikeCutoff = 30.0;

/// One 1 ms step: v is integrated in two 0.5 ms half-steps, then u.
/// Returns true if the neuron fired; state is already reset in that case.
inline bool integrate_step(NeuronState& s, const NeuronParams& p, double current) noexcept {
    s.v += 0.5 * (0.04 * s.v * s.v + 5.0 * s.v + 140.0 - s.u + current);
    s.v += 0.5 * (0.04 * s.v * s.v + 5.0 * s.v + 140.0 - s.u + current);
    s.u += p.a * (p.b * s.v - s.u);
    s.fired = s.v >= kSpikeCutoff;
    if (s.fired) {
        s.v = p.c;
        s.u += p.d;
    }
    return s.fired;
}

/// Forced spike: the neuron fires this step regardless of its potential.
inline void force_spike(NeuronState& s, const NeuronParams& p) noexcept {
    s.fired = true;
    s.v = p.c;
    s.u += p.d;
}

}  // namespace lsa
