#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "lsa/network.hpp"
#include "lsa/plasticity.hpp"

using namespace lsa;

namespace {

StdpConfig rect(double a_plus = 0.1, double a_minus = 0.1) {
    StdpConfig c;
    c.kernel = StdpKernel::rectangular;
    c.a_plus = a_plus;
    c.a_minus = a_minus;
    return c;
}

SimParams silent() {
    SimParams s;
    s.noise_sd = 0.0;
    s.synaptic_gain = 0.0;  // spikes carry no current; only forced spikes occur
    return s;
}

// Network whose every neuron is an input, so spike times can be dictated.
Network forced_net(std::vector<Synapse> syn, std::size_t n, StdpConfig cfg) {
    NetworkBlueprint bp;
    bp.neurons.assign(n, NeuronParams::regular_spiking());
    bp.synapses = std::move(syn);
    for (NeuronId i = 0; i < n; ++i) bp.input_ids.push_back(i);
    return Network(bp, silent(), cfg, 1);
}

void drive(Network& net, const std::vector<std::vector<NeuronId>>& schedule) {
    for (std::size_t t = 1; t < schedule.size(); ++t) {
        net.inject_stimulus(schedule[t]);
        net.advance();
    }
}

// Direct enumeration of the pairs each scheme uses, for one synapse.
double enumerate_pairs(const std::vector<TimeMs>& pre, const std::vector<TimeMs>& post, const StdpConfig& cfg) {
    struct Ev {
        TimeMs t;
        int who;  // 0 pre, 1 post
    };
    std::vector<Ev> ev;
    for (auto t : pre) ev.push_back({t, 0});
    for (auto t : post) ev.push_back({t, 1});
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.t < b.t || (a.t == b.t && a.who < b.who); });
    double total = 0.0;
    std::vector<TimeMs> pre_seen, post_seen;
    for (const auto& e : ev) {
        auto& mine = e.who == 0 ? pre_seen : post_seen;
        const auto& other = e.who == 0 ? post_seen : pre_seen;
        mine.push_back(e.t);
        if (other.empty()) continue;
        const TimeMs partner = other.back();
        if (cfg.pairing == StdpPairing::reduced && mine.size() >= 2 && partner <= mine[mine.size() - 2]) continue;
        const double dt = e.who == 1 ? static_cast<double>(e.t - partner) : static_cast<double>(partner - e.t);
        total += stdp_delta(dt, cfg);
    }
    return total;
}

}  // namespace

TEST(StdpKernel, RectangularMatchesStepRuleOnGrid) {
    const auto c = rect(0.1, 0.12);
    for (int dt = -30; dt <= 30; ++dt) {
        double expect = 0.0;
        if (dt > 0 && dt < 20) expect = 0.1;
        if (dt < 0 && dt > -20) expect = -0.12;
        EXPECT_EQ(stdp_delta(dt, c), expect) << "dt=" << dt;
    }
}

TEST(StdpKernel, RectangularMagnitudesAreExact) {
    const auto c = rect(0.1, 0.12);
    for (int dt = -40; dt <= 40; ++dt) {
        const double m = std::abs(stdp_delta(dt, c));
        EXPECT_TRUE(m == 0.0 || m == 0.1 || m == 0.12);
    }
}

TEST(StdpKernel, ExponentialIsAntisymmetricAndDecreasing) {
    StdpConfig c;
    double prev = std::numeric_limits<double>::infinity();
    for (double dt = 0.25; dt < 20.0; dt += 0.25) {
        const double ltp = stdp_delta(dt, c), ltd = stdp_delta(-dt, c);
        EXPECT_GT(ltp, 0.0);
        EXPECT_LT(ltd, 0.0);
        EXPECT_DOUBLE_EQ(ltp, -ltd);
        EXPECT_LT(ltp, prev);
        prev = ltp;
    }
}

TEST(StdpKernel, ReferenceValues) {
    EXPECT_DOUBLE_EQ(stdp_delta(10, rect(0.1)), 0.1);
    EXPECT_DOUBLE_EQ(stdp_delta(-10, rect(0.1, 0.12)), -0.12);
    EXPECT_EQ(stdp_delta(25, rect()), 0.0);
    EXPECT_EQ(stdp_delta(25, StdpConfig{}), 0.0);
}

TEST(StdpKernel, WindowIsOpenAndZeroLagIsNeutral) {
    EXPECT_EQ(stdp_delta(20, rect()), 0.0);
    EXPECT_EQ(stdp_delta(-20, rect()), 0.0);
    EXPECT_EQ(stdp_delta(0, rect()), 0.0);
    EXPECT_EQ(stdp_delta(0, StdpConfig{}), 0.0);
}

TEST(StdpConfig, RejectsNonPositiveParameters) {
    StdpConfig c;
    c.tau_window = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = StdpConfig{};
    c.a_minus = -0.1;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_NO_THROW(StdpConfig{}.validate());
}

TEST(OnSpikeUpdate, SinglePairInAChain) {
    StdpConfig cfg;
    auto net = forced_net({{0, 1, 2.0, 1, true}, {1, 2, 2.0, 1, true}}, 3, cfg);
    std::vector<std::vector<NeuronId>> sched(120);
    sched[100] = {0};
    sched[105] = {1};
    drive(net, sched);
    EXPECT_DOUBLE_EQ(net.weight(0), 2.0 + 0.1 * std::exp(-5.0 / 20.0));
    EXPECT_DOUBLE_EQ(net.weight(1), 2.0);
}

TEST(OnSpikeUpdate, ClampsAtBounds) {
    StdpConfig cfg;
    auto net = forced_net({{0, 1, 10.0, 1, true}, {2, 3, 0.0, 1, true}}, 4, cfg);
    std::vector<std::vector<NeuronId>> sched(40);
    sched[10] = {0};
    sched[12] = {1};
    sched[20] = {3};
    sched[22] = {2};
    drive(net, sched);
    EXPECT_EQ(net.weight(0), 10.0);
    EXPECT_EQ(net.weight(1), 0.0);
}

TEST(OnSpikeUpdate, NonPlasticSynapseIsUntouched) {
    StdpConfig cfg;
    auto net = forced_net({{0, 1, 3.0, 1, false}}, 2, cfg);
    std::vector<std::vector<NeuronId>> sched(20);
    sched[5] = {0};
    sched[8] = {1};
    drive(net, sched);
    EXPECT_EQ(net.weight(0), 3.0);
}

TEST(OnSpikeUpdate, ReducedPairingUsesEachPartnerOnce) {
    // post at 10, pre at 13 and 16: nearest pairs both pre spikes with the
    // post spike, reduced only the first.
    for (auto pairing : {StdpPairing::nearest, StdpPairing::reduced}) {
        auto cfg = rect();
        cfg.pairing = pairing;
        auto net = forced_net({{0, 1, 5.0, 1, true}}, 2, cfg);
        std::vector<std::vector<NeuronId>> sched(30);
        sched[10] = {1};
        sched[13] = {0};
        sched[16] = {0};
        drive(net, sched);
        EXPECT_DOUBLE_EQ(net.weight(0), pairing == StdpPairing::nearest ? 4.8 : 4.9);
    }
}

// Independent random trains: the network's accumulated change equals the
// brute-force pair enumeration.
TEST(OnSpikeUpdate, RandomTrainsMatchPairEnumeration) {
    for (auto pairing : {StdpPairing::nearest, StdpPairing::reduced}) {
        StdpConfig cfg;
        cfg.pairing = pairing;
        cfg.w_max = 1e6;
        const TimeMs horizon = 200000;
        std::mt19937_64 rng(42);
        std::uniform_int_distribution<TimeMs> when(1, horizon);
        std::set<TimeMs> pre_set, post_set;
        while (pre_set.size() < 1000) pre_set.insert(when(rng));
        while (post_set.size() < 1000) post_set.insert(when(rng));
        const std::vector<TimeMs> pre(pre_set.begin(), pre_set.end()), post(post_set.begin(), post_set.end());

        auto net = forced_net({{0, 1, 5e5, 1, true}}, 2, cfg);
        std::vector<std::vector<NeuronId>> sched(horizon + 2);
        for (auto t : pre) sched[t].push_back(0);
        for (auto t : post) sched[t].push_back(1);
        drive(net, sched);

        const double oracle = enumerate_pairs(pre, post, cfg);
        EXPECT_NEAR(net.weight(0) - 5e5, oracle, 1e-6);
    }
}

TEST(Pairing, NamesRoundTrip) {
    for (auto p : {StdpPairing::nearest, StdpPairing::reduced}) EXPECT_EQ(parse_pairing(to_string(p)), p);
    for (auto k : {StdpKernel::rectangular, StdpKernel::exponential}) EXPECT_EQ(parse_kernel(to_string(k)), k);
    EXPECT_THROW(parse_pairing("all"), ConfigError);
}
