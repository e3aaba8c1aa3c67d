#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lsa/io.hpp"
#include "lsa/presets.hpp"
#include "lsa/runner.hpp"

using namespace lsa;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("lsa_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ExperimentConfig short_config(ExperimentConfig c, TimeMs duration) {
    c.duration = duration;
    c.snapshot_period = std::min<TimeMs>(c.snapshot_period, duration);
    c.sweep.clear();
    c.replicates = 1;
    return c;
}

}  // namespace

TEST(Harness, ReinforcementPresetStrengthensInputToOutput) {
    const auto cfg = find_preset("fig3a-reinforcement")->config;
    const auto rec = run(cfg);
    ASSERT_FALSE(rec.faulted);
    const auto tr = weight_trajectory(rec, 0, 1);
    EXPECT_GT(tr.back().second, tr.front().second);
}

TEST(Harness, RepeatedSeedGivesByteIdenticalRecords) {
    auto cfg = short_config(find_preset("fig4-wallworld")->config, 5000);
    const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
    write_record(a, run(cfg), cfg);
    write_record(b, run(cfg), cfg);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        const auto name = e.path().filename();
        ASSERT_TRUE(fs::exists(b / name)) << name;
        EXPECT_EQ(slurp(e.path()), slurp(b / name)) << name;
        ++files;
    }
    EXPECT_GE(files, 9u);
}

TEST(Harness, RecordRoundTripsThroughDisk) {
    auto cfg = short_config(find_preset("fig6-prediction")->config, 5000);
    const auto rec = run(cfg);
    const auto dir = scratch_dir("roundtrip");
    write_record(dir, rec, cfg, false);
    const auto [back, bcfg] = read_record(dir);
    EXPECT_EQ(dump_config(bcfg), dump_config(cfg));
    EXPECT_EQ(back.spikes, rec.spikes);
    EXPECT_EQ(back.stimulation, rec.stimulation);
    EXPECT_EQ(back.env_trace, rec.env_trace);
    EXPECT_EQ(back.snapshots, rec.snapshots);
    ASSERT_EQ(back.synapses.size(), rec.synapses.size());
    for (std::size_t i = 0; i < rec.synapses.size(); ++i) EXPECT_EQ(back.synapses[i].weight, rec.synapses[i].weight);
    const auto m1 = metric_rows(rec, cfg), m2 = metric_rows(back, bcfg);
    ASSERT_EQ(m1.size(), m2.size());
    for (std::size_t i = 0; i < m1.size(); ++i) {
        EXPECT_EQ(m1[i].metric, m2[i].metric);
        if (!std::isnan(m1[i].value)) {
            EXPECT_EQ(m1[i].value, m2[i].value);
        }
    }
}

TEST(Harness, StimulationCsvRoundTrips) {
    const StimulationLog log{{10, 0, true}, {10, 3, true}, {25, 2, false}};
    const auto dir = scratch_dir("stim");
    write_stimulation_csv(dir / "s.csv", log);
    EXPECT_EQ(read_stimulation_csv(dir / "s.csv"), log);
    std::ifstream f(dir / "s.csv");
    std::string header;
    std::getline(f, header);
    EXPECT_EQ(header, kStimulationHeader);
}

TEST(Harness, MetricsCsvHasExactHeader) {
    const auto dir = scratch_dir("metrics");
    write_metrics_csv(dir / "m.csv", {{"r-0", 3, "snr", 1.5}, {"r-0", 3, "x", std::nan("")}});
    std::ifstream f(dir / "m.csv");
    std::string header, row;
    std::getline(f, header);
    std::getline(f, row);
    EXPECT_EQ(header, "run_id,seed,metric_name,value");
    EXPECT_EQ(row, "r-0,3,snr,1.5");
    const auto back = read_metrics_csv(dir / "m.csv");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_TRUE(std::isnan(back[1].value));
}

TEST(Harness, SweepExpandsAxesTimesReplicates) {
    const auto& cfg = find_preset("loopdelay-sweep")->config;
    const auto pts = expand_sweep(cfg);
    ASSERT_EQ(pts.size(), 80u);
    std::set<std::uint64_t> seeds;
    for (const auto& p : pts) seeds.insert(p.seed);
    EXPECT_EQ(seeds.size(), 80u);
    EXPECT_EQ(pts[0].config.environment.actuation_delay, 0);
    EXPECT_EQ(pts[79].config.environment.actuation_delay, 120);
    EXPECT_EQ(pts[25].seed, replicate_seed(cfg.seed, {Json(20)}, 5));
}

TEST(Harness, SweepResultsIgnoreParallelism) {
    auto cfg = short_config(find_preset("fig3a-reinforcement")->config, 3000);
    cfg.replicates = 3;
    cfg.sweep = {{"stdp.a_plus", {0.05, 0.1}}};
    const auto one = metrics_table(cfg.name, sweep(cfg, 1));
    const auto three = metrics_table(cfg.name, sweep(cfg, 3));
    ASSERT_EQ(one.size(), three.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(one[i].run_id, three[i].run_id);
        EXPECT_EQ(one[i].metric, three[i].metric);
        if (!std::isnan(one[i].value)) {
            EXPECT_EQ(one[i].value, three[i].value) << one[i].metric;
        }
    }
}

TEST(Harness, FaultedRunIsFlaggedAndSweepContinues) {
    ExperimentConfig cfg;
    cfg.duration = 200;
    cfg.topology.builder = Builder::minimal_lsa;
    cfg.sim.stimulus_mode = StimulusMode::current_pulse;
    cfg.sweep = {{"sim.pulse_current", {40.0, 1e300}}};
    const auto runs = sweep(cfg, 1);
    ASSERT_EQ(runs.size(), 2u);
    EXPECT_FALSE(runs[0].faulted);
    EXPECT_TRUE(runs[1].faulted);
    EXPECT_NE(runs[1].fault.find("neuron"), std::string::npos);
    auto one = with_parameter(cfg, "sim.pulse_current", 1e300);
    one.sweep.clear();
    const auto rec = run(one);
    EXPECT_TRUE(rec.faulted);
    EXPECT_FALSE(rec.snapshots.empty());
}

TEST(Harness, EveryPresetRunsAndPlots) {
    for (const auto& p : presets()) {
        auto cfg = short_config(p.config, p.config.topology.size > 400 ? 500 : 3000);
        if (!p.config.sweep.empty()) cfg = expand_sweep(p.config).back().config, cfg = short_config(cfg, 3000);
        const auto rec = run(cfg);
        EXPECT_FALSE(rec.faulted) << p.name;
        const auto dir = scratch_dir("plots_" + p.name);
        write_record(dir, rec, cfg);
        for (const char* f : {"raster.svg", "weights.svg"}) {
            ASSERT_TRUE(fs::exists(dir / f)) << p.name << " " << f;
            const auto svg = slurp(dir / f);
            EXPECT_EQ(svg.rfind("<svg", 0), 0u) << p.name << " " << f;
            EXPECT_NE(svg.find("</svg>"), std::string::npos);
        }
        if (rec.env_kind == EnvKind::predictable_pair) {
            EXPECT_TRUE(fs::exists(dir / "prediction_error.svg"));
        }
        if (rec.env_kind == EnvKind::wallworld || rec.env_kind == EnvKind::yoked) {
            EXPECT_TRUE(fs::exists(dir / "reaction.svg"));
        }
    }
}

TEST(Harness, ShippedPresetFilesMatchTheBuiltIns) {
    const fs::path dir = fs::path(LSA_SOURCE_DIR) / "presets";
    for (const auto& p : presets()) {
        const auto file = dir / (p.name + ".json");
        ASSERT_TRUE(fs::exists(file)) << file;
        EXPECT_EQ(slurp(file), dump_config(p.config)) << p.name;
    }
}

TEST(Harness, YokedRunReplaysTheSourceSchedule) {
    auto cfg = short_config(find_preset("fig4-yoked-control")->config, 20000);
    const auto yoked = run(cfg);
    auto src = cfg;
    src.environment.yoked = false;
    src.seed = combine_seed(cfg.seed, kYokedSourceStream);
    const auto source = run(src);
    StimulationLog delivered;
    for (const auto& e : source.stimulation)
        if (e.delivered) delivered.push_back(e);
    EXPECT_EQ(yoked.stimulation, delivered);
    EXPECT_EQ(yoked.env_kind, EnvKind::yoked);
}
