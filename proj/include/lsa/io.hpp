#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lsa/config.hpp"
#include "lsa/metrics.hpp"
#include "lsa/runner.hpp"

namespace lsa {

namespace fs = std::filesystem;

inline const char* kMetricsHeader = "run_id,seed,metric_name,value";
inline const char* kStimulationHeader = "time_ms,input_id,delivered";

namespace detail {

inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return std::stod(s);
}

inline std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
}

inline std::ifstream open_in(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + p.string());
    return f;
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

/// Reads a CSV with a known header; returns the data rows.
inline std::vector<std::vector<std::string>> read_csv(const fs::path& p, const std::string& header) {
    auto f = open_in(p);
    std::string line;
    if (!std::getline(f, line) || line != header)
        throw std::runtime_error(p.string() + ": expected header '" + header + "'");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(f, line))
        if (!line.empty()) rows.push_back(split(line));
    return rows;
}

}  // namespace detail

// --- stimulation log ------------------------------------------------------

inline void write_stimulation_csv(std::ostream& os, const StimulationLog& log) {
    os << kStimulationHeader << '\n';
    for (const auto& e : log) os << e.time << ',' << e.input << ',' << (e.delivered ? 1 : 0) << '\n';
}

inline void write_stimulation_csv(const fs::path& p, const StimulationLog& log) {
    auto f = detail::open_out(p);
    write_stimulation_csv(f, log);
}

inline StimulationLog read_stimulation_csv(const fs::path& p) {
    StimulationLog log;
    for (const auto& r : detail::read_csv(p, kStimulationHeader)) {
        if (r.size() != 3) throw std::runtime_error(p.string() + ": malformed row");
        log.push_back({std::stoll(r[0]), static_cast<NeuronId>(std::stoul(r[1])), r[2] == "1"});
    }
    return log;
}

// --- metrics table --------------------------------------------------------

inline void write_metrics_csv(const fs::path& p, const std::vector<MetricRow>& rows) {
    auto f = detail::open_out(p);
    f << kMetricsHeader << '\n';
    for (const auto& r : rows) f << r.run_id << ',' << r.seed << ',' << r.metric << ',' << detail::fmt_double(r.value) << '\n';
}

inline std::vector<MetricRow> read_metrics_csv(const fs::path& p) {
    std::vector<MetricRow> rows;
    for (const auto& r : detail::read_csv(p, kMetricsHeader)) {
        if (r.size() != 4) throw std::runtime_error(p.string() + ": malformed row");
        rows.push_back({r[0], std::stoull(r[1]), r[2], detail::parse_double(r[3])});
    }
    return rows;
}

inline std::vector<MetricRow> metric_rows(const RunRecord& rec, const ExperimentConfig& cfg) {
    std::vector<MetricRow> rows;
    for (const auto& [k, v] : standard_metrics(rec, cfg)) rows.push_back({rec.run_id, rec.seed, k, v});
    return rows;
}

// --- plots (SVG) ------------------------------------------------------------

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

namespace detail {

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    return colors[i % 8];
}

struct Frame {
    double x0, x1, y0, y1;
    static constexpr double W = 720, H = 400, L = 70, R = 20, T = 40, B = 50;
    double px(double x) const { return L + (x - x0) / (x1 - x0) * (W - L - R); }
    double py(double y) const { return H - B - (y - y0) / (y1 - y0) * (H - T - B); }
};

inline void svg_axes(std::ostream& os, const Frame& f, const std::string& title, const std::string& xlabel,
                     const std::string& ylabel) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::W << "\" height=\"" << Frame::H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << Frame::W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
    os << "<line x1=\"" << Frame::L << "\" y1=\"" << Frame::H - Frame::B << "\" x2=\"" << Frame::W - Frame::R
       << "\" y2=\"" << Frame::H - Frame::B << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << Frame::L << "\" y1=\"" << Frame::T << "\" x2=\"" << Frame::L << "\" y2=\""
       << Frame::H - Frame::B << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0, yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
        os << "<text x=\"" << f.px(xv) << "\" y=\"" << Frame::H - Frame::B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
           << fmt_double(std::round(xv * 100) / 100) << "</text>\n";
        os << "<text x=\"" << Frame::L - 6 << "\" y=\"" << f.py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
           << fmt_double(std::round(yv * 100) / 100) << "</text>\n";
    }
    os << "<text x=\"" << Frame::W / 2 << "\" y=\"" << Frame::H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
       << xlabel << "</text>\n";
    os << "<text x=\"16\" y=\"" << Frame::H / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
       << Frame::H / 2 << ")\">" << ylabel << "</text>\n";
}

}  // namespace detail

inline void write_line_plot(const fs::path& p, const std::vector<Series>& series, const std::string& title,
                            const std::string& xlabel, const std::string& ylabel) {
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool first = true;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (first) {
                x0 = x1 = x;
                y0 = y1 = y;
                first = false;
            }
            x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
        }
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    const detail::Frame fr{x0, x1, y0, y1};
    auto f = detail::open_out(p);
    detail::svg_axes(f, fr, title, xlabel, ylabel);
    for (std::size_t i = 0; i < series.size(); ++i) {
        f << "<polyline fill=\"none\" stroke=\"" << detail::palette(i) << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : series[i].points)
            if (std::isfinite(x) && std::isfinite(y)) f << fr.px(x) << ',' << fr.py(y) << ' ';
        f << "\"/>\n";
        f << "<text x=\"" << detail::Frame::W - 150 << "\" y=\"" << 50 + 14 * i << "\" font-size=\"11\" fill=\""
          << detail::palette(i) << "\">" << series[i].label << "</text>\n";
    }
    f << "</svg>\n";
}

/// Spike raster over [from, to]; stimulated inputs in red, outputs in blue.
inline void write_raster_plot(const fs::path& p, const RunRecord& rec, TimeMs from, TimeMs to) {
    const detail::Frame fr{static_cast<double>(from), static_cast<double>(std::max(to, from + 1)), -0.5,
                           static_cast<double>(std::max<std::size_t>(rec.n_neurons, 1)) - 0.5};
    std::vector<char> role(rec.n_neurons, 0);
    for (auto id : rec.output_ids) role[id] = 2;
    for (auto id : rec.input_ids) role[id] = 1;
    auto f = detail::open_out(p);
    detail::svg_axes(f, fr, "Spike raster " + rec.run_id, "time (ms)", "neuron");
    const double h = std::max(1.0, (detail::Frame::H - 90) / std::max<double>(1.0, rec.n_neurons));
    for (const auto& s : rec.spikes) {
        if (s.time < from || s.time > to) continue;
        const char* c = role[s.neuron] == 1 ? "#d62728" : role[s.neuron] == 2 ? "#1f77b4" : "#444";
        f << "<rect x=\"" << fr.px(static_cast<double>(s.time)) << "\" y=\"" << fr.py(s.neuron) - h / 2
          << "\" width=\"1\" height=\"" << h << "\" fill=\"" << c << "\"/>\n";
    }
    f << "</svg>\n";
}

// --- record persistence ---------------------------------------------------

inline Json record_meta(const RunRecord& rec) {
    Json j;
    j["run_id"] = rec.run_id;
    j["seed"] = rec.seed;
    j["config_hash"] = rec.config_hash;
    j["env_kind"] = to_string(rec.env_kind);
    j["duration_ms"] = rec.duration;
    j["snapshot_period_ms"] = rec.snapshot_period;
    j["n_neurons"] = rec.n_neurons;
    j["input_ids"] = rec.input_ids;
    j["output_ids"] = rec.output_ids;
    j["inhibitory_ids"] = rec.inhibitory_ids;
    j["faulted"] = rec.faulted;
    j["fault"] = rec.fault;
    return j;
}

/// Plots for one record: raster of the final stretch, selected weight
/// trajectories, and the environment-specific learning curve.
inline void write_plots(const fs::path& dir, const RunRecord& rec) {
    const TimeMs span = std::min<TimeMs>(rec.duration, 1000);
    write_raster_plot(dir / "raster.svg", rec, rec.duration - span, rec.duration);

    std::vector<Series> traj;
    std::vector<char> is_in(rec.n_neurons, 0);
    for (auto id : rec.input_ids) is_in[id] = 1;
    for (std::size_t i = 0; i < rec.synapses.size() && traj.size() < 8; ++i) {
        const auto& s = rec.synapses[i];
        if (!is_in[s.pre] && rec.n_neurons > 3) continue;
        Series se{std::to_string(s.pre) + "->" + std::to_string(s.post), {}};
        for (const auto& snap : rec.snapshots) se.points.emplace_back(static_cast<double>(snap.time), snap.weights[i]);
        traj.push_back(std::move(se));
    }
    write_line_plot(dir / "weights.svg", traj, "Weight trajectories " + rec.run_id, "time (ms)", "weight");

    if (rec.env_kind == EnvKind::wallworld || rec.env_kind == EnvKind::yoked) {
        Series s{"reaction time", {}};
        for (const auto& r : reaction_time_series(rec)) s.points.emplace_back(static_cast<double>(r.episode), r.ms);
        write_line_plot(dir / "reaction.svg", {s}, "Reaction time per episode", "episode", "ms");
    }
    if (rec.env_kind == EnvKind::predictable_pair) {
        Series s{"delivered (1) / suppressed (0)", {}};
        std::vector<double> vals;
        for (const auto& e : rec.env_trace)
            if (e.kind == EnvEventKind::target) vals.push_back(e.value);
        // running error over blocks of 10 target events
        for (std::size_t i = 0; i + 10 <= vals.size(); i += 10) {
            double m = 0;
            for (std::size_t k = i; k < i + 10; ++k) m += vals[k];
            s.points.emplace_back(static_cast<double>(i), m / 10.0);
        }
        write_line_plot(dir / "prediction_error.svg", {s}, "Prediction error (blocks of 10 targets)", "target event",
                        "error rate");
    }
}

inline void write_record(const fs::path& dir, const RunRecord& rec, const ExperimentConfig& cfg, bool plots = true) {
    fs::create_directories(dir);
    {
        auto f = detail::open_out(dir / "config.json");
        f << dump_config(cfg);
    }
    {
        auto f = detail::open_out(dir / "record.json");
        f << record_meta(rec).dump(2) << '\n';
    }
    {
        auto f = detail::open_out(dir / "spikes.csv");
        f << "time_ms,neuron\n";
        for (const auto& s : rec.spikes) f << s.time << ',' << s.neuron << '\n';
    }
    write_stimulation_csv(dir / "stimulation.csv", rec.stimulation);
    {
        auto f = detail::open_out(dir / "synapses.csv");
        f << "index,pre,post,delay,initial_weight\n";
        for (std::size_t i = 0; i < rec.synapses.size(); ++i) {
            const auto& s = rec.synapses[i];
            f << i << ',' << s.pre << ',' << s.post << ',' << s.delay << ',' << detail::fmt_double(s.weight) << '\n';
        }
    }
    {
        auto f = detail::open_out(dir / "weights.csv");
        f << "time_ms,synapse,weight\n";
        for (const auto& snap : rec.snapshots)
            for (std::size_t i = 0; i < snap.weights.size(); ++i)
                f << snap.time << ',' << i << ',' << detail::fmt_double(snap.weights[i]) << '\n';
    }
    {
        auto f = detail::open_out(dir / "env_trace.csv");
        f << "time_ms,event,value\n";
        for (const auto& e : rec.env_trace) f << e.time << ',' << to_string(e.kind) << ',' << detail::fmt_double(e.value) << '\n';
    }
    write_metrics_csv(dir / "metrics.csv", metric_rows(rec, cfg));
    if (plots) write_plots(dir, rec);
}

inline std::pair<RunRecord, ExperimentConfig> read_record(const fs::path& dir) {
    std::stringstream cs;
    cs << detail::open_in(dir / "config.json").rdbuf();
    auto cfg = parse_config(cs.str());

    std::stringstream ms;
    ms << detail::open_in(dir / "record.json").rdbuf();
    const auto meta = Json::parse(ms.str());
    RunRecord rec;
    rec.run_id = meta.at("run_id").get<std::string>();
    rec.seed = meta.at("seed").get<std::uint64_t>();
    rec.config_hash = meta.at("config_hash").get<std::uint64_t>();
    rec.env_kind = parse_env_kind(meta.at("env_kind").get<std::string>());
    rec.duration = meta.at("duration_ms").get<TimeMs>();
    rec.snapshot_period = meta.at("snapshot_period_ms").get<TimeMs>();
    rec.n_neurons = meta.at("n_neurons").get<std::size_t>();
    rec.input_ids = meta.at("input_ids").get<std::vector<NeuronId>>();
    rec.output_ids = meta.at("output_ids").get<std::vector<NeuronId>>();
    rec.inhibitory_ids = meta.at("inhibitory_ids").get<std::vector<NeuronId>>();
    rec.faulted = meta.at("faulted").get<bool>();
    rec.fault = meta.at("fault").get<std::string>();

    for (const auto& r : detail::read_csv(dir / "spikes.csv", "time_ms,neuron"))
        rec.spikes.push_back({std::stoll(r.at(0)), static_cast<NeuronId>(std::stoul(r.at(1)))});
    rec.stimulation = read_stimulation_csv(dir / "stimulation.csv");
    for (const auto& r : detail::read_csv(dir / "synapses.csv", "index,pre,post,delay,initial_weight"))
        rec.synapses.push_back({static_cast<NeuronId>(std::stoul(r.at(1))), static_cast<NeuronId>(std::stoul(r.at(2))),
                                detail::parse_double(r.at(4)), std::stoi(r.at(3)), true});
    for (const auto& r : detail::read_csv(dir / "weights.csv", "time_ms,synapse,weight")) {
        const TimeMs t = std::stoll(r.at(0));
        if (rec.snapshots.empty() || rec.snapshots.back().time != t) rec.snapshots.push_back({t, {}});
        rec.snapshots.back().weights.push_back(detail::parse_double(r.at(2)));
    }
    for (const auto& r : detail::read_csv(dir / "env_trace.csv", "time_ms,event,value"))
        rec.env_trace.push_back({std::stoll(r.at(0)), parse_env_event(r.at(1)), detail::parse_double(r.at(2))});
    return {std::move(rec), std::move(cfg)};
}

}  // namespace lsa
