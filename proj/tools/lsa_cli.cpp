#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "lsa/io.hpp"
#include "lsa/presets.hpp"
#include "lsa/runner.hpp"

namespace fs = std::filesystem;
using namespace lsa;

namespace {

// A config argument is a file path, or the name of a shipped preset.
ExperimentConfig load_config(const std::string& arg) {
    if (fs::exists(arg)) {
        std::ifstream f(arg);
        std::stringstream ss;
        ss << f.rdbuf();
        return parse_config(ss.str());
    }
    if (const auto* p = find_preset(arg)) return p->config;
    throw ConfigError("no such config file or preset: '" + arg + "'");
}

void print_metrics(const std::vector<MetricRow>& rows) {
    for (const auto& r : rows) std::printf("  %-28s %.6g\n", r.metric.c_str(), r.value);
}

int cmd_run(const std::string& config_arg, std::optional<std::uint64_t> seed, std::string out) {
    auto cfg = load_config(config_arg);
    if (seed) cfg.seed = *seed;
    cfg.sweep.clear();
    const auto rec = run(cfg);
    if (out.empty()) out = "runs/" + rec.run_id;
    write_record(out, rec, cfg);
    std::printf("%s: %lld ms, %zu spikes -> %s\n", rec.run_id.c_str(), static_cast<long long>(rec.duration),
                rec.spikes.size(), out.c_str());
    print_metrics(metric_rows(rec, cfg));
    if (rec.faulted) {
        std::fprintf(stderr, "run faulted: %s\n", rec.fault.c_str());
        return 1;
    }
    return 0;
}

// Mean of `metric` per value of the first axis, one line per remaining tuple.
void write_sweep_plot(const fs::path& p, const ExperimentConfig& cfg, const std::vector<SweepRun>& runs) {
    static const char* preferred[] = {"learning_success", "prediction_error_final_third", "snr", "total_spikes"};
    std::string metric = "total_spikes";
    for (const char* m : preferred) {
        bool found = false;
        for (const auto& r : runs)
            for (const auto& [k, v] : r.metrics) found = found || k == m;
        if (found) {
            metric = m;
            break;
        }
    }
    std::map<std::string, std::map<double, std::pair<double, int>>> acc;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& vals = runs[i].point.values;
        const double x = vals[0].is_number() ? vals[0].get<double>() : static_cast<double>(i);
        std::vector<Json> rest(vals.begin() + 1, vals.end());
        const auto label = rest.empty() ? metric : axis_tuple_string(rest);
        for (const auto& [k, v] : runs[i].metrics)
            if (k == metric && std::isfinite(v)) {
                auto& cell = acc[label][x];
                cell.first += v;
                cell.second += 1;
            }
    }
    std::vector<Series> series;
    for (const auto& [label, pts] : acc) {
        Series s{label, {}};
        for (const auto& [x, c] : pts) s.points.emplace_back(x, c.first / c.second);
        series.push_back(std::move(s));
    }
    write_line_plot(p, series, cfg.name + ": mean " + metric, cfg.sweep[0].path, metric);
}

int cmd_sweep(const std::string& config_arg, int jobs, std::string out, bool records) {
    auto cfg = load_config(config_arg);
    if (out.empty()) out = "sweeps/" + cfg.name;
    fs::create_directories(out);
    std::mutex writer;  // every file write goes through this lock
    std::size_t done = 0;
    const auto total = expand_sweep(cfg).size();
    auto runs = sweep(cfg, jobs, [&](std::size_t i, const RunRecord& rec) {
        std::lock_guard lock(writer);
        if (records) write_record(fs::path(out) / "runs" / rec.run_id, rec, expand_sweep(cfg)[i].config, false);
        std::fprintf(stderr, "\r%zu/%zu", ++done, total);
    });
    std::fprintf(stderr, "\n");

    write_metrics_csv(fs::path(out) / "metrics.csv", metrics_table(cfg.name, runs));
    {
        std::ofstream f(fs::path(out) / "runs.csv");
        f << "run_id,seed,replicate";
        for (const auto& ax : cfg.sweep) f << ',' << ax.path;
        f << ",faulted,fault\n";
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto& r = runs[i];
            f << cfg.name << '-' << i << ',' << r.point.seed << ',' << r.point.replicate;
            for (const auto& v : r.point.values) f << ',' << v.dump();
            std::string fault = r.fault;
            for (auto& c : fault)
                if (c == ',' || c == '\n') c = ';';
            f << ',' << (r.faulted ? 1 : 0) << ',' << fault << '\n';
        }
    }
    {
        std::ofstream f(fs::path(out) / "config.json");
        f << dump_config(cfg);
    }
    write_sweep_plot(fs::path(out) / "sweep.svg", cfg, runs);
    std::size_t faulted = 0;
    for (const auto& r : runs) faulted += r.faulted ? 1 : 0;
    std::printf("%s: %zu runs, %zu faulted -> %s\n", cfg.name.c_str(), runs.size(), faulted, out.c_str());
    return 0;
}

int cmd_report(const std::string& dir) {
    const auto [rec, cfg] = read_record(dir);
    const auto rows = metric_rows(rec, cfg);
    write_metrics_csv(fs::path(dir) / "metrics.csv", rows);
    write_plots(dir, rec);
    std::printf("%s (recomputed from %s)\n", rec.run_id.c_str(), dir.c_str());
    print_metrics(rows);
    return 0;
}

int cmd_presets_list() {
    for (const auto& p : presets()) std::printf("%-22s %s\n", p.name.c_str(), p.description.c_str());
    return 0;
}

int cmd_presets_export(const std::string& dir) {
    fs::create_directories(dir);
    for (const auto& p : presets()) {
        std::ofstream f(fs::path(dir) / (p.name + ".json"));
        f << dump_config(p.config);
    }
    std::printf("wrote %zu presets to %s\n", presets().size(), dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-loop spiking network simulator: learning by stimulation avoidance"};
    app.require_subcommand(1);

    std::string config_arg, out_dir, report_dir, export_dir;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool records = false;

    auto* run_cmd = app.add_subcommand("run", "Run one experiment and write its record");
    run_cmd->add_option("config", config_arg, "Config file or preset name")->required();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the master seed");
    run_cmd->add_option("--out", out_dir, "Output directory (default runs/<run_id>)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run every sweep point and replicate");
    sweep_cmd->add_option("config", config_arg, "Config file or preset name")->required();
    sweep_cmd->add_option("--jobs,-j", jobs, "Parallel runs")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", out_dir, "Output directory (default sweeps/<name>)");
    sweep_cmd->add_flag("--records", records, "Also write each run's full record");

    auto* report_cmd = app.add_subcommand("report", "Recompute metrics and plots of a saved record");
    report_cmd->add_option("dir", report_dir, "Record directory")->required()->check(CLI::ExistingDirectory);

    auto* presets_cmd = app.add_subcommand("presets", "Shipped experiment presets");
    presets_cmd->require_subcommand(1);
    auto* list_cmd = presets_cmd->add_subcommand("list", "List preset names");
    auto* export_cmd = presets_cmd->add_subcommand("export", "Write every preset as a JSON config");
    export_cmd->add_option("dir", export_dir, "Target directory")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run_cmd)
            return cmd_run(config_arg, *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt, out_dir);
        if (*sweep_cmd) return cmd_sweep(config_arg, jobs, out_dir, records);
        if (*report_cmd) return cmd_report(report_dir);
        if (*list_cmd) return cmd_presets_list();
        if (*export_cmd) return cmd_presets_export(export_dir);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
