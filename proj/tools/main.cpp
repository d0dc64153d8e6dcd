#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crossflow/config.hpp"
#include "crossflow/reference.hpp"
#include "crossflow/rng.hpp"
#include "crossflow/stats.hpp"
#include "crossflow/sweep.hpp"

namespace
{
    using namespace crossflow;

    // Every config key as a CLI flag; file values load first, flags win.
    struct Overrides
    {
        std::optional<int> steps;
        std::optional<double> t_max;
        std::optional<std::string> scenario;
        std::optional<std::string> baseline;
        std::optional<std::uint64_t> seed;
        std::optional<double> lambda_cv;
        std::optional<double> lambda_ev;
        std::optional<double> v_cross;
        std::optional<double> lane_length_m;
        std::optional<double> exit_length_m;
        std::optional<double> exit_drain_rate;
        std::optional<double> vehicle_length_m;
        std::optional<double> clearance_s;
        std::optional<int> metrics_first_n;
        std::optional<double> dwell_a;
        std::optional<double> dwell_y_min;
        std::optional<double> dwell_y_max;
        std::optional<std::string> lane_weights;
    };

    void add_config_flags(CLI::App* cmd, std::string& config_path, Overrides& ov)
    {
        cmd->add_option("--config", config_path, "key=value settings file");
        cmd->add_option("--steps", ov.steps, "simulated seconds");
        cmd->add_option("--t-max", ov.t_max, "green budget cap, seconds");
        cmd->add_option("--scenario", ov.scenario, "s1 (emergency priority) or s2");
        cmd->add_option("--baseline", ov.baseline,
                        "swap the controller: fixed or greedy (default adaptive)");
        cmd->add_option("--seed", ov.seed, "random seed");
        cmd->add_option("--lambda-cv", ov.lambda_cv, "classic arrivals per second");
        cmd->add_option("--lambda-ev", ov.lambda_ev, "emergency arrivals per second");
        cmd->add_option("--v-cross", ov.v_cross, "crossing speed, m/s");
        cmd->add_option("--lane-length-m", ov.lane_length_m, "entry lane storage, metres");
        cmd->add_option("--exit-length-m", ov.exit_length_m, "exit road storage, metres");
        cmd->add_option("--exit-drain-rate", ov.exit_drain_rate, "exit drain, m/s");
        cmd->add_option("--vehicle-length-m", ov.vehicle_length_m, "vehicle footprint, metres");
        cmd->add_option("--clearance-s", ov.clearance_s, "all-red gap between phases");
        cmd->add_option("--metrics-first-n", ov.metrics_first_n, "departures scored for waits");
        cmd->add_option("--dwell-a", ov.dwell_a, "dwell decay factor");
        cmd->add_option("--dwell-y-min", ov.dwell_y_min, "dwell floor, seconds");
        cmd->add_option("--dwell-y-max", ov.dwell_y_max, "dwell ceiling, seconds");
        cmd->add_option("--lane-weights", ov.lane_weights, "12 comma-separated arrival weights");
    }

    SimConfig build_config(const std::string& config_path, const Overrides& ov)
    {
        SimConfig cfg;
        if (!config_path.empty())
            cfg = load_config_file(config_path, cfg);
        if (ov.steps)
            cfg.steps = *ov.steps;
        if (ov.t_max)
            cfg.t_max = *ov.t_max;
        if (ov.scenario)
            apply_setting(cfg, "scenario", *ov.scenario);
        if (ov.baseline)
        {
            const auto c = parse_controller(*ov.baseline);
            if (!c || *c == ControllerKind::Adaptive)
                throw ConfigError("--baseline must be fixed or greedy, got '" + *ov.baseline +
                                  "'");
            cfg.controller = *c;
        }
        if (ov.seed)
            cfg.seed = *ov.seed;
        if (ov.lambda_cv)
            cfg.lambda_cv = *ov.lambda_cv;
        if (ov.lambda_ev)
            cfg.lambda_ev = *ov.lambda_ev;
        if (ov.v_cross)
            cfg.v_cross = *ov.v_cross;
        if (ov.lane_length_m)
            cfg.lane_length_m = *ov.lane_length_m;
        if (ov.exit_length_m)
            cfg.exit_length_m = *ov.exit_length_m;
        if (ov.exit_drain_rate)
            cfg.exit_drain_rate = *ov.exit_drain_rate;
        if (ov.vehicle_length_m)
            cfg.vehicle_length_m = *ov.vehicle_length_m;
        if (ov.clearance_s)
            cfg.clearance_s = *ov.clearance_s;
        if (ov.metrics_first_n)
            cfg.metrics_first_n = *ov.metrics_first_n;
        if (ov.dwell_a)
            cfg.dwell.a = *ov.dwell_a;
        if (ov.dwell_y_min)
            cfg.dwell.y_min = *ov.dwell_y_min;
        if (ov.dwell_y_max)
            cfg.dwell.y_max = *ov.dwell_y_max;
        if (ov.lane_weights)
            apply_setting(cfg, "lane_weights", *ov.lane_weights);
        cfg.validate();
        return cfg;
    }

    void write_text(const std::string& path, const std::string& text)
    {
        if (path.empty())
        {
            std::fputs(text.c_str(), stdout);
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ConfigError("cannot open output file '" + path + "'");
        out << text;
    }

    std::string read_file(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot open file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    std::vector<Scenario> parse_scenario_list(const std::vector<std::string>& names)
    {
        std::vector<Scenario> out;
        for (const std::string& n : names)
        {
            const auto s = parse_scenario(n);
            if (!s)
                throw ConfigError("unknown scenario '" + n + "'");
            out.push_back(*s);
        }
        return out;
    }

    int cmd_run(const std::string& config_path, const Overrides& ov, const std::string& rules_path,
                const std::string& out_path, const std::string& log_path)
    {
        const SimConfig cfg = build_config(config_path, ov);
        std::vector<RuleChange> rules;
        if (!rules_path.empty())
        {
            std::ifstream in(rules_path);
            if (!in)
                throw ConfigError("cannot open rule script '" + rules_path + "'");
            rules = parse_rule_script(in);
        }
        const MetricsRecord m = run_simulation(cfg, rules);
        write_text(out_path, summary_csv_header() + summary_csv_row(cfg, m));
        if (!log_path.empty())
            write_text(log_path, vehicle_csv(m));
        return 0;
    }

    int cmd_sweep(const std::string& config_path, const Overrides& ov,
                  const std::vector<double>& t_max_values,
                  const std::vector<std::string>& scenario_names,
                  const std::vector<std::uint64_t>& seeds, int jobs, const std::string& out_path,
                  const std::string& medians_path)
    {
        SweepSpec spec;
        spec.base = build_config(config_path, ov);
        if (!t_max_values.empty())
            spec.t_max_values = t_max_values;
        if (!scenario_names.empty())
            spec.scenarios = parse_scenario_list(scenario_names);
        if (!seeds.empty())
            spec.seeds = seeds;
        const std::vector<SweepRow> rows = run_sweep(spec, jobs);
        write_text(out_path, sweep_csv(rows));
        if (!medians_path.empty())
            write_text(medians_path, medians_csv(sweep_medians(spec, rows)));
        return 0;
    }

    int cmd_compare(const std::string& config_path, const Overrides& ov,
                    const std::vector<std::string>& controller_names,
                    const std::vector<std::uint64_t>& seeds, int jobs,
                    const std::string& out_path)
    {
        CompareSpec spec;
        spec.base = build_config(config_path, ov);
        if (!controller_names.empty())
        {
            spec.controllers.clear();
            for (const std::string& n : controller_names)
            {
                const auto c = parse_controller(n);
                if (!c)
                    throw ConfigError("unknown controller '" + n + "'");
                spec.controllers.push_back(*c);
            }
        }
        if (!seeds.empty())
            spec.seeds = seeds;
        write_text(out_path, compare_csv(run_compare(spec, jobs)));
        return 0;
    }

    // --- the verify suites: recompute everything the slow way and diff ---

    bool verify_conflict_fixture(const std::string& fixtures_dir)
    {
        const ConflictRelation fixture =
            ConflictRelation::parse_grid(read_file(fixtures_dir + "/conflict_table.txt"));
        const ConflictRelation built = ConflictRelation::defaults();
        if (!(fixture == built))
        {
            std::printf("[FAIL] conflict table: fixture and built-in defaults disagree\n");
            return false;
        }
        if (built.pair_count() != 28)
        {
            std::printf("[FAIL] conflict table: expected 28 conflicting pairs, got %d\n",
                        built.pair_count());
            return false;
        }
        std::printf("[PASS] conflict table: fixture matches defaults, 28 pairs\n");
        return true;
    }

    bool verify_phase_groups(const std::string& fixtures_dir)
    {
        const std::string text = read_file(fixtures_dir + "/phase_groups.txt");
        std::vector<std::vector<int>> fixture;
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);)
        {
            if (line.empty() || line[0] == '#')
                continue;
            std::istringstream ls(line);
            std::vector<int> group;
            for (std::string name; ls >> name;)
            {
                const auto lane = parse_lane(name);
                if (!lane)
                {
                    std::printf("[FAIL] phase groups: unknown lane '%s'\n", name.c_str());
                    return false;
                }
                group.push_back(lane_index(*lane));
            }
            if (!group.empty())
                fixture.push_back(group);
        }
        const auto built = fixed_cycle_groups(ConflictRelation::defaults());
        if (fixture != built)
        {
            std::printf("[FAIL] phase groups: fixture and derived partition disagree\n");
            return false;
        }
        std::printf("[PASS] phase groups: fixture matches the derived partition\n");
        return true;
    }

    bool verify_selection(int trials)
    {
        const ConflictRelation rel = ConflictRelation::defaults();
        ConflictMatrix m = make_matrix(rel);
        Rng rng(derive_seed(2024, 77));
        long checked = 0;
        for (int t = 0; t < trials; ++t)
        {
            std::array<int, kLaneCount> diag{};
            for (int i = 0; i < kLaneCount; ++i)
                diag[i] = int(rng.uniform01() * 7.0) - 1; // -1 .. 5
            for (int mask = 0; mask < (1 << kLaneCount); ++mask)
            {
                std::array<bool, kLaneCount> can{};
                for (int i = 0; i < kLaneCount; ++i)
                    can[i] = (mask >> i) & 1;
                m.diagonal = diag;
                const Selection got = select_open_set(m, can);
                const reference::SelectionRef want = reference::open_set(rel, diag, can);
                if (got.open != want.open || got.mark_wa != want.wa)
                {
                    std::printf("[FAIL] selection: diverges from reference at trial %d mask %d\n",
                                t, mask);
                    return false;
                }
                ++checked;
            }
        }
        std::printf("[PASS] selection: matches reference on %ld cases\n", checked);
        return true;
    }

    bool verify_formulas(int trials)
    {
        Rng rng(derive_seed(2024, 78));
        const DwellParams dw{};
        double worst = 0.0;
        for (int t = 0; t < trials; ++t)
        {
            const double x_prev = rng.uniform01() * 200.0;
            const double got = dwell_time(x_prev, dw);
            const long double want = reference::dwell(x_prev, dw);
            const double rel_err = std::abs(double((got - want) / want));
            worst = std::max(worst, rel_err);

            QueueObservation obs;
            obs.entry_density = rng.uniform01();
            obs.entry_length_m = rng.uniform01() * 500.0 + 1.0;
            obs.exit_density = rng.uniform01();
            obs.exit_length_m = rng.uniform01() * 500.0 + 1.0;
            const double v = rng.uniform01() * 30.0 + 0.1;
            const double got_x = time_to_empty(obs, v);
            const long double want_x = reference::time_to_empty(
                obs.entry_density, obs.entry_length_m, obs.exit_density, obs.exit_length_m, v);
            const double denom = std::max(std::abs(double(want_x)), 1e-300);
            worst = std::max(worst, std::abs(double(got_x - double(want_x))) / denom);
        }
        if (worst > 1e-9)
        {
            std::printf("[FAIL] formulas: worst relative error %.3e exceeds 1e-9\n", worst);
            return false;
        }
        std::printf("[PASS] formulas: worst relative error %.3e over %d samples\n", worst, trials);
        return true;
    }

    bool verify_geometry(int scenes)
    {
        Rng rng(derive_seed(2024, 79));
        for (int s = 0; s < scenes; ++s)
        {
            const int lanes = 1 + int(rng.uniform01() * 5.0);
            std::vector<CalibrationLine> lines;
            std::vector<std::array<double, 4>> endpoints;
            for (int j = 0; j < 2 * lanes; ++j)
            {
                double x1 = rng.uniform01() * 100.0, y1 = rng.uniform01() * 100.0;
                double x2 = rng.uniform01() * 100.0, y2 = rng.uniform01() * 100.0;
                if (x1 == x2 && y1 == y2)
                    x2 += 1.0;
                lines.push_back(CalibrationLine::from_points(Point{x1, y1}, Point{x2, y2}));
                endpoints.push_back({x1, y1, x2, y2});
            }
            std::vector<DetectionBox> boxes;
            const int n_boxes = int(rng.uniform01() * 20.0);
            for (int b = 0; b < n_boxes; ++b)
                boxes.push_back(DetectionBox{rng.uniform01() * 100.0, rng.uniform01() * 100.0,
                                             rng.uniform01() * 20.0 + 0.1,
                                             rng.uniform01() * 20.0 + 0.1});
            if (assign_and_count(boxes, lines) != reference::count_boxes(boxes, endpoints))
            {
                std::printf("[FAIL] geometry: lane counts diverge from reference at scene %d\n", s);
                return false;
            }

            OccupancyMask mask;
            mask.width = 1 + int(rng.uniform01() * 40.0);
            mask.height = 1 + int(rng.uniform01() * 40.0);
            mask.cells.resize(std::size_t(mask.width) * mask.height);
            for (auto& cell : mask.cells)
                cell = rng.uniform01() < 0.3 ? 1 : 0;
            mask.roi_x0 = int(rng.uniform01() * mask.width);
            mask.roi_y0 = int(rng.uniform01() * mask.height);
            mask.roi_w = 1 + int(rng.uniform01() * (mask.width - mask.roi_x0));
            mask.roi_h = 1 + int(rng.uniform01() * (mask.height - mask.roi_y0));
            mask.roi_w = std::min(mask.roi_w, mask.width - mask.roi_x0);
            mask.roi_h = std::min(mask.roi_h, mask.height - mask.roi_y0);
            if (mask_density(mask) != reference::mask_density(mask))
            {
                std::printf("[FAIL] geometry: mask density diverges from reference at scene %d\n",
                            s);
                return false;
            }
        }
        std::printf("[PASS] geometry: matches reference over %d scenes\n", scenes);
        return true;
    }

    int cmd_verify(const std::string& fixtures_dir, int trials)
    {
        bool ok = true;
        ok &= verify_conflict_fixture(fixtures_dir);
        ok &= verify_phase_groups(fixtures_dir);
        ok &= verify_selection(std::max(1, trials / 2000));
        ok &= verify_formulas(trials);
        ok &= verify_geometry(std::max(1, trials / 100));
        return ok ? 0 : 1;
    }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"deterministic queue-state junction control simulator"};
    app.require_subcommand(1);

    std::string run_config, run_rules, run_out, run_log;
    Overrides run_ov;
    CLI::App* run = app.add_subcommand("run", "single run, summary CSV out");
    add_config_flags(run, run_config, run_ov);
    run->add_option("--rules", run_rules, "mid-run compatibility edit script");
    run->add_option("--out", run_out, "summary CSV path (default stdout)");
    run->add_option("--log", run_log, "per-vehicle CSV path");

    std::string sweep_config, sweep_out, sweep_medians;
    Overrides sweep_ov;
    std::vector<double> sweep_t_max;
    std::vector<std::string> sweep_scenarios;
    std::vector<std::uint64_t> sweep_seeds;
    int sweep_jobs = 0;
    CLI::App* sweep = app.add_subcommand("sweep", "grid of runs over caps, scenarios, seeds");
    add_config_flags(sweep, sweep_config, sweep_ov);
    sweep->add_option("--t-max-values", sweep_t_max, "green caps to sweep")->delimiter(',');
    sweep->add_option("--scenarios", sweep_scenarios, "scenario list")->delimiter(',');
    sweep->add_option("--seeds", sweep_seeds, "seed list")->delimiter(',');
    sweep->add_option("--jobs", sweep_jobs, "worker threads (0 = hardware)");
    sweep->add_option("--out", sweep_out, "sweep CSV path (default stdout)");
    sweep->add_option("--medians", sweep_medians, "per-cell median CSV path");

    std::string cmp_config, cmp_out;
    Overrides cmp_ov;
    std::vector<std::string> cmp_controllers;
    std::vector<std::uint64_t> cmp_seeds;
    int cmp_jobs = 0;
    CLI::App* cmp = app.add_subcommand("compare", "controllers head-to-head on shared arrivals");
    add_config_flags(cmp, cmp_config, cmp_ov);
    cmp->add_option("--controllers", cmp_controllers, "controller list")->delimiter(',');
    cmp->add_option("--seeds", cmp_seeds, "seed list")->delimiter(',');
    cmp->add_option("--jobs", cmp_jobs, "worker threads (0 = hardware)");
    cmp->add_option("--out", cmp_out, "comparison CSV path (default stdout)");

    std::string ver_fixtures = "fixtures";
    int ver_trials = 100000;
    CLI::App* ver = app.add_subcommand("verify", "check implementations against references");
    ver->add_option("--fixtures", ver_fixtures, "fixtures directory");
    ver->add_option("--trials", ver_trials, "sample count for the formula suites");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        return app.exit(e);
    }

    try
    {
        if (run->parsed())
            return cmd_run(run_config, run_ov, run_rules, run_out, run_log);
        if (sweep->parsed())
            return cmd_sweep(sweep_config, sweep_ov, sweep_t_max, sweep_scenarios, sweep_seeds,
                             sweep_jobs, sweep_out, sweep_medians);
        if (cmp->parsed())
            return cmd_compare(cmp_config, cmp_ov, cmp_controllers, cmp_seeds, cmp_jobs, cmp_out);
        if (ver->parsed())
            return cmd_verify(ver_fixtures, ver_trials);
    }
    catch (const crossflow::ConfigError& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
