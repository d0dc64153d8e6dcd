#include "crossflow/sim.hpp"

#include <sstream>

#include "crossflow/stats.hpp"
#include "support.hpp"

using namespace crossflow;

namespace
{
    int idx(const char* name) { return lane_index(*parse_lane(name)); }

    SimConfig quiet_config()
    {
        SimConfig cfg;
        cfg.lambda_cv = 0.0;
        cfg.lambda_ev = 0.0;
        return cfg;
    }
} // namespace

static void test_validation_names_the_key()
{
    SimConfig cfg;
    cfg.t_max = 0.0;
    try
    {
        cfg.validate();
        CHECK(false);
    }
    catch (const ConfigError& e)
    {
        CHECK(std::string(e.what()).find("t_max") != std::string::npos);
    }

    cfg = SimConfig{};
    cfg.lambda_cv = -0.1;
    CHECK_THROWS(ConfigError, cfg.validate());
    cfg = SimConfig{};
    cfg.v_cross = 0.0;
    CHECK_THROWS(ConfigError, cfg.validate());
    cfg = SimConfig{};
    cfg.dwell.a = 1.0;
    CHECK_THROWS(ConfigError, cfg.validate());
    cfg = SimConfig{};
    cfg.lane_weights.fill(0.0);
    CHECK_THROWS(ConfigError, cfg.validate());
    cfg = SimConfig{};
    cfg.steps = -1;
    CHECK_THROWS(ConfigError, cfg.validate());
    SimConfig{}.validate(); // defaults are well-formed
}

static void test_zero_steps_and_zero_rates()
{
    SimConfig cfg;
    cfg.steps = 0;
    const MetricsRecord m = run_simulation(cfg);
    CHECK(m.throughput == 0);
    CHECK(m.awt_all == 0.0);
    CHECK(m.max_wait_s == 0.0);
    CHECK(m.departures.empty());

    SimConfig quiet = quiet_config();
    quiet.steps = 500;
    World world(quiet);
    world.run_all();
    CHECK(world.accepted() == 0);
    CHECK(world.metrics().throughput == 0);
}

static void test_arrival_totals_follow_the_rate()
{
    // junction-wide totals should hug lambda * steps; allow three sigma
    int within = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        SimConfig cfg = quiet_config();
        cfg.lambda_cv = 0.8;
        cfg.steps = 3600;
        cfg.seed = seed;
        World world(cfg);
        world.run_all();
        const MetricsRecord m = world.metrics();
        const double total = double(world.accepted()) + double(m.spillback_rejections);
        if (total >= 2880 - 161 && total <= 2880 + 161)
            ++within;
    }
    CHECK(within >= 19);
}

static void test_lambda_splits_by_class()
{
    SimConfig cfg = quiet_config();
    cfg.lambda_ev = 0.5;
    cfg.steps = 400;
    World world(cfg);
    world.run_all();
    CHECK(world.accepted() > 0); // emergencies arrive without classics
    for (const VehicleRecord& d : world.metrics().departures)
        CHECK(d.cls == VehicleClass::Emergency);
}

static void test_single_vehicle_crosses_quickly()
{
    SimConfig cfg = quiet_config();
    cfg.steps = 200;
    World world(cfg);
    world.inject(*parse_lane("NF"), VehicleClass::Classic);
    world.run_all();
    const MetricsRecord m = world.metrics();
    CHECK(m.throughput == 1);
    // generous bound: four promotion dwells, the drain time, one full cap
    const double bound = 4 * cfg.dwell.y_max + 0.5 + cfg.t_max;
    CHECK(m.departures[0].departure_step - m.departures[0].arrival_step <= bound);
}

static void test_emergency_flag_only_in_s1()
{
    SimConfig cfg = quiet_config();
    World s1(cfg);
    s1.inject(*parse_lane("WR"), VehicleClass::Emergency);
    CHECK(s1.queue(idx("WR")).emergency_flag);

    cfg.scenario = Scenario::S2NoPriority;
    World s2(cfg);
    s2.inject(*parse_lane("WR"), VehicleClass::Emergency);
    CHECK(!s2.queue(idx("WR")).emergency_flag);
}

static void test_emergency_preempts_priority_in_s1()
{
    // WR holds a green; an emergency lands on conflicting EL and must jump
    // the priority ladder while it waits
    for (int scenario = 0; scenario < 2; ++scenario)
    {
        SimConfig cfg = quiet_config();
        cfg.scenario = scenario == 0 ? Scenario::S1Priority : Scenario::S2NoPriority;
        World world(cfg);
        for (int k = 0; k < 8; ++k)
            world.inject(*parse_lane("WR"), VehicleClass::Classic);
        world.step(); // WR granted
        CHECK(world.queue(idx("WR")).state == kActive);
        world.inject(*parse_lane("EL"), VehicleClass::Emergency);
        world.step(); // EL blocked by the running green
        CHECK(world.queue(idx("EL")).state != kActive);
        if (cfg.scenario == Scenario::S1Priority)
            CHECK(world.queue(idx("EL")).state == kMaxLevel);
        else
            CHECK(world.queue(idx("EL")).state == 0);
    }
}

static void test_conflicting_queues_alternate()
{
    SimConfig cfg = quiet_config();
    cfg.steps = 120;
    World world(cfg);
    for (int k = 0; k < 20; ++k)
    {
        world.inject(*parse_lane("WR"), VehicleClass::Classic);
        world.inject(*parse_lane("EL"), VehicleClass::Classic);
    }
    bool el_served = false;
    for (int t = 0; t < cfg.steps; ++t)
    {
        world.step();
        const bool wr = world.queue(idx("WR")).state == kActive;
        const bool el = world.queue(idx("EL")).state == kActive;
        CHECK(!(wr && el)); // never green together
        el_served = el_served || el;
    }
    CHECK(el_served); // both sides get their turn
    const MetricsRecord m = world.metrics();
    CHECK(m.throughput == 40);
    CHECK(m.collisions == 0);
    // equal backlogs tie on priority: the lower index opens first
    CHECK(m.departures.front().lane == *parse_lane("WR"));
}

static void test_departures_are_fifo_per_lane()
{
    SimConfig cfg = quiet_config();
    cfg.steps = 60;
    World world(cfg);
    for (int k = 0; k < 5; ++k)
        world.inject(*parse_lane("WF"), VehicleClass::Classic);
    world.run_all();
    const MetricsRecord m = world.metrics();
    CHECK(m.throughput == 5);
    for (std::size_t k = 1; k < m.departures.size(); ++k)
    {
        CHECK(m.departures[k].id > m.departures[k - 1].id);
        CHECK(m.departures[k].departure_step >= m.departures[k - 1].departure_step);
    }
}

static void test_vehicles_are_conserved_every_step()
{
    SimConfig cfg;
    cfg.steps = 300;
    cfg.seed = 5;
    World world(cfg);
    for (int t = 0; t < cfg.steps; ++t)
    {
        world.step();
        std::uint64_t queued = 0;
        for (int i = 0; i < kLaneCount; ++i)
            queued += std::uint64_t(world.queue_len(i));
        CHECK(world.accepted() == world.metrics().throughput + queued);
    }
}

static void test_default_run_is_clean()
{
    SimConfig cfg;
    cfg.seed = 3;
    const MetricsRecord m = run_simulation(cfg);
    CHECK(m.collisions == 0);
    CHECK(m.empty_green_grants == 0);
    CHECK(m.throughput > 2000); // light load, nearly everything crosses
    CHECK(m.awt_all > 0.0);
}

static void test_same_seed_reproduces_bytes()
{
    SimConfig cfg;
    cfg.steps = 900;
    cfg.seed = 11;
    const MetricsRecord a = run_simulation(cfg);
    const MetricsRecord b = run_simulation(cfg);
    CHECK(summary_csv_row(cfg, a) == summary_csv_row(cfg, b));
    CHECK(vehicle_csv(a) == vehicle_csv(b));

    SimConfig other = cfg;
    other.seed = 12;
    CHECK(vehicle_csv(run_simulation(other)) != vehicle_csv(a));
}

static void test_heavier_load_waits_longer()
{
    std::vector<double> light, heavy;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        SimConfig cfg;
        cfg.seed = seed;
        cfg.steps = 1800;
        light.push_back(run_simulation(cfg).awt_all);
        cfg.lambda_cv = 1.6;
        heavy.push_back(run_simulation(cfg).awt_all);
    }
    CHECK(median(heavy) >= median(light));
}

static void test_spillback_is_counted_and_capacity_respected()
{
    SimConfig cfg;
    cfg.lane_length_m = 10.0; // room for just two vehicles
    cfg.lambda_cv = 3.0;
    cfg.steps = 200;
    World world(cfg);
    for (int t = 0; t < cfg.steps; ++t)
    {
        world.step();
        for (int i = 0; i < kLaneCount; ++i)
            CHECK(world.occupied_m(i) <= cfg.lane_length_m + 1e-9);
    }
    CHECK(world.metrics().spillback_rejections > 0);
}

static void test_blocked_exit_stalls_discharge()
{
    SimConfig cfg = quiet_config();
    cfg.exit_length_m = 10.0;      // two vehicles fit downstream
    cfg.exit_drain_rate = 0.001;   // and it barely drains
    cfg.steps = 120;
    World world(cfg);
    for (int k = 0; k < 20; ++k)
        world.inject(*parse_lane("WF"), VehicleClass::Classic);
    world.run_all();
    const MetricsRecord m = world.metrics();
    CHECK(m.throughput <= 3);
    CHECK(world.queue_len(idx("WF")) >= 17);
    CHECK(world.exit_occupied_m(int(Approach::East)) <= cfg.exit_length_m + 1e-9);
    CHECK(m.empty_green_grants == 0); // a jammed exit never earns a green
    CHECK(m.collisions == 0);
}

static void test_rule_script_blocks_co_green()
{
    // WR and WF are compatible by default and open together...
    SimConfig cfg = quiet_config();
    World free_world(cfg);
    for (int k = 0; k < 10; ++k)
    {
        free_world.inject(*parse_lane("WR"), VehicleClass::Classic);
        free_world.inject(*parse_lane("WF"), VehicleClass::Classic);
    }
    free_world.step();
    CHECK(free_world.queue(idx("WR")).state == kActive);
    CHECK(free_world.queue(idx("WF")).state == kActive);

    // ...until a scripted edit makes them enemies
    World ruled(cfg, {RuleChange{0, *parse_lane("WR"), *parse_lane("WF"), true}});
    for (int k = 0; k < 10; ++k)
    {
        ruled.inject(*parse_lane("WR"), VehicleClass::Classic);
        ruled.inject(*parse_lane("WF"), VehicleClass::Classic);
    }
    for (int t = 0; t < 60; ++t)
    {
        ruled.step();
        CHECK(!(ruled.queue(idx("WR")).state == kActive &&
                ruled.queue(idx("WF")).state == kActive));
    }
    CHECK(ruled.metrics().throughput == 20);
    CHECK(ruled.metrics().collisions == 0);
}

static void test_parse_rule_script()
{
    std::istringstream in("# tighten at dawn\n10 WR WF conflict\n200 wr wf clear\n\n");
    const auto rules = parse_rule_script(in);
    CHECK(rules.size() == 2);
    CHECK(rules[0].step == 10);
    CHECK(rules[0].a == *parse_lane("WR"));
    CHECK(rules[0].conflict);
    CHECK(!rules[1].conflict);

    std::istringstream bad_verb("5 WR WF sometimes\n");
    CHECK_THROWS(ConfigError, parse_rule_script(bad_verb));
    std::istringstream bad_lane("5 WR XX conflict\n");
    CHECK_THROWS(ConfigError, parse_rule_script(bad_lane));
    std::istringstream self_pair("5 WR WR conflict\n");
    CHECK_THROWS(ConfigError, parse_rule_script(self_pair));
    std::istringstream negative("-2 WR WF conflict\n");
    CHECK_THROWS(ConfigError, parse_rule_script(negative));
    std::istringstream truncated("5 WR\n");
    CHECK_THROWS(ConfigError, parse_rule_script(truncated));
    std::istringstream trailing("5 WR WF conflict extra\n");
    CHECK_THROWS(ConfigError, parse_rule_script(trailing));
}

static void test_vehicle_csv_golden()
{
    SimConfig cfg = quiet_config();
    cfg.steps = 10;
    World world(cfg);
    world.inject(*parse_lane("WF"), VehicleClass::Classic);
    world.inject(*parse_lane("EL"), VehicleClass::Classic);
    world.run_all();
    // WF wins the priority tie on index, EL follows one second later
    const std::string expected = "id,class,lane,arrival_step,departure_step,wait_s\n"
                                 "1,cv,WF,0,0,0\n"
                                 "2,cv,EL,0,1,1\n";
    CHECK(vehicle_csv(world.metrics()) == expected);
}

static void test_summary_csv_golden()
{
    SimConfig cfg;
    cfg.scenario = Scenario::S2NoPriority;
    cfg.t_max = 45.0;
    cfg.seed = 7;
    MetricsRecord m;
    m.awt_all = 1.25;
    m.awt_cv = 1.5;
    m.awt_ev = 0.75;
    m.throughput = 321;
    m.spillback_rejections = 4;
    CHECK(summary_csv_header() ==
          "scenario,t_max,seed,awt_all,awt_cv,awt_ev,throughput,collisions,"
          "empty_green_grants,spillback\n");
    CHECK(summary_csv_row(cfg, m) == "s2,45,7,1.2500,1.5000,0.7500,321,0,0,4\n");
}

static void test_fixed_cycle_groups_partition()
{
    const ConflictRelation rel = ConflictRelation::defaults();
    const auto groups = fixed_cycle_groups(rel);
    CHECK(groups.size() == 4);

    int covered = 0;
    for (const auto& group : groups)
    {
        covered += int(group.size());
        for (std::size_t a = 0; a < group.size(); ++a)
            for (std::size_t b = a + 1; b < group.size(); ++b)
                CHECK(!rel.conflicts_idx(group[a], group[b]));
    }
    CHECK(covered == kLaneCount);
    CHECK(groups[0] == (std::vector<int>{idx("WR"), idx("WF"), idx("WL"), idx("NR")}));
    CHECK(groups[1] == (std::vector<int>{idx("ER"), idx("EF"), idx("EL"), idx("SR")}));
    CHECK(groups[2] == (std::vector<int>{idx("NF"), idx("NL")}));
    CHECK(groups[3] == (std::vector<int>{idx("SF"), idx("SL")}));
}

static void test_fixed_cycle_controller_marches_round()
{
    SimConfig cfg;
    cfg.controller = ControllerKind::FixedCycle;
    cfg.t_max = 15.0;
    cfg.seed = 9;
    cfg.steps = 3600;
    const MetricsRecord m = run_simulation(cfg);
    CHECK(m.collisions == 0);
    CHECK(m.throughput > 1000);       // it does move traffic...
    CHECK(m.empty_green_grants > 0);  // ...but waters empty lanes on schedule
}

static void test_greedy_controller_moves_traffic()
{
    SimConfig cfg;
    cfg.controller = ControllerKind::GreedyLongest;
    cfg.seed = 9;
    const MetricsRecord m = run_simulation(cfg);
    CHECK(m.collisions == 0);
    CHECK(m.empty_green_grants == 0);
    CHECK(m.throughput > 2000);
}

static void test_controllers_share_arrival_processes()
{
    // same seed, different controller: identical offered traffic
    SimConfig cfg;
    cfg.steps = 600;
    cfg.seed = 21;
    World adaptive(cfg);
    cfg.controller = ControllerKind::FixedCycle;
    World fixed(cfg);
    adaptive.run_all();
    fixed.run_all();
    const MetricsRecord ma = adaptive.metrics();
    const MetricsRecord mf = fixed.metrics();
    CHECK(adaptive.accepted() + ma.spillback_rejections ==
          fixed.accepted() + mf.spillback_rejections);
}

int main()
{
    test_validation_names_the_key();
    test_zero_steps_and_zero_rates();
    test_arrival_totals_follow_the_rate();
    test_lambda_splits_by_class();
    test_single_vehicle_crosses_quickly();
    test_emergency_flag_only_in_s1();
    test_emergency_preempts_priority_in_s1();
    test_conflicting_queues_alternate();
    test_departures_are_fifo_per_lane();
    test_vehicles_are_conserved_every_step();
    test_default_run_is_clean();
    test_same_seed_reproduces_bytes();
    test_heavier_load_waits_longer();
    test_spillback_is_counted_and_capacity_respected();
    test_blocked_exit_stalls_discharge();
    test_rule_script_blocks_co_green();
    test_parse_rule_script();
    test_vehicle_csv_golden();
    test_summary_csv_golden();
    test_fixed_cycle_groups_partition();
    test_fixed_cycle_controller_marches_round();
    test_greedy_controller_moves_traffic();
    test_controllers_share_arrival_processes();
    return test_summary("test_sim");
}
