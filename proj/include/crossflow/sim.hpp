#pragma once

#include <deque>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crossflow/rng.hpp"
#include "crossflow/scheduler.hpp"

namespace crossflow
{
    // s1: emergency arrivals preempt their lane's priority.  s2: emergencies
    // are spawned but treated like any other vehicle.
    enum class Scenario : int { S1Priority = 0, S2NoPriority = 1 };

    const char* scenario_name(Scenario s);
    std::optional<Scenario> parse_scenario(std::string_view text);

    enum class ControllerKind : int { Adaptive = 0, FixedCycle = 1, GreedyLongest = 2 };

    const char* controller_name(ControllerKind k);
    std::optional<ControllerKind> parse_controller(std::string_view text);

    struct SimConfig
    {
        int steps = 3600;              // one step is one simulated second
        double t_max = 30.0;           // fairness cap on any single green
        Scenario scenario = Scenario::S1Priority;
        ControllerKind controller = ControllerKind::Adaptive;
        std::uint64_t seed = 1;
        double lambda_cv = 0.8;        // classic arrivals per second, junction-wide
        double lambda_ev = 0.025;      // emergency arrivals per second
        double v_cross = 10.0;         // crossing speed, m/s
        double lane_length_m = 100.0;  // storage per entry lane
        double exit_length_m = 100.0;  // storage per exit road
        double exit_drain_rate = 10.0; // m/s of exit space reclaimed downstream
        double vehicle_length_m = 5.0;
        double clearance_s = 0.0;      // all-red pause between phases
        int metrics_first_n = 3000;    // departures scored for average waits
        DwellParams dwell{};
        std::array<double, kLaneCount> lane_weights{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};

        void validate() const; // ConfigError naming the offending key
    };

    struct VehicleRecord
    {
        std::uint64_t id = 0;
        VehicleClass cls = VehicleClass::Classic;
        LaneId lane{};
        int arrival_step = 0;
        int departure_step = 0;
    };

    struct MetricsRecord
    {
        double awt_all = 0.0; // mean wait over the scored departure window
        double awt_cv = 0.0;
        double awt_ev = 0.0;
        std::uint64_t throughput = 0;            // total departures
        std::uint64_t collisions = 0;            // conflicting greens held together (must stay 0)
        std::uint64_t empty_green_grants = 0;    // greens issued to lanes with nothing to gain
        std::uint64_t spillback_rejections = 0;  // arrivals bounced off a full lane
        double max_wait_s = 0.0;                 // worst wait, departed or still queued
        std::array<double, kLaneCount> lane_max_wait_s{};
        std::vector<VehicleRecord> departures;   // in departure order
    };

    // Scripted mid-run edit of the compatibility relation.
    struct RuleChange
    {
        int step = 0;
        LaneId a{};
        LaneId b{};
        bool conflict = true;
    };

    // Lines of "<step> <laneA> <laneB> conflict|clear"; '#' starts a comment.
    std::vector<RuleChange> parse_rule_script(std::istream& in);

    // One junction under one controller.  Per one-second step: scripted rule
    // edits, arrivals, queue-state updates, control (green endings, then
    // selection and grants), discharge of green lanes, exit-road drain.
    class World
    {
    public:
        explicit World(SimConfig cfg, std::vector<RuleChange> rules = {});

        void step();
        void run_all(); // every remaining configured step
        int now() const { return now_; }

        MetricsRecord metrics() const;

        // direct arrival, bypassing the random streams (harness/test hook);
        // returns the vehicle id, whether or not the lane had room
        std::uint64_t inject(LaneId lane, VehicleClass cls);

        const QueueDynamics& queue(int lane) const { return queues_[lane]; }
        QueueDynamics& queue_mut(int lane) { return queues_[lane]; }
        int queue_len(int lane) const { return static_cast<int>(lanes_[lane].fifo.size()); }
        double occupied_m(int lane) const { return lanes_[lane].occupied_m; }
        double exit_occupied_m(int approach) const { return exits_[approach]; }
        std::uint64_t accepted() const { return accepted_; }
        const ConflictRelation& relation() const { return relation_; }
        const SimConfig& config() const { return cfg_; }

    private:
        struct LaneSim
        {
            std::deque<Vehicle> fifo;
            double occupied_m = 0.0;
            int ev_count = 0;
            double granted_at = 0.0;
            double budget_s = 0.0;
            double grant_x = 0.0;
            double credit = 0.0; // fractional vehicles earned but not yet released
            std::uint16_t grant_row = 0;
            std::uint64_t grant_serial = 0;
            double max_departed_wait_s = 0.0;
        };

        void apply_rules(int now);
        void spawn_arrivals(int now);
        void admit(int lane, VehicleClass cls, int now);
        QueueObservation observe(int lane) const;
        void update_queues(int now);
        void control(int now);
        void adaptive_control(int now);
        void fixed_cycle_control(int now);
        void greedy_longest_control(int now);
        void begin_green(int lane, double x_at_grant, double budget_s, int now);
        void audit_collisions();
        void discharge(int now);
        void drain_exits();

        SimConfig cfg_;
        std::vector<RuleChange> rules_;
        std::size_t rule_pos_ = 0;
        ConflictRelation relation_;
        ConflictMatrix matrix_;
        std::array<QueueDynamics, kLaneCount> queues_{};
        std::array<LaneSim, kLaneCount> lanes_{};
        std::array<double, kApproachCount> exits_{}; // metres occupied per exit road
        std::array<int, kLaneCount> exit_of_{};
        std::vector<std::vector<int>> fixed_groups_;
        std::size_t fixed_group_ = 0;
        double fixed_phase_started_ = 0.0;
        bool fixed_pending_start_ = true;
        double all_red_until_ = 0.0;
        Rng cv_rng_;
        Rng ev_rng_;
        Rng lane_rng_;
        std::vector<double> weights_;
        int now_ = 0;
        std::uint64_t next_id_ = 1;
        std::uint64_t grant_serial_ = 0;
        std::uint64_t accepted_ = 0;
        std::uint64_t spillback_ = 0;
        std::uint64_t collisions_ = 0;
        std::uint64_t empty_green_ = 0;
        std::vector<VehicleRecord> departures_;
    };

    MetricsRecord run_simulation(const SimConfig& cfg, const std::vector<RuleChange>& rules = {});

    // Pre-timed baseline phase table: greedy first-fit partition of the 12
    // lanes into conflict-free groups, scanning lanes in canonical order.
    std::vector<std::vector<int>> fixed_cycle_groups(const ConflictRelation& relation);

    // CSV surfaces; '.' decimal point, ',' delimiter, one header row.
    std::string summary_csv_header();
    std::string summary_csv_row(const SimConfig& cfg, const MetricsRecord& m);
    std::string vehicle_csv(const MetricsRecord& m);

} // namespace crossflow
