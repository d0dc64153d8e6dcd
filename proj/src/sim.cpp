#include "crossflow/sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

namespace crossflow
{
    namespace
    {
        constexpr double kLengthEps = 1e-9; // slack for metre bookkeeping

        std::string fmt4(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.4f", v);
            return buf;
        }

        std::string fmtg(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%g", v);
            return buf;
        }

        double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
    } // namespace

    const char* scenario_name(Scenario s)
    {
        return s == Scenario::S1Priority ? "s1" : "s2";
    }

    std::optional<Scenario> parse_scenario(std::string_view text)
    {
        std::string t(text);
        for (char& c : t)
            c = char(std::tolower(static_cast<unsigned char>(c)));
        if (t == "s1")
            return Scenario::S1Priority;
        if (t == "s2")
            return Scenario::S2NoPriority;
        return std::nullopt;
    }

    const char* controller_name(ControllerKind k)
    {
        switch (k)
        {
        case ControllerKind::FixedCycle: return "fixed";
        case ControllerKind::GreedyLongest: return "greedy";
        default: return "adaptive";
        }
    }

    std::optional<ControllerKind> parse_controller(std::string_view text)
    {
        std::string t(text);
        for (char& c : t)
            c = char(std::tolower(static_cast<unsigned char>(c)));
        if (t == "adaptive")
            return ControllerKind::Adaptive;
        if (t == "fixed")
            return ControllerKind::FixedCycle;
        if (t == "greedy")
            return ControllerKind::GreedyLongest;
        return std::nullopt;
    }

    void SimConfig::validate() const
    {
        auto fail = [](const std::string& key, const std::string& why) {
            throw ConfigError("config key '" + key + "' " + why);
        };
        if (steps < 0)
            fail("steps", "must be non-negative");
        if (!(t_max > 0.0))
            fail("t_max", "must be positive");
        if (lambda_cv < 0.0)
            fail("lambda_cv", "must be non-negative");
        if (lambda_ev < 0.0)
            fail("lambda_ev", "must be non-negative");
        if (!(v_cross > 0.0))
            fail("v_cross", "must be positive");
        if (!(lane_length_m > 0.0))
            fail("lane_length_m", "must be positive");
        if (!(exit_length_m > 0.0))
            fail("exit_length_m", "must be positive");
        if (!(exit_drain_rate > 0.0))
            fail("exit_drain_rate", "must be positive");
        if (!(vehicle_length_m > 0.0))
            fail("vehicle_length_m", "must be positive");
        if (clearance_s < 0.0)
            fail("clearance_s", "must be non-negative");
        if (metrics_first_n < 0)
            fail("metrics_first_n", "must be non-negative");
        if (!(dwell.a > 0.0) || !(dwell.a < 1.0))
            fail("dwell_a", "must sit in (0,1)");
        if (!(dwell.y_min > 0.0))
            fail("dwell_y_min", "must be positive");
        if (dwell.y_max < dwell.y_min)
            fail("dwell_y_max", "must be at least dwell_y_min");
        double total = 0.0;
        for (double w : lane_weights)
        {
            if (w < 0.0)
                fail("lane_weights", "must all be non-negative");
            total += w;
        }
        if (total <= 0.0)
            fail("lane_weights", "must not sum to zero");
    }

    std::vector<RuleChange> parse_rule_script(std::istream& in)
    {
        std::vector<RuleChange> rules;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.resize(hash);
            std::istringstream ls(line);
            std::string step_tok, a_tok, b_tok, verb;
            if (!(ls >> step_tok))
                continue; // blank or comment-only
            if (!(ls >> a_tok >> b_tok >> verb))
                throw ConfigError("rule script line " + std::to_string(line_no) +
                                  ": need '<step> <laneA> <laneB> conflict|clear'");
            std::string extra;
            if (ls >> extra)
                throw ConfigError("rule script line " + std::to_string(line_no) +
                                  ": trailing token '" + extra + "'");
            RuleChange r;
            try
            {
                r.step = std::stoi(step_tok);
            }
            catch (const std::exception&)
            {
                throw ConfigError("rule script line " + std::to_string(line_no) +
                                  ": bad step '" + step_tok + "'");
            }
            if (r.step < 0)
                throw ConfigError("rule script line " + std::to_string(line_no) +
                                  ": step must be non-negative");
            const auto a = parse_lane(a_tok);
            const auto b = parse_lane(b_tok);
            if (!a || !b)
                throw ConfigError("rule script line " + std::to_string(line_no) +
                                  ": unknown lane name");
            if (*a == *b)
                throw ConfigError("rule script line " + std::to_string(line_no) +
                                  ": both lanes are " + a_tok);
            if (verb == "conflict")
                r.conflict = true;
            else if (verb == "clear")
                r.conflict = false;
            else
                throw ConfigError("rule script line " + std::to_string(line_no) +
                                  ": verb must be 'conflict' or 'clear'");
            r.a = *a;
            r.b = *b;
            rules.push_back(r);
        }
        return rules;
    }

    std::vector<std::vector<int>> fixed_cycle_groups(const ConflictRelation& relation)
    {
        std::vector<std::vector<int>> groups;
        std::array<bool, kLaneCount> assigned{};
        for (int i = 0; i < kLaneCount; ++i)
        {
            if (assigned[i])
                continue;
            std::vector<int> group{i};
            assigned[i] = true;
            for (int j = i + 1; j < kLaneCount; ++j)
            {
                if (assigned[j])
                    continue;
                bool fits = true;
                for (int member : group)
                    if (relation.conflicts_idx(j, member))
                    {
                        fits = false;
                        break;
                    }
                if (fits)
                {
                    group.push_back(j);
                    assigned[j] = true;
                }
            }
            groups.push_back(std::move(group));
        }
        return groups;
    }

    World::World(SimConfig cfg, std::vector<RuleChange> rules)
        : cfg_(cfg),
          rules_(std::move(rules)),
          relation_(ConflictRelation::defaults()),
          matrix_(make_matrix(relation_)),
          cv_rng_(derive_seed(cfg.seed, 0)),
          ev_rng_(derive_seed(cfg.seed, 1)),
          lane_rng_(derive_seed(cfg.seed, 2)),
          weights_(cfg.lane_weights.begin(), cfg.lane_weights.end())
    {
        cfg_.validate();
        std::stable_sort(rules_.begin(), rules_.end(),
                         [](const RuleChange& a, const RuleChange& b) { return a.step < b.step; });
        for (int i = 0; i < kLaneCount; ++i)
        {
            queues_[i].lane = lane_from_index(i);
            queues_[i].state = 0;
            queues_[i].dwell_y = dwell_time(0.0, cfg_.dwell);
            queues_[i].level_timer_start = 0.0;
            exit_of_[i] = static_cast<int>(exit_road(queues_[i].lane));
        }
        fixed_groups_ = fixed_cycle_groups(relation_);
    }

    void World::apply_rules(int now)
    {
        bool changed = false;
        while (rule_pos_ < rules_.size() && rules_[rule_pos_].step <= now)
        {
            const RuleChange& r = rules_[rule_pos_];
            relation_ = relation_.with_rule(r.a, r.b, r.conflict);
            ++rule_pos_;
            changed = true;
        }
        if (changed)
        {
            matrix_.relation = relation_;
            fixed_groups_ = fixed_cycle_groups(relation_);
            if (fixed_group_ >= fixed_groups_.size())
                fixed_group_ = 0;
        }
    }

    void World::spawn_arrivals(int now)
    {
        const int n_cv = cv_rng_.poisson(cfg_.lambda_cv);
        for (int k = 0; k < n_cv; ++k)
            admit(lane_rng_.weighted_choice(weights_), VehicleClass::Classic, now);
        const int n_ev = ev_rng_.poisson(cfg_.lambda_ev);
        for (int k = 0; k < n_ev; ++k)
            admit(lane_rng_.weighted_choice(weights_), VehicleClass::Emergency, now);
    }

    void World::admit(int lane, VehicleClass cls, int now)
    {
        Vehicle v;
        v.id = next_id_++;
        v.cls = cls;
        v.length_m = cfg_.vehicle_length_m;
        v.arrival_step = now;
        LaneSim& L = lanes_[lane];
        if (L.occupied_m + v.length_m > cfg_.lane_length_m + kLengthEps)
        {
            ++spillback_; // no room, the vehicle backs up outside the model
            return;
        }
        L.occupied_m += v.length_m;
        if (cls == VehicleClass::Emergency)
        {
            ++L.ev_count;
            if (cfg_.scenario == Scenario::S1Priority)
                queues_[lane].emergency_flag = true;
        }
        L.fifo.push_back(v);
        ++accepted_;
    }

    std::uint64_t World::inject(LaneId lane, VehicleClass cls)
    {
        const std::uint64_t id = next_id_;
        admit(lane_index(lane), cls, now_);
        return id;
    }

    QueueObservation World::observe(int lane) const
    {
        QueueObservation o;
        o.entry_density = clamp01(lanes_[lane].occupied_m / cfg_.lane_length_m);
        o.entry_length_m = cfg_.lane_length_m;
        o.exit_density = clamp01(exits_[exit_of_[lane]] / cfg_.exit_length_m);
        o.exit_length_m = cfg_.exit_length_m;
        o.emergency_present = lanes_[lane].ev_count > 0;
        return o;
    }

    void World::update_queues(int now)
    {
        // Each queue reads only its own sensing; order cannot matter.
        for (int i = 0; i < kLaneCount; ++i)
        {
            update_internal_state(queues_[i], double(now), observe(i));
            if (queues_[i].emergency_flag)
                handle_emergency(queues_[i]);
        }
    }

    void World::begin_green(int lane, double x_at_grant, double budget_s, int now)
    {
        LaneSim& L = lanes_[lane];
        L.granted_at = double(now);
        L.budget_s = budget_s;
        L.grant_x = x_at_grant;
        L.credit = 0.0;
        L.grant_row = relation_.row_bits(lane);
        L.grant_serial = ++grant_serial_;
        if (x_at_grant <= 0.0)
            ++empty_green_; // nothing to drain: this green is pure waste
    }

    void World::adaptive_control(int now)
    {
        bool ended = false;
        for (int i = 0; i < kLaneCount; ++i)
        {
            if (queues_[i].state != kActive)
                continue;
            const bool expired = double(now) - lanes_[i].granted_at >= lanes_[i].budget_s;
            const bool emptied = lanes_[i].fifo.empty();
            if (expired || emptied)
            {
                end_green(queues_[i], lanes_[i].grant_x, cfg_.dwell, cfg_.t_max, double(now));
                ended = true;
            }
        }
        if (ended && cfg_.clearance_s > 0.0)
            all_red_until_ = double(now) + cfg_.clearance_s;

        int active = 0;
        for (int i = 0; i < kLaneCount; ++i)
            if (queues_[i].state == kActive)
                ++active;
        if (!ended && active > 0)
            return; // hold the running phase, no churn
        if (double(now) < all_red_until_)
            return; // clearance still counting down

        update_matrix(matrix_, queues_);
        std::array<bool, kLaneCount> can{};
        std::array<double, kLaneCount> x{};
        for (int i = 0; i < kLaneCount; ++i)
        {
            x[i] = time_to_empty(observe(i), cfg_.v_cross);
            can[i] = x[i] > 0.0;
        }
        const Selection sel = select_open_set(matrix_, can);
        for (int lane : sel.mark_wa)
        {
            queues_[lane].state = kWaitingActive;
            matrix_.diagonal[lane] = kWaitingActive;
        }
        if (sel.open.empty())
            return;
        const GreenPhase phase = grant_green(matrix_, sel.open, queues_, x, double(now), cfg_.t_max);
        for (const GreenGrant& g : phase.grants)
            begin_green(g.lane, g.x_at_grant, g.budget_s, now);
    }

    void World::greedy_longest_control(int now)
    {
        // Foil controller: picks by queue length alone, no priority levels.
        bool ended = false;
        for (int i = 0; i < kLaneCount; ++i)
        {
            if (queues_[i].state != kActive)
                continue;
            const bool expired = double(now) - lanes_[i].granted_at >= lanes_[i].budget_s;
            const bool emptied = lanes_[i].fifo.empty();
            if (expired || emptied)
            {
                queues_[i].state = 0;
                ended = true;
            }
        }
        if (ended && cfg_.clearance_s > 0.0)
            all_red_until_ = double(now) + cfg_.clearance_s;

        int active = 0;
        for (int i = 0; i < kLaneCount; ++i)
            if (queues_[i].state == kActive)
                ++active;
        if (!ended && active > 0)
            return;
        if (double(now) < all_red_until_)
            return;

        std::uint16_t blocked = 0;
        for (int i = 0; i < kLaneCount; ++i)
            if (queues_[i].state == kActive)
                blocked |= std::uint16_t((1u << i) | relation_.row_bits(i));

        std::array<double, kLaneCount> x{};
        for (int i = 0; i < kLaneCount; ++i)
            x[i] = time_to_empty(observe(i), cfg_.v_cross);

        std::vector<int> open;
        for (;;)
        {
            int best = -1;
            for (int i = 0; i < kLaneCount; ++i)
            {
                if ((blocked >> i) & 1u)
                    continue;
                if (!(x[i] > 0.0))
                    continue;
                bool compatible = true;
                for (int member : open)
                    if (relation_.conflicts_idx(i, member))
                    {
                        compatible = false;
                        break;
                    }
                if (!compatible)
                    continue;
                if (best < 0 || lanes_[i].occupied_m > lanes_[best].occupied_m)
                    best = i;
            }
            if (best < 0)
                break;
            blocked |= std::uint16_t(1u << best);
            open.push_back(best);
        }
        if (open.empty())
            return;

        update_matrix(matrix_, queues_);
        const GreenPhase phase = grant_green(matrix_, open, queues_, x, double(now), cfg_.t_max);
        for (const GreenGrant& g : phase.grants)
            begin_green(g.lane, g.x_at_grant, g.budget_s, now);
    }

    void World::fixed_cycle_control(int now)
    {
        // Pre-timed baseline: march round the phase table, t_max green each,
        // no reaction to traffic at all.
        if (!fixed_pending_start_ && double(now) - fixed_phase_started_ >= cfg_.t_max)
        {
            for (int lane : fixed_groups_[fixed_group_])
                if (queues_[lane].state == kActive)
                    queues_[lane].state = 0;
            fixed_group_ = (fixed_group_ + 1) % fixed_groups_.size();
            fixed_pending_start_ = true;
            all_red_until_ = double(now) + cfg_.clearance_s;
        }
        if (!fixed_pending_start_ || double(now) < all_red_until_)
            return;

        update_matrix(matrix_, queues_);
        std::array<double, kLaneCount> x{};
        for (int i = 0; i < kLaneCount; ++i)
            x[i] = time_to_empty(observe(i), cfg_.v_cross);
        const GreenPhase phase =
            grant_green(matrix_, fixed_groups_[fixed_group_], queues_, x, double(now), cfg_.t_max);
        for (const GreenGrant& g : phase.grants)
            begin_green(g.lane, g.x_at_grant, cfg_.t_max, now); // full fixed green, no early end
        fixed_pending_start_ = false;
        fixed_phase_started_ = double(now);
    }

    void World::control(int now)
    {
        switch (cfg_.controller)
        {
        case ControllerKind::Adaptive: adaptive_control(now); break;
        case ControllerKind::FixedCycle: fixed_cycle_control(now); break;
        case ControllerKind::GreedyLongest: greedy_longest_control(now); break;
        }
    }

    void World::audit_collisions()
    {
        // Conflicting greens held in the same second; judged by the relation
        // each pair was granted under, so a scripted edit cannot smear an
        // already-legal phase.
        for (int a = 0; a < kLaneCount; ++a)
        {
            if (queues_[a].state != kActive)
                continue;
            for (int b = a + 1; b < kLaneCount; ++b)
            {
                if (queues_[b].state != kActive)
                    continue;
                const int later = lanes_[a].grant_serial > lanes_[b].grant_serial ? a : b;
                const int other = later == a ? b : a;
                if ((lanes_[later].grant_row >> other) & 1u)
                    ++collisions_;
            }
        }
    }

    void World::discharge(int now)
    {
        const double rate = cfg_.v_cross / cfg_.vehicle_length_m; // vehicles per second
        const double cap = std::max(rate, 1.0);
        for (int i = 0; i < kLaneCount; ++i)
        {
            if (queues_[i].state != kActive)
                continue;
            LaneSim& L = lanes_[i];
            L.credit = std::min(L.credit + rate, cap);
            while (L.credit >= 1.0 && !L.fifo.empty())
            {
                Vehicle& head = L.fifo.front();
                double& exit_occ = exits_[exit_of_[i]];
                if (exit_occ + head.length_m > cfg_.exit_length_m + kLengthEps)
                    break; // exit road full: the head has nowhere to go
                exit_occ += head.length_m;
                L.occupied_m = std::max(0.0, L.occupied_m - head.length_m);
                if (head.cls == VehicleClass::Emergency)
                    --L.ev_count;
                head.departure_step = now;
                const double wait = double(now - head.arrival_step);
                L.max_departed_wait_s = std::max(L.max_departed_wait_s, wait);
                departures_.push_back(
                    {head.id, head.cls, lane_from_index(i), head.arrival_step, now});
                L.fifo.pop_front();
                L.credit -= 1.0;
            }
        }
    }

    void World::drain_exits()
    {
        for (double& occ : exits_)
            occ = std::max(0.0, occ - cfg_.exit_drain_rate);
    }

    void World::step()
    {
        const int now = now_;
        apply_rules(now);
        spawn_arrivals(now);
        if (cfg_.controller == ControllerKind::Adaptive)
            update_queues(now);
        control(now);
        audit_collisions();
        discharge(now);
        drain_exits();
        now_ = now + 1;
    }

    void World::run_all()
    {
        while (now_ < cfg_.steps)
            step();
    }

    MetricsRecord World::metrics() const
    {
        MetricsRecord r;
        r.throughput = departures_.size();
        r.collisions = collisions_;
        r.empty_green_grants = empty_green_;
        r.spillback_rejections = spillback_;
        r.departures = departures_;

        const std::size_t scored =
            std::min<std::size_t>(std::size_t(cfg_.metrics_first_n), departures_.size());
        double sum_all = 0.0, sum_cv = 0.0, sum_ev = 0.0;
        std::size_t n_cv = 0, n_ev = 0;
        for (std::size_t k = 0; k < scored; ++k)
        {
            const VehicleRecord& d = departures_[k];
            const double wait = double(d.departure_step - d.arrival_step);
            sum_all += wait;
            if (d.cls == VehicleClass::Emergency)
            {
                sum_ev += wait;
                ++n_ev;
            }
            else
            {
                sum_cv += wait;
                ++n_cv;
            }
        }
        r.awt_all = scored ? sum_all / double(scored) : 0.0;
        r.awt_cv = n_cv ? sum_cv / double(n_cv) : 0.0;
        r.awt_ev = n_ev ? sum_ev / double(n_ev) : 0.0;

        for (int i = 0; i < kLaneCount; ++i)
        {
            double worst = lanes_[i].max_departed_wait_s;
            for (const Vehicle& v : lanes_[i].fifo)
                worst = std::max(worst, double(now_ - v.arrival_step));
            r.lane_max_wait_s[i] = worst;
            r.max_wait_s = std::max(r.max_wait_s, worst);
        }
        return r;
    }

    MetricsRecord run_simulation(const SimConfig& cfg, const std::vector<RuleChange>& rules)
    {
        World world(cfg, rules);
        world.run_all();
        return world.metrics();
    }

    std::string summary_csv_header()
    {
        return "scenario,t_max,seed,awt_all,awt_cv,awt_ev,throughput,collisions,"
               "empty_green_grants,spillback\n";
    }

    std::string summary_csv_row(const SimConfig& cfg, const MetricsRecord& m)
    {
        std::string row;
        row += scenario_name(cfg.scenario);
        row += ',';
        row += fmtg(cfg.t_max);
        row += ',';
        row += std::to_string(cfg.seed);
        row += ',';
        row += fmt4(m.awt_all);
        row += ',';
        row += fmt4(m.awt_cv);
        row += ',';
        row += fmt4(m.awt_ev);
        row += ',';
        row += std::to_string(m.throughput);
        row += ',';
        row += std::to_string(m.collisions);
        row += ',';
        row += std::to_string(m.empty_green_grants);
        row += ',';
        row += std::to_string(m.spillback_rejections);
        row += '\n';
        return row;
    }

    std::string vehicle_csv(const MetricsRecord& m)
    {
        std::string out = "id,class,lane,arrival_step,departure_step,wait_s\n";
        for (const VehicleRecord& d : m.departures)
        {
            out += std::to_string(d.id);
            out += ',';
            out += d.cls == VehicleClass::Emergency ? "ev" : "cv";
            out += ',';
            out += lane_name(d.lane);
            out += ',';
            out += std::to_string(d.arrival_step);
            out += ',';
            out += std::to_string(d.departure_step);
            out += ',';
            out += std::to_string(d.departure_step - d.arrival_step);
            out += '\n';
        }
        return out;
    }

} // namespace crossflow
