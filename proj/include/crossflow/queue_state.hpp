#pragma once

#include <cstdint>

#include "crossflow/lanes.hpp"

namespace crossflow
{
    // Queue state encoding.  A lane is either running green (Active), parked
    // at an internal priority level 0..kMaxLevel, or pinned at WaitingActive,
    // which outranks every internal level when the next green set is picked.
    inline constexpr int kActive = -1;
    inline constexpr int kMaxLevel = 4;
    inline constexpr int kWaitingActive = kMaxLevel + 1;

    // Dwell between priority promotions shrinks geometrically with the load
    // the lane carried in its previous cycle.
    struct DwellParams
    {
        double a = 0.9;
        double y_min = 0.5;
        double y_max = 15.0;
    };

    // What a lane's sensing reports each second.  Densities are occupied
    // fractions in [0,1]; lengths are metres of road the densities refer to.
    struct QueueObservation
    {
        double entry_density = 0.0;
        double entry_length_m = 1.0;
        double exit_density = 0.0;
        double exit_length_m = 1.0;
        bool emergency_present = false;
    };

    // Per-lane controller memory carried across cycles.
    struct QueueDynamics
    {
        LaneId lane{};
        int state = 0;
        std::uint64_t cycle_index = 0;
        double dwell_y = 0.0;             // fixed for the whole cycle
        double level_timer_start = 0.0;   // when the current level was entered
        bool emergency_flag = false;      // set on emergency arrival, edge-triggered
        double last_empty_time_x = 0.0;   // drain estimate that sized this cycle's dwell
    };

    // Seconds of green needed to drain the queue: bounded by the vehicles
    // waiting and by the room left on the exit road.  Zero means opening the
    // lane now would waste the green.
    double time_to_empty(const QueueObservation& obs, double v_cross);

    // y_min + (y_max - y_min) * a^x_prev: a busy previous cycle (large
    // x_prev) earns fast promotions in this one.
    double dwell_time(double x_prev, const DwellParams& params);

    // One promotion check: after the dwell elapses with traffic still
    // waiting, the state climbs one level (capped).  Active and
    // WaitingActive lanes are left alone.  Returns the new state.
    int update_internal_state(QueueDynamics& q, double now, const QueueObservation& obs);

    // Emergency bump: levels below the cap jump straight to it, the cap
    // escalates to WaitingActive, Active and WaitingActive stay put.  Clears
    // the flag.  Returns the new state.
    int handle_emergency(QueueDynamics& q);

    // Start the next cycle after a green ends: recompute the dwell from the
    // drain estimate measured at grant, restart the level timer, drop any
    // stale emergency flag.
    void start_cycle(QueueDynamics& q, double x_prev, const DwellParams& params, double now,
                     int reset_state);

} // namespace crossflow
