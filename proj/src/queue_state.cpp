#include "crossflow/queue_state.hpp"

#include <algorithm>
#include <cmath>

namespace crossflow
{
    double time_to_empty(const QueueObservation& obs, double v_cross)
    {
        if (v_cross <= 0.0)
            throw ConfigError("v_cross must be positive");
        if (obs.entry_density < 0.0 || obs.entry_density > 1.0 ||
            obs.exit_density < 0.0 || obs.exit_density > 1.0)
            throw DomainError("density outside [0,1]");
        if (obs.entry_length_m < 0.0 || obs.exit_length_m < 0.0)
            throw DomainError("negative road length");

        const double exit_room_m = (1.0 - obs.exit_density) * obs.exit_length_m;
        const double queued_m = obs.entry_density * obs.entry_length_m;
        return std::min(exit_room_m, queued_m) / v_cross;
    }

    double dwell_time(double x_prev, const DwellParams& params)
    {
        if (x_prev < 0.0)
            throw DomainError("x_prev must be non-negative");
        if (params.a <= 0.0 || params.a >= 1.0)
            throw ConfigError("dwell decay a must sit in (0,1)");
        if (params.y_min <= 0.0 || params.y_max < params.y_min)
            throw ConfigError("dwell bounds need 0 < y_min <= y_max");
        return params.y_min + (params.y_max - params.y_min) * std::pow(params.a, x_prev);
    }

    int update_internal_state(QueueDynamics& q, double now, const QueueObservation& obs)
    {
        if (q.state < 0 || q.state > kMaxLevel)
            return q.state; // Active and WaitingActive do not promote
        if (now - q.level_timer_start >= q.dwell_y && obs.entry_density != 0.0)
        {
            q.state = std::min(q.state + 1, kMaxLevel);
            q.level_timer_start = now;
        }
        return q.state;
    }

    int handle_emergency(QueueDynamics& q)
    {
        if (q.state >= 0 && q.state < kMaxLevel)
            q.state = kMaxLevel;
        else if (q.state == kMaxLevel)
            q.state = kWaitingActive;
        // Active (-1) and WaitingActive obey the regular cycle from here on
        q.emergency_flag = false;
        return q.state;
    }

    void start_cycle(QueueDynamics& q, double x_prev, const DwellParams& params, double now,
                     int reset_state)
    {
        q.cycle_index += 1;
        q.dwell_y = dwell_time(x_prev, params);
        q.state = reset_state;
        q.level_timer_start = now;
        q.emergency_flag = false;
        q.last_empty_time_x = x_prev;
    }

} // namespace crossflow
