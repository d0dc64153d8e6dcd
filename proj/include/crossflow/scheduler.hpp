#pragma once

#include <array>
#include <vector>

#include "crossflow/conflict.hpp"
#include "crossflow/queue_state.hpp"

namespace crossflow
{
    // Pairwise relation plus the live per-lane states on the diagonal.
    struct ConflictMatrix
    {
        ConflictRelation relation;
        std::array<int, kLaneCount> diagonal{};
    };

    ConflictMatrix make_matrix(ConflictRelation relation);

    // Refresh the diagonal from the queues; the off-diagonal entries only
    // change through rule edits.
    void update_matrix(ConflictMatrix& m, const std::array<QueueDynamics, kLaneCount>& queues);

    struct Selection
    {
        std::vector<int> open;    // lanes to grant, in pick order
        std::vector<int> mark_wa; // lanes that wanted green but cannot usefully open
    };

    // Pick the next green set.  Lanes already Active and all their conflicts
    // are untouchable.  The remaining lanes are scanned by descending
    // priority (ties to the lower index); lanes that cannot open usefully
    // are pinned WaitingActive and skipped; the first that can open seeds
    // the set, which then grows greedily with the highest-priority lane
    // compatible with every member so far.  The result is conflict-free and
    // cannot be extended by any openable lane left outside it.
    Selection select_open_set(const ConflictMatrix& m, const std::array<bool, kLaneCount>& can_open);

    struct GreenGrant
    {
        int lane = 0;
        double x_at_grant = 0.0; // drain estimate when green started
        double budget_s = 0.0;   // min(x_at_grant, t_max)
        bool truncated = false;  // budget clipped by t_max
    };

    struct GreenPhase
    {
        std::vector<GreenGrant> grants;
        double granted_at = 0.0;
    };

    // Flip the chosen lanes to Active and hand each a green budget clipped
    // to the fairness cap.  A mutually conflicting set throws: the selection
    // above makes that impossible, this is the backstop.
    GreenPhase grant_green(ConflictMatrix& m, const std::vector<int>& open,
                           std::array<QueueDynamics, kLaneCount>& queues,
                           const std::array<double, kLaneCount>& time_to_empty_s, double now,
                           double t_max);

    // Level a lane restarts at after green: zero after a full drain, and
    // proportionally higher the more of the queue the cap cut off.
    int truncation_reset_state(double x_at_grant, double t_max);

    // Close one lane's green and roll it into its next cycle.
    void end_green(QueueDynamics& q, double x_at_grant, const DwellParams& params, double t_max,
                   double now);

} // namespace crossflow
