#include "crossflow/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crossflow
{
    ConflictMatrix make_matrix(ConflictRelation relation)
    {
        ConflictMatrix m;
        m.relation = relation;
        m.diagonal.fill(0);
        return m;
    }

    void update_matrix(ConflictMatrix& m, const std::array<QueueDynamics, kLaneCount>& queues)
    {
        for (int i = 0; i < kLaneCount; ++i)
            m.diagonal[i] = queues[i].state;
    }

    Selection select_open_set(const ConflictMatrix& m, const std::array<bool, kLaneCount>& can_open)
    {
        Selection sel;

        // Running greens and everything conflicting with them are off the table.
        std::uint16_t blocked = 0;
        for (int i = 0; i < kLaneCount; ++i)
            if (m.diagonal[i] < 0)
                blocked |= std::uint16_t((1u << i) | m.relation.row_bits(i));

        // Candidates by descending priority, ties to the lower lane index.
        std::array<int, kLaneCount> order{};
        for (int i = 0; i < kLaneCount; ++i)
            order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return m.diagonal[a] > m.diagonal[b]; });

        // Seed: the best candidate that can usefully open.  The ones scanned
        // past get pinned WaitingActive so their claim survives to the next
        // round.
        std::size_t pos = 0;
        int seed = -1;
        for (; pos < order.size(); ++pos)
        {
            const int q = order[pos];
            if ((blocked >> q) & 1u)
                continue;
            blocked |= std::uint16_t(1u << q);
            if (can_open[q])
            {
                seed = q;
                ++pos;
                break;
            }
            sel.mark_wa.push_back(q);
        }
        if (seed < 0)
            return sel;
        sel.open.push_back(seed);

        // Grow greedily: highest-priority lane compatible with every member.
        // A candidate that fails to open drops out of the running but does
        // not constrain anyone else.
        for (;;)
        {
            int cand = -1;
            for (int c : order)
            {
                if ((blocked >> c) & 1u)
                    continue;
                bool compatible = true;
                for (int member : sel.open)
                    if (m.relation.conflicts_idx(c, member))
                    {
                        compatible = false;
                        break;
                    }
                if (compatible)
                {
                    cand = c;
                    break;
                }
            }
            if (cand < 0)
                break;
            blocked |= std::uint16_t(1u << cand);
            if (can_open[cand])
                sel.open.push_back(cand);
        }
        return sel;
    }

    GreenPhase grant_green(ConflictMatrix& m, const std::vector<int>& open,
                           std::array<QueueDynamics, kLaneCount>& queues,
                           const std::array<double, kLaneCount>& time_to_empty_s, double now,
                           double t_max)
    {
        for (std::size_t i = 0; i < open.size(); ++i)
        {
            for (std::size_t j = i + 1; j < open.size(); ++j)
                if (m.relation.conflicts_idx(open[i], open[j]))
                    throw InvariantViolation(std::string("conflicting lanes granted together: ") +
                                             lane_name(lane_from_index(open[i])) + "/" +
                                             lane_name(lane_from_index(open[j])));
            for (int other = 0; other < kLaneCount; ++other)
                if (m.diagonal[other] < 0 && other != open[i] &&
                    m.relation.conflicts_idx(open[i], other))
                    throw InvariantViolation(std::string("lane granted against a running green: ") +
                                             lane_name(lane_from_index(open[i])) + "/" +
                                             lane_name(lane_from_index(other)));
        }

        GreenPhase phase;
        phase.granted_at = now;
        phase.grants.reserve(open.size());
        for (int lane : open)
        {
            GreenGrant g;
            g.lane = lane;
            g.x_at_grant = time_to_empty_s[lane];
            g.truncated = g.x_at_grant > t_max;
            g.budget_s = g.truncated ? t_max : g.x_at_grant;
            m.diagonal[lane] = kActive;
            queues[lane].state = kActive;
            phase.grants.push_back(g);
        }
        return phase;
    }

    int truncation_reset_state(double x_at_grant, double t_max)
    {
        if (x_at_grant <= t_max)
            return 0;
        const double cut = 1.0 - t_max / x_at_grant; // share of the queue left behind
        const long level = std::lround(kMaxLevel * cut);
        return static_cast<int>(std::clamp(level, 0L, long(kMaxLevel)));
    }

    void end_green(QueueDynamics& q, double x_at_grant, const DwellParams& params, double t_max,
                   double now)
    {
        start_cycle(q, x_at_grant, params, now, truncation_reset_state(x_at_grant, t_max));
    }

} // namespace crossflow
