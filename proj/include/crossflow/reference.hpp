#pragma once

// Slow, separately-written recomputations of the load-bearing results.  The
// main implementations are checked against these, never derived from them:
// keep the two sides independent when editing either.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "crossflow/conflict.hpp"
#include "crossflow/geometry.hpp"
#include "crossflow/queue_state.hpp"

namespace crossflow::reference
{
    struct SelectionRef
    {
        std::vector<int> open;
        std::vector<int> wa;
    };

    // Next green set, restated with plain lists and repeated scans.
    inline SelectionRef open_set(const ConflictRelation& rel, const std::array<int, kLaneCount>& diag,
                                 const std::array<bool, kLaneCount>& can_open)
    {
        auto contains = [](const std::vector<int>& v, int x) {
            return std::find(v.begin(), v.end(), x) != v.end();
        };

        std::vector<int> untouchable; // running greens and their conflicts
        for (int i = 0; i < kLaneCount; ++i)
            if (diag[i] < 0)
            {
                if (!contains(untouchable, i))
                    untouchable.push_back(i);
                for (int j = 0; j < kLaneCount; ++j)
                    if (j != i && rel.conflicts_idx(i, j) && !contains(untouchable, j))
                        untouchable.push_back(j);
            }

        std::vector<int> prio;
        for (int i = 0; i < kLaneCount; ++i)
            if (!contains(untouchable, i))
                prio.push_back(i);
        std::sort(prio.begin(), prio.end(), [&](int a, int b) {
            if (diag[a] != diag[b])
                return diag[a] > diag[b];
            return a < b;
        });

        SelectionRef out;
        std::size_t k = 0;
        for (; k < prio.size(); ++k)
        {
            if (can_open[prio[k]])
            {
                out.open.push_back(prio[k]);
                ++k;
                break;
            }
            out.wa.push_back(prio[k]);
        }
        if (out.open.empty())
            return out;

        std::vector<int> rest(prio.begin() + long(k), prio.end());
        for (;;)
        {
            int pick = -1;
            for (int c : rest)
            {
                bool ok = true;
                for (int m : out.open)
                    if (rel.conflicts_idx(c, m))
                    {
                        ok = false;
                        break;
                    }
                if (ok)
                {
                    pick = c; // rest is already in priority order
                    break;
                }
            }
            if (pick < 0)
                break;
            rest.erase(std::find(rest.begin(), rest.end(), pick));
            if (can_open[pick])
                out.open.push_back(pick);
        }
        return out;
    }

    inline long double dwell(long double x_prev, const DwellParams& p)
    {
        return (long double)(p.y_min) +
               ((long double)(p.y_max) - (long double)(p.y_min)) * powl((long double)(p.a), x_prev);
    }

    inline long double time_to_empty(long double entry_density, long double entry_length,
                                     long double exit_density, long double exit_length,
                                     long double v_cross)
    {
        const long double room = (1.0L - exit_density) * exit_length;
        const long double queued = entry_density * entry_length;
        return fminl(room, queued) / v_cross;
    }

    // Per-lane box counts straight from the raw line endpoints, using the
    // two-point distance form instead of normalized coefficients.
    inline std::vector<int> count_boxes(const std::vector<DetectionBox>& boxes,
                                        const std::vector<std::array<double, 4>>& endpoints)
    {
        std::vector<int> counts(endpoints.size() / 2, 0);
        for (const DetectionBox& box : boxes)
        {
            const double px = box.x0 + box.width / 2.0;
            const double py = box.y0 - box.height / 2.0;
            std::size_t nearest = 0;
            double best = -1.0;
            for (std::size_t j = 0; j < endpoints.size(); ++j)
            {
                const double x1 = endpoints[j][0], y1 = endpoints[j][1];
                const double x2 = endpoints[j][2], y2 = endpoints[j][3];
                const double num = std::abs((y2 - y1) * (px - x1) - (x2 - x1) * (py - y1));
                const double d = num / std::hypot(x2 - x1, y2 - y1);
                if (best < 0.0 || d < best)
                {
                    best = d;
                    nearest = j;
                }
            }
            ++counts[nearest / 2];
        }
        return counts;
    }

    inline double mask_density(const OccupancyMask& m)
    {
        long ones = 0;
        long area = 0;
        for (int y = 0; y < m.height; ++y)
            for (int x = 0; x < m.width; ++x)
                if (x >= m.roi_x0 && x < m.roi_x0 + m.roi_w && y >= m.roi_y0 &&
                    y < m.roi_y0 + m.roi_h)
                {
                    ++area;
                    ones += m.at(x, y);
                }
        return double(ones) / double(area);
    }

} // namespace crossflow::reference
