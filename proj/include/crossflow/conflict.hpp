#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crossflow/lanes.hpp"

namespace crossflow
{
    // Symmetric lane-compatibility relation: conflicts(a, b) is true when the
    // two movements cross or merge and must never hold green together.  The
    // diagonal is deliberately undefined; asking about it throws.
    class ConflictRelation
    {
    public:
        // All movement incompatibilities of the standard 4-way junction.
        static ConflictRelation defaults();

        static ConflictRelation from_pairs(const std::vector<std::pair<LaneId, LaneId>>& pairs);

        bool conflicts(LaneId a, LaneId b) const { return conflicts_idx(lane_index(a), lane_index(b)); }
        bool conflicts_idx(int a, int b) const;

        // Copy with one pair set or cleared (symmetric); a == b throws.
        ConflictRelation with_rule(LaneId a, LaneId b, bool conflict) const;

        // Number of unordered conflicting pairs.
        int pair_count() const;

        // Bit j set when lane i conflicts with lane j.
        std::uint16_t row_bits(int i) const;

        // 12 rows of 12 chars: '.' compatible, 'X' conflict, '#' diagonal.
        std::string to_grid() const;
        static ConflictRelation parse_grid(std::string_view text);

        friend bool operator==(const ConflictRelation& a, const ConflictRelation& b)
        {
            return a.rows_ == b.rows_;
        }
        friend bool operator!=(const ConflictRelation& a, const ConflictRelation& b)
        {
            return !(a == b);
        }

    private:
        std::array<std::uint16_t, kLaneCount> rows_{}; // bit j of rows_[i]
    };

} // namespace crossflow
