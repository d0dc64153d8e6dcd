#include "crossflow/conflict.hpp"

#include <bit>
#include <sstream>

namespace crossflow
{
    namespace
    {
        constexpr LaneId WR{Approach::West, Turn::Right};
        constexpr LaneId WF{Approach::West, Turn::Forward};
        constexpr LaneId WL{Approach::West, Turn::Left};
        constexpr LaneId ER{Approach::East, Turn::Right};
        constexpr LaneId EF{Approach::East, Turn::Forward};
        constexpr LaneId EL{Approach::East, Turn::Left};
        constexpr LaneId NR{Approach::North, Turn::Right};
        constexpr LaneId NF{Approach::North, Turn::Forward};
        constexpr LaneId NL{Approach::North, Turn::Left};
        constexpr LaneId SR{Approach::South, Turn::Right};
        constexpr LaneId SF{Approach::South, Turn::Forward};
        constexpr LaneId SL{Approach::South, Turn::Left};

        // The 28 crossing/merging movement pairs of the junction, grouped by
        // the lower-indexed lane.
        constexpr std::pair<LaneId, LaneId> kDefaultPairs[] = {
            {WR, EL}, {WR, NF},
            {WF, EL}, {WF, NF}, {WF, NL}, {WF, SR}, {WF, SF}, {WF, SL},
            {WL, ER}, {WL, EF}, {WL, NF}, {WL, NL}, {WL, SF}, {WL, SL},
            {ER, SF},
            {EF, NR}, {EF, NF}, {EF, NL}, {EF, SF}, {EF, SL},
            {EL, NF}, {EL, NL}, {EL, SF}, {EL, SL},
            {NR, SL},
            {NF, SL},
            {NL, SR}, {NL, SF},
        };
    } // namespace

    ConflictRelation ConflictRelation::defaults()
    {
        ConflictRelation rel;
        for (const auto& [a, b] : kDefaultPairs)
        {
            rel.rows_[lane_index(a)] |= std::uint16_t(1u << lane_index(b));
            rel.rows_[lane_index(b)] |= std::uint16_t(1u << lane_index(a));
        }
        return rel;
    }

    ConflictRelation ConflictRelation::from_pairs(const std::vector<std::pair<LaneId, LaneId>>& pairs)
    {
        ConflictRelation rel;
        for (const auto& [a, b] : pairs)
        {
            if (a == b)
                throw IllegalCaseError(std::string("conflict pair on a single lane: ") + lane_name(a));
            rel.rows_[lane_index(a)] |= std::uint16_t(1u << lane_index(b));
            rel.rows_[lane_index(b)] |= std::uint16_t(1u << lane_index(a));
        }
        return rel;
    }

    bool ConflictRelation::conflicts_idx(int a, int b) const
    {
        if (a < 0 || a >= kLaneCount || b < 0 || b >= kLaneCount)
            throw DomainError("lane index out of range");
        if (a == b)
            throw IllegalCaseError(std::string("conflict query on the diagonal: ") +
                                   lane_name(lane_from_index(a)));
        return (rows_[a] >> b) & 1u;
    }

    ConflictRelation ConflictRelation::with_rule(LaneId a, LaneId b, bool conflict) const
    {
        if (a == b)
            throw IllegalCaseError(std::string("conflict rule on a single lane: ") + lane_name(a));
        ConflictRelation out = *this;
        const int ia = lane_index(a);
        const int ib = lane_index(b);
        if (conflict)
        {
            out.rows_[ia] |= std::uint16_t(1u << ib);
            out.rows_[ib] |= std::uint16_t(1u << ia);
        }
        else
        {
            out.rows_[ia] &= std::uint16_t(~(1u << ib));
            out.rows_[ib] &= std::uint16_t(~(1u << ia));
        }
        return out;
    }

    int ConflictRelation::pair_count() const
    {
        int bits = 0;
        for (int i = 0; i < kLaneCount; ++i)
            bits += std::popcount(rows_[i]);
        return bits / 2;
    }

    std::uint16_t ConflictRelation::row_bits(int i) const
    {
        if (i < 0 || i >= kLaneCount)
            throw DomainError("lane index out of range");
        return rows_[i];
    }

    std::string ConflictRelation::to_grid() const
    {
        std::string out;
        out.reserve(kLaneCount * (kLaneCount + 1));
        for (int i = 0; i < kLaneCount; ++i)
        {
            for (int j = 0; j < kLaneCount; ++j)
            {
                if (i == j)
                    out += '#';
                else
                    out += ((rows_[i] >> j) & 1u) ? 'X' : '.';
            }
            out += '\n';
        }
        return out;
    }

    ConflictRelation ConflictRelation::parse_grid(std::string_view text)
    {
        auto is_grid_row = [](const std::string& line) {
            if (line.size() != kLaneCount)
                return false;
            for (char c : line)
                if (c != '.' && c != 'X' && c != '#')
                    return false;
            return true;
        };

        std::vector<std::string> rows;
        std::istringstream in{std::string(text)};
        for (std::string line; std::getline(in, line);)
        {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (is_grid_row(line))
                rows.push_back(line); // anything else is a blank or a note line
        }
        if (rows.size() != kLaneCount)
            throw ConfigError("conflict grid needs 12 rows, got " + std::to_string(rows.size()));

        ConflictRelation rel;
        for (int i = 0; i < kLaneCount; ++i)
        {
            if (rows[i].size() != kLaneCount)
                throw ConfigError("conflict grid row " + std::to_string(i) + " needs 12 cells");
            for (int j = 0; j < kLaneCount; ++j)
            {
                const char c = rows[i][j];
                if (i == j)
                {
                    if (c != '#')
                        throw ConfigError("conflict grid diagonal must be '#'");
                    continue;
                }
                if (c == 'X')
                    rel.rows_[i] |= std::uint16_t(1u << j);
                else if (c != '.')
                    throw ConfigError(std::string("conflict grid has invalid cell '") + c + "'");
            }
        }
        for (int i = 0; i < kLaneCount; ++i)
            for (int j = i + 1; j < kLaneCount; ++j)
                if (((rel.rows_[i] >> j) & 1u) != ((rel.rows_[j] >> i) & 1u))
                    throw ConfigError("conflict grid is not symmetric at " + std::to_string(i) +
                                      "," + std::to_string(j));
        return rel;
    }

} // namespace crossflow
