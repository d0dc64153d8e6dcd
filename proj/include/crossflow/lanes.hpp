#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "crossflow/errors.hpp"

namespace crossflow
{
    inline constexpr int kLaneCount = 12;
    inline constexpr int kApproachCount = 4;

    // Entry roads of the junction, in canonical order.
    enum class Approach : std::uint8_t { West = 0, East = 1, North = 2, South = 3 };

    // Movement made from an entry lane.
    enum class Turn : std::uint8_t { Right = 0, Forward = 1, Left = 2 };

    enum class VehicleClass : std::uint8_t { Classic = 0, Emergency = 1 };

    struct LaneId
    {
        Approach approach{Approach::West};
        Turn turn{Turn::Right};

        friend constexpr bool operator==(LaneId a, LaneId b)
        {
            return a.approach == b.approach && a.turn == b.turn;
        }
        friend constexpr bool operator!=(LaneId a, LaneId b) { return !(a == b); }
    };

    // Canonical index: approaches W,E,N,S by turns R,F,L, so WR=0 .. SL=11.
    constexpr int lane_index(LaneId id)
    {
        return static_cast<int>(id.approach) * 3 + static_cast<int>(id.turn);
    }

    constexpr LaneId lane_from_index(int index)
    {
        if (index < 0 || index >= kLaneCount)
            throw DomainError("lane index out of range");
        return LaneId{static_cast<Approach>(index / 3), static_cast<Turn>(index % 3)};
    }

    constexpr const char* lane_name(LaneId id)
    {
        constexpr const char* names[kLaneCount] = {
            "WR", "WF", "WL", "ER", "EF", "EL", "NR", "NF", "NL", "SR", "SF", "SL"};
        return names[lane_index(id)];
    }

    constexpr const char* approach_name(Approach a)
    {
        constexpr const char* names[kApproachCount] = {"W", "E", "N", "S"};
        return names[static_cast<int>(a)];
    }

    // "WR", "ef", ... -> LaneId; anything else -> nullopt.
    std::optional<LaneId> parse_lane(std::string_view text);

    // Road a vehicle leaves on after completing its movement.  Right turns
    // keep to the near side, forward crosses to the opposite road, left
    // turns sweep to the far side.
    constexpr Approach exit_road(LaneId id)
    {
        constexpr Approach table[kLaneCount] = {
            Approach::South, Approach::East,  Approach::North,  // from W
            Approach::North, Approach::West,  Approach::South,  // from E
            Approach::West,  Approach::South, Approach::East,   // from N
            Approach::East,  Approach::North, Approach::West,   // from S
        };
        return table[lane_index(id)];
    }

    struct Vehicle
    {
        std::uint64_t id = 0;
        VehicleClass cls = VehicleClass::Classic;
        double length_m = 5.0;
        int arrival_step = 0;
        int departure_step = -1; // -1 until the junction is crossed
    };

    // Completed-trip wait in whole seconds; throws if still queued.
    int waiting_time(const Vehicle& v);

} // namespace crossflow
