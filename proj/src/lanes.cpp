#include "crossflow/lanes.hpp"

namespace crossflow
{
    std::optional<LaneId> parse_lane(std::string_view text)
    {
        if (text.size() != 2)
            return std::nullopt;
        auto upper = [](char c) { return (c >= 'a' && c <= 'z') ? char(c - 'a' + 'A') : c; };

        Approach approach{};
        switch (upper(text[0]))
        {
        case 'W': approach = Approach::West; break;
        case 'E': approach = Approach::East; break;
        case 'N': approach = Approach::North; break;
        case 'S': approach = Approach::South; break;
        default: return std::nullopt;
        }

        Turn turn{};
        switch (upper(text[1]))
        {
        case 'R': turn = Turn::Right; break;
        case 'F': turn = Turn::Forward; break;
        case 'L': turn = Turn::Left; break;
        default: return std::nullopt;
        }
        return LaneId{approach, turn};
    }

    int waiting_time(const Vehicle& v)
    {
        if (v.departure_step < 0)
            throw NotDepartedError("vehicle " + std::to_string(v.id) + " has not departed");
        return v.departure_step - v.arrival_step;
    }

} // namespace crossflow
