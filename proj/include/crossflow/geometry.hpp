#pragma once

#include <iosfwd>
#include <vector>

#include "crossflow/errors.hpp"

namespace crossflow
{
    struct Point
    {
        double x = 0.0;
        double y = 0.0;
    };

    // Normalized line a*x + b*y + c = 0 with a^2 + b^2 = 1, so point
    // distances are plain |a*x + b*y + c|.
    struct CalibrationLine
    {
        Point p1{};
        Point p2{};
        double a = 0.0;
        double b = 0.0;
        double c = 0.0;

        static CalibrationLine from_points(Point p1, Point p2); // DegenerateLineError if equal
    };

    double point_line_distance(Point p, const CalibrationLine& line);

    // Axis-aligned detector output; (x0, y0) is the bottom-left corner in an
    // image frame whose y axis points down, so the box centre sits at
    // (x0 + w/2, y0 - h/2).
    struct DetectionBox
    {
        double x0 = 0.0;
        double y0 = 0.0;
        double width = 0.0;
        double height = 0.0;
    };

    Point box_anchor(const DetectionBox& box);

    // Count boxes per lane.  Lanes are consecutive line pairs (lines 2k and
    // 2k+1 bound lane k); each box joins the lane of its nearest line, ties
    // to the smaller line index.  Throws ConfigError on an empty or odd line
    // set.
    std::vector<int> assign_and_count(const std::vector<DetectionBox>& boxes,
                                      const std::vector<CalibrationLine>& lines);

    // Binary occupancy grid with a region of interest inside it.
    struct OccupancyMask
    {
        int width = 0;
        int height = 0;
        int roi_x0 = 0;
        int roi_y0 = 0;
        int roi_w = 0;
        int roi_h = 0;
        std::vector<std::uint8_t> cells; // row-major, width * height

        std::uint8_t at(int x, int y) const { return cells[std::size_t(y) * width + x]; }
    };

    // Occupied fraction of the region of interest.
    double mask_density(const OccupancyMask& mask);

    // "width height x0 y0 roi_w roi_h" then `height` rows of 0/1 digits.
    OccupancyMask parse_mask(std::istream& in);

    // One "x1 y1 x2 y2" line per calibration line; consecutive pairs bound a
    // lane.
    std::vector<CalibrationLine> parse_calibration(std::istream& in);

} // namespace crossflow
