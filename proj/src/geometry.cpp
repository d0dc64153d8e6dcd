#include "crossflow/geometry.hpp"

#include <cmath>
#include <istream>
#include <sstream>
#include <string>

namespace crossflow
{
    CalibrationLine CalibrationLine::from_points(Point p1, Point p2)
    {
        const double a_raw = p2.y - p1.y;
        const double b_raw = p1.x - p2.x;
        const double norm = std::hypot(a_raw, b_raw);
        if (norm == 0.0)
            throw DegenerateLineError("calibration line needs two distinct points");
        CalibrationLine line;
        line.p1 = p1;
        line.p2 = p2;
        line.a = a_raw / norm;
        line.b = b_raw / norm;
        line.c = -(line.a * p1.x + line.b * p1.y);
        return line;
    }

    double point_line_distance(Point p, const CalibrationLine& line)
    {
        return std::abs(line.a * p.x + line.b * p.y + line.c);
    }

    Point box_anchor(const DetectionBox& box)
    {
        return Point{box.x0 + box.width / 2.0, box.y0 - box.height / 2.0};
    }

    std::vector<int> assign_and_count(const std::vector<DetectionBox>& boxes,
                                      const std::vector<CalibrationLine>& lines)
    {
        if (lines.empty())
            throw ConfigError("lane assignment needs calibration lines");
        if (lines.size() % 2 != 0)
            throw ConfigError("calibration lines must pair up, got " +
                              std::to_string(lines.size()));
        std::vector<int> counts(lines.size() / 2, 0);
        for (const DetectionBox& box : boxes)
        {
            const Point anchor = box_anchor(box);
            std::size_t nearest = 0;
            double best = point_line_distance(anchor, lines[0]);
            for (std::size_t j = 1; j < lines.size(); ++j)
            {
                const double d = point_line_distance(anchor, lines[j]);
                if (d < best) // ties keep the earlier line
                {
                    best = d;
                    nearest = j;
                }
            }
            ++counts[nearest / 2];
        }
        return counts;
    }

    double mask_density(const OccupancyMask& mask)
    {
        if (mask.roi_w <= 0 || mask.roi_h <= 0)
            throw ConfigError("mask region of interest has zero area");
        if (mask.roi_x0 < 0 || mask.roi_y0 < 0 || mask.roi_x0 + mask.roi_w > mask.width ||
            mask.roi_y0 + mask.roi_h > mask.height)
            throw ConfigError("mask region of interest leaves the grid");
        long ones = 0;
        for (int y = mask.roi_y0; y < mask.roi_y0 + mask.roi_h; ++y)
            for (int x = mask.roi_x0; x < mask.roi_x0 + mask.roi_w; ++x)
                ones += mask.at(x, y);
        return double(ones) / (double(mask.roi_w) * double(mask.roi_h));
    }

    OccupancyMask parse_mask(std::istream& in)
    {
        OccupancyMask mask;
        if (!(in >> mask.width >> mask.height >> mask.roi_x0 >> mask.roi_y0 >> mask.roi_w >>
              mask.roi_h))
            throw ConfigError("mask header needs 'width height x0 y0 roi_w roi_h'");
        if (mask.width <= 0 || mask.height <= 0)
            throw ConfigError("mask grid must be non-empty");
        mask.cells.assign(std::size_t(mask.width) * std::size_t(mask.height), 0);
        for (int y = 0; y < mask.height; ++y)
        {
            std::string row;
            if (!(in >> row))
                throw ConfigError("mask row " + std::to_string(y) + " is missing");
            if (int(row.size()) != mask.width)
                throw ConfigError("mask row " + std::to_string(y) + " needs " +
                                  std::to_string(mask.width) + " digits");
            for (int x = 0; x < mask.width; ++x)
            {
                if (row[x] != '0' && row[x] != '1')
                    throw ConfigError("mask row " + std::to_string(y) + " has a non-binary cell");
                mask.cells[std::size_t(y) * mask.width + x] = std::uint8_t(row[x] - '0');
            }
        }
        return mask;
    }

    std::vector<CalibrationLine> parse_calibration(std::istream& in)
    {
        std::vector<CalibrationLine> lines;
        std::string text_line;
        int line_no = 0;
        while (std::getline(in, text_line))
        {
            ++line_no;
            const auto hash = text_line.find('#');
            if (hash != std::string::npos)
                text_line.resize(hash);
            std::istringstream ls(text_line);
            double x1, y1, x2, y2;
            if (!(ls >> x1))
                continue; // blank
            if (!(ls >> y1 >> x2 >> y2))
                throw ConfigError("calibration line " + std::to_string(line_no) +
                                  " needs 'x1 y1 x2 y2'");
            lines.push_back(CalibrationLine::from_points(Point{x1, y1}, Point{x2, y2}));
        }
        return lines;
    }

} // namespace crossflow
