#pragma once

#include <string>
#include <vector>

#include "crossflow/sim.hpp"

namespace crossflow
{
    // Grid of runs: scenarios x green caps x seeds over one base config.
    struct SweepSpec
    {
        SimConfig base{};
        std::vector<Scenario> scenarios{Scenario::S1Priority, Scenario::S2NoPriority};
        std::vector<double> t_max_values{15, 20, 25, 30, 35, 40, 45, 50,
                                         55, 60, 65, 70, 75, 80, 85, 90};
        std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    };

    struct SweepRow
    {
        SimConfig cfg;
        MetricsRecord metrics;
    };

    // Runs every cell, farming cells out to `jobs` worker threads (0 picks
    // the hardware count).  The returned order and all derived CSV bytes are
    // independent of the thread count.
    std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs = 0);

    std::string sweep_csv(const std::vector<SweepRow>& rows);

    // Per-cell medians across seeds, in sweep order.
    struct MedianRow
    {
        Scenario scenario{};
        double t_max = 0.0;
        double awt_all = 0.0;
        double awt_cv = 0.0;
        double awt_ev = 0.0;
        double throughput = 0.0;
    };

    std::vector<MedianRow> sweep_medians(const SweepSpec& spec, const std::vector<SweepRow>& rows);
    std::string medians_csv(const std::vector<MedianRow>& rows);

    // Head-to-head of controllers on identical arrival processes.
    struct CompareSpec
    {
        SimConfig base{};
        std::vector<ControllerKind> controllers{ControllerKind::Adaptive,
                                                ControllerKind::FixedCycle,
                                                ControllerKind::GreedyLongest};
        std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    };

    std::vector<SweepRow> run_compare(const CompareSpec& spec, int jobs = 0);
    std::string compare_csv(const std::vector<SweepRow>& rows);

} // namespace crossflow
