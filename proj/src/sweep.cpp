#include "crossflow/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <thread>

#include "crossflow/stats.hpp"

namespace crossflow
{
    namespace
    {
        // Run an indexed batch of configs across worker threads; slot i of
        // the result always belongs to configs[i].
        std::vector<SweepRow> run_batch(std::vector<SimConfig> configs, int jobs)
        {
            std::vector<SweepRow> rows(configs.size());
            for (std::size_t i = 0; i < configs.size(); ++i)
                rows[i].cfg = configs[i];

            unsigned workers = jobs > 0 ? unsigned(jobs) : std::thread::hardware_concurrency();
            if (workers == 0)
                workers = 1;
            workers = std::min<unsigned>(workers, std::max<std::size_t>(configs.size(), 1));

            std::atomic<std::size_t> next{0};
            auto work = [&]() {
                for (;;)
                {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= rows.size())
                        return;
                    rows[i].metrics = run_simulation(rows[i].cfg);
                }
            };
            if (workers <= 1)
            {
                work();
            }
            else
            {
                std::vector<std::thread> pool;
                pool.reserve(workers);
                for (unsigned w = 0; w < workers; ++w)
                    pool.emplace_back(work);
                for (auto& t : pool)
                    t.join();
            }
            return rows;
        }

        std::string fmt4(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.4f", v);
            return buf;
        }
    } // namespace

    std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs)
    {
        std::vector<SimConfig> configs;
        configs.reserve(spec.scenarios.size() * spec.t_max_values.size() * spec.seeds.size());
        for (Scenario s : spec.scenarios)
            for (double t : spec.t_max_values)
                for (std::uint64_t seed : spec.seeds)
                {
                    SimConfig cfg = spec.base;
                    cfg.scenario = s;
                    cfg.t_max = t;
                    cfg.seed = seed;
                    configs.push_back(cfg);
                }
        return run_batch(std::move(configs), jobs);
    }

    std::string sweep_csv(const std::vector<SweepRow>& rows)
    {
        std::string out = summary_csv_header();
        for (const SweepRow& r : rows)
            out += summary_csv_row(r.cfg, r.metrics);
        return out;
    }

    std::vector<MedianRow> sweep_medians(const SweepSpec& spec, const std::vector<SweepRow>& rows)
    {
        std::vector<MedianRow> out;
        std::size_t at = 0;
        for (Scenario s : spec.scenarios)
            for (double t : spec.t_max_values)
            {
                std::vector<double> all, cv, ev, thr;
                for (std::size_t k = 0; k < spec.seeds.size(); ++k, ++at)
                {
                    all.push_back(rows[at].metrics.awt_all);
                    cv.push_back(rows[at].metrics.awt_cv);
                    ev.push_back(rows[at].metrics.awt_ev);
                    thr.push_back(double(rows[at].metrics.throughput));
                }
                MedianRow m;
                m.scenario = s;
                m.t_max = t;
                m.awt_all = median(all);
                m.awt_cv = median(cv);
                m.awt_ev = median(ev);
                m.throughput = median(thr);
                out.push_back(m);
            }
        return out;
    }

    std::string medians_csv(const std::vector<MedianRow>& rows)
    {
        std::string out = "scenario,t_max,awt_all_median,awt_cv_median,awt_ev_median,"
                          "throughput_median\n";
        for (const MedianRow& r : rows)
        {
            char head[64];
            std::snprintf(head, sizeof head, "%s,%g,", scenario_name(r.scenario), r.t_max);
            out += head;
            out += fmt4(r.awt_all);
            out += ',';
            out += fmt4(r.awt_cv);
            out += ',';
            out += fmt4(r.awt_ev);
            out += ',';
            out += fmt4(r.throughput);
            out += '\n';
        }
        return out;
    }

    std::vector<SweepRow> run_compare(const CompareSpec& spec, int jobs)
    {
        std::vector<SimConfig> configs;
        configs.reserve(spec.controllers.size() * spec.seeds.size());
        for (ControllerKind c : spec.controllers)
            for (std::uint64_t seed : spec.seeds)
            {
                SimConfig cfg = spec.base;
                cfg.controller = c;
                cfg.seed = seed;
                configs.push_back(cfg);
            }
        return run_batch(std::move(configs), jobs);
    }

    std::string compare_csv(const std::vector<SweepRow>& rows)
    {
        std::string out = "controller,scenario,t_max,seed,awt_all,awt_cv,awt_ev,throughput,"
                          "collisions,empty_green_grants,spillback,max_wait_s\n";
        for (const SweepRow& r : rows)
        {
            out += controller_name(r.cfg.controller);
            out += ',';
            std::string row = summary_csv_row(r.cfg, r.metrics);
            row.pop_back(); // swap the newline for the extra wait column
            out += row;
            out += ',';
            out += fmt4(r.metrics.max_wait_s);
            out += '\n';
        }
        return out;
    }

} // namespace crossflow
