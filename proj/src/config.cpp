#include "crossflow/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace crossflow
{
    namespace
    {
        std::string trim(const std::string& s)
        {
            const auto first = s.find_first_not_of(" \t\r");
            if (first == std::string::npos)
                return {};
            const auto last = s.find_last_not_of(" \t\r");
            return s.substr(first, last - first + 1);
        }

        double parse_double(const std::string& key, const std::string& value)
        {
            try
            {
                std::size_t used = 0;
                const double v = std::stod(value, &used);
                if (used != value.size())
                    throw std::invalid_argument("trailing");
                return v;
            }
            catch (const std::exception&)
            {
                throw ConfigError("config key '" + key + "' has a bad number '" + value + "'");
            }
        }

        long long parse_int(const std::string& key, const std::string& value)
        {
            try
            {
                std::size_t used = 0;
                const long long v = std::stoll(value, &used);
                if (used != value.size())
                    throw std::invalid_argument("trailing");
                return v;
            }
            catch (const std::exception&)
            {
                throw ConfigError("config key '" + key + "' has a bad integer '" + value + "'");
            }
        }

        std::uint64_t parse_u64(const std::string& key, const std::string& value)
        {
            try
            {
                std::size_t used = 0;
                const unsigned long long v = std::stoull(value, &used);
                if (used != value.size() || value.find('-') != std::string::npos)
                    throw std::invalid_argument("trailing");
                return v;
            }
            catch (const std::exception&)
            {
                throw ConfigError("config key '" + key + "' has a bad integer '" + value + "'");
            }
        }
    } // namespace

    void apply_setting(SimConfig& cfg, const std::string& key, const std::string& value)
    {
        if (key == "steps")
            cfg.steps = static_cast<int>(parse_int(key, value));
        else if (key == "t_max")
            cfg.t_max = parse_double(key, value);
        else if (key == "scenario")
        {
            const auto s = parse_scenario(value);
            if (!s)
                throw ConfigError("config key 'scenario' must be s1 or s2, got '" + value + "'");
            cfg.scenario = *s;
        }
        else if (key == "controller")
        {
            const auto c = parse_controller(value);
            if (!c)
                throw ConfigError(
                    "config key 'controller' must be adaptive, fixed or greedy, got '" + value +
                    "'");
            cfg.controller = *c;
        }
        else if (key == "seed")
            cfg.seed = parse_u64(key, value);
        else if (key == "lambda_cv")
            cfg.lambda_cv = parse_double(key, value);
        else if (key == "lambda_ev")
            cfg.lambda_ev = parse_double(key, value);
        else if (key == "v_cross")
            cfg.v_cross = parse_double(key, value);
        else if (key == "lane_length_m")
            cfg.lane_length_m = parse_double(key, value);
        else if (key == "exit_length_m")
            cfg.exit_length_m = parse_double(key, value);
        else if (key == "exit_drain_rate")
            cfg.exit_drain_rate = parse_double(key, value);
        else if (key == "vehicle_length_m")
            cfg.vehicle_length_m = parse_double(key, value);
        else if (key == "clearance_s")
            cfg.clearance_s = parse_double(key, value);
        else if (key == "metrics_first_n")
            cfg.metrics_first_n = static_cast<int>(parse_int(key, value));
        else if (key == "dwell_a")
            cfg.dwell.a = parse_double(key, value);
        else if (key == "dwell_y_min")
            cfg.dwell.y_min = parse_double(key, value);
        else if (key == "dwell_y_max")
            cfg.dwell.y_max = parse_double(key, value);
        else if (key == "lane_weights")
        {
            std::array<double, kLaneCount> w{};
            std::istringstream in(value);
            std::string item;
            int n = 0;
            while (std::getline(in, item, ','))
            {
                if (n >= kLaneCount)
                    throw ConfigError("config key 'lane_weights' needs exactly 12 values");
                w[n++] = parse_double(key, trim(item));
            }
            if (n != kLaneCount)
                throw ConfigError("config key 'lane_weights' needs exactly 12 values");
            cfg.lane_weights = w;
        }
        else
            throw ConfigError("unknown config key '" + key + "'");
    }

    SimConfig parse_config(std::istream& in, SimConfig base)
    {
        std::string line;
        int line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.resize(hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(line_no) +
                                  " is not 'key=value': '" + line + "'");
            apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
        return base;
    }

    SimConfig load_config_file(const std::string& path, SimConfig base)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file '" + path + "'");
        return parse_config(in, base);
    }

    std::string config_to_text(const SimConfig& cfg)
    {
        auto num = [](double v) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%g", v);
            return std::string(buf);
        };
        std::string out;
        out += "steps=" + std::to_string(cfg.steps) + "\n";
        out += "t_max=" + num(cfg.t_max) + "\n";
        out += std::string("scenario=") + scenario_name(cfg.scenario) + "\n";
        out += std::string("controller=") + controller_name(cfg.controller) + "\n";
        out += "seed=" + std::to_string(cfg.seed) + "\n";
        out += "lambda_cv=" + num(cfg.lambda_cv) + "\n";
        out += "lambda_ev=" + num(cfg.lambda_ev) + "\n";
        out += "v_cross=" + num(cfg.v_cross) + "\n";
        out += "lane_length_m=" + num(cfg.lane_length_m) + "\n";
        out += "exit_length_m=" + num(cfg.exit_length_m) + "\n";
        out += "exit_drain_rate=" + num(cfg.exit_drain_rate) + "\n";
        out += "vehicle_length_m=" + num(cfg.vehicle_length_m) + "\n";
        out += "clearance_s=" + num(cfg.clearance_s) + "\n";
        out += "metrics_first_n=" + std::to_string(cfg.metrics_first_n) + "\n";
        out += "dwell_a=" + num(cfg.dwell.a) + "\n";
        out += "dwell_y_min=" + num(cfg.dwell.y_min) + "\n";
        out += "dwell_y_max=" + num(cfg.dwell.y_max) + "\n";
        out += "lane_weights=";
        for (int i = 0; i < kLaneCount; ++i)
        {
            if (i)
                out += ',';
            out += num(cfg.lane_weights[i]);
        }
        out += "\n";
        return out;
    }

} // namespace crossflow
