#pragma once

#include <iosfwd>
#include <string>

#include "crossflow/sim.hpp"

namespace crossflow
{
    // Flat "key=value" run settings; '#' starts a comment, blank lines are
    // fine, every key has a CLI twin.  Unknown keys and bad values throw
    // ConfigError naming the key.
    SimConfig parse_config(std::istream& in, SimConfig base = {});
    SimConfig load_config_file(const std::string& path, SimConfig base = {});

    // Apply one "key=value" setting; shared by the file parser and the CLI.
    void apply_setting(SimConfig& cfg, const std::string& key, const std::string& value);

    // The settings back out, one per line, in a fixed key order.
    std::string config_to_text(const SimConfig& cfg);

} // namespace crossflow
