#pragma once

#include <string>
#include <vector>

#include "vseg/config.hpp"

namespace vseg::cli {

struct RunOptions {
    std::string manifest;    // CSV manifest path or DRIVE-style directory
    std::string config;      // key=value config file (optional)
    std::string out = "out";
    std::string checkpoint;  // predict/evaluate/report
    std::string split;       // override default split for the subcommand
    int index = 0;           // report: manifest entry index within the split
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;  // key=value pairs
};

// Merged file config + --set overrides; rejects unknown keys.
KeyValueConfig resolve_config(const RunOptions& opt);

int cmd_prepare(const RunOptions& opt);
int cmd_train(const RunOptions& opt);
int cmd_predict(const RunOptions& opt);
int cmd_evaluate(const RunOptions& opt);
int cmd_report(const RunOptions& opt);

}  // namespace vseg::cli
