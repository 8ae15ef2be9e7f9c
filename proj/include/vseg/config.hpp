#pragma once

#include <map>
#include <string>
#include <vector>

#include "vseg/common.hpp"

namespace vseg {

// Plain key=value text config; '#' starts a comment, blank lines ignored.
class KeyValueConfig {
public:
    static KeyValueConfig load(const std::string& path);

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_str(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        std::vector<double> fallback) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace vseg
