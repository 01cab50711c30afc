#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mmfuse {

// Flat `key = value` experiment config. '#' starts a comment; blank lines are
// skipped. Command-line flags override file values through set().
class RunConfig {
public:
    static RunConfig load(const std::string& path);
    static RunConfig from_pairs(std::initializer_list<std::pair<std::string, std::string>> kv);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;        // empty if absent
    std::vector<std::size_t> get_size_list(const std::string& key) const;     // empty if absent
    std::vector<std::string> get_string_list(const std::string& key) const;   // empty if absent

    // rejects keys outside the allowed set, naming the first offender
    void validate_keys(const std::set<std::string>& allowed) const;

private:
    double parse_double(const std::string& key, const std::string& raw) const;
    std::map<std::string, std::string> values_;
};

}  // namespace mmfuse
