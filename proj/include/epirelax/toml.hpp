#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "epirelax/common.hpp"

namespace epirelax::toml {

// Minimal TOML subset used by the config files: bare keys, [tables],
// [[arrays of tables]], strings, numbers, booleans and flat arrays (numbers
// or strings, multi-line allowed). Anything else is rejected.

struct Value {
    std::variant<bool, double, std::string, std::vector<double>, std::vector<std::string>> v;

    bool is_number() const { return std::holds_alternative<double>(v); }
    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_array() const { return std::holds_alternative<std::vector<double>>(v); }

    double number() const;
    bool boolean() const;
    const std::string& str() const;
    const std::vector<double>& numbers() const;
};

using Table = std::map<std::string, Value>;

struct Document {
    Table root;
    // Full section name ("measure", "measure.density", ...) -> entries;
    // plain [t] sections hold exactly one entry.
    std::map<std::string, std::vector<Table>> sections;

    bool has(const std::string& section) const { return sections.count(section) > 0; }
    const Table& single(const std::string& section) const;
};

Document parse(const std::string& text);
Document parse_file(const std::string& path);

/// Reject keys outside the allowed set (strict schemas).
void expect_keys(const Table& t, const std::vector<std::string>& allowed,
                 const std::string& where);

}  // namespace epirelax::toml
