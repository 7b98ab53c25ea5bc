// Reader for the flat TOML subset used by run configs: [section] headers,
// key = value lines, values are integers, floats, booleans, "strings", or
// one-line arrays of those. Comments (#) and blank lines allowed. That is the
// whole config surface; nested tables and multi-line values are rejected.
#pragma once

#include <map>
#include <string>
#include <vector>

namespace deforsc {

struct TomlValue {
    enum class Kind { Integer, Float, Boolean, String, Array };
    Kind kind = Kind::String;
    long long integer = 0;
    double number = 0.0;
    bool boolean = false;
    std::string str;
    std::vector<TomlValue> array;

    // Typed accessors; throw SchemaError on kind mismatch (integers widen to
    // float transparently).
    long long as_int(const std::string& context) const;
    double as_float(const std::string& context) const;
    bool as_bool(const std::string& context) const;
    const std::string& as_string(const std::string& context) const;
    std::vector<std::string> as_string_array(const std::string& context) const;
    std::vector<double> as_float_array(const std::string& context) const;
};

class TomlDoc {
  public:
    // section -> key -> value; section "" holds top-level keys.
    std::map<std::string, std::map<std::string, TomlValue>> sections;

    bool has(const std::string& section, const std::string& key) const;
    const TomlValue* find(const std::string& section, const std::string& key) const;

    long long get_int(const std::string& section, const std::string& key, long long fallback) const;
    double get_float(const std::string& section, const std::string& key, double fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    std::vector<std::string> get_string_array(const std::string& section, const std::string& key,
                                              const std::vector<std::string>& fallback) const;
};

TomlDoc parse_toml(const std::string& text);
TomlDoc read_toml(const std::string& path);

}  // namespace deforsc
