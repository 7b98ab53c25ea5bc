#include "deforsc/util/toml.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "deforsc/errors.hpp"
#include "deforsc/util/csv.hpp"  // parse_double / parse_int

namespace deforsc {

namespace {

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Remove a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

TomlValue parse_scalar(const std::string& tok, const std::string& ctx) {
    TomlValue v;
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
        v.kind = TomlValue::Kind::String;
        v.str = tok.substr(1, tok.size() - 2);
        return v;
    }
    if (tok == "true" || tok == "false") {
        v.kind = TomlValue::Kind::Boolean;
        v.boolean = (tok == "true");
        return v;
    }
    // Integer if it parses fully as one and has no float markers.
    if (tok.find_first_of(".eE") == std::string::npos) {
        try {
            v.kind = TomlValue::Kind::Integer;
            v.integer = parse_int(tok, ctx);
            v.number = static_cast<double>(v.integer);
            return v;
        } catch (const SchemaError&) {
            // fall through to float attempt for things like "+5"? parse_int
            // handles sign; anything else is an error below.
        }
    }
    v.kind = TomlValue::Kind::Float;
    v.number = parse_double(tok, ctx);
    return v;
}

// Split a one-line array body on top-level commas.
std::vector<std::string> split_array(const std::string& body, const std::string& ctx) {
    std::vector<std::string> parts;
    bool quoted = false;
    std::string cur;
    for (char c : body) {
        if (c == '"') quoted = !quoted;
        if (c == ',' && !quoted) {
            parts.push_back(strip(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string last = strip(cur);
    if (!last.empty()) parts.push_back(last);
    for (const auto& p : parts)
        if (p.empty()) throw SchemaError(ctx + ": empty array element");
    if (quoted) throw SchemaError(ctx + ": unterminated string");
    return parts;
}

}  // namespace

long long TomlValue::as_int(const std::string& ctx) const {
    if (kind != Kind::Integer) throw SchemaError(ctx + ": expected an integer");
    return integer;
}

double TomlValue::as_float(const std::string& ctx) const {
    if (kind == Kind::Integer) return static_cast<double>(integer);
    if (kind != Kind::Float) throw SchemaError(ctx + ": expected a number");
    return number;
}

bool TomlValue::as_bool(const std::string& ctx) const {
    if (kind != Kind::Boolean) throw SchemaError(ctx + ": expected true/false");
    return boolean;
}

const std::string& TomlValue::as_string(const std::string& ctx) const {
    if (kind != Kind::String) throw SchemaError(ctx + ": expected a \"string\"");
    return str;
}

std::vector<std::string> TomlValue::as_string_array(const std::string& ctx) const {
    if (kind != Kind::Array) throw SchemaError(ctx + ": expected an array");
    std::vector<std::string> out;
    for (const auto& e : array) out.push_back(e.as_string(ctx));
    return out;
}

std::vector<double> TomlValue::as_float_array(const std::string& ctx) const {
    if (kind != Kind::Array) throw SchemaError(ctx + ": expected an array");
    std::vector<double> out;
    for (const auto& e : array) out.push_back(e.as_float(ctx));
    return out;
}

bool TomlDoc::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

const TomlValue* TomlDoc::find(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
}

long long TomlDoc::get_int(const std::string& s, const std::string& k, long long fb) const {
    const TomlValue* v = find(s, k);
    return v ? v->as_int("[" + s + "] " + k) : fb;
}

double TomlDoc::get_float(const std::string& s, const std::string& k, double fb) const {
    const TomlValue* v = find(s, k);
    return v ? v->as_float("[" + s + "] " + k) : fb;
}

bool TomlDoc::get_bool(const std::string& s, const std::string& k, bool fb) const {
    const TomlValue* v = find(s, k);
    return v ? v->as_bool("[" + s + "] " + k) : fb;
}

std::string TomlDoc::get_string(const std::string& s, const std::string& k,
                                const std::string& fb) const {
    const TomlValue* v = find(s, k);
    return v ? v->as_string("[" + s + "] " + k) : fb;
}

std::vector<std::string> TomlDoc::get_string_array(const std::string& s, const std::string& k,
                                                   const std::vector<std::string>& fb) const {
    const TomlValue* v = find(s, k);
    return v ? v->as_string_array("[" + s + "] " + k) : fb;
}

TomlDoc parse_toml(const std::string& text) {
    TomlDoc doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string ctx = "config line " + std::to_string(lineno);
        line = strip(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw SchemaError(ctx + ": unterminated section header");
            section = strip(line.substr(1, line.size() - 2));
            if (section.empty()) throw SchemaError(ctx + ": empty section name");
            doc.sections[section];  // register even if empty
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw SchemaError(ctx + ": expected key = value");
        std::string key = strip(line.substr(0, eq));
        std::string val = strip(line.substr(eq + 1));
        if (key.empty()) throw SchemaError(ctx + ": empty key");
        if (val.empty()) throw SchemaError(ctx + ": empty value for '" + key + "'");
        TomlValue v;
        if (val.front() == '[') {
            if (val.back() != ']') throw SchemaError(ctx + ": unterminated array");
            v.kind = TomlValue::Kind::Array;
            for (const auto& tok : split_array(val.substr(1, val.size() - 2), ctx))
                v.array.push_back(parse_scalar(tok, ctx));
        } else {
            v = parse_scalar(val, ctx);
        }
        auto [it, inserted] = doc.sections[section].emplace(key, std::move(v));
        if (!inserted) throw SchemaError(ctx + ": duplicate key '" + key + "'");
    }
    return doc;
}

TomlDoc read_toml(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_toml(ss.str());
    } catch (const SchemaError& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

}  // namespace deforsc
