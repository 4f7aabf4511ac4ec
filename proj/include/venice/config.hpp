#pragma once

// Plain-text sectioned key-value config (INI-like).  Values are stored
// verbatim so serialization round-trips byte-for-byte; numeric getters accept
// decimals and simple fractions like 10/3.

#include <cctype>
#include <cstdio>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "venice/branched1d.hpp"
#include "venice/common.hpp"

namespace venice::config {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& s) {
    std::string t = trim(s);
    size_t slash = t.find('/');
    try {
        size_t used = 0;
        if (slash != std::string::npos) {
            double num = std::stod(t.substr(0, slash));
            double den = std::stod(t.substr(slash + 1), &used);
            if (den == 0.0) throw ConfigError("division by zero in: " + s);
            return num / den;
        }
        double v = std::stod(t, &used);
        if (used != t.size()) throw ConfigError("trailing characters in number: " + s);
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("not a number: " + s);
    }
}

// Shortest representation that round-trips a double exactly.
inline std::string format_number(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::stod(buf) == v) return buf;
    }
    return buf;
}

struct Config {
    struct Section {
        std::string name;
        std::vector<std::pair<std::string, std::string>> kv;
    };
    std::vector<Section> sections;

    static Config parse(std::istream& is) {
        Config c;
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
                c.sections.push_back({trim(t.substr(1, t.size() - 2)), {}});
                continue;
            }
            size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
            if (c.sections.empty()) c.sections.push_back({"", {}});
            c.sections.back().kv.push_back({trim(t.substr(0, eq)), trim(t.substr(eq + 1))});
        }
        return c;
    }

    static Config parse_string(const std::string& text) {
        std::istringstream is(text);
        return parse(is);
    }

    std::string serialize() const {
        std::ostringstream os;
        for (const auto& s : sections) {
            if (!s.name.empty()) os << '[' << s.name << "]\n";
            for (const auto& [k, v] : s.kv) os << k << " = " << v << '\n';
        }
        return os.str();
    }

    const Section* section(const std::string& name) const {
        for (const auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }

    const std::string* find(const std::string& sec, const std::string& key) const {
        const Section* s = section(sec);
        if (!s) return nullptr;
        for (const auto& [k, v] : s->kv)
            if (k == key) return &v;
        return nullptr;
    }

    double get_double(const std::string& sec, const std::string& key, double def) const {
        const std::string* v = find(sec, key);
        return v ? parse_number(*v) : def;
    }
    int get_int(const std::string& sec, const std::string& key, int def) const {
        const std::string* v = find(sec, key);
        if (!v) return def;
        double d = parse_number(*v);
        return int(d);
    }
    std::string get_str(const std::string& sec, const std::string& key,
                        const std::string& def) const {
        const std::string* v = find(sec, key);
        return v ? *v : def;
    }
};

// Unknown keys are rejected; the schema maps a section-name prefix to its
// allowed keys ("*" allows any key in that section).
inline void validate(const Config& c,
                     const std::map<std::string, std::set<std::string>>& schema) {
    for (const auto& s : c.sections) {
        std::string name = s.name;
        // map-instance sections share one schema entry
        auto it = schema.find(name);
        if (it == schema.end()) {
            size_t dot = name.find('.');
            if (dot != std::string::npos) it = schema.find(name.substr(0, dot) + ".*");
        }
        if (it == schema.end()) throw ConfigError("unknown section [" + name + "]");
        if (it->second.count("*")) continue;
        for (const auto& [k, v] : s.kv) {
            std::string key = k;
            size_t dot = key.find('.');
            if (dot != std::string::npos) key = key.substr(0, dot) + ".*";
            if (!it->second.count(k) && !it->second.count(key))
                throw ConfigError("unknown key '" + k + "' in section [" + name + "]");
        }
    }
}

// ---------------------------------------------------------------------------
// Map instance (de)serialization: one section per map.
//   b, d1, d_star, d2, lambda, and branch.N lines of the form
//   [lo,hi) c0 c1 ... limits vlo vhi
// where the brackets carry the open/closed endpoint flags.

inline Config::Section serialize_map(const branched1d::BranchedIntervalMap& m,
                                     const std::string& name) {
    Config::Section s;
    s.name = name;
    s.kv.push_back({"b", format_number(m.branch_point)});
    s.kv.push_back({"d1", format_number(m.d1)});
    s.kv.push_back({"d_star", format_number(m.d_star)});
    s.kv.push_back({"d2", format_number(m.d2)});
    s.kv.push_back({"lambda", format_number(m.expansion_const)});
    int idx = 1;
    for (const auto& br : m.branches) {
        std::ostringstream v;
        v << (br.domain.lo_open ? '(' : '[') << format_number(br.domain.lo) << ','
          << format_number(br.domain.hi) << (br.domain.hi_open ? ')' : ']');
        for (double c : br.func.coeffs) v << ' ' << format_number(c);
        v << " limits " << format_number(br.limit_lo) << ' ' << format_number(br.limit_hi);
        s.kv.push_back({"branch." + std::to_string(idx++), v.str()});
    }
    return s;
}

inline branched1d::BranchedIntervalMap parse_map(const Config::Section& s) {
    branched1d::BranchedIntervalMap m;
    bool have_b = false;
    for (const auto& [k, v] : s.kv) {
        if (k == "b") { m.branch_point = parse_number(v); have_b = true; }
        else if (k == "d1") m.d1 = parse_number(v);
        else if (k == "d_star") m.d_star = parse_number(v);
        else if (k == "d2") m.d2 = parse_number(v);
        else if (k == "lambda") m.expansion_const = parse_number(v);
        else if (k.rfind("branch.", 0) == 0) {
            std::string t = trim(v);
            if (t.empty() || (t[0] != '[' && t[0] != '('))
                throw ConfigError("branch domain must start with [ or (: " + v);
            branched1d::Branch br;
            br.domain.lo_open = (t[0] == '(');
            size_t comma = t.find(',');
            size_t close = t.find_first_of("])");
            if (comma == std::string::npos || close == std::string::npos || close < comma)
                throw ConfigError("malformed branch domain: " + v);
            br.domain.lo = parse_number(t.substr(1, comma - 1));
            br.domain.hi = parse_number(t.substr(comma + 1, close - comma - 1));
            br.domain.hi_open = (t[close] == ')');
            std::istringstream rest(t.substr(close + 1));
            std::string tok;
            std::vector<std::string> toks;
            while (rest >> tok) toks.push_back(tok);
            size_t lim = toks.size();
            for (size_t i = 0; i < toks.size(); ++i)
                if (toks[i] == "limits") lim = i;
            if (lim + 3 != toks.size())
                throw ConfigError("branch needs 'limits lo hi' suffix: " + v);
            for (size_t i = 0; i < lim; ++i) br.func.coeffs.push_back(parse_number(toks[i]));
            if (br.func.coeffs.empty()) throw ConfigError("branch has no coefficients: " + v);
            br.limit_lo = parse_number(toks[lim + 1]);
            br.limit_hi = parse_number(toks[lim + 2]);
            m.branches.push_back(br);
        } else {
            throw ConfigError("unknown map key: " + k);
        }
    }
    if (!have_b || m.branches.empty()) throw ConfigError("incomplete map section");
    return m;
}

}  // namespace venice::config
