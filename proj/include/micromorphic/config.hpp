#ifndef MICROMORPHIC_CONFIG_HPP
#define MICROMORPHIC_CONFIG_HPP

// Flat key = value files. Lines starting with '#' are comments, "[name]"
// opens a section. Keys before the first section are material keys:
//   mu_e lambda_e mu_c mu_h lambda_h alpha1 alpha2 alpha3 variant rho
// plus `material = path` to read them from another file (relative to the
// including file).

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "micromorphic/constitutive.hpp"
#include "micromorphic/error.hpp"
#include "micromorphic/tensor.hpp"

namespace micromorphic {

struct ConfigEntry {
    std::string value;
    int line;
};

/// section -> key -> entry; the unnamed top section is "".
class ConfigFile {
public:
    static ConfigFile parse(const std::string& text, const std::string& origin = "<string>") {
        ConfigFile c;
        c.origin_ = origin;
        std::istringstream is(text);
        std::string line, section;
        int no = 0;
        while (std::getline(is, line)) {
            ++no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') fail(origin, no, "unterminated section header '" + line + "'");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) fail(origin, no, "empty section name");
                c.sections_[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail(origin, no, "expected key = value, got '" + line + "'");
            const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
            if (key.empty()) fail(origin, no, "empty key");
            auto& sec = c.sections_[section];
            if (sec.count(key)) fail(origin, no, "duplicate key '" + key + "'");
            sec[key] = {value, no};
        }
        return c;
    }

    static ConfigFile load(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw ConfigError("cannot open config file '" + path + "'");
        std::ostringstream ss;
        ss << is.rdbuf();
        ConfigFile c = parse(ss.str(), path);
        c.dir_ = std::filesystem::path(path).parent_path().string();
        return c;
    }

    bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
    bool has(const std::string& s, const std::string& key) const {
        auto it = sections_.find(s);
        return it != sections_.end() && it->second.count(key);
    }
    const std::string& origin() const { return origin_; }
    const std::string& directory() const { return dir_; }

    /// Rejects sections and keys outside the allowed sets.
    void require_known(const std::map<std::string, std::set<std::string>>& allowed) const {
        for (const auto& [s, keys] : sections_) {
            auto a = allowed.find(s);
            if (a == allowed.end()) {
                const int line = keys.empty() ? 0 : keys.begin()->second.line;
                fail(origin_, line, "unknown section [" + s + "]");
            }
            for (const auto& [k, e] : keys)
                if (!a->second.count(k))
                    fail(origin_, e.line, "unknown key '" + k + "'" + (s.empty() ? "" : " in [" + s + "]"));
        }
    }

    std::string string(const std::string& s, const std::string& key, const std::string& def) const {
        return has(s, key) ? entry(s, key).value : def;
    }
    double number(const std::string& s, const std::string& key, double def) const {
        return has(s, key) ? to_number(s, key) : def;
    }
    long integer(const std::string& s, const std::string& key, long def) const {
        if (!has(s, key)) return def;
        const auto& e = entry(s, key);
        char* end = nullptr;
        errno = 0;
        const long v = std::strtol(e.value.c_str(), &end, 10);
        if (errno || end == e.value.c_str() || *end != '\0') bad_value(s, key, "an integer");
        return v;
    }
    bool boolean(const std::string& s, const std::string& key, bool def) const {
        if (!has(s, key)) return def;
        const auto& v = entry(s, key).value;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        bad_value(s, key, "a boolean");
        return def;
    }
    /// "a, b, c"
    Vector3 vector3(const std::string& s, const std::string& key, const Vector3& def) const {
        if (!has(s, key)) return def;
        std::istringstream is(entry(s, key).value);
        Vector3 r;
        std::string tok;
        int n = 0;
        while (std::getline(is, tok, ',')) {
            if (n == 3) bad_value(s, key, "three comma-separated numbers");
            r[n++] = parse_double(trim(tok), s, key);
        }
        if (n != 3) bad_value(s, key, "three comma-separated numbers");
        return r;
    }

    const ConfigEntry& entry(const std::string& s, const std::string& key) const {
        return sections_.at(s).at(key);
    }

    static std::string trim(const std::string& x) {
        const auto b = x.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = x.find_last_not_of(" \t\r");
        return x.substr(b, e - b + 1);
    }

private:
    [[noreturn]] static void fail(const std::string& origin, int line, const std::string& msg) {
        throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
    }
    [[noreturn]] void bad_value(const std::string& s, const std::string& key, const char* what) const {
        const auto& e = entry(s, key);
        fail(origin_, e.line, "key '" + key + "' expects " + what + ", got '" + e.value + "'");
    }
    double parse_double(const std::string& v, const std::string& s, const std::string& key) const {
        char* end = nullptr;
        errno = 0;
        const double x = std::strtod(v.c_str(), &end);
        if (errno || end == v.c_str() || *end != '\0') bad_value(s, key, "a number");
        return x;
    }
    double to_number(const std::string& s, const std::string& key) const {
        return parse_double(entry(s, key).value, s, key);
    }

    std::map<std::string, std::map<std::string, ConfigEntry>> sections_;
    std::string origin_;
    std::string dir_;
};

inline const std::set<std::string>& material_keys() {
    static const std::set<std::string> k{"mu_e", "lambda_e", "mu_c", "mu_h", "lambda_h",
                                         "alpha1", "alpha2", "alpha3", "variant", "rho"};
    return k;
}

namespace detail {

inline void read_material_keys(const ConfigFile& c, MaterialParams& p) {
    p.mu_e = c.number("", "mu_e", p.mu_e);
    p.lambda_e = c.number("", "lambda_e", p.lambda_e);
    p.mu_c = c.number("", "mu_c", p.mu_c);
    p.mu_h = c.number("", "mu_h", p.mu_h);
    p.lambda_h = c.number("", "lambda_h", p.lambda_h);
    p.alpha1 = c.number("", "alpha1", p.alpha1);
    p.alpha2 = c.number("", "alpha2", p.alpha2);
    p.alpha3 = c.number("", "alpha3", p.alpha3);
    p.rho = c.number("", "rho", p.rho);
    if (c.has("", "variant")) p.variant = parse_variant(c.string("", "variant", ""));
}

}  // namespace detail

/// A stand-alone material file: only the material keys, no sections.
inline MaterialParams parse_material(const ConfigFile& c) {
    c.require_known({{"", material_keys()}});
    MaterialParams p;
    detail::read_material_keys(c, p);
    if (!(p.rho > 0.0)) throw ConfigError("rho must be positive, value " + std::to_string(p.rho));
    return p;
}

inline MaterialParams load_material(const std::string& path) { return parse_material(ConfigFile::load(path)); }

/// Material of a run config: the `material = path` file first, then inline keys.
inline MaterialParams material_of(const ConfigFile& c) {
    MaterialParams p;
    if (c.has("", "material")) {
        std::filesystem::path mp = c.string("", "material", "");
        if (mp.is_relative() && !c.directory().empty()) mp = std::filesystem::path(c.directory()) / mp;
        p = load_material(mp.string());
    }
    detail::read_material_keys(c, p);
    if (!(p.rho > 0.0)) throw ConfigError("rho must be positive, value " + std::to_string(p.rho));
    return p;
}

}  // namespace micromorphic

#endif  // MICROMORPHIC_CONFIG_HPP
