#ifndef AENBO_IO_HPP
#define AENBO_IO_HPP
#pragma once

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aenbo/design.hpp"
#include "aenbo/errors.hpp"

namespace aenbo {

inline constexpr std::string_view kVersion = "0.1.0";

/// Shortest form is not guaranteed; %.17g always round-trips.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path), width_(header.size()) {
        if (!out_) throw ConfigError("cannot open " + path.string() + " for writing");
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw DimensionError("CSV row has the wrong number of cells");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
        if (!out_) throw Error("CSV write failed");
    }

private:
    std::ofstream out_;
    std::size_t width_;
};

// ----------------------------------------------------------------- config files

/// Flat key -> value settings.
using Settings = std::map<std::string, std::string>;

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

/// Parses "key = value" lines; '#' starts a comment. Keys outside `allowed`
/// and repeated keys are errors reported with the line number.
inline Settings parse_config(std::istream& in, const std::set<std::string>& allowed, const std::string& origin) {
    Settings out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? std::string_view(line) : std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        const auto where = origin + ":" + std::to_string(lineno) + ": ";
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + body + "'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ConfigError(where + "missing key");
        if (!allowed.count(key)) throw ConfigError(where + "unknown key '" + key + "'");
        if (out.count(key)) throw ConfigError(where + "duplicate key '" + key + "'");
        out[key] = value;
    }
    return out;
}

inline Settings parse_config_file(const std::filesystem::path& path, const std::set<std::string>& allowed) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    return parse_config(in, allowed, path.string());
}

inline const std::string& setting(const Settings& s, const std::string& key) {
    const auto it = s.find(key);
    if (it == s.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

inline double setting_double(const Settings& s, const std::string& key) {
    const std::string& v = setting(s, key);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
}

inline long long setting_int(const Settings& s, const std::string& key) {
    const std::string& v = setting(s, key);
    try {
        std::size_t used = 0;
        const long long d = std::stoll(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'");
}

inline std::uint64_t setting_seed(const Settings& s, const std::string& key) {
    const std::string& v = setting(s, key);
    try {
        std::size_t used = 0;
        const unsigned long long d = std::stoull(v, &used);
        if (used == v.size() && v.front() != '-') return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "' expects a nonnegative integer, got '" + v + "'");
}

inline std::vector<int> parse_int_list(std::string_view text) {
    std::vector<int> out;
    std::stringstream ss{std::string(text)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(t, &used));
            if (used != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            throw ConfigError("expected a comma-separated integer list, got '" + std::string(text) + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty integer list");
    return out;
}

/// "lo:hi,lo:hi,..." -> box.
inline BoxDomain parse_domain(std::string_view text) {
    std::vector<double> lo;
    std::vector<double> hi;
    std::stringstream ss{std::string(text)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        const auto colon = t.find(':', 1);
        try {
            if (colon == std::string::npos) throw std::invalid_argument(t);
            std::size_t u1 = 0;
            std::size_t u2 = 0;
            const std::string a = t.substr(0, colon);
            const std::string b = t.substr(colon + 1);
            lo.push_back(std::stod(a, &u1));
            hi.push_back(std::stod(b, &u2));
            if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            throw ConfigError("domain interval '" + t + "' is not of the form lo:hi");
        }
    }
    if (lo.empty()) throw ConfigError("empty domain");
    try {
        return BoxDomain(Eigen::Map<Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                         Eigen::Map<Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size())));
    } catch (const ParamError& e) {
        throw ConfigError(std::string("invalid domain: ") + e.what());
    }
}

inline nlohmann::json domain_json(const BoxDomain& d) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < d.dim(); ++i) j.push_back({d.lo(i), d.hi(i)});
    return j;
}

// --------------------------------------------------------------------- manifest

inline std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunManifest {
    std::string command;
    Settings config;
    std::uint64_t seed = 0;
    /// Output file names relative to the manifest directory.
    std::vector<std::string> artifacts;
    std::string version{kVersion};
    std::string started_at;
    std::optional<std::string> finished_at;
    /// Command-specific facts such as the active domain.
    nlohmann::json details = nlohmann::json::object();

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["config"] = config;
        j["seed"] = seed;
        j["artifacts"] = artifacts;
        j["version"] = version;
        j["started_at"] = started_at;
        j["finished_at"] = finished_at ? nlohmann::json(*finished_at) : nlohmann::json(nullptr);
        j["details"] = details;
        return j;
    }

    static RunManifest from_json(const nlohmann::json& j) {
        RunManifest m;
        try {
            m.command = j.at("command").get<std::string>();
            m.config = j.at("config").get<Settings>();
            m.seed = j.at("seed").get<std::uint64_t>();
            m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
            m.version = j.at("version").get<std::string>();
            m.started_at = j.at("started_at").get<std::string>();
            if (!j.at("finished_at").is_null()) m.finished_at = j.at("finished_at").get<std::string>();
            if (j.contains("details")) m.details = j.at("details");
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("malformed manifest: ") + e.what());
        }
        return m;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw ConfigError("cannot write manifest " + path.string());
        out << to_json().dump(2) << '\n';
    }

    static RunManifest read(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read manifest " + path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("manifest " + path.string() + " is not valid JSON: " + e.what());
        }
        return from_json(j);
    }
};

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace aenbo

#endif // AENBO_IO_HPP
