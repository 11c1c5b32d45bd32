#pragma once
// Serialization for tables, ensembles, and verification reports: CSV with a
// config echo comment, JSON with stable key order, atomic file writes.
// Floats carry 17 significant digits so a written table re-reads exactly.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include <kpz/common.hpp>
#include <kpz/density.hpp>
#include <kpz/processes.hpp>
#include <kpz/report.hpp>

namespace kpz {

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// JSON number token; JSON has no NaN/Inf so those become null
inline std::string json_number(double v) {
    if (!std::isfinite(v)) return "null";
    return fmt_g17(v);
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out;
}

inline std::string json_array(const std::vector<double>& v) {
    std::string out = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += json_number(v[i]);
    }
    out += "]";
    return out;
}

// Insertion-ordered key/value JSON object builder. Values are raw JSON
// tokens; the typed setters do the encoding.
class JsonObject {
  public:
    void set_raw(const std::string& key, std::string raw) {
        kv_.emplace_back(key, std::move(raw));
    }
    void set(const std::string& key, double v) { set_raw(key, json_number(v)); }
    void set(const std::string& key, int v) { set_raw(key, std::to_string(v)); }
    void set(const std::string& key, uint64_t v) { set_raw(key, std::to_string(v)); }
    void set(const std::string& key, bool v) { set_raw(key, v ? "true" : "false"); }
    void set(const std::string& key, const std::string& v) {
        set_raw(key, "\"" + json_escape(v) + "\"");
    }
    void set(const std::string& key, const char* v) { set(key, std::string(v)); }
    void set(const std::string& key, const std::vector<double>& v) {
        set_raw(key, json_array(v));
    }
    void set(const std::string& key, const JsonObject& v) { set_raw(key, v.str()); }

    bool empty() const { return kv_.empty(); }

    std::string str() const {
        std::string out = "{";
        for (size_t i = 0; i < kv_.size(); ++i) {
            if (i) out += ",";
            out += "\"" + json_escape(kv_[i].first) + "\":" + kv_[i].second;
        }
        out += "}";
        return out;
    }

  private:
    std::vector<std::pair<std::string, std::string>> kv_;
};

// CSV field quoting per RFC 4180: quote when the text contains a comma,
// quote, or newline; inner quotes double up.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    out += "\"";
    return out;
}

inline std::string csv_config_line(const JsonObject& config) {
    if (config.empty()) return {};
    return "# config: " + config.str() + "\n";
}

inline std::string to_csv(const DensityTable& t, const JsonObject& config = {}) {
    std::string out = csv_config_line(config);
    out += "x,density\n";
    for (size_t i = 0; i < t.grid.size(); ++i)
        out += fmt_g17(t.grid[i]) + "," + fmt_g17(t.values[i]) + "\n";
    return out;
}

inline std::string to_json(const DensityTable& t, const JsonObject& config = {}) {
    JsonObject root;
    if (!config.empty()) root.set("config", config);
    root.set("kind", "density_table");
    if (!t.context.empty()) root.set("context", t.context);
    root.set("total_mass", t.total_mass);
    root.set("x", t.grid);
    root.set("density", t.values);
    return root.str() + "\n";
}

inline std::string to_csv(const PathEnsemble& e, const JsonObject& config = {}) {
    std::string out = csv_config_line(config);
    out += "path_id,time,value,weight\n";
    const size_t m = e.times.size();
    for (int i = 0; i < e.n_paths; ++i) {
        const double w = e.weights.empty() ? 1.0 : e.weights[static_cast<size_t>(i)];
        for (size_t k = 0; k < m; ++k)
            out += std::to_string(i) + "," + fmt_g17(e.times[k]) + "," +
                   fmt_g17(e.value(static_cast<size_t>(i), k)) + "," + fmt_g17(w) + "\n";
    }
    return out;
}

// Ensemble JSON is a summary, not a dump: weighted mean and variance per
// recorded time plus the weight diagnostics needed to judge them.
inline std::string to_json(const PathEnsemble& e, const JsonObject& config = {}) {
    JsonObject root;
    if (!config.empty()) root.set("config", config);
    root.set("kind", "path_ensemble_summary");
    root.set("n_paths", e.n_paths);
    root.set("seed", e.seed);
    root.set("weighted", !e.weights.empty());
    root.set("ess", e.ess());
    root.set("times", e.times);
    std::string moments = "[";
    for (size_t k = 0; k < e.times.size(); ++k) {
        double sw = 0.0, s1 = 0.0;
        for (int i = 0; i < e.n_paths; ++i) {
            const double w = e.weights.empty() ? 1.0 : e.weights[static_cast<size_t>(i)];
            sw += w;
            s1 += w * e.value(static_cast<size_t>(i), k);
        }
        const double mean = s1 / sw;
        double s2 = 0.0;
        for (int i = 0; i < e.n_paths; ++i) {
            const double w = e.weights.empty() ? 1.0 : e.weights[static_cast<size_t>(i)];
            const double d = e.value(static_cast<size_t>(i), k) - mean;
            s2 += w * d * d;
        }
        JsonObject mk;
        mk.set("time", e.times[k]);
        mk.set("mean", mean);
        mk.set("variance", s2 / sw);
        if (k) moments += ",";
        moments += mk.str();
    }
    moments += "]";
    root.set_raw("moments", moments);
    return root.str() + "\n";
}

inline std::string to_csv(const VerificationReport& r, const JsonObject& config = {}) {
    std::string out = csv_config_line(config);
    out += "suite,check,scale,statistic,tolerance,pass\n";
    for (const auto& c : r.checks) {
        const std::string scale = std::isfinite(c.scale) ? fmt_g17(c.scale) : "";
        out += csv_field(r.suite) + "," + csv_field(c.description) + "," + scale + "," +
               fmt_g17(c.statistic) + "," + fmt_g17(c.tolerance) + "," +
               (c.pass ? "true" : "false") + "\n";
    }
    return out;
}

inline std::string to_json(const VerificationReport& r, const JsonObject& config = {}) {
    JsonObject root;
    if (!config.empty()) root.set("config", config);
    root.set("kind", "verification_report");
    root.set("suite", r.suite);
    root.set("seed", r.seed);
    if (!r.config.empty()) root.set("suite_config", r.config);
    root.set("overall", r.overall());
    std::string checks = "[";
    for (size_t i = 0; i < r.checks.size(); ++i) {
        const auto& c = r.checks[i];
        JsonObject ck;
        ck.set("description", c.description);
        if (std::isfinite(c.scale)) ck.set("scale", c.scale);
        ck.set("statistic", c.statistic);
        ck.set("tolerance", c.tolerance);
        ck.set("pass", c.pass);
        if (i) checks += ",";
        checks += ck.str();
    }
    checks += "]";
    root.set_raw("checks", checks);
    return root.str() + "\n";
}

// Write via a temp file in the same directory plus rename, so readers never
// observe a half-written file.
inline void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw IoError("cannot open for writing: " + tmp);
    const size_t n = std::fwrite(content.data(), 1, content.size(), f);
    const bool flushed = std::fflush(f) == 0;
    const bool closed = std::fclose(f) == 0;
    if (n != content.size() || !flushed || !closed) {
        std::remove(tmp.c_str());
        throw IoError("short write: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename " + tmp + " to " + path);
    }
}

// Parse a density table back from its CSV text (config comment and header
// tolerated); values round-trip exactly through the 17-digit format.
inline DensityTable read_density_table_csv(const std::string& text) {
    DensityTable t;
    size_t pos = 0;
    bool saw_header = false;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            require(line == "x,density", "read_density_table_csv: unexpected header");
            saw_header = true;
            continue;
        }
        const size_t comma = line.find(',');
        require(comma != std::string::npos, "read_density_table_csv: bad row");
        t.grid.push_back(std::strtod(line.c_str(), nullptr));
        t.values.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
    }
    require(saw_header && t.grid.size() >= 2, "read_density_table_csv: no data");
    t.total_mass = trapezoid_mass(t.grid, t.values);
    return t;
}

}  // namespace kpz
