#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavecov/fit.hpp"
#include "wavecov/geometry.hpp"
#include "wavecov/kernels.hpp"
#include "wavecov/quadrature.hpp"
#include "wavecov/regularity.hpp"
#include "wavecov/simulator.hpp"

namespace wavecov {

inline constexpr const char* version_string = "0.1.0";

/// All floats in text output go through this: 17 significant digits, so a
/// parse of the printed value reproduces the double exactly.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// RunConfig: flat key=value store mirroring the CLI flags. Values keep their
// textual form, so emit -> parse -> emit is the identity.
// ---------------------------------------------------------------------------
class RunConfig {
  public:
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    void set_double(const std::string& key, double v) { kv_[key] = format_double(v); }
    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get(const std::string& key, const std::string& fallback = "") const {
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }
    double get_double(const std::string& key, double fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("config: bad number for " + key);
        return v;
    }
    long get_int(const std::string& key, long fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        return std::stol(it->second);
    }
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        return std::stoull(it->second);
    }
    bool get_flag(const std::string& key, bool fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        return it->second == "1" || it->second == "true" || it->second == "on";
    }

    const std::map<std::string, std::string>& entries() const { return kv_; }

    /// Canonical text form: sorted key=value lines.
    std::string canonical() const {
        std::ostringstream os;
        for (const auto& [k, v] : kv_) os << k << "=" << v << "\n";
        return os.str();
    }
    std::uint64_t hash() const { return fnv1a64(canonical()); }

    static RunConfig parse(std::istream& in) {
        RunConfig c;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("config: expected key=value, got: " + line);
            c.set(line.substr(0, eq), line.substr(eq + 1));
        }
        return c;
    }
    static RunConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("config: cannot open " + path);
        return parse(in);
    }
    static RunConfig parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    bool operator==(const RunConfig& o) const { return kv_ == o.kv_; }

    // -- typed views -------------------------------------------------------

    KernelSpec make_kernel() const {
        const std::string fam = get("kernel");
        const bool constants = get_flag("constants", true);
        if (fam == "riesz") return KernelSpec::riesz(get_double("beta", 1.0), constants);
        if (fam == "bessel") return KernelSpec::bessel(get_double("alpha", 2.0), constants);
        if (fam == "smoothed_riesz") return KernelSpec::smoothed_riesz(get_double("beta", 1.0), constants);
        if (fam == "fractional")
            return KernelSpec::fractional(get_double("h1", 0.8), get_double("h2", 0.8),
                                          get_double("h3", 0.8), constants);
        throw std::invalid_argument("config: unknown kernel family '" + fam + "'");
    }

    QuadratureSpec make_quadrature() const {
        QuadratureSpec q;
        q.radial_nodes = static_cast<int>(get_int("radial_nodes", q.radial_nodes));
        q.sphere_order = static_cast<int>(get_int("sphere_order", q.sphere_order));
        q.radial_cutoff = get_double("quad_cutoff", q.radial_cutoff);
        q.split_radius = get_double("split_radius", q.split_radius);
        q.tolerance = get_double("tolerance", q.tolerance);
        return q;
    }

    Point3 get_point(const std::string& key, Point3 fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        return parse_point(it->second);
    }

    static Point3 parse_point(const std::string& s) {
        Point3 p;
        if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &p.x1, &p.x2, &p.x3) != 3)
            throw std::invalid_argument("config: expected x,y,z triple, got: " + s);
        return p;
    }

    /// Lag grids: either an explicit comma list "0.01,0.02" or a dyadic
    /// range "2^-9..2^-3" (integer exponents, increasing).
    static std::vector<double> parse_lags(const std::string& s) {
        std::vector<double> out;
        if (s.rfind("2^", 0) == 0) {
            int lo = 0, hi = 0;
            if (std::sscanf(s.c_str(), "2^%d..2^%d", &lo, &hi) != 2)
                throw std::invalid_argument("config: bad dyadic range: " + s);
            if (hi < lo) std::swap(lo, hi);
            for (int k = lo; k <= hi; ++k) out.push_back(std::pow(2.0, k));
            return out;
        }
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            out.push_back(std::stod(tok));
        }
        return out;
    }

    std::vector<double> get_lags(const std::string& key, const std::string& fallback) const {
        return parse_lags(get(key, fallback));
    }

  private:
    std::map<std::string, std::string> kv_;
};

// ---------------------------------------------------------------------------
// JSON / CSV emission
// ---------------------------------------------------------------------------

using json = nlohmann::json;

inline json to_json(const Certificate& c) {
    return json{{"value", c.value},         {"coarse_value", c.coarse_value},
                {"delta", c.delta},         {"tail_bound", c.tail_bound},
                {"cutoff_used", c.cutoff_used}, {"converged", c.converged}};
}

inline json to_json(const ExponentFit& f) {
    return json{{"slope", f.slope},     {"intercept", f.intercept},
                {"r2", f.r2},           {"stderr_slope", f.stderr_slope},
                {"window_lo", f.window_lo}, {"window_hi", f.window_hi},
                {"points", f.points}};
}

inline json to_json(const ConditionReport& r) {
    json j;
    j["condition"] = condition_name(r.id);
    j["probes"] = r.probe_grid;
    j["values"] = r.integral_values;
    if (r.fit) j["fit"] = to_json(*r.fit);
    if (r.predicted_sup) j["predicted_sup"] = *r.predicted_sup;
    j["slack"] = r.slack;
    j["verdict"] = verdict_name(r.verdict);
    if (!r.note.empty()) j["note"] = r.note;
    json certs = json::array();
    for (const auto& c : r.certificates) certs.push_back(to_json(c));
    j["certificates"] = certs;
    return j;
}

inline json kernel_json(const KernelSpec& k) {
    json j;
    j["family"] = family_name(k.family());
    switch (k.family()) {
        case KernelFamily::Riesz:
        case KernelFamily::SmoothedRiesz: j["beta"] = k.beta(); break;
        case KernelFamily::Bessel: j["alpha"] = k.alpha(); break;
        case KernelFamily::FractionalProduct:
            j["h"] = k.hurst();
            j["kappa_bar"] = k.kappa_bar();
            if (k.scaling_warning()) j["scaling_warning"] = true;
            break;
    }
    j["constants"] = k.include_constants();
    return j;
}

/// Common envelope for every machine-readable summary: enough to reproduce
/// the run byte for byte.
inline json report_envelope(const std::string& command, const RunConfig& cfg) {
    json j;
    j["command"] = command;
    j["version"] = version_string;
    j["config"] = cfg.entries();
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(cfg.hash()));
    j["config_hash"] = hash;
    if (cfg.has("seed")) j["seed"] = cfg.get_u64("seed", 0);
    return j;
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path);
    }
    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
        out_ << "\n";
    }
    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i) out_ << (i ? "," : "") << format_double(vals[i]);
        out_ << "\n";
    }
    void row_mixed(const std::vector<std::string>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i) out_ << (i ? "," : "") << vals[i];
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

inline void write_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// FieldSample binary export: fixed little-endian layout, documented in the
// README. Header, then times, then points, then the payload in
// [realization][time][point] order (time-major inside a realization).
// ---------------------------------------------------------------------------

inline void write_field_sample(const std::string& path, const FieldSample& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    const char magic[8] = {'W', 'A', 'V', 'E', 'C', 'O', 'V', '1'};
    out.write(magic, 8);
    auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    put_u64(s.seed);
    put_u64(s.n_real);
    put_u64(s.times.size());
    put_u64(s.points.size());
    put_u64(s.mode_count);
    out.write(reinterpret_cast<const char*>(s.times.data()), 8 * s.times.size());
    for (const Point3& p : s.points) {
        out.write(reinterpret_cast<const char*>(&p.x1), 8);
        out.write(reinterpret_cast<const char*>(&p.x2), 8);
        out.write(reinterpret_cast<const char*>(&p.x3), 8);
    }
    out.write(reinterpret_cast<const char*>(s.values.data()), 8 * s.values.size());
}

inline FieldSample read_field_sample(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::string(magic, 8) != "WAVECOV1") throw std::runtime_error("bad field sample magic");
    auto get_u64 = [&]() {
        std::uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    FieldSample s;
    s.seed = get_u64();
    s.n_real = get_u64();
    s.times.resize(get_u64());
    s.points.resize(get_u64());
    s.mode_count = get_u64();
    in.read(reinterpret_cast<char*>(s.times.data()), 8 * s.times.size());
    for (Point3& p : s.points) {
        in.read(reinterpret_cast<char*>(&p.x1), 8);
        in.read(reinterpret_cast<char*>(&p.x2), 8);
        in.read(reinterpret_cast<char*>(&p.x3), 8);
    }
    s.values.resize(s.n_real * s.times.size() * s.points.size());
    in.read(reinterpret_cast<char*>(s.values.data()), 8 * s.values.size());
    if (!in) throw std::runtime_error("truncated field sample file");
    return s;
}

}  // namespace wavecov
