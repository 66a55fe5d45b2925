#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "quads/core.hpp"
#include "quads/ec3.hpp"
#include "quads/fitting.hpp"
#include "quads/noise.hpp"
#include "quads/protocol.hpp"

/**
 * @file
 * File formats: instance and environment JSON, the campaign CSVs and the
 * flat key = value campaign config.
 */

namespace quads::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Failure to read or write a file.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Shortest representation that round-trips.
inline std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        throw IoError("failed to format number");
    }
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InputError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

template <typename Int>
Int parse_int(std::string_view s) {
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InputError("not an integer: '" + std::string(s) + "'");
    }
    return v;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << content;
    if (!out) {
        throw IoError("write to " + path.string() + " failed");
    }
}

// ---------------------------------------------------------------- instances

struct InstanceRecord {
    ec3::Ec3Instance instance;
    std::uint64_t seed = 0;
    ec3::Assignment solution;
};

inline std::string instance_file_name(int n_bits, int k) {
    return "ec3_N" + std::to_string(n_bits) + "_inst" + std::to_string(k) + ".json";
}

inline json instance_to_json(const InstanceRecord& rec) {
    json clauses = json::array();
    for (const auto& c : rec.instance.clauses()) {
        clauses.push_back({c.a, c.b, c.c});
    }
    json sol = json::array();
    for (auto b : rec.solution.bits()) {
        sol.push_back(static_cast<int>(b));
    }
    return json{{"n_bits", rec.instance.n_bits()}, {"clauses", clauses}, {"seed", rec.seed}, {"solution", sol}};
}

inline InstanceRecord instance_from_json(const json& j) {
    try {
        const int n = j.at("n_bits").get<int>();
        std::vector<ec3::Clause> clauses;
        for (const auto& c : j.at("clauses")) {
            if (c.size() != 3) {
                throw InputError("clause must have three indices");
            }
            clauses.push_back(ec3::make_clause(c[0].get<int>(), c[1].get<int>(), c[2].get<int>()));
        }
        InstanceRecord rec{ec3::Ec3Instance(n, std::move(clauses)), j.value("seed", std::uint64_t{0}), {}};
        if (j.contains("solution")) {
            rec.solution = ec3::Assignment(j.at("solution").get<std::vector<std::uint8_t>>());
        }
        return rec;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed instance JSON: ") + e.what());
    }
}

/// Builds the audit record; the instance must have exactly one solution.
inline InstanceRecord make_instance_record(const ec3::Ec3Instance& inst, std::uint64_t seed) {
    const auto sols = ec3::enumerate_solutions(inst);
    if (sols.size() != 1) {
        throw InputError("instance has " + std::to_string(sols.size()) + " solutions; expected exactly one");
    }
    return InstanceRecord{inst, seed, sols.front()};
}

inline void write_instance(const fs::path& path, const InstanceRecord& rec) {
    write_file(path, instance_to_json(rec).dump(2) + "\n");
}

inline InstanceRecord read_instance(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw InputError("cannot parse " + path.string() + ": " + e.what());
    }
    return instance_from_json(j);
}

// ------------------------------------------------------------- environments

inline json noise_params_to_json(const noise::NoiseParams& p) {
    return json{{"sigma", p.sigma},
                {"tau", p.tau},
                {"p_bar", p.p_bar},
                {"polarization", std::string(noise::to_string(p.polarization))},
                {"uniformity", std::string(noise::to_string(p.uniformity))}};
}

inline noise::NoiseParams noise_params_from_json(const json& j) {
    noise::NoiseParams p;
    p.sigma = j.at("sigma").get<double>();
    p.tau = j.at("tau").get<double>();
    p.p_bar = j.at("p_bar").get<double>();
    p.polarization = noise::parse_polarization(j.at("polarization").get<std::string>());
    p.uniformity = noise::parse_uniformity(j.at("uniformity").get<std::string>());
    return p;
}

inline json environment_to_json(const noise::NoiseEnvironment& env, std::uint64_t seed) {
    json qubits = json::array();
    for (const auto& q : env.per_qubit()) {
        json pulses = json::array();
        for (const auto& f : q) {
            pulses.push_back({{"center", f.center}, {"heights", {f.heights[0], f.heights[1], f.heights[2]}}});
        }
        qubits.push_back(pulses);
    }
    return json{{"params", noise_params_to_json(env.params())},
                {"horizon", env.horizon()},
                {"seed", seed},
                {"qubits", qubits}};
}

inline noise::NoiseEnvironment environment_from_json(const json& j) {
    try {
        std::vector<std::vector<noise::Fluctuation>> per_qubit;
        for (const auto& q : j.at("qubits")) {
            std::vector<noise::Fluctuation> pulses;
            for (const auto& p : q) {
                const auto h = p.at("heights").get<std::vector<double>>();
                if (h.size() != 3) {
                    throw InputError("pulse heights must have three components");
                }
                pulses.push_back({p.at("center").get<double>(), {h[0], h[1], h[2]}});
            }
            per_qubit.push_back(std::move(pulses));
        }
        return noise::NoiseEnvironment(noise_params_from_json(j.at("params")), j.at("horizon").get<double>(),
                                       std::move(per_qubit));
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed environment JSON: ") + e.what());
    }
}

// ------------------------------------------------------------------ config

/// Options for `run`, beyond the campaign itself.
struct RunConfig {
    protocol::CampaignConfig campaign;
    std::string instances_dir;
};

inline std::vector<int> parse_int_list(std::string_view s) {
    std::vector<int> out;
    for (const auto& tok : split(s, ',')) {
        const auto dots = tok.find("..");
        if (dots != std::string::npos) {
            const int lo = parse_int<int>(trim(tok.substr(0, dots)));
            const int hi = parse_int<int>(trim(tok.substr(dots + 2)));
            if (hi < lo) {
                throw InputError("empty range '" + tok + "'");
            }
            for (int v = lo; v <= hi; ++v) {
                out.push_back(v);
            }
        } else if (!tok.empty()) {
            out.push_back(parse_int<int>(tok));
        }
    }
    return out;
}

inline std::vector<double> parse_double_list(std::string_view s) {
    std::vector<double> out;
    for (const auto& tok : split(s, ',')) {
        if (!tok.empty()) {
            out.push_back(parse_double(tok));
        }
    }
    return out;
}

inline bool parse_bool(std::string_view s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw InputError("not a boolean: '" + std::string(s) + "'");
}

/**
 * Parses `key = value` lines; `#` starts a comment. Unknown or repeated keys
 * are errors.
 */
inline RunConfig parse_run_config(std::string_view text) {
    RunConfig rc;
    auto& c = rc.campaign;
    std::map<std::string, std::string> seen;
    std::size_t line_no = 0;
    for (const auto& raw : split(text, '\n')) {
        ++line_no;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line = trim(line.substr(0, hash));
        }
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto val = trim(line.substr(eq + 1));
        if (!seen.emplace(key, val).second) {
            throw InputError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        try {
            if (key == "n_values") c.n_values = parse_int_list(val);
            else if (key == "p_bars") c.p_bars = parse_double_list(val);
            else if (key == "instances_per_n") c.instances_per_n = parse_int<int>(val);
            else if (key == "envs_per_instance") c.envs_per_instance = parse_int<int>(val);
            else if (key == "threshold") c.success_threshold = parse_double(val);
            else if (key == "master_seed") c.master_seed = parse_int<std::uint64_t>(val);
            else if (key == "jobs") c.jobs = parse_int<unsigned>(val);
            else if (key == "shared_instances") c.shared_instances = parse_bool(val);
            else if (key == "sigma") c.noise.sigma = parse_double(val);
            else if (key == "tau") c.noise.tau = parse_double(val);
            else if (key == "polarization") c.noise.polarization = noise::parse_polarization(val);
            else if (key == "uniformity") c.noise.uniformity = noise::parse_uniformity(val);
            else if (key == "t0") c.probe.t0 = parse_double(val);
            else if (key == "growth") c.probe.growth = parse_double(val);
            else if (key == "rel_width") c.probe.rel_width = parse_double(val);
            else if (key == "ceiling") c.probe.ceiling = parse_double(val);
            else if (key == "divisions") c.evolution.divisions = parse_int<int>(val);
            else if (key == "base_step") c.evolution.base_step = parse_double(val);
            else if (key == "noise_step_fraction") c.evolution.noise_step_fraction = parse_double(val);
            else if (key == "spectral_step_limit") c.evolution.spectral_step_limit = parse_double(val);
            else if (key == "renorm_tolerance") c.evolution.renorm_tolerance = parse_double(val);
            else if (key == "degraded_fraction") c.degraded_fraction = parse_double(val);
            else if (key == "instances_dir") rc.instances_dir = val;
            else throw InputError("unknown key");
        } catch (const InputError& e) {
            throw InputError("config line " + std::to_string(line_no) + " (" + key + "): " + e.what());
        }
    }
    return rc;
}

// -------------------------------------------------------------- provenance

inline json campaign_to_json(const protocol::CampaignConfig& c) {
    json ns = c.n_values;
    json ps = json::array();
    for (double p : c.p_bars) {
        ps.push_back(p);
    }
    return json{{"code_version", kVersion},
                {"n_values", ns},
                {"p_bars", ps},
                {"instances_per_n", c.instances_per_n},
                {"envs_per_instance", c.envs_per_instance},
                {"success_threshold", c.success_threshold},
                {"master_seed", c.master_seed},
                {"shared_instances", c.shared_instances},
                {"noise", noise_params_to_json(c.noise)},
                {"probe",
                 {{"t0", c.probe.t0},
                  {"growth", c.probe.growth},
                  {"rel_width", c.probe.rel_width},
                  {"ceiling", c.probe.ceiling}}},
                {"integrator",
                 {{"method", "rk4"},
                  {"divisions", c.evolution.divisions},
                  {"base_step", c.evolution.base_step},
                  {"noise_step_fraction", c.evolution.noise_step_fraction},
                  {"spectral_step_limit", c.evolution.spectral_step_limit},
                  {"renorm_tolerance", c.evolution.renorm_tolerance},
                  {"instability_limit", c.evolution.instability_limit}}},
                {"fit_weights", "sigma = (ci_high - ci_low) / (2 * 1.96)"},
                {"degraded_fraction", c.degraded_fraction}};
}

/// One-line provenance header for CSV outputs; excludes worker count.
inline std::string provenance_line(const protocol::CampaignConfig& c) {
    return "# quads " + std::string(kVersion) + " master_seed=" + std::to_string(c.master_seed) +
           " threshold=" + format_double(c.success_threshold) + " integrator=rk4 divisions=" +
           std::to_string(c.evolution.divisions) + " spectral_step_limit=" +
           format_double(c.evolution.spectral_step_limit) + " noise=" +
           std::string(noise::to_string(c.noise.polarization)) + "/" +
           std::string(noise::to_string(c.noise.uniformity)) + " sigma=" + format_double(c.noise.sigma) +
           " tau=" + format_double(c.noise.tau) + " config=campaign.json\n";
}

// --------------------------------------------------------------------- CSV

inline std::string runtimes_csv(const protocol::CampaignConfig& c, const std::vector<protocol::RuntimeRecord>& recs) {
    std::string out = provenance_line(c);
    out += "n_bits,p_bar,instance_id,env_id,t_star,success_prob,quarantined\n";
    for (const auto& r : recs) {
        out += std::to_string(r.n_bits) + "," + format_double(r.p_bar) + "," + std::to_string(r.instance_id) + "," +
               std::to_string(r.env_id) + "," + format_double(r.t_star) + "," + format_double(r.success) + "," +
               (r.quarantined ? "1" : "0") + "\n";
    }
    return out;
}

inline std::string medians_csv(const protocol::CampaignConfig& c, const std::vector<protocol::MedianPoint>& pts) {
    std::string out = provenance_line(c);
    out += "n_bits,p_bar,median,ci_low,ci_high,n_samples\n";
    for (const auto& m : pts) {
        out += std::to_string(m.n_bits) + "," + format_double(m.p_bar) + "," + format_double(m.median) + "," +
               format_double(m.ci_low) + "," + format_double(m.ci_high) + "," + std::to_string(m.n_samples) + "\n";
    }
    return out;
}

/// Rows of a CSV with '#' comment lines dropped; the header row is checked.
inline std::vector<std::vector<std::string>> read_csv(std::string_view text, const std::vector<std::string>& header) {
    std::vector<std::vector<std::string>> rows;
    bool have_header = false;
    for (const auto& raw : split(text, '\n')) {
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto cells = split(line, ',');
        if (!have_header) {
            if (cells != header) {
                throw InputError("unexpected CSV header: " + line);
            }
            have_header = true;
            continue;
        }
        if (cells.size() != header.size()) {
            throw InputError("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()) + ": " + line);
        }
        rows.push_back(std::move(cells));
    }
    if (!have_header) {
        throw InputError("CSV has no header row");
    }
    return rows;
}

inline std::vector<protocol::MedianPoint> parse_medians_csv(std::string_view text) {
    std::vector<protocol::MedianPoint> out;
    for (const auto& row : read_csv(text, {"n_bits", "p_bar", "median", "ci_low", "ci_high", "n_samples"})) {
        protocol::MedianPoint m;
        m.n_bits = parse_int<int>(row[0]);
        m.p_bar = parse_double(row[1]);
        m.median = parse_double(row[2]);
        m.ci_low = parse_double(row[3]);
        m.ci_high = parse_double(row[4]);
        m.n_samples = parse_int<std::size_t>(row[5]);
        out.push_back(m);
    }
    return out;
}

struct FitRow {
    fitting::FitResult fit;
    double p_bar = 0.0;
};

inline std::string fits_csv(const std::vector<FitRow>& rows, std::string_view provenance) {
    std::string out(provenance);
    out += "model,p_bar,n_min,n_max,a,b,chi2,p_value,dof\n";
    for (const auto& r : rows) {
        out += std::string(fitting::to_string(r.fit.model)) + "," + format_double(r.p_bar) + "," +
               std::to_string(r.fit.n_min) + "," + std::to_string(r.fit.n_max) + "," + format_double(r.fit.a) + "," +
               format_double(r.fit.b) + "," + format_double(r.fit.chi2) + "," + format_double(r.fit.p_value) + "," +
               std::to_string(r.fit.dof) + "\n";
    }
    return out;
}

inline std::vector<FitRow> parse_fits_csv(std::string_view text) {
    std::vector<FitRow> out;
    for (const auto& row :
         read_csv(text, {"model", "p_bar", "n_min", "n_max", "a", "b", "chi2", "p_value", "dof"})) {
        FitRow r;
        r.fit.model = fitting::parse_model(row[0]);
        r.p_bar = parse_double(row[1]);
        r.fit.n_min = parse_int<int>(row[2]);
        r.fit.n_max = parse_int<int>(row[3]);
        r.fit.a = parse_double(row[4]);
        r.fit.b = parse_double(row[5]);
        r.fit.chi2 = parse_double(row[6]);
        r.fit.p_value = parse_double(row[7]);
        r.fit.dof = parse_int<int>(row[8]);
        out.push_back(r);
    }
    return out;
}

}  // namespace quads::io
