// quads: generate EC3 instances, run runtime campaigns, fit scaling models
// and print reports.
//
// Exit codes: 0 success, 1 results degraded by quarantined runs, 2 config or
// I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>

#include "quads/quads.hpp"

namespace fs = std::filesystem;
using namespace quads;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDegraded = 1;
constexpr int kExitError = 2;

struct GenerateArgs {
    int n_bits = 10;
    int count = 75;
    std::uint64_t seed = 1;
    std::string out = "instances";
};

struct RunArgs {
    std::string config;
    std::string out = "results";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    std::optional<double> threshold;
    bool dry_run = false;
    bool verbose = false;
};

struct FitArgs {
    std::string input;
    std::string out = ".";
    std::string model = "both";
    std::vector<std::string> ranges;
    double curve_step = 0.1;
};

struct ReportArgs {
    std::string dir = "results";
};

int cmd_generate(const GenerateArgs& a) {
    if (a.count < 0) {
        throw InputError("--count must be >= 0");
    }
    protocol::CampaignConfig cfg;
    cfg.master_seed = a.seed;
    nlohmann::json entries = nlohmann::json::array();
    for (int k = 0; k < a.count; ++k) {
        const auto seed = protocol::instance_seed(cfg, a.n_bits, k, 0.0);
        Rng rng(seed);
        const auto inst = ec3::generate_usa_instance(a.n_bits, rng);
        const auto name = io::instance_file_name(a.n_bits, k);
        io::write_instance(fs::path(a.out) / name, io::make_instance_record(inst, seed));
        entries.push_back({{"id", k}, {"file", name}, {"seed", seed}, {"clauses", inst.size()}});
    }
    const nlohmann::json manifest{{"code_version", kVersion},
                                  {"n_bits", a.n_bits},
                                  {"count", a.count},
                                  {"master_seed", a.seed},
                                  {"instances", entries}};
    io::write_file(fs::path(a.out) / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << a.count << " instances to " << a.out << "\n";
    return kExitOk;
}

protocol::InstanceSource directory_source(const fs::path& dir) {
    return [dir](int n_bits, int instance_id, double) {
        const auto rec = io::read_instance(dir / io::instance_file_name(n_bits, instance_id));
        if (ec3::solution_indices(rec.instance).size() != 1) {
            throw InputError(io::instance_file_name(n_bits, instance_id) + " is not a unique-solution instance");
        }
        return rec.instance;
    };
}

int cmd_run(const RunArgs& a) {
    auto rc = io::parse_run_config(io::read_file(a.config));
    auto& cfg = rc.campaign;
    if (a.seed) cfg.master_seed = *a.seed;
    if (a.jobs) cfg.jobs = *a.jobs;
    if (a.threshold) cfg.success_threshold = *a.threshold;
    cfg.validate();

    const fs::path out(a.out);
    io::write_file(out / "campaign.json", io::campaign_to_json(cfg).dump(2) + "\n");
    if (a.dry_run) {
        std::cout << "config ok; wrote " << (out / "campaign.json").string() << "\n";
        return kExitOk;
    }
    if (a.verbose) {
        log_config().threshold = LogLevel::info;
    }
    protocol::InstanceSource source;
    if (!rc.instances_dir.empty()) {
        fs::path dir(rc.instances_dir);
        if (dir.is_relative()) {
            dir = fs::path(a.config).parent_path() / dir;
        }
        source = directory_source(dir);
    }
    const auto result = protocol::run_campaign(cfg, source);
    io::write_file(out / "runtimes.csv", io::runtimes_csv(cfg, result.records));
    io::write_file(out / "medians.csv", io::medians_csv(cfg, result.medians));

    const auto quarantine = result.quarantine();
    std::cout << result.records.size() << " runs, " << result.medians.size() << " median points, "
              << quarantine.size() << " quarantined\n";
    for (const auto& r : quarantine) {
        std::cout << "  quarantined N=" << r.n_bits << " P=" << io::format_double(r.p_bar)
                  << " inst=" << r.instance_id << " env=" << r.env_id << ": " << r.note << "\n";
    }
    for (const auto& m : result.medians) {
        if (m.degraded) {
            std::cout << "  degraded N=" << m.n_bits << " P=" << io::format_double(m.p_bar) << " ("
                      << m.n_quarantined << " quarantined)\n";
        }
    }
    return result.degraded() ? kExitDegraded : kExitOk;
}

std::pair<int, int> parse_range(const std::string& s) {
    const auto dash = s.find('-');
    if (dash == std::string::npos) {
        throw InputError("range must look like 7-10: '" + s + "'");
    }
    const int lo = io::parse_int<int>(io::trim(s.substr(0, dash)));
    const int hi = io::parse_int<int>(io::trim(s.substr(dash + 1)));
    if (hi < lo) {
        throw InputError("empty range '" + s + "'");
    }
    return {lo, hi};
}

int cmd_fit(const FitArgs& a) {
    const auto text = io::read_file(a.input);
    const auto medians = io::parse_medians_csv(text);

    std::vector<fitting::Model> models;
    if (a.model == "both") {
        models = {fitting::Model::power_law, fitting::Model::exponential};
    } else {
        models = {fitting::parse_model(a.model)};
    }
    std::vector<std::pair<int, int>> ranges;
    for (const auto& r : a.ranges) {
        ranges.push_back(parse_range(r));
    }

    std::map<double, std::vector<fitting::DataPoint>> by_power;
    std::string points_csv = "p_bar,n_bits,median,ci_low,ci_high,sigma\n";
    for (const auto& m : medians) {
        const auto dp = fitting::data_point_from_ci(m.n_bits, m.median, m.ci_low, m.ci_high);
        by_power[m.p_bar].push_back(dp);
        points_csv += io::format_double(m.p_bar) + "," + std::to_string(m.n_bits) + "," +
                      io::format_double(m.median) + "," + io::format_double(m.ci_low) + "," +
                      io::format_double(m.ci_high) + "," + io::format_double(dp.sigma) + "\n";
    }

    std::vector<io::FitRow> rows;
    std::string curves_csv = "model,p_bar,n_min,n_max,n,value\n";
    for (const auto& [p_bar, pts] : by_power) {
        auto use_ranges = ranges;
        if (use_ranges.empty()) {
            int lo = pts.front().n_bits, hi = pts.front().n_bits;
            for (const auto& p : pts) {
                lo = std::min(lo, p.n_bits);
                hi = std::max(hi, p.n_bits);
            }
            use_ranges.push_back({lo, hi});
        }
        for (const auto& [lo, hi] : use_ranges) {
            const auto in_range = std::count_if(pts.begin(), pts.end(),
                                                [&](auto& p) { return p.n_bits >= lo && p.n_bits <= hi; });
            if (in_range < 3) {
                std::cerr << "warning: P=" << io::format_double(p_bar) << " range " << lo << "-" << hi << " has "
                          << in_range << " points; skipped\n";
                continue;
            }
            for (auto model : models) {
                fitting::FitResult fr;
                try {
                    fr = fitting::restricted_fit(pts, lo, hi, model);
                } catch (const fitting::FitNonConvergence& e) {
                    std::cerr << "warning: " << fitting::to_string(model) << " fit for P=" << io::format_double(p_bar)
                              << " range " << lo << "-" << hi << " did not converge; skipped\n";
                    continue;
                }
                rows.push_back({fr, p_bar});
                const int samples = static_cast<int>(std::lround((hi - lo) / a.curve_step));
                for (int i = 0; i <= samples; ++i) {
                    const double n = lo + (hi - lo) * static_cast<double>(i) / std::max(samples, 1);
                    curves_csv += std::string(fitting::to_string(model)) + "," + io::format_double(p_bar) + "," +
                                  std::to_string(lo) + "," + std::to_string(hi) + "," + io::format_double(n) + "," +
                                  io::format_double(fitting::evaluate(model, fr.a, fr.b, n)) + "\n";
                }
            }
        }
    }

    // Carry the campaign provenance forward from the input header.
    std::string provenance;
    for (const auto& line : io::split(text, '\n')) {
        if (!line.empty() && line.front() == '#') {
            provenance += line + "\n";
        }
    }
    provenance += "# fit input=" + fs::path(a.input).filename().string() + " weights=ci95\n";

    const fs::path out(a.out);
    io::write_file(out / "fits.csv", io::fits_csv(rows, provenance));
    io::write_file(out / "plot_points.csv", provenance + points_csv);
    io::write_file(out / "plot_curves.csv", provenance + curves_csv);
    for (const auto& r : rows) {
        std::printf("%-11s P=%-8s N=%d..%d  a=%.4g  b=%.4g  chi2=%.3f  p=%.4f\n",
                    std::string(fitting::to_string(r.fit.model)).c_str(), io::format_double(r.p_bar).c_str(),
                    r.fit.n_min, r.fit.n_max, r.fit.a, r.fit.b, r.fit.chi2, r.fit.p_value);
    }
    return kExitOk;
}

int cmd_report(const ReportArgs& a) {
    const fs::path dir(a.dir);
    bool degraded = false;
    if (fs::exists(dir / "runtimes.csv")) {
        const auto rows = io::read_csv(io::read_file(dir / "runtimes.csv"),
                                       {"n_bits", "p_bar", "instance_id", "env_id", "t_star", "success_prob",
                                        "quarantined"});
        std::size_t q = 0;
        for (const auto& r : rows) {
            q += r[6] == "1" ? 1 : 0;
        }
        std::cout << "runs: " << rows.size() << " (" << q << " quarantined)\n";
    }
    const auto medians = io::parse_medians_csv(io::read_file(dir / "medians.csv"));
    std::printf("%6s %10s %12s %12s %12s %8s\n", "N", "P", "median", "ci_low", "ci_high", "samples");
    for (const auto& m : medians) {
        std::printf("%6d %10s %12.4f %12.4f %12.4f %8zu\n", m.n_bits, io::format_double(m.p_bar).c_str(), m.median,
                    m.ci_low, m.ci_high, m.n_samples);
    }
    if (fs::exists(dir / "fits.csv")) {
        std::cout << "\nfits:\n";
        for (const auto& r : io::parse_fits_csv(io::read_file(dir / "fits.csv"))) {
            std::printf("%-11s P=%-8s N=%d..%d  a=%.4g  b=%.4g  chi2=%.3f  p=%.4f  dof=%d\n",
                        std::string(fitting::to_string(r.fit.model)).c_str(), io::format_double(r.p_bar).c_str(),
                        r.fit.n_min, r.fit.n_max, r.fit.a, r.fit.b, r.fit.chi2, r.fit.p_value, r.fit.dof);
        }
    }
    return degraded ? kExitDegraded : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adiabatic search runtime campaigns under classical noise"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Generate unique-solution EC3 instances");
    g->add_option("-n,--n-bits", gen.n_bits, "Number of bits")->required();
    g->add_option("--count", gen.count, "Number of instances")->capture_default_str();
    g->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
    g->add_option("--out", gen.out, "Output directory")->capture_default_str();

    RunArgs run;
    auto* r = app.add_subcommand("run", "Run a runtime campaign");
    r->add_option("--config", run.config, "Campaign config file")->required();
    r->add_option("--out", run.out, "Output directory")->capture_default_str();
    r->add_option("--seed", run.seed, "Override master seed");
    r->add_option("--jobs", run.jobs, "Worker threads");
    r->add_option("--threshold", run.threshold, "Override success threshold");
    r->add_flag("--dry-run", run.dry_run, "Validate config and write campaign.json only");
    r->add_flag("-v,--verbose", run.verbose, "Log per-job progress");

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "Fit scaling models to medians.csv");
    f->add_option("input", fit.input, "medians.csv")->required();
    f->add_option("--out", fit.out, "Output directory")->capture_default_str();
    f->add_option("--model", fit.model, "power_law, exponential or both")->capture_default_str();
    f->add_option("--range", fit.ranges, "Restrict to N range, e.g. 7-10 (repeatable)");
    f->add_option("--curve-step", fit.curve_step, "Spacing of sampled fit curves")->capture_default_str();

    ReportArgs rep;
    auto* p = app.add_subcommand("report", "Summarize a results directory");
    p->add_option("dir", rep.dir, "Results directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*g) return cmd_generate(gen);
        if (*r) return cmd_run(run);
        if (*f) return cmd_fit(fit);
        if (*p) return cmd_report(rep);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const io::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return kExitError;
}
