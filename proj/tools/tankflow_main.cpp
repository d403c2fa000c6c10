#include "tankflow/errors.hpp"
#include "tankflow/training.hpp"
#include "tankflow/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace tankflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int verbosity = 1;

void note(const std::string& msg) {
    if (verbosity > 0) std::cerr << msg << '\n';
}

std::string out_root() {
    const char* env = std::getenv("TANKFLOW_OUT");
    return env && *env ? env : "runs";
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir);
    const fs::path probe = fs::path(dir) / ".write_test";
    {
        std::ofstream f(probe);
        if (!f) throw ConfigError("output directory not writable: " + dir);
    }
    fs::remove(probe, ec);
    return dir;
}

std::string timestamp() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", 100 * v);
    return buf;
}

// preset id or JSON file, then k=v overrides
ModelPreset resolve_preset(const std::string& ref, const std::vector<std::string>& overrides) {
    ModelPreset p = (fs::exists(ref) || ref.ends_with(".json")) ? load_preset_file(ref) : builtin_preset(ref);
    if (overrides.empty()) return p;
    auto j = preset_to_json(p);
    for (const auto& o : overrides) apply_override(j, o);
    return preset_from_json(j);
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::optional<ReferenceSolution> labeled_set(const ModelPreset& p, const std::string& cli_ref) {
    if (p.sampling.data_points <= 0) return std::nullopt;
    const std::string path = cli_ref.empty() ? p.labeled_set : cli_ref;
    if (path.empty()) throw ConfigError("preset " + p.id + " needs a labeled reference (--reference)");
    return load_reference(path, p.geometry);
}

nlohmann::ordered_json report_json(const ErrorReport& r) {
    return {{"omega", r.omega},
            {"n_eval", r.n_eval},
            {"eval_seed", r.seed},
            {"v_l1_percent", 100 * r.v_l1},
            {"v_l2_percent", 100 * r.v_l2},
            {"p_l1_percent", 100 * r.p_l1},
            {"p_l2_percent", 100 * r.p_l2}};
}

void print_report_table(const std::vector<std::pair<std::string, ErrorReport>>& rows) {
    std::printf("%-12s %10s %10s %10s %10s %8s\n", "label", "v_l1 [%]", "v_l2 [%]", "p_l1 [%]", "p_l2 [%]", "n_eval");
    for (const auto& [label, r] : rows)
        std::printf("%-12s %10s %10s %10s %10s %8zu\n", label.c_str(), pct(r.v_l1).c_str(), pct(r.v_l2).c_str(),
                    pct(r.p_l1).c_str(), pct(r.p_l2).c_str(), r.n_eval);
}

// "phi=0.5" -> 0.5
double parse_profile(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || s.substr(0, eq) != "phi") throw ConfigError("profile must look like phi=<angle>");
    try {
        return std::stod(s.substr(eq + 1));
    } catch (const std::exception&) {
        throw ConfigError("bad profile angle: " + s);
    }
}

ReferenceSolution couette_oracle_set(const ModelPreset& p, double omega, int n, std::uint64_t seed) {
    if (!p.geometry.annulus) throw ConfigError("the Couette oracle needs an annulus geometry");
    ReferenceSolution ref = couette_reference(p.geometry, omega, p.fluid, n, seed);
    ref.re = reynolds(omega, p.fluid, p.geometry.r_stirrer);
    return ref;
}

Oracle couette_oracle(const ModelPreset& p, double omega) {
    return [geo = p.geometry, fluid = p.fluid, omega](const CartPoint& q) {
        return couette_velocity(q, geo, omega, fluid);
    };
}

double profile_start(const ModelPreset& p) { return p.geometry.annulus ? p.geometry.r_stirrer : 0.0; }

// ---- train

struct TrainArgs {
    std::string preset = "baseline";
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<std::string> overrides;
    int epochs = -1;
    std::string reference;
    int checkpoint_every = 0;
    int log_every = 100;
};

int cmd_train(const TrainArgs& a) {
    ModelPreset p = resolve_preset(a.preset, a.overrides);
    if (a.seed) p.seed = *a.seed;
    if (a.epochs >= 0) p.epochs = a.epochs;
    p.validate();
    const auto labeled = labeled_set(p, a.reference);
    const std::string dir = a.out.empty() ? out_root() + "/" + p.id + "-s" + std::to_string(p.seed) : a.out;
    const fs::path root = prepare_dir(dir);

    TrainOptions opt;
    if (labeled) opt.labeled = &*labeled;
    opt.checkpoint_every = a.checkpoint_every;
    opt.checkpoint_path = (root / "checkpoint.txt").string();
    opt.progress = [&](const HistoryRow& h) {
        if (a.log_every > 0 && h.iteration % a.log_every == 0) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "iter %6d  loss %.6e", h.iteration, h.loss.total);
            note(buf);
        }
        return true;
    };

    const auto started = timestamp();
    const RunRecord run = train(p, opt);
    const Model model = build_model(p);
    save_checkpoint(opt.checkpoint_path, p, model, run.theta);
    write_history_csv((root / "history.csv").string(), run.history);

    nlohmann::ordered_json man;
    man["command"] = "train";
    man["version"] = TANKFLOW_VERSION;
    man["compiler"] = __VERSION__;
    man["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                   std::to_string(EIGEN_MINOR_VERSION);
    man["started"] = started;
    man["seconds"] = run.seconds;
    man["iterations"] = run.iterations;
    man["stop_reason"] = run.reason;
    man["resample_events"] = run.resample_events;
    man["final_loss"] = run.history.empty() ? 0.0 : run.history.back().loss.total;
    man["seed"] = p.seed;
    man["reference"] = labeled ? (a.reference.empty() ? p.labeled_set : a.reference) : "";
    man["preset"] = preset_to_json(p);
    write_json(root / "manifest.json", man);

    std::printf("trained %s seed %llu: %d iterations (%s), %.1f s, loss %.6e\n", p.id.c_str(),
                static_cast<unsigned long long>(p.seed), run.iterations, run.reason.c_str(), run.seconds,
                man["final_loss"].get<double>());
    std::printf("wrote %s\n", root.string().c_str());
    return kExitOk;
}

// ---- evaluate

struct EvalArgs {
    std::string checkpoint;
    std::string reference;
    std::string oracle;
    int n_eval = 10000;
    std::uint64_t eval_seed = 0;
    std::string out;
    std::string profile;
    int profile_points = 201;
    std::optional<double> re;
    int oracle_points = 20000;
};

int cmd_evaluate(const EvalArgs& a) {
    if (!fs::exists(a.checkpoint)) throw ConfigError("checkpoint not found: " + a.checkpoint);
    if (a.reference.empty() == a.oracle.empty()) throw ConfigError("give exactly one of --reference and --oracle");
    if (!a.oracle.empty() && a.oracle != "couette") throw ConfigError("unknown oracle " + a.oracle);
    const Checkpoint ck = load_checkpoint(a.checkpoint);
    const ModelPreset& p = ck.preset;
    const Model model = build_model(p);
    const double omega = a.re ? omega_for_reynolds(*a.re, p.fluid, p.geometry.r_stirrer) : p.omega;

    const ReferenceSolution ref = a.oracle.empty() ? load_reference(a.reference, p.geometry)
                                                   : couette_oracle_set(p, omega, a.oracle_points, a.eval_seed);
    const auto pts = ref.positions();
    const auto pred = model.predict(ck.theta.data(), pts, omega);
    const ErrorReport rep = error_metrics(pred, ref, a.n_eval, a.eval_seed, omega, p.geometry.r_stirrer);

    const fs::path root = prepare_dir(a.out.empty() ? fs::path(a.checkpoint).parent_path().string() : a.out);
    const std::vector<std::pair<std::string, ErrorReport>> rows{{p.id, rep}};
    write_report_csv((root / "report.csv").string(), rows);
    write_field_csv((root / "field.csv").string(), pts, pred, &ref);
    if (!a.profile.empty()) {
        const double phi = parse_profile(a.profile);
        const Oracle oracle = a.oracle.empty() ? Oracle{} : couette_oracle(p, omega);
        const auto prof = extract_profile(model, ck.theta.data(), phi, profile_start(p), p.geometry.r_reactor,
                                          a.profile_points, omega, oracle);
        write_profile_csv((root / "profile.csv").string(), prof);
    }
    print_report_table(rows);
    std::printf("wrote %s\n", root.string().c_str());
    return kExitOk;
}

// ---- sweep

struct SweepArgs {
    std::string checkpoint;
    std::vector<double> re{1000, 4000, 6000, 8000, 10000};
    std::string reference; // path with {re}
    std::string oracle;
    int n_eval = 10000;
    std::uint64_t eval_seed = 0;
    std::string out;
    int oracle_points = 20000;
};

std::string re_label(double re) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", re);
    return buf;
}

void min_mean_max(const std::vector<double>& f, double norm, double& lo, double& mean, double& hi) {
    lo = INFINITY;
    hi = 0;
    mean = 0;
    for (double v : f) {
        const double e = std::abs(v) / norm;
        lo = std::min(lo, e);
        hi = std::max(hi, e);
        mean += e;
    }
    mean /= static_cast<double>(f.size());
}

int cmd_sweep(const SweepArgs& a) {
    if (!fs::exists(a.checkpoint)) throw ConfigError("checkpoint not found: " + a.checkpoint);
    if (a.re.empty()) throw ConfigError("empty Re list");
    if (a.reference.empty() == a.oracle.empty()) throw ConfigError("give exactly one of --reference and --oracle");
    if (!a.oracle.empty() && a.oracle != "couette") throw ConfigError("unknown oracle " + a.oracle);
    const Checkpoint ck = load_checkpoint(a.checkpoint);
    const ModelPreset& p = ck.preset;
    if (!p.parameterized() && a.re.size() > 1) throw ConfigError("sweep over several Re needs a parameterized model");
    const Model model = build_model(p);
    const fs::path root = prepare_dir(a.out.empty() ? fs::path(a.checkpoint).parent_path().string() : a.out);

    std::vector<std::pair<std::string, ErrorReport>> rows;
    std::ofstream sum(root / "sweep_summary.csv");
    if (!sum) throw ConfigError("cannot write sweep summary");
    sum << "re,omega,extrapolation,n_eval,v_l1_percent,v_l2_percent,p_l1_percent,p_l2_percent,"
           "v_err_min_percent,v_err_mean_percent,v_err_max_percent,p_err_min_percent,p_err_mean_percent,"
           "p_err_max_percent\n";
    for (double re : a.re) {
        const double omega = omega_for_reynolds(re, p.fluid, p.geometry.r_stirrer);
        bool extrapolation = false;
        if (p.parameterized()) {
            extrapolation = re < p.param->re_min || re > p.param->re_max;
        } else {
            extrapolation = std::abs(omega - p.omega) > 1e-12 * p.omega;
        }
        if (extrapolation) std::cerr << "warning: Re " << re << " is outside the trained range (extrapolation)\n";

        ReferenceSolution ref;
        if (a.oracle.empty()) {
            std::string path = a.reference;
            const auto at = path.find("{re}");
            if (at != std::string::npos) path.replace(at, 4, re_label(re));
            ref = load_reference(path, p.geometry);
        } else {
            ref = couette_oracle_set(p, omega, a.oracle_points, a.eval_seed);
        }
        const auto pred = model.predict(ck.theta.data(), ref.positions(), omega);
        const ErrorReport rep = error_metrics(pred, ref, a.n_eval, a.eval_seed, omega, p.geometry.r_stirrer);
        double vlo, vmean, vhi, plo, pmean, phi;
        min_mean_max(rep.f_err_v, rep.v_norm, vlo, vmean, vhi);
        min_mean_max(rep.f_err_p, rep.p_norm, plo, pmean, phi);
        sum << re_label(re) << ',' << omega << ',' << (extrapolation ? 1 : 0) << ',' << rep.n_eval << ','
            << pct(rep.v_l1) << ',' << pct(rep.v_l2) << ',' << pct(rep.p_l1) << ',' << pct(rep.p_l2) << ','
            << pct(vlo) << ',' << pct(vmean) << ',' << pct(vhi) << ',' << pct(plo) << ',' << pct(pmean) << ','
            << pct(phi) << '\n';
        rows.emplace_back("Re=" + re_label(re) + (extrapolation ? "*" : ""), rep);
    }
    write_report_csv((root / "sweep_reports.csv").string(), rows);
    print_report_table(rows);
    std::printf("wrote %s\n", root.string().c_str());
    return kExitOk;
}

// ---- robustness

struct RobustArgs {
    std::string preset = "couette";
    std::vector<std::string> overrides;
    int n = 10;
    std::uint64_t seed_base = 0;
    std::vector<std::uint64_t> seeds;
    int epochs = -1;
    std::string reference;
    std::string oracle;
    int n_eval = 10000;
    std::uint64_t eval_seed = 0;
    std::string out;
    int profile_points = 101;
    int oracle_points = 20000;
};

int cmd_robustness(const RobustArgs& a) {
    ModelPreset p = resolve_preset(a.preset, a.overrides);
    if (a.epochs >= 0) p.epochs = a.epochs;
    p.validate();
    if (a.reference.empty() == a.oracle.empty()) throw ConfigError("give exactly one of --reference and --oracle");
    if (!a.oracle.empty() && a.oracle != "couette") throw ConfigError("unknown oracle " + a.oracle);
    if (a.seeds.empty() && a.n < 1) throw ConfigError("--n must be at least 1");
    const auto labeled = labeled_set(p, a.reference);
    const ReferenceSolution ref = a.oracle.empty() ? load_reference(a.reference, p.geometry)
                                                   : couette_oracle_set(p, p.omega, a.oracle_points, a.eval_seed);
    const Oracle oracle = a.oracle.empty() ? Oracle{} : couette_oracle(p, p.omega);
    const fs::path root = prepare_dir(a.out.empty() ? out_root() + "/" + p.id + "-robustness" : a.out);

    RobustnessOptions opt;
    opt.seeds = a.seeds;
    if (opt.seeds.empty())
        for (int k = 0; k < a.n; ++k) opt.seeds.push_back(a.seed_base + static_cast<std::uint64_t>(k));
    if (labeled) opt.train.labeled = &*labeled;
    opt.n_eval = a.n_eval;
    opt.eval_seed = a.eval_seed;
    opt.profile_points = a.profile_points;
    opt.on_result = [](const SeedResult& r) {
        if (r.failed)
            std::cerr << "seed " << r.seed << " failed: " << r.error << '\n';
        else
            note("seed " + std::to_string(r.seed) + ": v_l1 " + pct(r.report.v_l1) + "%, " +
                 std::to_string(static_cast<int>(r.seconds)) + " s");
    };
    const RobustnessSummary s = robustness_run(p, ref, oracle, opt);

    std::vector<std::pair<std::string, ErrorReport>> rows;
    std::ofstream runs(root / "seeds.csv");
    runs << "seed,failed,seconds,v_l1_percent,v_l2_percent,p_l1_percent,p_l2_percent\n";
    for (const auto& r : s.runs) {
        runs << r.seed << ',' << (r.failed ? 1 : 0) << ',' << r.seconds << ',';
        if (r.failed) {
            runs << ",,,\n";
            continue;
        }
        runs << pct(r.report.v_l1) << ',' << pct(r.report.v_l2) << ',' << pct(r.report.p_l1) << ','
             << pct(r.report.p_l2) << '\n';
        rows.emplace_back("seed=" + std::to_string(r.seed), r.report);
        if (!r.profile.empty()) write_profile_csv((root / ("profile_seed" + std::to_string(r.seed) + ".csv")).string(), r.profile);
    }
    if (!rows.empty()) write_report_csv((root / "reports.csv").string(), rows);

    std::ofstream sum(root / "summary.csv");
    sum << "metric,mean_percent,std_percent,n_ok,n_failed\n";
    const int n_failed = static_cast<int>(s.runs.size()) - s.n_ok;
    auto line = [&](const char* name, double m, double sd) {
        sum << name << ',' << pct(m) << ',' << pct(sd) << ',' << s.n_ok << ',' << n_failed << '\n';
    };
    line("v_l1", s.mean_v_l1, s.std_v_l1);
    line("v_l2", s.mean_v_l2, s.std_v_l2);
    line("p_l1", s.mean_p_l1, s.std_p_l1);
    line("p_l2", s.mean_p_l2, s.std_p_l2);

    // radial error statistics across seeds
    std::vector<const SeedResult*> ok;
    for (const auto& r : s.runs)
        if (!r.failed && !r.profile.empty()) ok.push_back(&r);
    if (!ok.empty() && ok.front()->profile.front().has_err) {
        std::ofstream prof(root / "profile_stats.csv");
        prof << "r,mean_f_err,std_f_err,mean_abs_f_err\n";
        const std::size_t m = ok.front()->profile.size();
        for (std::size_t i = 0; i < m; ++i) {
            double mean = 0, abs_mean = 0;
            for (auto* r : ok) {
                mean += r->profile[i].f_err;
                abs_mean += std::abs(r->profile[i].f_err);
            }
            mean /= ok.size();
            abs_mean /= ok.size();
            double var = 0;
            for (auto* r : ok) var += (r->profile[i].f_err - mean) * (r->profile[i].f_err - mean);
            const double sd = ok.size() > 1 ? std::sqrt(var / (ok.size() - 1)) : 0.0;
            prof << ok.front()->profile[i].r << ',' << mean << ',' << sd << ',' << abs_mean << '\n';
        }
    }

    nlohmann::ordered_json man;
    man["command"] = "robustness";
    man["version"] = TANKFLOW_VERSION;
    man["seeds"] = opt.seeds;
    man["reference"] = a.oracle.empty() ? a.reference : "oracle:" + a.oracle;
    man["n_eval"] = a.n_eval;
    man["eval_seed"] = a.eval_seed;
    man["preset"] = preset_to_json(p);
    write_json(root / "manifest.json", man);

    std::printf("%d of %zu runs ok\n", s.n_ok, s.runs.size());
    std::printf("v_l1 mean %s%%  std %s%%\n", pct(s.mean_v_l1).c_str(), pct(s.std_v_l1).c_str());
    std::printf("v_l2 mean %s%%  std %s%%\n", pct(s.mean_v_l2).c_str(), pct(s.std_v_l2).c_str());
    std::printf("p_l1 mean %s%%  std %s%%\n", pct(s.mean_p_l1).c_str(), pct(s.std_p_l1).c_str());
    std::printf("p_l2 mean %s%%  std %s%%\n", pct(s.mean_p_l2).c_str(), pct(s.std_p_l2).c_str());
    std::printf("wrote %s\n", root.string().c_str());
    return s.n_ok == 0 ? kExitNumerical : kExitOk;
}

// ---- verify

int cmd_verify() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto checks = run_verify_suite();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    int failed = 0;
    std::printf("%-24s %-6s %12s %12s\n", "check", "result", "value", "tolerance");
    for (const auto& c : checks) {
        std::printf("%-24s %-6s %12.3e %12.3e\n", c.name.c_str(), c.passed ? "pass" : "FAIL", c.value, c.tolerance);
        if (!c.passed) ++failed;
    }
    std::printf("%zu checks, %d failed, %.1f s\n", checks.size(), failed, secs);
    for (const auto& c : checks)
        if (!c.passed) std::cerr << "failed: " << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
    return failed ? kExitVerify : kExitOk;
}

// ---- presets

int cmd_presets(const std::string& dump_dir, const std::string& show) {
    if (!show.empty()) {
        std::cout << preset_to_json(resolve_preset(show, {})).dump(2) << '\n';
        return kExitOk;
    }
    std::vector<std::string> ids = preset_ids();
    for (const auto& id : benchmark_preset_ids()) ids.push_back(id);
    if (!dump_dir.empty()) {
        const fs::path root = prepare_dir(dump_dir);
        for (const auto& id : ids) write_json(root / (id + ".json"), preset_to_json(builtin_preset(id)));
        std::printf("wrote %zu presets to %s\n", ids.size(), root.string().c_str());
        return kExitOk;
    }
    for (const auto& id : ids) std::printf("%-18s %s\n", id.c_str(), builtin_preset(id).description.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    tune_allocator();
    CLI::App app{"Physics-informed flow model for a stirred-tank cross-section"};
    app.require_subcommand(1);
    app.set_version_flag("--version", TANKFLOW_VERSION);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "Less progress output");

    TrainArgs ta;
    auto* train_cmd = app.add_subcommand("train", "Train a preset");
    train_cmd->add_option("--preset", ta.preset, "Preset id or JSON file")->capture_default_str();
    train_cmd->add_option("--seed", ta.seed, "Random seed (default: the preset's)");
    train_cmd->add_option("--out", ta.out, "Output directory");
    train_cmd->add_option("--override", ta.overrides, "key=value on the preset dump, repeatable")->allow_extra_args(false);
    train_cmd->add_option("--epochs", ta.epochs, "Iterations (default: the preset's)");
    train_cmd->add_option("--reference", ta.reference, "Labeled reference CSV for presets with data terms");
    train_cmd->add_option("--checkpoint-every", ta.checkpoint_every, "Periodic checkpoint interval");
    train_cmd->add_option("--log-every", ta.log_every, "Progress interval")->capture_default_str();

    EvalArgs ea;
    auto* eval_cmd = app.add_subcommand("evaluate", "Error metrics of a checkpoint");
    eval_cmd->add_option("--checkpoint", ea.checkpoint, "Checkpoint file")->required();
    eval_cmd->add_option("--reference", ea.reference, "Reference CSV (x,y,v_x,v_y,p)");
    eval_cmd->add_option("--oracle", ea.oracle, "Analytic reference instead of a file")->check(CLI::IsMember({"couette"}));
    eval_cmd->add_option("--n-eval", ea.n_eval, "Evaluation subset size")->capture_default_str();
    eval_cmd->add_option("--eval-seed", ea.eval_seed, "Subset seed")->capture_default_str();
    eval_cmd->add_option("--re", ea.re, "Reynolds number (default: the preset's)");
    eval_cmd->add_option("--out", ea.out, "Output directory (default: next to the checkpoint)");
    eval_cmd->add_option("--profile", ea.profile, "Radial profile, e.g. phi=0");
    eval_cmd->add_option("--profile-points", ea.profile_points)->capture_default_str();
    eval_cmd->add_option("--oracle-points", ea.oracle_points, "Points drawn for the analytic reference")->capture_default_str();

    SweepArgs sa;
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a parameterized checkpoint over several Re");
    sweep_cmd->add_option("--checkpoint", sa.checkpoint, "Checkpoint file")->required();
    sweep_cmd->add_option("--re", sa.re, "Reynolds numbers")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--reference", sa.reference, "Reference CSV path; {re} is replaced by each Re");
    sweep_cmd->add_option("--oracle", sa.oracle, "Analytic reference instead of files")->check(CLI::IsMember({"couette"}));
    sweep_cmd->add_option("--n-eval", sa.n_eval)->capture_default_str();
    sweep_cmd->add_option("--eval-seed", sa.eval_seed)->capture_default_str();
    sweep_cmd->add_option("--out", sa.out, "Output directory");
    sweep_cmd->add_option("--oracle-points", sa.oracle_points)->capture_default_str();

    RobustArgs ra;
    auto* rob_cmd = app.add_subcommand("robustness", "Train and evaluate over several seeds");
    rob_cmd->add_option("--preset", ra.preset, "Preset id or JSON file")->capture_default_str();
    rob_cmd->add_option("--override", ra.overrides, "key=value, repeatable")->allow_extra_args(false);
    rob_cmd->add_option("--n", ra.n, "Number of seeds")->capture_default_str();
    rob_cmd->add_option("--seed-base", ra.seed_base, "First seed")->capture_default_str();
    rob_cmd->add_option("--seeds", ra.seeds, "Explicit seed list (splits work across processes)")->delimiter(',');
    rob_cmd->add_option("--epochs", ra.epochs, "Iterations per seed (default: the preset's)");
    rob_cmd->add_option("--reference", ra.reference, "Reference CSV");
    rob_cmd->add_option("--oracle", ra.oracle, "Analytic reference")->check(CLI::IsMember({"couette"}));
    rob_cmd->add_option("--n-eval", ra.n_eval)->capture_default_str();
    rob_cmd->add_option("--eval-seed", ra.eval_seed)->capture_default_str();
    rob_cmd->add_option("--out", ra.out, "Output directory");
    rob_cmd->add_option("--profile-points", ra.profile_points)->capture_default_str();
    rob_cmd->add_option("--oracle-points", ra.oracle_points)->capture_default_str();

    auto* verify_cmd = app.add_subcommand("verify", "Residual, derivative and metric checks");

    std::string dump_dir, show;
    auto* presets_cmd = app.add_subcommand("presets", "List the shipped presets");
    presets_cmd->add_option("--dump", dump_dir, "Write every preset as <id>.json into this directory");
    presets_cmd->add_option("--show", show, "Print one preset (id or file) as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    verbosity = quiet ? 0 : 1;

    try {
        if (*train_cmd) return cmd_train(ta);
        if (*eval_cmd) return cmd_evaluate(ea);
        if (*sweep_cmd) return cmd_sweep(sa);
        if (*rob_cmd) return cmd_robustness(ra);
        if (*verify_cmd) return cmd_verify();
        if (*presets_cmd) return cmd_presets(dump_dir, show);
    } catch (const NumericalError& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const LoadError& e) {
        std::cerr << "load error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
