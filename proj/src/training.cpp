#include "tankflow/training.hpp"

#include "tankflow/errors.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#if defined(__GLIBC__)
#include <malloc.h>
#endif
#include <sstream>

namespace tankflow {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string describe(const LossBreakdown& b) {
    std::ostringstream os;
    for (const auto& c : b.components) os << "  " << c.id << " = " << c.mse << " (weight " << c.weight << ")\n";
    os << "  reg_l1 = " << b.reg_l1 << ", reg_l2 = " << b.reg_l2 << ", total = " << b.total;
    return os.str();
}

const char* kFormat = "tankflow-checkpoint";

nlohmann::ordered_json layout_json(const Model& model) {
    auto subs = nlohmann::ordered_json::array();
    for (const auto& s : model.subnets) {
        const auto& spec = s.net().spec();
        subs.push_back({{"name", s.name()},
                        {"offset", s.offset()},
                        {"param_count", s.param_count()},
                        {"n_in", spec.n_in},
                        {"hidden", spec.hidden},
                        {"n_out", spec.n_out},
                        {"activation", activation_name(spec.activation)},
                        {"scaling", postmap_name(s.post().kind)}});
    }
    return subs;
}

double mean_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

} // namespace

RunRecord train(const ModelPreset& preset, const TrainOptions& opt) {
    preset.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const Model model = build_model(preset);
    PinnProblem prob = build_problem(preset, model, opt.labeled);

    RunRecord rec;
    rec.preset_id = preset.id;
    rec.seed = preset.seed;
    rec.theta = opt.initial.empty() ? init_params(model, preset.seed) : opt.initial;
    if (rec.theta.size() != model.param_count())
        throw ConfigError("initial parameters have " + std::to_string(rec.theta.size()) + " values, model needs " +
                          std::to_string(model.param_count()));

    const int epochs = opt.epochs >= 0 ? opt.epochs : preset.epochs;
    const int interval = preset.sampling.resample_every;
    int batch = 0;
    prob.resample(batch);

    LbfgsOptions lo;
    lo.history = preset.optimizer.history;
    lo.gtol = preset.optimizer.gtol;
    lo.ftol = preset.optimizer.ftol;

    // breakdown of the most recent evaluation, reused when the accepted point matches
    std::vector<double> last_x;
    LossBreakdown last_b;
    const Objective f = [&](const std::vector<double>& x, std::vector<double>& g) {
        const double v = prob.objective(x, &g, &last_b);
        last_x = x;
        return v;
    };

    bool stop = false;
    rec.reason = stop_reason_name(StopReason::MaxIterations);
    while (rec.iterations < epochs && !stop) {
        LossBreakdown b0;
        if (!std::isfinite(prob.objective(rec.theta, nullptr, &b0)))
            throw NumericalError("non-finite loss at iteration " + std::to_string(rec.iterations) + ":\n" + describe(b0));

        const int to_boundary = interval > 0 ? interval - rec.iterations % interval : epochs;
        lo.max_iterations = std::min(to_boundary, epochs - rec.iterations);
        bool user_stop = false;
        const IterationCallback cb = [&](int, double, const std::vector<double>& x) {
            ++rec.iterations;
            HistoryRow row;
            row.iteration = rec.iterations;
            if (x == last_x)
                row.loss = last_b;
            else
                prob.objective(x, nullptr, &row.loss);
            if (!std::isfinite(row.loss.total))
                throw NumericalError("non-finite loss at iteration " + std::to_string(rec.iterations) + ":\n" +
                                     describe(row.loss));
            rec.history.push_back(row);
            if (opt.checkpoint_every > 0 && rec.iterations % opt.checkpoint_every == 0 && !opt.checkpoint_path.empty())
                save_checkpoint(opt.checkpoint_path, preset, model, x);
            if (opt.progress && !opt.progress(rec.history.back())) user_stop = true;
            return !user_stop;
        };
        const LbfgsResult res = lbfgs_minimize(f, rec.theta, lo, cb);
        rec.reason = stop_reason_name(res.reason);
        if (res.reason != StopReason::MaxIterations) {
            stop = true;
            break;
        }
        if (interval > 0 && rec.iterations % interval == 0) {
            prob.resample(++batch);
            ++rec.resample_events;
        }
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << "iteration";
    if (!history.empty())
        for (const auto& c : history.front().loss.components) out << ',' << c.id;
    out << ",reg_l1,reg_l2,total,log_total\n";
    for (const auto& h : history) {
        out << h.iteration;
        for (const auto& c : h.loss.components) out << ',' << fmt(c.mse);
        out << ',' << fmt(h.loss.reg_l1) << ',' << fmt(h.loss.reg_l2) << ',' << fmt(h.loss.total) << ','
            << fmt(h.loss.log_total) << '\n';
    }
}

void save_checkpoint(const std::string& path, const ModelPreset& preset, const Model& model,
                     const std::vector<double>& theta) {
    if (theta.size() != model.param_count()) throw ConfigError("parameter count does not match the model");
    nlohmann::ordered_json head;
    head["format"] = kFormat;
    head["version"] = 1;
    head["param_count"] = theta.size();
    head["subnets"] = layout_json(model);
    head["preset"] = preset_to_json(preset);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ConfigError("cannot write '" + path + "'");
        out << head.dump() << '\n';
        for (double t : theta) out << fmt(t) << '\n';
        if (!out) throw ConfigError("write to '" + path + "' failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw ConfigError("cannot move checkpoint to '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open checkpoint '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw LoadError("checkpoint '" + path + "' is empty");
    nlohmann::json head;
    try {
        head = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw LoadError("checkpoint header is not JSON: " + std::string(e.what()));
    }
    if (!head.is_object() || head.value("format", "") != kFormat) throw LoadError("not a tankflow checkpoint");
    if (head.value("version", 0) != 1) throw LoadError("unsupported checkpoint version");

    Checkpoint ck;
    try {
        ck.preset = preset_from_json(head.at("preset"));
    } catch (const std::exception& e) {
        throw LoadError("checkpoint preset: " + std::string(e.what()));
    }
    const Model model = build_model(ck.preset);
    const auto n = head.value("param_count", std::size_t{0});
    if (n != model.param_count()) throw LoadError("checkpoint parameter count does not match its preset");
    if (nlohmann::json(layout_json(model)) != head.at("subnets")) throw LoadError("checkpoint layout does not match its preset");

    ck.theta.reserve(n);
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || *end != '\0' || !std::isfinite(v))
            throw LoadError("checkpoint line " + std::to_string(row) + ": bad value");
        ck.theta.push_back(v);
    }
    if (ck.theta.size() != n)
        throw LoadError("checkpoint has " + std::to_string(ck.theta.size()) + " values, header says " + std::to_string(n));
    return ck;
}

RobustnessSummary robustness_run(const ModelPreset& preset, const ReferenceSolution& ref, const Oracle& oracle,
                                 const RobustnessOptions& opt) {
    if (opt.seeds.empty()) throw ConfigError("robustness run needs at least one seed");
    RobustnessSummary sum;
    std::vector<double> v1, v2, p1, p2;
    const auto pts = ref.positions();
    const double r0 = preset.geometry.annulus ? preset.geometry.r_stirrer : 0.0;
    for (const auto seed : opt.seeds) {
        SeedResult res;
        res.seed = seed;
        ModelPreset p = preset;
        p.seed = seed;
        try {
            const RunRecord run = train(p, opt.train);
            res.seconds = run.seconds;
            const Model m = build_model(p);
            res.report = error_metrics(m.predict(run.theta.data(), pts, p.omega), ref, opt.n_eval, opt.eval_seed,
                                       p.omega, p.geometry.r_stirrer);
            if (opt.profile_points > 1)
                res.profile = extract_profile(m, run.theta.data(), 0.0, r0, p.geometry.r_reactor, opt.profile_points,
                                              p.omega, oracle);
            v1.push_back(res.report.v_l1);
            v2.push_back(res.report.v_l2);
            p1.push_back(res.report.p_l1);
            p2.push_back(res.report.p_l2);
            ++sum.n_ok;
        } catch (const NumericalError& e) {
            res.failed = true;
            res.error = e.what();
        }
        if (opt.on_result) opt.on_result(res);
        sum.runs.push_back(std::move(res));
    }
    sum.mean_v_l1 = mean_of(v1);
    sum.std_v_l1 = std_of(v1);
    sum.mean_v_l2 = mean_of(v2);
    sum.std_v_l2 = std_of(v2);
    sum.mean_p_l1 = mean_of(p1);
    sum.std_p_l1 = std_of(p1);
    sum.mean_p_l2 = mean_of(p2);
    sum.std_p_l2 = std_of(p2);
    return sum;
}

void tune_allocator() {
#if defined(__GLIBC__)
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

} // namespace tankflow
