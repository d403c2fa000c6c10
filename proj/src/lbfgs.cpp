#include "tankflow/lbfgs.hpp"

#include "tankflow/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>

namespace tankflow {

namespace {

using Vec = Eigen::VectorXd;

Eigen::Map<const Vec> view(const std::vector<double>& v) { return {v.data(), static_cast<Eigen::Index>(v.size())}; }

struct Point {
    double alpha = 0.0;
    double f = 0.0;
    double d = 0.0; ///< directional derivative
    std::vector<double> x, g;
};

/// Minimizer of the cubic through (a, fa, da) and (b, fb, db); falls back to bisection.
double cubic_min(const Point& a, const Point& b) {
    const double d1 = a.d + b.d - 3 * (a.f - b.f) / (a.alpha - b.alpha);
    const double disc = d1 * d1 - a.d * b.d;
    if (!(disc >= 0) || !std::isfinite(b.f)) return 0.5 * (a.alpha + b.alpha);
    const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
    const double t = b.alpha - (b.alpha - a.alpha) * (b.d + d2 - d1) / (b.d - a.d + 2 * d2);
    return std::isfinite(t) ? t : 0.5 * (a.alpha + b.alpha);
}

class LineSearch {
public:
    LineSearch(const Objective& f, const LbfgsOptions& opt, const std::vector<double>& x0, double f0,
               const std::vector<double>& dir, double d0, int& evals)
        : f_(f), opt_(opt), x0_(x0), f0_(f0), dir_(dir), d0_(d0), evals_(evals) {}

    /// Returns false when no acceptable step was found.
    bool run(double alpha1, Point& out) {
        Point prev;
        prev.alpha = 0.0;
        prev.f = f0_;
        prev.d = d0_;
        double alpha = alpha1;
        for (int i = 0; i < opt_.max_line_search; ++i) {
            Point cur = eval(alpha);
            if (!std::isfinite(cur.f) || cur.f > f0_ + opt_.c1 * alpha * d0_ || (i > 0 && cur.f >= prev.f))
                return zoom(prev, cur, out);
            if (std::abs(cur.d) <= -opt_.c2 * d0_) {
                out = std::move(cur);
                return true;
            }
            if (cur.d >= 0) return zoom(cur, prev, out);
            prev = std::move(cur);
            alpha *= 2.0;
        }
        return false;
    }

private:
    Point eval(double alpha) {
        Point p;
        p.alpha = alpha;
        p.x.resize(x0_.size());
        for (std::size_t j = 0; j < x0_.size(); ++j) p.x[j] = x0_[j] + alpha * dir_[j];
        p.g.resize(x0_.size());
        p.f = f_(p.x, p.g);
        ++evals_;
        p.d = std::isfinite(p.f) ? view(p.g).dot(view(dir_)) : 0.0;
        return p;
    }

    bool zoom(Point lo, Point hi, Point& out) {
        for (int j = 0; j < opt_.max_line_search; ++j) {
            const double a = std::min(lo.alpha, hi.alpha), b = std::max(lo.alpha, hi.alpha);
            const double w = b - a;
            if (w <= 1e-16 * std::max(1.0, b)) break;
            double t = cubic_min(lo, hi);
            t = std::clamp(t, a + 0.1 * w, b - 0.1 * w);
            Point cur = eval(t);
            if (!std::isfinite(cur.f) || cur.f > f0_ + opt_.c1 * t * d0_ || cur.f >= lo.f) {
                hi = std::move(cur);
            } else {
                if (std::abs(cur.d) <= -opt_.c2 * d0_) {
                    out = std::move(cur);
                    return true;
                }
                if (cur.d * (hi.alpha - lo.alpha) >= 0) hi = lo;
                lo = std::move(cur);
            }
        }
        // sufficient decrease without curvature is still progress
        if (lo.alpha > 0 && lo.f < f0_) {
            out = std::move(lo);
            return true;
        }
        return false;
    }

    const Objective& f_;
    const LbfgsOptions& opt_;
    const std::vector<double>& x0_;
    double f0_;
    const std::vector<double>& dir_;
    double d0_;
    int& evals_;
};

} // namespace

void LbfgsOptions::validate() const {
    if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
    if (history < 1) throw ConfigError("history size must be >= 1");
    if (!(gtol >= 0) || !(ftol >= 0)) throw ConfigError("tolerances must be >= 0");
    if (ftol_window < 1) throw ConfigError("ftol window must be >= 1");
    if (!(0 < c1 && c1 < c2 && c2 < 1)) throw ConfigError("line search constants need 0 < c1 < c2 < 1");
    if (max_line_search < 1) throw ConfigError("max_line_search must be >= 1");
}

std::string stop_reason_name(StopReason r) {
    switch (r) {
    case StopReason::MaxIterations: return "max iterations";
    case StopReason::GradientTolerance: return "gradient tolerance";
    case StopReason::ObjectiveTolerance: return "objective tolerance";
    case StopReason::LineSearchFailure: return "line search failure";
    case StopReason::Callback: return "stopped by callback";
    }
    return "unknown";
}

LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double>& x, const LbfgsOptions& opt,
                           const IterationCallback& cb) {
    opt.validate();
    LbfgsResult res;
    const auto n = static_cast<Eigen::Index>(x.size());
    std::vector<double> g(x.size());
    double fx = f(x, g);
    res.evaluations = 1;
    if (!std::isfinite(fx)) throw NumericalError("objective is not finite at the starting point");

    std::deque<Vec> S, Y;
    std::deque<double> rho;
    std::vector<double> fhist{fx};
    auto gmax = [&] { return view(g).cwiseAbs().maxCoeff(); };
    res.f = fx;
    res.gnorm = n ? gmax() : 0.0;
    if (n == 0 || res.gnorm <= opt.gtol) {
        res.reason = StopReason::GradientTolerance;
        return res;
    }

    std::vector<double> dir(x.size());
    bool restarted = false;
    while (res.iterations < opt.max_iterations) {
        // two-loop recursion
        Vec q = -view(g);
        const std::size_t m = S.size();
        std::vector<double> al(m);
        for (std::size_t k = m; k-- > 0;) {
            al[k] = rho[k] * S[k].dot(q);
            q -= al[k] * Y[k];
        }
        if (m > 0) q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
        for (std::size_t k = 0; k < m; ++k) {
            const double b = rho[k] * Y[k].dot(q);
            q += (al[k] - b) * S[k];
        }
        double d0 = q.dot(view(g));
        if (!(d0 < 0)) {
            S.clear();
            Y.clear();
            rho.clear();
            q = -view(g);
            d0 = -view(g).squaredNorm();
        }
        Eigen::Map<Vec>(dir.data(), n) = q;
        const double alpha1 = S.empty() ? std::min(1.0, 1.0 / view(g).norm()) : 1.0;

        Point step;
        LineSearch ls(f, opt, x, fx, dir, d0, res.evaluations);
        if (!ls.run(alpha1, step)) {
            if (restarted && S.empty()) {
                res.reason = StopReason::LineSearchFailure;
                return res;
            }
            S.clear();
            Y.clear();
            rho.clear();
            restarted = true;
            continue;
        }
        restarted = false;

        Vec s = view(step.x) - view(x);
        Vec y = view(step.g) - view(g);
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm() && sy > 0) {
            S.push_back(std::move(s));
            Y.push_back(std::move(y));
            rho.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > opt.history) {
                S.pop_front();
                Y.pop_front();
                rho.pop_front();
            }
        }
        x = std::move(step.x);
        g = std::move(step.g);
        fx = step.f;
        ++res.iterations;
        res.f = fx;
        res.gnorm = gmax();
        fhist.push_back(fx);

        if (cb && !cb(res.iterations, fx, x)) {
            res.reason = StopReason::Callback;
            return res;
        }
        if (res.gnorm <= opt.gtol) {
            res.reason = StopReason::GradientTolerance;
            return res;
        }
        if (opt.ftol > 0 && static_cast<int>(fhist.size()) > opt.ftol_window) {
            const double old = fhist[fhist.size() - 1 - static_cast<std::size_t>(opt.ftol_window)];
            if (std::abs(old - fx) <= opt.ftol * std::max({1.0, std::abs(old), std::abs(fx)})) {
                res.reason = StopReason::ObjectiveTolerance;
                return res;
            }
        }
    }
    res.reason = StopReason::MaxIterations;
    return res;
}

} // namespace tankflow
