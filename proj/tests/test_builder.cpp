#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tankflow/builder.hpp"
#include "tankflow/errors.hpp"
#include "tankflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace tankflow;

namespace {

ModelPreset small(const std::string& id) {
    ModelPreset p = builtin_preset(id);
    for (auto& [name, spec] : p.networks) spec.hidden = {6, 5};
    p.sampling.domain_points = 40;
    for (auto& [name, n] : p.sampling.boundary) n = std::min(n, 16);
    if (p.sampling.overlap_points > 0) p.sampling.overlap_points = 20;
    if (p.sampling.data_points > 0) p.sampling.data_points = 10;
    return p;
}

ReferenceSolution synthetic_reference(const GeometryConfig& geo) {
    ReferenceSolution ref;
    Rng rng(5);
    for (const auto& q : sample_domain(region_by_id("full", geo, {}), 30, geo, 11))
        ref.points.push_back({q.x, q.y, rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02), rng.uniform(0, 10)});
    return ref;
}

std::vector<double> perturbed_params(const Model& m, std::uint64_t seed) {
    auto theta = init_params(m, seed);
    Rng rng(seed + 1);
    for (double& t : theta) t += rng.uniform(-0.1, 0.1);
    return theta;
}

void check_gradient(const PinnProblem& prob, const std::vector<double>& theta) {
    std::vector<double> g;
    const double f0 = prob.objective(theta, &g);
    REQUIRE(std::isfinite(f0));
    double gmax = 0.0;
    for (double x : g) gmax = std::max(gmax, std::abs(x));
    Rng rng(77);
    for (int k = 0; k < 10; ++k) {
        const std::size_t j = rng.below(theta.size());
        std::vector<double> tp = theta, tm = theta;
        const double h = 1e-6;
        tp[j] += h;
        tm[j] -= h;
        const double fd = (prob.objective(tp, nullptr) - prob.objective(tm, nullptr)) / (2 * h);
        CHECK(std::abs(fd - g[j]) < 1e-5 * std::max(gmax, 1e-8));
    }
}

} // namespace

TEST_CASE("split counts follow the ratio") {
    CHECK(split_counts(2048, 0.2) == std::pair{341, 1707});
    CHECK(split_counts(100, 1.0) == std::pair{50, 50});
    CHECK_THROWS_AS(split_counts(10, 0.0), ConfigError);
}

TEST_CASE("omega sampling stays inside the parameter space") {
    const ModelPreset p = builtin_preset("dd-param");
    const auto [lo, hi] = p.omega_range();
    const auto om = sample_omegas(p, 2000, 3);
    for (double w : om) {
        CHECK(w >= lo);
        CHECK(w <= hi);
        const double re = reynolds(w, p.fluid, p.geometry.r_stirrer);
        CHECK(re >= 1000 - 1e-9);
        CHECK(re <= 10000 + 1e-9);
    }
    CHECK(sample_omegas(p, 50, 3) == std::vector<double>(om.begin(), om.begin() + 50));
    const auto fixed = sample_omegas(builtin_preset("dd"), 4, 3);
    for (double w : fixed) CHECK(w == 0.625);
}

TEST_CASE("every preset builds a consistent problem") {
    const ReferenceSolution ref = synthetic_reference(GeometryConfig::stirred_tank());
    for (const auto& id : preset_ids()) {
        CAPTURE(id);
        const ModelPreset p = small(id);
        const Model m = build_model(p);
        PinnProblem prob = build_problem(p, m, &ref);
        prob.resample(0);
        std::set<std::string> ids;
        for (const auto& g : prob.groups())
            for (const auto& i : group_ids(g)) ids.insert(i);
        CHECK(!ids.empty());
        const auto theta = perturbed_params(m, 4);
        LossBreakdown b;
        const double f = prob.objective(theta, nullptr, &b);
        CHECK(std::isfinite(f));
        CHECK(b.total > 0);
        check_gradient(prob, theta);
    }
}

TEST_CASE("boundary sets are fixed and domain sets change on resample") {
    const ModelPreset p = small("baseline");
    const Model m = build_model(p);
    PinnProblem prob = build_problem(p, m);
    prob.resample(0);
    const auto a = prob.groups();
    prob.resample(1);
    const auto b = prob.groups();
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        const bool same = a[k].uses[0].raw == b[k].uses[0].raw;
        if (a[k].name == "domain")
            CHECK(!same);
        else
            CHECK(same);
    }
    prob.resample(0);
    CHECK(prob.groups()[0].uses[0].raw == a[0].uses[0].raw);
}

TEST_CASE("data preset needs a labeled set") {
    const ModelPreset p = small("baseline-data");
    const Model m = build_model(p);
    CHECK_THROWS_AS(build_problem(p, m), ConfigError);
}

TEST_CASE("init params are deterministic per seed") {
    const Model m = build_model(small("dd"));
    CHECK(init_params(m, 1) == init_params(m, 1));
    CHECK(init_params(m, 1) != init_params(m, 2));
}
