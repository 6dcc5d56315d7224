#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nrbm/math.hpp"
#include "nrbm/rng.hpp"
#include "nrbm/stats.hpp"
#include "nrbm/step_law.hpp"

using namespace nrbm;

TEST_CASE("closed-form moments", "[step_law]") {
    CHECK(moments(StepLaw::rademacher()) == std::pair(0.0, 1.0));
    const auto u = moments(StepLaw::uniform(-1.0, 1.0));
    CHECK(u.first == 0.0);
    CHECK(u.second == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(moments(StepLaw::gaussian(2.0, 3.0)) == std::pair(2.0, 9.0));

    const auto d = StepLaw::discrete({0.0, 3.0}, {0.4, 0.6});
    CHECK(d.mean() == Catch::Approx(1.8).epsilon(1e-15));
    CHECK(d.variance() == Catch::Approx(5.4 - 1.8 * 1.8).epsilon(1e-14));
    CHECK(d.sup_bound().value() == 3.0);
    CHECK(d.fourth_moment().value() == Catch::Approx(0.6 * 81.0).epsilon(1e-14));
}

TEST_CASE("degenerate laws are rejected at construction", "[step_law]") {
    CHECK_THROWS_AS(StepLaw::discrete({1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(StepLaw::discrete({2.0, 2.0}, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(StepLaw::discrete({0.0, 1.0}, {0.5, 0.6}), std::invalid_argument); // probs sum != 1
    CHECK_THROWS_AS(StepLaw::gaussian(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StepLaw::uniform(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("sampling is deterministic in the stream", "[step_law]") {
    const StepLaw law = StepLaw::rademacher();
    RngStream a(42), b(42);
    for (int i = 0; i < 50; ++i) REQUIRE(law.sample(a) == law.sample(b));
}

TEST_CASE("Monte Carlo moments match the metadata within 4 SE", "[step_law]") {
    const std::vector<StepLaw> laws = {
        StepLaw::rademacher(),
        StepLaw::gaussian(2.0, 3.0),
        StepLaw::uniform(-1.0, 1.0),
        StepLaw::discrete({-2.0, 0.5, 4.0}, {0.25, 0.5, 0.25}),
        StepLaw::uniform(-1.0, 1.0).truncated(0.5),
        StepLaw::gaussian(0.0, 1.0).truncated(1.0),
    };
    std::size_t seed = 1000;
    for (const auto& law : laws) {
        RngStream rng(seed++);
        std::vector<double> x(1'000'000);
        for (double& v : x) v = law.sample(rng);
        const auto mv = mean_var_ci(x);
        INFO(law.name());
        CHECK(std::abs(mv.mean - law.mean()) <= 4.0 * mv.se_mean);
        CHECK(std::abs(mv.variance - law.variance()) <= 4.0 * mv.se_var);
    }
}

TEST_CASE("rademacher mean over 1e6 draws is 0 within 3e-3", "[step_law]") {
    const StepLaw law = StepLaw::rademacher();
    RngStream rng(42);
    double sum = 0.0;
    const std::size_t n = 1'000'000;
    for (std::size_t i = 0; i < n; ++i) sum += law.sample(rng);
    CHECK(std::abs(sum / static_cast<double>(n)) < 3e-3); // SE = 1/sqrt(n) = 1e-3
}

TEST_CASE("truncation of a bounded centered law below its bound is a no-op", "[step_law]") {
    const StepLaw t = truncate(StepLaw::rademacher(), 2.0);
    CHECK(t.kind() == StepLaw::Kind::rademacher);
    CHECK(t.mean() == 0.0);
    CHECK(t.variance() == 1.0);
    CHECK(t.name() == "rademacher");
}

TEST_CASE("truncated uniform(-1,1) at 1/2 has variance 1/24", "[step_law]") {
    const StepLaw t = truncate(StepLaw::uniform(-1.0, 1.0), 0.5);
    CHECK(t.mean() == 0.0);
    CHECK(t.variance() == Catch::Approx(1.0 / 24.0).epsilon(1e-13));
    CHECK(t.sup_bound().value() == Catch::Approx(0.5).margin(1e-15)); // centering shift is 0 by symmetry

    // half the mass is uniform on [-1/2,1/2], half sits in an atom at 0
    RngStream rng(7);
    std::size_t atom = 0;
    const std::size_t n = 100'000;
    for (std::size_t i = 0; i < n; ++i)
        if (t.sample(rng) == 0.0) ++atom;
    CHECK(std::abs(static_cast<double>(atom) / n - 0.5) < 4.0 * 0.5 / std::sqrt(n));
}

TEST_CASE("truncated gaussian variance matches the erf closed form and grows to 1", "[step_law]") {
    const StepLaw g = StepLaw::gaussian(0.0, 1.0);
    double prev = 0.0;
    for (double b : {1.0, 2.0, 4.0}) {
        const StepLaw t = truncate(g, b);
        // independent oracle: E(X^2 1{|X|<=b}) = (2 Phi(b) - 1) - 2 b phi(b), centering term 0
        const double oracle = (2.0 * normal_cdf(b) - 1.0) - 2.0 * b * normal_pdf(b);
        INFO("b = " << b);
        CHECK(t.variance() == Catch::Approx(oracle).epsilon(1e-9));
        CHECK(t.variance() > prev);
        CHECK(t.variance() < 1.0);
        prev = t.variance();
    }
}

TEST_CASE("truncated off-center gaussian matches reference moments", "[step_law]") {
    // reference values computed by numerical integration (scipy.integrate.quad)
    const StepLaw g = StepLaw::gaussian(2.0, 3.0);
    CHECK(g.restricted_mean(4.0) == Catch::Approx(0.653143543982303).epsilon(1e-9));
    const StepLaw t = truncate(g, 4.0);
    CHECK(t.mean() == 0.0);
    CHECK(t.variance() == Catch::Approx(2.92123890903644).epsilon(1e-9));
}

TEST_CASE("samples of a truncated law respect the exact bound", "[step_law]") {
    const StepLaw base = StepLaw::gaussian(1.0, 2.0);
    const double b = 1.5;
    const StepLaw t = truncate(base, b);
    const double shift = base.restricted_mean(b);
    const double bound = b + std::abs(shift);
    CHECK(t.sup_bound().value() == Catch::Approx(bound).margin(1e-15));
    RngStream rng(11);
    for (int i = 0; i < 100'000; ++i) REQUIRE(std::abs(t.sample(rng)) <= bound);
}

TEST_CASE("truncation that wipes out all variance is rejected", "[step_law]") {
    CHECK_THROWS_AS(truncate(StepLaw::uniform(-1.0, 1.0), 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(truncate(StepLaw::rademacher(), 0.5), std::invalid_argument);
    CHECK_THROWS_AS(truncate(StepLaw::uniform(-1.0, 1.0), -1.0), std::invalid_argument);
}

TEST_CASE("centered() shifts the family to mean zero", "[step_law]") {
    CHECK(StepLaw::gaussian(2.0, 3.0).centered().mean() == 0.0);
    CHECK(StepLaw::gaussian(2.0, 3.0).centered().variance() == 9.0);
    const StepLaw u = StepLaw::uniform(0.0, 2.0).centered();
    CHECK(u.mean() == 0.0);
    CHECK(u.variance() == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
    const StepLaw d = StepLaw::discrete({0.0, 3.0}, {0.4, 0.6}).centered();
    CHECK(d.mean() == Catch::Approx(0.0).margin(1e-15));
}
