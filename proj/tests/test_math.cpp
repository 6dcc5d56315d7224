#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nrbm/math.hpp"

using namespace nrbm;

TEST_CASE("inverse normal CDF matches reference quantiles", "[math]") {
    // reference values computed with scipy.stats.norm.ppf
    CHECK(inv_normal_cdf(0.5) == Catch::Approx(0.0).margin(1e-15));
    CHECK(inv_normal_cdf(0.975) == Catch::Approx(1.95996398454005).epsilon(1e-12));
    CHECK(inv_normal_cdf(0.9999999) == Catch::Approx(5.19933758229066).epsilon(1e-11));
    CHECK(inv_normal_cdf(1e-9) == Catch::Approx(-5.99780701500769).epsilon(1e-11));
    CHECK(inv_normal_cdf(0.3) == Catch::Approx(-0.524400512708041).epsilon(1e-12));
    CHECK_THROWS_AS(inv_normal_cdf(0.0), std::domain_error);
    CHECK_THROWS_AS(inv_normal_cdf(1.0), std::domain_error);
}

TEST_CASE("normal CDF and its inverse round-trip", "[math]") {
    for (double u : {1e-8, 1e-4, 0.01, 0.2, 0.5, 0.77, 0.99, 1.0 - 1e-6}) {
        CHECK(normal_cdf(inv_normal_cdf(u)) == Catch::Approx(u).epsilon(1e-10));
    }
    CHECK(normal_cdf(0.0) == Catch::Approx(0.5).margin(1e-16));
    CHECK(normal_cdf(1.959963984540054) == Catch::Approx(0.975).epsilon(1e-12));
}

TEST_CASE("Kolmogorov survival matches reference values", "[math]") {
    // reference values computed with scipy.special.kolmogorov; both branches
    CHECK(kolmogorov_survival(0.4) == Catch::Approx(0.997192326777298).margin(1e-10));
    CHECK(kolmogorov_survival(0.8284) == Catch::Approx(0.498701181237859).margin(1e-10));
    CHECK(kolmogorov_survival(1.0) == Catch::Approx(0.269999671677355).margin(1e-10));
    CHECK(kolmogorov_survival(1.3581) == Catch::Approx(0.0499996304316674).margin(1e-10));
    CHECK(kolmogorov_survival(1.6276) == Catch::Approx(0.0100015373330608).margin(1e-10));
    CHECK(kolmogorov_survival(2.0) == Catch::Approx(0.000670925255779695).margin(1e-10));
    CHECK(kolmogorov_survival(0.0) == 1.0);
    CHECK(kolmogorov_survival(50.0) == 0.0);
}

TEST_CASE("adaptive Simpson quadrature", "[math]") {
    CHECK(adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0) ==
          Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
          Catch::Approx(2.0).epsilon(1e-11));
    CHECK(adaptive_simpson([](double x) { return normal_pdf(x); }, -8.0, 8.0) ==
          Catch::Approx(1.0).epsilon(1e-10));
    CHECK(adaptive_simpson([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
}
