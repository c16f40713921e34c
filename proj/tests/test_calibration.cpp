#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mrfut/calibration.hpp"

using namespace mrfut;

namespace {

std::vector<double> monthly_maturities() {
    // 27..237 days in 30-day increments, 252-day year
    std::vector<double> m;
    for (int d = 27; d <= 237; d += 30) m.push_back(d / 252.0);
    return m;
}

}  // namespace

TEST_CASE("OU round trip, Jul 22 2015 parameters") {
    SpotModel truth{ModelKind::OU, 4.55, 18.16, 4.55, 18.16, 5.0};
    const FuturesCurve curve = term_structure(truth, 12.12, monthly_maturities());
    const CalibrationResult r = calibrate(ModelKind::OU, 12.12, curve);
    CHECK(r.converged);
    CHECK(r.params.mu_q == doctest::Approx(4.55).epsilon(0.005));
    CHECK(r.params.theta_q == doctest::Approx(18.16).epsilon(0.005));
    CHECK(r.sse < 1e-10);
}

TEST_CASE("CIR round trip, Nov 20 2008 parameters") {
    SpotModel truth{ModelKind::CIR, 4.59, 40.36, 4.59, 40.36, 5.0};
    const FuturesCurve curve = term_structure(truth, 80.86, monthly_maturities());
    const CalibrationResult r = calibrate(ModelKind::CIR, 80.86, curve);
    CHECK(r.params.mu_q == doctest::Approx(4.59).epsilon(0.005));
    CHECK(r.params.theta_q == doctest::Approx(40.36).epsilon(0.005));
    CHECK(r.sse < 1e-10);
    CHECK(validate(r.params).empty());
}

TEST_CASE("XOU round trip recovers mu_q, theta_q, sigma") {
    SpotModel truth{ModelKind::XOU, 4.08, 3.06, 4.08, 3.06, 1.63};
    const FuturesCurve curve = term_structure(truth, 12.12, monthly_maturities());
    const CalibrationResult r = calibrate(ModelKind::XOU, 12.12, curve);
    CHECK(r.params.mu_q == doctest::Approx(4.08).epsilon(0.01));
    CHECK(r.params.theta_q == doctest::Approx(3.06).epsilon(0.01));
    CHECK(r.params.sigma == doctest::Approx(1.63).epsilon(0.01));
}

TEST_CASE("XOU round trip with fixed sigma") {
    SpotModel truth{ModelKind::XOU, 3.25, 3.65, 3.25, 3.65, 0.15};
    const FuturesCurve curve = term_structure(truth, 80.86, monthly_maturities());
    const CalibrationResult r = calibrate(ModelKind::XOU, 80.86, curve, 0.15);
    CHECK(r.params.sigma == 0.15);
    CHECK(r.params.mu_q == doctest::Approx(3.25).epsilon(0.01));
    CHECK(r.params.theta_q == doctest::Approx(3.65).epsilon(0.01));
}

TEST_CASE("OU/CIR calibration ignores sigma in the objective") {
    SpotModel truth{ModelKind::CIR, 4.55, 18.16, 4.55, 18.16, 5.33};
    const FuturesCurve curve = term_structure(truth, 12.12, monthly_maturities());
    const CalibrationResult a = calibrate(ModelKind::CIR, 12.12, curve, 1.0);
    const CalibrationResult b = calibrate(ModelKind::CIR, 12.12, curve, 9.9);
    CHECK(a.params.mu_q == b.params.mu_q);      // bit-identical
    CHECK(a.params.theta_q == b.params.theta_q);
}

TEST_CASE("calibration rejects degenerate inputs") {
    FuturesCurve single;
    single.maturities = {0.01};
    single.prices = {12.12};
    CHECK_THROWS_AS(calibrate(ModelKind::OU, 12.12, single), std::invalid_argument);

    FuturesCurve flat;
    flat.maturities = {0.1, 0.1, 0.1};
    flat.prices = {10.0, 11.0, 12.0};
    CHECK_THROWS_AS(calibrate(ModelKind::OU, 12.12, flat), std::invalid_argument);

    FuturesCurve ok;
    ok.maturities = {0.1, 0.2};
    ok.prices = {10.0, 11.0};
    CHECK_THROWS_AS(calibrate(ModelKind::CIR, -1.0, ok), std::invalid_argument);
}
