#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "bubblelator/errors.hpp"
#include "bubblelator/limit_model.hpp"
#include "bubblelator/spectral.hpp"
#include "oracles.hpp"

using namespace bubblelator;

TEST_CASE("G at zero") {
    CHECK(G_at_zero(0.0, 0.0) == 1.0);
    CHECK(G_at_zero(0.0, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
    for (double beta : {0.5, 1.0, 3.0}) {
        for (double nu : {0.0, 0.5, 9.0}) {
            CHECK(G_at_zero(beta, nu) == doctest::Approx(oracle::G(beta, nu, 0.0).real()).epsilon(1e-12));
        }
    }
}

TEST_CASE("G agrees with closed forms and the reference quadrature") {
    for (double nu : {0.0, 0.5, 2.0, 9.0}) {
        for (cplx lam : {cplx(0.3, 0.0), cplx(0.0, 1.0), cplx(0.2, -4.0), cplx(-0.5, 2.0)}) {
            const cplx exact = std::tgamma(nu + 1.0) / std::pow(1.0 + lam, nu + 1.0);
            CHECK(std::abs(evaluate_G(0.0, nu, lam).value - exact) < 1e-11 * std::abs(exact) + 1e-14);
        }
    }
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> re(-0.5, 2.0), im(-8.0, 8.0), bet(0.0, 6.0), nus(0.0, 4.0);
    for (int i = 0; i < 20; ++i) {
        const double beta = bet(rng), nu = nus(rng);
        const cplx lam(re(rng), im(rng));
        const auto g = evaluate_G(beta, nu, lam);
        const cplx ref = oracle::G(beta, nu, lam);
        CAPTURE(beta);
        CAPTURE(nu);
        CAPTURE(lam);
        CHECK(std::abs(g.value - ref) < 1e-10 * G_at_zero(beta, nu));
    }
    CHECK_THROWS_AS(evaluate_G(1.0, 0.0, cplx(-1.5, 0.0)), ParameterError);
    CHECK_THROWS_AS(evaluate_G(-1.0, 0.0, cplx(0.0, 1.0)), ParameterError);
}

TEST_CASE("conjugate symmetry and modulus bounds") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> re(-0.5, 3.0), im(-20.0, 20.0), bet(0.0, 8.0), nus(0.0, 9.0);
    for (int i = 0; i < 20; ++i) {
        const double beta = bet(rng), nu = nus(rng);
        const cplx lam(re(rng), im(rng));
        const cplx a = evaluate_G(beta, nu, lam).value;
        const cplx b = evaluate_G(beta, nu, std::conj(lam)).value;
        CHECK(std::abs(a - std::conj(b)) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(a));
    }
    std::uniform_real_distribution<double> re_pos(0.0, 3.0);
    for (int i = 0; i < 20; ++i) {
        const double beta = bet(rng), nu = nus(rng);
        const cplx lam(re_pos(rng), im(rng));
        CHECK(G_at_zero(beta, nu) >= evaluate_G(beta, nu, lam).abs());
        CHECK(G_at_zero(beta, nu + 1.0) >= evaluate_G(beta, nu + 1.0, lam).abs());
    }
}

TEST_CASE("large imaginary argument behaves like 1/lambda") {
    // t^(2+beta) |G - 1/lambda| stays bounded and tends to Gamma(beta+1)
    for (double beta : {0.5, 1.0, 2.0, 3.0}) {
        double worst = 0.0, last = 0.0;
        for (double t = 10.0; t <= 100.0; t += 5.0) {
            const cplx lam(0.0, t);
            last = std::abs(evaluate_G(beta, 0.0, lam).value - 1.0 / lam) * std::pow(t, 2.0 + beta);
            worst = std::max(worst, last);
        }
        CAPTURE(beta);
        CHECK(worst < 3.0 * std::tgamma(beta + 1.0));
        CHECK(last == doctest::Approx(std::tgamma(beta + 1.0)).epsilon(0.02));
    }
}

TEST_CASE("beta = 0 crossings match the closed form") {
    for (double nu : {0.5, 1.0, 2.0, 9.0}) {
        auto scan = find_crossings(0.0, nu);
        const auto exact = beta0_exact(nu);
        REQUIRE(scan.points.size() == exact.size());
        std::sort(scan.points.begin(), scan.points.end(), [](auto& a, auto& b) { return a.t0 < b.t0; });
        for (std::size_t k = 0; k < exact.size(); ++k) {
            CHECK(std::abs(scan.points[k].t0 - exact[k].t0) < 1e-8);
            CHECK(std::abs(scan.points[k].eta0 - exact[k].eta0) < 1e-8);
            CHECK(std::abs(scan.points[k].kappa0 - exact[k].kappa0) < 1e-8);
        }
        CHECK(scan.points.front().primary);
    }
    CHECK(beta0_exact(0.0).empty());
    CHECK(beta0_exact(4.0).size() == 1);
    CHECK(beta0_exact(4.5).size() == 2);
}

TEST_CASE("no crossing without growth exponent") {
    for (double beta : {0.0, 0.5, 1.0}) {
        const auto scan = find_crossings(beta, 0.0);
        CHECK(scan.points.empty());
        CHECK_FALSE(scan.truncated);
    }
}

TEST_CASE("crossings respect the stability lemma") {
    for (double beta : {0.5, 2.0, 4.0}) {
        for (double nu : {0.5, 2.0}) {
            const double bound = std::pow(G_at_zero(beta, nu + 1.0) / G_at_zero(beta, nu), beta + 1.0);
            CrossingScanOptions opt;
            opt.t_max = 20.0;
            opt.grid_points = 1000;
            for (const auto& p : find_crossings(beta, nu, opt).points) CHECK(p.eta0 <= bound);
        }
    }
}

TEST_CASE("second-order coefficients") {
    const auto scan = find_crossings(2.0, 1.0);
    REQUIRE_FALSE(scan.points.empty());
    const auto p = hopf_coefficients(scan.points.front(), 2.0, 1.0);
    REQUIRE(p.coefficients);
    const auto& h = *p.coefficients;
    // crossing identity ghat0(1) = -i delta0
    CHECK(std::abs(h.ghat0_1 - cplx(0.0, -h.delta0)) < 1e-9 * h.delta0);
    CHECK(h.u0 == doctest::Approx(steady_state_u0(2.0, 1.0, p.eta0).u0));
    CHECK(p.status == BifurcationPoint::Status::complete);
    CHECK(h.eta2 < 0.0);
    CHECK(h.kappa2 < 0.0);
    CHECK(h.abs_L2 > 1e-3);
    CHECK(p.direction == oracle::crossing_direction(2.0, 1.0, p.t0, p.vartheta0));
}

TEST_CASE("odd beta asymptotic zeros") {
    const auto a = oddbeta_zero_asymptotics(3, 2);
    // t^(4/3) s_3 = 2 pi/3 + n pi
    CHECK(a.t[0] == doctest::Approx(std::pow(2.0 * std::numbers::pi / 3.0 * 8.0 / (3.0 * std::sqrt(3.0)), 0.75)).epsilon(1e-14));
    CHECK(a.t[0] == doctest::Approx(2.406301).epsilon(1e-6));
    CHECK(a.t[1] == doctest::Approx(4.784153).epsilon(1e-6));
    CHECK(a.s_beta == doctest::Approx(3.0 * std::sqrt(3.0) / 8.0).epsilon(1e-14));
    CHECK_THROWS_AS(oddbeta_zero_asymptotics(2, 3), ParameterError);
    CHECK_THROWS_AS(oddbeta_zero_asymptotics(1, 3), ParameterError);
}

TEST_CASE("beta = 3 cascade") {
    auto scan = find_crossings(3.0, 0.0);
    auto& pts = scan.points;
    REQUIRE(pts.size() >= 11);
    std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.t0 < b.t0; });
    const auto asym = oddbeta_zero_asymptotics(3, 11);
    double last_err = INFINITY;
    int last_dir = 0;
    for (int n = 0; n < 11; ++n) {
        const auto p = hopf_coefficients(pts[n], 3.0, 0.0);
        CHECK(p.direction != 0);
        CHECK(p.direction != last_dir);
        last_dir = p.direction;
        const double err = std::abs(asym.t[n] - p.t0) / p.t0;
        if (n == 0) CHECK(err < 0.05);
        if (n < 5) CHECK(err < last_err);
        last_err = err;
    }
    // direction at the first three crossings from root tracking
    for (int n = 0; n < 3; ++n) {
        const auto p = hopf_coefficients(pts[n], 3.0, 0.0);
        CHECK(p.direction == oracle::crossing_direction(3.0, 0.0, p.t0, p.vartheta0));
    }
}

TEST_CASE("small vartheta asymptotics") {
    const auto a = smalltheta_root_asymptotics(0.0, 0.0, 1e-6);
    CHECK(a.lambda.real() == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(a.stability_sign == -1);
    CHECK(smalltheta_root_asymptotics(2.0, 0.0, 1e-3).stability_sign == 1);
    const auto b = smalltheta_root_asymptotics(0.0, 0.0, 0.01);
    REQUIRE(b.nu_star);
    CHECK(*b.nu_star == doctest::Approx(2.0 * 0.1 / std::numbers::pi).epsilon(1e-12));
    CHECK_FALSE(smalltheta_root_asymptotics(2.0, 0.5, 0.01).nu_star);
    CHECK_THROWS_AS(smalltheta_root_asymptotics(0.0, 0.0, 0.0), ParameterError);
    // small-nu estimate against a Newton-refined root
    for (double th : {1e-3, 1e-4}) {
        const auto c = smalltheta_root_asymptotics(0.0, 0.05, th);
        const cplx root = oracle::track_root(0.0, 0.05, th, c.lambda);
        CHECK(std::abs(root - c.lambda) < 0.01 * std::abs(root));
        CHECK(c.stability_sign == (root.real() > 0.0 ? 1 : -1));
    }
}

TEST_CASE("sweep rows and deterministic merge") {
    const std::vector<double> betas{0.0, 1.5, 2.5};
    const std::vector<double> nus{1.0, 7.0 / 3.0};
    CrossingScanOptions opt;
    opt.t_max = 20.0;
    opt.grid_points = 1000;
    const auto serial = sweep(betas, nus, opt, 1);
    const auto parallel = sweep(betas, nus, opt, 3);
    const auto exact = beta0_exact(1.0);
    REQUIRE(serial.at(0, 0).point);
    CHECK(serial.at(0, 0).point->eta0 == doctest::Approx(exact[0].eta0).epsilon(1e-10));
    CHECK(serial.at(0, 0).point->kappa0 == doctest::Approx(exact[0].kappa0).epsilon(1e-10));
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
        REQUIRE(serial.cells[i].point.has_value() == parallel.cells[i].point.has_value());
        if (serial.cells[i].point) CHECK(serial.cells[i].point->eta0 == parallel.cells[i].point->eta0);
    }
    const auto empty = sweep({0.5}, {0.0}, opt, 1);
    CHECK_FALSE(empty.at(0, 0).point);
    CHECK(empty.log.size() == 1);
}

TEST_CASE("contour samples") {
    const auto s = contour_samples(1.0, 0.5, -0.5, 0.5, 3, -1.0, 1.0, 5);
    CHECK(s.size() == 15);
    CHECK(std::isnan(s[7].value.real()));  // lambda = 0
    CHECK(std::abs(s[0].value - evaluate_G(1.0, 0.5, cplx(-0.5, -1.0)).value / cplx(-0.5, -1.0)) < 1e-15);
}
