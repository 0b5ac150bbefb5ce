#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "bubblelator/errors.hpp"
#include "bubblelator/model_params.hpp"
#include "oracles.hpp"

using namespace bubblelator;

namespace {
ModelParams make(double eps, const char* gamma, const char* alpha, double q = 1.0, const char* r = "2/3") {
    ParameterSet p;
    p.epsilon = eps;
    p.gamma = Fraction::parse(gamma);
    p.alpha = Fraction::parse(alpha);
    p.r = Fraction::parse(r);
    p.q = q;
    return ModelParams(p);
}
}  // namespace

TEST_CASE("fractions parse exactly") {
    CHECK(Fraction::parse("1/3").num() == 1);
    CHECK(Fraction::parse("1/3").den() == 3);
    CHECK(Fraction::parse("2/6").den() == 3);
    CHECK(Fraction::parse("0.25").den() == 4);
    CHECK(Fraction::parse("-7").num() == -7);
    CHECK(Fraction::parse(" 3 / 7 ").value() == 3.0 / 7.0);
    CHECK_FALSE(Fraction::parse("1e-3").is_exact());
    CHECK(Fraction::parse("1e-3").value() == 1e-3);
    CHECK_THROWS_AS(Fraction::parse("1/0"), ParameterError);
    CHECK_THROWS_AS(Fraction::parse("abc"), ParameterError);
    CHECK_THROWS_AS(Fraction::parse(""), ParameterError);
    CHECK((Fraction(1, 3) + Fraction(1, 6)).str() == "1/2");
    CHECK((Fraction(2, 3) / (Fraction(1) - Fraction(1, 3))).str() == "1");
}

TEST_CASE("exponent map is exact for rational input") {
    const ModelParams p = make(0.1, "1/3", "1/3");
    CHECK(p.beta_exact().str() == "1");
    CHECK(p.nu_exact().str() == "1/2");
    CHECK(p.beta() == 1.0);
    CHECK(p.nu() == 0.5);
}

TEST_CASE("exponent map is a bijection") {
    for (const char* a : {"0", "1/9", "1/3", "1/2", "2/3", "9/10"}) {
        for (const char* r : {"0", "1/4", "2/3", "1", "5/2"}) {
            const ModelParams p = make(0.1, "1/3", a, 1.0, r);
            const auto back = exponents_from_beta_nu(p.beta(), p.nu());
            CHECK(back.alpha == doctest::Approx(p.alpha()).epsilon(1e-15));
            CHECK(back.r == doctest::Approx(p.r()).epsilon(1e-15));
        }
    }
}

TEST_CASE("parameter validation") {
    ParameterSet p;
    p.alpha = Fraction(1);
    CHECK_THROWS_AS(ModelParams{p}, ParameterError);
    p = {};
    p.gamma = Fraction(0);
    CHECK_THROWS_AS(ModelParams{p}, ParameterError);
    p = {};
    p.gamma = Fraction(1);
    CHECK_THROWS_AS(ModelParams{p}, ParameterError);
    p = {};
    p.q = 0.0;
    CHECK_THROWS_AS(ModelParams{p}, ParameterError);
    p = {};
    p.set("eta", "0");
    CHECK_THROWS_AS(ModelParams{p}, ParameterError);
    CHECK_THROWS_AS(p.set("colour", "1"), ParameterError);
}

TEST_CASE("config text with comments and overrides") {
    const auto p = parse_parameter_text("# oscillating case\nalpha = 1/3\n r=2/3 # removal exponent\n\neta = 0.05\n");
    CHECK(p.alpha.str() == "1/3");
    CHECK(p.r.str() == "2/3");
    CHECK(p.eta == 0.05);
    CHECK_THROWS_AS(parse_parameter_text("alpha 1/3\n"), ParameterError);

    const auto path = std::filesystem::temp_directory_path() / "bubblelator_params_test.cfg";
    std::ofstream(path) << "gamma = 1/2\nq = 2\n";
    const auto loaded = load_parameter_file(path);
    CHECK(loaded.gamma.str() == "1/2");
    CHECK(loaded.q == 2.0);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_parameter_file("/nonexistent/params.cfg"), std::ios_base::failure);
}

TEST_CASE("critical size and scales") {
    const ModelParams p = make(0.1, "1/3", "1/3");
    const auto s = compute_scales(p);
    CHECK(s.k_crit == 1000.0);
    CHECK(s.X.log10() >= 12.0);
    CHECK(s.X.log10() <= 12.5);
    CHECK(s.T.log10() >= 9.0);
    CHECK(s.T.log10() <= 9.5);
    // regression values
    CHECK(s.X.nominal() == doctest::Approx(1.6271395224765e12).epsilon(1e-12));
    CHECK(s.T.nominal() == doctest::Approx(1.3834066617560e9).epsilon(1e-12));
    CHECK(s.J_inf.log == doctest::Approx(-56.073414863526819).epsilon(1e-13));

    const auto o = oracle::scales(0.1, 1.0 / 3.0, 1.0 / 3.0, 1.0, p.eta(), p.r());
    for (auto [mine, ref] : {std::pair{s.J_inf.log, o.J_inf}, {s.X.log, o.X}, {s.T.log, o.T}, {s.F.log, o.F},
                             {s.S.log, o.S}, {s.R.log, o.R}}) {
        CHECK(mine == doctest::Approx(std::log(ref)).epsilon(1e-12));
    }
    // the five scale relations
    const double lk = std::log(s.k_crit);
    CHECK(s.T.log == doctest::Approx((1.0 - p.alpha()) * s.X.log - std::log(0.1)).epsilon(1e-12));
    CHECK(s.S.log == doctest::Approx(-s.T.log - lk).epsilon(1e-12));
    CHECK(s.R.log == doctest::Approx(std::log(p.eta()) - s.T.log - p.r() * s.X.log).epsilon(1e-12));
    CHECK(s.F.log == doctest::Approx(-lk - 2.0 * s.X.log).epsilon(1e-12));
    CHECK(std::log(0.1) == doctest::Approx(lk + s.J_inf.log + (2.0 - p.alpha()) * s.X.log).epsilon(1e-12));
}

TEST_CASE("scales stay finite in log space when nominal values overflow") {
    const auto s = compute_scales(make(0.01, "1/3", "1/3"));
    CHECK(std::isfinite(s.X.log));
    CHECK(s.X.log > 709.0);
    CHECK(std::isinf(s.X.nominal()));
}

TEST_CASE("scales shrink as epsilon grows") {
    double last_x = INFINITY, last_t = INFINITY, last_j = -INFINITY;
    for (double eps : {0.05, 0.1, 0.2, 0.4}) {
        const auto s = compute_scales(make(eps, "1/3", "1/3"));
        CHECK(s.X.log < last_x);
        CHECK(s.T.log < last_t);
        CHECK(s.J_inf.log > last_j);
        last_x = s.X.log;
        last_t = s.T.log;
        last_j = s.J_inf.log;
    }
    CHECK_THROWS_AS(compute_scales(make(1.0, "1/3", "1/3")), ParameterError);
}

TEST_CASE("monomer rescaling") {
    const ModelParams p = make(0.1, "1/3", "1/3");
    CHECK(monomer_rescale(1.1, p) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(monomer_rescale(1.101, p) == doctest::Approx(1.0).epsilon(1e-12));
    const double u = monomer_rescale(monomer_unscale(-5.0, p), p);
    CHECK(std::abs(u + 5.0) / 5.0 < 1e-14);
}
