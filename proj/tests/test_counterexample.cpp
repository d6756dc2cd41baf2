#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "minkowski/counterexample.hpp"
#include "minkowski/errors.hpp"
#include "minkowski/graph_geometry.hpp"
#include "minkowski/quadrature.hpp"

using namespace minkowski;

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double L(int l) { return static_cast<double>(l) * (l + 1); }

HarmonicSum small_sum() { return HarmonicSum({{2, 0.3}, {3, -0.2}, {5, 0.1}, {6, 0.05}}); }

} // namespace

TEST_CASE("construction parameters") {
    ConstructionParams p{7, 0.5};
    CHECK_NOTHROW(p.validate());
    CHECK(p.ell() == 128);
    CHECK(p.count() == 5);
    CHECK(p.degree(4) == 144);
    CHECK(p.coefficient() == doctest::Approx(-std::pow(128.0, -2.5)).epsilon(1e-15));
    CHECK_THROWS_AS((ConstructionParams{6, 0.5}.validate()), PreconditionError);
    CHECK_THROWS_AS((ConstructionParams{17, 0.5}.validate()), PreconditionError);
    CHECK_THROWS_AS((ConstructionParams{8, 0.0}.validate()), PreconditionError);
    CHECK_THROWS_AS((ConstructionParams{8, 1.0}.validate()), PreconditionError);
    CHECK_THROWS_AS(build_u({6, 0.5}), PreconditionError);
}

TEST_CASE("build_u") {
    const auto u = build_u({8, 0.25});
    REQUIRE(u.terms().size() == 9);
    for (std::size_t i = 0; i < u.terms().size(); ++i) {
        CHECK(u.terms()[i].degree == 256 + 4 * static_cast<int>(i));
        CHECK(u.terms()[i].coefficient == doctest::Approx(-std::pow(256.0, -2.25)).epsilon(1e-15));
    }
    CHECK(u.has_zero_mean());
    CHECK(u.max_degree() == 288);
    CHECK(u.evaluate(-1.0).value == doctest::Approx(9 * -std::pow(256.0, -2.25)).epsilon(1e-13));
}

TEST_CASE("harmonic sum merging and evaluation") {
    const HarmonicSum s({{4, 1.0}, {2, 0.5}, {4, -1.0}, {0, 0.0}, {2, 0.25}});
    const auto m = s.merged();
    REQUIRE(m.terms().size() == 1);
    CHECK(m.terms()[0].degree == 2);
    CHECK(m.terms()[0].coefficient == 0.75);
    CHECK(HarmonicSum({{0, 1.0}}).has_zero_mean() == false);
    CHECK_THROWS_AS(HarmonicSum({{-1, 1.0}}), PreconditionError);

    const auto u = small_sum();
    for (double t : {-0.9, -0.3, 0.2, 0.7}) {
        double direct = 0.0;
        for (const auto& term : u.terms())
            direct += term.coefficient * v_eval(term.degree, t);
        CHECK(u.evaluate(t).value == doctest::Approx(direct).epsilon(1e-14));
        const double h = 1e-6;
        CHECK(u.evaluate(t).d1 ==
              doctest::Approx((u.evaluate(t + h).value - u.evaluate(t - h).value) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("W12 norm against quadrature") {
    for (const auto& u : {small_sum(), build_u({7, 0.5})}) {
        const auto p = u.profile();
        const int n = nodes_for(2, u.max_degree());
        const double q = sphere_integrate(
            [&](double t) {
                const auto s = p(t);
                return s.value * s.value + axisym_grad_sq(s, t);
            },
            gauss_rule(n));
        CHECK(w12_norm(u) == doctest::Approx(std::sqrt(q)).epsilon(1e-12));
    }
    const auto single = HarmonicSum({{10, 1.0}});
    CHECK(w12_norm(single) == doctest::Approx(std::sqrt(kFourPi * (1 + 110.0) / 21.0)).epsilon(1e-14));
    CHECK(w12_norm(HarmonicSum{}) == 0.0);
}

TEST_CASE("C1 norm") {
    // A single zonal harmonic peaks at the poles with |v_l| = 1.
    const auto single = HarmonicSum({{6, 1.0}});
    CHECK(c1_norm(single) > 1.0);
    const auto u = build_u({7, 0.5});
    // Every term is -c at t = -1, so sup|u| is attained there.
    CHECK(c1_norm(u) > 5 * std::pow(128.0, -2.5));
    CHECK(c1_norm(HarmonicSum{}) == 0.0);
}

TEST_CASE("Laplacian moments") {
    const auto u = small_sum();
    double m2 = 0.0;
    for (const auto& t : u.terms())
        m2 += t.coefficient * t.coefficient * L(t.degree) * L(t.degree) * kFourPi / (2 * t.degree + 1);
    CHECK(delta_moment(u, 2) == doctest::Approx(m2).epsilon(1e-14));

    const auto p = u.profile();
    const double m4 = sphere_integrate([&](double t) { return std::pow(axisym_laplacian(p(t), t), 4); },
                                       gauss_rule(80));
    CHECK(delta_moment(u, 4) == doctest::Approx(m4).epsilon(1e-12));
    CHECK(delta_moment_lattice(u, 4) == doctest::Approx(m4).epsilon(1e-10));
    CHECK(delta_moment_lattice(u, 2) == doctest::Approx(m2).epsilon(1e-12));

    CHECK_THROWS_AS(delta_moment(u, 3), PreconditionError);
    CHECK_THROWS_AS(delta_moment(u, 0), PreconditionError);
    CHECK_THROWS_AS(delta_moment_lattice(build_u({7, 0.5}), 4, 10.0), BudgetExceeded);
}

TEST_CASE("cubic term of single harmonics") {
    CHECK(cubic_term_quadrature(HarmonicSum({{2, 1.0}})) == doctest::Approx(-36.0 / 35.0).epsilon(1e-13));
    CHECK(cubic_term_exact(HarmonicSum({{2, 1.0}})) == doctest::Approx(-36.0 / 35.0).epsilon(1e-13));
    CHECK(std::abs(cubic_term_quadrature(HarmonicSum({{3, 1.0}}))) < 1e-13);
    CHECK(cubic_term_exact(HarmonicSum({{3, 1.0}})) == 0.0);
    CHECK(cubic_term_exact(HarmonicSum{}) == 0.0);
}

TEST_CASE("cubic term: exact sum, bracket sum and quadrature") {
    const ConstructionParams p{7, 0.5};
    const double exact = cubic_term_exact(p);
    CHECK(exact > 0.0);
    CHECK(exact == doctest::Approx(cubic_term_quadrature(build_u(p))).epsilon(1e-8));
    const double bracket = cubic_bracket_sum_exact(p).get_d();
    CHECK(exact == doctest::Approx(0.5 * std::pow(128.0, -7.5) * bracket).epsilon(1e-12));

    const auto u = small_sum();
    CHECK(cubic_term_exact(u) == doctest::Approx(cubic_term_quadrature(u)).epsilon(1e-12));
}

TEST_CASE("cubic term is independent of the thread count") {
    const auto u = build_u({8, 0.5});
    const double one = cubic_term_exact(u, {1e7, 1});
    const double four = cubic_term_exact(u, {1e7, 4});
    CHECK(one == four);
    CHECK_THROWS_AS(cubic_term_exact(u, {10.0, 1}), BudgetExceeded);
}

TEST_CASE("triple product identity") {
    for (auto [a, b, c] : {std::tuple{2, 2, 2}, {3, 4, 5}, {6, 4, 4}, {10, 7, 5}}) {
        const double q = triple_product_quadrature(a, b, c);
        CHECK(triple_product_closed_form(a, b, c) == doctest::Approx(q).epsilon(1e-11));
    }
    CHECK(triple_product_closed_form(1, 2, 4) == 0.0);
}

TEST_CASE("bracket bound") {
    const auto b7 = check_bracket({7, 0.5});
    CHECK(b7.triples == 125);
    CHECK(b7.min_bracket == 2 * 128 * 129 - 144 * 145);
    CHECK(b7.bound == 8192);
    CHECK(b7.holds());
    const auto b8 = check_bracket({8, 0.5});
    CHECK(b8.triples == 729);
    CHECK(b8.min_bracket == 2 * 256 * 257 - 288 * 289);
    CHECK(b8.holds());
}

TEST_CASE("remainder ratio") {
    const double l = 256, a = 0.5;
    const double scale = std::pow(l, -3.0) + std::pow(l, -3.0);
    CHECK(remainder_ratio(1e-7, 4e-7, 0.5, 256, a) == doctest::Approx(3e-7 / scale).epsilon(1e-14));
    CHECK(remainder_ratio(1e-7, -2e-7, 0.5, 256, a) == 0.0);
}

TEST_CASE("analysis of the empty sum") {
    const auto row = analyze_sum(HarmonicSum{}, 7, 0.5);
    CHECK(row.deficit == 0.0);
    CHECK(row.cubic_exact == 0.0);
    CHECK(row.w12_norm == 0.0);
    CHECK(row.remainder_ratio_half == 0.0);
    CHECK_THROWS_AS(analyze_sum(HarmonicSum({{0, 0.1}, {4, 0.1}}), 7, 0.5), PreconditionError);
}

TEST_CASE("deficit analysis at k = 7") {
    const auto row = deficit_analysis({7, 0.5});
    CHECK(row.ell == 128);
    CHECK(row.cubic_exact > 0.0);
    REQUIRE(row.cubic_quadrature.has_value());
    CHECK(*row.cubic_quadrature == doctest::Approx(row.cubic_exact).epsilon(1e-8));
    CHECK(row.cubic_scaled == doctest::Approx(std::pow(128.0, 2.5) * kFourPi * row.cubic_exact).epsilon(1e-14));
    CHECK(row.cubic_scaled >= std::ldexp(1.0, -18));
    CHECK(row.kappa_estimate == doctest::Approx(0.5).epsilon(0.01));
    CHECK(row.area_defect > 0.0);
    CHECK(row.traceless_energy > 0.0);
    REQUIRE(row.delta_moments.size() == 2);
    CHECK(row.delta_moments[0].first == 2);
}

TEST_CASE("deficit is converged in the surface rule") {
    const auto u = build_u({10, 0.5});
    const auto p = u.profile();
    const int n = surface_rule_size(u.max_degree());
    const double base = surface_report(p, gauss_rule(n)).deficit;
    const double fine = surface_report(p, gauss_rule(2 * n)).deficit;
    CHECK(base == doctest::Approx(fine).epsilon(1e-10));
}

TEST_CASE("sweep serialization") {
    SweepRow r;
    r.k = 7;
    r.alpha = 0.5;
    r.ell = 128;
    r.delta_moments = {{2, 1.25}};
    r.cubic_exact = 0.5;
    std::ostringstream out;
    write_sweep_csv(out, {r});
    const std::string csv = out.str();
    CHECK(csv.substr(0, csv.find('\n')) ==
          "version,k,alpha,ell,w12_norm,c1_norm,delta_moment_2,cubic_exact,cubic_quadrature,cubic_scaled,"
          "area_defect,deficit,deficit_scaled,traceless_energy,remainder_ratio_half,remainder_ratio_one,"
          "kappa_estimate");
    CHECK(csv.substr(csv.find('\n') + 1) == "1,7,0.5,128,0,0,1.25,0.5,,0,0,0,0,0,0,0,0\n");

    const auto j = nlohmann::json::parse(sweep_to_json({r}));
    CHECK(j["version"] == kSweepSchemaVersion);
    CHECK(j["rows"][0]["delta_moment_2"].get<double>() == 1.25);
    CHECK(j["rows"][0]["cubic_quadrature"].is_null());
}
