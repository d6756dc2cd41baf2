#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "minkowski/errors.hpp"
#include "minkowski/legendre_basis.hpp"
#include "minkowski/prime_factorial.hpp"
#include "minkowski/quadrature.hpp"
#include "minkowski/wigner.hpp"

using namespace minkowski;

namespace {

mpz_class fact(int n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

// (3j)^2 = (2g-2a)!(2g-2b)!(2g-2c)!/(2g+1)! * [g!/((g-a)!(g-b)!(g-c)!)]^2 with 2g = a+b+c.
Rational square_oracle(int a, int b, int c) {
    if ((a + b + c) % 2 || c < std::abs(a - b) || c > a + b)
        return 0;
    const int g = (a + b + c) / 2;
    mpz_class num = fact(2 * g - 2 * a) * fact(2 * g - 2 * b) * fact(2 * g - 2 * c);
    const mpz_class ratio = fact(g) / (fact(g - a) * fact(g - b) * fact(g - c));
    Rational r(num * ratio * ratio, fact(2 * g + 1));
    r.canonicalize();
    return r;
}

double triple_quadrature(int a, int b, int c) {
    const auto& rule = gauss_rule(nodes_for(3, std::max({a, b, c, 1})));
    return sphere_integrate([&](double t) { return v_eval(a, t) * v_eval(b, t) * v_eval(c, t); }, rule) /
           (4.0 * std::numbers::pi);
}

} // namespace

TEST_CASE("prime factorial helpers") {
    const auto p = primes_up_to(30);
    CHECK(std::vector<int>(p.begin(), p.end()) == std::vector<int>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
    CHECK(factorial_exponent(100, 2) == 97);
    CHECK(factorial_exponent(100, 5) == 24);
    CHECK(factorial(0) == 1);
    CHECK(factorial(20) == mpz_class("2432902008176640000"));
    CHECK(factorial(300) == fact(300));

    FactoredRational q(50);
    q.mul_factorial(10);
    q.mul_factorial(8, -1);
    q.mul_integer(6, -1);
    CHECK(q.to_rational() == Rational(15));
    CHECK(q.denominator() == 1);
}

TEST_CASE("3j examples") {
    CHECK(threej_zero(1, 1, 1).is_zero());
    CHECK(threej_zero(1, 1, 1).square == 0);
    const auto z = threej_zero(0, 0, 0);
    CHECK(z.sign == 1);
    CHECK(z.square == 1);
    const auto a = threej_zero(1, 1, 2);
    CHECK(a.square == Rational(2, 15));
    CHECK(a.sign == 1);
    CHECK(a.value == doctest::Approx(std::sqrt(2.0 / 15.0)));
    const auto b = threej_zero(2, 2, 2);
    CHECK(b.square == Rational(2, 35));
    CHECK(b.sign == -1);
    CHECK(b.value == doctest::Approx(-std::sqrt(2.0 / 35.0)));
    CHECK(threej_zero(0, 5, 5).square == Rational(1, 11));
}

TEST_CASE("3j exact squares match the factorial closed form") {
    for (int a = 0; a <= 22; ++a)
        for (int b = 0; b <= 22; ++b)
            for (int c = 0; c <= 22; ++c)
                REQUIRE(threej_zero(a, b, c).square == square_oracle(a, b, c));
}

TEST_CASE("3j parity, sign and symmetry") {
    for (int a = 0; a <= 30; ++a)
        for (int b = a; b <= 30; ++b)
            for (int c = b; c <= 30; ++c) {
                const auto base = threej_zero_uncached(a, b, c);
                const bool vanish = (a + b + c) % 2 || c > a + b;
                CHECK(base.is_zero() == vanish);
                if (!vanish)
                    CHECK(base.sign == (((a + b + c) / 2) % 2 ? -1 : 1));
                std::array<int, 3> p{a, b, c};
                while (std::next_permutation(p.begin(), p.end())) {
                    const auto o = threej_zero_uncached(p[0], p[1], p[2]);
                    CHECK(o.square == base.square);
                    CHECK(o.sign == base.sign);
                }
            }
}

TEST_CASE("3j squares match quadrature of triple products") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> d(0, 30);
    for (int i = 0; i < 200; ++i) {
        const int a = d(rng), b = d(rng), c = d(rng);
        const double q = triple_quadrature(a, b, c);
        const double exact = threej_zero(a, b, c).square.get_d();
        CHECK(std::abs(q - exact) <= 1e-13 + 1e-12 * exact);
    }
}

TEST_CASE("float 3j agrees with exact values") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> d(0, 1000);
    for (int i = 0; i < 100; ++i) {
        const int a = d(rng), b = d(rng);
        const int c = std::abs(a - b) + 2 * (d(rng) % (std::min(a, b) + 1));
        const auto e = threej_zero(a, b, c);
        CHECK(threej_square_float(a, b, c) == doctest::Approx(e.square.get_d()).epsilon(1e-12));
        CHECK(threej_float(a, b, c) == doctest::Approx(e.value).epsilon(1e-12));
    }
    CHECK(threej_square_float(3, 4, 6) == 0.0);
    CHECK(threej_square_float(1, 1, 5) == 0.0);
}

TEST_CASE("3j capacity and cache") {
    const auto saved = wigner_settings();
    configure_wigner({40, 1024});
    CHECK(threej_cache_size() == 0);
    threej_zero(10, 10, 10);
    CHECK(threej_cache_size() == 1);
    threej_zero(10, 10, 10);
    threej_zero(10, 10, 10);
    CHECK(threej_cache_size() == 1);
    CHECK_THROWS_AS(threej_zero(20, 20, 2), CapacityError);
    CHECK_THROWS_AS(threej_zero(-1, 2, 3), PreconditionError);
    configure_wigner(saved);
}

TEST_CASE("3j cache tolerates concurrent callers") {
    std::vector<std::thread> pool;
    std::vector<Rational> out(4 * 50);
    for (int w = 0; w < 4; ++w)
        pool.emplace_back([&, w] {
            for (int i = 0; i < 50; ++i)
                out[static_cast<std::size_t>(w * 50 + i)] = threej_zero(40 + i, 42, 40 + 2 * (i % 2)).square;
        });
    for (auto& t : pool)
        t.join();
    for (int i = 0; i < 50; ++i)
        for (int w = 1; w < 4; ++w)
            CHECK(out[static_cast<std::size_t>(w * 50 + i)] == out[static_cast<std::size_t>(i)]);
}

TEST_CASE("triangle range") {
    auto v = [](TriangleRange r) { return std::vector<int>(r.begin(), r.end()); };
    CHECK(v(triangle_range(1, 1)) == std::vector<int>{0, 1, 2});
    CHECK(v(triangle_range(0, 9)) == std::vector<int>{9});
    CHECK(v(triangle_range(5, 3)) == std::vector<int>{2, 3, 4, 5, 6, 7, 8});
    CHECK(triangle_range(5, 3).size() == 7);
    CHECK(threej_admissible(2, 2, 2));
    CHECK_FALSE(threej_admissible(1, 1, 1));
    CHECK_FALSE(threej_admissible(1, 1, 4));
}

TEST_CASE("gaunt expansion") {
    const auto e = gaunt_expand(1, 1);
    REQUIRE(e.size() == 2);
    CHECK(e[0] == std::pair<int, Rational>{0, Rational(1, 3)});
    CHECK(e[1] == std::pair<int, Rational>{2, Rational(2, 3)});
    const auto z = gaunt_expand(0, 7);
    REQUIRE(z.size() == 1);
    CHECK(z[0] == std::pair<int, Rational>{7, Rational(1)});

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> t(-1.0, 1.0);
    for (int a = 0; a <= 12; a += 3)
        for (int b = 0; b <= 12; b += 4) {
            const auto terms = gaunt_expand(a, b);
            Rational total = 0;
            for (const auto& [l, c] : terms)
                total += c;
            CHECK(total == 1);
            for (int i = 0; i < 50; ++i) {
                const double x = t(rng);
                double s = 0.0;
                for (const auto& [l, c] : terms)
                    s += c.get_d() * v_eval(l, x);
                CHECK(s == doctest::Approx(v_eval(a, x) * v_eval(b, x)).scale(1.0).epsilon(1e-13));
            }
        }
}

TEST_CASE("gaunt moments") {
    for (auto [a, b] : {std::pair{0, 0}, {1, 1}, {3, 8}, {17, 17}, {50, 120}, {200, 199}}) {
        const auto m = gaunt_moments(a, b);
        CHECK(m.normalization == 1);
        CHECK(m.weighted == weighted_sum_exact(a, b));
    }
}

TEST_CASE("m-fold product integrals") {
    for (int l = 0; l <= 15; ++l)
        CHECK(m_product_integral(std::array{l, l}) == Rational(1, 2 * l + 1));
    CHECK(m_product_integral(std::array{1, 1, 2}) == Rational(2, 15));
    CHECK(m_product_integral(std::array{1, 2, 4}) == 0);
    CHECK(m_product_integral(std::array{3, 5}) == 0);

    const auto& rule = gauss_rule(9);
    const double quad = sphere_integrate([](double t) { return std::pow(v_eval(2, t), 4); }, rule) / (4 * std::numbers::pi);
    CHECK(m_product_integral(std::array{2, 2, 2, 2}).get_d() == doctest::Approx(quad).epsilon(1e-12));

    const std::array<int, 4> d{3, 5, 4, 6};
    std::array<int, 4> p = d;
    std::sort(p.begin(), p.end());
    const auto ref = m_product_integral(d);
    do {
        CHECK(m_product_integral(p) == ref);
    } while (std::next_permutation(p.begin(), p.end()));
    CHECK(m_product_integral_float(d) == doctest::Approx(ref.get_d()).epsilon(1e-13));

    CHECK_THROWS_AS(m_product_integral(std::array{60, 60, 60, 60, 60, 60}, 1000.0), BudgetExceeded);
    CHECK_THROWS_AS(m_product_integral(std::array{4}), PreconditionError);
}

TEST_CASE("path lattice") {
    const PathLattice lat({2, 3, 1});
    long long visited = 0;
    lat.for_each([&](std::span<const int> z) {
        ++visited;
        CHECK(z[0] == 2);
        CHECK(triangle_range(z[0], 3).contains(z[1]));
        CHECK(triangle_range(z[1], 1).contains(z[2]));
    });
    CHECK(static_cast<double>(visited) == lat.size());
    CHECK(PathLattice({5, 2}).size() == 5.0);
}

TEST_CASE("a_k sequence") {
    CHECK(a_seq(1) == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-14));
    CHECK(a_seq_limit() == doctest::Approx(std::pow(2.0 / std::numbers::pi, 0.25)).epsilon(1e-15));
    CHECK(std::abs(a_seq(10000) - a_seq_limit()) <= 1e-4);
    for (long long k = 1; k < 200; ++k)
        CHECK(a_seq(k + 1) > a_seq(k));
}

TEST_CASE("scaled 3j") {
    const double floor = std::sqrt(2.0 / std::numbers::pi) - 0.05;
    for (int l : {256, 512, 1024})
        CHECK(scaled_threej(l, l, l) >= floor);
    CHECK(scaled_threej(4, 4, 4) == doctest::Approx(12.0 * std::sqrt(threej_zero(4, 4, 4).square.get_d())));
    double prev = 0.0;
    for (int j = 4; j <= 10; ++j) {
        const double v = scaled_threej(1 << j, 1 << j, 2 << j);
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(scaled_threej(2, 2, 2), PreconditionError);
    CHECK_THROWS_AS(scaled_threej(1, 1, 6), PreconditionError);
}

TEST_CASE("upper bound statistic") {
    CHECK(upper_bound_statistic(0, 0, 0) == doctest::Approx(1.0));
    CHECK(upper_bound_statistic(1, 1, 1) == 0.0);
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> d(0, 600);
    for (int i = 0; i < 500; ++i) {
        const int a = d(rng), b = d(rng);
        const int c = std::abs(a - b) + 2 * (d(rng) % (std::min(a, b) + 1));
        CHECK(upper_bound_statistic(a, b, c) <= 1.2);
    }
}

TEST_CASE("weighted sums") {
    for (int l = 0; l <= 40; ++l)
        CHECK(weighted_sum(0, l) == doctest::Approx(l / (2.0 * l + 1)).epsilon(1e-13));
    CHECK(weighted_sum_exact(1, 1) == Rational(4, 15));
    CHECK(weighted_sum(1, 1) == doctest::Approx(4.0 / 15.0));
    for (int l : {16, 64, 256})
        CHECK(weighted_sum(l, l) < 0.5);
    CHECK(weighted_sum(1024, 1024) / weighted_sum(64, 64) < 1.5);
}

TEST_CASE("3j csv dump") {
    std::ostringstream out;
    const std::array table{threej_zero(1, 1, 2), threej_zero(2, 2, 2)};
    write_threej_csv(out, table);
    CHECK(out.str() == "l1,l2,l3,sign,numerator,denominator\n1,1,2,1,2,15\n2,2,2,-1,2,35\n");
}
