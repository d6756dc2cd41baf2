#include "minkowski/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "minkowski/errors.hpp"
#include "minkowski/graph_geometry.hpp"
#include "minkowski/quadrature.hpp"
#include "minkowski/wigner.hpp"

namespace minkowski {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * kPi;

constexpr const char* kGraphIdentities = "graph identities";
constexpr const char* kExpansion = "area and mean curvature expansion";
constexpr const char* kConstruction = "construction of the family";
constexpr const char* kW12 = "W12 norm scaling";
constexpr const char* kC1 = "C1 norm scaling";
constexpr const char* kMoments = "Laplacian moment scaling";
constexpr const char* kCubic = "cubic term positivity";
constexpr const char* kRemainder = "remainder decomposition";
constexpr const char* kZonal = "generating function and zonal harmonics";
constexpr const char* kInner = "zonal inner products";
constexpr const char* kTriple = "triple product identity";
constexpr const char* kPointwise = "pointwise bounds";
constexpr const char* kTriangle = "triangle ranges";
constexpr const char* kClosedForm = "3j closed form";
constexpr const char* kProduct = "product expansion";
constexpr const char* kMProduct = "m-fold product integrals";
constexpr const char* kLower = "3j lower bound";
constexpr const char* kUpper = "3j upper bound";
constexpr const char* kWeighted = "weighted 3j sum";
constexpr const char* kGaussBonnet = "Gauss-Bonnet identity";
constexpr const char* kQuadrature = "quadrature";
constexpr const char* kDeficit = "Minkowski deficit";
constexpr const char* kTrace = "traceability";

constexpr std::array<const char*, 20> kClaims = {
    kGraphIdentities, kExpansion, kConstruction, kW12,      kC1,         kMoments, kCubic,
    kRemainder,       kZonal,     kInner,        kTriple,   kPointwise,  kTriangle, kClosedForm,
    kProduct,         kMProduct,  kLower,        kUpper,    kWeighted,   kGaussBonnet,
};

constexpr CheckSpec kRegistry[] = {
    {"basis.quadrature_weights", "basis", kQuadrature, true},
    {"basis.quadrature_exactness", "basis", kQuadrature, true},
    {"basis.divergence", "basis", kQuadrature, true},
    {"basis.legendre_values", "basis", kZonal, true},
    {"basis.generating_function", "basis", kZonal, true},
    {"basis.eigenrelation", "basis", kZonal, true},
    {"basis.orthogonality", "basis", kInner, true},
    {"basis.gradient_inner_product", "basis", kInner, true},
    {"basis.laplacian_inner_product", "basis", kInner, true},
    {"basis.pointwise_c0", "basis", kPointwise, true},
    {"basis.pointwise_c1", "basis", kPointwise, true},
    {"basis.integration_by_parts", "basis", kExpansion, true},
    {"basis.hessian_finite_difference", "basis", kExpansion, true},

    {"wigner.closed_form_values", "wigner", kClosedForm, true},
    {"wigner.parity", "wigner", kClosedForm, true},
    {"wigner.permutation_symmetry", "wigner", kClosedForm, true},
    {"wigner.float_agreement", "wigner", kClosedForm, true},
    {"wigner.triangle_range", "wigner", kTriangle, true},
    {"wigner.gaunt_normalization", "wigner", kProduct, true},
    {"wigner.gaunt_pointwise", "wigner", kProduct, true},
    {"wigner.triple_product_oracle", "wigner", kMProduct, true},
    {"wigner.m_product_values", "wigner", kMProduct, true},
    {"wigner.a_seq", "wigner", kLower, true},
    {"wigner.scaled_lower_bound", "wigner", kLower, true},
    {"wigner.scaled_degenerate_growth", "wigner", kLower, true},
    {"wigner.lower_bound_threshold", "wigner", kLower, false},
    {"wigner.upper_bound_statistic", "wigner", kUpper, true},
    {"wigner.upper_bound_plateau", "wigner", kUpper, true},
    {"wigner.weighted_sum_values", "wigner", kWeighted, true},
    {"wigner.weighted_sum_bound", "wigner", kWeighted, true},
    {"wigner.weighted_sum_growth", "wigner", kWeighted, true},

    {"geometry.forms_inverse", "geometry", kGraphIdentities, true},
    {"geometry.area_element", "geometry", kGraphIdentities, true},
    {"geometry.normal_embedding", "geometry", kGraphIdentities, true},
    {"geometry.second_form_embedding", "geometry", kGraphIdentities, true},
    {"geometry.mean_curvature_paths", "geometry", kExpansion, true},
    {"geometry.taylor_area", "geometry", kExpansion, true},
    {"geometry.taylor_mean_h", "geometry", kExpansion, true},
    {"geometry.round_spheres", "geometry", kDeficit, true},
    {"geometry.umbilic", "geometry", kDeficit, true},
    {"geometry.dilation", "geometry", kDeficit, true},
    {"geometry.graph_condition", "geometry", kDeficit, true},
    {"geometry.gauss_bonnet", "geometry", kGaussBonnet, true},
    {"geometry.schur_identity", "geometry", kGaussBonnet, true},
    {"geometry.triple_product_identity", "geometry", kTriple, true},
    {"geometry.cubic_single_term", "geometry", kTriple, true},
    {"geometry.bracket", "geometry", kCubic, true},
    {"geometry.construction", "geometry", kConstruction, true},
    {"geometry.w12_closed_form", "geometry", kW12, true},
    {"geometry.c1_single_term", "geometry", kC1, true},
    {"geometry.delta_moment_closed_form", "geometry", kMoments, true},
    {"geometry.delta_moment_dual", "geometry", kMoments, true},

    {"sweep.row", "sweep", kRemainder, true},
    {"sweep.cubic_positive", "sweep", kCubic, true},
    {"sweep.cubic_dual_oracle", "sweep", kCubic, true},
    {"sweep.cubic_scaled_floor", "sweep", kCubic, true},
    {"sweep.w12_slope", "sweep", kW12, true},
    {"sweep.c1_slope", "sweep", kC1, true},
    {"sweep.delta_moment_slope", "sweep", kMoments, true},
    {"sweep.traceless_decreasing", "sweep", kRemainder, true},
    {"sweep.remainder_ratio_bounded", "sweep", kRemainder, true},
    {"sweep.remainder_ratio_trend", "sweep", kRemainder, false},
    {"sweep.kappa_selection", "sweep", kRemainder, false},
    {"sweep.deficit_trend", "sweep", kRemainder, false},
    {"sweep.zero_sentinel", "sweep", kRemainder, true},

    {"report.w12_slope", "report", kW12, true},
    {"report.c1_slope", "report", kC1, true},
    {"report.delta_moment_slope", "report", kMoments, true},
    {"report.cubic_scaled_slope", "report", kCubic, false},
    {"report.deficit_scaled", "report", kRemainder, false},
    {"report.traceability", "report", kTrace, true},
};

const CheckSpec& lookup(const std::string& id) {
    for (const auto& c : kRegistry)
        if (id == c.id)
            return c;
    throw std::logic_error("unregistered check id " + id);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string brief(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Outcome of one check body.
struct Check {
    double measured = 0.0;
    std::string expected;
    double tolerance = 0.0;
    bool ok = true;

    void at_most(double value, double bound) {
        measured = value;
        tolerance = bound;
        expected = "<= " + brief(bound);
        ok = value <= bound;
    }
    void at_least(double value, double bound) {
        measured = value;
        tolerance = bound;
        expected = ">= " + brief(bound);
        ok = value >= bound;
    }
};

class Recorder {
public:
    Recorder(std::string suite, double scale) : suite_(std::move(suite)), scale_(scale) {}

    double tol(double base) const { return base * scale_; }

    /// Runs body, timing it; exceptions become failed records.
    void run(const std::string& id, const std::function<void(Check&)>& body) {
        const auto& spec = lookup(id);
        if (suite_ != spec.suite)
            throw std::logic_error("check " + id + " emitted from suite " + suite_);
        const auto start = std::chrono::steady_clock::now();
        Check c;
        OutputRecord r;
        try {
            body(c);
            r.status = !spec.gated ? CheckStatus::Info : (c.ok ? CheckStatus::Pass : CheckStatus::Fail);
            r.expected = c.expected;
        } catch (const std::exception& e) {
            r.status = CheckStatus::Fail;
            r.expected = std::string("error: ") + e.what();
        }
        r.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        r.suite = suite_;
        r.check_id = id;
        r.claim = spec.claim;
        r.measured = c.measured;
        r.tolerance = c.tolerance;
        r.gated = spec.gated;
        records_.push_back(std::move(r));
    }

    std::vector<OutputRecord> take() { return std::move(records_); }

private:
    std::string suite_;
    double scale_;
    std::vector<OutputRecord> records_;
};

std::uint64_t salted(std::uint64_t seed, std::uint32_t salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), salt};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

/// Random band-limited sum with degrees 1..max_degree and sum |c| = amplitude.
HarmonicSum random_sum(std::mt19937_64& rng, int max_degree, double amplitude) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::vector<HarmonicTerm> terms;
    double total = 0.0;
    for (int d = 1; d <= max_degree; ++d) {
        const double c = coeff(rng);
        terms.push_back({d, c});
        total += std::abs(c);
    }
    for (auto& t : terms)
        t.coefficient *= amplitude / total;
    return HarmonicSum(std::move(terms), "random");
}

// ---------------------------------------------------------------- basis

SuiteResult basis_suite(const RunConfig& config) {
    Recorder rec("basis", config.tolerance("basis"));
    std::mt19937_64 rng(salted(config.seed, 1));

    rec.run("basis.quadrature_weights", [&](Check& c) {
        double worst = 0.0;
        for (int n : {1, 2, 8, 64, 513, 2048}) {
            CompensatedSum s;
            for (double w : gauss_rule(n).weights())
                s.add(w);
            worst = std::max(worst, std::abs(s.value() - 2.0));
        }
        c.at_most(worst, rec.tol(1e-14));
    });

    rec.run("basis.quadrature_exactness", [&](Check& c) {
        double worst = 0.0;
        for (int n : {5, 20, 40}) {
            const auto& rule = gauss_rule(n);
            for (int d = 0; d <= rule.exact_degree(); ++d) {
                CompensatedSum s;
                for (std::size_t j = 0; j < rule.size(); ++j)
                    s.add(rule.weights()[j] * std::pow(rule.nodes()[j], d));
                const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
                worst = std::max(worst, std::abs(s.value() - exact));
            }
        }
        c.at_most(worst, rec.tol(1e-14));
    });

    rec.run("basis.legendre_values", [&](Check& c) {
        double worst = 0.0;
        const auto p0 = legendre_eval(0, 0.37);
        worst = std::max({worst, std::abs(p0.value - 1.0), std::abs(p0.d1), std::abs(p0.d2)});
        worst = std::max(worst, std::abs(legendre_eval(5, 1.0).value - 1.0));
        worst = std::max(worst, std::abs(legendre_eval(2, 0.5).value + 0.125));
        worst = std::max(worst, std::abs(v_eval(3, -1.0) - 1.0));
        worst = std::max(worst, std::abs(v_eval(1, 0.25) + 0.25));
        for (int l = 0; l <= 200; ++l)
            worst = std::max(worst, std::abs(legendre_eval(l, 1.0).value - 1.0));
        c.at_most(worst, rec.tol(1e-14));
    });

    rec.run("basis.generating_function", [&](Check& c) {
        constexpr double tau = 0.4;
        double worst = 0.0;
        for (double s : {-0.9, -0.5, 0.0, 0.3, 0.7, 0.95}) {
            LegendreTable table;
            table.fill(120, s);
            CompensatedSum series;
            double power = 1.0;
            for (int l = 0; l <= 120; ++l, power *= tau)
                series.add(table.p[static_cast<std::size_t>(l)] * power);
            const double closed = 1.0 / std::sqrt(1.0 - 2.0 * s * tau + tau * tau);
            worst = std::max(worst, std::abs(series.value() - closed));
        }
        c.at_most(worst, rec.tol(1e-14));
    });

    rec.run("basis.eigenrelation", [&](Check& c) {
        double worst = 0.0;
        constexpr int grid = 2048;
        for (int l = 0; l <= 64; ++l) {
            const auto v = RadialProfile::zonal(l);
            const double lam = l * (l + 1.0);
            double m = 0.0;
            for (int i = 0; i < grid; ++i) {
                const double t = -1.0 + 2.0 * i / (grid - 1);
                m = std::max(m, std::abs(axisym_laplacian(v, t) + lam * v(t).value));
            }
            worst = std::max(worst, m / std::max(1.0, static_cast<double>(l) * l));
        }
        c.at_most(worst, rec.tol(1e-8));
    });

    constexpr int kMaxInner = 48;
    const auto& inner_rule = gauss_rule(nodes_for(2, kMaxInner));
    std::vector<std::vector<ProfileSample>> samples(kMaxInner + 1);
    for (int a = 0; a <= kMaxInner; ++a) {
        const auto v = RadialProfile::zonal(a);
        for (double t : inner_rule.nodes())
            samples[static_cast<std::size_t>(a)].push_back(v(t));
    }
    auto inner = [&](int a, int b, auto&& f) {
        const auto& sa = samples[static_cast<std::size_t>(a)];
        const auto& sb = samples[static_cast<std::size_t>(b)];
        CompensatedSum s;
        for (std::size_t j = 0; j < inner_rule.size(); ++j)
            s.add(inner_rule.weights()[j] * f(sa[j], sb[j], inner_rule.nodes()[j]));
        return 2.0 * kPi * s.value() / kFourPi;
    };

    rec.run("basis.orthogonality", [&](Check& c) {
        double worst = 0.0;
        for (int a = 0; a <= kMaxInner; ++a)
            for (int b = 0; b <= kMaxInner; ++b) {
                const double got = inner(a, b, [](auto& x, auto& y, double) { return x.value * y.value; });
                const double expect = a == b ? 1.0 / (2 * a + 1) : 0.0;
                worst = std::max(worst, std::abs(got - expect));
            }
        c.at_most(worst, rec.tol(1e-11));
    });

    rec.run("basis.gradient_inner_product", [&](Check& c) {
        double worst = 0.0;
        for (int a = 0; a <= kMaxInner; ++a)
            for (int b = 0; b <= kMaxInner; ++b) {
                const double got =
                    inner(a, b, [](auto& x, auto& y, double t) { return (1.0 - t * t) * x.d1 * y.d1; });
                const double expect = a == b ? a * (a + 1.0) / (2 * a + 1) : 0.0;
                worst = std::max(worst, std::abs(got - expect) / (1.0 + expect));
            }
        c.at_most(worst, rec.tol(1e-11));
    });

    rec.run("basis.laplacian_inner_product", [&](Check& c) {
        double worst = 0.0;
        for (int a = 0; a <= kMaxInner; ++a) {
            const double got = inner(a, a, [](auto& x, auto& y, double t) {
                return axisym_laplacian(x, t) * axisym_laplacian(y, t);
            });
            const double lam = a * (a + 1.0);
            const double expect = lam * lam / (2 * a + 1);
            worst = std::max(worst, std::abs(got - expect) / (1.0 + expect));
        }
        c.at_most(worst, rec.tol(1e-11));
    });

    std::vector<std::pair<int, SupNorms>> sups;
    for (int l = 64; l <= 1024; l *= 2)
        sups.emplace_back(l, sup_norms(RadialProfile::zonal(l), l));

    rec.run("basis.pointwise_c0", [&](Check& c) {
        double worst = 0.0;
        for (const auto& [l, s] : sups)
            worst = std::max(worst, s.c0);
        c.at_most(worst, 1.0 + rec.tol(1e-12));
    });

    rec.run("basis.pointwise_c1", [&](Check& c) {
        double constant = 0.0;
        for (const auto& [l, s] : sups)
            constant = std::max(constant, s.grad / l);
        c.at_most(constant, 1.1);
    });

    std::vector<HarmonicSum> profiles;
    for (int i = 0; i < 50; ++i) {
        std::uniform_int_distribution<int> deg(2, 16);
        profiles.push_back(random_sum(rng, deg(rng), 1.0));
    }

    rec.run("basis.divergence", [&](Check& c) {
        double worst = 0.0;
        for (const auto& u : profiles) {
            const auto& rule = gauss_rule(nodes_for(1, u.max_degree()));
            double scale = 0.0;
            const double total = sphere_integrate(
                [&](double t) {
                    const double lap = axisym_laplacian(u.evaluate(t), t);
                    scale = std::max(scale, std::abs(lap));
                    return lap;
                },
                rule);
            worst = std::max(worst, std::abs(total) / (kFourPi * scale));
        }
        c.at_most(worst, rec.tol(1e-12));
    });

    rec.run("basis.integration_by_parts", [&](Check& c) {
        double worst = 0.0;
        for (const auto& u : profiles) {
            const auto& rule = gauss_rule(nodes_for(3, u.max_degree()));
            const double lhs = sphere_integrate([&](double t) { return hessian_cubic(u.evaluate(t), t); }, rule);
            double mag = 0.0;
            const double rhs = -0.5 * sphere_integrate(
                                          [&](double t) {
                                              const auto s = u.evaluate(t);
                                              const double v = axisym_grad_sq(s, t) * axisym_laplacian(s, t);
                                              mag += std::abs(v);
                                              return v;
                                          },
                                          rule);
            const double scale = std::max(std::abs(rhs), kFourPi * mag / static_cast<double>(rule.size()));
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
        c.at_most(worst, rec.tol(1e-8));
    });

    rec.run("basis.hessian_finite_difference", [&](Check& c) {
        const auto v2 = RadialProfile::zonal(2);
        constexpr double t0 = 0.5, h = 1e-5;
        auto grad_sq = [&](double t) { return axisym_grad_sq(v2, t); };
        const double dgrad = (grad_sq(t0 + h) - grad_sq(t0 - h)) / (2.0 * h);
        const double fd = 0.5 * (1.0 - t0 * t0) * v2(t0).d1 * dgrad;
        c.at_most(rel_err(hessian_cubic(v2, t0), fd), rec.tol(1e-7));
    });

    return {rec.take(), {}};
}

// ---------------------------------------------------------------- wigner

SuiteResult wigner_suite(const RunConfig& config) {
    Recorder rec("wigner", config.tolerance("wigner"));
    std::mt19937_64 rng(salted(config.seed, 2));
    const double path_cap = config.budget("path_cap");

    rec.run("wigner.closed_form_values", [&](Check& c) {
        int bad = 0;
        const auto a = threej_zero(1, 1, 2);
        bad += !(a.square == Rational(2, 15) && a.sign == 1);
        const auto b = threej_zero(2, 2, 2);
        bad += !(b.square == Rational(2, 35) && b.sign == -1);
        const auto z = threej_zero(0, 0, 0);
        bad += !(z.square == 1 && z.sign == 1);
        bad += !threej_zero(1, 1, 1).is_zero();
        c.at_most(bad, 0);
    });

    rec.run("wigner.parity", [&](Check& c) {
        long long bad = 0;
        for (int l1 = 0; l1 <= 90; ++l1)
            for (int l2 = 0; l1 + l2 <= 90; ++l2)
                for (int l3 = 0; l1 + l2 + l3 <= 90; ++l3) {
                    const auto tj = threej_zero(l1, l2, l3);
                    const int sum = l1 + l2 + l3;
                    const bool triangle = std::abs(l1 - l2) <= l3 && l3 <= l1 + l2;
                    const bool should_vanish = sum % 2 != 0 || !triangle;
                    if (tj.is_zero() != should_vanish)
                        ++bad;
                    else if (!should_vanish && tj.sign != ((sum / 2) % 2 ? -1 : 1))
                        ++bad;
                }
        c.at_most(static_cast<double>(bad), 0);
    });

    rec.run("wigner.permutation_symmetry", [&](Check& c) {
        long long bad = 0;
        for (int l1 = 0; l1 <= 30; ++l1)
            for (int l2 = l1; l2 <= 30; ++l2)
                for (int l3 = l2; l3 <= 30; ++l3) {
                    const auto base = threej_zero_uncached(l1, l2, l3);
                    std::array<int, 3> p{l1, l2, l3};
                    while (std::next_permutation(p.begin(), p.end())) {
                        const auto other = threej_zero_uncached(p[0], p[1], p[2]);
                        if (other.square != base.square || other.sign != base.sign)
                            ++bad;
                    }
                }
        c.at_most(static_cast<double>(bad), 0);
    });

    rec.run("wigner.float_agreement", [&](Check& c) {
        double worst = 0.0;
        std::uniform_int_distribution<int> deg(0, 1000);
        for (int i = 0; i < 400; ++i) {
            const int l1 = deg(rng), l2 = deg(rng);
            const auto range = triangle_range(l1, l2);
            std::uniform_int_distribution<int> pick(range.lo(), range.hi());
            int l3 = pick(rng);
            if ((l1 + l2 + l3) % 2)
                l3 = l3 < range.hi() ? l3 + 1 : l3 - 1;
            const auto exact = threej_zero(l1, l2, l3);
            worst = std::max(worst, rel_err(threej_square_float(l1, l2, l3), exact.square.get_d()));
            worst = std::max(worst, rel_err(threej_float(l1, l2, l3), exact.value));
        }
        c.at_most(worst, rec.tol(1e-12));
    });

    rec.run("wigner.triangle_range", [&](Check& c) {
        int bad = 0;
        auto as_vector = [](const TriangleRange& r) { return std::vector<int>(r.begin(), r.end()); };
        bad += as_vector(triangle_range(1, 1)) != std::vector<int>{0, 1, 2};
        bad += as_vector(triangle_range(0, 7)) != std::vector<int>{7};
        bad += as_vector(triangle_range(5, 3)) != std::vector<int>{2, 3, 4, 5, 6, 7, 8};
        for (int a = 0; a <= 20; ++a)
            for (int b = 0; b <= 20; ++b)
                for (int l = 0; l <= 45; ++l) {
                    const bool tri = std::abs(a - b) <= l && l <= a + b;
                    bad += triangle_range(a, b).contains(l) != tri;
                }
        c.at_most(bad, 0);
    });

    rec.run("wigner.gaunt_normalization", [&](Check& c) {
        long long bad = 0;
        for (int l1 = 0; l1 <= 200; ++l1)
            for (int l2 = l1; l2 <= 200; ++l2)
                if (gaunt_moments(l1, l2).normalization != 1)
                    ++bad;
        c.measured = static_cast<double>(bad);
        c.expected = "exactly 1 for all l1, l2 <= 200";
        c.ok = bad == 0;
    });

    rec.run("wigner.gaunt_pointwise", [&](Check& c) {
        double worst = 0.0;
        const auto v11 = gaunt_expand(1, 1);
        if (!(v11.size() == 2 && v11[0] == std::pair<int, Rational>{0, Rational(1, 3)} &&
              v11[1] == std::pair<int, Rational>{2, Rational(2, 3)}))
            worst = 1.0;
        std::uniform_int_distribution<int> deg(0, 24);
        std::uniform_real_distribution<double> point(-1.0, 1.0);
        for (int i = 0; i < 30; ++i) {
            const int l1 = deg(rng), l2 = deg(rng);
            const auto terms = gaunt_expand(l1, l2);
            Rational total = 0;
            for (const auto& [l, coef] : terms)
                total += coef;
            if (total != 1)
                worst = 1.0;
            for (int j = 0; j < 50; ++j) {
                const double t = point(rng);
                double sum = 0.0;
                for (const auto& [l, coef] : terms)
                    sum += coef.get_d() * v_eval(l, t);
                worst = std::max(worst, std::abs(sum - v_eval(l1, t) * v_eval(l2, t)));
            }
        }
        c.at_most(worst, rec.tol(1e-13));
    });

    rec.run("wigner.triple_product_oracle", [&](Check& c) {
        double worst = 0.0;
        const auto& rule = gauss_rule(nodes_for(3, 40));
        std::vector<std::vector<double>> v(41);
        for (int l = 0; l <= 40; ++l)
            for (double t : rule.nodes())
                v[static_cast<std::size_t>(l)].push_back(v_eval(l, t));
        for (int l1 = 0; l1 <= 40; ++l1)
            for (int l2 = l1; l2 <= 40; ++l2)
                for (int l3 = l2; l3 <= std::min(40, l1 + l2); l3 += 1) {
                    if ((l1 + l2 + l3) % 2)
                        continue;
                    const std::array<int, 3> d{l1, l2, l3};
                    const double exact = m_product_integral(d, path_cap).get_d();
                    CompensatedSum s;
                    for (std::size_t j = 0; j < rule.size(); ++j)
                        s.add(rule.weights()[j] * v[static_cast<std::size_t>(l1)][j] *
                              v[static_cast<std::size_t>(l2)][j] * v[static_cast<std::size_t>(l3)][j]);
                    worst = std::max(worst, rel_err(s.value() / 2.0, exact));
                }
        c.at_most(worst, rec.tol(1e-10));
    });

    rec.run("wigner.m_product_values", [&](Check& c) {
        double worst = 0.0;
        for (int l = 0; l <= 20; ++l) {
            const std::array<int, 2> d{l, l};
            if (m_product_integral(d, path_cap) != Rational(1, 2 * l + 1))
                worst = 1.0;
        }
        if (m_product_integral(std::array{1, 1, 2}, path_cap) != Rational(2, 15))
            worst = 1.0;
        if (m_product_integral(std::array{1, 2, 4}, path_cap) != 0)
            worst = 1.0;
        const auto& rule = gauss_rule(9);
        const double quad =
            sphere_integrate([](double t) { return std::pow(v_eval(2, t), 4); }, rule) / kFourPi;
        worst = std::max(worst, std::abs(m_product_integral(std::array{2, 2, 2, 2}, path_cap).get_d() - quad));
        std::uniform_int_distribution<int> deg(0, 10);
        for (int i = 0; i < 20; ++i) {
            const std::array<int, 5> d{deg(rng), deg(rng), deg(rng), deg(rng), deg(rng)};
            const auto& r = gauss_rule(nodes_for(5, 10));
            const double q = sphere_integrate(
                                 [&](double t) {
                                     double p = 1.0;
                                     for (int l : d)
                                         p *= v_eval(l, t);
                                     return p;
                                 },
                                 r) /
                             kFourPi;
            worst = std::max(worst, std::abs(m_product_integral(d, path_cap).get_d() - q));
        }
        c.at_most(worst, rec.tol(1e-12));
    });

    rec.run("wigner.a_seq", [&](Check& c) {
        const double first = std::abs(a_seq(1) - std::pow(2.0, -0.25));
        const double limit = std::abs(a_seq(10000) - a_seq_limit());
        c.at_most(limit, rec.tol(1e-4));
        c.ok = c.ok && first <= 1e-12;
    });

    const double lower = std::sqrt(2.0 / kPi) - config.delta;

    rec.run("wigner.scaled_lower_bound", [&](Check& c) {
        double worst = 1e300;
        for (int l : {256, 512, 1024})
            worst = std::min(worst, scaled_threej(l, l, l));
        c.at_least(worst, lower);
    });

    rec.run("wigner.scaled_degenerate_growth", [&](Check& c) {
        double prev = 0.0;
        double min_step = 1e300;
        for (int j = 4; j <= 10; ++j) {
            const int l = 1 << j;
            const double v = scaled_threej(l, l, 2 * l);
            if (j > 4)
                min_step = std::min(min_step, v / prev);
            prev = v;
        }
        c.measured = min_step;
        c.expected = "> 1 (strictly increasing)";
        c.ok = min_step > 1.0;
    });

    rec.run("wigner.lower_bound_threshold", [&](Check& c) {
        int threshold = -1;
        for (int l = 1024; l >= 4; l -= 4) {
            if (scaled_threej(l, l, l) < lower) {
                threshold = l + 4;
                break;
            }
        }
        c.measured = threshold < 0 ? 4 : threshold;
        c.expected = "smallest l = 0 mod 4 beyond which scaled 3j(l,l,l) >= sqrt(2/pi) - " + brief(config.delta);
    });

    double running = 0.0, half = 0.0;
    rec.run("wigner.upper_bound_statistic", [&](Check& c) {
        std::uniform_int_distribution<int> deg(0, 2048);
        for (int i = 1; i <= 10000; ++i) {
            int l1, l2, l3;
            do {
                l1 = deg(rng);
                l2 = deg(rng);
                const auto range = triangle_range(l1, l2);
                std::uniform_int_distribution<int> pick(range.lo(), std::min(range.hi(), 2048));
                l3 = pick(rng);
            } while ((l1 + l2 + l3) % 2);
            running = std::max(running, upper_bound_statistic(l1, l2, l3));
            if (i == 5000)
                half = running;
        }
        c.at_most(running, 1.2);
    });
    rec.run("wigner.upper_bound_plateau", [&](Check& c) { c.at_most(running / half, 1.05); });

    rec.run("wigner.weighted_sum_values", [&](Check& c) {
        double worst = 0.0;
        for (int l = 0; l <= 50; ++l)
            worst = std::max(worst, std::abs(weighted_sum(0, l) - l / (2.0 * l + 1)));
        if (weighted_sum_exact(1, 1) != Rational(4, 15))
            worst = 1.0;
        c.at_most(worst, rec.tol(1e-12));
    });

    rec.run("wigner.weighted_sum_bound", [&](Check& c) {
        double worst = 0.0;
        for (int l : {16, 64, 256, 1024})
            worst = std::max(worst, weighted_sum(l, l));
        std::uniform_int_distribution<int> deg(0, 1024);
        for (int i = 0; i < 300; ++i)
            worst = std::max(worst, weighted_sum(deg(rng), deg(rng)));
        c.at_most(worst, 0.5);
    });

    rec.run("wigner.weighted_sum_growth", [&](Check& c) {
        c.at_most(weighted_sum(1024, 1024) / weighted_sum(64, 64), 1.5);
    });

    return {rec.take(), {}};
}

// ---------------------------------------------------------------- geometry

SuiteResult geometry_suite(const RunConfig& config) {
    Recorder rec("geometry", config.tolerance("geometry"));
    std::mt19937_64 rng(salted(config.seed, 3));
    std::uniform_real_distribution<double> interior(-0.98, 0.98);

    std::vector<HarmonicSum> profiles;
    for (int i = 0; i < 50; ++i) {
        std::uniform_int_distribution<int> deg(2, 12);
        std::uniform_real_distribution<double> amp(0.01, 0.2);
        profiles.push_back(random_sum(rng, deg(rng), amp(rng)));
    }

    rec.run("geometry.forms_inverse", [&](Check& c) {
        double worst = 0.0;
        for (std::size_t i = 0; i < 10; ++i) {
            const auto u = profiles[i].profile();
            for (int j = 0; j < 10; ++j) {
                const auto f = fundamental_forms(u, interior(rng));
                const auto id = multiply(f.metric, f.inverse_metric);
                worst = std::max({worst, std::abs(id[0][0] - 1.0), std::abs(id[1][1] - 1.0), std::abs(id[0][1]),
                                  std::abs(id[1][0])});
            }
        }
        c.at_most(worst, rec.tol(1e-12));
    });

    rec.run("geometry.area_element", [&](Check& c) {
        double worst = 0.0;
        for (double eps : {0.01, 0.1, 0.3}) {
            const auto u = RadialProfile::zonal(4, eps);
            for (int j = 0; j < 20; ++j) {
                const double t = interior(rng);
                const double wf = (1.0 + u(t).value) * shape_factor(u, t);
                worst = std::max(worst, rel_err(determinant(fundamental_forms(u, t).metric), wf * wf));
            }
        }
        c.at_most(worst, rec.tol(1e-12));
    });

    // Embedding F(t, phi) = (1+u) (sqrt(1-t^2) cos phi, sqrt(1-t^2) sin phi, t) at phi = 0.
    struct Embedding {
        std::array<double, 3> point, d_t, d_tt, d_pp;
    };
    auto embed = [](const ProfileSample& s, double t) {
        const double w = 1.0 + s.value, x = 1.0 - t * t, r = std::sqrt(x);
        const std::array<double, 3> e{r, 0.0, t}, e1{-t / r, 0.0, 1.0}, e2{-1.0 / (x * r), 0.0, 0.0};
        Embedding out{};
        for (int i = 0; i < 3; ++i) {
            out.point[i] = w * e[i];
            out.d_t[i] = s.d1 * e[i] + w * e1[i];
            out.d_tt[i] = s.d2 * e[i] + 2.0 * s.d1 * e1[i] + w * e2[i];
        }
        out.d_pp = {-w * r, 0.0, 0.0};
        return out;
    };
    auto dot = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    };

    rec.run("geometry.normal_embedding", [&](Check& c) {
        double worst = 0.0;
        bool outward = true;
        for (std::size_t i = 0; i < 10; ++i) {
            const auto u = profiles[i].profile();
            for (int j = 0; j < 10; ++j) {
                const double t = interior(rng);
                const auto f = fundamental_forms(u, t);
                const auto e = embed(u(t), t);
                const double tangent = std::sqrt(dot(e.d_t, e.d_t));
                worst = std::max({worst, std::abs(dot(f.normal, e.d_t)) / tangent,
                                  std::abs(dot(f.normal, f.normal) - 1.0), std::abs(f.normal[1])});
                outward = outward && dot(f.normal, e.point) > 0.0;
            }
        }
        c.at_most(outward ? worst : 1.0, rec.tol(1e-12));
    });

    rec.run("geometry.second_form_embedding", [&](Check& c) {
        double worst = 0.0;
        for (std::size_t i = 0; i < 10; ++i) {
            const auto u = profiles[i].profile();
            for (int j = 0; j < 10; ++j) {
                const double t = interior(rng);
                const auto f = fundamental_forms(u, t);
                const auto e = embed(u(t), t);
                const double h_tt = -dot(e.d_tt, f.normal);
                const double h_pp = -dot(e.d_pp, f.normal);
                worst = std::max({worst, std::abs(f.second_form[0][0] - h_tt) / (1.0 + std::abs(h_tt)),
                                  std::abs(f.second_form[1][1] - h_pp) / (1.0 + std::abs(h_pp))});
            }
        }
        c.at_most(worst, rec.tol(1e-11));
    });

    rec.run("geometry.mean_curvature_paths", [&](Check& c) {
        double worst = 0.0;
        const auto u = RadialProfile::zonal(3, 0.05);
        for (int j = 0; j < 40; ++j) {
            const double t = interior(rng);
            const double h = mean_curvature(u, t);
            const auto k = principal_curvatures(u(t), t);
            worst = std::max({worst, std::abs(h - mean_curvature_trace(u, t)), std::abs(h - k[0] - k[1])});
        }
        for (std::size_t i = 0; i < 10; ++i) {
            const auto p = profiles[i].profile();
            const double t = interior(rng);
            worst = std::max(worst, std::abs(mean_curvature(p, t) - mean_curvature_trace(p, t)));
        }
        c.at_most(worst, rec.tol(1e-10));
    });

    rec.run("geometry.taylor_area", [&](Check& c) {
        std::vector<double> ratios;
        const auto& rule = gauss_rule(surface_rule_size(6));
        for (double eps : {1e-2, 1e-3, 1e-4})
            ratios.push_back(taylor_pieces(RadialProfile::zonal(6, eps), rule).area_defect / (eps * eps));
        const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
        c.at_most(*hi / *lo, 1.1);
    });

    rec.run("geometry.taylor_mean_h", [&](Check& c) {
        std::vector<std::pair<double, double>> pairs;
        const auto& rule = gauss_rule(surface_rule_size(6));
        for (double eps : {1e-2, 1e-3, 1e-4})
            pairs.emplace_back(eps, std::abs(taylor_pieces(RadialProfile::zonal(6, eps), rule).mean_h_defect));
        const auto fit = fit_exponent(pairs);
        c.measured = fit.slope;
        c.tolerance = 0.1;
        c.expected = "2 +- 0.1";
        c.ok = std::abs(fit.slope - 2.0) <= 0.1;
    });

    rec.run("geometry.round_spheres", [&](Check& c) {
        double worst = 0.0;
        const auto& rule = gauss_rule(64);
        const auto s = surface_report(RadialProfile::constant(0.0), rule);
        worst = std::max({worst, std::abs(s.deficit), std::abs(s.area - kFourPi), std::abs(s.total_h - 8.0 * kPi)});
        for (double cst : {-0.5, 0.3, 2.0}) {
            const auto p = RadialProfile::constant(cst);
            const auto r = surface_report(p, rule);
            worst = std::max(worst, std::abs(r.deficit));
            const auto k = principal_curvatures(p(0.2), 0.2);
            worst = std::max({worst, std::abs(k[0] - 1.0 / (1.0 + cst)), std::abs(k[1] - 1.0 / (1.0 + cst)),
                              std::abs(mean_curvature(p, 0.2) - 2.0 / (1.0 + cst))});
        }
        c.at_most(worst, rec.tol(1e-12));
    });

    rec.run("geometry.umbilic", [&](Check& c) {
        double worst = 0.0;
        for (double cst : {0.0, -0.5, 0.3, 2.0})
            worst = std::max(worst, surface_report(RadialProfile::constant(cst), gauss_rule(64)).traceless_energy);
        c.at_most(worst, rec.tol(1e-12));
    });

    rec.run("geometry.dilation", [&](Check& c) {
        double worst = 0.0;
        for (std::size_t i = 0; i < 10; ++i) {
            const auto u = profiles[i].profile();
            const auto& rule = gauss_rule(surface_rule_size(profiles[i].max_degree()));
            const auto base = surface_report(u, rule);
            for (double lam : {0.5, 2.0, 10.0}) {
                const auto r = surface_report(u.dilated(lam), rule);
                worst = std::max({worst, rel_err(r.area, lam * lam * base.area), rel_err(r.total_h, lam * base.total_h),
                                  rel_err(r.deficit, lam * base.deficit)});
            }
        }
        c.at_most(worst, rec.tol(1e-10));
    });

    rec.run("geometry.graph_condition", [&](Check& c) {
        int bad = 0;
        try {
            check_graph_condition(RadialProfile::constant(-1.5));
            ++bad;
        } catch (const GraphConditionError&) {
        }
        check_graph_condition(profiles.front().profile());
        c.at_most(bad, 0);
    });

    std::vector<SurfaceReport> reports;
    for (const auto& p : profiles)
        reports.push_back(surface_report(p.profile(), gauss_rule(surface_rule_size(p.max_degree()))));

    rec.run("geometry.gauss_bonnet", [&](Check& c) {
        double worst = 0.0;
        for (const auto& r : reports)
            worst = std::max(worst, kFourPi * std::abs(r.gauss_bonnet - 1.0));
        c.at_most(worst, rec.tol(1e-8));
    });

    rec.run("geometry.schur_identity", [&](Check& c) {
        double worst = 0.0;
        for (const auto& r : reports)
            worst = std::max(worst, std::abs(r.schur_residual) / r.schur_lhs);
        const auto small = surface_report(RadialProfile::zonal(5, 0.01), gauss_rule(surface_rule_size(5)));
        worst = std::max(worst, std::abs(small.schur_residual) / small.schur_lhs);
        c.at_most(worst, rec.tol(1e-8));
    });

    rec.run("geometry.triple_product_identity", [&](Check& c) {
        double worst = 0.0;
        std::uniform_int_distribution<int> deg(0, 32);
        for (int i = 0; i < 200; ++i) {
            int l1, l2, l3;
            do {
                l1 = deg(rng);
                l2 = deg(rng);
                l3 = deg(rng);
            } while (!threej_admissible(l1, l2, l3));
            const double closed = triple_product_closed_form(l1, l2, l3);
            const double quad = triple_product_quadrature(l1, l2, l3);
            if (closed == 0.0)
                worst = std::max(worst, std::abs(quad));
            else
                worst = std::max(worst, rel_err(quad, closed));
        }
        c.at_most(worst, rec.tol(1e-9));
    });

    rec.run("geometry.cubic_single_term", [&](Check& c) {
        const HarmonicSum v2({{2, 1.0}}, "v2");
        const HarmonicSum v3({{3, 1.0}}, "v3");
        const double expected = -0.5 * 6.0 * 6.0 * (2.0 / 35.0);
        const double err = std::max(rel_err(cubic_term_quadrature(v2), expected),
                                    std::max(rel_err(cubic_term_exact(v2), expected), std::abs(cubic_term_quadrature(v3))));
        c.at_most(err, rec.tol(1e-12));
    });

    rec.run("geometry.bracket", [&](Check& c) {
        long long margin = std::numeric_limits<long long>::max();
        for (int k : {7, 8}) {
            const auto b = check_bracket({k, 0.5});
            margin = std::min(margin, b.min_bracket - b.bound);
        }
        c.at_least(static_cast<double>(margin), 0.0);
    });

    rec.run("geometry.construction", [&](Check& c) {
        int bad = 0;
        const auto u7 = build_u({7, 0.5});
        const double coef = -std::pow(128.0, -2.5);
        bad += u7.terms().size() != 5;
        for (std::size_t i = 0; i < u7.terms().size(); ++i)
            bad += u7.terms()[i].degree != 128 + 4 * static_cast<int>(i) || u7.terms()[i].coefficient != coef;
        bad += rel_err(u7.evaluate(-1.0).value, 5.0 * coef) > 1e-14;
        const auto u8 = build_u({8, 0.25});
        bad += u8.terms().size() != 9 || u8.max_degree() != 288;
        for (int k = 7; k <= 13; ++k) {
            const auto u = build_u({k, 0.5});
            bad += !u.has_zero_mean();
            for (const auto& t : u.terms())
                bad += t.degree % 4 != 0 || t.degree < (1 << k) || 8 * t.degree > 9 * (1 << k);
        }
        try {
            build_u({6, 0.5});
            ++bad;
        } catch (const PreconditionError&) {
        }
        c.at_most(bad, 0);
    });

    rec.run("geometry.w12_closed_form", [&](Check& c) {
        double err = rel_err(w12_norm(HarmonicSum({{2, 1.0}})), std::sqrt(kFourPi * 7.0 / 5.0));
        err = std::max(err, w12_norm(HarmonicSum()));
        const HarmonicSum u({{3, 0.4}, {5, -0.7}, {8, 0.2}});
        const auto& rule = gauss_rule(nodes_for(2, 8));
        const double quad = sphere_integrate(
            [&](double t) {
                const auto s = u.evaluate(t);
                return s.value * s.value + axisym_grad_sq(s, t);
            },
            rule);
        err = std::max(err, rel_err(w12_norm(u), std::sqrt(quad)));
        c.at_most(err, rec.tol(1e-12));
    });

    rec.run("geometry.c1_single_term", [&](Check& c) {
        const auto s = sup_norms(RadialProfile::zonal(64), 64);
        c.at_most(std::max(std::abs(s.c0 - 1.0), c1_norm(HarmonicSum())), rec.tol(1e-12));
    });

    rec.run("geometry.delta_moment_closed_form", [&](Check& c) {
        double err = 0.0;
        for (int l : {1, 4, 17, 40}) {
            const double lam = l * (l + 1.0);
            err = std::max(err, rel_err(delta_moment(HarmonicSum({{l, 1.0}}), 2), kFourPi * lam * lam / (2 * l + 1)));
        }
        try {
            delta_moment(HarmonicSum({{2, 1.0}}), 3);
            err = 1.0;
        } catch (const PreconditionError&) {
        }
        c.at_most(err, rec.tol(1e-12));
    });

    rec.run("geometry.delta_moment_dual", [&](Check& c) {
        const HarmonicSum u({{2, 0.3}, {5, -0.2}, {8, 0.15}, {12, 0.1}});
        c.at_most(rel_err(delta_moment(u, 4), delta_moment_lattice(u, 4, config.budget("path_cap"))), rec.tol(1e-10));
    });

    return {rec.take(), {}};
}

// ---------------------------------------------------------------- sweep

struct SlopeSpec {
    const char* id;
    const char* name;
    double tolerance;
};

double slope_expected(const std::string& name, double alpha) {
    if (name == "w12_norm")
        return -1.0 - alpha;
    if (name == "c1_norm")
        return -alpha;
    return -2.0 * alpha;
}

double column(const SweepRow& r, const std::string& name) {
    if (name == "w12_norm")
        return r.w12_norm;
    if (name == "c1_norm")
        return r.c1_norm;
    for (const auto& [m, v] : r.delta_moments)
        if (m == 2)
            return v;
    throw PreconditionError("sweep rows lack delta_moment_2");
}

/// Exponent fits over rows of one alpha, one record per quantity.
void slope_checks(Recorder& rec, const std::vector<SweepRow>& rows, double alpha,
                  std::span<const SlopeSpec> specs) {
    for (const auto& s : specs) {
        rec.run(s.id, [&](Check& c) {
            std::vector<std::pair<double, double>> pairs;
            for (const auto& r : rows)
                pairs.emplace_back(r.ell, column(r, s.name));
            const auto fit = fit_exponent(pairs);
            const double expect = slope_expected(s.name, alpha);
            const double tol = rec.tol(s.tolerance);
            c.measured = fit.slope;
            c.tolerance = tol;
            c.expected = "alpha=" + brief(alpha) + ": " + brief(expect) + " +- " + brief(tol) + " (stderr " +
                         brief(fit.slope_stderr) + ")";
            c.ok = std::abs(fit.slope - expect) <= tol;
        });
    }
}

constexpr SlopeSpec kSweepSlopes[] = {
    {"sweep.w12_slope", "w12_norm", 0.1},
    {"sweep.c1_slope", "c1_norm", 0.15},
    {"sweep.delta_moment_slope", "delta_moment_2", 0.1},
};

constexpr SlopeSpec kReportSlopes[] = {
    {"report.w12_slope", "w12_norm", 0.1},
    {"report.c1_slope", "c1_norm", 0.15},
    {"report.delta_moment_slope", "delta_moment_2", 0.1},
};

std::vector<double> distinct_alphas(const std::vector<SweepRow>& rows) {
    std::vector<double> out;
    for (const auto& r : rows)
        if (std::find(out.begin(), out.end(), r.alpha) == out.end())
            out.push_back(r.alpha);
    return out;
}

std::vector<SweepRow> rows_for(const std::vector<SweepRow>& rows, double alpha) {
    std::vector<SweepRow> out;
    for (const auto& r : rows)
        if (r.alpha == alpha)
            out.push_back(r);
    std::sort(out.begin(), out.end(), [](const SweepRow& a, const SweepRow& b) { return a.k < b.k; });
    return out;
}

/// Remainder-ratio growth between the earliest k >= 8 and the last k.
std::optional<std::array<double, 2>> remainder_growth(const std::vector<SweepRow>& rows) {
    const SweepRow* first = nullptr;
    for (const auto& r : rows)
        if (r.k >= 8) {
            first = &r;
            break;
        }
    if (!first || rows.back().k - first->k < 2)
        return std::nullopt;
    return std::array<double, 2>{rows.back().remainder_ratio_half / first->remainder_ratio_half,
                                 rows.back().remainder_ratio_one / first->remainder_ratio_one};
}

/// Median of the per-row kappa estimates at k <= 9, where M(u) - M(-u) is
/// still well resolved in double precision.
double kappa_median(const std::vector<SweepRow>& rows) {
    std::vector<double> est;
    for (const auto& r : rows)
        if (r.k <= 9 && r.kappa_estimate != 0.0)
            est.push_back(r.kappa_estimate);
    if (est.empty())
        for (const auto& r : rows)
            est.push_back(r.kappa_estimate);
    if (est.empty())
        return 0.0;
    std::sort(est.begin(), est.end());
    return est[est.size() / 2];
}

SuiteResult sweep_suite(const RunConfig& config) {
    Recorder rec("sweep", config.tolerance("sweep"));
    AnalysisOptions options;
    options.cubic.threads = config.threads;
    options.cubic.triple_cap = config.budget("triple_cap");
    const double node_cap = config.budget("node_cap");

    std::vector<SweepRow> rows;
    for (double alpha : config.alphas)
        for (int k = config.k_lo; k <= config.k_hi; ++k) {
            const ConstructionParams params{k, alpha};
            const int L = params.degree(params.count() - 1);
            const int nodes = std::max(surface_rule_size(L), nodes_for(4, L));
            rec.run("sweep.row", [&](Check& c) {
                c.expected = "row k=" + std::to_string(k) + " alpha=" + brief(alpha) + " within budget";
                c.measured = nodes;
                c.tolerance = node_cap;
                if (nodes > node_cap)
                    throw BudgetExceeded("quadrature nodes", nodes, node_cap);
                options.cubic_quadrature = k <= 9;
                rows.push_back(deficit_analysis(params, options));
            });
        }

    rec.run("sweep.cubic_positive", [&](Check& c) {
        double lowest = 1e300;
        for (const auto& r : rows)
            lowest = std::min(lowest, r.cubic_exact);
        c.measured = lowest;
        c.expected = "> 0";
        c.ok = !rows.empty() && lowest > 0.0;
    });

    rec.run("sweep.cubic_dual_oracle", [&](Check& c) {
        double worst = 0.0;
        for (const auto& r : rows)
            if (r.cubic_quadrature)
                worst = std::max(worst, rel_err(*r.cubic_quadrature, r.cubic_exact));
        c.at_most(worst, rec.tol(1e-8));
    });

    rec.run("sweep.cubic_scaled_floor", [&](Check& c) {
        double lowest = 1e300;
        for (const auto& r : rows)
            lowest = std::min(lowest, r.cubic_scaled);
        c.at_least(lowest, std::ldexp(1.0, -18));
    });

    for (double alpha : distinct_alphas(rows)) {
        const auto sub = rows_for(rows, alpha);
        if (sub.size() >= 3)
            slope_checks(rec, sub, alpha, kSweepSlopes);

        for (const auto& r : sub)
            rec.run("sweep.deficit_trend", [&](Check& c) {
                c.measured = r.deficit_scaled;
                c.expected = "k=" + std::to_string(r.k) + " alpha=" + brief(alpha) + " M " +
                             (r.deficit < 0 ? "negative" : "non-negative") + "; M l^(1+3 alpha)";
            });

        const auto growth = remainder_growth(sub);
        const double kappa_hat = kappa_median(sub);
        const int kappa_index = std::abs(kappa_hat - 0.5) <= std::abs(kappa_hat - 1.0) ? 0 : 1;
        rec.run("sweep.kappa_selection", [&](Check& c) {
            c.measured = kappa_hat;
            c.expected = "alpha=" + brief(alpha) + ": odd-part estimate of kappa (median over k <= 9), selects " +
                         std::string(kappa_index == 0 ? "1/2" : "1");
        });
        if (growth) {
            const bool gated = alpha == 0.5;
            rec.run(gated ? "sweep.remainder_ratio_bounded" : "sweep.remainder_ratio_trend", [&](Check& c) {
                c.at_most((*growth)[kappa_index], 2.0);
                c.expected += std::string(" (kappa=") + (kappa_index == 0 ? "1/2" : "1") + ")";
            });
        }

        if (alpha == 0.5) {
            std::vector<SweepRow> window;
            for (const auto& r : sub)
                if (r.k <= 10)
                    window.push_back(r);
            if (window.size() >= 2)
                rec.run("sweep.traceless_decreasing", [&](Check& c) {
                    double worst = 0.0;
                    for (std::size_t i = 1; i < window.size(); ++i)
                        worst = std::max(worst, window[i].traceless_energy / window[i - 1].traceless_energy);
                    c.measured = worst;
                    c.expected = "< 1 for consecutive k <= 10";
                    c.ok = std::isfinite(worst) && worst < 1.0;
                });
        }
    }

    rec.run("sweep.zero_sentinel", [&](Check& c) {
        const auto r = analyze_sum(HarmonicSum({}, "zero"), 7, 0.5, options);
        c.at_most(std::abs(r.deficit) + std::abs(r.cubic_exact), 0.0);
    });

    return {rec.take(), std::move(rows)};
}

// ---------------------------------------------------------------- report

SuiteResult report_suite(const RunConfig& config, std::istream& in) {
    Recorder rec("report", config.tolerance("report"));
    const auto rows = read_sweep_csv(in);

    for (double alpha : distinct_alphas(rows)) {
        const auto sub = rows_for(rows, alpha);
        if (sub.size() < 3)
            continue;
        slope_checks(rec, sub, alpha, kReportSlopes);

        rec.run("report.cubic_scaled_slope", [&](Check& c) {
            std::vector<std::pair<double, double>> pairs;
            for (const auto& r : sub)
                pairs.emplace_back(r.ell, r.cubic_scaled);
            const auto fit = fit_exponent(pairs);
            c.measured = fit.slope;
            c.expected = "alpha=" + brief(alpha) + ": slope of l^(1+3 alpha) 4 pi cubic, stderr " +
                         brief(fit.slope_stderr);
        });
        rec.run("report.deficit_scaled", [&](Check& c) {
            c.measured = sub.back().deficit_scaled;
            int negative = 0;
            for (const auto& r : sub)
                negative += r.deficit < 0;
            c.expected = "alpha=" + brief(alpha) + ": M l^(1+3 alpha) at k=" + std::to_string(sub.back().k) + ", " +
                         std::to_string(negative) + "/" + std::to_string(sub.size()) + " rows with M < 0";
        });
    }

    rec.run("report.traceability", [&](Check& c) {
        int uncovered = 0;
        for (const auto& e : traceability_matrix()) {
            bool gated = false;
            for (const auto& id : e.check_ids)
                gated = gated || lookup(id).gated;
            uncovered += !gated;
        }
        c.at_most(uncovered, 0);
    });

    return {rec.take(), rows};
}

void write_rows(const std::string& path, const std::vector<SweepRow>& rows, const std::string& format) {
    std::ofstream out(path, std::ios::binary);
    if (format == "json")
        out << sweep_to_json(rows) << '\n';
    else
        write_sweep_csv(out, rows);
}

void write_records(const std::string& path, std::span<const OutputRecord> records, const std::string& format) {
    std::ofstream out(path, std::ios::binary);
    if (format == "json")
        out << records_to_json(records) << '\n';
    else
        write_records_csv(out, records);
}

const std::set<std::string> kCommands = {"verify-basis", "verify-wigner", "verify-geometry", "sweep", "report"};
const std::set<std::string> kSuites = {"basis", "wigner", "geometry", "sweep", "report"};
const std::set<std::string> kBudgets = {"triple_cap", "path_cap", "node_cap", "degree_cap"};

} // namespace

void RunConfig::validate() const {
    if (!kCommands.count(command))
        throw ConfigError("unknown command '" + command + "'");
    if (k_lo > k_hi)
        throw ConfigError("empty k range " + std::to_string(k_lo) + ".." + std::to_string(k_hi));
    if (k_lo < 7 || k_hi > 13)
        throw ConfigError("k range must lie within [7, 13]");
    if (alphas.empty())
        throw ConfigError("alpha list is empty");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0))
            throw ConfigError("alpha " + brief(a) + " outside (0, 1)");
    for (const auto& [suite, scale] : tolerance_scale) {
        if (!kSuites.count(suite))
            throw ConfigError("unknown tolerance suite '" + suite + "'");
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw ConfigError("tolerance for " + suite + " must be positive");
    }
    for (const auto& [name, value] : budgets) {
        if (!kBudgets.count(name))
            throw ConfigError("unknown budget '" + name + "'");
        if (!(value > 0.0))
            throw ConfigError("budget " + name + " must be positive");
    }
    if (format != "csv" && format != "json")
        throw ConfigError("format must be csv or json");
    if (command == "report" && input.empty())
        throw ConfigError("report needs --in <sweep csv>");
    if (!(delta > 0.0 && delta < std::sqrt(2.0 / kPi)))
        throw ConfigError("delta must lie in (0, sqrt(2/pi))");
}

double RunConfig::tolerance(const std::string& suite) const {
    const auto it = tolerance_scale.find(suite);
    return it == tolerance_scale.end() ? 1.0 : it->second;
}

double RunConfig::budget(const std::string& name) const {
    if (const auto it = budgets.find(name); it != budgets.end())
        return it->second;
    if (name == "triple_cap")
        return 1e7;
    if (name == "path_cap")
        return 1e7;
    if (name == "node_cap")
        return 1e5;
    if (name == "degree_cap")
        return 1e5;
    throw ConfigError("unknown budget '" + name + "'");
}

std::pair<int, int> parse_k_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        std::size_t used = 0;
        if (dots == std::string::npos) {
            const int k = std::stoi(text, &used);
            if (used != text.size())
                throw ConfigError("bad k range '" + text + "'");
            return {k, k};
        }
        const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
        const int lo = std::stoi(a, &used);
        if (used != a.size())
            throw ConfigError("bad k range '" + text + "'");
        const int hi = std::stoi(b, &used);
        if (used != b.size())
            throw ConfigError("bad k range '" + text + "'");
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw ConfigError("bad k range '" + text + "'");
    }
}

std::string to_string(CheckStatus s) {
    switch (s) {
    case CheckStatus::Pass:
        return "pass";
    case CheckStatus::Fail:
        return "fail";
    case CheckStatus::Info:
        return "info";
    }
    return "info";
}

std::span<const CheckSpec> check_registry() { return kRegistry; }

std::span<const char* const> claim_list() { return kClaims; }

std::vector<TraceEntry> traceability_matrix() {
    std::vector<TraceEntry> out;
    for (const char* claim : kClaims) {
        TraceEntry e{claim, {}};
        for (const auto& c : kRegistry)
            if (std::string(c.claim) == claim)
                e.check_ids.emplace_back(c.id);
        out.push_back(std::move(e));
    }
    return out;
}

FitResult fit_exponent(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 3)
        throw PreconditionError("fit_exponent needs at least 3 pairs");
    std::vector<double> x, y;
    for (const auto& [l, v] : pairs) {
        if (!(l > 0.0) || !(v > 0.0))
            throw PreconditionError("fit_exponent needs positive data");
        x.push_back(std::log(l));
        y.push_back(std::log(v));
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw PreconditionError("fit_exponent needs at least two distinct l");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        fit.max_residual = std::max(fit.max_residual, std::abs(r));
        ssr += r * r;
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
    return fit;
}

bool SuiteResult::passed() const {
    return std::none_of(records.begin(), records.end(),
                        [](const OutputRecord& r) { return r.gated && r.status == CheckStatus::Fail; });
}

SuiteResult verify_basis(const RunConfig& config) { return basis_suite(config); }
SuiteResult verify_wigner(const RunConfig& config) { return wigner_suite(config); }
SuiteResult verify_geometry(const RunConfig& config) { return geometry_suite(config); }
SuiteResult run_sweep(const RunConfig& config) { return sweep_suite(config); }
SuiteResult run_report(const RunConfig& config, std::istream& sweep_csv) { return report_suite(config, sweep_csv); }

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            out.push_back(cell);
        if (!line.empty() && line.back() == ',')
            out.emplace_back();
        return out;
    };
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("sweep csv is empty");
    const auto header = split(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i)
        col[header[i]] = i;
    for (const char* need : {"version", "k", "alpha", "ell", "w12_norm", "c1_norm", "cubic_exact", "deficit"})
        if (!col.count(need))
            throw ConfigError(std::string("sweep csv lacks column ") + need);

    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw ConfigError("sweep csv row has " + std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(header.size()));
        auto get = [&](const std::string& name) -> double {
            const auto it = col.find(name);
            if (it == col.end() || cells[it->second].empty())
                return 0.0;
            return std::stod(cells[it->second]);
        };
        if (static_cast<int>(get("version")) != kSweepSchemaVersion)
            throw ConfigError("sweep csv schema version mismatch");
        SweepRow r;
        r.k = static_cast<int>(get("k"));
        r.alpha = get("alpha");
        r.ell = static_cast<int>(get("ell"));
        r.w12_norm = get("w12_norm");
        r.c1_norm = get("c1_norm");
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i].rfind("delta_moment_", 0) == 0)
                r.delta_moments.emplace_back(std::stoi(header[i].substr(13)), std::stod(cells[i]));
        r.cubic_exact = get("cubic_exact");
        if (col.count("cubic_quadrature") && !cells[col["cubic_quadrature"]].empty())
            r.cubic_quadrature = get("cubic_quadrature");
        r.cubic_scaled = get("cubic_scaled");
        r.area_defect = get("area_defect");
        r.deficit = get("deficit");
        r.deficit_scaled = get("deficit_scaled");
        r.traceless_energy = get("traceless_energy");
        r.remainder_ratio_half = get("remainder_ratio_half");
        r.remainder_ratio_one = get("remainder_ratio_one");
        r.kappa_estimate = get("kappa_estimate");
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_records_csv(std::ostream& out, std::span<const OutputRecord> records) {
    out << "suite,check_id,claim,status,measured,expected,tolerance,gated\n";
    for (const auto& r : records)
        out << r.suite << ',' << r.check_id << ',' << csv_field(r.claim) << ',' << to_string(r.status) << ','
            << num(r.measured) << ',' << csv_field(r.expected) << ',' << num(r.tolerance) << ','
            << (r.gated ? "true" : "false") << '\n';
}

std::string records_to_json(std::span<const OutputRecord> records) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["suite"] = r.suite;
        j["check_id"] = r.check_id;
        j["claim"] = r.claim;
        j["status"] = to_string(r.status);
        j["measured"] = r.measured;
        j["expected"] = r.expected;
        j["tolerance"] = r.tolerance;
        j["runtime_ms"] = r.runtime_ms;
        j["gated"] = r.gated;
        doc.push_back(std::move(j));
    }
    return doc.dump(2);
}

int run(const RunConfig& config, std::ostream& log) {
    try {
        config.validate();
        auto settings = wigner_settings();
        settings.degree_sum_cap = static_cast<int>(std::min(config.budget("degree_cap"), 1048576.0));
        configure_wigner(settings);
        std::filesystem::create_directories(config.out_dir);
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }

    SuiteResult result;
    if (config.command == "verify-basis")
        result = verify_basis(config);
    else if (config.command == "verify-wigner")
        result = verify_wigner(config);
    else if (config.command == "verify-geometry")
        result = verify_geometry(config);
    else if (config.command == "sweep")
        result = run_sweep(config);
    else {
        std::ifstream in(config.input);
        if (!in) {
            log << "config error: cannot open " << config.input << '\n';
            return kExitConfigError;
        }
        try {
            result = run_report(config, in);
        } catch (const ConfigError& e) {
            log << "config error: " << e.what() << '\n';
            return kExitConfigError;
        } catch (const std::invalid_argument& e) {
            log << "config error: malformed sweep csv (" << e.what() << ")\n";
            return kExitConfigError;
        }
    }

    const std::filesystem::path dir(config.out_dir);
    const std::string ext = "." + config.format;
    write_records((dir / (config.command + ext)).string(), result.records, config.format);
    if (config.command == "sweep")
        write_rows((dir / ("sweep_rows" + ext)).string(), result.rows, config.format);

    for (const auto& r : result.records)
        log << std::left << std::setw(5) << to_string(r.status) << ' ' << std::setw(36) << r.check_id << ' '
            << std::setw(14) << brief(r.measured) << ' ' << r.expected << '\n';

    if (config.command == "report") {
        log << "\ntraceability matrix\n";
        std::ofstream trace((dir / "traceability.csv").string(), std::ios::binary);
        trace << "claim,check_ids\n";
        for (const auto& e : traceability_matrix()) {
            std::string ids;
            for (const auto& id : e.check_ids)
                ids += (ids.empty() ? "" : ";") + id;
            trace << csv_field(e.claim) << ',' << ids << '\n';
            log << "  " << std::setw(42) << e.claim << ' ' << ids << '\n';
        }
    }

    const auto failed = std::count_if(result.records.begin(), result.records.end(),
                                      [](const OutputRecord& r) { return r.gated && r.status == CheckStatus::Fail; });
    log << config.command << ": " << result.records.size() << " checks, " << failed << " gated failures\n";
    return failed ? kExitGatedFailure : kExitPass;
}

} // namespace minkowski
