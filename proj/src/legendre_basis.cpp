#include "minkowski/legendre_basis.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numbers>
#include <utility>

#include "minkowski/errors.hpp"

namespace minkowski {

namespace {

std::mutex warning_mutex;
WarningHandler warning_handler;

void check_point(double t) {
    if (!(t >= -1.0 && t <= 1.0))
        throw DomainError("Legendre argument outside [-1, 1]: " + std::to_string(t));
}

} // namespace

void set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(warning_mutex);
    warning_handler = std::move(handler);
}

void warn(const std::string& message) {
    std::lock_guard lock(warning_mutex);
    if (warning_handler)
        warning_handler(message);
    else
        std::cerr << "warning: " << message << '\n';
}

LegendreSample legendre_eval(int degree, double t) {
    if (degree < 0)
        throw PreconditionError("negative Legendre degree");
    check_point(t);

    LegendreSample out{degree, t, 1.0, 0.0, 0.0};
    if (degree == 0)
        return out;

    // (P, P', P'') at l-1 and l.
    double p0 = 1.0, d0 = 0.0, s0 = 0.0;
    double p1 = t, d1 = 1.0, s1 = 0.0;
    for (int l = 1; l < degree; ++l) {
        const double p2 = ((2 * l + 1) * t * p1 - l * p0) / (l + 1);
        const double d2 = d0 + (2 * l + 1) * p1;
        const double s2 = s0 + (2 * l + 1) * d1;
        p0 = p1, d0 = d1, s0 = s1;
        p1 = p2, d1 = d2, s1 = s2;
    }
    out.value = p1;
    out.d1 = d1;
    out.d2 = s1;
    return out;
}

double v_eval(int degree, double t) {
    check_point(t);
    return legendre_eval(degree, -t).value;
}

void LegendreTable::fill(int max_degree, double t) {
    check_point(t);
    const auto n = static_cast<std::size_t>(max_degree) + 1;
    p.assign(n, 0.0);
    dp.assign(n, 0.0);
    d2p.assign(n, 0.0);
    p[0] = 1.0;
    if (max_degree == 0)
        return;
    p[1] = t;
    dp[1] = 1.0;
    for (std::size_t l = 1; l + 1 < n; ++l) {
        const double dl = static_cast<double>(l);
        p[l + 1] = ((2 * dl + 1) * t * p[l] - dl * p[l - 1]) / (dl + 1);
        dp[l + 1] = dp[l - 1] + (2 * dl + 1) * p[l];
        d2p[l + 1] = d2p[l - 1] + (2 * dl + 1) * dp[l];
    }
}

RadialProfile::RadialProfile(Evaluator evaluator, std::optional<int> band_limit, std::string label)
    : evaluator_(std::move(evaluator)), band_limit_(band_limit), label_(std::move(label)) {}

RadialProfile RadialProfile::constant(double c) {
    return RadialProfile([c](double) { return ProfileSample{c, 0.0, 0.0}; }, 0,
                         "const(" + std::to_string(c) + ")");
}

RadialProfile RadialProfile::zonal(int degree, double coefficient) {
    if (degree < 0)
        throw PreconditionError("negative zonal degree");
    return RadialProfile(
        [degree, coefficient](double t) {
            const auto s = legendre_eval(degree, -t);
            // d/dt P(-t) = -P'(-t), d^2/dt^2 P(-t) = P''(-t)
            return ProfileSample{coefficient * s.value, -coefficient * s.d1, coefficient * s.d2};
        },
        degree, "v" + std::to_string(degree));
}

RadialProfile RadialProfile::dilated(double scale) const {
    auto inner = evaluator_;
    return RadialProfile(
        [inner, scale](double t) {
            const auto s = inner(t);
            return ProfileSample{scale * (1.0 + s.value) - 1.0, scale * s.d1, scale * s.d2};
        },
        band_limit_, label_ + "*dil" + std::to_string(scale));
}

RadialProfile RadialProfile::scaled(double factor) const {
    auto inner = evaluator_;
    return RadialProfile(
        [inner, factor](double t) {
            const auto s = inner(t);
            return ProfileSample{factor * s.value, factor * s.d1, factor * s.d2};
        },
        band_limit_, label_);
}

double axisym_grad_sq(const ProfileSample& s, double t) {
    return (1.0 - t * t) * s.d1 * s.d1;
}

double axisym_grad_sq(const RadialProfile& phi, double t) {
    return axisym_grad_sq(phi(t), t);
}

double axisym_laplacian(const ProfileSample& s, double t) {
    return (1.0 - t * t) * s.d2 - 2.0 * t * s.d1;
}

double axisym_laplacian(const RadialProfile& phi, double t) {
    return axisym_laplacian(phi(t), t);
}

double hessian_cubic(const ProfileSample& s, double t) {
    const double x = 1.0 - t * t;
    return x * s.d1 * s.d1 * (x * s.d2 - t * s.d1);
}

double hessian_cubic(const RadialProfile& phi, double t) {
    return hessian_cubic(phi(t), t);
}

namespace {

// |phi| and |grad phi| as functions of the polar angle theta, t = cos(theta).
std::pair<double, double> magnitudes(const RadialProfile& phi, double theta) {
    const double t = std::clamp(std::cos(theta), -1.0, 1.0);
    const auto s = phi(t);
    return {std::abs(s.value), std::abs(std::sin(theta) * s.d1)};
}

double refine_max(const RadialProfile& phi, double lo, double hi, bool gradient, double best) {
    constexpr int kPoints = 33;
    constexpr int kRounds = 4;
    for (int round = 0; round < kRounds; ++round) {
        double arg = 0.5 * (lo + hi);
        double local = -1.0;
        for (int j = 0; j < kPoints; ++j) {
            const double c = std::cos(std::numbers::pi * (j + 0.5) / kPoints);
            const double theta = std::clamp(0.5 * (lo + hi) + 0.5 * (hi - lo) * c, 0.0, std::numbers::pi);
            const auto [v, g] = magnitudes(phi, theta);
            const double m = gradient ? g : v;
            if (m > local)
                local = m, arg = theta;
        }
        best = std::max(best, local);
        const double half = 0.25 * (hi - lo);
        lo = std::max(0.0, arg - half);
        hi = std::min(std::numbers::pi, arg + half);
    }
    return best;
}

} // namespace

SupNorms sup_norms(const RadialProfile& phi, int max_degree) {
    const int samples = 4 * std::max(max_degree, 0) + 64;
    const double step = std::numbers::pi / samples;
    std::vector<double> vals(samples + 1), grads(samples + 1);
    for (int i = 0; i <= samples; ++i) {
        const auto [v, g] = magnitudes(phi, i * step);
        vals[i] = v;
        grads[i] = g;
    }

    auto refine = [&](const std::vector<double>& data, bool gradient) {
        std::vector<int> order(data.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = static_cast<int>(i);
        const std::size_t top = std::min<std::size_t>(8, order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<long>(top), order.end(),
                          [&](int a, int b) { return data[a] > data[b]; });
        double best = data[order[0]];
        for (std::size_t r = 0; r < top; ++r) {
            const int i = order[r];
            const double lo = std::max(0.0, (i - 1) * step);
            const double hi = std::min(std::numbers::pi, (i + 1) * step);
            best = refine_max(phi, lo, hi, gradient, best);
        }
        return best;
    };

    return SupNorms{refine(vals, false), refine(grads, true)};
}

} // namespace minkowski
