#include "minkowski/graph_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "minkowski/errors.hpp"

namespace minkowski {

namespace {

constexpr double kPi = std::numbers::pi;

struct Local {
    double w;  // 1 + u
    double x;  // 1 - t^2
    double p;  // u_t
    double q;  // u_tt
    double f;  // shape factor
};

Local local_quantities(const ProfileSample& s, double t) {
    const double w = 1.0 + s.value;
    if (!(w > 0.0))
        throw GraphConditionError("1 + u <= 0 at t = " + std::to_string(t));
    const double x = 1.0 - t * t;
    const double f = std::sqrt(w * w + x * s.d1 * s.d1);
    return Local{w, x, s.d1, s.d2, f};
}

void check_interior(double t) {
    if (!(t > -1.0 && t < 1.0))
        throw DomainError("chart (t, azimuth) degenerates at the poles; t = " + std::to_string(t));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Mat2 multiply(const Mat2& a, const Mat2& b) {
    Mat2 c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

double trace(const Mat2& a) { return a[0][0] + a[1][1]; }

double determinant(const Mat2& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

double shape_factor(const RadialProfile& u, double t) {
    return local_quantities(u(t), t).f;
}

FundamentalForms fundamental_forms(const RadialProfile& u, double t) {
    check_interior(t);
    const auto s = u(t);
    const auto [w, x, p, q, f] = local_quantities(s, t);

    // Round metric g = diag(1/x, x); du = p dt; grad u = x p d/dt.
    const double g_tt = 1.0 / x, g_pp = x;
    const double grad_t = x * p;
    // Hessian on S: Christoffels Gamma^t_tt = t/x, Gamma^t_pp = t x.
    const double hess_tt = q - t * p / x;
    const double hess_pp = -t * x * p;

    FundamentalForms out;
    out.metric = {{{w * w * g_tt + p * p, 0.0}, {0.0, w * w * g_pp}}};
    out.inverse_metric = {{{(x - grad_t * grad_t / (f * f)) / (w * w), 0.0}, {0.0, 1.0 / (x * w * w)}}};
    out.second_form = {{{(w * w * g_tt + 2.0 * p * p - w * hess_tt) / f, 0.0},
                        {0.0, (w * w * g_pp - w * hess_pp) / f}}};

    // nu = f^{-1} ((1+u) x_point - grad u); the tangent d/dt of the embedding
    // of S at (sqrt(x), 0, t) is (-t/sqrt(x), 0, 1).
    const double r = std::sqrt(x);
    const std::array<double, 3> grad = {grad_t * (-t / r), 0.0, grad_t};
    out.normal = {(w * r - grad[0]) / f, 0.0, (w * t - grad[2]) / f};
    return out;
}

double mean_curvature(const RadialProfile& u, double t) {
    const auto s = u(t);
    const auto [w, x, p, q, f] = local_quantities(s, t);
    const double grad_sq = axisym_grad_sq(s, t);
    const double lap = axisym_laplacian(s, t);
    const double hess = hessian_cubic(s, t);
    const double f3 = f * f * f;
    return 2.0 / f + grad_sq / f3 - lap / (w * f) + hess / (w * f3);
}

double mean_curvature_trace(const RadialProfile& u, double t) {
    const auto forms = fundamental_forms(u, t);
    return trace(multiply(forms.inverse_metric, forms.second_form));
}

std::array<double, 2> principal_curvatures(const ProfileSample& s, double t) {
    const auto [w, x, p, q, f] = local_quantities(s, t);
    const double f3 = f * f * f;
    const double meridian = (w * w + 2.0 * x * p * p - w * (x * q - t * p)) / f3;
    const double parallel = (w + t * p) / (w * f);
    return {meridian, parallel};
}

void check_graph_condition(const RadialProfile& u) {
    constexpr int kGrid = 4096;
    for (int i = 0; i < kGrid; ++i) {
        const double t = -1.0 + 2.0 * i / (kGrid - 1);
        const double w = 1.0 + u(t).value;
        if (!(w > 1e-6))
            throw GraphConditionError("graph condition 1 + u > 1e-6 fails at t = " + std::to_string(t));
    }
}

int surface_rule_size(int band_limit) { return std::max(64, 3 * band_limit + 64); }

SurfaceReport surface_report(const RadialProfile& u, const QuadratureRule& rule) {
    if (auto L = u.band_limit(); L && static_cast<int>(rule.size()) < nodes_for(3, *L))
        warn("surface_report: " + std::to_string(rule.size()) + " nodes for band limit " + std::to_string(*L));

    const auto& nodes = rule.nodes();
    const auto& weights = rule.weights();
    const std::size_t n = nodes.size();

    // Per-node: dA/dA_S - 1, H dA/dA_S - 2, curvatures.
    std::vector<double> jac_defect(n), h_defect(n), k1(n), k2(n), jac(n);
    CompensatedSum area_def, h_def;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = nodes[j];
        const auto s = u(t);
        const auto [w, x, p, q, f] = local_quantities(s, t);
        const double u0 = s.value;
        const double xp2 = x * p * p;
        const double w2 = w * w;
        // w f - 1 = (w^4 - 1 + w^2 x p^2) / (w f + 1)
        const double wf = w * f;
        jac[j] = wf;
        jac_defect[j] = (u0 * (2.0 + u0) * (1.0 + w2) + w2 * xp2) / (wf + 1.0);
        // H w f - 2 = u + t p + [w^2 u + (2w - 1) x p^2 - w^2 (x q - t p)] / f^2
        h_defect[j] = u0 + t * p + (w2 * u0 + (2.0 * w - 1.0) * xp2 - w2 * (x * q - t * p)) / (f * f);
        const auto kappa = principal_curvatures(s, t);
        k1[j] = kappa[0];
        k2[j] = kappa[1];
        area_def.add(weights[j] * jac_defect[j]);
        // The same defect split as (2u - Lap u) + x p^2 (w + x q - t p) / f^2; Lap u
        // integrates to zero, and dropping it keeps its rounding out of the total.
        h_def.add(weights[j] * (2.0 * u0 + xp2 * (w + x * q - t * p) / (f * f)));
    }

    SurfaceReport r;
    r.label = u.label();
    const double area_defect = 2.0 * kPi * area_def.value();
    const double h_defect_total = 2.0 * kPi * h_def.value();
    r.area = 4.0 * kPi + area_defect;
    r.total_h = 8.0 * kPi + h_defect_total;
    // sqrt(16 pi A) - 8 pi = 16 pi (A - 4 pi) / (sqrt(16 pi A) + 8 pi)
    const double root = std::sqrt(16.0 * kPi * r.area);
    r.deficit = h_defect_total - 16.0 * kPi * area_defect / (root + 8.0 * kPi);

    // H - Hbar with both sides measured from 2.
    const double hbar_minus_2 = (h_defect_total - 2.0 * area_defect) / r.area;
    CompensatedSum traceless, schur, gauss;
    for (std::size_t j = 0; j < n; ++j) {
        const double h_minus_2 = (h_defect[j] - 2.0 * jac_defect[j]) / jac[j];
        const double diff = h_minus_2 - hbar_minus_2;
        const double split = k1[j] - k2[j];
        traceless.add(weights[j] * 0.5 * split * split * jac[j]);
        schur.add(weights[j] * diff * diff * jac[j]);
        gauss.add(weights[j] * k1[j] * k2[j] * jac[j]);
    }
    r.traceless_energy = 2.0 * kPi * traceless.value();
    r.schur_lhs = 2.0 * kPi * schur.value();
    r.gauss_bonnet = 2.0 * kPi * gauss.value() / (4.0 * kPi);
    const double rhs = 2.0 * r.traceless_energy - std::sqrt(64.0 * kPi) / std::sqrt(r.area) * r.deficit -
                       r.deficit * r.deficit / r.area;
    r.schur_residual = r.schur_lhs - rhs;
    return r;
}

TaylorPieces taylor_pieces(const RadialProfile& u, const QuadratureRule& rule) {
    const auto& nodes = rule.nodes();
    const auto& weights = rule.weights();

    CompensatedSum mean_acc;
    for (std::size_t j = 0; j < nodes.size(); ++j)
        mean_acc.add(weights[j] * u(nodes[j]).value);
    const double mean = mean_acc.value() / 2.0;
    if (!(std::abs(mean) < 1e-8))
        throw PreconditionError("taylor_pieces: profile mean " + std::to_string(mean) + " is not zero");

    auto centered = RadialProfile(
        [u, mean](double t) {
            auto s = u(t);
            s.value -= mean;
            return s;
        },
        u.band_limit(), u.label());

    const auto report = surface_report(centered, rule);
    const double cubic = sphere_integrate([&](double t) { return hessian_cubic(centered(t), t); }, rule);

    TaylorPieces out;
    out.area_defect = report.area - 4.0 * kPi;
    out.mean_h_defect = (report.total_h - 8.0 * kPi) - cubic;
    out.cubic_hessian_term = cubic;
    return out;
}

void write_report_csv_header(std::ostream& out) {
    out << "label,area,total_H,deficit,traceless_energy,schur_lhs,schur_residual\n";
}

void write_report_csv_row(std::ostream& out, const SurfaceReport& r) {
    out << r.label << ',' << fmt(r.area) << ',' << fmt(r.total_h) << ',' << fmt(r.deficit) << ','
        << fmt(r.traceless_energy) << ',' << fmt(r.schur_lhs) << ',' << fmt(r.schur_residual) << '\n';
}

std::string report_to_json(const SurfaceReport& r) {
    nlohmann::ordered_json j;
    j["label"] = r.label;
    j["area"] = r.area;
    j["total_H"] = r.total_h;
    j["deficit"] = r.deficit;
    j["traceless_energy"] = r.traceless_energy;
    j["schur_lhs"] = r.schur_lhs;
    j["schur_residual"] = r.schur_residual;
    j["gauss_bonnet"] = r.gauss_bonnet;
    return j.dump();
}

} // namespace minkowski
