#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include "minkowski/legendre_basis.hpp"
#include "minkowski/quadrature.hpp"

namespace minkowski {

/// 2x2 tensor in the (t, azimuth) chart of the unit sphere.
using Mat2 = std::array<std::array<double, 2>, 2>;

Mat2 multiply(const Mat2& a, const Mat2& b);
double trace(const Mat2& a);
double determinant(const Mat2& a);

/// Forms of Sigma(u) = {(1 + u(x)) x} at the meridian point with third
/// coordinate t, in the chart (t, azimuth). Valid for |t| < 1.
struct FundamentalForms {
    Mat2 metric{};          // g(u) = (1+u)^2 g + du (x) du
    Mat2 inverse_metric{};  // (1+u)^{-2} (g^{-1} - f^{-2} grad u (x) grad u)
    Mat2 second_form{};     // f^{-1} [(1+u)^2 g + 2 du (x) du - (1+u) Hess u]
    std::array<double, 3> normal{}; // outward unit normal at (sqrt(1-t^2), 0, t)
};

/// f(u) = sqrt((1+u)^2 + |grad u|^2). Throws GraphConditionError if 1+u <= 0.
double shape_factor(const RadialProfile& u, double t);

FundamentalForms fundamental_forms(const RadialProfile& u, double t);

/// H = 2/f + |grad u|^2/f^3 - Lap u/((1+u) f) + Hess u(grad u, grad u)/((1+u) f^3).
double mean_curvature(const RadialProfile& u, double t);
/// trace(g(u)^{-1} h(u)) from fundamental_forms; independent of the closed form.
double mean_curvature_trace(const RadialProfile& u, double t);

/// Principal curvatures (meridian, parallel), division-free at the poles.
std::array<double, 2> principal_curvatures(const ProfileSample& s, double t);

/// Throws GraphConditionError unless 1 + u > 1e-6 on a 4096-point grid.
void check_graph_condition(const RadialProfile& u);

struct SurfaceReport {
    std::string label;
    double area = 0.0;
    double total_h = 0.0;
    double deficit = 0.0;
    double traceless_energy = 0.0;
    double schur_lhs = 0.0;
    double schur_residual = 0.0;
    /// (1/4pi) int_Sigma K, equal to 1 for genus zero.
    double gauss_bonnet = 0.0;
};

/// Node count for surface integrals of a profile with the given band limit.
int surface_rule_size(int band_limit);

/// Area, total mean curvature, Minkowski deficit, traceless energy and the
/// Gauss-Bonnet / Schur identity residual, by quadrature on interior nodes.
/// Defects from the unit sphere are accumulated in cancellation-free form.
SurfaceReport surface_report(const RadialProfile& u, const QuadratureRule& rule);

struct TaylorPieces {
    double area_defect = 0.0;        // |Sigma(u)| - 4 pi
    double mean_h_defect = 0.0;      // int H - 8 pi - int Hess u(grad u, grad u)
    double cubic_hessian_term = 0.0; // int_S Hess u(grad u, grad u)
};

/// Requires int_S u = 0: a quadrature mean (1/4pi) int u below 1e-8 in
/// magnitude is subtracted, anything larger throws PreconditionError.
TaylorPieces taylor_pieces(const RadialProfile& u, const QuadratureRule& rule);

/// Column order: label,area,total_H,deficit,traceless_energy,schur_lhs,schur_residual
void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, const SurfaceReport& r);
std::string report_to_json(const SurfaceReport& r);

} // namespace minkowski
