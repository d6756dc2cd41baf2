#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace minkowski {

/// P_l(t) together with its first two derivatives.
struct LegendreSample {
    int degree = 0;
    double point = 0.0;
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Evaluates P_l and its derivatives with the three-term recurrence
/// (l+1) P_{l+1} = (2l+1) t P_l - l P_{l-1}
/// and the derivative recurrences P'_{l+1} = P'_{l-1} + (2l+1) P_l,
/// P''_{l+1} = P''_{l-1} + (2l+1) P'_l. Throws DomainError for t outside [-1, 1].
LegendreSample legendre_eval(int degree, double t);

/// Zonal harmonic v_l evaluated at third coordinate t: P_l(-t).
double v_eval(int degree, double t);

/// P_0..P_L with derivatives at a single point, filled in one recurrence pass.
struct LegendreTable {
    std::vector<double> p;
    std::vector<double> dp;
    std::vector<double> d2p;

    void fill(int max_degree, double t);
};

/// (phi, d phi/dt, d^2 phi/dt^2) of an axisymmetric function at t = x^3.
struct ProfileSample {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// An axisymmetric function on the unit sphere, given as a function of the
/// third coordinate t in [-1, 1].
class RadialProfile {
public:
    using Evaluator = std::function<ProfileSample(double)>;

    RadialProfile(Evaluator evaluator, std::optional<int> band_limit, std::string label);

    ProfileSample operator()(double t) const { return evaluator_(t); }
    std::optional<int> band_limit() const { return band_limit_; }
    const std::string& label() const { return label_; }

    static RadialProfile constant(double c);
    /// c * v_l.
    static RadialProfile zonal(int degree, double coefficient = 1.0);
    /// Profile u_s with 1 + u_s = scale * (1 + u).
    RadialProfile dilated(double scale) const;
    RadialProfile scaled(double factor) const;

private:
    Evaluator evaluator_;
    std::optional<int> band_limit_;
    std::string label_;
};

// Pointwise axisymmetric calculus on S in the coordinate t = x^3. The metric
// is dt^2/(1-t^2) + (1-t^2) dphi^2.

/// |grad phi|^2 = (1-t^2) phi_t^2.
double axisym_grad_sq(const ProfileSample& s, double t);
double axisym_grad_sq(const RadialProfile& phi, double t);

/// Laplace-Beltrami: d/dt[(1-t^2) phi_t].
double axisym_laplacian(const ProfileSample& s, double t);
double axisym_laplacian(const RadialProfile& phi, double t);

/// Hess phi(grad phi, grad phi) = 1/2 <grad phi, grad |grad phi|^2>
///                              = (1-t^2) phi_t^2 [(1-t^2) phi_tt - t phi_t].
double hessian_cubic(const ProfileSample& s, double t);
double hessian_cubic(const RadialProfile& phi, double t);

/// Sup-norms of |phi| and |grad phi| over S.
struct SupNorms {
    double c0 = 0.0;
    double grad = 0.0;
    double c1() const { return c0 + grad; }
};

/// Dense sampling (4 * max_degree + 64 points, uniform in polar angle) followed
/// by Chebyshev refinement around the largest samples.
SupNorms sup_norms(const RadialProfile& phi, int max_degree);

} // namespace minkowski
