#include "minkowski/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace minkowski {

QuadratureRule::QuadratureRule(std::vector<double> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {}

QuadratureRule QuadratureRule::gauss_legendre(int n) {
    if (n < 1)
        throw PreconditionError("quadrature rule needs at least one node");

    std::vector<double> x(n), w(n);
    const int half = (n + 1) / 2;
    const double dn = n;
    for (int i = 0; i < half; ++i) {
        // Tricomi's asymptotic guess for the (i+1)-th largest root.
        const double theta = std::numbers::pi * (4.0 * i + 3.0) / (4.0 * dn + 2.0);
        double z = (1.0 - (dn - 1.0) / (8.0 * dn * dn * dn)) * std::cos(theta);
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = z;
            for (int l = 1; l < n; ++l) {
                const double p2 = ((2.0 * l + 1.0) * z * p1 - l * p0) / (l + 1.0);
                p0 = p1;
                p1 = p2;
            }
            // n == 1: P_1 = z, P_0 = 1
            const double pn = (n == 1) ? z : p1;
            const double pm = (n == 1) ? 1.0 : p0;
            dp = dn * (z * pn - pm) / (z * z - 1.0);
            const double dz = pn / dp;
            z -= dz;
            if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z)))
                break;
        }
        // Derivative at the converged root for the weight.
        double p0 = 1.0, p1 = z;
        for (int l = 1; l < n; ++l) {
            const double p2 = ((2.0 * l + 1.0) * z * p1 - l * p0) / (l + 1.0);
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : dn * (z * p1 - p0) / (z * z - 1.0);
        const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if (n % 2 == 1)
        x[n / 2] = 0.0;
    return QuadratureRule(std::move(x), std::move(w));
}

int nodes_for(int factors, int max_degree) {
    const int degree = factors * max_degree + 4;
    return (degree + 1) / 2 + 8;
}

const QuadratureRule& gauss_rule(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<QuadratureRule>> rules;
    std::lock_guard lock(mutex);
    auto& slot = rules[n];
    if (!slot)
        slot = std::make_unique<QuadratureRule>(QuadratureRule::gauss_legendre(n));
    return *slot;
}

} // namespace minkowski
