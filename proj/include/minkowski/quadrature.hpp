#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "minkowski/errors.hpp"

namespace minkowski {

/// Gauss-Legendre rule on [-1, 1]. Immutable after construction.
class QuadratureRule {
public:
    /// n-point rule: nodes are roots of P_n found by Newton iteration from
    /// asymptotic initial guesses.
    static QuadratureRule gauss_legendre(int n);

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return nodes_.size(); }
    /// Largest polynomial degree integrated exactly (2n - 1).
    int exact_degree() const { return 2 * static_cast<int>(nodes_.size()) - 1; }

private:
    QuadratureRule(std::vector<double> nodes, std::vector<double> weights);

    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Node count for a product of `factors` Legendre factors of degree at most
/// `max_degree`, including derivative weights: ceil((m L + 4) / 2) + 8.
int nodes_for(int factors, int max_degree);

/// Shared, lazily built rule of n nodes. Thread-safe.
const QuadratureRule& gauss_rule(int n);

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// 2 pi sum_j w_j f(t_j): the sphere integral of an axisymmetric integrand.
/// Warns when `required_degree` exceeds the rule's exact degree.
template <typename F>
double sphere_integrate(F&& integrand, const QuadratureRule& rule,
                        std::optional<int> required_degree = std::nullopt) {
    if (required_degree && *required_degree > rule.exact_degree()) {
        warn("sphere_integrate: integrand degree " + std::to_string(*required_degree) +
             " exceeds rule capacity " + std::to_string(rule.exact_degree()));
    }
    CompensatedSum acc;
    const auto& t = rule.nodes();
    const auto& w = rule.weights();
    for (std::size_t j = 0; j < t.size(); ++j)
        acc.add(w[j] * integrand(t[j]));
    return 2.0 * std::numbers::pi * acc.value();
}

} // namespace minkowski
