#pragma once

#include <gmpxx.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace minkowski {

using Rational = mpq_class;

/// Wigner 3j symbol (l1 l2 l3; 0 0 0): exact square, sign and a double value.
struct ThreeJZero {
    std::array<int, 3> degrees{};
    int sign = 0;       // -1, 0 or +1
    Rational square;    // (3j)^2, in lowest terms
    double value = 0.0; // signed 3j as a double

    bool is_zero() const { return sign == 0; }
};

/// Process-wide knobs of the 3j machinery.
struct WignerSettings {
    int degree_sum_cap = 100000;
    std::size_t cache_capacity = std::size_t{1} << 22;
};

WignerSettings wigner_settings();
/// Replaces the settings and clears the memo cache.
void configure_wigner(const WignerSettings& settings);

/// Inclusive range |l1 - l2| .. l1 + l2 of degrees admissible in a product.
class TriangleRange {
public:
    class iterator {
    public:
        using value_type = int;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        explicit iterator(int v) : v_(v) {}
        int operator*() const { return v_; }
        iterator& operator++() { ++v_; return *this; }
        iterator operator++(int) { auto old = *this; ++v_; return old; }
        bool operator==(const iterator&) const = default;

    private:
        int v_ = 0;
    };

    TriangleRange(int lo, int hi) : lo_(lo), hi_(hi) {}

    int lo() const { return lo_; }
    int hi() const { return hi_; }
    int size() const { return hi_ - lo_ + 1; }
    bool contains(int l) const { return lo_ <= l && l <= hi_; }
    iterator begin() const { return iterator(lo_); }
    iterator end() const { return iterator(hi_ + 1); }

private:
    int lo_;
    int hi_;
};

TriangleRange triangle_range(int l1, int l2);

/// True iff l3 is in the triangle range of (l1, l2) and the sum is even.
bool threej_admissible(int l1, int l2, int l3);

/// Exact 3j at zero magnetic numbers via prime-factorized factorials.
/// Memoized by the sorted triple in a bounded LRU cache; safe to call from
/// several threads. Throws CapacityError when l1 + l2 + l3 exceeds the cap.
ThreeJZero threej_zero(int l1, int l2, int l3);

/// Same value without touching the cache.
ThreeJZero threej_zero_uncached(int l1, int l2, int l3);

/// Number of entries currently cached.
std::size_t threej_cache_size();

/// (3j)^2 in double precision from a table of central-binomial ratios
/// b_k = binom(2k, k) / 4^k:  (3j)^2 = b_{A/2} b_{B/2} b_{C/2} / (b_{J/2} (J + 1)).
/// Relative error ~1e-15 up to the degree-sum cap. No cache, no allocation.
double threej_square_float(int l1, int l2, int l3);
/// Signed double-precision 3j.
double threej_float(int l1, int l2, int l3);

/// Coefficients of v_{l1} v_{l2} = sum_l (2l+1) (3j)^2 v_l; zero entries omitted.
std::vector<std::pair<int, Rational>> gaunt_expand(int l1, int l2);

/// Exact sums over the triangle range of (l1, l2).
struct GauntMoments {
    Rational normalization; // sum (2l+1) (3j)^2, equal to 1
    Rational weighted;      // sum l (3j)^2
};

/// Evaluates both sums exactly with one factorial evaluation per pair: every
/// term is rescaled to the common denominator (l1+l2+hi+1)! and consecutive
/// terms differ by a ratio of small integers.
GauntMoments gaunt_moments(int l1, int l2);

/// Chained triangle-admissible tuples z with z_1 = l_1 and z_i in Gamma(z_{i-1}, l_i).
class PathLattice {
public:
    explicit PathLattice(std::vector<int> degrees);

    const std::vector<int>& degrees() const { return degrees_; }
    /// Number of tuples (ignoring parity), as a double since it grows fast.
    double size() const;

    /// Calls visit(std::span<const int> z) for every tuple, depth first.
    template <typename Visit>
    void for_each(Visit&& visit) const {
        if (degrees_.empty())
            return;
        std::vector<int> z(degrees_.size());
        z[0] = degrees_[0];
        walk(z, 1, visit);
    }

private:
    template <typename Visit>
    void walk(std::vector<int>& z, std::size_t level, Visit& visit) const {
        if (level == degrees_.size()) {
            visit(std::span<const int>(z));
            return;
        }
        for (int next : triangle_range(z[level - 1], degrees_[level])) {
            z[level] = next;
            walk(z, level + 1, visit);
        }
    }

    std::vector<int> degrees_;
};

/// (1/4pi) int_S prod_i v_{l_i}, exact, by depth-first summation over the path
/// lattice of (l_1, ..., l_{m-1}) with parity pruning. Throws BudgetExceeded
/// when the lattice is larger than `path_budget`.
Rational m_product_integral(std::span<const int> degrees, double path_budget = 1e7);
/// Double-precision variant of the same lattice sum.
double m_product_integral_float(std::span<const int> degrees, double path_budget = 1e7);

/// a_k = sqrt((2k)!) / k! * (2k)^{1/4} / 2^k, evaluated with log-gamma.
double a_seq(long long k);
/// Limit of a_k: (2/pi)^{1/4}.
double a_seq_limit();

/// (l1 + l2 + l3) * 3j(l1, l2, l3). Requires l3 in Gamma(l1, l2) and sum = 0 mod 4.
double scaled_threej(int l1, int l2, int l3);

/// |3j| [(l1+l2-l3+1)(l1+l3-l2+1)(l2+l3-l1+1)(l1+l2+l3+1)]^{1/4}.
double upper_bound_statistic(int l1, int l2, int l3);

/// sum_{l in Gamma(l1, l2)} l (3j)^2 in double precision.
double weighted_sum(int l1, int l2);
/// Exact-rational variant.
Rational weighted_sum_exact(int l1, int l2);

/// CSV audit dump, columns l1,l2,l3,sign,numerator,denominator.
void write_threej_csv(std::ostream& out, std::span<const ThreeJZero> table);

} // namespace minkowski
