#include "minkowski/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <mutex>
#include <numbers>
#include <ostream>
#include <shared_mutex>
#include <unordered_map>

#include "minkowski/errors.hpp"
#include "minkowski/prime_factorial.hpp"
#include "minkowski/quadrature.hpp"

namespace minkowski {

namespace {

constexpr int kMaxDegreeSumCap = 1 << 20;
constexpr std::size_t kShards = 16;

std::shared_mutex settings_mutex;
WignerSettings current_settings;

int degree_sum_cap() {
    std::shared_lock lock(settings_mutex);
    return current_settings.degree_sum_cap;
}

void check_degrees(int l1, int l2, int l3) {
    if (l1 < 0 || l2 < 0 || l3 < 0)
        throw PreconditionError("3j degrees must be non-negative");
    const long long sum = 1LL * l1 + l2 + l3;
    if (sum > degree_sum_cap())
        throw CapacityError("3j degree sum " + std::to_string(sum) + " exceeds cap " +
                            std::to_string(degree_sum_cap()));
}

std::uint64_t cache_key(int l1, int l2, int l3) {
    std::array<int, 3> d{l1, l2, l3};
    std::sort(d.begin(), d.end());
    return (static_cast<std::uint64_t>(d[0]) << 42) | (static_cast<std::uint64_t>(d[1]) << 21) |
           static_cast<std::uint64_t>(d[2]);
}

// One shard of the LRU memo. Values are stored for the sorted triple; the
// caller restores the requested degree order.
class LruShard {
public:
    bool get(std::uint64_t key, ThreeJZero& out) {
        std::lock_guard lock(mutex_);
        auto it = index_.find(key);
        if (it == index_.end())
            return false;
        entries_.splice(entries_.begin(), entries_, it->second);
        out = it->second->second;
        return true;
    }

    // Concurrent inserts of the same key carry identical values, so a lost
    // race simply keeps the first one.
    void put(std::uint64_t key, const ThreeJZero& value, std::size_t capacity) {
        std::lock_guard lock(mutex_);
        if (index_.count(key))
            return;
        entries_.emplace_front(key, value);
        index_[key] = entries_.begin();
        while (entries_.size() > capacity && !entries_.empty()) {
            index_.erase(entries_.back().first);
            entries_.pop_back();
        }
    }

    void clear() {
        std::lock_guard lock(mutex_);
        entries_.clear();
        index_.clear();
    }

    std::size_t size() {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

private:
    std::mutex mutex_;
    std::list<std::pair<std::uint64_t, ThreeJZero>> entries_;
    std::unordered_map<std::uint64_t, std::list<std::pair<std::uint64_t, ThreeJZero>>::iterator> index_;
};

std::array<LruShard, kShards>& cache() {
    static std::array<LruShard, kShards> shards;
    return shards;
}

// b_k = binom(2k, k) / 4^k = prod_{j<=k} (2j - 1) / (2j), accumulated in long
// double so the relative error stays near 1e-17 * sqrt(k).
const std::vector<long double>& central_ratio_table() {
    static const std::vector<long double> table = [] {
        std::vector<long double> b(kMaxDegreeSumCap / 2 + 2);
        b[0] = 1.0L;
        for (std::size_t k = 1; k < b.size(); ++k)
            b[k] = b[k - 1] * static_cast<long double>(2 * k - 1) / static_cast<long double>(2 * k);
        return b;
    }();
    return table;
}

} // namespace

WignerSettings wigner_settings() {
    std::shared_lock lock(settings_mutex);
    return current_settings;
}

void configure_wigner(const WignerSettings& settings) {
    if (settings.degree_sum_cap < 0 || settings.degree_sum_cap > kMaxDegreeSumCap)
        throw PreconditionError("degree_sum_cap must lie in [0, " + std::to_string(kMaxDegreeSumCap) + "]");
    if (settings.cache_capacity < kShards)
        throw PreconditionError("cache_capacity too small");
    {
        std::unique_lock lock(settings_mutex);
        current_settings = settings;
    }
    for (auto& shard : cache())
        shard.clear();
}

TriangleRange triangle_range(int l1, int l2) {
    if (l1 < 0 || l2 < 0)
        throw PreconditionError("triangle_range degrees must be non-negative");
    return TriangleRange(std::abs(l1 - l2), l1 + l2);
}

bool threej_admissible(int l1, int l2, int l3) {
    if (l1 < 0 || l2 < 0 || l3 < 0)
        return false;
    if ((l1 + l2 + l3) % 2 != 0)
        return false;
    return std::abs(l1 - l2) <= l3 && l3 <= l1 + l2;
}

ThreeJZero threej_zero_uncached(int l1, int l2, int l3) {
    check_degrees(l1, l2, l3);
    ThreeJZero out;
    out.degrees = {l1, l2, l3};
    if (!threej_admissible(l1, l2, l3)) {
        out.square = 0;
        return out;
    }
    const int a = l2 + l3 - l1;
    const int b = l1 + l3 - l2;
    const int c = l1 + l2 - l3;
    const int j = l1 + l2 + l3;
    const int g = j / 2;

    FactoredRational sq(j + 1);
    sq.mul_factorial(a);
    sq.mul_factorial(b);
    sq.mul_factorial(c);
    sq.mul_factorial(j + 1, -1);
    sq.mul_factorial(g, 2);
    sq.mul_factorial(a / 2, -2);
    sq.mul_factorial(b / 2, -2);
    sq.mul_factorial(c / 2, -2);

    out.square = sq.to_rational();
    out.sign = (g % 2 == 0) ? 1 : -1;
    out.value = threej_float(l1, l2, l3);
    return out;
}

ThreeJZero threej_zero(int l1, int l2, int l3) {
    check_degrees(l1, l2, l3);
    const auto key = cache_key(l1, l2, l3);
    auto& shard = cache()[key % kShards];
    ThreeJZero out;
    if (!shard.get(key, out)) {
        out = threej_zero_uncached(l1, l2, l3);
        shard.put(key, out, wigner_settings().cache_capacity / kShards);
    }
    out.degrees = {l1, l2, l3};
    return out;
}

std::size_t threej_cache_size() {
    std::size_t n = 0;
    for (auto& shard : cache())
        n += shard.size();
    return n;
}

double threej_square_float(int l1, int l2, int l3) {
    if (!threej_admissible(l1, l2, l3))
        return 0.0;
    if (l1 + l2 + l3 > kMaxDegreeSumCap)
        throw CapacityError("3j degree sum exceeds float table");
    const auto& b = central_ratio_table();
    const int j = l1 + l2 + l3;
    const long double num = b[(l2 + l3 - l1) / 2] * b[(l1 + l3 - l2) / 2] * b[(l1 + l2 - l3) / 2];
    return static_cast<double>(num / (b[j / 2] * static_cast<long double>(j + 1)));
}

double threej_float(int l1, int l2, int l3) {
    const double sq = threej_square_float(l1, l2, l3);
    if (sq == 0.0)
        return 0.0;
    const int g = (l1 + l2 + l3) / 2;
    return (g % 2 == 0 ? 1.0 : -1.0) * std::sqrt(sq);
}

std::vector<std::pair<int, Rational>> gaunt_expand(int l1, int l2) {
    std::vector<std::pair<int, Rational>> out;
    for (int l : triangle_range(l1, l2)) {
        if ((l1 + l2 + l) % 2 != 0)
            continue;
        const auto tj = threej_zero(l1, l2, l);
        out.emplace_back(l, Rational(2 * l + 1) * tj.square);
    }
    return out;
}

GauntMoments gaunt_moments(int l1, int l2) {
    const auto range = triangle_range(l1, l2);
    check_degrees(l1, l2, range.hi());
    const int j_max = l1 + l2 + range.hi();
    const mpz_class common = factorial(j_max + 1);

    // term_l = (3j)^2 * common, an integer because (J+1)! divides common and
    // (J+1)! (3j)^2 = A! B! C! * multinomial^2.
    const auto first = threej_zero_uncached(l1, l2, range.lo());
    mpz_class term = first.square.get_num() * (common / first.square.get_den());

    mpz_class norm_sum = 0;
    mpz_class weighted_sum = 0;
    for (int l3 = range.lo();; l3 += 2) {
        norm_sum += term * static_cast<unsigned long>(2 * l3 + 1);
        weighted_sum += term * static_cast<unsigned long>(l3);
        if (l3 + 2 > range.hi())
            break;
        const unsigned long a = static_cast<unsigned long>(l2 + l3 - l1);
        const unsigned long b = static_cast<unsigned long>(l1 + l3 - l2);
        const unsigned long c = static_cast<unsigned long>(l1 + l2 - l3);
        const unsigned long j = static_cast<unsigned long>(l1 + l2 + l3);
        const unsigned long g = j / 2;
        // (3j)^2 at l3 + 2 over (3j)^2 at l3.
        const unsigned long up[] = {a + 1, a + 2, b + 1, b + 2, g + 1, g + 1, c / 2, c / 2};
        const unsigned long down[] = {c, c - 1, j + 2, j + 3, a / 2 + 1, a / 2 + 1, b / 2 + 1, b / 2 + 1};
        for (unsigned long f : up)
            mpz_mul_ui(term.get_mpz_t(), term.get_mpz_t(), f);
        for (unsigned long f : down)
            mpz_divexact_ui(term.get_mpz_t(), term.get_mpz_t(), f);
    }

    GauntMoments out;
    out.normalization = Rational(norm_sum, common);
    out.normalization.canonicalize();
    out.weighted = Rational(weighted_sum, common);
    out.weighted.canonicalize();
    return out;
}

PathLattice::PathLattice(std::vector<int> degrees) : degrees_(std::move(degrees)) {
    for (int d : degrees_)
        if (d < 0)
            throw PreconditionError("path lattice degrees must be non-negative");
}

double PathLattice::size() const {
    if (degrees_.empty())
        return 0.0;
    int reach = degrees_[0];
    std::vector<double> counts(static_cast<std::size_t>(reach) + 1, 0.0);
    counts[static_cast<std::size_t>(reach)] = 1.0;
    for (std::size_t i = 1; i < degrees_.size(); ++i) {
        const int l = degrees_[i];
        const int next_reach = reach + l;
        std::vector<double> next(static_cast<std::size_t>(next_reach) + 1, 0.0);
        for (int z = 0; z <= reach; ++z) {
            const double c = counts[static_cast<std::size_t>(z)];
            if (c == 0.0)
                continue;
            for (int y = std::abs(z - l); y <= z + l; ++y)
                next[static_cast<std::size_t>(y)] += c;
        }
        counts = std::move(next);
        reach = next_reach;
    }
    double total = 0.0;
    for (double c : counts)
        total += c;
    return total;
}

namespace {

template <typename Value, typename Square>
Value lattice_sum(std::span<const int> degrees, double path_budget, Square square) {
    const std::size_t m = degrees.size();
    if (m < 2)
        throw PreconditionError("m_product_integral needs at least two factors");
    for (int d : degrees)
        if (d < 0)
            throw PreconditionError("degrees must be non-negative");

    const int last = degrees[m - 1];
    if (m == 2)
        return degrees[0] == last ? Value(1) / Value(2 * last + 1) : Value(0);

    PathLattice lattice(std::vector<int>(degrees.begin(), degrees.end() - 1));
    const double size = lattice.size();
    if (size > path_budget)
        throw BudgetExceeded("m_product_integral path lattice", size, path_budget);

    // reach[i]: total degree still available after level i (levels 1..m-2).
    std::vector<int> reach(m, 0);
    for (std::size_t i = m - 1; i-- > 1;)
        reach[i - 1] = reach[i] + degrees[i];

    Value total(0);
    auto walk = [&](auto&& self, std::size_t level, int z, const Value& weight) -> void {
        if (level == m - 1) {
            if (z == last)
                total += weight / Value(2 * last + 1);
            return;
        }
        const int l = degrees[level];
        // Parity: z + l + next must be even, so step by two from |z - l|.
        for (int next = std::abs(z - l); next <= z + l; next += 2) {
            if (std::abs(next - last) > reach[level])
                continue;
            self(self, level + 1, next, weight * Value(2 * next + 1) * square(z, l, next));
        }
    };
    walk(walk, 1, degrees[0], Value(1));
    return total;
}

} // namespace

Rational m_product_integral(std::span<const int> degrees, double path_budget) {
    auto result = lattice_sum<Rational>(degrees, path_budget,
                                        [](int a, int b, int c) { return threej_zero(a, b, c).square; });
    result.canonicalize();
    return result;
}

double m_product_integral_float(std::span<const int> degrees, double path_budget) {
    return lattice_sum<double>(degrees, path_budget, threej_square_float);
}

double a_seq(long long k) {
    if (k < 1)
        throw PreconditionError("a_k is defined for k >= 1");
    const double dk = static_cast<double>(k);
    const double log_a = 0.5 * std::lgamma(2.0 * dk + 1.0) - std::lgamma(dk + 1.0) +
                         0.25 * std::log(2.0 * dk) - dk * std::numbers::ln2;
    return std::exp(log_a);
}

double a_seq_limit() { return std::pow(2.0 / std::numbers::pi, 0.25); }

double scaled_threej(int l1, int l2, int l3) {
    if (l1 < 0 || l2 < 0 || !triangle_range(l1, l2).contains(l3))
        throw PreconditionError("scaled_threej: l3 outside the triangle range");
    if ((l1 + l2 + l3) % 4 != 0)
        throw PreconditionError("scaled_threej: degree sum must be 0 mod 4");
    return static_cast<double>(l1 + l2 + l3) * threej_float(l1, l2, l3);
}

double upper_bound_statistic(int l1, int l2, int l3) {
    if (l1 < 0 || l2 < 0 || !triangle_range(l1, l2).contains(l3))
        throw PreconditionError("upper_bound_statistic: l3 outside the triangle range");
    const double weight = static_cast<double>(l1 + l2 - l3 + 1) * (l1 + l3 - l2 + 1) *
                          (l2 + l3 - l1 + 1) * (l1 + l2 + l3 + 1);
    return std::abs(threej_float(l1, l2, l3)) * std::pow(weight, 0.25);
}

double weighted_sum(int l1, int l2) {
    const auto range = triangle_range(l1, l2);
    CompensatedSum sum;
    for (int l = range.lo(); l <= range.hi(); l += 2)
        sum.add(l * threej_square_float(l1, l2, l));
    return sum.value();
}

Rational weighted_sum_exact(int l1, int l2) { return gaunt_moments(l1, l2).weighted; }

void write_threej_csv(std::ostream& out, std::span<const ThreeJZero> table) {
    out << "l1,l2,l3,sign,numerator,denominator\n";
    for (const auto& t : table) {
        out << t.degrees[0] << ',' << t.degrees[1] << ',' << t.degrees[2] << ',' << t.sign << ','
            << t.square.get_num().get_str() << ',' << t.square.get_den().get_str() << '\n';
    }
}

} // namespace minkowski
