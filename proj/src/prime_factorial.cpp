#include "minkowski/prime_factorial.hpp"

#include <algorithm>
#include <stdexcept>

#include "minkowski/errors.hpp"

namespace minkowski {

namespace {

constexpr int kSieveLimit = 1 << 21;

const std::vector<int>& sieve() {
    static const std::vector<int> primes = [] {
        std::vector<bool> composite(kSieveLimit + 1, false);
        std::vector<int> out;
        for (int i = 2; i <= kSieveLimit; ++i) {
            if (composite[i])
                continue;
            out.push_back(i);
            for (long long j = 1LL * i * i; j <= kSieveLimit; j += i)
                composite[static_cast<std::size_t>(j)] = true;
        }
        return out;
    }();
    return primes;
}

mpz_class product_tree(std::vector<mpz_class>& factors, std::size_t lo, std::size_t hi) {
    if (hi - lo == 0)
        return 1;
    if (hi - lo == 1)
        return factors[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return product_tree(factors, lo, mid) * product_tree(factors, mid, hi);
}

mpz_class power_product(std::span<const int> primes, const std::vector<int>& exps, int sign) {
    std::vector<mpz_class> factors;
    for (std::size_t i = 0; i < exps.size(); ++i) {
        const int e = sign * exps[i];
        if (e <= 0)
            continue;
        mpz_class f;
        mpz_ui_pow_ui(f.get_mpz_t(), static_cast<unsigned long>(primes[i]), static_cast<unsigned long>(e));
        factors.push_back(std::move(f));
    }
    return product_tree(factors, 0, factors.size());
}

int largest_prime_at_most(int n) {
    const auto& primes = sieve();
    auto it = std::upper_bound(primes.begin(), primes.end(), n);
    return it == primes.begin() ? 0 : *(it - 1);
}

} // namespace

std::span<const int> primes_up_to(int limit) {
    if (limit > kSieveLimit)
        throw CapacityError("prime table limited to " + std::to_string(kSieveLimit));
    const auto& primes = sieve();
    auto end = std::upper_bound(primes.begin(), primes.end(), limit);
    return {primes.data(), static_cast<std::size_t>(end - primes.begin())};
}

std::int64_t factorial_exponent(std::int64_t n, std::int64_t p) {
    std::int64_t e = 0;
    while (n > 0) {
        n /= p;
        e += n;
    }
    return e;
}

FactoredRational::FactoredRational(int max_prime)
    : primes_(primes_up_to(std::max(max_prime, 2))), exponents_(primes_.size(), 0) {}

void FactoredRational::mul_factorial(int n, int power) {
    if (n < 0)
        throw PreconditionError("factorial of a negative number");
    if (n > 1 && (primes_.empty() || primes_.back() < largest_prime_at_most(n)))
        throw PreconditionError("factorial argument beyond prime table");
    for (std::size_t i = 0; i < primes_.size() && primes_[i] <= n; ++i)
        exponents_[i] += power * static_cast<int>(factorial_exponent(n, primes_[i]));
}

void FactoredRational::mul_integer(int n, int power) {
    if (n < 1)
        throw PreconditionError("integer factor must be positive");
    for (std::size_t i = 0; i < primes_.size() && n > 1; ++i) {
        const int p = primes_[i];
        if (1LL * p * p > n) {
            auto it = std::lower_bound(primes_.begin(), primes_.end(), n);
            if (it == primes_.end() || *it != n)
                throw PreconditionError("integer factor beyond prime table");
            exponents_[static_cast<std::size_t>(it - primes_.begin())] += power;
            return;
        }
        while (n % p == 0) {
            n /= p;
            exponents_[i] += power;
        }
    }
}

mpz_class FactoredRational::numerator() const { return power_product(primes_, exponents_, +1); }

mpz_class FactoredRational::denominator() const { return power_product(primes_, exponents_, -1); }

mpq_class FactoredRational::to_rational() const {
    mpq_class q(numerator(), denominator());
    return q; // already in lowest terms: numerator and denominator share no prime
}

mpz_class factorial(int n) {
    FactoredRational f(std::max(n, 2));
    f.mul_factorial(n);
    return f.numerator();
}

} // namespace minkowski
