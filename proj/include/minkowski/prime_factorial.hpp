#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <vector>

namespace minkowski {

/// Primes up to `limit` (inclusive), from a shared sieve. Thread-safe.
std::span<const int> primes_up_to(int limit);

/// A positive rational held as prime exponents, prod_i p_i^{e_i}. Products
/// and quotients of factorials stay exact and automatically reduced.
class FactoredRational {
public:
    explicit FactoredRational(int max_prime);

    /// Multiplies by (n!)^power (power may be negative).
    void mul_factorial(int n, int power = 1);
    /// Multiplies by n^power for n >= 1.
    void mul_integer(int n, int power = 1);

    const std::vector<int>& exponents() const { return exponents_; }
    std::span<const int> primes() const { return primes_; }

    mpz_class numerator() const;
    mpz_class denominator() const;
    mpq_class to_rational() const;

private:
    std::span<const int> primes_;
    std::vector<int> exponents_;
};

/// Exponent of prime p in n! (Legendre's formula).
std::int64_t factorial_exponent(std::int64_t n, std::int64_t p);

/// n! assembled from its prime factorization with a balanced product tree.
mpz_class factorial(int n);

} // namespace minkowski
