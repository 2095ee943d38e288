#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oe/errors.hpp"

namespace oe {

/// Exponent of a prime in a supernatural number: a natural number or infinity.
struct Exponent {
    bool infinite = false;
    unsigned long value = 0;  // ignored when infinite

    static Exponent inf() { return {true, 0}; }
    static Exponent fin(unsigned long v) { return {false, v}; }

    friend bool operator==(const Exponent&, const Exponent&) = default;
};

/// Formal product over primes q^{r_q}, r_q in N u {inf}, with finite support.
/// Identifies an odometer up to isomorphism.
class SupernaturalNumber {
public:
    SupernaturalNumber() = default;
    explicit SupernaturalNumber(std::map<mpz_class, Exponent> exps);

    const std::map<mpz_class, Exponent>& exponents() const { return exps_; }
    bool empty() const { return exps_.empty(); }

    /// r_q; zero for primes outside the support.
    Exponent exponent_of(const mpz_class& q) const;

    bool has_infinite_exponent() const;
    /// smallest prime with r_q = inf; throws NoFillerPrimeError if none.
    mpz_class smallest_infinite_prime() const;

    /// product of all prime powers; requires all exponents finite.
    mpz_class finite_product() const;

    std::string to_string() const;
    /// shorthand like "2^inf", "2^3*5^2", "2^inf*3^inf".
    static SupernaturalNumber parse(const std::string& s);

    friend bool operator==(const SupernaturalNumber&, const SupernaturalNumber&) = default;

private:
    std::map<mpz_class, Exponent> exps_;
};

/// Deterministic primality for desk-scale inputs (q < 2^64, Miller-Rabin with
/// a base set known to be exact in that range). Larger inputs are rejected.
bool is_prime(const mpz_class& q);

/// Largest r with q^r | k. Rejects k = 0 and non-prime q.
unsigned long valuation(const mpz_class& k, const mpz_class& q);

enum class Parity { Odd, Even };

class BaseSequence;

/// Max valuation per prime over the entries of the requested parity.
/// Exponents are lower bounds of the limit unless `complete` is set.
struct PrefixSupernatural {
    SupernaturalNumber sn;
    bool exact = false;  // false: every exponent is an "at-least" bound
};

PrefixSupernatural supernatural_of_prefix(const BaseSequence& seq, Parity parity,
                                          bool complete = false);

/// Deterministic enumeration of primes whose running product converges to sn:
/// round-robin over the support in increasing prime order, skipping exhausted
/// exponents. Primes with infinite exponent recur forever.
class ChunkStream {
public:
    explicit ChunkStream(SupernaturalNumber sn, std::uint64_t position = 0);

    bool exhausted() const;
    /// next prime; throws Error when exhausted.
    mpz_class next();
    std::uint64_t position() const { return position_; }

    /// pure function of (sn, index); empty optional past the end.
    static std::vector<mpz_class> prefix(const SupernaturalNumber& sn, std::uint64_t count);

private:
    SupernaturalNumber sn_;
    std::uint64_t position_ = 0;
    // per-prime count already emitted, keyed in support order
    std::vector<mpz_class> primes_;
    std::vector<Exponent> exps_;
    std::vector<std::uint64_t> emitted_;
    std::size_t cursor_ = 0;  // round-robin position
    void skip_to_live();
};

/// The interleaved base sequence (k_n), stored from index -1.
/// Entries at indices -1 and 0 are both 1.
class BaseSequence {
public:
    BaseSequence();
    /// ks listed from k_{-1}; validates all invariants.
    explicit BaseSequence(std::vector<mpz_class> ks_from_minus1);

    /// k_n for n in [-1, depth]
    const mpz_class& k(long n) const;
    /// largest stored index
    long depth() const { return static_cast<long>(ks_.size()) - 2; }

    void push_back(const mpz_class& k_next);
    /// drop the last entry (depth must stay >= 0)
    void pop_back();

    const std::vector<mpz_class>& raw() const { return ks_; }

private:
    std::vector<mpz_class> ks_;  // ks_[i] = k_{i-1}
    void validate_tail() const;
};

}  // namespace oe
