#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "oe/errors.hpp"

namespace oe {

/// Closed family of non-decreasing weight functions on Z>=0.
class OmegaFn {
public:
    enum class Family { Power, PowerLog, Log, Constant, Table };

    /// n^p with rational 0 < p <= 1
    static OmegaFn power(const mpq_class& p);
    /// n^p * (log(n+e))^q, q rational (possibly negative)
    static OmegaFn power_log(const mpq_class& p, const mpq_class& q);
    /// log(1+n)
    static OmegaFn log();
    /// constant c >= 0
    static OmegaFn constant(const mpq_class& c);
    /// finite non-decreasing table with constant extension
    static OmegaFn table(std::vector<double> values);

    Family family() const { return family_; }
    const mpq_class& p() const { return p_; }
    const mpq_class& q() const { return q_; }

    double eval(const mpz_class& n) const;
    double eval(std::uint64_t n) const;
    /// ln(omega(n)); exact in log space, so n may exceed double range.
    /// -inf when omega(n) = 0.
    double log_eval(const mpz_class& n) const;

    /// omega(n)/n -> 0, decided per family shape.
    bool is_sublinear() const;

    /// least power of two N <= cap with eval(N)/N < eps.
    /// Throws NotSublinearError for Power(1); CapExceededError past cap.
    mpz_class sublinearity_threshold(double eps, const mpz_class& cap) const;

    std::string describe() const;
    /// shorthand: "power:1/2", "powerlog:1/2:-1", "log", "const:1", "table:0,1,2"
    static OmegaFn parse(const std::string& s);

    friend bool operator==(const OmegaFn&, const OmegaFn&) = default;

private:
    OmegaFn(Family f, mpq_class p, mpq_class q, std::vector<double> tab);
    double eval_from_double(double nd) const;
    Family family_;
    mpq_class p_, q_;
    std::vector<double> table_;
};

/// ln(n) without a double-range detour; n must be positive.
double log_mpz(const mpz_class& n);

/// omega-norm value: exact-rational weights times float omega evaluations.
struct NormValue {
    double value = 0.0;
    std::string provenance;
};

}  // namespace oe
