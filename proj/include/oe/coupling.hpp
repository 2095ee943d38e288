#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "oe/errors.hpp"
#include "oe/omega.hpp"
#include "oe/supernatural.hpp"

namespace oe {

template <class Int>
struct signed_of {
    using type = Int;
};
template <>
struct signed_of<std::uint64_t> {
    using type = std::int64_t;
};
template <class Int>
using signed_of_t = typename signed_of<Int>::type;

/// View over a base sequence indexed from -1: ks[0] holds k_{-1}.
template <class Int>
struct KSpan {
    std::span<const Int> ks;

    const Int& k(long n) const {
        if (n < -1 || n + 1 >= static_cast<long>(ks.size()))
            throw Error("k index out of range: " + std::to_string(n));
        return ks[static_cast<std::size_t>(n + 1)];
    }
    long depth() const { return static_cast<long>(ks.size()) - 2; }
};

inline KSpan<mpz_class> kspan(const BaseSequence& seq) { return {std::span(seq.raw())}; }

/// The two nested Euclidean divisions behind the level-n step:
/// x = a*k_{n+1} + b,  k_{n+1} = c*K + d,  b = e*K + f  with K = k_{n-1}k_n.
template <class Int>
struct EuclideanDecomposition {
    Int a, b, c, d, e, f;
};

template <class Int>
EuclideanDecomposition<Int> decompose(const KSpan<Int>& kv, long n, const Int& x) {
    EuclideanDecomposition<Int> out;
    const Int K = kv.k(n - 1) * kv.k(n);
    const Int& kn1 = kv.k(n + 1);
    out.a = x / kn1;
    out.b = x % kn1;
    out.c = kn1 / K;
    out.d = kn1 % K;
    out.e = out.b / K;
    out.f = out.b % K;
    return out;
}

template <class Int>
Int psi_eval(const KSpan<Int>& kv, long n, const Int& x);

/// psi_n^{-1} on [k_{n-1}k_n]; exact inverse of psi_eval.
template <class Int>
Int psi_inv_eval(const KSpan<Int>& kv, long n, const Int& y) {
    if (n < 1 || n > kv.depth()) throw Error("psi_inv_eval: level out of range");
    const Int dom = kv.k(n - 1) * kv.k(n);
    if (y >= dom) throw Error("psi_inv_eval: point out of range");
    if (n == 1) return y;
    const long m = n - 1;
    const Int K = kv.k(m - 1) * kv.k(m);
    const Int& km1 = kv.k(m + 1);
    const Int c = km1 / K;
    const Int d = km1 % K;
    const Int green_end = c * kv.k(m) * K;
    if (y < green_end) {
        const Int g = y / K;
        const Int h = y % K;
        const Int a = g / c;
        const Int e = g % c;
        return a * km1 + e * K + psi_eval(kv, m, h);
    }
    const Int t = y - green_end;
    const Int a = t / d;
    const Int f = t % d;
    return a * km1 + c * K + f;
}

/// psi_n on [k_{n-1}k_n], built inductively from psi_{n-1}^{-1}:
/// green case (e < c) maps block-wise through psi_{n-1}^{-1}, red tail
/// (e = c) pairs the a-th leftover segment of length d.
template <class Int>
Int psi_eval(const KSpan<Int>& kv, long n, const Int& x) {
    if (n < 1 || n > kv.depth()) throw Error("psi_eval: level out of range");
    const Int dom = kv.k(n - 1) * kv.k(n);
    if (x >= dom) throw Error("psi_eval: point out of range");
    if (n == 1) return x;
    const long m = n - 1;
    const auto [a, b, c, d, e, f] = decompose(kv, m, x);
    const Int K = kv.k(m - 1) * kv.k(m);
    if (e < c) return (a * c + e) * K + psi_inv_eval(kv, m, f);
    return c * kv.k(m) * K + a * d + f;
}

/// x lies in the red region of the level-n construction (e = c). Level 1 has none.
template <class Int>
bool is_red(const KSpan<Int>& kv, long n, const Int& x) {
    if (n == 1) return false;
    const auto dec = decompose(kv, n - 1, x);
    return dec.e == dec.c;
}

/// Color-boundary set E of the level-n construction, plus the outer wrap point.
/// Membership is O(1) divisions.
template <class Int>
struct BoundarySet {
    KSpan<Int> kv;
    long n;

    Int domain() const { return kv.k(n - 1) * kv.k(n); }
    bool is_member(const Int& x) const {
        const Int dom = domain();
        if (x >= dom) throw Error("BoundarySet: point out of range");
        if (x == dom - 1) return true;  // wrap
        return is_red(kv, n, x) != is_red(kv, n, Int(x + 1));
    }
};

/// phi_n = Mod(k_n) o psi_n^{-1} o Mod(k_{n-1}k_n) : [k_{n+1}] -> [k_n].
/// The inner Mod is a plain remainder even when k_{n-1}k_n does not divide k_{n+1}.
template <class Int>
Int phi_eval(const KSpan<Int>& kv, long n, const Int& x) {
    if (n + 1 > kv.depth()) throw Error("phi_eval: plan depth insufficient");
    if (x >= kv.k(n + 1)) throw Error("phi_eval: point out of range");
    const Int K = kv.k(n - 1) * kv.k(n);
    return psi_inv_eval(kv, n, Int(x % K)) % kv.k(n);
}

/// lambda_{phi_n}(x) = phi_n((x+1) mod k_{n+1}) - phi_n(x), from first principles.
template <class Int>
signed_of_t<Int> cocycle_of_phi(const KSpan<Int>& kv, long n, const Int& x) {
    const Int& dom = kv.k(n + 1);
    const Int xn = (x + 1 == dom) ? Int(0) : Int(x + 1);
    return static_cast<signed_of_t<Int>>(phi_eval(kv, n, xn)) -
           static_cast<signed_of_t<Int>>(phi_eval(kv, n, x));
}

/// Shortcut lambda_{Mod(k_n) o psi_n^{-1}}(x mod k_{n-1}k_n); agrees with
/// cocycle_of_phi away from block wraps when k_{n-1}k_n does not divide k_{n+1}.
template <class Int>
signed_of_t<Int> phi_cocycle_shortcut(const KSpan<Int>& kv, long n, const Int& x) {
    const Int K = kv.k(n - 1) * kv.k(n);
    const Int z = x % K;
    const Int zn = (z + 1 == K) ? Int(0) : Int(z + 1);
    return static_cast<signed_of_t<Int>>(psi_inv_eval(kv, n, zn) % kv.k(n)) -
           static_cast<signed_of_t<Int>>(psi_inv_eval(kv, n, z) % kv.k(n));
}

/// Finite map [m] -> Z with its generating cocycle.
struct IntervalMap {
    mpz_class domain;
    mpz_class codomain;
    std::function<mpz_class(const mpz_class&)> eval;
};

/// lambda_phi(x) = phi((x+1) mod m) - phi(x)
mpz_class cocycle(const IntervalMap& map, const mpz_class& x);

/// Closed-form upper bound for the omega-norms of the cocycles of psi_n,
/// psi_n^{-1} and Mod(k_n) o psi_n^{-1}:
///   sum_{m=1}^{n} [ (2/k_m) w(k_{m-1}k_m) + (1/(k_{m-2}k_{m-1}) + k_{m-2}k_{m-1}/k_m) w(1) ].
NormValue psi_norm_bound(const BaseSequence& seq, long n, const OmegaFn& omega);

/// psi bound plus the block-wrap term (k_{n-1}k_n/k_{n+1}) w(k_n).
NormValue phi_norm_bound(const BaseSequence& seq, long n, const OmegaFn& omega);

// mpz-flavored convenience wrappers
mpz_class psi_eval(const BaseSequence& seq, long n, const mpz_class& x);
mpz_class psi_inv_eval(const BaseSequence& seq, long n, const mpz_class& y);
mpz_class phi_eval(const BaseSequence& seq, long n, const mpz_class& x);
mpz_class cocycle_of_phi(const BaseSequence& seq, long n, const mpz_class& x);

}  // namespace oe
