#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "oe/omega.hpp"
#include "oe/supernatural.hpp"

namespace oe {

/// Interleaved base sequence for a pair of target odometers, with the
/// per-index budget terms of the two summability conditions:
///   term_II(n)  = (k_{n-1}k_n / k_{n+1}) w(k_n),      n = 0..depth-1
///   term_III(n) = (2 / k_n) w(k_{n-1}k_n),            n = 1..depth
/// Each term is held to the geometric schedule delta/(3*2^{n+2}), so a
/// finite prefix certifies every continuation that keeps the schedule.
///
/// ks is stored raw (from index -1) so that externally loaded plans can be
/// re-verified item by item; use sequence() for the validated view.
struct SequencePlan {
    std::vector<mpz_class> ks;  // ks[0] = k_{-1}
    SupernaturalNumber target_x, target_y;
    OmegaFn omega = OmegaFn::log();
    mpq_class delta;
    std::vector<double> terms_ii;   // terms_ii[n]      = term_II(n),  n in [0, depth)
    std::vector<double> terms_iii;  // terms_iii[n - 1] = term_III(n), n in [1, depth]
    std::uint64_t cursor_x = 0, cursor_y = 0;  // chunks consumed per stream

    long depth() const { return static_cast<long>(ks.size()) - 2; }
    const mpz_class& k(long n) const;
    /// validated BaseSequence view; throws if the raw ks are invalid
    BaseSequence sequence() const;
    /// drop the last entry and its budget terms
    void truncate();
};

/// Inductive choice of (k_n): odd indices consume the X chunk stream, even
/// indices the Y stream; growth and both budget schedules are enforced by a
/// doubling filler search. cap_bits bounds the bit length of any entry.
SequencePlan plan(const SupernaturalNumber& target_x, const SupernaturalNumber& target_y,
                  const OmegaFn& omega, const mpq_class& delta, long depth,
                  unsigned long cap_bits = 1u << 20);

struct CertItem {
    std::string name;
    bool pass;
    std::string detail;
};

struct PlanCertificate {
    std::vector<CertItem> items;
    bool all_pass() const;
    /// name of the first failing item, or empty
    std::string first_failure() const;
};

/// Re-verifies every invariant from scratch: shape of the head entries,
/// divisibility, strict growth, both budget schedules and sums (with the
/// certified tail), parity prime content against the targets, stored-term
/// consistency, sublinearity of omega.
PlanCertificate check_plan(const SequencePlan& plan);

/// Wrap a hand-built sequence as a plan: targets are inferred from the
/// parity prefixes (all exponents taken as exact) and terms recomputed.
SequencePlan plan_from_sequence(const BaseSequence& seq, const OmegaFn& omega,
                                const mpq_class& delta);

/// FNV-1a over the canonical serialization of (ks, targets, omega, delta).
std::string plan_hash(const SequencePlan& plan);

}  // namespace oe
