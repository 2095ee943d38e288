#include "oe/plan.hpp"

#include <cmath>
#include <sstream>

#include "oe/rational.hpp"

namespace oe {

namespace {

/// delta / (3 * 2^{n+2})
double schedule_bound(const mpq_class& delta, long n) {
    mpz_class pow;
    mpz_ui_pow_ui(pow.get_mpz_t(), 2, static_cast<unsigned long>(n + 2));
    mpq_class b = delta / (mpq_class(3) * mpq_class(pow));
    return b.get_d();
}

// both terms are computed in log space: the factors overflow a double long
// before the products stop being tiny
double term_ii_value(const std::vector<mpz_class>& ks, long n, const OmegaFn& omega) {
    auto k = [&](long i) -> const mpz_class& { return ks[static_cast<std::size_t>(i + 1)]; };
    return std::exp(log_mpz(k(n - 1)) + log_mpz(k(n)) - log_mpz(k(n + 1)) +
                    omega.log_eval(k(n)));
}

double term_iii_value(const std::vector<mpz_class>& ks, long n, const OmegaFn& omega) {
    auto k = [&](long i) -> const mpz_class& { return ks[static_cast<std::size_t>(i + 1)]; };
    return std::exp(M_LN2 - log_mpz(k(n)) + omega.log_eval(mpz_class(k(n - 1) * k(n))));
}

struct ParityState {
    ChunkStream stream;
    const SupernaturalNumber* target;
    std::uint64_t consumed = 0;

    mpz_class take_chunk() {
        if (stream.exhausted()) throw NoFillerPrimeError("chunk stream exhausted for target " +
                                                         target->to_string());
        ++consumed;
        return stream.next();
    }
    bool has_chunk() const { return !stream.exhausted(); }
};

}  // namespace

const mpz_class& SequencePlan::k(long n) const {
    if (n < -1 || n > depth()) throw Error("SequencePlan: index out of range");
    return ks[static_cast<std::size_t>(n + 1)];
}

BaseSequence SequencePlan::sequence() const { return BaseSequence(ks); }

void SequencePlan::truncate() {
    if (depth() < 1) throw Error("SequencePlan: nothing to truncate");
    ks.pop_back();
    if (!terms_ii.empty()) terms_ii.pop_back();
    if (!terms_iii.empty()) terms_iii.pop_back();
}

SequencePlan plan(const SupernaturalNumber& target_x, const SupernaturalNumber& target_y,
                  const OmegaFn& omega, const mpq_class& delta, long depth,
                  unsigned long cap_bits) {
    if (depth < 2) throw Error("plan: depth must be >= 2");
    if (delta <= 0) throw Error("plan: delta must be > 0");
    if (!omega.is_sublinear())
        throw NotSublinearError("plan: omega is not sublinear: " + omega.describe());

    SequencePlan out;
    out.ks = {1, 1};
    out.target_x = target_x;
    out.target_y = target_y;
    out.omega = omega;
    out.delta = delta;

    ParityState sx{ChunkStream(target_x), &target_x};
    ParityState sy{ChunkStream(target_y), &target_y};

    auto k = [&](long i) -> const mpz_class& { return out.ks[static_cast<std::size_t>(i + 1)]; };

    for (long idx = 1; idx <= depth; ++idx) {
        ParityState& st = (idx % 2 == 1) ? sx : sy;
        mpz_class cand = k(idx - 2) * st.take_chunk();

        // filler base: the target's smallest infinite-exponent prime when it
        // has one; otherwise further chunks of the same stream. Any other
        // filler would overshoot condition I.
        bool infinite_filler = st.target->has_infinite_exponent();
        mpz_class filler = infinite_filler ? st.target->smallest_infinite_prime() : mpz_class(0);

        const double sched_ii = schedule_bound(delta, idx - 1);
        const double sched_iii = schedule_bound(delta, idx);
        unsigned long step = 1;
        for (;;) {
            if (mpz_sizeinbase(cand.get_mpz_t(), 2) > cap_bits)
                throw CapExceededError("plan: candidate k_" + std::to_string(idx) +
                                       " exceeds cap of " + std::to_string(cap_bits) + " bits");
            bool ok = cand > k(idx - 2) * k(idx - 1) && cand > k(idx - 1);
            if (ok) {
                std::vector<mpz_class> probe = out.ks;
                probe.push_back(cand);
                ok = term_ii_value(probe, idx - 1, omega) <= sched_ii &&
                     term_iii_value(probe, idx, omega) <= sched_iii;
            }
            if (ok) break;
            if (infinite_filler) {
                mpz_class mult;
                mpz_pow_ui(mult.get_mpz_t(), filler.get_mpz_t(), step);
                cand *= mult;
                if (step < (1ul << 32)) step *= 2;
            } else {
                // consume further chunks; NoFillerPrime when the stream ends
                if (!st.has_chunk())
                    throw NoFillerPrimeError(
                        "plan: target " + st.target->to_string() +
                        " has no infinite-exponent prime and its chunks are exhausted "
                        "with budgets unmet at k_" + std::to_string(idx));
                for (unsigned long i = 0; i < step && st.has_chunk(); ++i)
                    cand *= st.take_chunk();
                if (step < (1ul << 32)) step *= 2;
            }
        }
        out.ks.push_back(cand);
        out.terms_ii.push_back(term_ii_value(out.ks, idx - 1, omega));
        out.terms_iii.push_back(term_iii_value(out.ks, idx, omega));
    }
    out.cursor_x = sx.consumed;
    out.cursor_y = sy.consumed;
    return out;
}

bool PlanCertificate::all_pass() const {
    for (const auto& it : items)
        if (!it.pass) return false;
    return true;
}

std::string PlanCertificate::first_failure() const {
    for (const auto& it : items)
        if (!it.pass) return it.name;
    return {};
}

namespace {

void add(PlanCertificate& cert, std::string name, bool pass, std::string detail) {
    cert.items.push_back({std::move(name), pass, std::move(detail)});
}

/// trial-factor a smooth entry; empty result marks a factor beyond desk scale
bool smooth_valuations(const mpz_class& value, std::map<mpz_class, unsigned long>& out) {
    mpz_class rest = value;
    mpz_class q = 2;
    while (rest > 1 && q <= 1000000) {
        if (mpz_divisible_p(rest.get_mpz_t(), q.get_mpz_t())) {
            mpz_class red;
            unsigned long v = static_cast<unsigned long>(
                mpz_remove(red.get_mpz_t(), rest.get_mpz_t(), q.get_mpz_t()));
            out[q] = v;
            rest = red;
        }
        mpz_nextprime(q.get_mpz_t(), q.get_mpz_t());
    }
    return rest == 1;
}

void check_parity_content(PlanCertificate& cert, const SequencePlan& p, Parity parity) {
    const bool odd = parity == Parity::Odd;
    const char* label = odd ? "X" : "Y";
    const SupernaturalNumber& target = odd ? p.target_x : p.target_y;
    long deepest = p.depth();
    if ((deepest % 2 == 1) != odd) --deepest;
    if (deepest < 1) {
        add(cert, std::string("parity ") + label + " content", true, "no entries");
        return;
    }
    std::map<mpz_class, unsigned long> vals;
    if (!smooth_valuations(p.k(deepest), vals)) {
        add(cert, std::string("parity ") + label + " content", false,
            "entry k_" + std::to_string(deepest) + " has a factor beyond desk scale");
        return;
    }
    for (const auto& [q, v] : vals) {
        Exponent e = target.exponent_of(q);
        if (!e.infinite && v > e.value) {
            add(cert, std::string("parity ") + label + " content", false,
                "prime " + q.get_str() + " appears with exponent " + std::to_string(v) +
                    " > target " + std::to_string(e.value));
            return;
        }
    }
    // stream progress: the consumed chunk prefix must divide the deepest entry
    std::uint64_t cursor = odd ? p.cursor_x : p.cursor_y;
    mpz_class prefix_product = 1;
    for (const mpz_class& q : ChunkStream::prefix(target, cursor)) prefix_product *= q;
    bool divides = mpz_divisible_p(p.k(deepest).get_mpz_t(), prefix_product.get_mpz_t()) != 0;
    add(cert, std::string("parity ") + label + " content", divides,
        divides ? "prime content within target; " + std::to_string(cursor) + " chunks consumed"
                : "consumed chunk prefix does not divide k_" + std::to_string(deepest));
}

}  // namespace

PlanCertificate check_plan(const SequencePlan& p) {
    PlanCertificate cert;
    const long depth = p.depth();

    add(cert, "head entries", p.ks.size() >= 2 && p.ks[0] == 1 && p.ks[1] == 1,
        "k_{-1} = k_0 = 1");
    if (!cert.items.back().pass) return cert;

    add(cert, "omega sublinear", p.omega.is_sublinear(), p.omega.describe());

    for (long n = 1; n <= depth; ++n) {
        bool inc = p.k(n) > (n == 1 ? mpz_class(1) : p.k(n - 1));
        add(cert, "increase k_" + std::to_string(n) + " > k_" + std::to_string(n - 1), inc,
            p.k(n).get_str());
    }
    for (long n = -1; n + 2 <= depth; ++n) {
        bool div = mpz_divisible_p(p.k(n + 2).get_mpz_t(), p.k(n).get_mpz_t()) != 0;
        add(cert, "divisibility k_" + std::to_string(n) + " | k_" + std::to_string(n + 2), div,
            div ? "" : p.k(n).get_str() + " does not divide " + p.k(n + 2).get_str());
    }
    for (long n = 0; n + 1 <= depth; ++n) {
        bool growth = p.k(n + 1) > p.k(n - 1) * p.k(n);
        add(cert, "growth k_{n+1} > k_{n-1}k_n at n=" + std::to_string(n), growth,
            p.k(n + 1).get_str() + " vs " + mpz_class(p.k(n - 1) * p.k(n)).get_str());
    }

    double sum_ii = 0.0, sum_iii = 0.0;
    for (long n = 0; n + 1 <= depth; ++n) {
        double v = term_ii_value(p.ks, n, p.omega);
        double sched = schedule_bound(p.delta, n);
        sum_ii += v;
        add(cert, "schedule II at n=" + std::to_string(n), v <= sched,
            std::to_string(v) + " vs " + std::to_string(sched));
        if (n < static_cast<long>(p.terms_ii.size())) {
            double stored = p.terms_ii[static_cast<std::size_t>(n)];
            add(cert, "stored term II at n=" + std::to_string(n),
                std::abs(stored - v) <= 1e-9 * std::max(1.0, std::abs(v)),
                std::to_string(stored) + " vs recomputed " + std::to_string(v));
        }
    }
    for (long n = 1; n <= depth; ++n) {
        double v = term_iii_value(p.ks, n, p.omega);
        double sched = schedule_bound(p.delta, n);
        sum_iii += v;
        add(cert, "schedule III at n=" + std::to_string(n), v <= sched,
            std::to_string(v) + " vs " + std::to_string(sched));
        if (n - 1 < static_cast<long>(p.terms_iii.size())) {
            double stored = p.terms_iii[static_cast<std::size_t>(n - 1)];
            add(cert, "stored term III at n=" + std::to_string(n),
                std::abs(stored - v) <= 1e-9 * std::max(1.0, std::abs(v)),
                std::to_string(stored) + " vs recomputed " + std::to_string(v));
        }
    }
    // certified tails: remaining schedule terms for any conforming continuation
    double tail_ii = 2.0 * schedule_bound(p.delta, depth);       // sum_{n >= depth}
    double tail_iii = 2.0 * schedule_bound(p.delta, depth + 1);  // sum_{n >= depth+1}
    double third = mpq_class(p.delta / 3).get_d();
    add(cert, "sum II with tail < delta/3", sum_ii + tail_ii < third,
        std::to_string(sum_ii) + " + " + std::to_string(tail_ii) + " vs " + std::to_string(third));
    add(cert, "sum III with tail < delta/3", sum_iii + tail_iii < third,
        std::to_string(sum_iii) + " + " + std::to_string(tail_iii) + " vs " +
            std::to_string(third));

    check_parity_content(cert, p, Parity::Odd);
    check_parity_content(cert, p, Parity::Even);
    return cert;
}

SequencePlan plan_from_sequence(const BaseSequence& seq, const OmegaFn& omega,
                                const mpq_class& delta) {
    SequencePlan out;
    out.ks = seq.raw();
    out.omega = omega;
    out.delta = delta;
    out.target_x = supernatural_of_prefix(seq, Parity::Odd, /*complete=*/true).sn;
    out.target_y = supernatural_of_prefix(seq, Parity::Even, /*complete=*/true).sn;
    auto stream_length = [](const SupernaturalNumber& sn) {
        std::uint64_t total = 0;
        for (const auto& [q, e] : sn.exponents()) total += e.value;
        return total;
    };
    out.cursor_x = stream_length(out.target_x);
    out.cursor_y = stream_length(out.target_y);
    for (long n = 0; n + 1 <= out.depth(); ++n)
        out.terms_ii.push_back(term_ii_value(out.ks, n, omega));
    for (long n = 1; n <= out.depth(); ++n)
        out.terms_iii.push_back(term_iii_value(out.ks, n, omega));
    return out;
}

std::string plan_hash(const SequencePlan& p) {
    std::ostringstream os;
    for (const auto& k : p.ks) os << k.get_str() << ",";
    os << "|" << p.target_x.to_string() << "|" << p.target_y.to_string() << "|"
       << p.omega.describe() << "|" << rational_str(p.delta);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : os.str()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream hex;
    hex << std::hex << h;
    return hex.str();
}

}  // namespace oe
