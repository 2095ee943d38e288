#include "oe/simulate.hpp"

#include <cmath>
#include <thread>

#include "oe/coupling.hpp"

namespace oe {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::next_u64() {
    std::uint64_t v = mix64(seed_ + 0x9e3779b97f4a7c15ull * (stream_ + 1));
    v = mix64(v ^ (counter_ + 0x632be59bd9b4e019ull));
    ++counter_;
    return v;
}

mpz_class CounterRng::uniform(const mpz_class& m) {
    if (m <= 0) throw Error("CounterRng::uniform: m must be positive");
    const std::size_t bits = mpz_sizeinbase(m.get_mpz_t(), 2);
    const std::size_t words = (bits + 63) / 64;
    for (;;) {
        mpz_class v = 0;
        for (std::size_t w = 0; w < words; ++w) {
            v <<= 64;
            v += mpz_class(static_cast<unsigned long>(next_u64()));
        }
        // keep exactly `bits` bits so the rejection rate stays below 1/2
        mpz_class masked;
        mpz_fdiv_r_2exp(masked.get_mpz_t(), v.get_mpz_t(), bits);
        if (masked < m) return masked;
    }
}

long max_stage(const SequencePlan& plan, Parity parity) {
    // stage n needs the input residue index (2n+1 or 2n+2) within depth
    const long d = plan.depth();
    const long m = parity == Parity::Odd ? (d - 1) / 2 : d / 2 - 1;
    return m;
}

LimitPoint sample_point(const SequencePlan& plan, Parity parity, std::uint64_t seed,
                        std::uint64_t sample_index) {
    if (plan.depth() < 3) throw Error("sample_point: plan depth must be >= 3");
    LimitPoint p;
    p.parity = parity;
    for (long n = parity == Parity::Odd ? 1 : 2; n <= plan.depth(); n += 2)
        p.indices.push_back(n);
    CounterRng rng(seed, sample_index);
    mpz_class deepest = rng.uniform(plan.k(p.indices.back()));
    for (long idx : p.indices) p.residues.push_back(deepest % plan.k(idx));
    return p;
}

LimitPoint successor(const SequencePlan& plan, const LimitPoint& p) {
    LimitPoint out = p;
    mpz_class deepest = (p.deepest() + 1) % plan.k(p.indices.back());
    out.residues.clear();
    for (long idx : p.indices) out.residues.push_back(deepest % plan.k(idx));
    return out;
}

namespace {

/// factor-map level used by stage n for this parity
long stage_level(const LimitPoint& p, long stage) {
    return p.parity == Parity::Odd ? 2 * stage : 2 * stage + 1;
}

const mpz_class& residue_at_index(const LimitPoint& p, const SequencePlan& plan, long index) {
    for (std::size_t i = 0; i < p.indices.size(); ++i)
        if (p.indices[i] == index) return p.residues[i];
    (void)plan;
    throw Error("limit point does not carry residue at index " + std::to_string(index));
}

}  // namespace

mpz_class phi_stage_approx(const SequencePlan& plan, const LimitPoint& p, long stage) {
    if (stage < 1 || stage > max_stage(plan, p.parity))
        throw Error("phi_stage_approx: stage out of range");
    const long level = stage_level(p, stage);
    const BaseSequence seq = plan.sequence();
    return phi_eval(seq, level, residue_at_index(p, plan, level + 1));
}

mpz_class empirical_cocycle(const SequencePlan& plan, const LimitPoint& p, long stage) {
    if (stage < 1 || stage > max_stage(plan, p.parity))
        throw Error("empirical_cocycle: stage out of range");
    const long level = stage_level(p, stage);
    const BaseSequence seq = plan.sequence();
    return cocycle_of_phi(seq, level, residue_at_index(p, plan, level + 1));
}

StabilizationSummary stabilization_profile(const SequencePlan& plan, std::uint64_t samples,
                                           std::uint64_t seed, int threads) {
    if (plan.depth() < 5) throw Error("stabilization_profile: plan depth must be >= 5");
    const long stages = max_stage(plan, Parity::Odd);
    const BaseSequence seq = plan.sequence();

    StabilizationSummary out;
    out.records.resize(samples);

    auto worker = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            LimitPoint p = sample_point(plan, Parity::Odd, seed, i);
            StabilizationRecord rec;
            rec.sample_index = i;
            std::vector<mpz_class> images;
            for (long s = 1; s <= stages; ++s) {
                images.push_back(phi_stage_approx(plan, p, s));
                rec.cocycle_trace.push_back(empirical_cocycle(plan, p, s));
            }
            // coherent from stage s onwards: image at s+1 reduces to image at s
            long first_stable = stages;  // a single stage is trivially coherent
            for (long s = stages - 1; s >= 1; --s) {
                const long level = stage_level(p, s);  // image lives in [k_level]
                if (images[static_cast<std::size_t>(s)] % plan.k(level) ==
                    images[static_cast<std::size_t>(s - 1)])
                    first_stable = s;
                else
                    break;
            }
            rec.first_stable_stage = first_stable;
            rec.stable_through_depth = first_stable == 1;
            rec.final_image = images.back();
            out.records[i] = std::move(rec);
        }
    };
    if (threads <= 1 || samples < 2) {
        worker(0, samples);
    } else {
        std::vector<std::thread> ws;
        const std::uint64_t chunk = (samples + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::uint64_t lo = t * chunk, hi = std::min(samples, (t + 1) * chunk);
            if (lo < hi) ws.emplace_back(worker, lo, hi);
        }
        for (auto& w : ws) w.join();
    }

    out.stable_fraction_from_stage.assign(static_cast<std::size_t>(stages) + 1, 0.0);
    std::uint64_t fully = 0;
    for (const auto& rec : out.records) {
        for (long s = rec.first_stable_stage; s <= stages; ++s)
            out.stable_fraction_from_stage[static_cast<std::size_t>(s)] += 1.0;
        if (rec.stable_through_depth) ++fully;
    }
    if (samples > 0) {
        for (auto& v : out.stable_fraction_from_stage) v /= static_cast<double>(samples);
        out.stabilized_fraction = static_cast<double>(fully) / static_cast<double>(samples);
    }
    return out;
}

double series_norm_bound(const SequencePlan& plan, const OmegaFn& omega) {
    const BaseSequence seq = plan.sequence();
    const long depth = plan.depth();
    double finite = psi_norm_bound(seq, depth, omega).value;
    // schedule tails for the unseen terms of both series, plus the geometric
    // tail of the 1/(k_{m-2}k_{m-1}) column
    auto sched = [&](long n) {
        mpz_class pow;
        mpz_ui_pow_ui(pow.get_mpz_t(), 2, static_cast<unsigned long>(n + 2));
        return mpq_class(plan.delta / (mpq_class(3) * mpq_class(pow))).get_d();
    };
    double tail = 2.0 * sched(depth + 1);  // third-series terms m > depth
    tail += 2.0 * sched(depth);            // (k_{m-2}k_{m-1}/k_m) w(1) terms, m > depth
    mpq_class unit(1);
    unit /= seq.k(depth - 1) * seq.k(depth);
    tail += 2.0 * unit.get_d() * omega.eval(mpz_class(1));
    return finite + tail;
}

bool MonteCarloResult::within_budget() const {
    return estimate <= omega1_plus_delta + 3.0 * std_error &&
           estimate <= series_bound + 3.0 * std_error;
}

MonteCarloResult monte_carlo_norm(const SequencePlan& plan, const OmegaFn& omega,
                                  std::uint64_t samples, std::uint64_t seed, int threads) {
    const long stages = max_stage(plan, Parity::Odd);
    if (stages < 1) throw Error("monte_carlo_norm: plan too shallow for any stage");
    const long level = 2 * stages;  // deepest even-side factor map
    const BaseSequence seq = plan.sequence();
    const mpz_class& dom = plan.k(level + 1);

    MonteCarloResult out;
    out.samples = samples;
    out.omega_values.resize(samples);
    out.omega1_plus_delta = omega.eval(mpz_class(1)) + plan.delta.get_d();
    out.series_bound = series_norm_bound(plan, omega);

    auto worker = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            CounterRng rng(seed, i);
            mpz_class x = rng.uniform(dom);
            mpz_class lam = cocycle_of_phi(seq, level, x);
            out.omega_values[i] = omega.eval(mpz_class(abs(lam)));
        }
    };
    if (threads <= 1 || samples < 2) {
        worker(0, samples);
    } else {
        std::vector<std::thread> ws;
        const std::uint64_t chunk = (samples + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::uint64_t lo = t * chunk, hi = std::min(samples, (t + 1) * chunk);
            if (lo < hi) ws.emplace_back(worker, lo, hi);
        }
        for (auto& w : ws) w.join();
    }

    if (samples == 0) return out;
    double sum = 0.0;
    for (double v : out.omega_values) sum += v;
    out.estimate = sum / static_cast<double>(samples);
    double var = 0.0;
    for (double v : out.omega_values) var += (v - out.estimate) * (v - out.estimate);
    if (samples > 1) var /= static_cast<double>(samples - 1);
    out.std_error = std::sqrt(var / static_cast<double>(samples));
    return out;
}

}  // namespace oe
