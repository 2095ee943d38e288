#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "oe/plan.hpp"
#include "oe/supernatural.hpp"

namespace oe {

/// Counter-based deterministic generator: word j of sample i under seed s is
/// a pure function of (s, i, j), so parallel sampling is reproducible.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64();
    /// uniform in [0, m) by rejection on fixed-width bit blocks
    mpz_class uniform(const mpz_class& m);

private:
    std::uint64_t seed_, stream_, counter_ = 0;
};

/// Finite truncation of a point of the inverse limit: coherent residues along
/// one parity chain, deepest residue uniform.
struct LimitPoint {
    Parity parity;
    std::vector<long> indices;        // plan indices of the parity, increasing
    std::vector<mpz_class> residues;  // residues[i] in [k_{indices[i]}]

    const mpz_class& deepest() const { return residues.back(); }
};

LimitPoint sample_point(const SequencePlan& plan, Parity parity, std::uint64_t seed,
                        std::uint64_t sample_index = 0);
/// odometer action: +1 with carry, propagated coherently
LimitPoint successor(const SequencePlan& plan, const LimitPoint& p);

/// number of finite stages available: for X-points stage n uses phi_{2n} on
/// the residue at index 2n+1, for Y-points phi_{2n+1} on index 2n+2.
long max_stage(const SequencePlan& plan, Parity parity);

/// stage-n image residue (in [k_{2n}] for X, [k_{2n+1}] for Y)
mpz_class phi_stage_approx(const SequencePlan& plan, const LimitPoint& p, long stage);

/// lambda of the stage-n factor map at the point's residue
mpz_class empirical_cocycle(const SequencePlan& plan, const LimitPoint& p, long stage);

struct StabilizationRecord {
    std::uint64_t sample_index = 0;
    long first_stable_stage = -1;  // -1: unstable through the available depth
    bool stable_through_depth = false;
    mpz_class final_image;
    std::vector<mpz_class> cocycle_trace;  // one entry per stage
};

struct StabilizationSummary {
    std::vector<StabilizationRecord> records;
    /// fraction of samples whose approximations cohere from stage s onwards
    std::vector<double> stable_fraction_from_stage;
    double stabilized_fraction = 0.0;
};

StabilizationSummary stabilization_profile(const SequencePlan& plan, std::uint64_t samples,
                                           std::uint64_t seed, int threads = 1);

struct MonteCarloResult {
    double estimate = 0.0;
    double std_error = 0.0;
    double omega1_plus_delta = 0.0;
    double series_bound = 0.0;  // closed-form series bound plus certified tail
    std::uint64_t samples = 0;
    std::vector<double> omega_values;  // per sample, for partial-mean plots
    bool within_budget() const;
};

/// mean of omega(|lambda|) of the deepest-stage factor map over uniform samples
MonteCarloResult monte_carlo_norm(const SequencePlan& plan, const OmegaFn& omega,
                                  std::uint64_t samples, std::uint64_t seed, int threads = 1);

/// finite part of the limit norm bound plus schedule-certified tails
double series_norm_bound(const SequencePlan& plan, const OmegaFn& omega);

}  // namespace oe
