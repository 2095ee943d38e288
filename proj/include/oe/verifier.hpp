#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oe/coupling.hpp"
#include "oe/plan.hpp"

namespace oe {

struct CheckResult {
    std::string name;
    bool pass;
    std::string value;  // exact rational or float, as text
    std::string bound;
};

/// Every certified fact about one level, computed by exhaustive enumeration.
struct LevelReport {
    long level = 0;
    std::string domain;  // k_{n-1}k_n as decimal
    std::vector<CheckResult> checks;

    bool has_diagram = false;
    mpq_class diagram_defect, diagram_bound;
    std::vector<std::uint64_t> diagram_defect_points;  // listed only for small domains

    bool has_composition = false;
    mpq_class composition_defect, composition_bound;
    std::vector<std::uint64_t> composition_defect_points;

    bool has_fiber = false;
    mpq_class fiber_max, fiber_bound;

    bool has_norms = false;
    double norm_psi = 0, norm_psi_inv = 0, norm_mod_psi_inv = 0, psi_bound = 0;
    bool has_phi_norm = false;
    double norm_phi = 0, phi_bound = 0;

    std::uint64_t table_mismatches = 0;
    std::uint64_t shortcut_failures = 0;  // informational: block-wrap points

    bool skipped = false;  // enumeration cap exceeded
    bool all_pass() const;
};

struct VerificationReport {
    std::string plan_hash;
    std::string omega;
    std::vector<LevelReport> levels;
    bool all_pass() const;
    bool any_skipped() const;
};

struct VerifyOptions {
    std::uint64_t enumeration_cap = 1ull << 24;
    int threads = 1;
};

/// psi / psi_inv permutation tables for levels 1..n, built by table induction:
/// level m+1 is filled from the level-m inverse *table*, never from the
/// recursive evaluators, so the two paths stay independent.
struct LevelTables {
    std::vector<std::uint64_t> ks;                    // ks[0] = k_{-1}
    std::vector<std::vector<std::uint32_t>> psi;      // psi[m], m in [1, n]
    std::vector<std::vector<std::uint32_t>> psi_inv;  // inverse permutations
};

LevelTables build_level_tables(const SequencePlan& plan, long n, std::uint64_t cap);

enum class MapId { Psi, PsiInv, Phi, ModKnPsiInv };

/// Materialized map as an IntervalMap backed by an enumeration table.
IntervalMap build_table(const SequencePlan& plan, long n, MapId id,
                        std::uint64_t cap = 1ull << 24);

LevelReport verify_level(const SequencePlan& plan, long n, const OmegaFn& omega,
                         const VerifyOptions& opt = {});
/// same checks against caller-supplied tables (mutation testing hook)
LevelReport verify_level_with_tables(const SequencePlan& plan, long n, const OmegaFn& omega,
                                     const LevelTables& tables, const VerifyOptions& opt = {});

/// every level of the plan, levels over the cap reported as skipped
VerificationReport verify_plan(const SequencePlan& plan, const OmegaFn& omega,
                               const VerifyOptions& opt = {});

struct FuzzReport {
    int plans = 0;
    std::uint64_t checks_run = 0;
    std::uint64_t violations = 0;
    std::vector<std::string> failures;  // "plan <hash> level <n> <check>"
    std::vector<VerificationReport> reports;
};

/// Random valid sequences (multipliers from {2,3,5,7}, growth by doubling),
/// verified at every enumerable level against every omega. Deterministic per seed.
FuzzReport fuzz_plans(std::uint64_t seed, int count, long depth_cap, std::uint64_t size_cap,
                      const std::vector<OmegaFn>& omegas, const VerifyOptions& opt = {});

}  // namespace oe
