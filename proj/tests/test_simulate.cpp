#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oe/json_io.hpp"
#include "oe/simulate.hpp"
#include "oe/verifier.hpp"

using namespace oe;

namespace {

SequencePlan small_plan() {
    return plan_from_sequence(BaseSequence(std::vector<mpz_class>{1, 1, 2, 3, 8}),
                              OmegaFn::power(mpq_class(1, 2)), 250);
}

SequencePlan certified_plan(long depth = 6) {
    return plan(SupernaturalNumber::parse("2^inf"), SupernaturalNumber::parse("3^inf"),
                OmegaFn::power(mpq_class(1, 2)), mpq_class(1, 10), depth);
}

}  // namespace

TEST_CASE("counter rng is a pure function of (seed, stream, counter)") {
    CounterRng a(1, 2), b(1, 2), c(1, 3);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    bool differs = false;
    CounterRng a2(1, 2);
    for (int i = 0; i < 100; ++i) differs |= a2.next_u64() != c.next_u64();
    CHECK(differs);
}

TEST_CASE("uniform sampling stays in range and hits all residues") {
    CounterRng rng(9, 0);
    std::vector<int> seen(10, 0);
    for (int i = 0; i < 1000; ++i) {
        mpz_class v = rng.uniform(10);
        REQUIRE(v >= 0);
        REQUIRE(v < 10);
        ++seen[v.get_ui()];
    }
    for (int s : seen) CHECK(s > 0);
    CHECK_THROWS_AS(rng.uniform(0), Error);
    // huge moduli work too
    CounterRng big(9, 1);
    mpz_class m = mpz_class(1) << 200;
    mpz_class v = big.uniform(m);
    CHECK(v < m);
}

TEST_CASE("sample_point is coherent and deterministic") {
    SequencePlan p = small_plan();
    LimitPoint a = sample_point(p, Parity::Odd, 5, 0);
    CHECK(a.indices == std::vector<long>{1, 3});
    CHECK(a.residues[1] % p.k(1) == a.residues[0]);
    LimitPoint b = sample_point(p, Parity::Odd, 5, 0);
    CHECK(a.residues == b.residues);
    LimitPoint other = sample_point(p, Parity::Odd, 6, 0);
    CHECK(other.residues[1] < p.k(3));
}

TEST_CASE("successor carries coherently") {
    SequencePlan p = small_plan();
    LimitPoint x;
    x.parity = Parity::Odd;
    x.indices = {1, 3};
    x.residues = {1, 7};  // chain (2, 8): 7 = 1 mod 2
    LimitPoint y = successor(p, x);
    CHECK(y.residues == std::vector<mpz_class>{0, 0});
    LimitPoint z = successor(p, y);
    CHECK(z.residues == std::vector<mpz_class>{1, 1});
}

TEST_CASE("stage counts per parity") {
    SequencePlan p = small_plan();  // depth 3
    CHECK(max_stage(p, Parity::Odd) == 1);
    CHECK(max_stage(p, Parity::Even) == 0);
    SequencePlan q = certified_plan(6);
    CHECK(max_stage(q, Parity::Odd) == 2);
    CHECK(max_stage(q, Parity::Even) == 2);
}

TEST_CASE("stage approximation uses the documented tables") {
    SequencePlan p = small_plan();
    LimitPoint x;
    x.parity = Parity::Odd;
    x.indices = {1, 3};
    // phi_2 on [8] is (0,1,0,1,2,2,0,1)
    x.residues = {1, 5};
    CHECK(phi_stage_approx(p, x, 1) == 2);
    x.residues = {0, 0};
    CHECK(phi_stage_approx(p, x, 1) == 0);
    CHECK_THROWS_AS(phi_stage_approx(p, x, 2), Error);
}

TEST_CASE("empirical cocycle matches the table differences") {
    SequencePlan p = small_plan();
    LimitPoint x;
    x.parity = Parity::Odd;
    x.indices = {1, 3};
    x.residues = {1, 3};
    CHECK(empirical_cocycle(p, x, 1) == 1);  // phi_2(4) - phi_2(3) = 2 - 1
    x.residues = {0, 4};
    CHECK(empirical_cocycle(p, x, 1) == 0);  // phi_2(5) - phi_2(4) = 2 - 2
}

TEST_CASE("stabilization profile on a certified plan") {
    SequencePlan p = certified_plan(6);
    StabilizationSummary s = stabilization_profile(p, 500, 11, 4);
    CHECK(s.records.size() == 500);
    CHECK(s.stabilized_fraction >= 0.99);
    // once stable, the reported trace is constant through the deepest stage
    for (const auto& rec : s.records) {
        for (std::size_t i = static_cast<std::size_t>(rec.first_stable_stage) - 1;
             i + 1 < rec.cocycle_trace.size(); ++i)
            CHECK(rec.cocycle_trace[i + 1] == rec.cocycle_trace[i]);
    }
    // thread-count invariance
    StabilizationSummary s1 = stabilization_profile(p, 100, 11, 1);
    StabilizationSummary s8 = stabilization_profile(p, 100, 11, 8);
    CHECK(stabilization_csv(s1) == stabilization_csv(s8));
    CHECK(s1.stabilized_fraction == s8.stabilized_fraction);
}

TEST_CASE("monte carlo norm: trivial weight gives zero") {
    SequencePlan p = certified_plan(6);
    MonteCarloResult mc = monte_carlo_norm(p, OmegaFn::constant(0), 200, 3, 2);
    CHECK(mc.estimate == doctest::Approx(0.0));
    CHECK(mc.within_budget());
}

TEST_CASE("monte carlo norm stays within the certified budget") {
    SequencePlan p = certified_plan(6);
    MonteCarloResult mc = monte_carlo_norm(p, p.omega, 2000, 1, 4);
    CHECK(mc.omega1_plus_delta == doctest::Approx(1.1));
    CHECK(mc.estimate <= mc.omega1_plus_delta + 3 * mc.std_error);
    CHECK(mc.estimate <= mc.series_bound + 3 * mc.std_error);
    CHECK(mc.within_budget());
    // determinism across thread counts
    MonteCarloResult one = monte_carlo_norm(p, p.omega, 500, 1, 1);
    MonteCarloResult eight = monte_carlo_norm(p, p.omega, 500, 1, 8);
    CHECK(one.omega_values == eight.omega_values);
}

TEST_CASE("monte carlo estimator is calibrated against exact enumeration") {
    SequencePlan p = plan_from_sequence(
        BaseSequence(std::vector<mpz_class>{1, 1, 2, 3, 8, 27, 224, 6075}),
        OmegaFn::power(mpq_class(1, 2)), 250);
    // exact finite-stage norm of lambda_{phi_4} over [k_5]
    const long level = 2 * max_stage(p, Parity::Odd);
    CHECK(level == 4);
    BaseSequence seq = p.sequence();
    double exact = 0.0;
    const unsigned long dom = p.k(level + 1).get_ui();
    for (unsigned long x = 0; x < dom; ++x)
        exact += p.omega.eval(mpz_class(abs(cocycle_of_phi(seq, level, mpz_class(x)))));
    exact /= static_cast<double>(dom);
    MonteCarloResult mc = monte_carlo_norm(p, p.omega, 4000, 17, 4);
    CHECK(std::abs(mc.estimate - exact) <= 3 * mc.std_error + 1e-12);
}

TEST_CASE("series bound dominates the per-level bound it extends") {
    SequencePlan p = certified_plan(6);
    double series = series_norm_bound(p, p.omega);
    CHECK(series >= psi_norm_bound(p.sequence(), p.depth(), p.omega).value);
    CHECK(series < p.omega.eval(mpz_class(1)) + p.delta.get_d());
}

TEST_CASE("simulation summary serialization") {
    SequencePlan p = certified_plan(6);
    MonteCarloResult mc = monte_carlo_norm(p, p.omega, 300, 2, 2);
    StabilizationSummary s = stabilization_profile(p, 300, 2, 2);
    Json j = simulation_summary_to_json(mc, s, plan_hash(p));
    CHECK(j.at("samples").get<std::uint64_t>() == 300);
    CHECK(j.at("within_budget").get<bool>());
    const std::string csv = samples_csv(mc, s);
    CHECK(csv.rfind("sample,stable_stage,final_cocycle,omega_value", 0) == 0);
    const std::string pm = partial_means_csv(mc);
    CHECK(pm.find("256,") != std::string::npos);
}
