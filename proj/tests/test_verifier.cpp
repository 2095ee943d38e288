#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <vector>

#include "doctest.h"
#include "oe/json_io.hpp"
#include "oe/verifier.hpp"

using namespace oe;

namespace {

SequencePlan ref_plan(std::vector<mpz_class> ks) {
    return plan_from_sequence(BaseSequence(std::move(ks)), OmegaFn::power(mpq_class(1, 2)), 250);
}

std::vector<std::uint32_t> materialize(const IntervalMap& m) {
    std::vector<std::uint32_t> out;
    for (mpz_class x = 0; x < m.domain; ++x)
        out.push_back(static_cast<std::uint32_t>(m.eval(x).get_ui()));
    return out;
}

const CheckResult* find_check(const LevelReport& r, const std::string& needle) {
    for (const auto& c : r.checks)
        if (c.name.find(needle) != std::string::npos) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("build_table reference tables") {
    SequencePlan p = ref_plan({1, 1, 2, 3, 8});
    CHECK(materialize(build_table(p, 2, MapId::Psi)) ==
          std::vector<std::uint32_t>{0, 1, 4, 2, 3, 5});
    CHECK(materialize(build_table(p, 2, MapId::PsiInv)) ==
          std::vector<std::uint32_t>{0, 1, 3, 4, 2, 5});
    CHECK(materialize(build_table(p, 2, MapId::Phi)) ==
          std::vector<std::uint32_t>{0, 1, 0, 1, 2, 2, 0, 1});
    CHECK(materialize(build_table(p, 2, MapId::ModKnPsiInv)) ==
          std::vector<std::uint32_t>{0, 1, 0, 1, 2, 2});
    CHECK(materialize(build_table(p, 1, MapId::Psi)) == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("build_table honors the cap") {
    SequencePlan p = ref_plan({1, 1, 2, 3, 8});
    CHECK_THROWS_AS(build_table(p, 2, MapId::Psi, 4), CapExceededError);
}

TEST_CASE("verify_level: diagram defect on the 6-point reference") {
    SequencePlan p = ref_plan({1, 1, 2, 3});
    LevelReport r = verify_level(p, 2, p.omega);
    CHECK(r.all_pass());
    CHECK(r.has_diagram);
    CHECK(r.diagram_defect == mpq_class(1, 6));
    CHECK(r.diagram_bound == mpq_class(2, 3));
    CHECK(r.diagram_defect_points == std::vector<std::uint64_t>{5});
    CHECK(r.table_mismatches == 0);
    CHECK_FALSE(r.has_composition);  // needs k_{n+1}
}

TEST_CASE("verify_level: composition and fiber on the 8-point reference") {
    SequencePlan p = ref_plan({1, 1, 2, 3, 8});
    LevelReport r = verify_level(p, 2, p.omega);
    CHECK(r.all_pass());
    CHECK(r.has_composition);
    CHECK(r.composition_defect == mpq_class(1, 8));
    CHECK(r.composition_bound == mpq_class(2, 3) + mpq_class(3, 4));
    CHECK(r.composition_defect_points == std::vector<std::uint64_t>{5});
    CHECK(r.has_fiber);
    CHECK(r.fiber_max == mpq_class(3, 8));
    CHECK(r.fiber_bound == mpq_class(7, 12));
}

TEST_CASE("verify_plan passes on the depth-4 reference") {
    SequencePlan p = ref_plan({1, 1, 2, 3, 8, 27});
    VerificationReport rep = verify_plan(p, p.omega);
    CHECK(rep.levels.size() == 4);
    CHECK(rep.all_pass());
    CHECK_FALSE(rep.any_skipped());
    // exact norms never exceed the closed-form bounds
    for (const auto& lvl : rep.levels) {
        CHECK(lvl.has_norms);
        CHECK(lvl.norm_psi <= lvl.psi_bound);
        CHECK(lvl.norm_psi_inv <= lvl.psi_bound);
        CHECK(lvl.norm_mod_psi_inv <= lvl.psi_bound);
        if (lvl.has_phi_norm) CHECK(lvl.norm_phi <= lvl.phi_bound);
    }
}

TEST_CASE("mutated tables are flagged") {
    SequencePlan p = ref_plan({1, 1, 2, 3, 8, 27});
    LevelTables t = build_level_tables(p, 3, 1 << 24);
    auto& psi3 = t.psi[3];
    std::swap(psi3[2], psi3[3]);  // still a permutation
    LevelReport r = verify_level_with_tables(p, 3, p.omega, t);
    CHECK_FALSE(r.all_pass());
    CHECK(find_check(r, "bijection")->pass);
    CHECK_FALSE(find_check(r, "evaluator agreement")->pass);
}

TEST_CASE("oversized levels are skipped, not failed") {
    // k_3 = 2^30 makes the level-3 and level-4 domains exceed a small cap
    SequencePlan p = ref_plan({1, 1, 2, 3, mpz_class(1) << 30, (mpz_class(3) << 60)});
    VerifyOptions opt;
    opt.enumeration_cap = 1 << 16;
    VerificationReport rep = verify_plan(p, p.omega, opt);
    CHECK(rep.any_skipped());
    CHECK(rep.levels[2].skipped);
    CHECK(rep.levels[0].all_pass());
    CHECK(rep.all_pass());  // skipped levels carry no failing checks
}

TEST_CASE("verification is thread-count invariant") {
    SequencePlan p = ref_plan({1, 1, 2, 3, 8, 27});
    VerifyOptions one, eight;
    one.threads = 1;
    eight.threads = 8;
    const auto a = verification_to_json(verify_plan(p, p.omega, one)).dump();
    const auto b = verification_to_json(verify_plan(p, p.omega, eight)).dump();
    CHECK(a == b);
    CHECK(verification_to_csv(verify_plan(p, p.omega, one)) ==
          verification_to_csv(verify_plan(p, p.omega, eight)));
}

TEST_CASE("fuzzing finds no violations") {
    std::vector<OmegaFn> omegas{OmegaFn::power(mpq_class(1, 2)), OmegaFn::log(),
                                OmegaFn::constant(1)};
    FuzzReport rep = fuzz_plans(0, 10, 4, 5000, omegas);
    CHECK(rep.plans == 10);
    CHECK(rep.checks_run > 0);
    CHECK(rep.violations == 0);
    CHECK(rep.failures.empty());
}

TEST_CASE("fuzzing is deterministic per seed and empty for count 0") {
    std::vector<OmegaFn> omegas{OmegaFn::log()};
    FuzzReport a = fuzz_plans(7, 5, 4, 5000, omegas);
    FuzzReport b = fuzz_plans(7, 5, 4, 5000, omegas);
    CHECK(a.checks_run == b.checks_run);
    REQUIRE(a.reports.size() == b.reports.size());
    for (std::size_t i = 0; i < a.reports.size(); ++i)
        CHECK(a.reports[i].plan_hash == b.reports[i].plan_hash);

    FuzzReport empty = fuzz_plans(0, 0, 4, 5000, omegas);
    CHECK(empty.plans == 0);
    CHECK(empty.checks_run == 0);
    CHECK(empty.reports.empty());
}

TEST_CASE("report serialization includes the documented defects") {
    SequencePlan p = ref_plan({1, 1, 2, 3, 8, 27});
    VerificationReport rep = verify_plan(p, p.omega);
    const std::string csv = verification_to_csv(rep);
    CHECK(csv.find("1/6") != std::string::npos);
    CHECK(csv.find("1/8") != std::string::npos);
    const std::string dcsv = defect_plot_csv(rep);
    CHECK(dcsv.find("2,1/6,2/3") != std::string::npos);
    Json j = verification_to_json(rep);
    CHECK(j.at("all_pass").get<bool>());
    CHECK(j.at("levels").size() == 4);
}
