#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "oe/coupling.hpp"
#include "oe/plan.hpp"
#include "oe/simulate.hpp"

using namespace oe;

namespace {

const BaseSequence kRef3{std::vector<mpz_class>{1, 1, 2, 3}};
const BaseSequence kRef4{std::vector<mpz_class>{1, 1, 2, 3, 8}};
const BaseSequence kRef5{std::vector<mpz_class>{1, 1, 2, 3, 8, 27}};

std::vector<long> table_of(const BaseSequence& seq, long n,
                           mpz_class (*f)(const BaseSequence&, long, const mpz_class&)) {
    const mpz_class dom = seq.k(n - 1) * seq.k(n);
    std::vector<long> out;
    for (mpz_class x = 0; x < dom; ++x) out.push_back(f(seq, n, x).get_si());
    return out;
}

}  // namespace

TEST_CASE("psi level 1 is the identity") {
    for (long x = 0; x < 2; ++x) {
        CHECK(psi_eval(kRef3, 1, x) == x);
        CHECK(psi_inv_eval(kRef3, 1, x) == x);
    }
}

TEST_CASE("psi level 2 reference tables") {
    CHECK(table_of(kRef3, 2, psi_eval) == std::vector<long>{0, 1, 4, 2, 3, 5});
    CHECK(table_of(kRef3, 2, psi_inv_eval) == std::vector<long>{0, 1, 3, 4, 2, 5});
}

TEST_CASE("psi fixes both endpoints at every level") {
    for (long n = 1; n <= kRef5.depth(); ++n) {
        const mpz_class dom = kRef5.k(n - 1) * kRef5.k(n);
        CHECK(psi_eval(kRef5, n, 0) == 0);
        CHECK(psi_eval(kRef5, n, mpz_class(dom - 1)) == dom - 1);
        CHECK(psi_inv_eval(kRef5, n, 0) == 0);
        CHECK(psi_inv_eval(kRef5, n, mpz_class(dom - 1)) == dom - 1);
    }
}

TEST_CASE("psi_inv inverts psi exhaustively at oracle scale") {
    for (long n = 1; n <= kRef5.depth(); ++n) {
        const mpz_class dom = kRef5.k(n - 1) * kRef5.k(n);
        for (mpz_class x = 0; x < dom; ++x) {
            CHECK(psi_inv_eval(kRef5, n, psi_eval(kRef5, n, x)) == x);
            CHECK(psi_eval(kRef5, n, psi_inv_eval(kRef5, n, x)) == x);
        }
    }
}

TEST_CASE("u64 and mpz evaluators agree") {
    std::vector<std::uint64_t> ks{1, 1, 2, 3, 8, 27};
    KSpan<std::uint64_t> kv{std::span<const std::uint64_t>(ks)};
    for (long n = 1; n <= kv.depth(); ++n) {
        const std::uint64_t dom = kv.k(n - 1) * kv.k(n);
        for (std::uint64_t x = 0; x < dom; ++x) {
            CHECK(psi_eval(kv, n, x) == psi_eval(kRef5, n, mpz_class(x)).get_ui());
            CHECK(psi_inv_eval(kv, n, x) == psi_inv_eval(kRef5, n, mpz_class(x)).get_ui());
        }
    }
}

TEST_CASE("range and level errors") {
    CHECK_THROWS_AS(psi_eval(kRef3, 2, 6), Error);
    CHECK_THROWS_AS(psi_eval(kRef3, 3, 0), Error);
    CHECK_THROWS_AS(psi_inv_eval(kRef3, 0, 0), Error);
    CHECK_THROWS_AS(phi_eval(kRef3, 2, 0), Error);  // needs depth >= n+1
}

TEST_CASE("euclidean decomposition invariants") {
    auto kv = kspan(kRef5);
    for (long n = 1; n <= 3; ++n) {
        const mpz_class dom = kRef5.k(n) * kRef5.k(n + 1);
        for (mpz_class x = 0; x < dom; x += 7) {
            auto dec = decompose(kv, n, x);
            const mpz_class K = kRef5.k(n - 1) * kRef5.k(n);
            CHECK(dec.a * kRef5.k(n + 1) + dec.b == x);
            CHECK(dec.c * K + dec.d == kRef5.k(n + 1));
            CHECK(dec.e * K + dec.f == dec.b);
            CHECK(dec.e <= dec.c);
            if (dec.e == dec.c) CHECK(dec.f < dec.d);
        }
    }
}

TEST_CASE("red region and boundary set at level 2") {
    auto kv = kspan(kRef3);
    // level-2 red region of (1,1,2,3): e = c exactly at x = 2, 5
    std::vector<bool> red;
    for (std::uint64_t x = 0; x < 6; ++x) red.push_back(is_red(kv, 2, mpz_class(x)));
    CHECK(red == std::vector<bool>{false, false, true, false, false, true});

    BoundarySet<mpz_class> bs{kv, 2};
    CHECK(bs.domain() == 6);
    std::vector<bool> member;
    for (std::uint64_t x = 0; x < 6; ++x) member.push_back(bs.is_member(mpz_class(x)));
    // color changes after 1, 2, 4; outer wrap at 5
    CHECK(member == std::vector<bool>{false, true, true, false, true, true});
    CHECK_THROWS_AS(bs.is_member(mpz_class(6)), Error);
}

TEST_CASE("phi reference tables") {
    std::vector<long> phi1, phi2;
    for (mpz_class x = 0; x < 3; ++x) phi1.push_back(phi_eval(kRef4, 1, x).get_si());
    for (mpz_class x = 0; x < 8; ++x) phi2.push_back(phi_eval(kRef4, 2, x).get_si());
    CHECK(phi1 == std::vector<long>{0, 1, 0});
    CHECK(phi2 == std::vector<long>{0, 1, 0, 1, 2, 2, 0, 1});
    for (long n = 1; n <= 2; ++n) CHECK(phi_eval(kRef4, n, 0) == 0);
}

TEST_CASE("cocycle of an interval map") {
    std::vector<std::uint32_t> psi2{0, 1, 4, 2, 3, 5};
    IntervalMap m;
    m.domain = 6;
    m.codomain = 6;
    m.eval = [&psi2](const mpz_class& x) { return mpz_class(psi2[x.get_ui()]); };
    CHECK(cocycle(m, 1) == 3);
    CHECK(cocycle(m, 5) == -5);  // wrap: psi(0) - psi(5)
    CHECK_THROWS_AS(cocycle(m, 6), Error);

    IntervalMap id2;
    id2.domain = 2;
    id2.codomain = 2;
    id2.eval = [](const mpz_class& x) { return x; };
    CHECK(cocycle(id2, 0) == 1);
    CHECK(cocycle(id2, 1) == -1);
}

TEST_CASE("cocycle of phi") {
    CHECK(cocycle_of_phi(kRef4, 2, 3) == 1);
    CHECK(cocycle_of_phi(kRef4, 2, 5) == -2);
    // x = k_3 - 1 wraps to phi(0) - phi(7) = -phi(7)
    CHECK(cocycle_of_phi(kRef4, 2, 7) == -phi_eval(kRef4, 2, 7));
}

TEST_CASE("shortcut cocycle agrees away from block wraps") {
    auto kv = kspan(kRef4);
    // within the first k_1 k_2 = 6 block (excluding its wrap at 5)
    for (std::uint64_t x = 0; x < 5; ++x)
        CHECK(phi_cocycle_shortcut(kv, 2, mpz_class(x)) == cocycle_of_phi(kv, 2, mpz_class(x)));
}

TEST_CASE("psi norm bound closed form") {
    // (1,1,2,3), n=2, identity weight: 1*w(2)+1.5*w(1) + (2/3)*w(6)+(7/6)*w(1) = 26/3
    NormValue b = psi_norm_bound(kRef3, 2, OmegaFn::power(1));
    CHECK(b.value == doctest::Approx(26.0 / 3.0));
    CHECK(psi_norm_bound(kRef3, 1, OmegaFn::constant(0)).value == doctest::Approx(0.0));
    CHECK_THROWS_AS(psi_norm_bound(kRef3, 3, OmegaFn::log()), Error);
}

TEST_CASE("phi norm bound adds the wrap term") {
    NormValue b = phi_norm_bound(kRef4, 2, OmegaFn::power(1));
    CHECK(b.value == doctest::Approx(26.0 / 3.0 + 9.0 / 4.0));
    CHECK(phi_norm_bound(kRef4, 2, OmegaFn::constant(0)).value == doctest::Approx(0.0));
}

TEST_CASE("deep random inversion round-trip") {
    SequencePlan p = plan(SupernaturalNumber::parse("2^inf"), SupernaturalNumber::parse("3^inf"),
                          OmegaFn::power(mpq_class(1, 2)), mpq_class(1, 10), 6);
    BaseSequence seq = p.sequence();
    const long n = 6;
    const mpz_class dom = seq.k(n - 1) * seq.k(n);
    CounterRng rng(42, 0);
    for (int i = 0; i < 200; ++i) {
        mpz_class x = rng.uniform(dom);
        CHECK(psi_inv_eval(seq, n, psi_eval(seq, n, x)) == x);
    }
}
