#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oe/omega.hpp"

using namespace oe;

TEST_CASE("eval examples") {
    CHECK(OmegaFn::power(mpq_class(1, 2)).eval(mpz_class(4)) == doctest::Approx(2.0));
    CHECK(OmegaFn::power(1).eval(mpz_class(7)) == doctest::Approx(7.0));
    CHECK(OmegaFn::log().eval(mpz_class(0)) == doctest::Approx(0.0));
    CHECK(OmegaFn::constant(3).eval(mpz_class(1'000'000)) == doctest::Approx(3.0));
    OmegaFn tab = OmegaFn::table({0.0, 1.0, 1.5});
    CHECK(tab.eval(mpz_class(1)) == doctest::Approx(1.0));
    CHECK(tab.eval(mpz_class(100)) == doctest::Approx(1.5));  // constant extension
}

TEST_CASE("u64 and mpz eval agree") {
    for (const OmegaFn& w : {OmegaFn::power(mpq_class(1, 3)), OmegaFn::log(),
                             OmegaFn::power_log(mpq_class(1, 2), mpq_class(-1)),
                             OmegaFn::constant(mpq_class(1, 4))})
        for (std::uint64_t n : {0ull, 1ull, 2ull, 17ull, 65536ull, 1ull << 40})
            CHECK(w.eval(n) == doctest::Approx(w.eval(mpz_class(static_cast<unsigned long>(n)))));
}

TEST_CASE("monotone on a geometric sample") {
    for (const OmegaFn& w :
         {OmegaFn::power(mpq_class(1, 2)), OmegaFn::power(1), OmegaFn::log(),
          OmegaFn::power_log(mpq_class(1, 2), mpq_class(-1)), OmegaFn::constant(2),
          OmegaFn::table({0.0, 0.5, 0.5, 2.0})}) {
        double prev = w.eval(std::uint64_t{0});
        for (std::uint64_t n = 1; n <= (1u << 20); n = n < 16 ? n + 1 : n * 2) {
            double cur = w.eval(n);
            CHECK(cur >= prev - 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("family validation") {
    CHECK_THROWS_AS(OmegaFn::power(0), Error);
    CHECK_THROWS_AS(OmegaFn::power(mpq_class(3, 2)), Error);
    CHECK_THROWS_AS(OmegaFn::constant(-1), Error);
    CHECK_THROWS_AS(OmegaFn::table({}), Error);
    CHECK_THROWS_AS(OmegaFn::table({1.0, 0.5}), Error);  // decreasing
}

TEST_CASE("sublinearity flags") {
    CHECK(OmegaFn::power(mpq_class(1, 2)).is_sublinear());
    CHECK_FALSE(OmegaFn::power(1).is_sublinear());
    CHECK(OmegaFn::power_log(1, -1).is_sublinear());  // n / log n is sublinear
    CHECK(OmegaFn::log().is_sublinear());
    CHECK(OmegaFn::constant(5).is_sublinear());
    CHECK(OmegaFn::table({1.0, 2.0}).is_sublinear());
}

TEST_CASE("sublinearity threshold") {
    const mpz_class cap = mpz_class(1) << 40;
    // n^{-1/2} < 0.1 first holds past n = 100; first power of two is 128
    CHECK(OmegaFn::power(mpq_class(1, 2)).sublinearity_threshold(0.1, cap) == 128);
    CHECK(OmegaFn::constant(0).sublinearity_threshold(0.5, cap) == 1);
    CHECK_THROWS_AS(OmegaFn::power(1).sublinearity_threshold(0.5, cap), NotSublinearError);
    // log decays too slowly to get below 1e-15 within a small cap
    CHECK_THROWS_AS(OmegaFn::log().sublinearity_threshold(1e-15, mpz_class(1 << 20)),
                    CapExceededError);
    CHECK_THROWS_AS(OmegaFn::log().sublinearity_threshold(0.0, cap), Error);
}

TEST_CASE("parse and describe round-trip") {
    for (const char* s : {"power:1/2", "powerlog:1/2:-1", "log", "const:1", "table:0,1,2"}) {
        OmegaFn w = OmegaFn::parse(s);
        CHECK(OmegaFn::parse(w.describe()) == w);
    }
    CHECK(OmegaFn::parse("power:1/2") == OmegaFn::power(mpq_class(1, 2)));
    CHECK_THROWS_AS(OmegaFn::parse("cubic:3"), Error);
}

TEST_CASE("log_eval matches log of eval at moderate sizes") {
    for (const OmegaFn& w : {OmegaFn::power(mpq_class(1, 2)), OmegaFn::log(),
                             OmegaFn::power_log(mpq_class(1, 3), mpq_class(2)),
                             OmegaFn::constant(7)})
        for (unsigned long n : {1ul, 2ul, 1000ul, 1ul << 30})
            CHECK(w.log_eval(n) == doctest::Approx(std::log(w.eval(mpz_class(n)))));
}

TEST_CASE("log_eval survives arguments beyond double range") {
    const mpz_class huge = mpz_class(1) << 10000;  // 2^10000 overflows a double
    CHECK_THROWS_AS(OmegaFn::power(mpq_class(1, 2)).eval(huge), OmegaOverflowError);
    CHECK(OmegaFn::power(mpq_class(1, 2)).log_eval(huge) ==
          doctest::Approx(5000.0 * std::log(2.0)));
    CHECK(OmegaFn::log().log_eval(huge) == doctest::Approx(std::log(10000.0 * std::log(2.0))));
    CHECK(OmegaFn::constant(2).log_eval(huge) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("log_mpz") {
    CHECK(log_mpz(1) == doctest::Approx(0.0));
    CHECK(log_mpz(mpz_class(1) << 100) == doctest::Approx(100.0 * std::log(2.0)));
    CHECK_THROWS_AS(log_mpz(0), Error);
}
