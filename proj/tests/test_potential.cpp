#include <doctest.h>

#include <random>

#include "fibcone/errors.hpp"
#include "fibcone/potential.hpp"

using namespace fibcone;

TEST_CASE("fib_value basics") {
    // lambda = 0 annihilates the field
    for (std::uint64_t j : {1, 5, 1000}) CHECK(fib_value(j, 0.0, 0.37L) == 0.0);

    // first eight values at omega = 0 (circle map evaluated at >= 50-digit
    // precision: 1,0,1,1,0,1,0,1)
    const double expect[8] = {1, 0, 1, 1, 0, 1, 0, 1};
    for (int j = 1; j <= 8; ++j) CHECK(fib_value(j, 1.0, 0.0L) == expect[j - 1]);

    // 2/phi mod 1 ~ 0.236, outside [1 - 1/phi, 1)
    CHECK(fib_value(2, 3.0, 0.0L) == 0.0);

    CHECK_THROWS_AS(fib_value(3, 1.0, 1.5L), domain_error);
}

TEST_CASE("fib_word substitution") {
    CHECK(fib_word(1) == "a");
    CHECK(fib_word(2) == "a");
    CHECK(fib_word(3) == "ab");
    CHECK(fib_word(6) == "abaababa");
    CHECK(fib_word(10).size() == 55);
    CHECK_THROWS_AS(fib_word(0), domain_error);
}

TEST_CASE("word/circle-map equality and no-bb factor") {
    // with a -> lambda, b -> 0 the first F_k entries of the omega=0 field
    // equal the k-th substitution word
    const double lambda = 2.5;
    const auto seq = generate({PotentialKind::Fibonacci, lambda}, 7000);
    std::uint64_t Fk1 = 1, Fk = 1;
    for (int k = 1; k <= 20; ++k) {
        const std::string w = fib_word(k);
        REQUIRE(w.size() <= seq.values.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            CHECK(seq.values[i] == (w[i] == 'a' ? lambda : 0.0));
        const std::uint64_t next = Fk + Fk1;
        Fk1 = Fk;
        Fk = next;
    }
    // no two consecutive zeros anywhere
    for (std::size_t i = 0; i + 1 < seq.values.size(); ++i)
        CHECK((seq.values[i] != 0.0 || seq.values[i + 1] != 0.0));
}

TEST_CASE("shift_phase identity and golden ratio") {
    CHECK(shift_phase(0.25L, 0) == 0.25L);
    CHECK(std::abs(static_cast<double>(shift_phase(0.0L, 1)) - 0.6180339887498949) < 1e-15);
}

TEST_CASE("covariance V_{j+l}(omega) = V_j(omega_l)") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const long double omega = uni(rng);
        for (std::uint64_t l : {0ULL, 1ULL, 3ULL, 17ULL, 100ULL}) {
            const long double omega_l = shift_phase(omega, l);
            for (std::uint64_t j = 1; j <= 10000; j += 7)
                REQUIRE(fib_value(j + l, 1.0, omega) == fib_value(j, 1.0, omega_l));
        }
    }
}

TEST_CASE("generate: kinds and determinism") {
    const auto free4 = generate({PotentialKind::Free}, 4);
    CHECK(free4.values == std::vector<double>{0, 0, 0, 0});

    PotentialSpec fib{PotentialKind::Fibonacci, 8.0};
    CHECK(generate(fib, 5).values == std::vector<double>{8, 0, 8, 8, 0});

    PotentialSpec dimer{PotentialKind::RandomDimer, 0.5};
    dimer.seed = 7;
    const auto d6 = generate(dimer, 6);
    for (std::size_t i = 0; i < 6; i += 2) {
        CHECK(d6.values[i] == d6.values[i + 1]);
        CHECK(std::abs(d6.values[i]) == 0.5);
    }
    CHECK(generate(dimer, 6).values == d6.values); // bitwise reproducible

    PotentialSpec iid{PotentialKind::IidRandom, 1.5};
    iid.seed = 3;
    const auto r = generate(iid, 64);
    for (double v : r.values) CHECK(std::abs(v) == 1.5);
    CHECK(generate(iid, 64).values == r.values);

    PotentialSpec per{PotentialKind::Periodic};
    per.period_values = {1.0, -1.0, 0.5};
    CHECK(generate(per, 5).values == std::vector<double>{1.0, -1.0, 0.5, 1.0, -1.0});

    CHECK_THROWS_AS(generate(fib, 0), domain_error);
    PotentialSpec bad = fib;
    bad.lambda = -1;
    CHECK_THROWS_AS(generate(bad, 3), domain_error);
    PotentialSpec badper{PotentialKind::Periodic};
    CHECK_THROWS_AS(generate(badper, 3), domain_error);
}

TEST_CASE("spec json round trip with defaults") {
    PotentialSpec s{PotentialKind::Fibonacci, 8.0, 0.25};
    nlohmann::json j = s;
    const auto back = j.get<PotentialSpec>();
    CHECK(back == s);

    const auto partial = nlohmann::json{{"kind", "fibonacci"}, {"lambda", 2.0}}.get<PotentialSpec>();
    CHECK(partial.kind == PotentialKind::Fibonacci);
    CHECK(partial.lambda == 2.0);
    CHECK(partial.omega == 0.0);
}
