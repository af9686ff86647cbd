#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fibcone/errors.hpp"
#include "fibcone/onebody.hpp"
#include "fibcone/oracle.hpp"

using namespace fibcone;
using namespace fibcone::oracle;
using cd = std::complex<double>;

TEST_CASE("build_xy small cases") {
    PotentialSpec per{PotentialKind::Periodic};
    per.period_values = {0.7};
    const auto H1 = build_xy(per, 1);
    CHECK(std::abs(H1(0, 0) - cd(0.7, 0)) <= 1e-15);
    CHECK(std::abs(H1(1, 1) - cd(-0.7, 0)) <= 1e-15);

    const auto H2 = build_xy({PotentialKind::Free}, 2);
    CHECK((H2 - H2.adjoint()).norm() <= 1e-12);
    CHECK(std::abs(H2.trace()) <= 1e-12);

    CHECK_THROWS_AS(build_xy({PotentialKind::Free}, 13), domain_error);
}

TEST_CASE("many-body spectrum is the filled free-fermion spectrum up to a shift") {
    const PotentialSpec spec{PotentialKind::Fibonacci, 1.0};
    const int n = 3;
    const auto H = build_xy(spec, n);
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(H);
    std::vector<double> many(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());

    const auto one = eigensolve(build_hamiltonian(spec, n));
    std::vector<double> filled;
    for (int mask = 0; mask < (1 << n); ++mask) {
        double sum = 0.0;
        for (int m = 0; m < n; ++m)
            if (mask & (1 << m)) sum += 2.0 * one.eigenvalues[m];
        filled.push_back(sum);
    }
    std::sort(filled.begin(), filled.end());
    const auto center = [](std::vector<double>& v) {
        double mean = 0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        for (double& x : v) x -= mean;
    };
    center(many);
    center(filled);
    for (std::size_t i = 0; i < many.size(); ++i) CHECK(std::abs(many[i] - filled[i]) <= 1e-8);
}

TEST_CASE("jordan-wigner: first operator, CAR, sigma-z identity") {
    const auto jw1 = jordan_wigner(1);
    CHECK((jw1.c[0] - lowering(1, 1)).norm() <= 1e-15);

    const auto jw = jordan_wigner(5);
    CHECK(car_defect(jw) <= 1e-12);
    CHECK(sigma_z_identity_defect(jw) <= 1e-12);
}

TEST_CASE("heisenberg evolution basics") {
    const PotentialSpec spec{PotentialKind::Fibonacci, 1.0};
    const int n = 4;
    const auto H = build_xy(spec, n);
    const auto A = site_operator(pauli_x(), 2, n);

    CHECK((heisenberg(A, H, 0.0) - A).norm() <= 1e-12);

    const auto At = heisenberg(A, H, 1.3);
    CHECK(std::abs(operator_norm(At) - operator_norm(A)) <= 1e-10);

    const Evolution evo(H);
    const auto once = evo.conjugate(evo.conjugate(A, 0.4), 0.9);
    const auto direct = evo.conjugate(A, 1.3);
    CHECK((once - direct).norm() <= 1e-9);

    CHECK_THROWS_AS(heisenberg(A, A + cd(0, 2) * site_operator(pauli_y(), 1, n), 1.0),
                    domain_error);
}

TEST_CASE("free-fermion reduction: defects and gauge record") {
    {
        const auto r = verify_free_fermion({PotentialKind::Fibonacci, 8.0}, 5, 2, 0.0);
        CHECK(r.defect <= 1e-10);
    }
    for (double omega : {0.0, 0.3}) {
        PotentialSpec spec{PotentialKind::Fibonacci, 8.0, omega};
        const auto r = verify_free_fermion(spec, 6, 3, 1.7);
        CHECK(r.defect <= 1e-8);
        CHECK(r.magnitude_defect <= 1e-8);
    }
}

TEST_CASE("operator norm: power iteration agrees with SVD on random matrices") {
    std::uint64_t state = 12345;
    auto next_unit = [&state] {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<double>(state % 2048) / 1024.0 - 1.0;
    };
    for (int trial = 0; trial < 5; ++trial) {
        DenseOperator A(24, 24);
        for (Eigen::Index i = 0; i < 24; ++i)
            for (Eigen::Index j = 0; j < 24; ++j) A(i, j) = cd(next_unit(), next_unit());
        const double svd = A.jacobiSvd().singularValues()(0);
        CHECK(operator_norm(A) == doctest::Approx(svd).epsilon(1e-9));
    }
}

TEST_CASE("exact commutator norms: commuting pair and generic bound") {
    const PotentialSpec spec{PotentialKind::Fibonacci, 1.0};
    const int n = 5;
    const auto H = build_xy(spec, n);
    const auto A = site_operator(pauli_z(), 2, n);
    const auto B = site_operator(pauli_z(), 2, n);
    CHECK(exact_commutator_norm(A, B, H, 0.0) <= 1e-10);

    // LR(1) sanity: ||[tau_t(A), B]|| <= 2 ||A|| ||B||
    const auto C = site_operator(pauli_x(), 4, n);
    const double norm = exact_commutator_norm(A, C, H, 1.7);
    CHECK(norm <= 2.0 * operator_norm(A) * operator_norm(C) + 1e-9);
}

TEST_CASE("propagator lower bound and fermionic envelope at n=8") {
    const PotentialSpec spec{PotentialKind::Fibonacci, 8.0};
    const int n = 8;
    const auto H = build_xy(spec, n);
    const auto jw = jordan_wigner(n);
    const Evolution evo(H);
    const Propagator P(eigensolve(build_hamiltonian(spec, n)));

    for (double t : {0.5, 1.7}) {
        const auto tau_c = [&](int l) { return evo.conjugate(jw.c[l - 1], t); };
        for (int l : {1, 3}) {
            const auto row = P.row(static_cast<std::size_t>(l), t);
            const DenseOperator tau = tau_c(l);
            for (int r : {l + 2, l + 4}) {
                const DenseOperator araise = lowering(r, n).adjoint();
                const double exact = operator_norm(tau * araise - araise * tau);
                // Lemma-type lower bound through the raising operator
                CHECK(exact >= std::abs(row.amplitudes[r - 1]) - 1e-8);
                // one-body amplitude envelope
                double envelope = 0.0;
                for (int k = r; k <= n; ++k) envelope += std::abs(row.amplitudes[k - 1]);
                CHECK(exact <= 2.0 * envelope + 1e-8);
            }
        }
    }
}
