#include "fibcone/oracle.hpp"

#include <cmath>

#include "fibcone/errors.hpp"
#include "fibcone/onebody.hpp"

namespace fibcone::oracle {

namespace {
constexpr int kMaxBuildSites = 12;
const std::complex<double> kI{0.0, 1.0};
} // namespace

DenseOperator pauli_x() {
    DenseOperator m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

DenseOperator pauli_y() {
    DenseOperator m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}

DenseOperator pauli_z() {
    DenseOperator m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

DenseOperator site_operator(const DenseOperator& op, int j, int n) {
    if (j < 1 || j > n) throw domain_error("site_operator: site out of range");
    DenseOperator out = DenseOperator::Identity(1, 1);
    for (int i = 1; i <= n; ++i) {
        const DenseOperator& factor = (i == j) ? op : DenseOperator::Identity(2, 2);
        DenseOperator next(out.rows() * factor.rows(), out.cols() * factor.cols());
        for (Eigen::Index r = 0; r < out.rows(); ++r)
            for (Eigen::Index c = 0; c < out.cols(); ++c)
                next.block(r * factor.rows(), c * factor.cols(), factor.rows(), factor.cols()) =
                    out(r, c) * factor;
        out = std::move(next);
    }
    return out;
}

DenseOperator lowering(int j, int n) {
    return 0.5 * (site_operator(pauli_x(), j, n) - kI * site_operator(pauli_y(), j, n));
}

DenseOperator build_xy(const PotentialSpec& spec, int n) {
    if (n < 1) throw domain_error("build_xy: n must be >= 1");
    if (n > kMaxBuildSites)
        throw domain_error("build_xy: n > 12 exceeds the dense oracle budget");
    const auto V = generate(spec, static_cast<std::size_t>(n)).values;
    const Eigen::Index dim = Eigen::Index(1) << n;
    DenseOperator H = DenseOperator::Zero(dim, dim);
    for (int j = 1; j + 1 <= n; ++j) {
        H -= site_operator(pauli_x(), j, n) * site_operator(pauli_x(), j + 1, n);
        H -= site_operator(pauli_y(), j, n) * site_operator(pauli_y(), j + 1, n);
    }
    for (int j = 1; j <= n; ++j) H += V[j - 1] * site_operator(pauli_z(), j, n);
    return H;
}

JordanWignerFamily jordan_wigner(int n) {
    if (n < 1 || n > kMaxBuildSites) throw domain_error("jordan_wigner: n out of range");
    JordanWignerFamily jw;
    jw.n = n;
    const Eigen::Index dim = Eigen::Index(1) << n;
    DenseOperator string = DenseOperator::Identity(dim, dim);
    for (int j = 1; j <= n; ++j) {
        jw.c.push_back(string * lowering(j, n));
        jw.c_dagger.push_back(jw.c.back().adjoint());
        string = string * site_operator(pauli_z(), j, n);
    }
    return jw;
}

double car_defect(const JordanWignerFamily& jw) {
    const Eigen::Index dim = jw.c.front().rows();
    double worst = 0.0;
    for (int j = 0; j < jw.n; ++j) {
        for (int k = 0; k < jw.n; ++k) {
            DenseOperator anti1 = jw.c[j] * jw.c_dagger[k] + jw.c_dagger[k] * jw.c[j];
            if (j == k) anti1 -= DenseOperator::Identity(dim, dim);
            worst = std::max(worst, anti1.norm());
            const DenseOperator anti2 = jw.c[j] * jw.c[k] + jw.c[k] * jw.c[j];
            worst = std::max(worst, anti2.norm());
        }
    }
    return worst;
}

double sigma_z_identity_defect(const JordanWignerFamily& jw) {
    const Eigen::Index dim = jw.c.front().rows();
    double worst = 0.0;
    for (int l = 1; l <= jw.n; ++l) {
        const DenseOperator lhs = site_operator(pauli_z(), l, jw.n);
        const DenseOperator rhs =
            2.0 * jw.c_dagger[l - 1] * jw.c[l - 1] - DenseOperator::Identity(dim, dim);
        worst = std::max(worst, (lhs - rhs).norm());
    }
    return worst;
}

Evolution::Evolution(const DenseOperator& H) {
    if ((H - H.adjoint()).norm() > 1e-10 * std::max(1.0, H.norm()))
        throw domain_error("heisenberg: Hamiltonian is not Hermitian");
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(H);
    if (es.info() != Eigen::Success) throw numeric_failure("heisenberg: eigensolve failed");
    energies_ = es.eigenvalues();
    basis_ = es.eigenvectors();
}

DenseOperator Evolution::conjugate(const DenseOperator& A, double t) const {
    if (A.rows() != basis_.rows()) throw domain_error("heisenberg: dimension mismatch");
    Eigen::VectorXcd phases(energies_.size());
    for (Eigen::Index i = 0; i < energies_.size(); ++i)
        phases(i) = std::polar(1.0, energies_(i) * t);
    const DenseOperator U = basis_ * phases.asDiagonal() * basis_.adjoint();
    return U * A * U.adjoint();
}

DenseOperator heisenberg(const DenseOperator& A, const DenseOperator& H, double t) {
    return Evolution(H).conjugate(A, t);
}

FreeFermionDefect verify_free_fermion(const PotentialSpec& spec, int n, int j, double t) {
    if (n > 10) throw domain_error("verify_free_fermion: n > 10 exceeds the norm-scan budget");
    if (j < 1 || j > n) throw domain_error("verify_free_fermion: source site out of range");
    const DenseOperator H = build_xy(spec, n);
    const JordanWignerFamily jw = jordan_wigner(n);
    const Evolution evo(H);
    const DenseOperator tau_cj = evo.conjugate(jw.c[j - 1], t);

    const Propagator P(eigensolve(build_hamiltonian(spec, static_cast<std::size_t>(n))));
    const auto row = P.row(static_cast<std::size_t>(j), t);

    const Eigen::Index dim = Eigen::Index(1) << n;
    FreeFermionDefect out;
    double best = std::numeric_limits<double>::infinity();
    for (const bool alternating : {false, true}) {
        DenseOperator combo = DenseOperator::Zero(dim, dim);
        for (int k = 1; k <= n; ++k) {
            double gauge = 1.0;
            if (alternating && ((j + k) % 2)) gauge = -1.0;
            combo += gauge * row.amplitudes[k - 1] * jw.c[k - 1];
        }
        const double defect = (tau_cj - combo).norm();
        if (defect < best) {
            best = defect;
            out.defect = defect;
            out.gauge = alternating ? "alternating" : "identity";
        }
    }
    // gauge-independent magnitude check via the normalized trace inner product
    const double trace_norm = std::pow(2.0, n - 1);
    double worst = 0.0;
    for (int k = 1; k <= n; ++k) {
        const std::complex<double> coeff = (jw.c_dagger[k - 1] * tau_cj).trace() / trace_norm;
        worst = std::max(worst, std::abs(std::abs(coeff) - std::abs(row.amplitudes[k - 1])));
    }
    out.magnitude_defect = worst;
    return out;
}

double operator_norm(const DenseOperator& A) {
    // power iteration on A* A with a fixed pseudo-random start
    const Eigen::Index dim = A.cols();
    Eigen::VectorXcd v(dim);
    std::uint64_t state = 0x8096A5B7C3D1E2F4ULL;
    for (Eigen::Index i = 0; i < dim; ++i) {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        v(i) = std::complex<double>(1.0 + static_cast<double>(state % 1024) / 1024.0,
                                    static_cast<double>((state >> 10) % 1024) / 1024.0);
    }
    v.normalize();
    double sigma = 0.0;
    int stable = 0;
    for (int iter = 0; iter < 5000; ++iter) {
        const Eigen::VectorXcd w = A * v;
        const double estimate = w.norm();
        Eigen::VectorXcd next = A.adjoint() * w;
        const double nn = next.norm();
        if (nn == 0.0) return 0.0;
        v = next / nn;
        if (std::abs(estimate - sigma) <= 1e-12 * std::max(1.0, estimate)) {
            if (++stable >= 3) return estimate;
        } else {
            stable = 0;
        }
        sigma = estimate;
    }
    throw numeric_failure("operator_norm: power iteration did not converge");
}

double exact_commutator_norm(const DenseOperator& A, const DenseOperator& B,
                             const DenseOperator& H, double t) {
    if (A.rows() > (Eigen::Index(1) << 10))
        throw domain_error("exact_commutator_norm: dimension exceeds the norm-scan budget");
    const DenseOperator tauA = heisenberg(A, H, t);
    return operator_norm(tauA * B - B * tauA);
}

} // namespace fibcone::oracle
