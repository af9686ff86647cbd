// Exact dense many-body reference at small n: the XY chain Hamiltonian from
// Kronecker products of Pauli matrices, Jordan-Wigner fermion operators,
// Heisenberg evolution by dense Hermitian eigendecomposition, and exact
// commutator operator norms.  Everything here is the independent check the
// one-body reduction is validated against.
#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fibcone/potential.hpp"

namespace fibcone::oracle {

using DenseOperator = Eigen::MatrixXcd;

DenseOperator pauli_x();
DenseOperator pauli_y();
DenseOperator pauli_z();

// op acting on site j (1-based) of an n-site chain.
DenseOperator site_operator(const DenseOperator& op, int j, int n);

// lowering operator a_j = (sigma^x_j - i sigma^y_j)/2
DenseOperator lowering(int j, int n);

// H = -sum_j (sx_j sx_{j+1} + sy_j sy_{j+1}) + sum_j V_j sz_j;  n <= 12.
DenseOperator build_xy(const PotentialSpec& spec, int n);

struct JordanWignerFamily {
    int n = 0;
    std::vector<DenseOperator> c;        // c_j = sz_1 ... sz_{j-1} a_j
    std::vector<DenseOperator> c_dagger;
};

JordanWignerFamily jordan_wigner(int n);

// max over pairs of the Frobenius defects of {c_j, c_k*} = delta_jk and
// {c_j, c_k} = 0.
double car_defect(const JordanWignerFamily& jw);

// max over sites of || sigma^z_l - (2 c_l* c_l - 1) ||_F
double sigma_z_identity_defect(const JordanWignerFamily& jw);

// Heisenberg dynamics tau_t(A) = e^{itH} A e^{-itH} with the eigendecomposition
// of H computed once and shared across times and observables.
class Evolution {
public:
    explicit Evolution(const DenseOperator& H);
    DenseOperator conjugate(const DenseOperator& A, double t) const;

private:
    Eigen::VectorXd energies_;
    DenseOperator basis_;
};

DenseOperator heisenberg(const DenseOperator& A, const DenseOperator& H, double t);

struct FreeFermionDefect {
    double defect = 0.0;           // best gauge, Frobenius norm of the difference
    std::string gauge;             // "identity" or "alternating"
    double magnitude_defect = 0.0; // gauge-independent |coefficient| comparison
};

// Compares tau_t(c_j) against sum_k (g F(t) g)_{jk} c_k for the two candidate
// diagonal gauges and records which one matches.
FreeFermionDefect verify_free_fermion(const PotentialSpec& spec, int n, int j, double t);

// Spectral norm of [tau_t(A), B] by power iteration on the Gram form.
double exact_commutator_norm(const DenseOperator& A, const DenseOperator& B,
                             const DenseOperator& H, double t);

double operator_norm(const DenseOperator& A);

} // namespace fibcone::oracle
