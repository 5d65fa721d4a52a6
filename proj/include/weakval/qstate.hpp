#pragma once

// Finite-dimensional complex state/operator algebra: kets, observables,
// density matrices, tensor products and partial traces. All values are
// immutable after construction and safe to share between threads.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace weakval {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Numerical tolerances used by the state algebra.
constexpr double kHermitianTol = 1e-12;
constexpr double kPsdTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kNormTol = 1e-12;

/// A pure state |psi> of a finite-dimensional system.
struct Ket {
    Vector amplitudes;

    explicit Ket(Vector amps);

    int dim() const { return static_cast<int>(amplitudes.size()); }
    double norm() const { return amplitudes.norm(); }

    /// Unit-norm copy. Throws on (numerically) zero vectors. Idempotent.
    Ket normalized() const;
};

/// <a|b>
Complex inner(const Ket& a, const Ket& b);

/// Computational basis ket |index> of the given dimension.
Ket basis_ket(int dim, int index);

/// An observable or general linear operator on a finite-dimensional system.
/// When `hermitian` is set, the matrix is checked against its conjugate
/// transpose at construction.
struct Operator {
    Matrix matrix;
    bool hermitian = false;

    Operator(Matrix m, bool hermitian_flag);

    int dim() const { return static_cast<int>(matrix.rows()); }
};

Operator identity_operator(int dim);

/// S_z for spin s: the (2s+1)-dimensional diagonal operator with eigenvalues
/// s, s-1, ..., -s. Basis order is descending eigenvalue, i.e. index 0 is
/// |m=s> and index 2s is |m=-s>. Rejects negative or non-half-integer s.
Operator spin_z_operator(double s);

/// The polarization observable diag(1, -1) in the (|H>, |V>) basis:
/// index 0 is |H> (eigenvalue +1), index 1 is |V> (eigenvalue -1).
Operator polarization_operator();

/// A mixed state. Construction checks hermiticity (1e-12), positivity
/// (eigenvalues >= -1e-10) and unit trace (1e-10).
struct DensityMatrix {
    Matrix matrix;

    explicit DensityMatrix(Matrix m);

    int dim() const { return static_cast<int>(matrix.rows()); }
};

DensityMatrix pure_density(const Ket& psi);

/// Kronecker products. The first factor is the most significant index:
/// tensor(a, b) puts a's basis index i and b's index j at flat index
/// i * dim(b) + j.
Ket tensor(const Ket& a, const Ket& b);
Operator tensor(const Operator& a, const Operator& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Reduced state of subsystem `keep` (0-based) of a composite with the given
/// subsystem dimensions (most significant first, matching tensor()).
/// Throws if the dimensions do not multiply to rho.dim().
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims, int keep);

/// <psi|A|psi> for a normalized |psi>.
Complex expectation(const Operator& a, const Ket& psi);

/// sqrt(<A^2> - <A>^2) for a Hermitian A.
double uncertainty(const Operator& a, const Ket& psi);

}  // namespace weakval
