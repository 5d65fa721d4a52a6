#include "weakval/qstate.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace weakval {

Ket::Ket(Vector amps) : amplitudes(std::move(amps)) {
    if (amplitudes.size() < 1) {
        throw std::invalid_argument("Ket: dimension must be >= 1");
    }
}

Ket Ket::normalized() const {
    const double n = amplitudes.norm();
    if (n < 1e-15) {
        throw std::invalid_argument("Ket::normalized: zero vector");
    }
    return Ket(amplitudes / n);
}

Complex inner(const Ket& a, const Ket& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("inner: dimension mismatch");
    }
    return a.amplitudes.dot(b.amplitudes);  // Eigen's dot conjugates the left factor
}

Ket basis_ket(int dim, int index) {
    if (dim < 1 || index < 0 || index >= dim) {
        throw std::invalid_argument("basis_ket: index out of range");
    }
    Vector v = Vector::Zero(dim);
    v(index) = 1.0;
    return Ket(std::move(v));
}

Operator::Operator(Matrix m, bool hermitian_flag) : matrix(std::move(m)), hermitian(hermitian_flag) {
    if (matrix.rows() != matrix.cols() || matrix.rows() < 1) {
        throw std::invalid_argument("Operator: matrix must be square and nonempty");
    }
    if (hermitian) {
        const double dev = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
        if (dev > kHermitianTol) {
            throw std::invalid_argument("Operator: hermitian flag set but matrix is not Hermitian");
        }
    }
}

Operator identity_operator(int dim) {
    return Operator(Matrix::Identity(dim, dim), true);
}

Operator spin_z_operator(double s) {
    const double two_s = 2.0 * s;
    if (s < 0.0 || std::abs(two_s - std::round(two_s)) > 1e-9) {
        throw std::invalid_argument("spin_z_operator: s must be a non-negative half-integer");
    }
    const int dim = static_cast<int>(std::lround(two_s)) + 1;
    Matrix m = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        m(i, i) = s - i;  // descending: s, s-1, ..., -s
    }
    return Operator(std::move(m), true);
}

Operator polarization_operator() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return Operator(std::move(m), true);
}

DensityMatrix::DensityMatrix(Matrix m) : matrix(std::move(m)) {
    if (matrix.rows() != matrix.cols() || matrix.rows() < 1) {
        throw std::invalid_argument("DensityMatrix: matrix must be square and nonempty");
    }
    const double herm_dev = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev > kHermitianTol) {
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kPsdTol) {
        throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    }
    if (std::abs(matrix.trace().real() - 1.0) > kTraceTol || std::abs(matrix.trace().imag()) > kTraceTol) {
        throw std::invalid_argument("DensityMatrix: trace must be 1");
    }
}

DensityMatrix pure_density(const Ket& psi) {
    const Ket n = psi.normalized();
    return DensityMatrix(n.amplitudes * n.amplitudes.adjoint());
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace

Ket tensor(const Ket& a, const Ket& b) {
    Vector out(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i) {
        out.segment(static_cast<Eigen::Index>(i) * b.dim(), b.dim()) = a.amplitudes(i) * b.amplitudes;
    }
    return Ket(std::move(out));
}

Operator tensor(const Operator& a, const Operator& b) {
    return Operator(kron(a.matrix, b.matrix), a.hermitian && b.hermitian);
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix(kron(a.matrix, b.matrix));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims, int keep) {
    long total = 1;
    for (int d : dims) {
        if (d < 1) throw std::invalid_argument("partial_trace: subsystem dims must be >= 1");
        total *= d;
    }
    if (total != rho.dim()) {
        throw std::invalid_argument("partial_trace: subsystem dims do not match state dimension");
    }
    if (keep < 0 || keep >= static_cast<int>(dims.size())) {
        throw std::invalid_argument("partial_trace: keep index out of range");
    }

    const int n = static_cast<int>(dims.size());
    // Strides for the flat index with the first factor most significant.
    std::vector<long> stride(n, 1);
    for (int k = n - 2; k >= 0; --k) {
        stride[k] = stride[k + 1] * dims[k + 1];
    }
    const int dk = dims[keep];
    const long rest = total / dk;

    Matrix out = Matrix::Zero(dk, dk);
    // Enumerate the traced-out multi-index once; add rho entries for each
    // (i, j) pair of the kept subsystem.
    for (long r = 0; r < rest; ++r) {
        long base = 0;
        long rr = r;
        for (int k = n - 1; k >= 0; --k) {
            if (k == keep) continue;
            base += (rr % dims[k]) * stride[k];
            rr /= dims[k];
        }
        for (int i = 0; i < dk; ++i) {
            for (int j = 0; j < dk; ++j) {
                out(i, j) += rho.matrix(base + i * stride[keep], base + j * stride[keep]);
            }
        }
    }
    return DensityMatrix(std::move(out));
}

Complex expectation(const Operator& a, const Ket& psi) {
    if (a.dim() != psi.dim()) {
        throw std::invalid_argument("expectation: dimension mismatch");
    }
    const Ket n = psi.normalized();
    return n.amplitudes.dot(a.matrix * n.amplitudes);
}

double uncertainty(const Operator& a, const Ket& psi) {
    if (!a.hermitian) {
        throw std::invalid_argument("uncertainty: observable must be Hermitian");
    }
    const double mean = expectation(a, psi).real();
    const double second = expectation(Operator(a.matrix * a.matrix, true), psi).real();
    return std::sqrt(std::max(0.0, second - mean * mean));
}

}  // namespace weakval
