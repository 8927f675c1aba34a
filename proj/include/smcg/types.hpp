#ifndef SMCG_TYPES_HPP
#define SMCG_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace smcg {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

// Stored densely; callers keep it Hermitian.
template <typename Real>
using HermitianMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using ComplexVectorXd = ComplexVector<double>;
using HermitianMatrixXd = HermitianMatrix<double>;

template <typename Real>
struct Interval {
    Real lo;
    Real hi;

    bool contains(Real x) const { return x >= lo && x <= hi; }
    Real clamp(Real x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

/// Complex signum: z/|z|, with sign(0) = 1.
template <typename Real>
Complex<Real> complex_sign(const Complex<Real>& z) {
    const Real mag = std::abs(z);
    if (mag == Real(0)) return Complex<Real>(1, 0);
    return z / mag;
}

template <typename A, typename B>
void require_same_length(const A& a, const B& b, const char* what) {
    if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

}  // namespace smcg

#endif  // SMCG_TYPES_HPP
