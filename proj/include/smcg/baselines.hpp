#ifndef SMCG_BASELINES_HPP
#define SMCG_BASELINES_HPP

// Reference LCMV beamformers: the closed-form MVDR solution and three
// full-update adaptive recursions (Frost stochastic gradient, constrained
// RLS, constrained CG). Every recursion keeps w^H a0 = gamma after each step.

#include <cmath>
#include <stdexcept>
#include <variant>

#include <Eigen/Cholesky>

#include "smcg/smcg_core.hpp"
#include "smcg/types.hpp"

namespace smcg {

/// w = gamma R^{-1} a0 / (a0^H R^{-1} a0). Throws if R is not positive definite.
template <typename Real>
ComplexVector<Real> mvdr_weights(const HermitianMatrix<Real>& R, const ComplexVector<Real>& a0, Real gamma = 1) {
    if (R.rows() != R.cols() || R.rows() != a0.size()) throw std::invalid_argument("mvdr_weights: shape mismatch");
    const Eigen::LLT<HermitianMatrix<Real>> llt(R);
    if (llt.info() != Eigen::Success) throw std::domain_error("mvdr_weights: covariance is not positive definite");
    const ComplexVector<Real> x = llt.solve(a0);
    const Complex<Real> denom = a0.dot(x);
    if (!(std::abs(denom) > 0) || !x.allFinite()) throw std::domain_error("mvdr_weights: singular covariance");
    return (gamma / denom) * x;
}

namespace detail {

// Restores a0^H w = gamma by removing the component of w along a0.
template <typename Real>
void project_onto_constraint(ComplexVector<Real>& w, const ComplexVector<Real>& a0, Real gamma) {
    const Complex<Real> excess = a0.dot(w) - gamma;
    w -= (excess / a0.squaredNorm()) * a0;
}

}  // namespace detail

template <typename Real>
struct FrostSgState {
    ComplexVector<Real> w;
    ComplexVector<Real> a0;
    Real gamma = 1;
    Real mu = Real(1e-3);
    // Divide mu by r^H r each step (normalized gradient).
    bool normalized = false;
};

template <typename Real>
FrostSgState<Real> make_frost_sg(const ComplexVector<Real>& a0, Real gamma, Real mu, bool normalized = false) {
    if (!(mu >= 0)) throw std::invalid_argument("frost_sg: step size must be >= 0");
    return {(gamma / a0.squaredNorm()) * a0, a0, gamma, mu, normalized};
}

/// w <- P(w - mu y* r) + gamma a0/|a0|^2. Returns the pre-update output.
template <typename Real>
Complex<Real> frost_sg_step(FrostSgState<Real>& s, const ComplexVector<Real>& r) {
    require_same_length(s.w, r, "frost_sg_step");
    const Complex<Real> y = s.w.dot(r);
    Real mu = s.mu;
    if (s.normalized) {
        const Real energy = r.squaredNorm();
        mu = energy > 0 ? mu / energy : Real(0);
    }
    ComplexVector<Real> w = s.w - (mu * std::conj(y)) * r;
    detail::project_onto_constraint(w, s.a0, s.gamma);
    if (!w.allFinite()) throw std::runtime_error("frost_sg_step: non-finite weights");
    s.w = std::move(w);
    return y;
}

template <typename Real>
struct ConstrainedRlsState {
    HermitianMatrix<Real> P;  // inverse covariance estimate
    ComplexVector<Real> w;
    ComplexVector<Real> a0;
    Real gamma = 1;
    Real forgetting = Real(0.998);
};

/// P(0) = I / loading, i.e. the covariance estimate starts at loading * I.
template <typename Real>
ConstrainedRlsState<Real> make_constrained_rls(const ComplexVector<Real>& a0, Real gamma, Real forgetting = Real(0.998),
                                               Real loading = Real(1e-2)) {
    if (!(forgetting > 0 && forgetting <= 1)) throw std::invalid_argument("constrained_rls: forgetting must lie in (0, 1]");
    if (!(loading > 0)) throw std::invalid_argument("constrained_rls: loading must be > 0");
    const auto m = a0.size();
    return {HermitianMatrix<Real>::Identity(m, m) * Complex<Real>(1 / loading, 0), (gamma / a0.squaredNorm()) * a0, a0,
            gamma, forgetting};
}

template <typename Real>
Complex<Real> constrained_rls_step(ConstrainedRlsState<Real>& s, const ComplexVector<Real>& r) {
    require_same_length(s.w, r, "constrained_rls_step");
    const Complex<Real> y = s.w.dot(r);
    const ComplexVector<Real> Pr = s.P * r;
    const Real denom = s.forgetting + std::real(r.dot(Pr));
    HermitianMatrix<Real> P = (s.P - (Pr / denom) * Pr.adjoint()) / s.forgetting;
    P = Real(0.5) * (P + P.adjoint()).eval();
    const ComplexVector<Real> Pa = P * s.a0;
    const Complex<Real> aPa = s.a0.dot(Pa);
    if (!(denom > 0) || !P.allFinite() || !(std::abs(aPa) > 0) || !std::isfinite(std::abs(aPa)))
        throw std::runtime_error("constrained_rls_step: non-finite inverse covariance update");
    s.P = std::move(P);
    s.w = (s.gamma / aPa) * Pa;
    return y;
}

/// Constrained CG: the SM-CG recursion with the gate held open (bound 0)
/// and lambda1 pinned to a constant forgetting factor.
template <typename Real>
struct ConstrainedCgState {
    SmCgState<Real> core;
};

template <typename Real>
ConstrainedCgState<Real> make_constrained_cg(const ComplexVector<Real>& a0, Real gamma, Real eta = Real(0.5),
                                             Real forgetting = Real(0.998), Real loading = Real(1e-2)) {
    return {initialize<Real>(a0, gamma, eta, Interval<Real>{forgetting, forgetting}, loading)};
}

template <typename Real>
Complex<Real> constrained_cg_step(ConstrainedCgState<Real>& s, const ComplexVector<Real>& r) {
    return step(s.core, r, Real(0)).y;
}

template <typename Real>
using BaselineState = std::variant<FrostSgState<Real>, ConstrainedRlsState<Real>, ConstrainedCgState<Real>>;

template <typename Real>
Complex<Real> baseline_step(BaselineState<Real>& state, const ComplexVector<Real>& r) {
    return std::visit(
        [&r](auto& s) -> Complex<Real> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FrostSgState<Real>>) return frost_sg_step(s, r);
            else if constexpr (std::is_same_v<T, ConstrainedRlsState<Real>>) return constrained_rls_step(s, r);
            else return constrained_cg_step(s, r);
        },
        state);
}

template <typename Real>
const ComplexVector<Real>& baseline_weights(const BaselineState<Real>& state) {
    return std::visit(
        [](const auto& s) -> const ComplexVector<Real>& {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstrainedCgState<Real>>) return s.core.w;
            else return s.w;
        },
        state);
}

}  // namespace smcg

#endif  // SMCG_BASELINES_HPP
