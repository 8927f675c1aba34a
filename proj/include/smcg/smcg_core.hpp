#ifndef SMCG_SMCG_CORE_HPP
#define SMCG_SMCG_CORE_HPP

// Set-membership conjugate-gradient LCMV beamformer.
//
// The auxiliary vector v tracks Rhat^{-1} a0 with one CG iteration per
// update, and the weights are w = gamma v / (a0^H v), so w^H a0 = gamma holds
// identically. An update runs only when the output violates |y|^2 <= delta^2;
// the forgetting factor lambda1 is chosen in closed form so the updated
// auxiliary vector meets that bound with equality.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "smcg/types.hpp"

namespace smcg {

template <typename Real>
struct SmCgState {
    ComplexVector<Real> v;   // auxiliary vector, approximates Rhat^{-1} a0
    ComplexVector<Real> g;   // negative gradient a0 - Rhat v
    ComplexVector<Real> p;   // search direction for the next update
    HermitianMatrix<Real> R_hat;
    ComplexVector<Real> w;
    ComplexVector<Real> a0;
    Real gamma = 1;
    Real eta = Real(0.5);
    Interval<Real> lambda1_clamp{Real(0.1), Real(0.999)};
    long update_count = 0;
    long step_count = 0;
    // Set when the last weight recomputation hit a0^H v == 0 and kept the old w.
    bool degenerate_weights = false;

    int size() const { return static_cast<int>(a0.size()); }
};

template <typename Real>
struct StepResult {
    Complex<Real> y;
    Real delta_used = 0;
    bool updated = false;
    std::optional<Real> lambda1;
    std::optional<Complex<Real>> alpha;
    std::optional<Complex<Real>> beta;
    ComplexVector<Real> w_after;
};

/// Intermediate quantities of the closed-form forgetting factor. tau1..tau4
/// follow the usual naming; tau1 and tau2 both carry the bound delta so that
///   P * (delta a0^H v(l)) = tau1 - l tau2,   P * (r^H v(l)) = tau3 - l tau4
/// with P = p^H Rhat(i-1) p, i.e. the output bound is |tau3 - l tau4| = |tau1 - l tau2|.
template <typename Real>
struct ForgettingFactorTerms {
    Complex<Real> tau1, tau2, tau3, tau4;
    Complex<Real> lambda11, lambda12, lambda13, lambda14;
    Real value = 0;         // unclamped Re{(l11 - l12) / (l13 - l14)}
    bool degenerate = false;
    bool bound_root = false;  // value solves the output bound exactly
};

template <typename Real>
SmCgState<Real> initialize(const ComplexVector<Real>& a0, Real gamma = 1, Real eta = Real(0.5),
                           Interval<Real> clamp = {Real(0.1), Real(0.999)}, Real r_hat_loading = Real(1e-2)) {
    const Real a_norm2 = a0.squaredNorm();
    if (a0.size() == 0 || !(a_norm2 > 0)) throw std::invalid_argument("initialize: steering vector must be nonzero");
    if (!(clamp.lo > 0 && clamp.lo <= clamp.hi && clamp.hi <= 1))
        throw std::invalid_argument("initialize: lambda1 clamp must lie in (0, 1]");
    if (!(r_hat_loading > 0)) throw std::invalid_argument("initialize: covariance loading must be > 0");

    const auto m = a0.size();
    SmCgState<Real> s;
    s.a0 = a0;
    s.v = ComplexVector<Real>::Zero(m);
    s.g = a0;
    s.p = a0;
    s.R_hat = HermitianMatrix<Real>::Identity(m, m) * Complex<Real>(r_hat_loading, 0);
    s.w = (gamma / a_norm2) * a0;
    s.gamma = gamma;
    s.eta = eta;
    s.lambda1_clamp = clamp;
    return s;
}

/// y = w^H r with the current (pre-update) weights.
template <typename Real>
Complex<Real> output(const SmCgState<Real>& s, const ComplexVector<Real>& r) {
    require_same_length(s.w, r, "output");
    return s.w.dot(r);
}

namespace detail {

// Real roots of a l^2 + b l + c = 0, numerically stable form.
template <typename Real>
int real_roots(Real a, Real b, Real c, Real roots[2]) {
    const Real scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (scale == 0) return 0;
    if (std::abs(a) <= std::numeric_limits<Real>::epsilon() * scale) {
        if (b == 0) return 0;
        roots[0] = -c / b;
        return 1;
    }
    const Real disc = b * b - 4 * a * c;
    if (disc < 0) return 0;
    const Real q = Real(-0.5) * (b + std::copysign(std::sqrt(disc), b));
    roots[0] = q / a;
    if (q == 0) return 1;
    roots[1] = c / q;
    return 2;
}

}  // namespace detail

/// Unclamped closed-form forgetting factor for the current state.
///
/// The sign factors of the ratio are the conjugate phases of tau1 - l tau2 and
/// tau3 - l tau4, evaluated at the largest real root in (0, 1] of the output
/// bound (or the real root nearest that interval). With that choice the ratio
/// reproduces the root exactly. When no real root exists the phases are
/// taken at l = 1.
template <typename Real>
ForgettingFactorTerms<Real> forgetting_factor_terms(const SmCgState<Real>& s, const ComplexVector<Real>& r,
                                                    Real delta) {
    require_same_length(s.a0, r, "forgetting_factor_terms");
    using C = Complex<Real>;
    const Real quad = std::real(s.p.dot(s.R_hat * s.p));
    const C g_p = s.g.dot(s.p);  // g^H p
    const C v_r = s.v.dot(r);
    const C v_a = s.v.dot(s.a0);
    const C r_p = r.dot(s.p);
    const C p_a = s.p.dot(s.a0);
    const C p_r = s.p.dot(r);
    const Real one_minus_eta = 1 - s.eta;

    ForgettingFactorTerms<Real> t;
    t.tau1 = delta * (v_a * quad + one_minus_eta * g_p * p_a);
    t.tau2 = delta * (v_r * r_p * p_a);
    t.tau3 = v_r * quad + one_minus_eta * g_p * p_r;
    t.tau4 = v_r * r_p * p_r;

    const Real qa = std::norm(t.tau4) - std::norm(t.tau2);
    const Real qb = -2 * std::real(t.tau3 * std::conj(t.tau4) - t.tau1 * std::conj(t.tau2));
    const Real qc = std::norm(t.tau3) - std::norm(t.tau1);
    Real roots[2] = {0, 0};
    const int n = detail::real_roots(qa, qb, qc, roots);

    Real anchor = 1;
    bool have_anchor = false;
    Real best_gap = std::numeric_limits<Real>::infinity();
    for (int k = 0; k < n; ++k) {
        const Real x = roots[k];
        if (!std::isfinite(x)) continue;
        const Real gap = x > 1 ? x - 1 : (x <= 0 ? -x : Real(0));
        if (gap < best_gap || (gap == 0 && best_gap == 0 && x > anchor)) {
            best_gap = gap;
            anchor = x;
            have_anchor = true;
        }
    }
    t.bound_root = have_anchor;

    const C s1 = std::conj(complex_sign(t.tau1 - anchor * t.tau2));
    const C s2 = std::conj(complex_sign(t.tau3 - anchor * t.tau4));
    t.lambda11 = t.tau1 * s1;
    t.lambda12 = t.tau3 * s2;
    t.lambda13 = t.tau2 * s1;
    t.lambda14 = t.tau4 * s2;

    const C den = t.lambda13 - t.lambda14;
    const Real den_scale = std::abs(t.lambda13) + std::abs(t.lambda14);
    if (std::abs(den) <= Real(1e-12) * den_scale || den_scale == 0 || !std::isfinite(den_scale)) {
        t.degenerate = true;
        t.value = std::numeric_limits<Real>::quiet_NaN();
        return t;
    }
    t.value = std::real((t.lambda11 - t.lambda12) / den);
    if (!std::isfinite(t.value)) t.degenerate = true;
    return t;
}

/// Forgetting factor clamped to the state's interval; a degenerate
/// denominator falls back to the upper clamp.
template <typename Real>
Real compute_lambda1(const SmCgState<Real>& s, const ComplexVector<Real>& r, Real delta) {
    const auto t = forgetting_factor_terms(s, r, delta);
    if (t.degenerate) return s.lambda1_clamp.hi;
    return s.lambda1_clamp.clamp(t.value);
}

/// Inexact line-search step using the already-updated covariance
/// Rhat(i) = Rhat(i-1) + lambda1 r r^H in the denominator.
template <typename Real>
Complex<Real> compute_alpha(const SmCgState<Real>& s, const ComplexVector<Real>& r, Real lambda1) {
    require_same_length(s.a0, r, "compute_alpha");
    const Complex<Real> p_r = s.p.dot(r);
    const Real den = std::real(s.p.dot(s.R_hat * s.p)) + lambda1 * std::norm(p_r);
    if (!(den > 0) || !std::isfinite(den))
        throw std::domain_error("compute_alpha: p^H Rhat p is not positive; covariance lost definiteness");
    const Complex<Real> num = (1 - s.eta) * s.p.dot(s.g) - lambda1 * p_r * r.dot(s.v);
    return num / den;
}

/// One snapshot of the data-selective recursion. State is mutated only
/// after every intermediate quantity is computed and found finite.
template <typename Real>
StepResult<Real> step(SmCgState<Real>& s, const ComplexVector<Real>& r, Real delta) {
    require_same_length(s.a0, r, "step");
    if (!(delta >= 0)) throw std::invalid_argument("step: bound must be nonnegative");

    StepResult<Real> res;
    res.y = output(s, r);
    res.delta_used = delta;

    if (!(std::norm(res.y) > delta * delta)) {
        ++s.step_count;
        res.w_after = s.w;
        return res;
    }

    const Real lambda1 = compute_lambda1(s, r, delta);
    HermitianMatrix<Real> R_next = s.R_hat;
    R_next.noalias() += lambda1 * r * r.adjoint();

    const Complex<Real> alpha = compute_alpha(s, r, lambda1);
    const Complex<Real> r_v = r.dot(s.v);
    const ComplexVector<Real> Rp = R_next * s.p;
    const Real den = std::real(s.p.dot(Rp));
    ComplexVector<Real> v_next = s.v + alpha * s.p;
    ComplexVector<Real> g_next = s.g - alpha * Rp - (lambda1 * r_v) * r;
    const Complex<Real> beta = -Rp.dot(g_next) / den;
    ComplexVector<Real> p_next = g_next + beta * s.p;

    const Complex<Real> a_v = s.a0.dot(v_next);
    const bool degenerate = std::abs(a_v) == 0;
    ComplexVector<Real> w_next = degenerate ? s.w : ComplexVector<Real>((s.gamma / a_v) * v_next);

    if (!std::isfinite(std::abs(alpha)) || !std::isfinite(std::abs(beta)) || !v_next.allFinite() ||
        !g_next.allFinite() || !p_next.allFinite() || !w_next.allFinite() || !R_next.allFinite())
        throw std::runtime_error("step: non-finite value in update");

    s.R_hat = std::move(R_next);
    s.v = std::move(v_next);
    s.g = std::move(g_next);
    s.p = std::move(p_next);
    s.w = std::move(w_next);
    s.degenerate_weights = degenerate;
    ++s.update_count;
    ++s.step_count;

    res.updated = true;
    res.lambda1 = lambda1;
    res.alpha = alpha;
    res.beta = beta;
    res.w_after = s.w;
    return res;
}

}  // namespace smcg

#endif  // SMCG_SMCG_CORE_HPP
