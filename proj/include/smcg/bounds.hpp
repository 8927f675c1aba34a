#ifndef SMCG_BOUNDS_HPP
#define SMCG_BOUNDS_HPP

// Output-magnitude bounds for the set-membership gate: a constant, a
// parameter-dependent recursion (PDB) driven by the weight norm, and a
// parameter-and-interference-dependent recursion (PIDB) that adds a running
// estimate of the interference-plus-noise power seen through a(theta_0).

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include "smcg/types.hpp"

namespace smcg {

template <typename Real>
struct FixedBound {
    Real delta = 1;
};

template <typename Real>
struct ParameterDependentBound {
    Real rho = Real(0.9);        // forgetting factor, (0, 1)
    Real varsigma = Real(21);    // tuning coefficient, > 1
    Real delta = 0;
};

template <typename Real>
struct InterferenceDependentBound {
    Real varrho = Real(0.98);    // forgetting factor, (0, 1)
    Real varsigma = Real(19);    // tuning coefficient, > 1
    Real epsilon = Real(0.001);  // weight of the interference term, >= 0
    Real delta = 0;
    Real nu = 0;                 // interference-plus-noise power estimate
};

template <typename Real>
using BoundPolicy = std::variant<FixedBound<Real>, ParameterDependentBound<Real>, InterferenceDependentBound<Real>>;

namespace detail {

template <typename Real>
Real weight_noise_term(Real varsigma, const ComplexVector<Real>& w, Real noise_power) {
    return std::sqrt(varsigma * w.squaredNorm() * noise_power);
}

template <typename Real>
void check_forgetting(Real f, const char* name) {
    if (!(f > 0 && f < 1)) throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
}

}  // namespace detail

/// PDB starting at its fixed point for the initial weights.
template <typename Real>
ParameterDependentBound<Real> make_pdb(Real rho, Real varsigma, const ComplexVector<Real>& w0, Real noise_power) {
    detail::check_forgetting(rho, "pdb rho");
    if (!(varsigma > 1)) throw std::invalid_argument("pdb varsigma must be > 1");
    return {rho, varsigma, detail::weight_noise_term(varsigma, w0, noise_power)};
}

template <typename Real>
InterferenceDependentBound<Real> make_pidb(Real varrho, Real varsigma, Real epsilon, const ComplexVector<Real>& w0,
                                           Real noise_power) {
    detail::check_forgetting(varrho, "pidb varrho");
    if (!(varsigma > 1)) throw std::invalid_argument("pidb varsigma must be > 1");
    if (!(epsilon >= 0)) throw std::invalid_argument("pidb epsilon must be >= 0");
    return {varrho, varsigma, epsilon, detail::weight_noise_term(varsigma, w0, noise_power), Real(0)};
}

template <typename Real>
Real current_bound(const BoundPolicy<Real>& policy) {
    return std::visit([](const auto& b) { return b.delta; }, policy);
}

template <typename Real>
ParameterDependentBound<Real> pdb_update(ParameterDependentBound<Real> b, const ComplexVector<Real>& w,
                                         Real noise_power) {
    b.delta = b.rho * b.delta + (1 - b.rho) * detail::weight_noise_term(b.varsigma, w, noise_power);
    return b;
}

/// y0 = a0^H r: desired symbol plus interference leakage and noise seen by
/// the unadapted matched filter.
template <typename Real>
Complex<Real> desired_direction_output(const ComplexVector<Real>& a0, const ComplexVector<Real>& r) {
    require_same_length(a0, r, "desired_direction_output");
    return a0.dot(r);
}

template <typename Real>
InterferenceDependentBound<Real> pidb_update(InterferenceDependentBound<Real> b, const ComplexVector<Real>& a0,
                                             const ComplexVector<Real>& r, Complex<Real> y,
                                             const ComplexVector<Real>& w, Real noise_power) {
    const Complex<Real> e0 = desired_direction_output(a0, r) - y;
    b.nu = b.varrho * b.nu + (1 - b.varrho) * std::norm(e0);
    b.delta = b.varrho * b.delta +
              (1 - b.varrho) * (std::sqrt(b.epsilon * b.nu) + detail::weight_noise_term(b.varsigma, w, noise_power));
    return b;
}

/// Advances whichever recursion the policy holds by one snapshot. `y` is the
/// pre-update output for r and `w` the weights that produced it.
template <typename Real>
void refresh_bound(BoundPolicy<Real>& policy, const ComplexVector<Real>& a0, const ComplexVector<Real>& r,
                   Complex<Real> y, const ComplexVector<Real>& w, Real noise_power) {
    if (auto* pdb = std::get_if<ParameterDependentBound<Real>>(&policy))
        *pdb = pdb_update(*pdb, w, noise_power);
    else if (auto* pidb = std::get_if<InterferenceDependentBound<Real>>(&policy))
        *pidb = pidb_update(*pidb, a0, r, y, w, noise_power);
}

}  // namespace smcg

#endif  // SMCG_BOUNDS_HPP
