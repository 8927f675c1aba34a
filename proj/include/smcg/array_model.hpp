#ifndef SMCG_ARRAY_MODEL_HPP
#define SMCG_ARRAY_MODEL_HPP

// Uniform linear array signal model: steering vectors, BPSK sources in
// circular white Gaussian noise, and piecewise-stationary source schedules.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "smcg/types.hpp"

namespace smcg {

struct ArrayGeometry {
    int num_sensors = 16;
    double spacing_over_wavelength = 0.5;
};

struct Source {
    double doa_degrees = 90.0;
    double power = 1.0;
    bool is_desired = false;
};

/// Sources active from `start` (1-based snapshot index) until the next epoch.
struct Epoch {
    long start = 1;
    std::vector<Source> sources;
};

struct Scenario {
    ArrayGeometry geometry;
    std::vector<Epoch> epochs;
    double noise_power = 1.0;
    long total_snapshots = 1;
    double gamma = 1.0;
};

template <typename Real>
struct Snapshot {
    ComplexVector<Real> r;
    Complex<Real> desired_symbol;
    long index = 0;
};

inline const Source& desired_source(const std::vector<Source>& sources) {
    for (const auto& s : sources)
        if (s.is_desired) return s;
    throw std::invalid_argument("source list has no desired source");
}

/// Throws std::invalid_argument naming the offending field.
inline void validate(const Scenario& sc) {
    const auto fail = [](const std::string& msg) { throw std::invalid_argument("scenario: " + msg); };
    if (sc.geometry.num_sensors < 1) fail("num_sensors must be >= 1");
    if (!(sc.geometry.spacing_over_wavelength > 0)) fail("spacing_over_wavelength must be > 0");
    if (!(sc.noise_power >= 0) || !std::isfinite(sc.noise_power)) fail("noise_power must be >= 0");
    if (sc.total_snapshots < 1) fail("total_snapshots must be >= 1");
    if (sc.epochs.empty()) fail("at least one epoch required");
    if (sc.epochs.front().start != 1) fail("first epoch must start at snapshot 1");

    double desired_doa = 0;
    for (std::size_t e = 0; e < sc.epochs.size(); ++e) {
        const auto& ep = sc.epochs[e];
        if (e > 0 && ep.start <= sc.epochs[e - 1].start) fail("epoch starts must be strictly increasing");
        if (ep.sources.size() > static_cast<std::size_t>(sc.geometry.num_sensors))
            fail("epoch " + std::to_string(e) + " has more sources than sensors");
        int desired = 0;
        for (const auto& s : ep.sources) {
            if (!(s.power > 0)) fail("source power must be > 0");
            if (s.doa_degrees < 0 || s.doa_degrees > 180) fail("source doa must lie in [0, 180] degrees");
            if (s.is_desired) {
                ++desired;
                if (e == 0) desired_doa = s.doa_degrees;
                else if (s.doa_degrees != desired_doa) fail("desired doa must be identical in every epoch");
            }
        }
        if (desired != 1) fail("epoch " + std::to_string(e) + " must contain exactly one desired source");
    }
}

template <typename Real = double>
ComplexVector<Real> steering_vector(const ArrayGeometry& geometry, double theta_degrees) {
    if (!(theta_degrees >= 0.0 && theta_degrees <= 180.0))
        throw std::invalid_argument("steering_vector: theta outside [0, 180] degrees");
    if (geometry.num_sensors < 1) throw std::invalid_argument("steering_vector: num_sensors must be >= 1");
    const Real phase = Real(-2) * std::numbers::pi_v<Real> * Real(geometry.spacing_over_wavelength) *
                       Real(std::cos(theta_degrees * std::numbers::pi / 180.0));
    ComplexVector<Real> a(geometry.num_sensors);
    for (int k = 0; k < geometry.num_sensors; ++k) a[k] = std::polar(Real(1), phase * Real(k));
    return a;
}

inline const std::vector<Source>& active_sources(const Scenario& sc, long i) {
    if (i < 1 || i > sc.total_snapshots) throw std::out_of_range("snapshot index out of range");
    const Epoch* current = &sc.epochs.front();
    for (const auto& ep : sc.epochs) {
        if (ep.start > i) break;
        current = &ep;
    }
    return current->sources;
}

template <typename Real = double>
ComplexVector<Real> desired_steering(const Scenario& sc) {
    return steering_vector<Real>(sc.geometry, desired_source(sc.epochs.front().sources).doa_degrees);
}

/// power_0 a(theta_0) a(theta_0)^H for the epoch containing i.
template <typename Real = double>
HermitianMatrix<Real> desired_covariance(const Scenario& sc, long i) {
    const Source& s = desired_source(active_sources(sc, i));
    const ComplexVector<Real> a = steering_vector<Real>(sc.geometry, s.doa_degrees);
    return Real(s.power) * a * a.adjoint();
}

/// Interference-plus-noise covariance for the epoch containing i.
template <typename Real = double>
HermitianMatrix<Real> interference_covariance(const Scenario& sc, long i) {
    const int m = sc.geometry.num_sensors;
    HermitianMatrix<Real> R = HermitianMatrix<Real>::Identity(m, m) * Complex<Real>(Real(sc.noise_power), 0);
    for (const auto& s : active_sources(sc, i)) {
        if (s.is_desired) continue;
        const ComplexVector<Real> a = steering_vector<Real>(sc.geometry, s.doa_degrees);
        R.noalias() += Real(s.power) * a * a.adjoint();
    }
    return R;
}

template <typename Real = double>
HermitianMatrix<Real> received_covariance(const Scenario& sc, long i) {
    return desired_covariance<Real>(sc, i) + interference_covariance<Real>(sc, i);
}

/// Draws one snapshot r = sum_k sqrt(P_k) s_k a(theta_k) + n. Symbols are
/// equiprobable +-1; noise is circular with per-element variance noise_power.
/// Draw order is fixed (symbols in source order, then noise re/im per
/// element), so a given stream state always yields the same snapshot.
template <typename Real = double, typename Rng>
Snapshot<Real> generate_snapshot(const Scenario& sc, long i, Rng& rng) {
    const auto& sources = active_sources(sc, i);
    const int m = sc.geometry.num_sensors;
    Snapshot<Real> snap{ComplexVector<Real>::Zero(m), Complex<Real>(0, 0), i};

    for (const auto& s : sources) {
        const Real symbol = (rng() >> 63) ? Real(1) : Real(-1);
        snap.r += (std::sqrt(Real(s.power)) * symbol) * steering_vector<Real>(sc.geometry, s.doa_degrees);
        if (s.is_desired) snap.desired_symbol = Complex<Real>(symbol, 0);
    }

    std::normal_distribution<Real> gauss(Real(0), Real(1));
    const Real scale = std::sqrt(Real(sc.noise_power) / Real(2));
    for (int k = 0; k < m; ++k) {
        const Real re = gauss(rng);
        const Real im = gauss(rng);
        snap.r[k] += scale * Complex<Real>(re, im);
    }
    return snap;
}

}  // namespace smcg

#endif  // SMCG_ARRAY_MODEL_HPP
