#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "smcg/array_model.hpp"
#include "smcg/bounds.hpp"

using namespace smcg;
using C = std::complex<double>;

TEST_CASE("fixed bounds report their constant") {
    CHECK(current_bound<double>(FixedBound<double>{std::sqrt(5.0 * 1.0)}) == doctest::Approx(std::sqrt(5.0)));
    CHECK(current_bound<double>(FixedBound<double>{0.8}) == 0.8);

    BoundPolicy<double> policy = FixedBound<double>{1.3};
    refresh_bound<double>(policy, ComplexVectorXd::Ones(2), ComplexVectorXd::Ones(2), C(5, 0), ComplexVectorXd::Ones(2),
                          1.0);
    CHECK(current_bound(policy) == 1.3);
}

TEST_CASE("PDB recursion arithmetic") {
    ComplexVectorXd w(1);
    w[0] = C(0.25, 0);  // ||w||^2 = 1/16
    ParameterDependentBound<double> b{0.9, 4.0, 1.0};
    b = pdb_update(b, w, 1.0);  // sqrt(4 * 1/16 * 1) = 0.5
    CHECK(b.delta == doctest::Approx(0.95).epsilon(1e-15));

    BoundPolicy<double> policy = b;
    CHECK(current_bound(policy) == b.delta);

    ParameterDependentBound<double> silent{0.9, 21.0, 2.0};
    for (int i = 1; i <= 10; ++i) {
        silent = pdb_update(silent, w, 0.0);
        CHECK(silent.delta == doctest::Approx(2.0 * std::pow(0.9, i)).epsilon(1e-12));
    }
}

TEST_CASE("PDB contracts geometrically to its fixed point") {
    std::mt19937_64 rng(3);
    const auto w = oracle::random_vector(rng, 6);
    const double noise = 0.7;
    const double fixed = std::sqrt(21.0 * w.squaredNorm() * noise);
    ParameterDependentBound<double> b{0.9, 21.0, 10.0};
    const double start_gap = std::abs(b.delta - fixed);
    for (int i = 1; i <= 300; ++i) {
        b = pdb_update(b, w, noise);
        CHECK(std::abs(b.delta - fixed) <= std::pow(0.9, i) * start_gap * (1 + 1e-12) + 1e-14);
        CHECK(b.delta >= 0);
    }
    CHECK(b.delta == doctest::Approx(fixed).epsilon(1e-12));

    const auto start = make_pdb(0.9, 21.0, w, noise);
    CHECK(start.delta == doctest::Approx(fixed).epsilon(1e-15));
    CHECK_THROWS_AS(make_pdb(1.0, 21.0, w, noise), std::invalid_argument);
    CHECK_THROWS_AS(make_pdb(0.9, 1.0, w, noise), std::invalid_argument);
}

TEST_CASE("desired-direction output") {
    const auto a0 = steering_vector(ArrayGeometry{8, 0.5}, 72.0);
    CHECK(std::abs(desired_direction_output(a0, a0) - C(8, 0)) < 1e-12);

    ComplexVectorXd ortho = ComplexVectorXd::Zero(2);
    const auto a2 = steering_vector(ArrayGeometry{2, 0.5}, 90.0);
    ortho[0] = 1;
    ortho[1] = -1;
    CHECK(std::abs(desired_direction_output(a2, ortho)) < 1e-15);

    Scenario sc;
    sc.geometry = {8, 0.5};
    sc.noise_power = 0.5;
    sc.total_snapshots = 1;
    sc.epochs = {{1, {{72, 1e-30, true}}}};
    std::mt19937_64 rng(8);
    double acc = 0;
    const int K = 200000;
    for (int k = 0; k < K; ++k) acc += std::norm(desired_direction_output(a0, generate_snapshot(sc, 1, rng).r));
    CHECK(acc / K == doctest::Approx(8 * 0.5).epsilon(0.01));
}

TEST_CASE("PIDB with epsilon 0 reproduces PDB exactly") {
    std::mt19937_64 rng(13);
    const int m = 5;
    const auto a0 = oracle::random_vector(rng, m);
    auto w = oracle::random_vector(rng, m);
    BoundPolicy<double> pdb = make_pdb(0.93, 7.0, w, 0.4);
    BoundPolicy<double> pidb = make_pidb(0.93, 7.0, 0.0, w, 0.4);
    for (int i = 0; i < 500; ++i) {
        const auto r = oracle::random_vector(rng, m);
        if (i % 7 == 0) w = oracle::random_vector(rng, m);
        const C y = w.dot(r);
        refresh_bound(pdb, a0, r, y, w, 0.4);
        refresh_bound(pidb, a0, r, y, w, 0.4);
        CHECK(current_bound(pdb) == current_bound(pidb));
    }
}

TEST_CASE("PIDB interference estimate is a bounded running average") {
    std::mt19937_64 rng(19);
    const int m = 4;
    const auto a0 = oracle::random_vector(rng, m);
    const auto w = oracle::random_vector(rng, m);
    auto b = make_pidb(0.9, 19.0, 0.01, w, 1.0);
    CHECK(b.nu == 0);

    double lo = 1e300, hi = 0;
    for (int i = 0; i < 400; ++i) {
        const auto r = oracle::random_vector(rng, m);
        const C y = w.dot(r);
        const double e0 = std::norm(a0.dot(r) - y);
        lo = std::min(lo, e0);
        hi = std::max(hi, e0);
        const double nu_prev = b.nu;
        b = pidb_update(b, a0, r, y, w, 1.0);
        CHECK(b.nu >= 0);
        CHECK(b.delta >= 0);
        CHECK(b.nu == doctest::Approx(0.9 * nu_prev + 0.1 * e0).epsilon(1e-14));
        if (i > 0) CHECK(b.nu <= hi);
    }
    CHECK(b.nu >= lo * (1 - 1e-12));

    // y = y0 leaves only decay.
    const auto r = oracle::random_vector(rng, m);
    const double nu_prev = b.nu;
    b = pidb_update(b, a0, r, a0.dot(r), w, 1.0);
    CHECK(b.nu == doctest::Approx(0.9 * nu_prev).epsilon(1e-15));
}

TEST_CASE("PIDB noise estimate with a converged beamformer and no interferers") {
    // y = s0 exactly: e0 = a0^H n + (m - 1) s0, so E|e0|^2 = m noise + (m-1)^2.
    Scenario sc;
    sc.geometry = {6, 0.5};
    sc.noise_power = 1.0;
    sc.total_snapshots = 1;
    sc.epochs = {{1, {{90, 1, true}}}};
    const auto a0 = desired_steering(sc);
    const ComplexVectorXd w = a0 / 6.0;
    auto b = make_pidb(0.999, 19.0, 0.001, w, 1.0);
    std::mt19937_64 rng(21);
    double avg = 0;
    const int K = 60000;
    for (int i = 0; i < K; ++i) {
        const auto snap = generate_snapshot(sc, 1, rng);
        b = pidb_update(b, a0, snap.r, snap.desired_symbol, w, 1.0);
        if (i >= 10000) avg += b.nu;
    }
    avg /= (K - 10000);
    CHECK(avg == doctest::Approx(6.0 * 1.0 + 25.0).epsilon(0.03));

    CHECK_THROWS_AS(make_pidb(0.0, 19.0, 0.001, w, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_pidb(0.98, 19.0, -1.0, w, 1.0), std::invalid_argument);
}
