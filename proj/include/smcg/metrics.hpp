#ifndef SMCG_METRICS_HPP
#define SMCG_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smcg/array_model.hpp"
#include "smcg/types.hpp"

namespace smcg {

inline constexpr double kSinrFloorDb = -200.0;

/// 10 log10(w^H Rs w / w^H Rin w), floored at kSinrFloorDb.
template <typename Real>
double output_sinr(const ComplexVector<Real>& w, const HermitianMatrix<Real>& desired,
                   const HermitianMatrix<Real>& interference) {
    const double signal = std::real(w.dot(desired * w));
    const double rest = std::real(w.dot(interference * w));
    if (!(signal > 0) || !(rest > 0)) return kSinrFloorDb;
    return std::max(kSinrFloorDb, 10.0 * std::log10(signal / rest));
}

/// SINR against the analytic covariances of the epoch containing i.
template <typename Real>
double output_sinr(const ComplexVector<Real>& w, const Scenario& sc, long i) {
    if (w.squaredNorm() == 0) throw std::invalid_argument("output_sinr: zero weight vector");
    return output_sinr<Real>(w, desired_covariance<Real>(sc, i), interference_covariance<Real>(sc, i));
}

struct TraceRecord {
    long snapshot = 0;
    double sinr_db = 0;
    double output_power = 0;  // |y|^2
    double delta = 0;
    std::optional<double> lambda1;
    bool updated = false;
};

struct RunTrace {
    std::vector<TraceRecord> records;
    long update_count = 0;
    double final_sinr_db = 0;

    void push(const TraceRecord& rec) {
        records.push_back(rec);
        if (rec.updated) ++update_count;
        final_sinr_db = rec.sinr_db;
    }
};

inline double update_rate(const RunTrace& trace) {
    if (trace.records.empty()) throw std::invalid_argument("update_rate: empty trace");
    return static_cast<double>(trace.update_count) / static_cast<double>(trace.records.size());
}

// Rows of the arithmetic-complexity comparison.
enum class Algorithm { Sg, SmSg, Rls, SmRls, SmAp, Cg, DsCg, SmCg };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::Sg,  Algorithm::SmSg, Algorithm::Rls,  Algorithm::SmRls,
                                               Algorithm::SmAp, Algorithm::Cg,  Algorithm::DsCg, Algorithm::SmCg};

std::string_view to_string(Algorithm alg);
Algorithm parse_algorithm(std::string_view name);

/// Set-membership rows (and DS-CG) only update on a fraction tau of snapshots.
bool uses_update_rate(Algorithm alg);

struct ComplexityParams {
    std::int64_t m = 16;
    std::int64_t N = 1000;
    double tau = 1.0;
    std::int64_t L = 3;
};

struct OpCounts {
    std::int64_t additions = 0;
    std::int64_t multiplications = 0;

    bool operator==(const OpCounts&) const = default;
};

/// Complex additions and multiplications over N snapshots. The updating
/// snapshot count round(tau N) is an integer, so the result is exact.
OpCounts complexity_counts(Algorithm alg, const ComplexityParams& params);

}  // namespace smcg

#endif  // SMCG_METRICS_HPP
