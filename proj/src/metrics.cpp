#include "smcg/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace smcg {

std::string_view to_string(Algorithm alg) {
    switch (alg) {
        case Algorithm::Sg: return "SG";
        case Algorithm::SmSg: return "SM-SG";
        case Algorithm::Rls: return "RLS";
        case Algorithm::SmRls: return "SM-RLS";
        case Algorithm::SmAp: return "SM-AP";
        case Algorithm::Cg: return "CG";
        case Algorithm::DsCg: return "DS-CG";
        case Algorithm::SmCg: return "SM-CG";
    }
    throw std::invalid_argument("unknown algorithm tag");
}

Algorithm parse_algorithm(std::string_view name) {
    for (Algorithm a : kAllAlgorithms)
        if (to_string(a) == name) return a;
    throw std::invalid_argument("unknown algorithm tag: " + std::string(name));
}

bool uses_update_rate(Algorithm alg) {
    switch (alg) {
        case Algorithm::SmSg:
        case Algorithm::SmRls:
        case Algorithm::SmAp:
        case Algorithm::DsCg:
        case Algorithm::SmCg: return true;
        default: return false;
    }
}

OpCounts complexity_counts(Algorithm alg, const ComplexityParams& p) {
    if (p.m < 1 || p.N < 1 || p.L < 1 || !(p.tau > 0 && p.tau <= 1))
        throw std::invalid_argument("complexity_counts: require m, N, L >= 1 and 0 < tau <= 1");
    const std::int64_t m = p.m, N = p.N, L = p.L;
    const std::int64_t tN = std::llround(p.tau * static_cast<double>(N));

    switch (alg) {
        case Algorithm::Sg: return {N * (3 * m - 1), N * (4 * m + 1)};
        case Algorithm::SmSg: return {2 * N * m + 3 * tN * m, N * (2 * m + 5) + tN * (4 * m + 3)};
        case Algorithm::Rls: return {N * (4 * m * m - m - 1), N * (5 * m * m + 5 * m - 1)};
        case Algorithm::SmRls: return {2 * N * m + tN * (4 * m * m - 1), N * (2 * m + 5) + tN * (5 * m * m + 6 * m + 2)};
        case Algorithm::SmAp:
            return {N * (2 * m + 1) + tN * ((m - 1) * L * L + m * L + 1),
                    N * (2 * m + 5) + tN * (L * L * L + m * L * L + (m + 1) * L + m + 2)};
        case Algorithm::Cg: return {N * (2 * m * m + 7 * m + 1), N * (2 * m * m + 11 * m + 5)};
        case Algorithm::DsCg: return {tN * (2 * m * m + 8 * m - 2) + L * N * (m - 1), tN * (2 * m * m + 9 * m + 3) + L * N * m};
        case Algorithm::SmCg: return {2 * N * m + tN * (2 * m * m + 8 * m + 6), N * (2 * m + 5) + tN * (2 * m * m + 9 * m + 22)};
    }
    throw std::invalid_argument("complexity_counts: unknown algorithm tag");
}

}  // namespace smcg
