#pragma once

#include <array>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sticky/chain.hpp"
#include "sticky/errors.hpp"
#include "sticky/strata.hpp"

namespace sticky {

// Reports are commutative-monoid folds over replica results: merging two
// reports equals the report of the concatenated ensemble.

struct OccupationReport {
    int n = 0;
    double s = 1.0;
    double delta = 0.0;
    long steps = 0;
    std::map<StratumMask, long> counts;
    // per stratum: {sum, sum of squares} of within-replica batch fractions
    std::map<StratumMask, std::array<double, 2>> batch_moments;
    long batch_samples = 0;
    // per stratum: {sum, sum of squares} of whole-replica fractions
    std::map<StratumMask, std::array<double, 2>> replica_moments;
    long replica_samples = 0;
    std::vector<double> targets;  // by mask; may be empty

    void absorb(const RunResult& r) {
        n = r.n;
        s = r.s;
        delta = r.delta;
        steps += r.steps;
        for (const auto& [mask, c] : r.stratum_steps) counts[mask] += c;
        if (r.steps > 0) {
            ++replica_samples;
            for (const auto& [mask, c] : r.stratum_steps) {
                const double f = static_cast<double>(c) / r.steps;
                auto& m = replica_moments[mask];
                m[0] += f;
                m[1] += f * f;
            }
        }
        for (const auto& batch : r.batch_counts) {
            long batch_total = 0;
            for (const auto& [mask, c] : batch) batch_total += c;
            if (batch_total == 0) continue;
            ++batch_samples;
            for (const auto& [mask, c] : batch) {
                const double f = static_cast<double>(c) / batch_total;
                auto& m = batch_moments[mask];
                m[0] += f;
                m[1] += f * f;
            }
        }
    }

    void merge(const OccupationReport& other) {
        steps += other.steps;
        batch_samples += other.batch_samples;
        replica_samples += other.replica_samples;
        for (const auto& [mask, c] : other.counts) counts[mask] += c;
        for (const auto& [mask, m] : other.batch_moments) {
            auto& mine = batch_moments[mask];
            mine[0] += m[0];
            mine[1] += m[1];
        }
        for (const auto& [mask, m] : other.replica_moments) {
            auto& mine = replica_moments[mask];
            mine[0] += m[0];
            mine[1] += m[1];
        }
    }

    struct Row {
        StratumMask mask = 0;
        double empirical_fraction = 0.0;
        double target_mass = 0.0;
        double se = 0.0;
        double z = 0.0;
        double raw_occupation = 0.0;  // A_T^B = time in B / s^(n-#B)
    };

    // One row per mask in ascending order. The standard error is the larger
    // of the pooled batch-means estimate and the replica-level CLT estimate
    // (replicas are independent, so the latter stays honest when batches are
    // shorter than the correlation time), floored at one-step resolution for
    // visited strata.
    std::vector<Row> rows() const {
        std::vector<Row> out;
        for (const StratumId& b : enumerate_strata(n)) {
            Row row;
            row.mask = b.mask;
            const auto it = counts.find(b.mask);
            const long c = it == counts.end() ? 0 : it->second;
            row.empirical_fraction = steps > 0 ? static_cast<double>(c) / steps : 0.0;
            row.raw_occupation =
                delta * c / stratum_weight(n, s, b).value;
            if (!targets.empty()) row.target_mass = targets[b.mask];
            const auto bm = batch_moments.find(b.mask);
            if (bm != batch_moments.end() && batch_samples > 1) {
                const double mean = bm->second[0] / batch_samples;
                const double var =
                    std::fmax(0.0, bm->second[1] / batch_samples - mean * mean);
                row.se = std::sqrt(var / batch_samples);
            }
            const auto rm = replica_moments.find(b.mask);
            if (rm != replica_moments.end() && replica_samples > 1) {
                const double mean = rm->second[0] / replica_samples;
                const double var =
                    std::fmax(0.0, rm->second[1] / replica_samples - mean * mean);
                row.se = std::fmax(row.se, std::sqrt(var / replica_samples));
            }
            if (c > 0) row.se = std::fmax(row.se, 1.0 / static_cast<double>(steps));
            if (!targets.empty())
                row.z = row.se > 0.0 ? (row.empirical_fraction - row.target_mass) / row.se
                                     : 0.0;
            out.push_back(row);
        }
        return out;
    }

    bool pass(double z_threshold) const {
        if (targets.empty()) return true;
        for (const Row& row : rows())
            if (std::abs(row.z) > z_threshold) return false;
        return true;
    }
};

inline OccupationReport revuz_check(std::span<const RunResult> replicas,
                                    std::vector<double> targets = {}) {
    OccupationReport report;
    report.targets = std::move(targets);
    for (const RunResult& r : replicas) report.absorb(r);
    return report;
}

struct QvReport {
    int n = 0;
    double h = 0.0, delta = 0.0;
    std::vector<long> interior_steps;
    std::vector<double> interior_sq;
    std::vector<double> cross_sum, cross_sq_sum;
    std::vector<long> cross_count;

    void absorb(const RunResult& r) {
        n = r.n;
        h = r.h;
        delta = r.delta;
        if (interior_steps.empty()) {
            interior_steps.assign(r.interior_steps.size(), 0);
            interior_sq.assign(r.interior_sq.size(), 0.0);
            cross_sum.assign(r.cross_sum.size(), 0.0);
            cross_sq_sum.assign(r.cross_sq_sum.size(), 0.0);
            cross_count.assign(r.cross_count.size(), 0);
        }
        for (std::size_t j = 0; j < interior_steps.size(); ++j) {
            interior_steps[j] += r.interior_steps[j];
            interior_sq[j] += r.interior_sq[j];
        }
        for (std::size_t p = 0; p < cross_sum.size(); ++p) {
            cross_sum[p] += r.cross_sum[p];
            cross_sq_sum[p] += r.cross_sq_sum[p];
            cross_count[p] += r.cross_count[p];
        }
    }

    void merge(const QvReport& other) {
        if (interior_steps.empty()) {
            *this = other;
            return;
        }
        for (std::size_t j = 0; j < interior_steps.size(); ++j) {
            interior_steps[j] += other.interior_steps[j];
            interior_sq[j] += other.interior_sq[j];
        }
        for (std::size_t p = 0; p < cross_sum.size(); ++p) {
            cross_sum[p] += other.cross_sum[p];
            cross_sq_sum[p] += other.cross_sq_sum[p];
            cross_count[p] += other.cross_count[p];
        }
    }

    double slope(int coord) const {
        return interior_sq[coord] / (delta * interior_steps[coord]);
    }

    struct Cross {
        int j = 0, k = 0;
        double mean = 0.0, se = 0.0, z = 0.0;
    };

    std::vector<Cross> cross_terms() const {
        std::vector<Cross> out;
        int p = 0;
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k, ++p) {
                Cross c;
                c.j = j;
                c.k = k;
                if (cross_count[p] > 1) {
                    c.mean = cross_sum[p] / cross_count[p];
                    const double var = std::fmax(
                        0.0, (cross_sq_sum[p] - cross_count[p] * c.mean * c.mean) /
                                 (cross_count[p] - 1));
                    c.se = std::sqrt(var / cross_count[p]);
                    c.z = c.se > 0.0 ? c.mean / c.se : 0.0;
                }
                out.push_back(c);
            }
        return out;
    }

    bool pass(double slope_lo, double slope_hi, double z_threshold) const {
        for (int j = 0; j < n; ++j) {
            const double sl = slope(j);
            if (!(sl >= slope_lo && sl <= slope_hi)) return false;
        }
        for (const Cross& c : cross_terms())
            if (std::abs(c.z) > z_threshold) return false;
        return true;
    }
};

inline QvReport qv_check(std::span<const RunResult> replicas, long min_interior = 10000) {
    QvReport report;
    for (const RunResult& r : replicas) report.absorb(r);
    for (std::size_t j = 0; j < report.interior_steps.size(); ++j)
        if (report.interior_steps[j] < min_interior)
            throw err::InsufficientData("diagnostics: coordinate " + std::to_string(j + 1) +
                                        " has " + std::to_string(report.interior_steps[j]) +
                                        " interior steps, need " + std::to_string(min_interior));
    return report;
}

namespace detail {

struct Moments {
    double sum = 0.0, sum_sq = 0.0;
    long count = 0;
    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++count;
    }
    void merge(const Moments& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        count += o.count;
    }
    double mean() const { return count > 0 ? sum / count : 0.0; }
    double ci_half(double z = 1.96) const {
        if (count < 2) return 0.0;
        const double m = mean();
        const double var = std::fmax(0.0, (sum_sq - count * m * m) / (count - 1));
        return z * std::sqrt(var / count);
    }
    bool contains_zero() const { return std::abs(mean()) <= ci_half(); }
};

}  // namespace detail

// Residuals of f(X_T) - f(X_0) - int (generator terms) dtau across replicas.
// The control drops the (1/s) sum over dry coordinates; with it removed the
// residual must leave the confidence band.
struct MartingaleReport {
    std::vector<std::string> names;
    std::vector<detail::Moments> residual;
    std::vector<detail::Moments> control;  // boundary term removed

    void absorb(const RunResult& r) {
        if (residual.empty()) {
            residual.resize(r.martingale.size());
            control.resize(r.martingale.size());
        }
        for (std::size_t i = 0; i < r.martingale.size(); ++i) {
            const MartingaleAccum& m = r.martingale[i];
            const double base = m.end_value - m.start_value - m.generator_integral;
            residual[i].add(base - m.boundary_integral);
            control[i].add(base);
        }
    }

    void merge(const MartingaleReport& other) {
        if (residual.empty()) {
            *this = other;
            return;
        }
        for (std::size_t i = 0; i < residual.size(); ++i) {
            residual[i].merge(other.residual[i]);
            control[i].merge(other.control[i]);
        }
    }

    bool pass() const {
        for (const auto& m : residual)
            if (!m.contains_zero()) return false;
        return true;
    }
};

inline MartingaleReport martingale_residual(std::span<const RunResult> replicas,
                                            std::vector<std::string> names,
                                            long min_replicas = 30) {
    if (static_cast<long>(replicas.size()) < min_replicas)
        throw err::InsufficientReplicas("diagnostics: " + std::to_string(replicas.size()) +
                                        " replicas, need " + std::to_string(min_replicas));
    MartingaleReport report;
    report.names = std::move(names);
    for (const RunResult& r : replicas) report.absorb(r);
    return report;
}

// Invariance E[f(X_T)] - E[f(X_0)] per function and the symmetry difference
// E[f(X_0) g(X_T)] - E[g(X_0) f(X_T)] per unordered pair.
struct SymmetryReport {
    std::vector<std::string> names;
    std::vector<detail::Moments> invariance;             // per function
    std::vector<detail::Moments> symmetry_difference;    // per pair j<k

    void absorb(const RunResult& r) {
        const std::size_t m = r.symmetry_start.size();
        if (invariance.empty()) {
            invariance.resize(m);
            symmetry_difference.resize(m * (m - 1) / 2);
        }
        for (std::size_t i = 0; i < m; ++i)
            invariance[i].add(r.symmetry_end[i] - r.symmetry_start[i]);
        std::size_t p = 0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = i + 1; k < m; ++k, ++p)
                symmetry_difference[p].add(r.symmetry_start[i] * r.symmetry_end[k] -
                                           r.symmetry_start[k] * r.symmetry_end[i]);
    }

    void merge(const SymmetryReport& other) {
        if (invariance.empty()) {
            *this = other;
            return;
        }
        for (std::size_t i = 0; i < invariance.size(); ++i)
            invariance[i].merge(other.invariance[i]);
        for (std::size_t p = 0; p < symmetry_difference.size(); ++p)
            symmetry_difference[p].merge(other.symmetry_difference[p]);
    }

    bool pass() const {
        for (const auto& m : invariance)
            if (!m.contains_zero()) return false;
        for (const auto& m : symmetry_difference)
            if (!m.contains_zero()) return false;
        return true;
    }
};

inline SymmetryReport symmetry_check(std::span<const RunResult> replicas,
                                     std::vector<std::string> names, long min_replicas = 30) {
    if (static_cast<long>(replicas.size()) < min_replicas)
        throw err::InsufficientReplicas("diagnostics: " + std::to_string(replicas.size()) +
                                        " replicas, need " + std::to_string(min_replicas));
    SymmetryReport report;
    report.names = std::move(names);
    for (const RunResult& r : replicas) report.absorb(r);
    return report;
}

// Discrete conservativity: no state escaped [0, cap]^n and the accounted time
// is exactly steps * delta per replica.
struct ConservativityReport {
    long replicas = 0;
    bool in_bounds = true;
    bool time_accounted = true;

    void absorb(const RunResult& r) {
        ++replicas;
        in_bounds = in_bounds && r.in_bounds;
        long counted = 0;
        for (const auto& [mask, c] : r.stratum_steps) counted += c;
        time_accounted = time_accounted && counted == r.steps;
    }

    bool pass() const { return in_bounds && time_accounted; }
};

inline ConservativityReport conservativity_check(std::span<const RunResult> replicas) {
    ConservativityReport report;
    for (const RunResult& r : replicas) report.absorb(r);
    return report;
}

}  // namespace sticky
