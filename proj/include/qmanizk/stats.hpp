// Copyright 2026 The qmanizk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Statistics used by the empirical suites (chi-square goodness of fit,
 * binomial bands), the admissible-subset combinatorics shared by the
 * protocol verifiers and the Fiat-Shamir challenge map, and a seeded
 * parallel trial runner.
 */

#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

#include "qmanizk/common.hpp"

namespace qmanizk {

// ---------------------------------------------------------------------------
// chi-square
// ---------------------------------------------------------------------------

namespace detail {

// Regularized upper incomplete gamma Q(a, x), series / continued fraction.
inline double gamma_q(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by series, return 1 - P
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Q(a,x) by Lentz continued fraction
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

}  // namespace detail

struct ChiSquareResult {
    double statistic = 0;
    int dof = 0;
    double p_value = 1;
};

/// Pearson chi-square of observed counts against expected probabilities.
/// Cells with expected probability 0 must have 0 observations.
inline ChiSquareResult chi_square_test(const std::vector<std::uint64_t>& observed,
                                       const std::vector<double>& expected_probs) {
    if (observed.size() != expected_probs.size()) {
        throw std::invalid_argument("chi_square_test: size mismatch");
    }
    std::uint64_t total = 0;
    for (auto c : observed) total += c;
    double stat = 0;
    int dof = -1;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = expected_probs[i] * static_cast<double>(total);
        if (e <= 0) {
            if (observed[i] != 0) return {1e308, static_cast<int>(observed.size()), 0.0};
            continue;
        }
        double d = static_cast<double>(observed[i]) - e;
        stat += d * d / e;
        ++dof;
    }
    if (dof < 1) return {stat, 0, 1.0};
    return {stat, dof, detail::gamma_q(dof / 2.0, stat / 2.0)};
}

/// Uniform-cells convenience overload.
inline ChiSquareResult chi_square_uniform(const std::vector<std::uint64_t>& observed) {
    std::vector<double> e(observed.size(), 1.0 / static_cast<double>(observed.size()));
    return chi_square_test(observed, e);
}

/// |p_hat - p| measured in units of the binomial sigma for p over n trials.
inline double binomial_deviation_sigmas(double p_hat, double p, std::uint64_t n) {
    double var = p * (1.0 - p) / static_cast<double>(n);
    if (var <= 0) return p_hat == p ? 0.0 : 1e308;
    return std::abs(p_hat - p) / std::sqrt(var);
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("total_variation: size mismatch");
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

// ---------------------------------------------------------------------------
// admissible subsets: nonempty S subseteq [n] with |S| <= min(5, n)
// ---------------------------------------------------------------------------

inline std::uint64_t binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return r;
}

inline int max_subset_size(int n) { return n < 5 ? n : 5; }

inline std::uint64_t admissible_subset_count(int n) {
    std::uint64_t total = 0;
    for (int k = 1; k <= max_subset_size(n); ++k) total += binom(n, k);
    return total;
}

/// N' = 3^5 * sum_{i=1..5} C(N, i), the acceptance-law dilution factor.
inline double dilution_factor(int n) {
    return 243.0 * static_cast<double>(admissible_subset_count(n));
}

/// Lexicographic unranking of the k-combination of {0..n-1} with given rank.
inline std::vector<int> unrank_combination(int n, int k, std::uint64_t rank) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    int next = 0;
    for (int slot = k; slot >= 1; --slot) {
        for (int v = next; v <= n - slot; ++v) {
            std::uint64_t block = binom(n - 1 - v, slot - 1);
            if (rank < block) {
                out.push_back(v);
                next = v + 1;
                break;
            }
            rank -= block;
        }
    }
    return out;
}

inline std::uint64_t rank_combination(int n, const std::vector<int>& sorted_elems) {
    std::uint64_t rank = 0;
    int next = 0;
    int k = static_cast<int>(sorted_elems.size());
    for (int slot = 0; slot < k; ++slot) {
        for (int v = next; v < sorted_elems[static_cast<std::size_t>(slot)]; ++v) {
            rank += binom(n - 1 - v, k - slot - 1);
        }
        next = sorted_elems[static_cast<std::size_t>(slot)] + 1;
    }
    return rank;
}

/// Subsets ordered by size then lexicographically; index < admissible_subset_count(n).
inline std::vector<int> unrank_admissible_subset(int n, std::uint64_t index) {
    for (int k = 1; k <= max_subset_size(n); ++k) {
        std::uint64_t c = binom(n, k);
        if (index < c) return unrank_combination(n, k, index);
        index -= c;
    }
    throw std::invalid_argument("unrank_admissible_subset: index out of range");
}

inline std::uint64_t rank_admissible_subset(int n, const std::vector<int>& sorted_elems) {
    int k = static_cast<int>(sorted_elems.size());
    if (k < 1 || k > max_subset_size(n)) {
        throw std::invalid_argument("rank_admissible_subset: bad subset size");
    }
    std::uint64_t base = 0;
    for (int i = 1; i < k; ++i) base += binom(n, i);
    return base + rank_combination(n, sorted_elems);
}

/// Uniform over all nonempty subsets of [n] with size <= min(5, n).
inline std::vector<int> random_admissible_subset(int n, Rng& rng) {
    return unrank_admissible_subset(n, rand_below(rng, admissible_subset_count(n)));
}

// ---------------------------------------------------------------------------
// trial runner
// ---------------------------------------------------------------------------

inline unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("QMANIZK_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && static_cast<unsigned>(v) < hw) hw = static_cast<unsigned>(v);
    }
    return hw;
}

/// Runs `trial(rng, index)` for indices 0..trials-1 with per-trial derived
/// seeds, fanned across workers, and returns the success count. Counts are
/// order-independent, so the report is reproducible from (seed, trials).
inline std::uint64_t run_trials(std::uint64_t trials, std::uint64_t base_seed,
                                const std::function<bool(Rng&, std::uint64_t)>& trial) {
    unsigned workers = worker_count();
    if (trials < 512 || workers == 1) {
        std::uint64_t ok = 0;
        for (std::uint64_t i = 0; i < trials; ++i) {
            Rng rng = derive_rng(base_seed, i);
            if (trial(rng, i)) ++ok;
        }
        return ok;
    }
    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> ok{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            std::uint64_t local = 0;
            for (;;) {
                std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= trials) break;
                Rng rng = derive_rng(base_seed, i);
                if (trial(rng, i)) ++local;
            }
            ok.fetch_add(local, std::memory_order_relaxed);
        });
    }
    for (auto& t : pool) t.join();
    return ok.load();
}

}  // namespace qmanizk
