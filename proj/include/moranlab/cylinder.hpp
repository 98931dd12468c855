#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace moranlab {

// A finite word J = (j_1, ..., j_k) over the letter alphabet, with its
// cylinder contraction rho_J = prod rho_{j_i} and mass P_J = prod P_{j_i}.
struct CylinderWord {
    std::vector<std::int32_t> letters;
    double rho = 1.0;
    double mass = 1.0;
};

// Composed similarity for a word, letters applied outer-to-inner (the word
// (a, b) denotes S_a after S_b... i.e. x -> S_a(S_b(x))). Cross-checks the
// composed ratio against the letter-ratio product.
inline SimilarityMap word_map(const IFSModel& m, const std::vector<std::int32_t>& letters) {
    SimilarityMap acc = SimilarityMap::identity(m.dim);
    double rho_product = 1.0;
    for (std::int32_t j : letters) {
        acc = compose(acc, m.map(j));
        rho_product *= m.ratios(j);
    }
    if (std::abs(acc.ratio - rho_product) > 1e-14 * std::max(acc.ratio, rho_product))
        throw std::runtime_error("composed contraction drifted from the ratio product");
    return acc;
}

// Image of the anchor under the word's map: the representative point of the
// cylinder, within rho_J * seed_diameter of every point of the cylinder.
inline VecD word_point(const IFSModel& m, const std::vector<std::int32_t>& letters) {
    return word_map(m, letters).apply(m.anchor);
}

// Maximal words with rho_J < t <= rho_parent, enumerated best-first by
// cylinder mass until the retained mass reaches 1 - mass_tol.
struct StoppingSet {
    double t = 0.0;
    std::vector<CylinderWord> words;
    double retained_mass = 0.0;
    double dropped_mass = 0.0;
    long long pops = 0;
};

namespace detail {

// sup_{j >= k} P_j: exact suffix maximum over the cached head, monotone
// decay beyond it.
struct LetterSup {
    const WeightSequence* w = nullptr;
    std::vector<double> suffix;
    long long head_n = 0;

    explicit LetterSup(const WeightSequence& weights) : w(&weights) {
        head_n = weights.finite() ? weights.count()
                                  : std::min<long long>(kPrefixCache, 1 << 12);
        suffix.resize(static_cast<std::size_t>(head_n));
        double beyond = weights.finite() ? 0.0 : (*w)(head_n + 1);
        double cur = beyond;
        for (long long k = head_n; k >= 1; --k) {
            cur = std::max(cur, (*w)(k));
            suffix[static_cast<std::size_t>(k - 1)] = cur;
        }
    }
    double from(long long k) const {
        if (k <= head_n) return suffix[static_cast<std::size_t>(k - 1)];
        if (w->finite()) return 0.0;
        return (*w)(k); // monotone beyond the head
    }
};

struct QueueEntry {
    double priority = 0.0;  // upper bound on the best cylinder mass inside
    bool generator = false; // pending siblings (letters >= next_letter)
    std::vector<std::int32_t> word;
    long long next_letter = 0;
    double mass = 1.0; // P of `word`
    double rho = 1.0;  // rho of `word`
};

struct QueueOrder {
    // max-heap on priority; deterministic tie-breaks
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        if (a.priority != b.priority) return a.priority < b.priority;
        if (a.word != b.word) return a.word > b.word;
        if (a.generator != b.generator) return a.generator;
        return a.next_letter > b.next_letter;
    }
};

} // namespace detail

inline StoppingSet enumerate_stopping_set(const IFSModel& m, double t,
                                          double mass_tol = 1e-9,
                                          long long budget = 10'000'000) {
    if (!(t > 0.0 && t <= 1.0)) throw validation_error("stopping scale must lie in (0, 1]");
    if (!(mass_tol > 0.0 && mass_tol < 1.0))
        throw validation_error("mass tolerance must lie in (0, 1)");

    detail::LetterSup sup(m.weights);
    std::priority_queue<detail::QueueEntry, std::vector<detail::QueueEntry>,
                        detail::QueueOrder> queue;
    long long letter_count = m.finite() ? m.map_count() : kInfiniteCount;

    StoppingSet out;
    out.t = t;
    Kahan emitted;

    auto push_child = [&](const detail::QueueEntry& parent, long long j) {
        detail::QueueEntry child;
        child.word = parent.word;
        child.word.push_back(static_cast<std::int32_t>(j));
        child.mass = parent.mass * (*sup.w)(j);
        child.rho = parent.rho * m.ratios(j);
        child.priority = child.mass;
        child.generator = false;
        if (child.mass > 0.0) queue.push(std::move(child));
    };
    auto push_generator = [&](const detail::QueueEntry& base, long long next) {
        if (letter_count != kInfiniteCount && next > letter_count) return;
        detail::QueueEntry gen;
        gen.word = base.word;
        gen.mass = base.mass;
        gen.rho = base.rho;
        gen.next_letter = next;
        gen.generator = true;
        gen.priority = base.mass * sup.from(next);
        if (gen.priority > 0.0) queue.push(std::move(gen));
    };

    detail::QueueEntry root;
    root.priority = 1.0;
    queue.push(root);

    while (!queue.empty()) {
        if (1.0 - emitted.sum <= mass_tol) break;
        if (out.pops >= budget)
            throw budget_error("stopping-set enumeration budget exhausted", emitted.sum);
        detail::QueueEntry cur = queue.top();
        queue.pop();
        ++out.pops;
        if (cur.generator) {
            push_child(cur, cur.next_letter);
            push_generator(cur, cur.next_letter + 1);
            continue;
        }
        if (cur.rho < t) {
            // maximal: the parent had rho >= t (the root has rho = 1 >= t)
            out.words.push_back({std::move(cur.word), cur.rho, cur.mass});
            emitted.add(cur.mass);
            continue;
        }
        push_child(cur, 1);
        push_generator(cur, 2);
    }

    out.retained_mass = emitted.sum;
    out.dropped_mass = std::max(0.0, 1.0 - emitted.sum);
    std::sort(out.words.begin(), out.words.end(),
              [](const CylinderWord& a, const CylinderWord& b) {
                  if (a.mass != b.mass) return a.mass > b.mass;
                  return a.letters < b.letters;
              });
    return out;
}

// The sub-family with rho_J >= eps * t (the words whose contraction is
// comparable to the stopping scale).
inline StoppingSet filter_comparable(const StoppingSet& full, double eps) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw validation_error("comparability factor must lie in (0, 1]");
    StoppingSet out;
    out.t = full.t;
    out.pops = full.pops;
    Kahan kept;
    for (const auto& wrd : full.words)
        if (wrd.rho >= eps * full.t) {
            out.words.push_back(wrd);
            kept.add(wrd.mass);
        }
    out.retained_mass = kept.sum;
    out.dropped_mass = std::max(0.0, 1.0 - kept.sum);
    return out;
}

} // namespace moranlab
