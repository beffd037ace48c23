#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "soficlab/spin.hpp"

namespace soficlab {

// Letters encode generators of the rank-r free group: 0..r-1 are s_1..s_r,
// r..2r-1 their inverses. inverse_letter(g) = (g + r) mod 2r.
int inverse_letter(int letter, int rank);

// All reduced words of length <= radius, in canonical order: by length, then
// lexicographically with letter order s_1 < ... < s_r < s_1^{-1} < ... <
// s_r^{-1}. Index 0 is the empty word. Words are built by prepending a
// letter to a shorter word, so word k = first_letter[k] . word(parent[k]).
// Generation is purely level-by-level, so a table of radius R-1 is an
// index-prefix of the table of radius R.
class WordTable {
public:
    WordTable(int rank, int radius);

    int rank() const { return rank_; }
    int radius() const { return radius_; }
    int size() const { return static_cast<int>(parent_.size()); }
    int parent(int word) const { return parent_[word]; }
    int first_letter(int word) const { return first_letter_[word]; }
    int length(int word) const { return length_[word]; }
    // Index of the level's first word; level_begin(radius+1) == size().
    int level_begin(int level) const { return level_begin_[level]; }
    // Child g.w, or -1 if g.w is not reduced (g cancels w's first letter).
    int child(int word, int letter) const { return child_[word][letter]; }
    // Index of the reduced form of w.g (append a letter on the right);
    // requires the result to stay within the table's radius.
    int append(int word, int letter) const;
    // Letters of the word, leftmost first.
    std::vector<int> letters(int word) const;

    // Cached shared instance.
    static const WordTable& get(int rank, int radius);

private:
    int rank_, radius_;
    std::vector<int> parent_, first_letter_, length_, level_begin_;
    std::vector<std::vector<int>> child_;
};

// Labels on the radius-R ball of the Cayley tree, addressed by the reduced
// words of WordTable::get(rank, radius) in canonical order.
struct DepthRPattern {
    int rank = 0;
    int radius = 0;
    std::vector<std::uint8_t> labels;

    bool operator==(const DepthRPattern&) const = default;
    std::string key() const { return std::string(labels.begin(), labels.end()); }
};

DepthRPattern truncate_pattern(const DepthRPattern& p, int radius);
// Pattern of the shifted labeling at radius-1: out(h) = in(h.g).
DepthRPattern shift_pattern(const DepthRPattern& p, int letter);

// Distribution over depth-R patterns. Model distributions carry weights
// only; empirical distributions also carry exact integer counts with
// weights[k] = counts[k] / total.
struct PatternDistribution {
    int rank = 0;
    int radius = 0;
    int q = 0;
    std::map<std::string, double> weights;
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;

    bool exact() const { return total > 0; }
    double mass() const;
};

// Exact depth-R marginal of a Markov chain: root from p1, every tree edge
// outward from M. Pattern count q^{ball size} must stay within the budget.
PatternDistribution chain_marginal_pattern(const MarkovChainSpec& chain, int radius,
                                           std::uint64_t pattern_budget = (1ull << 22));

PatternDistribution distribution_from_samples(const std::vector<DepthRPattern>& samples, int q);

// Total variation distance. When both sides are exact with equal totals the
// value is computed in integer arithmetic.
double pattern_tv(const PatternDistribution& a, const PatternDistribution& b);

// Certified surrogate distance between measures with the given depth-R
// marginals: D_r * TV + metric_tail_bound(r, R).
double pattern_distance(const PatternDistribution& a, const PatternDistribution& b);

// Largest possible pattern_distance value at this rank and radius.
double pattern_ball_diameter(int rank, int radius);

} // namespace soficlab
