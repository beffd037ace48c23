#include "soficlab/pattern.hpp"

#include <cmath>
#include <memory>
#include <mutex>

#include "soficlab/errors.hpp"

namespace soficlab {

int inverse_letter(int letter, int rank) { return (letter + rank) % (2 * rank); }

WordTable::WordTable(int rank, int radius) : rank_(rank), radius_(radius) {
    if (rank < 1) throw ValidationError("WordTable: rank must be >= 1");
    if (radius < 0) throw ValidationError("WordTable: radius must be >= 0");
    const int letters = 2 * rank;
    parent_ = {-1};
    first_letter_ = {-1};
    length_ = {0};
    level_begin_ = {0, 1};
    for (int level = 1; level <= radius; ++level) {
        int lo = level_begin_[level - 1];
        int hi = level_begin_[level];
        for (int g = 0; g < letters; ++g) {
            for (int u = lo; u < hi; ++u) {
                if (length_[u] > 0 && first_letter_[u] == inverse_letter(g, rank)) continue;
                parent_.push_back(u);
                first_letter_.push_back(g);
                length_.push_back(level);
            }
        }
        level_begin_.push_back(static_cast<int>(parent_.size()));
    }
    child_.assign(parent_.size(), std::vector<int>(letters, -1));
    for (int w = 1; w < size(); ++w) child_[parent_[w]][first_letter_[w]] = w;
}

std::vector<int> WordTable::letters(int word) const {
    std::vector<int> out;
    for (int w = word; w != 0; w = parent_[w]) out.push_back(first_letter_[w]);
    return out;  // leftmost first already: first_letter is the leftmost letter
}

int WordTable::append(int word, int letter) const {
    std::vector<int> ls = letters(word);
    if (!ls.empty() && ls.back() == inverse_letter(letter, rank_))
        ls.pop_back();
    else
        ls.push_back(letter);
    // Rebuild the index by prepending from the right end.
    int idx = 0;
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
        idx = child_[idx][*it];
        if (idx < 0) throw ValidationError("WordTable::append: word leaves the table radius");
    }
    return idx;
}

const WordTable& WordTable::get(int rank, int radius) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<WordTable>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{rank, radius}];
    if (!slot) slot = std::make_unique<WordTable>(rank, radius);
    return *slot;
}

DepthRPattern truncate_pattern(const DepthRPattern& p, int radius) {
    if (radius > p.radius) throw ValidationError("truncate_pattern: radius grows");
    const WordTable& table = WordTable::get(p.rank, radius);
    DepthRPattern out;
    out.rank = p.rank;
    out.radius = radius;
    out.labels.assign(p.labels.begin(), p.labels.begin() + table.size());
    return out;
}

DepthRPattern shift_pattern(const DepthRPattern& p, int letter) {
    if (p.radius < 1) throw ValidationError("shift_pattern: needs radius >= 1");
    const WordTable& in = WordTable::get(p.rank, p.radius);
    const WordTable& out_table = WordTable::get(p.rank, p.radius - 1);
    DepthRPattern out;
    out.rank = p.rank;
    out.radius = p.radius - 1;
    out.labels.resize(static_cast<std::size_t>(out_table.size()));
    for (int w = 0; w < out_table.size(); ++w) {
        // Address w of the shifted pattern reads address w.letter of p.
        int src = in.append(w, letter);
        out.labels[w] = p.labels[static_cast<std::size_t>(src)];
    }
    return out;
}

double PatternDistribution::mass() const {
    double m = 0.0;
    for (const auto& [key, w] : weights) m += w;
    return m;
}

PatternDistribution chain_marginal_pattern(const MarkovChainSpec& chain, int radius,
                                           std::uint64_t pattern_budget) {
    require_valid(chain);
    const WordTable& table = WordTable::get(chain.rank, radius);
    const int sites = table.size();
    double total_patterns = std::pow(static_cast<double>(chain.q), sites);
    if (total_patterns > static_cast<double>(pattern_budget))
        throw BudgetError("chain_marginal_pattern: pattern space exceeds budget", total_patterns);

    PatternDistribution dist;
    dist.rank = chain.rank;
    dist.radius = radius;
    dist.q = chain.q;

    std::vector<std::uint8_t> labels(static_cast<std::size_t>(sites), 0);
    for (;;) {
        double p = chain.marginal[labels[0]];
        for (int w = 1; w < sites && p > 0.0; ++w)
            p *= chain.transition[labels[static_cast<std::size_t>(table.parent(w))]]
                                 [labels[static_cast<std::size_t>(w)]];
        if (p > 0.0)
            dist.weights[std::string(labels.begin(), labels.end())] = p;
        int pos = 0;
        while (pos < sites && labels[static_cast<std::size_t>(pos)] == chain.q - 1) {
            labels[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == sites) break;
        ++labels[static_cast<std::size_t>(pos)];
    }
    return dist;
}

PatternDistribution distribution_from_samples(const std::vector<DepthRPattern>& samples, int q) {
    if (samples.empty()) throw ValidationError("distribution_from_samples: no samples");
    PatternDistribution dist;
    dist.rank = samples.front().rank;
    dist.radius = samples.front().radius;
    dist.q = q;
    for (const auto& s : samples) {
        if (s.rank != dist.rank || s.radius != dist.radius)
            throw ValidationError("distribution_from_samples: mixed pattern shapes");
        ++dist.counts[s.key()];
    }
    dist.total = samples.size();
    for (const auto& [key, c] : dist.counts)
        dist.weights[key] = static_cast<double>(c) / static_cast<double>(dist.total);
    return dist;
}

double pattern_tv(const PatternDistribution& a, const PatternDistribution& b) {
    if (a.rank != b.rank || a.radius != b.radius || a.q != b.q)
        throw ValidationError("pattern_tv: distributions have different shapes");
    if (a.exact() && b.exact() && a.total == b.total) {
        // Same denominator: exact integer computation.
        std::uint64_t diff = 0;
        auto ia = a.counts.begin();
        auto ib = b.counts.begin();
        while (ia != a.counts.end() || ib != b.counts.end()) {
            if (ib == b.counts.end() || (ia != a.counts.end() && ia->first < ib->first)) {
                diff += ia->second;
                ++ia;
            } else if (ia == a.counts.end() || ib->first < ia->first) {
                diff += ib->second;
                ++ib;
            } else {
                diff += ia->second > ib->second ? ia->second - ib->second
                                                : ib->second - ia->second;
                ++ia;
                ++ib;
            }
        }
        return static_cast<double>(diff) / (2.0 * static_cast<double>(a.total));
    }
    double diff = 0.0;
    auto ia = a.weights.begin();
    auto ib = b.weights.begin();
    while (ia != a.weights.end() || ib != b.weights.end()) {
        if (ib == b.weights.end() || (ia != a.weights.end() && ia->first < ib->first)) {
            diff += std::abs(ia->second);
            ++ia;
        } else if (ia == a.weights.end() || ib->first < ia->first) {
            diff += std::abs(ib->second);
            ++ib;
        } else {
            diff += std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return diff / 2.0;
}

double pattern_distance(const PatternDistribution& a, const PatternDistribution& b) {
    double tv = pattern_tv(a, b);
    return metric_total_weight(a.rank) * tv + metric_tail_bound(a.rank, a.radius);
}

double pattern_ball_diameter(int rank, int radius) {
    return metric_total_weight(rank) + metric_tail_bound(rank, radius);
}

} // namespace soficlab
