#include "soficlab/perm_graph.hpp"

#include <algorithm>

#include "soficlab/errors.hpp"

namespace soficlab {

PermGraph::PermGraph(int rank, std::vector<std::vector<int>> perms)
    : rank_(rank), perms_(std::move(perms)) {
    if (rank_ < 1) throw ValidationError("PermGraph: rank must be >= 1");
    if (perms_.size() != static_cast<std::size_t>(rank_))
        throw ValidationError("PermGraph: expected one permutation per generator");
    if (perms_.empty() || perms_[0].empty()) throw ValidationError("PermGraph: empty vertex set");
    n_ = static_cast<int>(perms_[0].size());
    inverses_.assign(perms_.size(), std::vector<int>(static_cast<std::size_t>(n_), -1));
    for (int k = 0; k < rank_; ++k) {
        const auto& p = perms_[k];
        if (p.size() != static_cast<std::size_t>(n_))
            throw ValidationError("PermGraph: permutations have unequal sizes");
        for (int v = 0; v < n_; ++v) {
            if (p[v] < 0 || p[v] >= n_) throw ValidationError("PermGraph: image out of range");
            if (inverses_[k][p[v]] != -1) throw ValidationError("PermGraph: not a bijection");
            inverses_[k][p[v]] = v;
        }
    }
}

PermGraph sample_uniform(int n, int rank, Rng& rng) {
    if (n < 1) throw ValidationError("sample_uniform: n must be >= 1");
    if (rank < 1) throw ValidationError("sample_uniform: rank must be >= 1");
    std::vector<std::vector<int>> perms(static_cast<std::size_t>(rank));
    for (auto& p : perms) {
        p.resize(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) p[v] = v;
        for (int i = n - 1; i > 0; --i) {
            int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(p[i], p[j]);
        }
    }
    return PermGraph(rank, std::move(perms));
}

PermGraph sample_uniform(int n, int rank, std::uint64_t seed) {
    Rng rng(seed);
    return sample_uniform(n, rank, rng);
}

PermGraph apply_switching(const PermGraph& g, const SwitchMove& move) {
    if (move.generator < 0 || move.generator >= g.rank())
        throw ValidationError("apply_switching: generator out of range");
    if (move.i < 0 || move.i >= g.size() || move.j < 0 || move.j >= g.size())
        throw ValidationError("apply_switching: vertex out of range");
    std::vector<std::vector<int>> perms = g.perms();
    std::swap(perms[move.generator][move.i], perms[move.generator][move.j]);
    return PermGraph(g.rank(), std::move(perms));
}

double soficity_audit(const PermGraph& g, int radius) {
    if (radius < 1) throw ValidationError("soficity_audit: radius must be >= 1");
    const WordTable& table = WordTable::get(g.rank(), radius);
    const int n = g.size();
    const int words = table.size();
    std::vector<int> stamp(static_cast<std::size_t>(n), -1);
    std::vector<int> vertex_at(static_cast<std::size_t>(words));
    int good = 0;
    for (int v = 0; v < n; ++v) {
        bool tree = true;
        vertex_at[0] = v;
        stamp[static_cast<std::size_t>(v)] = v;
        for (int w = 1; w < words; ++w) {
            int u = g.apply_letter(table.first_letter(w),
                                   vertex_at[static_cast<std::size_t>(table.parent(w))]);
            vertex_at[static_cast<std::size_t>(w)] = u;
            if (stamp[static_cast<std::size_t>(u)] == v) {
                tree = false;
                break;
            }
            stamp[static_cast<std::size_t>(u)] = v;
        }
        if (tree) ++good;
    }
    return static_cast<double>(good) / n;
}

DepthRPattern pullback_pattern(const PermGraph& g, const Labeling& x, int v, int radius) {
    if (x.size() != static_cast<std::size_t>(g.size()))
        throw ValidationError("pullback_pattern: labeling size mismatch");
    if (v < 0 || v >= g.size()) throw ValidationError("pullback_pattern: vertex out of range");
    const WordTable& table = WordTable::get(g.rank(), radius);
    DepthRPattern pat;
    pat.rank = g.rank();
    pat.radius = radius;
    pat.labels.resize(static_cast<std::size_t>(table.size()));
    std::vector<int> vertex_at(static_cast<std::size_t>(table.size()));
    vertex_at[0] = v;
    pat.labels[0] = x[static_cast<std::size_t>(v)];
    for (int w = 1; w < table.size(); ++w) {
        // sigma^{g.u} v = sigma^g (sigma^u v)
        int u = g.apply_letter(table.first_letter(w),
                               vertex_at[static_cast<std::size_t>(table.parent(w))]);
        vertex_at[static_cast<std::size_t>(w)] = u;
        pat.labels[static_cast<std::size_t>(w)] = x[static_cast<std::size_t>(u)];
    }
    return pat;
}

PatternDistribution empirical_distribution(const PermGraph& g, const Labeling& x, int radius,
                                           int q) {
    for (auto s : x)
        if (s >= q) throw ValidationError("empirical_distribution: symbol out of alphabet");
    PatternDistribution dist;
    dist.rank = g.rank();
    dist.radius = radius;
    dist.q = q;
    for (int v = 0; v < g.size(); ++v)
        ++dist.counts[pullback_pattern(g, x, v, radius).key()];
    dist.total = static_cast<std::uint64_t>(g.size());
    for (const auto& [key, c] : dist.counts)
        dist.weights[key] = static_cast<double>(c) / static_cast<double>(dist.total);
    return dist;
}

std::vector<int> switching_ball(const PermGraph& g, const SwitchMove& move, int radius) {
    std::vector<int> frontier = {move.i, move.j, g.image(move.generator, move.i),
                                 g.image(move.generator, move.j)};
    std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
    std::vector<int> ball;
    for (int v : frontier)
        if (!seen[static_cast<std::size_t>(v)]) {
            seen[static_cast<std::size_t>(v)] = 1;
            ball.push_back(v);
        }
    std::vector<int> current = ball;
    for (int step = 0; step < radius; ++step) {
        std::vector<int> next;
        for (int v : current) {
            for (int letter = 0; letter < 2 * g.rank(); ++letter) {
                int u = g.apply_letter(letter, v);
                if (!seen[static_cast<std::size_t>(u)]) {
                    seen[static_cast<std::size_t>(u)] = 1;
                    ball.push_back(u);
                    next.push_back(u);
                }
            }
        }
        current = std::move(next);
    }
    std::sort(ball.begin(), ball.end());
    return ball;
}

} // namespace soficlab
