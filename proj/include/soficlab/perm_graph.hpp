#pragma once

#include <cstdint>
#include <vector>

#include "soficlab/pattern.hpp"
#include "soficlab/rng.hpp"

namespace soficlab {

// Vertex labeling, one symbol per vertex.
using Labeling = std::vector<std::uint8_t>;

// Swap of the images of vertices i and j under one generator permutation.
struct SwitchMove {
    int generator = 0;
    int i = 0;
    int j = 0;
};

// Homomorphism from the rank-r free group into Sym(n), stored as r
// permutations with precomputed inverses. Immutable after construction;
// apply_switching returns a new value.
class PermGraph {
public:
    PermGraph(int rank, std::vector<std::vector<int>> perms);

    int size() const { return n_; }
    int rank() const { return rank_; }
    // sigma^{s_k} v and sigma^{s_k^{-1}} v
    int image(int generator, int v) const { return perms_[generator][v]; }
    int inverse_image(int generator, int v) const { return inverses_[generator][v]; }
    // letter in [0, 2r): generators first, then inverses
    int apply_letter(int letter, int v) const {
        return letter < rank_ ? perms_[letter][v] : inverses_[letter - rank_][v];
    }
    const std::vector<std::vector<int>>& perms() const { return perms_; }

private:
    int n_ = 0;
    int rank_ = 0;
    std::vector<std::vector<int>> perms_;
    std::vector<std::vector<int>> inverses_;
};

// Uniform permutation model: rank independent uniform permutations of
// {0..n-1} by Fisher-Yates. Deterministic in the seed.
PermGraph sample_uniform(int n, int rank, std::uint64_t seed);
PermGraph sample_uniform(int n, int rank, Rng& rng);

PermGraph apply_switching(const PermGraph& g, const SwitchMove& move);

// Fraction of vertices whose radius-R ball is a tree: all reduced words of
// length <= R applied to the vertex give distinct vertices.
double soficity_audit(const PermGraph& g, int radius);

// Pullback pattern of labeling x at vertex v: label at reduced word w is
// x(sigma^w v), generator permutations applied right to left. Defined even
// on non-tree neighborhoods (addresses may alias vertices).
DepthRPattern pullback_pattern(const PermGraph& g, const Labeling& x, int v, int radius);

// Empirical distribution of depth-R pullback patterns over all vertices;
// exact by integer counts.
PatternDistribution empirical_distribution(const PermGraph& g, const Labeling& x, int radius,
                                           int q);

// Vertices within graph distance `radius` of the set touched by a switching
// (edges of g, all generators and inverses). Used by the locality bound
// TV <= |B_R(touched)| / n.
std::vector<int> switching_ball(const PermGraph& g, const SwitchMove& move, int radius);

} // namespace soficlab
