#include <doctest.h>

#include <cmath>

#include "soficlab/errors.hpp"
#include "soficlab/pattern.hpp"
#include "soficlab/rng.hpp"

using namespace soficlab;

TEST_CASE("word table sizes and levels") {
    // rank 2: levels 1, 4, 12, 36 ...
    const WordTable& t = WordTable::get(2, 3);
    CHECK(t.size() == 1 + 4 + 12 + 36);
    CHECK(t.level_begin(1) == 1);
    CHECK(t.level_begin(2) == 5);
    CHECK(t.level_begin(3) == 17);
    // every word of level l has a parent of level l-1 and no immediate
    // cancellation
    for (int w = 1; w < t.size(); ++w) {
        CHECK(t.length(w) == t.length(t.parent(w)) + 1);
        if (t.parent(w) != 0)
            CHECK(t.first_letter(t.parent(w)) != inverse_letter(t.first_letter(w), 2));
    }
}

TEST_CASE("word table radius prefix property") {
    const WordTable& small = WordTable::get(2, 1);
    const WordTable& big = WordTable::get(2, 2);
    for (int w = 0; w < small.size(); ++w) {
        CHECK(small.parent(w) == big.parent(w));
        CHECK(small.first_letter(w) == big.first_letter(w));
    }
}

TEST_CASE("word append reduces correctly") {
    const WordTable& t = WordTable::get(2, 2);
    // s1 . s1^{-1} = identity
    int s1 = t.child(0, 0);
    CHECK(t.append(s1, inverse_letter(0, 2)) == 0);
    // s1 . s2 has length 2
    int w = t.append(s1, 1);
    CHECK(t.length(w) == 2);
    CHECK(t.first_letter(w) == 0);
}

TEST_CASE("chain_marginal_pattern at radius 0 is p1") {
    MarkovChainSpec chain = ising_chain(0.3, 2);
    PatternDistribution dist = chain_marginal_pattern(chain, 0);
    CHECK(dist.weights.size() == 2);
    for (const auto& [key, w] : dist.weights) CHECK(w == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("chain_marginal_pattern radius 1 product form") {
    double theta = 0.4;
    MarkovChainSpec chain = ising_chain(theta, 2);
    PatternDistribution dist = chain_marginal_pattern(chain, 1);
    CHECK(dist.weights.size() == 32);
    std::string all_plus(5, '\0');
    double expect = 0.5 * std::pow((1.0 + theta) / 2.0, 4);
    CHECK(dist.weights.at(all_plus) == doctest::Approx(expect).epsilon(1e-13));
    double mass = 0.0;
    for (const auto& [key, w] : dist.weights) mass += w;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chain_marginal_pattern of iid uniform is the product measure") {
    MarkovChainSpec chain = iid_uniform_chain(3, 2);
    PatternDistribution dist = chain_marginal_pattern(chain, 1);
    double cell = std::pow(3.0, -5);
    CHECK(dist.weights.size() == 243);
    for (const auto& [key, w] : dist.weights) CHECK(w == doctest::Approx(cell).epsilon(1e-13));
}

TEST_CASE("pattern_tv and pattern_distance basics") {
    MarkovChainSpec chain = ising_chain(0.2, 2);
    PatternDistribution p = chain_marginal_pattern(chain, 1);
    // identical distributions: distance is exactly the tail bound
    CHECK(pattern_tv(p, p) == 0.0);
    CHECK(pattern_distance(p, p) == doctest::Approx(metric_tail_bound(2, 1)).epsilon(1e-15));
    // disjointly supported distributions: TV = 1
    PatternDistribution a, b;
    a.rank = b.rank = 2;
    a.radius = b.radius = 0;
    a.q = b.q = 2;
    a.weights[std::string(1, '\0')] = 1.0;
    b.weights[std::string(1, '\x01')] = 1.0;
    CHECK(pattern_tv(a, b) == 1.0);
    CHECK(pattern_distance(a, b) ==
          doctest::Approx(metric_total_weight(2) + metric_tail_bound(2, 0)).epsilon(1e-15));
}

TEST_CASE("pattern_tv rejects shape mismatches") {
    MarkovChainSpec chain = ising_chain(0.2, 2);
    PatternDistribution p0 = chain_marginal_pattern(chain, 0);
    PatternDistribution p1 = chain_marginal_pattern(chain, 1);
    CHECK_THROWS_AS(pattern_tv(p0, p1), ValidationError);
}

TEST_CASE("truncate and shift agree with direct construction") {
    MarkovChainSpec chain = ising_chain(0.25, 2);
    Rng rng(40);
    // A depth-2 pattern truncated to depth 1 keeps the first 5 labels.
    const WordTable& t2 = WordTable::get(2, 2);
    DepthRPattern pat;
    pat.rank = 2;
    pat.radius = 2;
    pat.labels.resize(t2.size());
    for (auto& l : pat.labels) l = static_cast<std::uint8_t>(rng.below(2));
    DepthRPattern cut = truncate_pattern(pat, 1);
    CHECK(cut.labels.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(cut.labels[i] == pat.labels[i]);
    // shift root: the shifted pattern's root is the old label at the letter
    for (int g = 0; g < 4; ++g) {
        DepthRPattern moved = shift_pattern(pat, g);
        CHECK(moved.radius == 1);
        CHECK(moved.labels[0] == pat.labels[t2.child(0, g)]);
    }
}

TEST_CASE("chain_marginal_pattern refuses astronomical pattern spaces") {
    MarkovChainSpec chain = iid_uniform_chain(3, 2);
    CHECK_THROWS_AS(chain_marginal_pattern(chain, 2), BudgetError);
}
