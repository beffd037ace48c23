#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "soficlab/pattern.hpp"
#include "soficlab/perm_graph.hpp"
#include "soficlab/spin.hpp"

namespace soficlab {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1ull << 24;

enum class Typicality { TYPICAL_F_VALUE, NOT_WEAKLY_TYPICAL, UNRESOLVED };

struct TypicalityVerdict {
    bool ks_violated = false;
    std::optional<bool> second_moment_ok;
    Typicality classification = Typicality::UNRESOLVED;
};

// A violated Kesten-Stigum bound forces NOT_WEAKLY_TYPICAL; otherwise a
// passed second-moment check forces TYPICAL_F_VALUE, and anything else is
// UNRESOLVED (a failed search is never proof of atypicality).
TypicalityVerdict classify_typicality(bool ks_violated, std::optional<bool> second_moment_ok);

// Markov self-joining of a chain with itself: single-site distribution over
// symbol pairs and symmetric edge distribution over pair pairs, with both
// coordinate projections matching the base chain's p1 and p2.
struct JoiningSpec {
    int q = 0;        // base alphabet size; lambda lives on q*q pair symbols
    Vec lambda1;      // length q^2
    Mat lambda2;      // (q^2) x (q^2), symmetric
};

// f = (1-2r) H(p1) + r H(p2).
double f_invariant(const MarkovChainSpec& chain);

// log 2 + r (H((1-theta)/2) - log 2) when theta^2 (2r-1) <= 1, else -inf.
// Symmetric in theta. |theta| >= 1/2 is outside the usual parametrization
// but still computed.
ExtendedEntropy typical_entropy_ising(double theta, int rank);

// Strict Kesten-Stigum condition theta^2 (2r-1) > 1, with a tiny rounding
// guard so that theta = 1/sqrt(2r-1) computed in doubles lands on the
// non-violated side.
bool kesten_stigum_violated(double theta, int rank);

struct HardcoreResult {
    TypicalityVerdict verdict;
    MarkovChainSpec chain;
};
// Classifies the hardcore chain at density alpha (0 <= alpha <= 1/2).
HardcoreResult hardcore_verdict(double alpha, int rank);

// Exact number of labelings whose depth-R empirical distribution lies within
// surrogate distance eps of the target. Refuses when q^n exceeds the budget.
std::uint64_t count_good_models(const PermGraph& g, const PatternDistribution& target,
                                double eps, int radius,
                                std::uint64_t budget = kDefaultEnumerationBudget);

struct GrowthPoint {
    int n = 0;
    ExtendedEntropy rate;     // (1/n) log(mean count); -inf when every count is 0
    double rate_stderr = 0.0; // delta-method standard error of the rate
    double mean_count = 0.0;
};

// Monte-Carlo average of count_good_models over uniform graphs at each n.
std::vector<GrowthPoint> annealed_growth_estimate(const MarkovChainSpec& chain, double eps,
                                                  int radius, std::span<const int> n_list,
                                                  int graph_samples, std::uint64_t seed,
                                                  std::uint64_t budget = kDefaultEnumerationBudget);

// For each h: smallest eps on a geometric 64-point grid (tail bound up to
// ball diameter) with (1/n) log count >= h; ball diameter sentinel when no
// grid point suffices.
std::vector<std::pair<double, double>> rho_profile(const PermGraph& g,
                                                   const PatternDistribution& target,
                                                   std::span<const double> h_grid, int radius,
                                                   std::uint64_t budget = kDefaultEnumerationBudget);

struct JoiningSearchResult {
    double best_f = 0.0;
    JoiningSpec witness;
    bool ok = false;          // best_f <= 2 f(chain) + 1e-6
    double product_f = 0.0;   // always evaluated; equals 2 f(chain)
    double diagonal_f = 0.0;
    int feasible_restarts = 0;
    int failed_restarts = 0;
};

// Maximizes f over Markov self-joinings by projected gradient ascent from
// the product and diagonal joinings plus random feasible starts.
JoiningSearchResult second_moment_markov_search(const MarkovChainSpec& chain, int restarts,
                                                std::uint64_t seed);

// Product and diagonal self-joinings, used as seeds and in tests.
JoiningSpec product_joining(const MarkovChainSpec& chain);
JoiningSpec diagonal_joining(const MarkovChainSpec& chain);
double joining_f(const JoiningSpec& joining, int rank);

} // namespace soficlab
