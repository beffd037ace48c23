#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "soficlab/gibbs_tree.hpp"
#include "soficlab/pattern.hpp"
#include "soficlab/perm_graph.hpp"
#include "soficlab/rng.hpp"
#include "soficlab/spin.hpp"

namespace soficlab {

enum class InitKind { RANDOM, CONSTANT, FROM_CHAIN };

struct SimConfig {
    int sweeps = 0;
    int burn_in = 0;
    int replicas = 1;
    int thin = 1;
    InitKind init = InitKind::RANDOM;
    int constant_symbol = 0;   // CONSTANT: symbol for replica 0; replica k starts
                               // at (constant_symbol + k) mod q when cycle_init
    bool cycle_init = false;   // CONSTANT only: rotate the start symbol per replica
    Vec init_marginal;         // FROM_CHAIN: site-iid draws from this marginal
    std::uint64_t seed = 0;
};

// One heat-bath pass over all vertices in a seeded random order. Each site
// is resampled from its exact conditional under the finitary Gibbs state:
// P(a) proportional to exp(-h(a) - sum over incident generator edges of the
// pair energy), neighbors counted with multiplicity; a generator self-loop
// contributes J(a, a) once.
void glauber_sweep(const PermGraph& g, const Interaction& interaction, int q, Labeling& state,
                   Rng& rng);

// Conditional weights used by the heat-bath update, exposed for exactness
// tests against enumerated Boltzmann laws.
Vec heat_bath_weights(const PermGraph& g, const Interaction& interaction, int q,
                      const Labeling& state, int v);

struct GibbsSamples {
    int q = 0;
    std::vector<std::vector<Labeling>> per_replica;
    std::size_t sample_count() const;
};

// Independent replicas with forked RNG streams; keeps every thin-th sweep
// after burn-in. Deterministic in config.seed.
GibbsSamples sample_gibbs(const PermGraph& g, const Interaction& interaction, int q,
                          const SimConfig& config);

// Exact sample from chain_marginal_pattern(chain, radius): root from p1,
// edges outward from M.
DepthRPattern broadcast_tree_sample(const MarkovChainSpec& chain, int radius, Rng& rng);

struct PairCorrelation {
    int m = 0;
    double estimate = 0.0;
    double stderr_value = 0.0;
    std::uint64_t samples = 0;
};

// Monte-Carlo estimate of E[f(z_0) f(z_m)] along a length-m path, where f is
// the second left eigenvector normalized to mean 0 and variance 1 under p1;
// expected value is theta^m. Chains with a complex second eigenpair are
// refused. m = 0 returns 1 exactly (the normalization identity).
PairCorrelation pair_correlation(const MarkovChainSpec& chain, int m, std::uint64_t samples,
                                 Rng& rng);

struct AveragingNormInfo {
    double value = 0.0;
    int iterations = 0;
    bool converged = true;
    double last_rayleigh = 0.0;
    bool connected = true;
};

// Operator norm of the distance-m word-averaging operator restricted to the
// complement of the constant vector, by power iteration (3 restarts,
// convergence when successive Rayleigh quotients differ by < 1e-9). The
// operator averages x(sigma^w v) over all reduced words of length m.
AveragingNormInfo averaging_norm_info(const PermGraph& g, int m, int max_iters, Rng& rng);
double averaging_norm(const PermGraph& g, int m, int max_iters, Rng& rng);

// Power iteration from an explicit start vector; used by invariance tests.
AveragingNormInfo averaging_norm_from_start(const PermGraph& g, int m, int max_iters,
                                            std::span<const double> start);

struct SampleClass {
    int replica = 0;
    int dominant = -1;       // -1 when unclassified
    double top_fraction = 0.0;
    double margin = 0.0;     // dominant minus runner-up frequency
};

struct LocalStatsReport {
    int q = 0;
    int radius = 0;
    Mat per_vertex;                      // n x q symbol marginals
    Vec pooled_depth0;                   // overall symbol frequencies
    PatternDistribution pooled_patterns; // depth-R pooled empirical distribution
    std::vector<SampleClass> per_sample;
    Mat per_replica_class_fractions;     // replica x (q+1); last = unclassified
    Mat conditional_depth0;              // q x q; row c = depth-0 stats of class-c samples
    std::vector<std::uint64_t> class_sample_counts;  // size q+1; last = unclassified
};

// A sample is classified to its dominant color when that color leads the
// runner-up by at least 5 percentage points.
inline constexpr double kDominantMargin = 0.05;

LocalStatsReport local_stats(const PermGraph& g, const GibbsSamples& samples, int radius);

enum class VerdictStatus { PASS, FAIL, SKIPPED };

struct LimitVerdict {
    VerdictStatus status = VerdictStatus::SKIPPED;
    double tol = 0.0;
    std::vector<std::pair<std::string, double>> distances;
    std::string detail;
};

// UNIQUE / DISORDERED: TV(pooled depth-R patterns, predicted chain marginal)
// < tol. ORDERED_MIXTURE: conditional depth-0 stats per dominant-color class
// vs the matching component at tol, class frequencies vs mixture weights at
// 3 tol. CRITICAL_UNRESOLVED is SKIPPED by design; UNSUPPORTED is an error.
LimitVerdict local_limit_verdict(const LocalStatsReport& report,
                                 const LocalLimitPrediction& prediction, double tol);

const char* to_string(VerdictStatus status);
const char* to_string(InitKind kind);

} // namespace soficlab
