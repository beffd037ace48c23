#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "soficlab/linalg.hpp"

namespace soficlab {

// Finite alphabet; symbols are the indices 0..size-1.
struct Alphabet {
    explicit Alphabet(int size);
    int size;
};

// Completely homogeneous tree-indexed Markov chain: single-site marginal p1
// and row transition matrix M with M[a][b] = P(neighbor = b | site = a),
// indexed by the free group of rank `rank`. Reversibility (detailed balance)
// is required so the edge marginal is a well-defined symmetric distribution
// on undirected tree edges.
struct MarkovChainSpec {
    int q = 0;
    int rank = 0;
    Vec marginal;    // p1
    Mat transition;  // M
};

// Free-boundary Ising chain: uniform marginal, second eigenvalue theta.
MarkovChainSpec ising_chain(double theta, int rank);
// Hardcore chain at density alpha: symbol 0 = vacant, 1 = occupied;
// adjacent occupied pairs carry zero probability.
MarkovChainSpec hardcore_chain(double alpha, int rank);
MarkovChainSpec iid_chain(Vec marginal, int rank);
MarkovChainSpec iid_uniform_chain(int q, int rank);
// Chain of two independent copies, on the product alphabet (pair (a,b)
// encoded as a*q+b).
MarkovChainSpec product_chain(const MarkovChainSpec& chain);
// Relabel symbols: new symbol perm[a] plays the role of old symbol a.
MarkovChainSpec permute_symbols(const MarkovChainSpec& chain, const std::vector<int>& perm);

// Symmetric distribution on ordered symbol pairs with both marginals p1.
struct EdgeMarginal {
    int q = 0;
    Mat p2;
};

// Nearest-neighbor energy: per-site field h plus symmetric pair term J,
// both in nats.
struct Interaction {
    Vec field;
    Mat pair;
};
Interaction zero_interaction(int q);
Interaction ising_interaction(double strength);          // J(a,b) = -strength * s_a s_b
Interaction potts_interaction(int q, double strength);   // -strength if equal, +strength else

// Entropy-like value that is either finite (nats) or the distinguished
// minus-infinity; no floating sentinel.
struct ExtendedEntropy {
    static ExtendedEntropy finite(double nats) { return {true, nats}; }
    static ExtendedEntropy neg_infinity() { return {false, 0.0}; }

    bool is_finite = false;
    double nats = 0.0;
};

// H(p) = -sum p log p in nats, with 0 log 0 = 0. Entries must be nonnegative
// and sum to 1 within 1e-9.
double shannon_entropy(std::span<const double> dist);
double shannon_entropy(const Mat& dist);  // flattened

// p2[a][b] = p1[a] M[a][b], symmetrized exactly. Requires a valid chain.
EdgeMarginal edge_marginal(const MarkovChainSpec& chain);

struct SpectrumInfo {
    double value = 0.0;        // signed second eigenvalue (see below)
    bool real_spectrum = true; // false when some eigenvalue has an imaginary part
};

// Second-largest eigenvalue in absolute value of a row-stochastic matrix.
// One eigenvalue closest to 1 (the Perron root) is removed; ties in absolute
// value are broken towards positive real part. For a complex pair the signed
// magnitude is reported and real_spectrum is cleared.
SpectrumInfo second_eigenvalue_info(const Mat& m);
double second_eigenvalue(const Mat& m);

struct ChainViolation {
    std::string kind;  // "shape", "normalization", "stochasticity", "stationarity", "reversibility"
    double residual = 0.0;
};

struct ChainReport {
    bool ok = true;
    std::vector<ChainViolation> violations;
    std::string describe() const;
};

// Diagnostic: reports every violated invariant with its max residual.
// Normalization sums use tolerance 1e-12; stationarity and reversibility
// use 1e-9.
ChainReport validate_chain(const MarkovChainSpec& chain);
// Throws ValidationError with the report text when the chain is invalid.
void require_valid(const MarkovChainSpec& chain);

// 2 (2/(5r))^R: upper bound on the metric distance between two labelings of
// the tree that agree on the radius-R ball.
double metric_tail_bound(int rank, int radius);
// D_r = sum over group elements of (5 r^2)^{-|w|}; diameter-scale constant
// of the metric, by geometric series.
double metric_total_weight(int rank);

} // namespace soficlab
