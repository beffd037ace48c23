#pragma once

#include <optional>
#include <string>
#include <vector>

#include "soficlab/spin.hpp"

namespace soficlab {

// Potts/Ising transfer matrix: e^J on the diagonal, e^{-J} off it.
struct TransferMatrix {
    int q = 0;
    double strength = 0.0;
    Mat matrix;
};
TransferMatrix transfer_matrix(int q, double strength);

enum class LawKind { DISORDERED, ORDERED, OTHER };

// Positive boundary-law vector, normalized to last entry 1. ORDERED laws
// boost a single coordinate (boosted_index); the q-1 symbol-permuted copies
// are implied.
struct BoundaryLaw {
    Vec ell;
    LawKind kind = LawKind::OTHER;
    int boosted_index = -1;
};

// Componentwise residual ell_i - ([ell Q]_i / [ell Q]_q)^{2r-1}.
Vec boundary_law_residual(const Vec& ell, int q, int rank, double strength);

// Fixed points on the one-coordinate ansatz (ell_i = ell*, others 1):
// always contains ell = 1; the greatest extra root is ORDERED, remaining
// roots OTHER. Roots found by a sign-change scan over log ell* in [-20, 20]
// (4096 points) plus bisection; every returned law has residual < 1e-10,
// otherwise it is omitted with a diagnostic.
std::vector<BoundaryLaw> solve_boundary_laws(int q, int rank, double strength,
                                             std::vector<std::string>* diagnostics = nullptr);

// Markov chain of the boundary law: edge marginal proportional to
// diag(ell) Q diag(ell); single-site marginal must also match ell^p / Z with
// p = 2r/(2r-1), else the law is not Gibbs and an error is thrown.
MarkovChainSpec chain_from_boundary_law(const Vec& ell, int q, int rank, double strength);

// Phi(ell) = r log( ell Q ell^T / ||ell||_p^2 ), p = 2r/(2r-1).
double phi(const Vec& ell, int q, int rank, double strength);

// u = sum_a p1[a] h[a] + r sum_{a,b} p2[a][b] J[a][b].
double energy_per_site(const MarkovChainSpec& chain, const Interaction& interaction, int rank);

// pressure = f - u.
double pressure_f(const MarkovChainSpec& chain, const Interaction& interaction, int rank);

struct Thresholds {
    std::optional<double> j_p;      // ordered-disordered crossing; q >= 3 only
    std::optional<double> j_u;      // Ising uniqueness; q = 2 only
    double tail_bound = 0.0;        // disordered state tail-trivial below this
};
Thresholds thresholds(int q, int rank);

// Max total-variation distance between columns of the normalized disordered
// transition matrix: (e^{2J} - 1) / (e^{2J} + q - 1).
double tv_columns(int q, double strength);

enum class LimitRegime { UNIQUE, DISORDERED, ORDERED_MIXTURE, CRITICAL_UNRESOLVED, UNSUPPORTED };

struct LocalLimitPrediction {
    LimitRegime regime = LimitRegime::UNSUPPORTED;
    std::vector<MarkovChainSpec> components;
    std::vector<double> weights;   // empty for CRITICAL_UNRESOLVED and UNSUPPORTED
    // q = 2, J < 0 only: the limit claim holds only below the reconstruction
    // threshold; set when theta^2 (2r-1) > 1.
    bool af_reconstruction_regime = false;
    std::string note;
};

// Predicted typical local limit of the finitary Gibbs states: ferromagnetic
// Potts (q >= 3, J > 0) around J_p, Ising (q = 2) around J_u, and
// antiferromagnetic Ising (q = 2, J < 0). Everything else is UNSUPPORTED.
LocalLimitPrediction predict_local_limit(int q, int rank, double strength);

const char* to_string(LimitRegime regime);
const char* to_string(LawKind kind);

} // namespace soficlab
