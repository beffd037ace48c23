#include "soficlab/gibbs_tree.hpp"

#include <algorithm>
#include <cmath>

#include "soficlab/entropy_invariants.hpp"
#include "soficlab/errors.hpp"

namespace soficlab {

namespace {

constexpr double kResidualTol = 1e-10;

// Ordered chain with the boosted coordinate moved to `color`.
MarkovChainSpec ordered_component(int q, int rank, double strength, int color) {
    auto laws = solve_boundary_laws(q, rank, strength);
    const BoundaryLaw* ordered = nullptr;
    for (const auto& law : laws)
        if (law.kind == LawKind::ORDERED) ordered = &law;
    if (!ordered)
        throw ValidationError("predict_local_limit: no ordered boundary law at J = " +
                              std::to_string(strength));
    MarkovChainSpec chain = chain_from_boundary_law(ordered->ell, q, rank, strength);
    if (color == 0) return chain;
    std::vector<int> perm(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::swap(perm[0], perm[static_cast<std::size_t>(color)]);
    return permute_symbols(chain, perm);
}

// [ell Q]_i for the transfer matrix with a fixed one-coordinate ansatz done
// generically: works for any positive ell.
Vec ell_q_product(const Vec& ell, int q, double strength) {
    double e_plus = std::exp(strength);
    double e_minus = std::exp(-strength);
    double total = 0.0;
    for (double v : ell) total += v;
    Vec out(static_cast<std::size_t>(q), 0.0);
    for (int i = 0; i < q; ++i)
        out[static_cast<std::size_t>(i)] = ell[static_cast<std::size_t>(i)] * e_plus +
                                           (total - ell[static_cast<std::size_t>(i)]) * e_minus;
    return out;
}

// Scalar fixed-point map for the one-coordinate ansatz (ell_0 = L, rest 1):
// g(L) = ((L e^J + (q-1) e^{-J}) / (L e^{-J} + e^J + (q-2) e^{-J}))^{2r-1}.
double ansatz_map(double L, int q, int rank, double strength) {
    double e_plus = std::exp(strength);
    double e_minus = std::exp(-strength);
    double num = L * e_plus + (q - 1) * e_minus;
    double den = L * e_minus + e_plus + (q - 2) * e_minus;
    return std::pow(num / den, 2.0 * rank - 1.0);
}

double ansatz_map_derivative(double L, int q, int rank, double strength) {
    double e_plus = std::exp(strength);
    double e_minus = std::exp(-strength);
    double num = L * e_plus + (q - 1) * e_minus;
    double den = L * e_minus + e_plus + (q - 2) * e_minus;
    double ratio = num / den;
    double ratio_prime = (e_plus * den - num * e_minus) / (den * den);
    return (2.0 * rank - 1.0) * std::pow(ratio, 2.0 * rank - 2.0) * ratio_prime;
}

// Newton polish of a bisection root of g(L) = L; large roots need it to push
// the absolute residual to rounding level.
double polish_root(double L, int q, int rank, double strength) {
    for (int it = 0; it < 50; ++it) {
        double f = ansatz_map(L, q, rank, strength) - L;
        double fp = ansatz_map_derivative(L, q, rank, strength) - 1.0;
        if (std::abs(fp) < 1e-300) break;
        double next = L - f / fp;
        if (!(next > 0.0) || !std::isfinite(next)) break;
        if (std::abs(next - L) <= 1e-16 * std::abs(L)) {
            L = next;
            break;
        }
        L = next;
    }
    return L;
}

} // namespace

TransferMatrix transfer_matrix(int q, double strength) {
    if (q < 2) throw ValidationError("transfer_matrix: q must be >= 2");
    TransferMatrix t;
    t.q = q;
    t.strength = strength;
    t.matrix = make_mat(static_cast<std::size_t>(q), static_cast<std::size_t>(q),
                        std::exp(-strength));
    for (int i = 0; i < q; ++i) t.matrix[i][i] = std::exp(strength);
    return t;
}

Vec boundary_law_residual(const Vec& ell, int q, int rank, double strength) {
    if (ell.size() != static_cast<std::size_t>(q))
        throw ValidationError("boundary_law_residual: ell has wrong length");
    for (double v : ell)
        if (!(v > 0.0)) throw ValidationError("boundary_law_residual: ell must be positive");
    Vec lq = ell_q_product(ell, q, strength);
    Vec res(static_cast<std::size_t>(q), 0.0);
    for (int i = 0; i < q; ++i)
        res[static_cast<std::size_t>(i)] =
            ell[static_cast<std::size_t>(i)] -
            std::pow(lq[static_cast<std::size_t>(i)] / lq[static_cast<std::size_t>(q - 1)],
                     2.0 * rank - 1.0);
    return res;
}

std::vector<BoundaryLaw> solve_boundary_laws(int q, int rank, double strength,
                                             std::vector<std::string>* diagnostics) {
    if (q < 2) throw ValidationError("solve_boundary_laws: q must be >= 2");
    if (rank < 2) throw ValidationError("solve_boundary_laws: rank must be >= 2");

    std::vector<BoundaryLaw> laws;
    laws.push_back({Vec(static_cast<std::size_t>(q), 1.0), LawKind::DISORDERED, -1});

    // Sign-change scan of g(L) - L over log L in [-20, 20].
    constexpr int kScanPoints = 4096;
    constexpr double kLogLo = -20.0, kLogHi = 20.0;
    auto f = [&](double logL) {
        double L = std::exp(logL);
        return ansatz_map(L, q, rank, strength) - L;
    };
    std::vector<double> roots;
    double prev_t = kLogLo;
    double prev_f = f(prev_t);
    for (int k = 1; k < kScanPoints; ++k) {
        double t = kLogLo + (kLogHi - kLogLo) * k / (kScanPoints - 1);
        double ft = f(t);
        if (prev_f == 0.0) roots.push_back(std::exp(prev_t));
        if (prev_f * ft < 0.0) {
            double a = prev_t, b = t, fa = prev_f;
            for (int it = 0; it < 200; ++it) {
                double m = 0.5 * (a + b);
                double fm = f(m);
                if (fa * fm <= 0.0)
                    b = m;
                else {
                    a = m;
                    fa = fm;
                }
                if (b - a < 1e-13) break;
            }
            roots.push_back(polish_root(std::exp(0.5 * (a + b)), q, rank, strength));
        }
        prev_t = t;
        prev_f = ft;
    }

    // Drop the trivial root at 1, sort remaining descending so the greatest
    // extra root becomes the ordered state.
    std::vector<double> extra;
    for (double L : roots)
        if (std::abs(L - 1.0) > 1e-9) extra.push_back(L);
    std::sort(extra.begin(), extra.end(), std::greater<double>());

    bool ordered_assigned = false;
    for (double L : extra) {
        Vec ell(static_cast<std::size_t>(q), 1.0);
        ell[0] = L;
        Vec res = boundary_law_residual(ell, q, rank, strength);
        double worst = 0.0;
        for (double v : res) worst = std::max(worst, std::abs(v));
        if (worst >= kResidualTol) {
            if (diagnostics)
                diagnostics->push_back("ansatz root " + std::to_string(L) +
                                       " rejected: residual " + std::to_string(worst));
            continue;
        }
        BoundaryLaw law;
        law.ell = std::move(ell);
        if (!ordered_assigned && L > 1.0) {
            law.kind = LawKind::ORDERED;
            law.boosted_index = 0;
            ordered_assigned = true;
        } else {
            law.kind = LawKind::OTHER;
            law.boosted_index = 0;
        }
        laws.push_back(std::move(law));
    }
    return laws;
}

MarkovChainSpec chain_from_boundary_law(const Vec& ell, int q, int rank, double strength) {
    if (ell.size() != static_cast<std::size_t>(q))
        throw ValidationError("chain_from_boundary_law: ell has wrong length");
    for (double v : ell)
        if (!(v > 0.0)) throw ValidationError("chain_from_boundary_law: ell must be positive");

    TransferMatrix t = transfer_matrix(q, strength);
    Mat beta = make_mat(static_cast<std::size_t>(q), static_cast<std::size_t>(q));
    double z_beta = 0.0;
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
            beta[i][j] = ell[static_cast<std::size_t>(i)] * t.matrix[i][j] *
                         ell[static_cast<std::size_t>(j)];
            z_beta += beta[i][j];
        }
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) beta[i][j] /= z_beta;

    // Single-site marginal from the edge marginal; exactly stationary and
    // reversible by construction.
    Vec alpha(static_cast<std::size_t>(q), 0.0);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) alpha[static_cast<std::size_t>(i)] += beta[i][j];

    // Gibbs check: the same marginal must come out of ell^p.
    double p = 2.0 * rank / (2.0 * rank - 1.0);
    Vec alpha_law(static_cast<std::size_t>(q), 0.0);
    double z_alpha = 0.0;
    for (int i = 0; i < q; ++i) {
        alpha_law[static_cast<std::size_t>(i)] = std::pow(ell[static_cast<std::size_t>(i)], p);
        z_alpha += alpha_law[static_cast<std::size_t>(i)];
    }
    double mismatch = 0.0;
    for (int i = 0; i < q; ++i)
        mismatch = std::max(mismatch, std::abs(alpha[static_cast<std::size_t>(i)] -
                                               alpha_law[static_cast<std::size_t>(i)] / z_alpha));
    if (mismatch > 1e-8)
        throw ValidationError("chain_from_boundary_law: law is not Gibbs (marginal mismatch " +
                              std::to_string(mismatch) + ")");

    MarkovChainSpec chain;
    chain.q = q;
    chain.rank = rank;
    chain.marginal = alpha;
    chain.transition = make_mat(static_cast<std::size_t>(q), static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
            chain.transition[i][j] = beta[i][j] / alpha[static_cast<std::size_t>(i)];
    return chain;
}

double phi(const Vec& ell, int q, int rank, double strength) {
    for (double v : ell)
        if (!(v > 0.0)) throw ValidationError("phi: ell must be positive");
    TransferMatrix t = transfer_matrix(q, strength);
    double quad = 0.0;
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
            quad += ell[static_cast<std::size_t>(i)] * t.matrix[i][j] *
                    ell[static_cast<std::size_t>(j)];
    double p = 2.0 * rank / (2.0 * rank - 1.0);
    double norm_p = 0.0;
    for (double v : ell) norm_p += std::pow(v, p);
    return rank * std::log(quad / std::pow(norm_p, 2.0 / p));
}

double energy_per_site(const MarkovChainSpec& chain, const Interaction& interaction, int rank) {
    if (interaction.field.size() != static_cast<std::size_t>(chain.q) ||
        interaction.pair.size() != static_cast<std::size_t>(chain.q))
        throw ValidationError("energy_per_site: interaction size mismatch");
    for (int a = 0; a < chain.q; ++a)
        for (int b = 0; b < chain.q; ++b)
            if (std::abs(interaction.pair[a][b] - interaction.pair[b][a]) > 1e-12)
                throw ValidationError("energy_per_site: pair term must be symmetric");
    EdgeMarginal em = edge_marginal(chain);
    double u = 0.0;
    for (int a = 0; a < chain.q; ++a) u += chain.marginal[a] * interaction.field[a];
    double pair_term = 0.0;
    for (int a = 0; a < chain.q; ++a)
        for (int b = 0; b < chain.q; ++b) pair_term += em.p2[a][b] * interaction.pair[a][b];
    return u + rank * pair_term;
}

double pressure_f(const MarkovChainSpec& chain, const Interaction& interaction, int rank) {
    return f_invariant(chain) - energy_per_site(chain, interaction, rank);
}

Thresholds thresholds(int q, int rank) {
    if (q < 2) throw ValidationError("thresholds: q must be >= 2");
    if (rank < 2) throw ValidationError("thresholds: rank must be >= 2");
    Thresholds t;
    if (q >= 3)
        t.j_p = 0.5 * std::log((q - 2.0) /
                               (std::pow(q - 1.0, 1.0 - 1.0 / rank) - 1.0));
    if (q == 2) t.j_u = 0.5 * std::log(static_cast<double>(rank) / (rank - 1.0));
    t.tail_bound = 0.5 * std::log(1.0 + static_cast<double>(q) / (2.0 * rank - 2.0));
    return t;
}

double tv_columns(int q, double strength) {
    if (strength < 0.0) throw ValidationError("tv_columns: J must be >= 0");
    double e2 = std::exp(2.0 * strength);
    return (e2 - 1.0) / (e2 + q - 1.0);
}

LocalLimitPrediction predict_local_limit(int q, int rank, double strength) {
    if (q < 2 || rank < 2)
        throw ValidationError("predict_local_limit: need q >= 2 and rank >= 2");
    LocalLimitPrediction out;
    Thresholds t = thresholds(q, rank);

    if (q >= 3) {
        if (strength < 0.0) {
            out.regime = LimitRegime::UNSUPPORTED;
            out.note = "antiferromagnetic Potts is not covered";
            return out;
        }
        double jp = *t.j_p;
        if (std::abs(strength - jp) <= 1e-12 * std::max(1.0, std::abs(jp))) {
            out.regime = LimitRegime::CRITICAL_UNRESOLVED;
            out.note = "at J_p the limit is supported on the disordered state and the "
                       "symmetric ordered mixture; weights unknown";
            out.components.push_back(
                chain_from_boundary_law(Vec(static_cast<std::size_t>(q), 1.0), q, rank, strength));
            for (int c = 0; c < q; ++c) out.components.push_back(ordered_component(q, rank, strength, c));
            return out;
        }
        if (strength < jp) {
            out.regime = LimitRegime::DISORDERED;
            out.components.push_back(
                chain_from_boundary_law(Vec(static_cast<std::size_t>(q), 1.0), q, rank, strength));
            out.weights = {1.0};
            return out;
        }
        out.regime = LimitRegime::ORDERED_MIXTURE;
        for (int c = 0; c < q; ++c) {
            out.components.push_back(ordered_component(q, rank, strength, c));
            out.weights.push_back(1.0 / q);
        }
        return out;
    }

    // q == 2: Ising.
    MarkovChainSpec disordered =
        chain_from_boundary_law(Vec(2, 1.0), q, rank, strength);
    if (strength < 0.0) {
        out.regime = LimitRegime::DISORDERED;
        out.components.push_back(disordered);
        out.weights = {1.0};
        out.af_reconstruction_regime =
            kesten_stigum_violated(std::tanh(strength), rank);
        out.note = out.af_reconstruction_regime
                       ? "reconstruction regime: the chain is not weakly typical and the "
                         "limit claim does not apply"
                       : "antiferromagnetic uniqueness regime";
        return out;
    }
    if (strength <= *t.j_u) {
        out.regime = LimitRegime::UNIQUE;
        out.components.push_back(disordered);
        out.weights = {1.0};
        return out;
    }
    out.regime = LimitRegime::ORDERED_MIXTURE;
    for (int c = 0; c < 2; ++c) {
        out.components.push_back(ordered_component(2, rank, strength, c));
        out.weights.push_back(0.5);
    }
    return out;
}

const char* to_string(LimitRegime regime) {
    switch (regime) {
        case LimitRegime::UNIQUE: return "UNIQUE";
        case LimitRegime::DISORDERED: return "DISORDERED";
        case LimitRegime::ORDERED_MIXTURE: return "ORDERED_MIXTURE";
        case LimitRegime::CRITICAL_UNRESOLVED: return "CRITICAL_UNRESOLVED";
        case LimitRegime::UNSUPPORTED: return "UNSUPPORTED";
    }
    return "UNSUPPORTED";
}

const char* to_string(LawKind kind) {
    switch (kind) {
        case LawKind::DISORDERED: return "DISORDERED";
        case LawKind::ORDERED: return "ORDERED";
        case LawKind::OTHER: return "OTHER";
    }
    return "OTHER";
}

} // namespace soficlab
