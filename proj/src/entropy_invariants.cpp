#include "soficlab/entropy_invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "soficlab/errors.hpp"
#include "soficlab/parallel.hpp"

namespace soficlab {

namespace {

// theta = 1/sqrt(2r-1) squares to 1 +- a few ulps; keep the exact boundary
// on the non-violated side.
constexpr double kKsGuard = 1e-12;

double binary_entropy(double t) {
    double h = 0.0;
    if (t > 0.0) h -= t * std::log(t);
    if (t < 1.0) h -= (1.0 - t) * std::log(1.0 - t);
    return h;
}

} // namespace

double f_invariant(const MarkovChainSpec& chain) {
    require_valid(chain);
    EdgeMarginal em = edge_marginal(chain);
    double h1 = shannon_entropy(chain.marginal);
    double h2 = shannon_entropy(em.p2);
    return (1.0 - 2.0 * chain.rank) * h1 + chain.rank * h2;
}

bool kesten_stigum_violated(double theta, int rank) {
    return theta * theta * (2.0 * rank - 1.0) > 1.0 + kKsGuard;
}

ExtendedEntropy typical_entropy_ising(double theta, int rank) {
    if (kesten_stigum_violated(theta, rank)) return ExtendedEntropy::neg_infinity();
    double log2 = std::log(2.0);
    // |theta| keeps the value bit-for-bit symmetric in theta
    return ExtendedEntropy::finite(
        log2 + rank * (binary_entropy((1.0 - std::abs(theta)) / 2.0) - log2));
}

TypicalityVerdict classify_typicality(bool ks_violated, std::optional<bool> second_moment_ok) {
    TypicalityVerdict verdict;
    verdict.ks_violated = ks_violated;
    verdict.second_moment_ok = second_moment_ok;
    if (ks_violated)
        verdict.classification = Typicality::NOT_WEAKLY_TYPICAL;
    else if (second_moment_ok && *second_moment_ok)
        verdict.classification = Typicality::TYPICAL_F_VALUE;
    else
        verdict.classification = Typicality::UNRESOLVED;
    return verdict;
}

HardcoreResult hardcore_verdict(double alpha, int rank) {
    HardcoreResult out;
    out.chain = hardcore_chain(alpha, rank);  // validates alpha range
    double theta = -alpha / (1.0 - alpha);
    out.verdict = classify_typicality(kesten_stigum_violated(theta, rank), std::nullopt);
    return out;
}

std::uint64_t count_good_models(const PermGraph& g, const PatternDistribution& target,
                                double eps, int radius, std::uint64_t budget) {
    const int n = g.size();
    const int q = target.q;
    double labelings = std::pow(static_cast<double>(q), n);
    if (labelings > static_cast<double>(budget))
        throw BudgetError("count_good_models: " + std::to_string(labelings) +
                              " labelings exceed budget " + std::to_string(budget),
                          labelings);

    std::uint64_t count = 0;
    Labeling x(static_cast<std::size_t>(n), 0);
    for (;;) {
        PatternDistribution emp = empirical_distribution(g, x, radius, q);
        if (pattern_distance(emp, target) < eps) ++count;
        int pos = 0;
        while (pos < n && x[static_cast<std::size_t>(pos)] == q - 1) {
            x[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == n) break;
        ++x[static_cast<std::size_t>(pos)];
    }
    return count;
}

std::vector<GrowthPoint> annealed_growth_estimate(const MarkovChainSpec& chain, double eps,
                                                  int radius, std::span<const int> n_list,
                                                  int graph_samples, std::uint64_t seed,
                                                  std::uint64_t budget) {
    require_valid(chain);
    if (graph_samples < 1) throw ValidationError("annealed_growth_estimate: need >= 1 graph");
    PatternDistribution target = chain_marginal_pattern(chain, radius);

    std::vector<GrowthPoint> out;
    Rng root(seed);
    for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
        const int n = n_list[idx];
        // Budget check up front so the refusal happens before any work.
        double labelings = std::pow(static_cast<double>(chain.q), n);
        if (labelings > static_cast<double>(budget))
            throw BudgetError("annealed_growth_estimate: n = " + std::to_string(n) +
                                  " needs " + std::to_string(labelings) + " labelings",
                              labelings);
        Rng per_n = root.fork(idx);
        std::vector<double> counts(static_cast<std::size_t>(graph_samples), 0.0);
        parallel_for_index(graph_samples, [&](int s) {
            Rng stream = per_n.fork(static_cast<std::uint64_t>(s));
            PermGraph g = sample_uniform(n, chain.rank, stream);
            counts[static_cast<std::size_t>(s)] =
                static_cast<double>(count_good_models(g, target, eps, radius, budget));
        });
        double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / graph_samples;
        double var = 0.0;
        for (double c : counts) var += (c - mean) * (c - mean);
        var = graph_samples > 1 ? var / (graph_samples - 1) : 0.0;
        double se_mean = std::sqrt(var / graph_samples);

        GrowthPoint point;
        point.n = n;
        point.mean_count = mean;
        if (mean > 0.0) {
            point.rate = ExtendedEntropy::finite(std::log(mean) / n);
            point.rate_stderr = se_mean / (mean * n);
        } else {
            point.rate = ExtendedEntropy::neg_infinity();
            point.rate_stderr = 0.0;
        }
        out.push_back(point);
    }
    return out;
}

std::vector<std::pair<double, double>> rho_profile(const PermGraph& g,
                                                   const PatternDistribution& target,
                                                   std::span<const double> h_grid, int radius,
                                                   std::uint64_t budget) {
    const int n = g.size();
    const int q = target.q;
    double labelings = std::pow(static_cast<double>(q), n);
    if (labelings > static_cast<double>(budget))
        throw BudgetError("rho_profile: labelings exceed budget", labelings);

    // Geometric 64-point eps grid from the tail bound to the ball diameter.
    constexpr int kGridPoints = 64;
    const double lo = metric_tail_bound(g.rank(), radius);
    const double hi = pattern_ball_diameter(g.rank(), radius) * (1.0 + 1e-12);
    std::vector<double> eps_grid(kGridPoints);
    for (int k = 0; k < kGridPoints; ++k)
        eps_grid[static_cast<std::size_t>(k)] =
            lo * std::pow(hi / lo, static_cast<double>(k) / (kGridPoints - 1));

    // counts_below[k] = number of labelings with distance < eps_grid[k].
    std::vector<std::uint64_t> counts_below(kGridPoints, 0);
    Labeling x(static_cast<std::size_t>(n), 0);
    for (;;) {
        double d = pattern_distance(empirical_distribution(g, x, radius, q), target);
        auto it = std::upper_bound(eps_grid.begin(), eps_grid.end(), d);
        for (std::size_t k = static_cast<std::size_t>(it - eps_grid.begin()); k < kGridPoints; ++k)
            ++counts_below[k];
        int pos = 0;
        while (pos < n && x[static_cast<std::size_t>(pos)] == q - 1) {
            x[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == n) break;
        ++x[static_cast<std::size_t>(pos)];
    }

    const double sentinel = pattern_ball_diameter(g.rank(), radius);
    std::vector<std::pair<double, double>> profile;
    for (double h : h_grid) {
        double rho = sentinel;
        for (int k = 0; k < kGridPoints; ++k) {
            std::uint64_t c = counts_below[static_cast<std::size_t>(k)];
            if (c > 0 && std::log(static_cast<double>(c)) / n >= h) {
                rho = eps_grid[static_cast<std::size_t>(k)];
                break;
            }
        }
        profile.emplace_back(h, rho);
    }
    return profile;
}

namespace {

// upper_bound comparison above needs "distance < eps", i.e. first grid point
// strictly greater than d; upper_bound gives the first > d, which is right.

int pair_index(int q, int a, int b) { return a * q + b; }

struct JoiningConstraints {
    // Affine system A x = b over flattened lambda2 (dimension q^4):
    // total mass, first-coordinate pair projection = p2, second-coordinate
    // pair projection = p2. Symmetry and nonnegativity are handled as
    // separate projection sets.
    Mat a;
    Vec b;
    Mat normal;  // A A^T, factored on demand
    int dim = 0;

    explicit JoiningConstraints(const MarkovChainSpec& chain, const Mat& p2) {
        const int q = chain.q;
        dim = q * q * q * q;
        auto flat = [&](int u, int v) { return u * q * q + v; };
        a.push_back(Vec(static_cast<std::size_t>(dim), 1.0));
        b.push_back(1.0);
        for (int x = 0; x < q; ++x)
            for (int y = 0; y < q; ++y) {
                Vec row1(static_cast<std::size_t>(dim), 0.0);
                Vec row2(static_cast<std::size_t>(dim), 0.0);
                for (int a2 = 0; a2 < q; ++a2)
                    for (int b2 = 0; b2 < q; ++b2) {
                        row1[static_cast<std::size_t>(
                            flat(pair_index(q, x, a2), pair_index(q, y, b2)))] = 1.0;
                        row2[static_cast<std::size_t>(
                            flat(pair_index(q, a2, x), pair_index(q, b2, y)))] = 1.0;
                    }
                a.push_back(std::move(row1));
                b.push_back(p2[x][y]);
                a.push_back(std::move(row2));
                b.push_back(p2[x][y]);
            }
        normal = make_mat(a.size(), a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < a.size(); ++j) {
                double s = 0.0;
                for (int k = 0; k < dim; ++k) s += a[i][static_cast<std::size_t>(k)] *
                                                   a[j][static_cast<std::size_t>(k)];
                normal[i][j] = s;
            }
        // Ridge for redundant rows (projections share the total-mass row).
        for (std::size_t i = 0; i < normal.size(); ++i) normal[i][i] += 1e-10;
    }

    void project_affine(Vec& x) const {
        Vec residual(a.size(), 0.0);
        for (std::size_t i = 0; i < a.size(); ++i) {
            double s = -b[i];
            for (int k = 0; k < dim; ++k) s += a[i][static_cast<std::size_t>(k)] *
                                               x[static_cast<std::size_t>(k)];
            residual[i] = s;
        }
        Vec y = solve_linear(normal, residual);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (int k = 0; k < dim; ++k)
                x[static_cast<std::size_t>(k)] -= a[i][static_cast<std::size_t>(k)] * y[i];
    }

    double max_residual(const Vec& x) const {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double s = -b[i];
            for (int k = 0; k < dim; ++k) s += a[i][static_cast<std::size_t>(k)] *
                                               x[static_cast<std::size_t>(k)];
            worst = std::max(worst, std::abs(s));
        }
        return worst;
    }
};

void symmetrize(Vec& x, int qq) {
    for (int u = 0; u < qq; ++u)
        for (int v = u + 1; v < qq; ++v) {
            double m = 0.5 * (x[static_cast<std::size_t>(u * qq + v)] +
                              x[static_cast<std::size_t>(v * qq + u)]);
            x[static_cast<std::size_t>(u * qq + v)] = m;
            x[static_cast<std::size_t>(v * qq + u)] = m;
        }
}

void clip_nonnegative(Vec& x) {
    for (double& v : x)
        if (v < 0.0) v = 0.0;
}

// Dykstra-style alternating projection onto {Ax=b} ∩ {symmetric} ∩ {x>=0}.
bool project_feasible(Vec& x, const JoiningConstraints& cons, int qq, int iters = 200,
                      double tol = 1e-10) {
    for (int it = 0; it < iters; ++it) {
        cons.project_affine(x);
        symmetrize(x, qq);
        clip_nonnegative(x);
        if (cons.max_residual(x) < tol) return true;
    }
    return cons.max_residual(x) < 1e-7;
}

JoiningSpec joining_from_flat(const Vec& x, int q) {
    const int qq = q * q;
    JoiningSpec j;
    j.q = q;
    j.lambda2 = make_mat(static_cast<std::size_t>(qq), static_cast<std::size_t>(qq));
    j.lambda1.assign(static_cast<std::size_t>(qq), 0.0);
    for (int u = 0; u < qq; ++u)
        for (int v = 0; v < qq; ++v) {
            double w = std::max(0.0, x[static_cast<std::size_t>(u * qq + v)]);
            j.lambda2[u][v] = w;
            j.lambda1[static_cast<std::size_t>(u)] += w;
        }
    return j;
}

} // namespace

JoiningSpec product_joining(const MarkovChainSpec& chain) {
    const int q = chain.q;
    EdgeMarginal em = edge_marginal(chain);
    JoiningSpec j;
    j.q = q;
    const int qq = q * q;
    j.lambda1.assign(static_cast<std::size_t>(qq), 0.0);
    j.lambda2 = make_mat(static_cast<std::size_t>(qq), static_cast<std::size_t>(qq));
    for (int a = 0; a < q; ++a)
        for (int a2 = 0; a2 < q; ++a2) {
            j.lambda1[static_cast<std::size_t>(pair_index(q, a, a2))] =
                chain.marginal[a] * chain.marginal[a2];
            for (int b = 0; b < q; ++b)
                for (int b2 = 0; b2 < q; ++b2)
                    j.lambda2[pair_index(q, a, a2)][pair_index(q, b, b2)] =
                        em.p2[a][b] * em.p2[a2][b2];
        }
    return j;
}

JoiningSpec diagonal_joining(const MarkovChainSpec& chain) {
    const int q = chain.q;
    EdgeMarginal em = edge_marginal(chain);
    JoiningSpec j;
    j.q = q;
    const int qq = q * q;
    j.lambda1.assign(static_cast<std::size_t>(qq), 0.0);
    j.lambda2 = make_mat(static_cast<std::size_t>(qq), static_cast<std::size_t>(qq));
    for (int a = 0; a < q; ++a) {
        j.lambda1[static_cast<std::size_t>(pair_index(q, a, a))] = chain.marginal[a];
        for (int b = 0; b < q; ++b)
            j.lambda2[pair_index(q, a, a)][pair_index(q, b, b)] = em.p2[a][b];
    }
    return j;
}

double joining_f(const JoiningSpec& joining, int rank) {
    double h1 = shannon_entropy(joining.lambda1);
    double h2 = shannon_entropy(joining.lambda2);
    return (1.0 - 2.0 * rank) * h1 + rank * h2;
}

JoiningSearchResult second_moment_markov_search(const MarkovChainSpec& chain, int restarts,
                                                std::uint64_t seed) {
    require_valid(chain);
    const int q = chain.q;
    const int qq = q * q;
    const int dim = qq * qq;
    EdgeMarginal em = edge_marginal(chain);
    JoiningConstraints cons(chain, em.p2);

    JoiningSearchResult result;
    JoiningSpec product = product_joining(chain);
    JoiningSpec diagonal = diagonal_joining(chain);
    result.product_f = joining_f(product, chain.rank);
    result.diagonal_f = joining_f(diagonal, chain.rank);

    auto flatten = [&](const JoiningSpec& j) {
        Vec x(static_cast<std::size_t>(dim), 0.0);
        for (int u = 0; u < qq; ++u)
            for (int v = 0; v < qq; ++v) x[static_cast<std::size_t>(u * qq + v)] = j.lambda2[u][v];
        return x;
    };

    auto objective = [&](const Vec& x) { return joining_f(joining_from_flat(x, q), chain.rank); };

    auto gradient = [&](const Vec& x) {
        Vec lam1(static_cast<std::size_t>(qq), 0.0);
        for (int u = 0; u < qq; ++u)
            for (int v = 0; v < qq; ++v) lam1[static_cast<std::size_t>(u)] +=
                std::max(0.0, x[static_cast<std::size_t>(u * qq + v)]);
        Vec grad(static_cast<std::size_t>(dim), 0.0);
        const double tiny = 1e-300;
        for (int u = 0; u < qq; ++u)
            for (int v = 0; v < qq; ++v) {
                double val = std::max(tiny, x[static_cast<std::size_t>(u * qq + v)]);
                double l1 = std::max(tiny, lam1[static_cast<std::size_t>(u)]);
                grad[static_cast<std::size_t>(u * qq + v)] =
                    (1.0 - 2.0 * chain.rank) * (-(1.0 + std::log(l1))) +
                    chain.rank * (-(1.0 + std::log(val)));
            }
        // Gradient restricted to the symmetric subspace.
        symmetrize(grad, qq);
        return grad;
    };

    auto ascend = [&](Vec x) {
        double best = objective(x);
        double step = 0.05;
        for (int it = 0; it < 500; ++it) {
            Vec g = gradient(x);
            Vec trial = x;
            for (int k = 0; k < dim; ++k)
                trial[static_cast<std::size_t>(k)] += step * g[static_cast<std::size_t>(k)];
            if (!project_feasible(trial, cons, qq)) {
                step *= 0.5;
                if (step < 1e-12) break;
                continue;
            }
            double value = objective(trial);
            if (value > best + 1e-14) {
                best = value;
                x = std::move(trial);
            } else {
                step *= 0.5;
                if (step < 1e-12) break;
            }
        }
        return std::make_pair(best, x);
    };

    Vec best_x = flatten(product);
    result.best_f = result.product_f;
    auto consider = [&](double value, const Vec& x) {
        if (value > result.best_f) {
            result.best_f = value;
            best_x = x;
        }
    };

    {
        auto [value, x] = ascend(flatten(product));
        consider(value, x);
        ++result.feasible_restarts;
    }
    {
        auto [value, x] = ascend(flatten(diagonal));
        consider(value, x);
        ++result.feasible_restarts;
    }

    Rng rng(seed);
    for (int t = 0; t < restarts; ++t) {
        Rng stream = rng.fork(static_cast<std::uint64_t>(t));
        Vec x = flatten(product);
        for (double& v : x) v += 0.5 * (stream.uniform01() - 0.5) * (1.0 / dim) * 4.0;
        if (!project_feasible(x, cons, qq)) {
            ++result.failed_restarts;
            continue;
        }
        auto [value, xbest] = ascend(std::move(x));
        consider(value, xbest);
        ++result.feasible_restarts;
    }

    result.witness = joining_from_flat(best_x, q);
    result.ok = result.best_f <= 2.0 * f_invariant(chain) + 1e-6;
    return result;
}

} // namespace soficlab
