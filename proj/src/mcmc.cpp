#include "soficlab/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "soficlab/errors.hpp"
#include "soficlab/parallel.hpp"

namespace soficlab {

Vec heat_bath_weights(const PermGraph& g, const Interaction& interaction, int q,
                      const Labeling& state, int v) {
    Vec energy(static_cast<std::size_t>(q), 0.0);
    for (int a = 0; a < q; ++a) energy[static_cast<std::size_t>(a)] = interaction.field[a];
    for (int k = 0; k < g.rank(); ++k) {
        int out = g.image(k, v);
        if (out == v) {
            // Generator self-loop: one edge (v, v).
            for (int a = 0; a < q; ++a) energy[static_cast<std::size_t>(a)] += interaction.pair[a][a];
            continue;
        }
        int in = g.inverse_image(k, v);
        for (int a = 0; a < q; ++a)
            energy[static_cast<std::size_t>(a)] +=
                interaction.pair[a][state[static_cast<std::size_t>(out)]] +
                interaction.pair[state[static_cast<std::size_t>(in)]][a];
    }
    double lowest = *std::min_element(energy.begin(), energy.end());
    Vec w(static_cast<std::size_t>(q), 0.0);
    for (int a = 0; a < q; ++a) w[static_cast<std::size_t>(a)] =
        std::exp(-(energy[static_cast<std::size_t>(a)] - lowest));
    return w;
}

void glauber_sweep(const PermGraph& g, const Interaction& interaction, int q, Labeling& state,
                   Rng& rng) {
    if (state.size() != static_cast<std::size_t>(g.size()))
        throw ValidationError("glauber_sweep: state size mismatch");
    const int n = g.size();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    for (int v : order) {
        Vec w = heat_bath_weights(g, interaction, q, state, v);
        state[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(rng.categorical(w));
    }
}

std::size_t GibbsSamples::sample_count() const {
    std::size_t total = 0;
    for (const auto& r : per_replica) total += r.size();
    return total;
}

GibbsSamples sample_gibbs(const PermGraph& g, const Interaction& interaction, int q,
                          const SimConfig& config) {
    if (config.sweeps < config.burn_in || config.burn_in < 0)
        throw ValidationError("sample_gibbs: need sweeps >= burn_in >= 0");
    if (config.replicas < 1) throw ValidationError("sample_gibbs: need replicas >= 1");
    if (config.thin < 1) throw ValidationError("sample_gibbs: need thin >= 1");
    if (config.init == InitKind::FROM_CHAIN &&
        config.init_marginal.size() != static_cast<std::size_t>(q))
        throw ValidationError("sample_gibbs: FROM_CHAIN needs an init marginal of length q");

    GibbsSamples samples;
    samples.q = q;
    samples.per_replica.resize(static_cast<std::size_t>(config.replicas));
    Rng root(config.seed);

    parallel_for_index(config.replicas, [&](int rep) {
        Rng rng = root.fork(static_cast<std::uint64_t>(rep));
        Labeling state(static_cast<std::size_t>(g.size()), 0);
        switch (config.init) {
            case InitKind::RANDOM:
                for (auto& s : state) s = static_cast<std::uint8_t>(rng.below(q));
                break;
            case InitKind::CONSTANT: {
                int symbol = config.constant_symbol;
                if (config.cycle_init) symbol = (symbol + rep) % q;
                std::fill(state.begin(), state.end(), static_cast<std::uint8_t>(symbol));
                break;
            }
            case InitKind::FROM_CHAIN:
                for (auto& s : state)
                    s = static_cast<std::uint8_t>(rng.categorical(config.init_marginal));
                break;
        }
        auto& kept = samples.per_replica[static_cast<std::size_t>(rep)];
        for (int sweep = 1; sweep <= config.sweeps; ++sweep) {
            glauber_sweep(g, interaction, q, state, rng);
            if (sweep > config.burn_in && (sweep - config.burn_in) % config.thin == 0)
                kept.push_back(state);
        }
    });
    return samples;
}

DepthRPattern broadcast_tree_sample(const MarkovChainSpec& chain, int radius, Rng& rng) {
    const WordTable& table = WordTable::get(chain.rank, radius);
    DepthRPattern pat;
    pat.rank = chain.rank;
    pat.radius = radius;
    pat.labels.resize(static_cast<std::size_t>(table.size()));
    pat.labels[0] = static_cast<std::uint8_t>(rng.categorical(chain.marginal));
    for (int w = 1; w < table.size(); ++w) {
        int from = pat.labels[static_cast<std::size_t>(table.parent(w))];
        pat.labels[static_cast<std::size_t>(w)] =
            static_cast<std::uint8_t>(rng.categorical(chain.transition[from]));
    }
    return pat;
}

PairCorrelation pair_correlation(const MarkovChainSpec& chain, int m, std::uint64_t samples,
                                 Rng& rng) {
    require_valid(chain);
    if (m < 0) throw ValidationError("pair_correlation: m must be >= 0");
    if (samples < 2) throw ValidationError("pair_correlation: need at least 2 samples");

    SpectrumInfo spec = second_eigenvalue_info(chain.transition);
    if (!spec.real_spectrum)
        throw ValidationError("pair_correlation: complex second eigenpair refused");

    // Support restriction so degenerate symbols with zero mass drop out.
    std::vector<int> support;
    for (int a = 0; a < chain.q; ++a)
        if (chain.marginal[a] > 1e-15) support.push_back(a);
    const int s = static_cast<int>(support.size());
    if (s < 2)
        throw ValidationError("pair_correlation: chain support is degenerate");

    // Reversible chains symmetrize: S = D^{1/2} M D^{-1/2}; eigenvectors of S
    // give right eigenvectors of M via f = D^{-1/2} v, orthogonal to p1.
    Mat sym = make_mat(static_cast<std::size_t>(s), static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
            sym[i][j] = std::sqrt(chain.marginal[support[static_cast<std::size_t>(i)]] /
                                  chain.marginal[support[static_cast<std::size_t>(j)]]) *
                        chain.transition[support[static_cast<std::size_t>(i)]]
                                        [support[static_cast<std::size_t>(j)]];
    SymEigen eig = jacobi_eigen(sym);
    int pick = -1;
    double best = 1e300;
    for (int k = 0; k < s; ++k) {
        double d = std::abs(eig.values[static_cast<std::size_t>(k)] - spec.value);
        if (d < best) {
            best = d;
            pick = k;
        }
    }
    if (pick < 0 || best > 1e-6)
        throw ValidationError("pair_correlation: could not isolate the second eigenpair");

    Vec f(static_cast<std::size_t>(chain.q), 0.0);
    for (int i = 0; i < s; ++i)
        f[static_cast<std::size_t>(support[static_cast<std::size_t>(i)])] =
            eig.vectors[i][pick] /
            std::sqrt(chain.marginal[support[static_cast<std::size_t>(i)]]);
    // Normalize: mean 0 (up to rounding), variance 1 under p1.
    double mean = 0.0, var = 0.0;
    for (int a = 0; a < chain.q; ++a) mean += chain.marginal[a] * f[static_cast<std::size_t>(a)];
    for (int a = 0; a < chain.q; ++a) {
        double c = f[static_cast<std::size_t>(a)];
        var += chain.marginal[a] * c * c;
    }
    if (std::abs(mean) > 1e-8 || var < 1e-30)
        throw ValidationError("pair_correlation: eigenvector not orthogonal to the marginal");
    double scale = 1.0 / std::sqrt(var);
    for (auto& c : f) c *= scale;

    PairCorrelation out;
    out.m = m;
    out.samples = samples;
    if (m == 0) {
        out.estimate = 1.0;  // E f^2 = 1 by the variance normalization
        out.stderr_value = 0.0;
        return out;
    }

    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t t = 0; t < samples; ++t) {
        int z = static_cast<int>(rng.categorical(chain.marginal));
        double f0 = f[static_cast<std::size_t>(z)];
        for (int step = 0; step < m; ++step)
            z = static_cast<int>(rng.categorical(chain.transition[z]));
        double w = f0 * f[static_cast<std::size_t>(z)];
        sum += w;
        sum_sq += w * w;
    }
    double n = static_cast<double>(samples);
    out.estimate = sum / n;
    double var_w = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    out.stderr_value = std::sqrt(var_w / n);
    return out;
}

namespace {

// y = T_1 x with (T_1 x)(v) = sum over the 2r letters of x(sigma^letter v).
void apply_letter_sum(const PermGraph& g, const Vec& x, Vec& y) {
    const int n = g.size();
    std::fill(y.begin(), y.end(), 0.0);
    for (int letter = 0; letter < 2 * g.rank(); ++letter)
        for (int v = 0; v < n; ++v)
            y[static_cast<std::size_t>(v)] += x[static_cast<std::size_t>(g.apply_letter(letter, v))];
}

// A_m x by the word recursion U_1 = T_1, U_2 = T_1 U_1 - 2r I,
// U_{k} = T_1 U_{k-1} - (2r-1) U_{k-2}, then divide by |S_m|.
void apply_word_average(const PermGraph& g, int m, const Vec& x, Vec& out, Vec& scratch_a,
                        Vec& scratch_b) {
    const int two_r = 2 * g.rank();
    if (m == 0) {
        out = x;
        return;
    }
    Vec& prev = scratch_a;  // U_{k-1} x
    Vec& prev2 = scratch_b; // U_{k-2} x
    prev2 = x;
    apply_letter_sum(g, x, prev);
    for (int k = 2; k <= m; ++k) {
        apply_letter_sum(g, prev, out);
        double c = (k == 2) ? static_cast<double>(two_r) : static_cast<double>(two_r - 1);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * prev2[i];
        prev2 = prev;
        prev = out;
    }
    if (m == 1) out = prev;
    double words = static_cast<double>(two_r) * std::pow(two_r - 1.0, m - 1);
    for (auto& v : out) v /= words;
}

void project_out_constant(Vec& x) {
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    for (auto& v : x) v -= mean;
}

double norm2(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

bool graph_connected(const PermGraph& g) {
    std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int letter = 0; letter < 2 * g.rank(); ++letter) {
            int u = g.apply_letter(letter, v);
            if (!seen[static_cast<std::size_t>(u)]) {
                seen[static_cast<std::size_t>(u)] = 1;
                ++visited;
                stack.push_back(u);
            }
        }
    }
    return visited == g.size();
}

AveragingNormInfo power_iteration(const PermGraph& g, int m, int max_iters, Vec x) {
    AveragingNormInfo info;
    info.connected = graph_connected(g);
    if (m == 0) {
        info.value = 1.0;  // identity operator on the complement of constants
        info.last_rayleigh = 1.0;
        return info;
    }
    const std::size_t n = static_cast<std::size_t>(g.size());
    Vec y(n, 0.0), sa(n, 0.0), sb(n, 0.0);
    project_out_constant(x);
    double nx = norm2(x);
    if (nx == 0.0) {
        x[0] = 1.0;
        project_out_constant(x);
        nx = norm2(x);
    }
    for (auto& v : x) v /= nx;

    double prev_rq = -1.0;
    info.converged = false;
    for (int it = 1; it <= max_iters; ++it) {
        apply_word_average(g, m, x, y, sa, sb);
        project_out_constant(y);
        double ny = norm2(y);
        info.iterations = it;
        if (ny == 0.0) {
            info.value = 0.0;
            info.converged = true;
            return info;
        }
        double rq = ny;  // ||A x|| / ||x|| with ||x|| = 1
        info.last_rayleigh = rq;
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
        if (prev_rq >= 0.0 && std::abs(rq - prev_rq) < 1e-9) {
            info.converged = true;
            info.value = rq;
            return info;
        }
        prev_rq = rq;
    }
    info.value = prev_rq;
    return info;
}

} // namespace

AveragingNormInfo averaging_norm_from_start(const PermGraph& g, int m, int max_iters,
                                            std::span<const double> start) {
    if (start.size() != static_cast<std::size_t>(g.size()))
        throw ValidationError("averaging_norm_from_start: start vector size mismatch");
    return power_iteration(g, m, max_iters, Vec(start.begin(), start.end()));
}

AveragingNormInfo averaging_norm_info(const PermGraph& g, int m, int max_iters, Rng& rng) {
    if (m < 0) throw ValidationError("averaging_norm: m must be >= 0");
    AveragingNormInfo best;
    for (int restart = 0; restart < 3; ++restart) {
        Vec x(static_cast<std::size_t>(g.size()), 0.0);
        for (auto& v : x) v = rng.uniform01() - 0.5;
        AveragingNormInfo info = power_iteration(g, m, max_iters, std::move(x));
        if (restart == 0 || info.value > best.value) best = info;
        if (m == 0) break;
    }
    return best;
}

double averaging_norm(const PermGraph& g, int m, int max_iters, Rng& rng) {
    return averaging_norm_info(g, m, max_iters, rng).value;
}

LocalStatsReport local_stats(const PermGraph& g, const GibbsSamples& samples, int radius) {
    if (samples.sample_count() == 0) throw ValidationError("local_stats: no samples");
    const int n = g.size();
    const int q = samples.q;

    LocalStatsReport report;
    report.q = q;
    report.radius = radius;

    // Integer site counts keep the pooled/per-vertex identity exact.
    std::vector<std::vector<std::uint64_t>> counts(
        static_cast<std::size_t>(n), std::vector<std::uint64_t>(static_cast<std::size_t>(q), 0));
    PatternDistribution pooled;
    pooled.rank = g.rank();
    pooled.radius = radius;
    pooled.q = q;

    std::uint64_t total_samples = 0;
    for (std::size_t rep = 0; rep < samples.per_replica.size(); ++rep) {
        for (const auto& x : samples.per_replica[rep]) {
            if (x.size() != static_cast<std::size_t>(n))
                throw ValidationError("local_stats: sample size mismatch");
            ++total_samples;
            for (int v = 0; v < n; ++v) ++counts[static_cast<std::size_t>(v)][x[static_cast<std::size_t>(v)]];
            PatternDistribution emp = empirical_distribution(g, x, radius, q);
            for (const auto& [key, c] : emp.counts) pooled.counts[key] += c;
        }
    }
    pooled.total = total_samples * static_cast<std::uint64_t>(n);
    for (const auto& [key, c] : pooled.counts)
        pooled.weights[key] = static_cast<double>(c) / static_cast<double>(pooled.total);
    report.pooled_patterns = std::move(pooled);

    report.per_vertex = make_mat(static_cast<std::size_t>(n), static_cast<std::size_t>(q));
    report.pooled_depth0.assign(static_cast<std::size_t>(q), 0.0);
    std::vector<std::uint64_t> symbol_totals(static_cast<std::size_t>(q), 0);
    for (int v = 0; v < n; ++v)
        for (int a = 0; a < q; ++a) {
            report.per_vertex[v][a] = static_cast<double>(counts[static_cast<std::size_t>(v)][static_cast<std::size_t>(a)]) /
                                      static_cast<double>(total_samples);
            symbol_totals[static_cast<std::size_t>(a)] += counts[static_cast<std::size_t>(v)][static_cast<std::size_t>(a)];
        }
    for (int a = 0; a < q; ++a)
        report.pooled_depth0[static_cast<std::size_t>(a)] =
            static_cast<double>(symbol_totals[static_cast<std::size_t>(a)]) /
            (static_cast<double>(total_samples) * n);

    report.per_replica_class_fractions =
        make_mat(samples.per_replica.size(), static_cast<std::size_t>(q) + 1);
    report.conditional_depth0 = make_mat(static_cast<std::size_t>(q), static_cast<std::size_t>(q));
    report.class_sample_counts.assign(static_cast<std::size_t>(q) + 1, 0);
    for (std::size_t rep = 0; rep < samples.per_replica.size(); ++rep) {
        for (const auto& x : samples.per_replica[rep]) {
            Vec freq(static_cast<std::size_t>(q), 0.0);
            for (auto s : x) freq[s] += 1.0 / n;
            int top = 0;
            for (int a = 1; a < q; ++a)
                if (freq[static_cast<std::size_t>(a)] > freq[static_cast<std::size_t>(top)]) top = a;
            double runner = 0.0;
            for (int a = 0; a < q; ++a)
                if (a != top) runner = std::max(runner, freq[static_cast<std::size_t>(a)]);
            SampleClass sc;
            sc.replica = static_cast<int>(rep);
            sc.top_fraction = freq[static_cast<std::size_t>(top)];
            sc.margin = freq[static_cast<std::size_t>(top)] - runner;
            sc.dominant = sc.margin >= kDominantMargin ? top : -1;
            report.per_sample.push_back(sc);
            std::size_t column = sc.dominant >= 0 ? static_cast<std::size_t>(sc.dominant)
                                                  : static_cast<std::size_t>(q);
            report.per_replica_class_fractions[rep][column] +=
                1.0 / static_cast<double>(samples.per_replica[rep].size());
            ++report.class_sample_counts[column];
            if (sc.dominant >= 0)
                for (int a = 0; a < q; ++a)
                    report.conditional_depth0[static_cast<std::size_t>(sc.dominant)]
                                             [static_cast<std::size_t>(a)] +=
                        freq[static_cast<std::size_t>(a)];
        }
    }
    for (int c = 0; c < q; ++c) {
        std::uint64_t members = report.class_sample_counts[static_cast<std::size_t>(c)];
        if (members > 0)
            for (int a = 0; a < q; ++a)
                report.conditional_depth0[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)] /=
                    static_cast<double>(members);
    }
    return report;
}

LimitVerdict local_limit_verdict(const LocalStatsReport& report,
                                 const LocalLimitPrediction& prediction, double tol) {
    if (prediction.regime == LimitRegime::UNSUPPORTED)
        throw ValidationError("local_limit_verdict: prediction is UNSUPPORTED");
    LimitVerdict verdict;
    verdict.tol = tol;
    if (prediction.regime == LimitRegime::CRITICAL_UNRESOLVED) {
        verdict.status = VerdictStatus::SKIPPED;
        verdict.detail = "critical point: mixture weights are not predicted";
        return verdict;
    }

    if (prediction.regime == LimitRegime::UNIQUE || prediction.regime == LimitRegime::DISORDERED) {
        PatternDistribution target =
            chain_marginal_pattern(prediction.components.at(0), report.radius);
        double tv = pattern_tv(report.pooled_patterns, target);
        verdict.distances.emplace_back("pooled_pattern_tv", tv);
        verdict.status = tv < tol ? VerdictStatus::PASS : VerdictStatus::FAIL;
        verdict.detail = "pooled depth-" + std::to_string(report.radius) +
                         " empirical vs predicted chain marginal";
        return verdict;
    }

    // ORDERED_MIXTURE: classify samples by dominant color.
    const int q = report.q;
    double total = static_cast<double>(report.per_sample.size());
    bool ok = true;

    for (int c = 0; c < q; ++c) {
        double want = prediction.weights.at(static_cast<std::size_t>(c));
        double got = static_cast<double>(report.class_sample_counts.at(static_cast<std::size_t>(c))) / total;
        verdict.distances.emplace_back("class_" + std::to_string(c) + "_frequency_gap",
                                       std::abs(got - want));
        if (std::abs(got - want) > 3.0 * tol) ok = false;
    }
    verdict.distances.emplace_back(
        "unclassified_fraction",
        static_cast<double>(report.class_sample_counts.at(static_cast<std::size_t>(q))) / total);

    // Conditional depth-0 marginals per occupied class against the matching
    // ordered component.
    for (int c = 0; c < q; ++c) {
        if (report.class_sample_counts.at(static_cast<std::size_t>(c)) == 0) continue;
        const Vec& got = report.conditional_depth0.at(static_cast<std::size_t>(c));
        const Vec& want = prediction.components.at(static_cast<std::size_t>(c)).marginal;
        double tv = 0.0;
        for (int a = 0; a < q; ++a)
            tv += std::abs(got[static_cast<std::size_t>(a)] - want[static_cast<std::size_t>(a)]);
        tv /= 2.0;
        verdict.distances.emplace_back("class_" + std::to_string(c) + "_depth0_tv", tv);
        if (tv >= tol) ok = false;
    }
    verdict.status = ok ? VerdictStatus::PASS : VerdictStatus::FAIL;
    verdict.detail = "dominant-color classes vs ordered components";
    return verdict;
}

const char* to_string(VerdictStatus status) {
    switch (status) {
        case VerdictStatus::PASS: return "PASS";
        case VerdictStatus::FAIL: return "FAIL";
        case VerdictStatus::SKIPPED: return "SKIPPED";
    }
    return "SKIPPED";
}

const char* to_string(InitKind kind) {
    switch (kind) {
        case InitKind::RANDOM: return "RANDOM";
        case InitKind::CONSTANT: return "CONSTANT";
        case InitKind::FROM_CHAIN: return "FROM_CHAIN";
    }
    return "RANDOM";
}

} // namespace soficlab
