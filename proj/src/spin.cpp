#include "soficlab/spin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "soficlab/errors.hpp"

namespace soficlab {

namespace {

constexpr double kNormTol = 1e-12;   // probability mass sums
constexpr double kBalanceTol = 1e-9; // stationarity / reversibility residuals

void check_shape(const MarkovChainSpec& chain, std::vector<ChainViolation>* out) {
    bool bad = chain.q < 1 || chain.rank < 2 ||
               chain.marginal.size() != static_cast<std::size_t>(chain.q) ||
               chain.transition.size() != static_cast<std::size_t>(chain.q);
    if (!bad)
        for (const auto& row : chain.transition)
            if (row.size() != static_cast<std::size_t>(chain.q)) bad = true;
    if (bad) out->push_back({"shape", 0.0});
}

} // namespace

Alphabet::Alphabet(int size_) : size(size_) {
    if (size < 1) throw ValidationError("alphabet size must be >= 1");
}

double shannon_entropy(std::span<const double> dist) {
    double sum = 0.0;
    for (double p : dist) {
        if (p < -1e-15) throw ValidationError("shannon_entropy: negative entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError("shannon_entropy: entries sum to " + std::to_string(sum));
    double h = 0.0;
    for (double p : dist)
        if (p > 0.0) h -= p * std::log(p);
    if (h < 0.0 && h > -1e-9) h = 0.0;
    return h;
}

double shannon_entropy(const Mat& dist) {
    Vec flat;
    for (const auto& row : dist) flat.insert(flat.end(), row.begin(), row.end());
    return shannon_entropy(flat);
}

MarkovChainSpec ising_chain(double theta, int rank) {
    MarkovChainSpec c;
    c.q = 2;
    c.rank = rank;
    c.marginal = {0.5, 0.5};
    double agree = (1.0 + theta) / 2.0;
    double differ = (1.0 - theta) / 2.0;
    c.transition = {{agree, differ}, {differ, agree}};
    return c;
}

MarkovChainSpec hardcore_chain(double alpha, int rank) {
    if (alpha < 0.0 || alpha > 0.5)
        throw ValidationError("hardcore_chain: alpha must lie in [0, 1/2]");
    MarkovChainSpec c;
    c.q = 2;
    c.rank = rank;
    c.marginal = {1.0 - alpha, alpha};
    if (alpha == 0.0) {
        c.transition = {{1.0, 0.0}, {1.0, 0.0}};
    } else {
        c.transition = {{(1.0 - 2.0 * alpha) / (1.0 - alpha), alpha / (1.0 - alpha)},
                        {1.0, 0.0}};
    }
    return c;
}

MarkovChainSpec iid_chain(Vec marginal, int rank) {
    MarkovChainSpec c;
    c.q = static_cast<int>(marginal.size());
    c.rank = rank;
    c.transition = Mat(marginal.size(), marginal);
    c.marginal = std::move(marginal);
    return c;
}

MarkovChainSpec iid_uniform_chain(int q, int rank) {
    return iid_chain(Vec(static_cast<std::size_t>(q), 1.0 / q), rank);
}

MarkovChainSpec product_chain(const MarkovChainSpec& chain) {
    const int q = chain.q;
    MarkovChainSpec c;
    c.q = q * q;
    c.rank = chain.rank;
    c.marginal.resize(static_cast<std::size_t>(q) * q);
    c.transition = make_mat(static_cast<std::size_t>(q) * q, static_cast<std::size_t>(q) * q);
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) {
            c.marginal[a * q + b] = chain.marginal[a] * chain.marginal[b];
            for (int a2 = 0; a2 < q; ++a2)
                for (int b2 = 0; b2 < q; ++b2)
                    c.transition[a * q + b][a2 * q + b2] =
                        chain.transition[a][a2] * chain.transition[b][b2];
        }
    return c;
}

MarkovChainSpec permute_symbols(const MarkovChainSpec& chain, const std::vector<int>& perm) {
    if (perm.size() != static_cast<std::size_t>(chain.q))
        throw ValidationError("permute_symbols: permutation size mismatch");
    MarkovChainSpec c;
    c.q = chain.q;
    c.rank = chain.rank;
    c.marginal.assign(chain.marginal.size(), 0.0);
    c.transition = make_mat(chain.marginal.size(), chain.marginal.size());
    for (int a = 0; a < chain.q; ++a) {
        c.marginal[perm[a]] = chain.marginal[a];
        for (int b = 0; b < chain.q; ++b)
            c.transition[perm[a]][perm[b]] = chain.transition[a][b];
    }
    return c;
}

Interaction zero_interaction(int q) {
    return {Vec(static_cast<std::size_t>(q), 0.0),
            make_mat(static_cast<std::size_t>(q), static_cast<std::size_t>(q), 0.0)};
}

Interaction ising_interaction(double strength) {
    // spins s_0 = +1, s_1 = -1
    Interaction u = zero_interaction(2);
    u.pair = {{-strength, strength}, {strength, -strength}};
    return u;
}

Interaction potts_interaction(int q, double strength) {
    Interaction u = zero_interaction(q);
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) u.pair[a][b] = (a == b) ? -strength : strength;
    return u;
}

EdgeMarginal edge_marginal(const MarkovChainSpec& chain) {
    require_valid(chain);
    EdgeMarginal em;
    em.q = chain.q;
    em.p2 = make_mat(chain.marginal.size(), chain.marginal.size());
    for (int a = 0; a < chain.q; ++a)
        for (int b = 0; b < chain.q; ++b) {
            double ab = chain.marginal[a] * chain.transition[a][b];
            double ba = chain.marginal[b] * chain.transition[b][a];
            em.p2[a][b] = 0.5 * (ab + ba);
        }
    return em;
}

SpectrumInfo second_eigenvalue_info(const Mat& m) {
    const std::size_t n = m.size();
    if (n == 0) throw ValidationError("second_eigenvalue: empty matrix");
    for (const auto& row : m) {
        if (row.size() != n) throw ValidationError("second_eigenvalue: matrix must be square");
        double sum = 0.0;
        for (double x : row) {
            if (x < -1e-12) throw ValidationError("second_eigenvalue: negative entry");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ValidationError("second_eigenvalue: row sums to " + std::to_string(sum));
    }
    if (n == 1) return {0.0, true};

    auto eig = eigenvalues_small(m);
    bool real_spectrum = true;
    for (const auto& z : eig)
        if (z.imag() != 0.0) real_spectrum = false;

    // Remove one copy of the Perron root.
    std::size_t perron = 0;
    for (std::size_t i = 1; i < eig.size(); ++i)
        if (std::abs(eig[i] - 1.0) < std::abs(eig[perron] - 1.0)) perron = i;
    eig.erase(eig.begin() + static_cast<std::ptrdiff_t>(perron));

    std::size_t best = 0;
    for (std::size_t i = 1; i < eig.size(); ++i) {
        double di = std::abs(eig[i]), db = std::abs(eig[best]);
        if (di > db + 1e-12 || (std::abs(di - db) <= 1e-12 && eig[i].real() > eig[best].real()))
            best = i;
    }
    const auto& z = eig[best];
    double value = (z.imag() == 0.0) ? z.real()
                                     : (z.real() >= 0.0 ? std::abs(z) : -std::abs(z));
    return {value, real_spectrum};
}

double second_eigenvalue(const Mat& m) { return second_eigenvalue_info(m).value; }

std::string ChainReport::describe() const {
    if (ok) return "ok";
    std::ostringstream os;
    os << "invalid chain:";
    for (const auto& v : violations) os << " " << v.kind << "(residual " << v.residual << ")";
    return os.str();
}

ChainReport validate_chain(const MarkovChainSpec& chain) {
    ChainReport report;
    check_shape(chain, &report.violations);
    if (!report.violations.empty()) {
        report.ok = false;
        return report;
    }
    const int q = chain.q;

    double norm_res = 0.0;
    double sum = 0.0;
    for (double p : chain.marginal) {
        if (p < 0.0) norm_res = std::max(norm_res, -p);
        sum += p;
    }
    norm_res = std::max(norm_res, std::abs(sum - 1.0));
    if (norm_res > kNormTol) report.violations.push_back({"normalization", norm_res});

    double stoch_res = 0.0;
    for (int a = 0; a < q; ++a) {
        double row = 0.0;
        for (double x : chain.transition[a]) {
            if (x < 0.0) stoch_res = std::max(stoch_res, -x);
            row += x;
        }
        stoch_res = std::max(stoch_res, std::abs(row - 1.0));
    }
    if (stoch_res > kNormTol) report.violations.push_back({"stochasticity", stoch_res});

    double stat_res = 0.0;
    for (int b = 0; b < q; ++b) {
        double acc = 0.0;
        for (int a = 0; a < q; ++a) acc += chain.marginal[a] * chain.transition[a][b];
        stat_res = std::max(stat_res, std::abs(acc - chain.marginal[b]));
    }
    if (stat_res > kBalanceTol) report.violations.push_back({"stationarity", stat_res});

    double rev_res = 0.0;
    for (int a = 0; a < q; ++a)
        for (int b = a + 1; b < q; ++b)
            rev_res = std::max(rev_res, std::abs(chain.marginal[a] * chain.transition[a][b] -
                                                 chain.marginal[b] * chain.transition[b][a]));
    if (rev_res > kBalanceTol) report.violations.push_back({"reversibility", rev_res});

    report.ok = report.violations.empty();
    return report;
}

void require_valid(const MarkovChainSpec& chain) {
    ChainReport report = validate_chain(chain);
    if (!report.ok) throw ValidationError(report.describe());
}

double metric_tail_bound(int rank, int radius) {
    if (rank < 2) throw ValidationError("metric_tail_bound: rank must be >= 2");
    if (radius < 0) throw ValidationError("metric_tail_bound: radius must be >= 0");
    return 2.0 * std::pow(2.0 / (5.0 * rank), radius);
}

double metric_total_weight(int rank) {
    if (rank < 2) throw ValidationError("metric_total_weight: rank must be >= 2");
    // 1 + sum_{l>=1} 2r (2r-1)^{l-1} (5 r^2)^{-l}
    double x = (2.0 * rank - 1.0) / (5.0 * rank * rank);
    return 1.0 + (2.0 / (5.0 * rank)) / (1.0 - x);
}

} // namespace soficlab
