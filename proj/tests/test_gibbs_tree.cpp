#include <doctest.h>

#include <cmath>

#include "soficlab/entropy_invariants.hpp"
#include "soficlab/errors.hpp"
#include "soficlab/gibbs_tree.hpp"
#include "soficlab/rng.hpp"

using namespace soficlab;

TEST_CASE("transfer_matrix layout") {
    TransferMatrix t = transfer_matrix(3, 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(t.matrix[i][j] == 1.0);

    TransferMatrix ising = transfer_matrix(2, 0.7);
    CHECK(ising.matrix[0][0] == doctest::Approx(std::exp(0.7)));
    CHECK(ising.matrix[0][1] == doctest::Approx(std::exp(-0.7)));
    CHECK(ising.matrix[0][1] == ising.matrix[1][0]);
    // 2x2 eigenvalues e^J +- e^{-J}
    double tr = ising.matrix[0][0] + ising.matrix[1][1];
    double det = ising.matrix[0][0] * ising.matrix[1][1] - ising.matrix[0][1] * ising.matrix[1][0];
    double disc = std::sqrt(tr * tr / 4.0 - det);
    CHECK(tr / 2.0 + disc == doctest::Approx(std::exp(0.7) + std::exp(-0.7)).epsilon(1e-12));
    CHECK(tr / 2.0 - disc == doctest::Approx(std::exp(0.7) - std::exp(-0.7)).epsilon(1e-12));

    CHECK_THROWS_AS(transfer_matrix(1, 0.5), ValidationError);
}

TEST_CASE("boundary_law_residual vanishes exactly at the flat law") {
    for (double strength : {0.05, 0.3, 0.7}) {
        Vec res = boundary_law_residual(Vec(3, 1.0), 3, 2, strength);
        for (double v : res) CHECK(v == 0.0);
    }
    Vec off = boundary_law_residual(Vec{2.0, 1.0, 1.0}, 3, 2, 0.3);
    CHECK(std::abs(off[0]) > 1e-3);
    CHECK_THROWS_AS(boundary_law_residual(Vec{0.0, 1.0, 1.0}, 3, 2, 0.3), ValidationError);
}

TEST_CASE("solve_boundary_laws finds the ordered root above the spinodal") {
    // q=3, r=2, J=0.6: ordered root near 23.99, plus the lower branch.
    auto laws = solve_boundary_laws(3, 2, 0.6);
    REQUIRE(laws.size() >= 2);
    CHECK(laws[0].kind == LawKind::DISORDERED);
    const BoundaryLaw* ordered = nullptr;
    for (const auto& law : laws)
        if (law.kind == LawKind::ORDERED) ordered = &law;
    REQUIRE(ordered != nullptr);
    CHECK(ordered->ell[0] == doctest::Approx(23.990630442260397).epsilon(1e-6));
    CHECK(ordered->ell[1] == 1.0);
    CHECK(ordered->ell[2] == 1.0);
    for (const auto& law : laws) {
        Vec res = boundary_law_residual(law.ell, 3, 2, 0.6);
        for (double v : res) CHECK(std::abs(v) < 1e-10);
    }

    auto laws66 = solve_boundary_laws(3, 2, 0.66);
    const BoundaryLaw* ordered66 = nullptr;
    for (const auto& law : laws66)
        if (law.kind == LawKind::ORDERED) ordered66 = &law;
    REQUIRE(ordered66 != nullptr);
    CHECK(ordered66->ell[0] == doctest::Approx(38.61509345731211).epsilon(1e-6));
}

TEST_CASE("solve_boundary_laws scan certificate below the spinodal") {
    auto laws = solve_boundary_laws(3, 2, 0.05);
    CHECK(laws.size() == 1);
    CHECK(laws[0].kind == LawKind::DISORDERED);
    // antiferromagnetic Ising: the flat law is the only ansatz fixed point
    auto af = solve_boundary_laws(2, 2, -0.5);
    CHECK(af.size() == 1);
}

TEST_CASE("chain_from_boundary_law flat law") {
    // q=3: transition is Q with columns normalized.
    double strength = 0.4;
    MarkovChainSpec chain = chain_from_boundary_law(Vec(3, 1.0), 3, 2, strength);
    double z = std::exp(strength) + 2.0 * std::exp(-strength);
    CHECK(chain.transition[0][0] == doctest::Approx(std::exp(strength) / z).epsilon(1e-12));
    CHECK(chain.transition[0][1] == doctest::Approx(std::exp(-strength) / z).epsilon(1e-12));
    CHECK(validate_chain(chain).ok);
    for (double m : chain.marginal) CHECK(m == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // q=2: free-boundary Ising with theta = tanh(J).
    MarkovChainSpec ising = chain_from_boundary_law(Vec(2, 1.0), 2, 2, strength);
    CHECK(second_eigenvalue(ising.transition) ==
          doctest::Approx(std::tanh(strength)).epsilon(1e-12));
}

TEST_CASE("chain_from_boundary_law rejects non-Gibbs laws") {
    CHECK_THROWS_AS(chain_from_boundary_law(Vec{5.0, 1.0, 1.0}, 3, 2, 0.3), ValidationError);
}

TEST_CASE("chains from solved laws are valid and consistent") {
    for (double strength : {0.44069, 0.6}) {
        auto laws = solve_boundary_laws(3, 2, strength);
        for (const auto& law : laws) {
            MarkovChainSpec chain = chain_from_boundary_law(law.ell, 3, 2, strength);
            CHECK(validate_chain(chain).ok);
            // marginal agrees with ell^p / Z to 1e-10
            double p = 4.0 / 3.0;
            double z = 0.0;
            for (double v : law.ell) z += std::pow(v, p);
            for (int i = 0; i < 3; ++i)
                CHECK(chain.marginal[i] ==
                      doctest::Approx(std::pow(law.ell[i], p) / z).epsilon(1e-10));
        }
    }
}

TEST_CASE("phi scale invariance and closed form at the flat law") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        int q = 2 + static_cast<int>(rng.below(3));
        Vec ell(q);
        for (auto& v : ell) v = 0.2 + 2.0 * rng.uniform01();
        double strength = rng.uniform01();
        double c = 0.1 + 3.0 * rng.uniform01();
        Vec scaled = ell;
        for (auto& v : scaled) v *= c;
        CHECK(phi(scaled, q, 2, strength) ==
              doctest::Approx(phi(ell, q, 2, strength)).epsilon(1e-12));
    }
    // phi(1) = r log(q^{1-2/p} (e^J + (q-1) e^{-J}))
    for (int q : {2, 3, 4}) {
        for (int rank : {2, 3}) {
            double strength = 0.37;
            double p = 2.0 * rank / (2.0 * rank - 1.0);
            double closed = rank * std::log(std::pow(q, 1.0 - 2.0 / p) *
                                            (std::exp(strength) + (q - 1) * std::exp(-strength)));
            CHECK(phi(Vec(q, 1.0), q, rank, strength) == doctest::Approx(closed).epsilon(1e-12));
        }
    }
}

TEST_CASE("energy_per_site identities") {
    // zero interaction: zero energy
    MarkovChainSpec chain = ising_chain(0.3, 2);
    CHECK(energy_per_site(chain, zero_interaction(2), 2) == 0.0);

    // theta = 0 Ising: pair expectation vanishes
    CHECK(energy_per_site(ising_chain(0.0, 2), ising_interaction(0.8), 2) ==
          doctest::Approx(0.0).epsilon(1e-14));

    // Potts identity: u = r sum beta_ij (-log q_ij)
    double strength = 0.5;
    MarkovChainSpec potts = chain_from_boundary_law(Vec(3, 1.0), 3, 2, strength);
    TransferMatrix t = transfer_matrix(3, strength);
    EdgeMarginal em = edge_marginal(potts);
    double direct = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) direct += em.p2[i][j] * (-std::log(t.matrix[i][j]));
    direct *= 2.0;
    CHECK(energy_per_site(potts, potts_interaction(3, strength), 2) ==
          doctest::Approx(direct).epsilon(1e-12));

    Interaction lopsided = potts_interaction(3, 0.4);
    lopsided.pair[0][1] = 9.0;  // asymmetric
    CHECK_THROWS_AS(energy_per_site(potts, lopsided, 2), ValidationError);
}

TEST_CASE("pressure equals f at zero interaction and matches the closed form") {
    MarkovChainSpec chain = ising_chain(0.25, 2);
    CHECK(pressure_f(chain, zero_interaction(2), 2) ==
          doctest::Approx(f_invariant(chain)).epsilon(1e-13));

    // (1-2r) log Z_alpha + r log Z_beta for solved Gibbs laws
    for (double strength : {0.2, 0.6}) {
        auto laws = solve_boundary_laws(3, 2, strength);
        for (const auto& law : laws) {
            MarkovChainSpec c = chain_from_boundary_law(law.ell, 3, 2, strength);
            double p = 4.0 / 3.0;
            double z_alpha = 0.0;
            for (double v : law.ell) z_alpha += std::pow(v, p);
            TransferMatrix t = transfer_matrix(3, strength);
            double z_beta = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) z_beta += law.ell[i] * t.matrix[i][j] * law.ell[j];
            double closed = (1.0 - 4.0) * std::log(z_alpha) + 2.0 * std::log(z_beta);
            CHECK(pressure_f(c, potts_interaction(3, strength), 2) ==
                  doctest::Approx(closed).epsilon(1e-10));
        }
    }
}

TEST_CASE("phi equals pressure for every solved law") {
    for (double strength : {0.2, 0.44069, 0.6}) {
        auto laws = solve_boundary_laws(3, 2, strength);
        Interaction u = potts_interaction(3, strength);
        for (const auto& law : laws) {
            MarkovChainSpec chain = chain_from_boundary_law(law.ell, 3, 2, strength);
            CHECK(std::abs(pressure_f(chain, u, 2) - phi(law.ell, 3, 2, strength)) < 1e-8);
        }
    }
}

TEST_CASE("thresholds closed forms") {
    Thresholds t32 = thresholds(3, 2);
    REQUIRE(t32.j_p.has_value());
    CHECK_FALSE(t32.j_u.has_value());
    CHECK(*t32.j_p == doctest::Approx(0.4406867935097714).epsilon(1e-12));
    CHECK(t32.tail_bound == doctest::Approx(0.45814536593707755).epsilon(1e-12));
    CHECK(*t32.j_p <= t32.tail_bound);

    Thresholds t22 = thresholds(2, 2);
    REQUIRE(t22.j_u.has_value());
    CHECK_FALSE(t22.j_p.has_value());
    CHECK(*t22.j_u == doctest::Approx(0.34657359027997264).epsilon(1e-12));

    CHECK(*thresholds(3, 3).j_p == doctest::Approx(0.26602373466510965).epsilon(1e-12));
    CHECK(*thresholds(4, 2).j_p == doctest::Approx(0.5025262693711906).epsilon(1e-12));
}

TEST_CASE("tv_columns values and threshold equivalence") {
    CHECK(tv_columns(3, 0.0) == 0.0);
    CHECK(tv_columns(3, 0.45814536593707755) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    // tv < 1/(2r-1) iff J < tail_bound
    for (int q : {2, 3, 4}) {
        for (int rank : {2, 3}) {
            double bound = thresholds(q, rank).tail_bound;
            for (double strength : {0.01, 0.2, 0.4, 0.6, 0.9}) {
                bool tv_small = tv_columns(q, strength) < 1.0 / (2.0 * rank - 1.0);
                CHECK(tv_small == (strength < bound));
            }
        }
    }
    CHECK_THROWS_AS(tv_columns(3, -0.1), ValidationError);
}

TEST_CASE("predict_local_limit regimes") {
    // Potts disordered
    LocalLimitPrediction low = predict_local_limit(3, 2, 0.22);
    CHECK(low.regime == LimitRegime::DISORDERED);
    REQUIRE(low.components.size() == 1);
    for (double m : low.components[0].marginal) CHECK(m == doctest::Approx(1.0 / 3).epsilon(1e-12));

    // Potts ordered mixture with uniform weights
    LocalLimitPrediction high = predict_local_limit(3, 2, 0.66);
    CHECK(high.regime == LimitRegime::ORDERED_MIXTURE);
    REQUIRE(high.components.size() == 3);
    for (double w : high.weights) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    // each component is biased towards its own color
    for (int c = 0; c < 3; ++c) {
        for (int a = 0; a < 3; ++a) {
            if (a == c)
                CHECK(high.components[c].marginal[a] > 0.9);
            else
                CHECK(high.components[c].marginal[a] < 0.05);
        }
    }

    // exactly at J_p: critical, no weights
    Thresholds t = thresholds(3, 2);
    LocalLimitPrediction critical = predict_local_limit(3, 2, *t.j_p);
    CHECK(critical.regime == LimitRegime::CRITICAL_UNRESOLVED);
    CHECK(critical.weights.empty());

    // Ising below and above J_u
    LocalLimitPrediction unique = predict_local_limit(2, 2, 0.3);
    CHECK(unique.regime == LimitRegime::UNIQUE);
    LocalLimitPrediction mixture = predict_local_limit(2, 2, 0.5);
    CHECK(mixture.regime == LimitRegime::ORDERED_MIXTURE);
    REQUIRE(mixture.components.size() == 2);
    CHECK(mixture.weights[0] == 0.5);
    CHECK(mixture.components[0].marginal[0] > 0.5);
    CHECK(mixture.components[1].marginal[1] > 0.5);

    // antiferromagnetic Ising
    LocalLimitPrediction af = predict_local_limit(2, 2, -0.3);
    CHECK(af.regime == LimitRegime::DISORDERED);
    CHECK_FALSE(af.af_reconstruction_regime);
    CHECK(second_eigenvalue(af.components[0].transition) ==
          doctest::Approx(std::tanh(-0.3)).epsilon(1e-12));
    LocalLimitPrediction af_deep = predict_local_limit(2, 2, -0.8);
    CHECK(af_deep.af_reconstruction_regime);

    // antiferromagnetic Potts unsupported
    LocalLimitPrediction unsupported = predict_local_limit(3, 2, -0.4);
    CHECK(unsupported.regime == LimitRegime::UNSUPPORTED);
}

TEST_CASE("ordered components share f, energy, and pressure") {
    LocalLimitPrediction high = predict_local_limit(3, 2, 0.66);
    Interaction u = potts_interaction(3, 0.66);
    double f0 = f_invariant(high.components[0]);
    double u0 = energy_per_site(high.components[0], u, 2);
    double p0 = pressure_f(high.components[0], u, 2);
    for (int c = 1; c < 3; ++c) {
        CHECK(f_invariant(high.components[c]) == doctest::Approx(f0).epsilon(1e-12));
        CHECK(energy_per_site(high.components[c], u, 2) == doctest::Approx(u0).epsilon(1e-12));
        CHECK(pressure_f(high.components[c], u, 2) == doctest::Approx(p0).epsilon(1e-12));
    }
}

TEST_CASE("phi crossing locates J_p by bisection") {
    // Bisection on phi(ordered) - phi(flat); when no ordered root exists the
    // gap counts as negative.
    auto gap = [](int q, int rank, double strength) {
        auto laws = solve_boundary_laws(q, rank, strength);
        for (const auto& law : laws)
            if (law.kind == LawKind::ORDERED)
                return phi(law.ell, q, rank, strength) -
                       phi(Vec(static_cast<std::size_t>(q), 1.0), q, rank, strength);
        return -1.0;
    };
    struct Case {
        int q, rank;
    };
    for (Case c : {Case{3, 2}, Case{3, 3}, Case{4, 2}}) {
        double lo = 0.05, hi = 1.2;
        REQUIRE(gap(c.q, c.rank, lo) < 0.0);
        REQUIRE(gap(c.q, c.rank, hi) > 0.0);
        for (int it = 0; it < 40; ++it) {
            double mid = 0.5 * (lo + hi);
            if (gap(c.q, c.rank, mid) > 0.0)
                hi = mid;
            else
                lo = mid;
        }
        double crossing = 0.5 * (lo + hi);
        CHECK(std::abs(crossing - *thresholds(c.q, c.rank).j_p) < 0.01);
    }
}
