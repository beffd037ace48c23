// Python bindings for the soficlab core. Stochastic entry points take
// explicit integer seeds; enums and tagged entropies map to strings and
// floats (with -inf) on the Python side.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

#include "soficlab/entropy_invariants.hpp"
#include "soficlab/errors.hpp"
#include "soficlab/gibbs_tree.hpp"
#include "soficlab/mcmc.hpp"
#include "soficlab/serialize.hpp"

namespace py = pybind11;
using namespace soficlab;

namespace {

double entropy_to_double(const ExtendedEntropy& e) {
    return e.is_finite ? e.nats : -std::numeric_limits<double>::infinity();
}

InitKind init_kind_from(const std::string& name) {
    if (name == "random") return InitKind::RANDOM;
    if (name == "constant") return InitKind::CONSTANT;
    if (name == "chain") return InitKind::FROM_CHAIN;
    throw ValidationError("unknown init kind: " + name);
}

} // namespace

PYBIND11_MODULE(_soficlab, m) {
    m.doc() = "Sofic entropy, boundary laws and Gibbs dynamics over random regular graphs";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

    py::class_<MarkovChainSpec>(m, "MarkovChainSpec")
        .def(py::init([](int q, int rank, Vec marginal, Mat transition) {
                 MarkovChainSpec c{q, rank, std::move(marginal), std::move(transition)};
                 require_valid(c);
                 return c;
             }),
             py::arg("q"), py::arg("rank"), py::arg("marginal"), py::arg("transition"))
        .def_readonly("q", &MarkovChainSpec::q)
        .def_readonly("rank", &MarkovChainSpec::rank)
        .def_readonly("marginal", &MarkovChainSpec::marginal)
        .def_readonly("transition", &MarkovChainSpec::transition)
        .def("__repr__", [](const MarkovChainSpec& c) {
            return "<MarkovChainSpec q=" + std::to_string(c.q) +
                   " rank=" + std::to_string(c.rank) + ">";
        });

    py::class_<Interaction>(m, "Interaction")
        .def_readonly("field", &Interaction::field)
        .def_readonly("pair", &Interaction::pair);

    py::class_<PermGraph>(m, "PermGraph")
        .def(py::init<int, std::vector<std::vector<int>>>(), py::arg("rank"), py::arg("perms"))
        .def_property_readonly("n", &PermGraph::size)
        .def_property_readonly("rank", &PermGraph::rank)
        .def("image", &PermGraph::image, py::arg("generator"), py::arg("v"))
        .def("inverse_image", &PermGraph::inverse_image, py::arg("generator"), py::arg("v"))
        .def("perms", &PermGraph::perms)
        .def("__repr__", [](const PermGraph& g) {
            return "<PermGraph n=" + std::to_string(g.size()) +
                   " rank=" + std::to_string(g.rank()) + ">";
        });

    py::class_<DepthRPattern>(m, "DepthRPattern")
        .def_readonly("rank", &DepthRPattern::rank)
        .def_readonly("radius", &DepthRPattern::radius)
        .def_readonly("labels", &DepthRPattern::labels);

    py::class_<PatternDistribution>(m, "PatternDistribution")
        .def_readonly("rank", &PatternDistribution::rank)
        .def_readonly("radius", &PatternDistribution::radius)
        .def_readonly("q", &PatternDistribution::q)
        .def_readonly("total", &PatternDistribution::total)
        .def_property_readonly("weights",
                               [](const PatternDistribution& d) {
                                   py::dict out;
                                   for (const auto& [key, w] : d.weights)
                                       out[py::bytes(key)] = w;
                                   return out;
                               })
        .def("__len__", [](const PatternDistribution& d) { return d.weights.size(); });

    py::class_<Thresholds>(m, "Thresholds")
        .def_property_readonly("j_p",
                               [](const Thresholds& t) {
                                   return t.j_p ? py::cast(*t.j_p) : py::none();
                               })
        .def_property_readonly("j_u",
                               [](const Thresholds& t) {
                                   return t.j_u ? py::cast(*t.j_u) : py::none();
                               })
        .def_readonly("tail_bound", &Thresholds::tail_bound);

    py::class_<BoundaryLaw>(m, "BoundaryLaw")
        .def_readonly("ell", &BoundaryLaw::ell)
        .def_property_readonly("kind",
                               [](const BoundaryLaw& l) { return std::string(to_string(l.kind)); });

    py::class_<LocalLimitPrediction>(m, "LocalLimitPrediction")
        .def_property_readonly("regime",
                               [](const LocalLimitPrediction& p) {
                                   return std::string(to_string(p.regime));
                               })
        .def_readonly("components", &LocalLimitPrediction::components)
        .def_readonly("weights", &LocalLimitPrediction::weights)
        .def_readonly("af_reconstruction_regime",
                      &LocalLimitPrediction::af_reconstruction_regime)
        .def_readonly("note", &LocalLimitPrediction::note);

    py::class_<GibbsSamples>(m, "GibbsSamples")
        .def_readonly("q", &GibbsSamples::q)
        .def_readonly("per_replica", &GibbsSamples::per_replica)
        .def("sample_count", &GibbsSamples::sample_count);

    py::class_<SampleClass>(m, "SampleClass")
        .def_readonly("replica", &SampleClass::replica)
        .def_readonly("dominant", &SampleClass::dominant)
        .def_readonly("top_fraction", &SampleClass::top_fraction)
        .def_readonly("margin", &SampleClass::margin);

    py::class_<LocalStatsReport>(m, "LocalStatsReport")
        .def_readonly("q", &LocalStatsReport::q)
        .def_readonly("radius", &LocalStatsReport::radius)
        .def_readonly("per_vertex", &LocalStatsReport::per_vertex)
        .def_readonly("pooled_depth0", &LocalStatsReport::pooled_depth0)
        .def_readonly("pooled_patterns", &LocalStatsReport::pooled_patterns)
        .def_readonly("per_sample", &LocalStatsReport::per_sample)
        .def_readonly("conditional_depth0", &LocalStatsReport::conditional_depth0)
        .def_readonly("class_sample_counts", &LocalStatsReport::class_sample_counts);

    py::class_<LimitVerdict>(m, "LimitVerdict")
        .def_property_readonly("status",
                               [](const LimitVerdict& v) {
                                   return std::string(to_string(v.status));
                               })
        .def_readonly("tol", &LimitVerdict::tol)
        .def_readonly("distances", &LimitVerdict::distances)
        .def_readonly("detail", &LimitVerdict::detail);

    py::class_<PairCorrelation>(m, "PairCorrelation")
        .def_readonly("m", &PairCorrelation::m)
        .def_readonly("estimate", &PairCorrelation::estimate)
        .def_readonly("stderr_value", &PairCorrelation::stderr_value)
        .def_readonly("samples", &PairCorrelation::samples);

    py::class_<JoiningSearchResult>(m, "JoiningSearchResult")
        .def_readonly("best_f", &JoiningSearchResult::best_f)
        .def_readonly("ok", &JoiningSearchResult::ok)
        .def_readonly("product_f", &JoiningSearchResult::product_f)
        .def_readonly("diagonal_f", &JoiningSearchResult::diagonal_f)
        .def_readonly("feasible_restarts", &JoiningSearchResult::feasible_restarts);

    py::class_<GrowthPoint>(m, "GrowthPoint")
        .def_readonly("n", &GrowthPoint::n)
        .def_property_readonly("rate",
                               [](const GrowthPoint& p) { return entropy_to_double(p.rate); })
        .def_readonly("rate_stderr", &GrowthPoint::rate_stderr)
        .def_readonly("mean_count", &GrowthPoint::mean_count);

    // chains and interactions
    m.def("ising_chain", &ising_chain, py::arg("theta"), py::arg("rank"));
    m.def("hardcore_chain", &hardcore_chain, py::arg("alpha"), py::arg("rank"));
    m.def("iid_uniform_chain", &iid_uniform_chain, py::arg("q"), py::arg("rank"));
    m.def("product_chain", &product_chain, py::arg("chain"));
    m.def("ising_interaction", &ising_interaction, py::arg("strength"));
    m.def("potts_interaction", &potts_interaction, py::arg("q"), py::arg("strength"));
    m.def("zero_interaction", &zero_interaction, py::arg("q"));

    // spin-core operations
    m.def("shannon_entropy",
          [](const Vec& dist) { return shannon_entropy(std::span<const double>(dist)); },
          py::arg("dist"));
    m.def("edge_marginal", [](const MarkovChainSpec& c) { return edge_marginal(c).p2; },
          py::arg("chain"));
    m.def("second_eigenvalue", &second_eigenvalue, py::arg("transition"));
    m.def("validate_chain",
          [](const MarkovChainSpec& c) {
              ChainReport report = validate_chain(c);
              py::dict out;
              out["ok"] = report.ok;
              py::list violations;
              for (const auto& v : report.violations)
                  violations.append(py::make_tuple(v.kind, v.residual));
              out["violations"] = violations;
              return out;
          },
          py::arg("chain"));
    m.def("metric_tail_bound", &metric_tail_bound, py::arg("rank"), py::arg("radius"));
    m.def("metric_total_weight", &metric_total_weight, py::arg("rank"));

    // permutation graphs
    m.def("sample_uniform",
          [](int n, int rank, std::uint64_t seed) { return sample_uniform(n, rank, seed); },
          py::arg("n"), py::arg("rank"), py::arg("seed"));
    m.def("apply_switching",
          [](const PermGraph& g, int generator, int i, int j) {
              return apply_switching(g, SwitchMove{generator, i, j});
          },
          py::arg("graph"), py::arg("generator"), py::arg("i"), py::arg("j"));
    m.def("soficity_audit", &soficity_audit, py::arg("graph"), py::arg("radius"));
    m.def("pullback_pattern",
          [](const PermGraph& g, const std::vector<int>& labels, int v, int radius) {
              Labeling x(labels.begin(), labels.end());
              return pullback_pattern(g, x, v, radius);
          },
          py::arg("graph"), py::arg("labeling"), py::arg("v"), py::arg("radius"));
    m.def("empirical_distribution",
          [](const PermGraph& g, const std::vector<int>& labels, int radius, int q) {
              Labeling x(labels.begin(), labels.end());
              return empirical_distribution(g, x, radius, q);
          },
          py::arg("graph"), py::arg("labeling"), py::arg("radius"), py::arg("q"));
    m.def("pattern_tv", &pattern_tv, py::arg("a"), py::arg("b"));
    m.def("pattern_distance", &pattern_distance, py::arg("a"), py::arg("b"));
    m.def("chain_marginal_pattern", &chain_marginal_pattern, py::arg("chain"), py::arg("radius"),
          py::arg("pattern_budget") = (1ull << 22));

    // invariants
    m.def("f_invariant", &f_invariant, py::arg("chain"));
    m.def("typical_entropy_ising",
          [](double theta, int rank) {
              return entropy_to_double(typical_entropy_ising(theta, rank));
          },
          py::arg("theta"), py::arg("rank"));
    m.def("kesten_stigum_violated", &kesten_stigum_violated, py::arg("theta"), py::arg("rank"));
    m.def("hardcore_verdict",
          [](double alpha, int rank) {
              HardcoreResult result = hardcore_verdict(alpha, rank);
              const char* label =
                  result.verdict.classification == Typicality::NOT_WEAKLY_TYPICAL
                      ? "NOT_WEAKLY_TYPICAL"
                      : (result.verdict.classification == Typicality::TYPICAL_F_VALUE
                             ? "TYPICAL_F_VALUE"
                             : "UNRESOLVED");
              return py::make_tuple(label, result.verdict.ks_violated, result.chain);
          },
          py::arg("alpha"), py::arg("rank"));
    m.def("count_good_models", &count_good_models, py::arg("graph"), py::arg("target"),
          py::arg("eps"), py::arg("radius"), py::arg("budget") = kDefaultEnumerationBudget);
    m.def("annealed_growth_estimate",
          [](const MarkovChainSpec& chain, double eps, int radius, const std::vector<int>& sizes,
             int graphs, std::uint64_t seed, std::uint64_t budget) {
              return annealed_growth_estimate(chain, eps, radius, sizes, graphs, seed, budget);
          },
          py::arg("chain"), py::arg("eps"), py::arg("radius"), py::arg("n_list"),
          py::arg("graph_samples"), py::arg("seed"),
          py::arg("budget") = kDefaultEnumerationBudget);
    m.def("rho_profile",
          [](const PermGraph& g, const PatternDistribution& target, const Vec& h_grid, int radius,
             std::uint64_t budget) { return rho_profile(g, target, h_grid, radius, budget); },
          py::arg("graph"), py::arg("target"), py::arg("h_grid"), py::arg("radius"),
          py::arg("budget") = kDefaultEnumerationBudget);
    m.def("second_moment_markov_search", &second_moment_markov_search, py::arg("chain"),
          py::arg("restarts") = 32, py::arg("seed") = 1);

    // boundary laws and predictions
    m.def("transfer_matrix",
          [](int q, double strength) { return transfer_matrix(q, strength).matrix; },
          py::arg("q"), py::arg("strength"));
    m.def("boundary_law_residual", &boundary_law_residual, py::arg("ell"), py::arg("q"),
          py::arg("rank"), py::arg("strength"));
    m.def("solve_boundary_laws",
          [](int q, int rank, double strength) { return solve_boundary_laws(q, rank, strength); },
          py::arg("q"), py::arg("rank"), py::arg("strength"));
    m.def("chain_from_boundary_law", &chain_from_boundary_law, py::arg("ell"), py::arg("q"),
          py::arg("rank"), py::arg("strength"));
    m.def("phi", &phi, py::arg("ell"), py::arg("q"), py::arg("rank"), py::arg("strength"));
    m.def("energy_per_site", &energy_per_site, py::arg("chain"), py::arg("interaction"),
          py::arg("rank"));
    m.def("pressure_f", &pressure_f, py::arg("chain"), py::arg("interaction"), py::arg("rank"));
    m.def("thresholds", &thresholds, py::arg("q"), py::arg("rank"));
    m.def("tv_columns", &tv_columns, py::arg("q"), py::arg("strength"));
    m.def("predict_local_limit", &predict_local_limit, py::arg("q"), py::arg("rank"),
          py::arg("strength"));

    // dynamics
    m.def("sample_gibbs",
          [](const PermGraph& g, const Interaction& u, int q, int sweeps, int burn_in,
             int replicas, int thin, const std::string& init, int constant_symbol,
             bool cycle_init, const Vec& init_marginal, std::uint64_t seed) {
              SimConfig config;
              config.sweeps = sweeps;
              config.burn_in = burn_in;
              config.replicas = replicas;
              config.thin = thin;
              config.init = init_kind_from(init);
              config.constant_symbol = constant_symbol;
              config.cycle_init = cycle_init;
              config.init_marginal = init_marginal;
              config.seed = seed;
              return sample_gibbs(g, u, q, config);
          },
          py::arg("graph"), py::arg("interaction"), py::arg("q"), py::arg("sweeps"),
          py::arg("burn_in") = 0, py::arg("replicas") = 1, py::arg("thin") = 1,
          py::arg("init") = "random", py::arg("constant_symbol") = 0,
          py::arg("cycle_init") = false, py::arg("init_marginal") = Vec{},
          py::arg("seed") = 1);
    m.def("broadcast_tree_sample",
          [](const MarkovChainSpec& chain, int radius, std::uint64_t seed) {
              Rng rng(seed);
              return broadcast_tree_sample(chain, radius, rng);
          },
          py::arg("chain"), py::arg("radius"), py::arg("seed"));
    m.def("pair_correlation",
          [](const MarkovChainSpec& chain, int m_steps, std::uint64_t samples,
             std::uint64_t seed) {
              Rng rng(seed);
              return pair_correlation(chain, m_steps, samples, rng);
          },
          py::arg("chain"), py::arg("m"), py::arg("samples"), py::arg("seed"));
    m.def("averaging_norm",
          [](const PermGraph& g, int m_steps, int iters, std::uint64_t seed) {
              Rng rng(seed);
              return averaging_norm(g, m_steps, iters, rng);
          },
          py::arg("graph"), py::arg("m"), py::arg("iters"), py::arg("seed"));
    m.def("local_stats", &local_stats, py::arg("graph"), py::arg("samples"), py::arg("radius"));
    m.def("local_limit_verdict", &local_limit_verdict, py::arg("report"), py::arg("prediction"),
          py::arg("tol"));
}
