// soficlab: numerical laboratory for typical sofic entropy over random
// regular graphs. One binary, subcommand style; all randomness sits behind
// --seed. Exit codes: 0 ok/pass, 2 verdict fail, 3 validation error,
// 4 enumeration budget refusal.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "soficlab/entropy_invariants.hpp"
#include "soficlab/errors.hpp"
#include "soficlab/gibbs_tree.hpp"
#include "soficlab/mcmc.hpp"
#include "soficlab/serialize.hpp"

using namespace soficlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictFail = 2;
constexpr int kExitValidation = 3;
constexpr int kExitBudget = 4;

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << content;
}

std::string csv_cell(double v) { return format_double(v); }

std::string csv_cell(const ExtendedEntropy& v) {
    return v.is_finite ? format_double(v.nats) : std::string("-inf");
}

// CSV body: '#' comment lines carry the schema version and the full config,
// then a header row, then data rows.
std::string csv_document(const std::string& schema, const Json& config,
                         const std::string& header,
                         const std::vector<std::string>& rows) {
    std::ostringstream os;
    os << "# schema=" << schema << "\n";
    os << "# config=" << config.dump() << "\n";
    os << header << "\n";
    for (const auto& row : rows) os << row << "\n";
    return os.str();
}

std::string json_document(const std::string& schema, const Json& config, const Json& body) {
    Json doc;
    doc["schema"] = schema;
    doc["config"] = config;
    for (const auto& [key, value] : body.items()) doc[key] = value;
    return doc.dump(2) + "\n";
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    if (out.empty()) throw ValidationError("empty integer list");
    return out;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ValidationError("parse error in " + path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// entropy

struct EntropyParams {
    std::string kind;  // ising | hardcore | potts-law | file
    double theta = 0.0;
    double alpha = 0.0;
    int q = 3;
    double strength = 0.0;
    std::string law = "disordered";
    std::string chain_file;
    int rank = 2;
    std::string out = "-";
};

Json entropy_config(const EntropyParams& p) {
    Json c;
    c["command"] = "entropy";
    c["kind"] = p.kind;
    if (p.kind == "ising") c["theta"] = p.theta;
    if (p.kind == "hardcore") c["alpha"] = p.alpha;
    if (p.kind == "potts-law") {
        c["q"] = p.q;
        c["J"] = p.strength;
        c["law"] = p.law;
    }
    if (p.kind == "file") c["chain_file"] = p.chain_file;
    c["r"] = p.rank;
    return c;
}

EntropyParams entropy_params_from(const Json& c) {
    EntropyParams p;
    p.kind = c.at("kind").get<std::string>();
    if (p.kind == "ising") p.theta = c.at("theta").get<double>();
    if (p.kind == "hardcore") p.alpha = c.at("alpha").get<double>();
    if (p.kind == "potts-law") {
        p.q = c.at("q").get<int>();
        p.strength = c.at("J").get<double>();
        p.law = c.at("law").get<std::string>();
    }
    if (p.kind == "file") p.chain_file = c.at("chain_file").get<std::string>();
    p.rank = c.at("r").get<int>();
    return p;
}

MarkovChainSpec resolve_chain(const EntropyParams& p) {
    if (p.kind == "ising") return ising_chain(p.theta, p.rank);
    if (p.kind == "hardcore") return hardcore_chain(p.alpha, p.rank);
    if (p.kind == "potts-law") {
        if (p.law == "disordered")
            return chain_from_boundary_law(Vec(static_cast<std::size_t>(p.q), 1.0), p.q, p.rank,
                                           p.strength);
        auto laws = solve_boundary_laws(p.q, p.rank, p.strength);
        for (const auto& law : laws)
            if (law.kind == LawKind::ORDERED)
                return chain_from_boundary_law(law.ell, p.q, p.rank, p.strength);
        throw ValidationError("no ordered boundary law at J = " + std::to_string(p.strength));
    }
    if (p.kind == "file") {
        MarkovChainSpec chain = chain_from_json(load_json_file(p.chain_file));
        ChainReport report = validate_chain(chain);
        if (!report.ok) throw ValidationError(p.chain_file + ": " + report.describe());
        return chain;
    }
    throw ValidationError("entropy: pick one of --ising, --hardcore, --potts-law, --chain");
}

int run_entropy(const EntropyParams& p) {
    MarkovChainSpec chain = resolve_chain(p);
    double f = f_invariant(chain);
    double theta = second_eigenvalue(chain.transition);
    bool ks = kesten_stigum_violated(theta, chain.rank);

    Json body;
    body["chain"] = chain_to_json(chain);
    body["f"] = f;
    body["second_eigenvalue"] = theta;
    body["ks_violated"] = ks;
    // The closed typical-entropy form is Ising-specific; for other chains a
    // violated Kesten-Stigum bound still pins the value at -inf.
    if (p.kind == "ising") {
        ExtendedEntropy h = typical_entropy_ising(p.theta, p.rank);
        body["typical_entropy"] = Json{{"finite", h.is_finite},
                                       {"value", h.is_finite ? Json(h.nats) : Json(nullptr)}};
    } else if (ks) {
        body["typical_entropy"] = Json{{"finite", false}, {"value", nullptr}};
    } else {
        body["typical_entropy"] = nullptr;
    }
    write_output(p.out, json_document("soficlab.entropy.v1", entropy_config(p), body));
    return kExitOk;
}

// ---------------------------------------------------------------------------
// fig1

struct Fig1Params {
    int rank = 2;
    int grid = 99;
    double theta_max = 0.49;
    std::string format = "csv";
    std::string out = "-";
};

Json fig1_config(const Fig1Params& p) {
    Json c;
    c["command"] = "fig1";
    c["r"] = p.rank;
    c["grid"] = p.grid;
    c["theta_max"] = p.theta_max;
    c["format"] = p.format;
    return c;
}

Fig1Params fig1_params_from(const Json& c) {
    Fig1Params p;
    p.rank = c.at("r").get<int>();
    p.grid = c.at("grid").get<int>();
    p.theta_max = c.at("theta_max").get<double>();
    p.format = c.at("format").get<std::string>();
    return p;
}

int run_fig1(const Fig1Params& p) {
    if (!(p.theta_max > 0.0 && p.theta_max < 0.5))
        throw ValidationError("fig1: grid must lie inside (-0.5, 0.5)");
    if (p.grid < 3) throw ValidationError("fig1: need at least 3 grid points");

    std::vector<std::pair<double, ExtendedEntropy>> data;
    for (int k = 0; k < p.grid; ++k) {
        // exactly antisymmetric grid so the emitted curve mirrors row for row
        double theta = p.theta_max * (2 * k - (p.grid - 1)) / (p.grid - 1);
        data.emplace_back(theta, typical_entropy_ising(theta, p.rank));
    }
    double threshold = 1.0 / std::sqrt(2.0 * p.rank - 1.0);

    std::vector<std::string> rows;
    for (const auto& [theta, value] : data)
        rows.push_back(csv_cell(theta) + "," + csv_cell(value) + ",data");
    for (double t : {-threshold, threshold})
        rows.push_back(csv_cell(t) + "," + csv_cell(typical_entropy_ising(t, p.rank)) +
                       ",threshold");

    if (p.format == "csv") {
        write_output(p.out, csv_document("soficlab.fig1.v1", fig1_config(p),
                                         "theta,value,kind", rows));
    } else if (p.format == "json") {
        Json body;
        body["columns"] = {"theta", "value", "kind"};
        Json out_rows = Json::array();
        for (const auto& [theta, value] : data)
            out_rows.push_back({theta, value.is_finite ? Json(value.nats) : Json("-inf"), "data"});
        for (double t : {-threshold, threshold}) {
            ExtendedEntropy v = typical_entropy_ising(t, p.rank);
            out_rows.push_back({t, v.is_finite ? Json(v.nats) : Json("-inf"), "threshold"});
        }
        body["rows"] = out_rows;
        write_output(p.out, json_document("soficlab.fig1.v1", fig1_config(p), body));
    } else {
        throw ValidationError("fig1: format must be csv or json");
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// phase

struct PhaseParams {
    int q = 3;
    int rank = 2;
    double j_min = 0.0;
    double j_max = 1.0;
    int steps = 51;
    std::string format = "csv";
    std::string out = "-";
};

Json phase_config(const PhaseParams& p) {
    Json c;
    c["command"] = "phase";
    c["q"] = p.q;
    c["r"] = p.rank;
    c["j_min"] = p.j_min;
    c["j_max"] = p.j_max;
    c["steps"] = p.steps;
    c["format"] = p.format;
    return c;
}

PhaseParams phase_params_from(const Json& c) {
    PhaseParams p;
    p.q = c.at("q").get<int>();
    p.rank = c.at("r").get<int>();
    p.j_min = c.at("j_min").get<double>();
    p.j_max = c.at("j_max").get<double>();
    p.steps = c.at("steps").get<int>();
    p.format = c.at("format").get<std::string>();
    return p;
}

std::string phase_row(int q, int rank, double strength, const std::string& note) {
    double phi_dis = phi(Vec(static_cast<std::size_t>(q), 1.0), q, rank, strength);
    auto laws = solve_boundary_laws(q, rank, strength);
    std::optional<double> phi_ord;
    for (const auto& law : laws)
        if (law.kind == LawKind::ORDERED) phi_ord = phi(law.ell, q, rank, strength);
    LocalLimitPrediction prediction = predict_local_limit(q, rank, strength);
    std::ostringstream os;
    os << q << "," << rank << "," << csv_cell(strength) << "," << csv_cell(phi_dis) << ",";
    os << (phi_ord ? csv_cell(*phi_ord) : std::string("-inf")) << ",";
    os << (phi_ord ? csv_cell(*phi_ord - phi_dis) : std::string("-inf")) << ",";
    os << to_string(prediction.regime) << "," << note;
    return os.str();
}

int run_phase(const PhaseParams& p) {
    if (p.steps < 2) throw ValidationError("phase: need at least 2 steps");
    if (p.j_min < 0.0) throw ValidationError("phase: J grid must be nonnegative");
    Thresholds t = thresholds(p.q, p.rank);

    std::vector<std::string> rows;
    for (int k = 0; k < p.steps; ++k) {
        double strength = p.j_min + (p.j_max - p.j_min) * k / (p.steps - 1);
        rows.push_back(phase_row(p.q, p.rank, strength, ""));
    }
    if (t.j_p && *t.j_p >= p.j_min && *t.j_p <= p.j_max)
        rows.push_back(phase_row(p.q, p.rank, *t.j_p, "J_p"));
    if (t.j_u && *t.j_u >= p.j_min && *t.j_u <= p.j_max)
        rows.push_back(phase_row(p.q, p.rank, *t.j_u, "J_u"));
    if (t.tail_bound >= p.j_min && t.tail_bound <= p.j_max)
        rows.push_back(phase_row(p.q, p.rank, t.tail_bound, "tail_bound"));

    const std::string header = "q,r,J,phi_disordered,phi_ordered,pressure_gap,regime,note";
    if (p.format == "csv") {
        write_output(p.out, csv_document("soficlab.phase.v1", phase_config(p), header, rows));
    } else if (p.format == "json") {
        Json body;
        body["columns"] = header;
        body["rows"] = rows;
        write_output(p.out, json_document("soficlab.phase.v1", phase_config(p), body));
    } else {
        throw ValidationError("phase: format must be csv or json");
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateParams {
    int q = 3;
    int rank = 2;
    double strength = 0.22;
    int n = 10000;
    int radius = 1;
    int sweeps = 2000;
    int burn_in = 500;
    int replicas = 4;
    int thin = 25;
    std::string init = "random";
    int init_symbol = 0;
    double tol = 0.05;
    std::uint64_t seed = 1;
    bool full_report = false;
    std::string dump_samples;
    std::string out = "-";
};

Json simulate_config(const SimulateParams& p) {
    Json c;
    c["command"] = "simulate";
    c["q"] = p.q;
    c["r"] = p.rank;
    c["J"] = p.strength;
    c["n"] = p.n;
    c["R"] = p.radius;
    c["sweeps"] = p.sweeps;
    c["burn_in"] = p.burn_in;
    c["replicas"] = p.replicas;
    c["thin"] = p.thin;
    c["init"] = p.init;
    c["init_symbol"] = p.init_symbol;
    c["tol"] = p.tol;
    c["seed"] = p.seed;
    c["full_report"] = p.full_report;
    c["dump_samples"] = p.dump_samples;
    return c;
}

SimulateParams simulate_params_from(const Json& c) {
    SimulateParams p;
    p.q = c.at("q").get<int>();
    p.rank = c.at("r").get<int>();
    p.strength = c.at("J").get<double>();
    p.n = c.at("n").get<int>();
    p.radius = c.at("R").get<int>();
    p.sweeps = c.at("sweeps").get<int>();
    p.burn_in = c.at("burn_in").get<int>();
    p.replicas = c.at("replicas").get<int>();
    p.thin = c.at("thin").get<int>();
    p.init = c.at("init").get<std::string>();
    p.init_symbol = c.at("init_symbol").get<int>();
    p.tol = c.at("tol").get<double>();
    p.seed = c.at("seed").get<std::uint64_t>();
    p.full_report = c.at("full_report").get<bool>();
    p.dump_samples = c.at("dump_samples").get<std::string>();
    return p;
}

int run_simulate(const SimulateParams& p) {
    LocalLimitPrediction prediction = predict_local_limit(p.q, p.rank, p.strength);
    if (prediction.regime == LimitRegime::UNSUPPORTED)
        throw ValidationError("simulate: " + prediction.note);

    Rng root(p.seed);
    Rng graph_stream = root.fork(1);
    PermGraph g = sample_uniform(p.n, p.rank, graph_stream);
    Interaction u = p.q >= 3 ? potts_interaction(p.q, p.strength) : ising_interaction(p.strength);

    SimConfig config;
    config.sweeps = p.sweeps;
    config.burn_in = p.burn_in;
    config.replicas = p.replicas;
    config.thin = p.thin;
    config.seed = root.fork(2).next_u64();
    if (p.init == "random") {
        config.init = InitKind::RANDOM;
    } else if (p.init == "constant") {
        config.init = InitKind::CONSTANT;
        config.constant_symbol = p.init_symbol;
    } else if (p.init == "constant-cycle") {
        config.init = InitKind::CONSTANT;
        config.constant_symbol = p.init_symbol;
        config.cycle_init = true;
    } else if (p.init == "chain") {
        config.init = InitKind::FROM_CHAIN;
        config.init_marginal = prediction.components.at(0).marginal;
    } else {
        throw ValidationError("simulate: unknown init " + p.init);
    }

    GibbsSamples samples = sample_gibbs(g, u, p.q, config);
    LocalStatsReport report = local_stats(g, samples, p.radius);
    LimitVerdict verdict = local_limit_verdict(report, prediction, p.tol);

    if (!p.dump_samples.empty()) {
        std::ofstream dump(p.dump_samples, std::ios::binary);
        if (!dump) throw ValidationError("cannot open dump file: " + p.dump_samples);
        write_samples_binary(dump, samples, p.n);
    }

    Json body;
    Json pred;
    pred["regime"] = to_string(prediction.regime);
    pred["note"] = prediction.note;
    pred["af_reconstruction_regime"] = prediction.af_reconstruction_regime;
    pred["weights"] = prediction.weights;
    Json comps = Json::array();
    for (const auto& c : prediction.components) comps.push_back(chain_to_json(c));
    pred["components"] = comps;
    body["prediction"] = pred;

    Json thr;
    Thresholds t = thresholds(p.q, p.rank);
    thr["J_p"] = t.j_p ? Json(*t.j_p) : Json(nullptr);
    thr["J_u"] = t.j_u ? Json(*t.j_u) : Json(nullptr);
    thr["tail_bound"] = t.tail_bound;
    body["thresholds"] = thr;

    body["graph"] = graph_to_json(g);
    {
        std::ostringstream hex;
        hex << std::hex << samples_digest(samples);
        body["samples_digest"] = hex.str();
    }
    body["sample_count"] = samples.sample_count();

    Json rep;
    rep["pooled_depth0"] = report.pooled_depth0;
    rep["per_replica_class_fractions"] = report.per_replica_class_fractions;
    rep["class_sample_counts"] = report.class_sample_counts;
    rep["conditional_depth0"] = report.conditional_depth0;
    if (p.full_report) {
        rep["per_vertex"] = report.per_vertex;
        Json per_sample = Json::array();
        for (const auto& sc : report.per_sample)
            per_sample.push_back({{"replica", sc.replica},
                                  {"dominant", sc.dominant},
                                  {"top_fraction", sc.top_fraction},
                                  {"margin", sc.margin}});
        rep["per_sample"] = per_sample;
    }
    body["report"] = rep;

    Json ver;
    ver["status"] = to_string(verdict.status);
    ver["tol"] = verdict.tol;
    ver["detail"] = verdict.detail;
    Json distances = Json::array();
    for (const auto& [name, value] : verdict.distances)
        distances.push_back({{"name", name}, {"value", value}});
    ver["distances"] = distances;
    body["verdict"] = ver;

    write_output(p.out, json_document("soficlab.simulate.v1", simulate_config(p), body));
    return verdict.status == VerdictStatus::FAIL ? kExitVerdictFail : kExitOk;
}

// ---------------------------------------------------------------------------
// enumerate

struct EnumerateParams {
    std::string kind = "ising";  // ising | hardcore | file
    double theta = 0.2;
    double alpha = 0.3;
    std::string chain_file;
    int rank = 2;
    int radius = 1;
    double eps = 1.3;
    std::string n_list = "6,8,10,12";
    int graphs = 200;
    std::uint64_t seed = 1;
    std::uint64_t budget = kDefaultEnumerationBudget;
    std::string format = "csv";
    std::string out = "-";
};

Json enumerate_config(const EnumerateParams& p) {
    Json c;
    c["command"] = "enumerate";
    c["kind"] = p.kind;
    if (p.kind == "ising") c["theta"] = p.theta;
    if (p.kind == "hardcore") c["alpha"] = p.alpha;
    if (p.kind == "file") c["chain_file"] = p.chain_file;
    c["r"] = p.rank;
    c["R"] = p.radius;
    c["eps"] = p.eps;
    c["n_list"] = p.n_list;
    c["graphs"] = p.graphs;
    c["seed"] = p.seed;
    c["budget"] = p.budget;
    c["format"] = p.format;
    return c;
}

EnumerateParams enumerate_params_from(const Json& c) {
    EnumerateParams p;
    p.kind = c.at("kind").get<std::string>();
    if (p.kind == "ising") p.theta = c.at("theta").get<double>();
    if (p.kind == "hardcore") p.alpha = c.at("alpha").get<double>();
    if (p.kind == "file") p.chain_file = c.at("chain_file").get<std::string>();
    p.rank = c.at("r").get<int>();
    p.radius = c.at("R").get<int>();
    p.eps = c.at("eps").get<double>();
    p.n_list = c.at("n_list").get<std::string>();
    p.graphs = c.at("graphs").get<int>();
    p.seed = c.at("seed").get<std::uint64_t>();
    p.budget = c.at("budget").get<std::uint64_t>();
    p.format = c.at("format").get<std::string>();
    return p;
}

int run_enumerate(const EnumerateParams& p) {
    MarkovChainSpec chain;
    if (p.kind == "ising")
        chain = ising_chain(p.theta, p.rank);
    else if (p.kind == "hardcore")
        chain = hardcore_chain(p.alpha, p.rank);
    else if (p.kind == "file")
        chain = chain_from_json(load_json_file(p.chain_file));
    else
        throw ValidationError("enumerate: unknown chain kind " + p.kind);

    std::vector<int> sizes = parse_int_list(p.n_list);
    auto points = annealed_growth_estimate(chain, p.eps, p.radius, sizes, p.graphs, p.seed,
                                           p.budget);
    double f = f_invariant(chain);

    std::vector<std::string> rows;
    for (const auto& point : points)
        rows.push_back(std::to_string(point.n) + "," + csv_cell(point.rate) + "," +
                       csv_cell(point.rate_stderr) + "," + csv_cell(f));
    const std::string header = "n,rate,rate_stderr,f_ref";
    if (p.format == "csv") {
        write_output(p.out,
                     csv_document("soficlab.enumerate.v1", enumerate_config(p), header, rows));
    } else if (p.format == "json") {
        Json body;
        body["f_ref"] = f;
        Json out_rows = Json::array();
        for (const auto& point : points)
            out_rows.push_back(
                {{"n", point.n},
                 {"rate", point.rate.is_finite ? Json(point.rate.nats) : Json("-inf")},
                 {"rate_stderr", point.rate_stderr}});
        body["rows"] = out_rows;
        write_output(p.out, json_document("soficlab.enumerate.v1", enumerate_config(p), body));
    } else {
        throw ValidationError("enumerate: format must be csv or json");
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// spectral

struct SpectralParams {
    int n = 2000;
    int rank = 2;
    std::string m_list = "1,2";
    int graphs = 5;
    int iters = 10000;
    std::uint64_t seed = 1;
    std::string format = "csv";
    std::string out = "-";
};

Json spectral_config(const SpectralParams& p) {
    Json c;
    c["command"] = "spectral";
    c["n"] = p.n;
    c["r"] = p.rank;
    c["m_list"] = p.m_list;
    c["graphs"] = p.graphs;
    c["iters"] = p.iters;
    c["seed"] = p.seed;
    c["format"] = p.format;
    return c;
}

SpectralParams spectral_params_from(const Json& c) {
    SpectralParams p;
    p.n = c.at("n").get<int>();
    p.rank = c.at("r").get<int>();
    p.m_list = c.at("m_list").get<std::string>();
    p.graphs = c.at("graphs").get<int>();
    p.iters = c.at("iters").get<int>();
    p.seed = c.at("seed").get<std::uint64_t>();
    p.format = c.at("format").get<std::string>();
    return p;
}

double tree_norm_formula(int m, int rank) {
    if (m == 0) return 1.0;
    return (m + 1.0 - static_cast<double>(m) / rank) / std::pow(2.0 * rank - 1.0, m / 2.0);
}

int run_spectral(const SpectralParams& p) {
    std::vector<int> ms = parse_int_list(p.m_list);
    Rng root(p.seed);

    std::vector<std::string> rows;
    Json json_rows = Json::array();
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
        int m = ms[mi];
        double formula = tree_norm_formula(m, p.rank);
        std::vector<double> estimates;
        for (int gi = 0; gi < p.graphs; ++gi) {
            Rng stream = root.fork(mi * 1000 + static_cast<std::uint64_t>(gi));
            PermGraph g = sample_uniform(p.n, p.rank, stream);
            double est = averaging_norm(g, m, p.iters, stream);
            estimates.push_back(est);
            rows.push_back(std::to_string(m) + "," + std::to_string(gi) + "," + csv_cell(est) +
                           "," + csv_cell(formula) + "," + csv_cell(std::abs(est - formula)));
            json_rows.push_back({{"m", m}, {"graph", gi}, {"estimate", est}, {"formula", formula}});
        }
        std::sort(estimates.begin(), estimates.end());
        double median = estimates.size() % 2 == 1
                            ? estimates[estimates.size() / 2]
                            : 0.5 * (estimates[estimates.size() / 2 - 1] +
                                     estimates[estimates.size() / 2]);
        rows.push_back(std::to_string(m) + ",-1," + csv_cell(median) + "," + csv_cell(formula) +
                       "," + csv_cell(std::abs(median - formula)));
        json_rows.push_back({{"m", m}, {"graph", -1}, {"estimate", median}, {"formula", formula}});
    }

    const std::string header = "m,graph,estimate,formula,abs_deviation";
    if (p.format == "csv") {
        write_output(p.out,
                     csv_document("soficlab.spectral.v1", spectral_config(p), header, rows));
    } else if (p.format == "json") {
        Json body;
        body["rows"] = json_rows;
        write_output(p.out, json_document("soficlab.spectral.v1", spectral_config(p), body));
    } else {
        throw ValidationError("spectral: format must be csv or json");
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// rerun

int dispatch_config(const Json& config, const std::string& out);

int run_rerun(const std::string& from, const std::string& out) {
    std::ifstream in(from);
    if (!in) throw ValidationError("cannot open " + from);
    std::string first_line;
    std::getline(in, first_line);
    in.clear();
    in.seekg(0);
    Json config;
    if (!first_line.empty() && first_line[0] == '{') {
        Json doc;
        try {
            doc = Json::parse(in);
        } catch (const Json::exception& e) {
            throw ValidationError(std::string("rerun: ") + e.what());
        }
        if (!doc.contains("config")) throw ValidationError("rerun: no config in " + from);
        config = doc.at("config");
    } else {
        std::string line;
        bool found = false;
        while (std::getline(in, line)) {
            const std::string prefix = "# config=";
            if (line.rfind(prefix, 0) == 0) {
                config = Json::parse(line.substr(prefix.size()));
                found = true;
                break;
            }
        }
        if (!found) throw ValidationError("rerun: no config comment in " + from);
    }
    return dispatch_config(config, out);
}

int dispatch_config(const Json& config, const std::string& out) {
    std::string command = config.at("command").get<std::string>();
    if (command == "entropy") {
        EntropyParams p = entropy_params_from(config);
        p.out = out;
        return run_entropy(p);
    }
    if (command == "fig1") {
        Fig1Params p = fig1_params_from(config);
        p.out = out;
        return run_fig1(p);
    }
    if (command == "phase") {
        PhaseParams p = phase_params_from(config);
        p.out = out;
        return run_phase(p);
    }
    if (command == "simulate") {
        SimulateParams p = simulate_params_from(config);
        p.out = out;
        return run_simulate(p);
    }
    if (command == "enumerate") {
        EnumerateParams p = enumerate_params_from(config);
        p.out = out;
        return run_enumerate(p);
    }
    if (command == "spectral") {
        SpectralParams p = spectral_params_from(config);
        p.out = out;
        return run_spectral(p);
    }
    throw ValidationError("rerun: unknown command " + command);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"soficlab: sofic entropy and Gibbs states over random regular graphs"};
    app.require_subcommand(1);

    EntropyParams entropy;
    auto* cmd_entropy =
        app.add_subcommand("entropy", "f-invariant, Kesten-Stigum and typical entropy of a chain");
    auto* opt_ising =
        cmd_entropy->add_option("--ising,--theta", entropy.theta, "free-boundary Ising chain parameter");
    auto* opt_hardcore =
        cmd_entropy->add_option("--hardcore,--alpha", entropy.alpha, "hardcore chain density");
    auto* opt_law =
        cmd_entropy->add_option("--potts-law", entropy.law, "Potts boundary-law chain")
            ->check(CLI::IsMember({"disordered", "ordered"}));
    auto* opt_file = cmd_entropy->add_option("--chain", entropy.chain_file, "chain JSON file");
    cmd_entropy->add_option("--q", entropy.q, "alphabet size for --potts-law");
    cmd_entropy->add_option("--J", entropy.strength, "interaction strength for --potts-law");
    cmd_entropy->add_option("--r", entropy.rank, "free-group rank");
    cmd_entropy->add_option("--out", entropy.out, "output path ('-' = stdout)");

    Fig1Params fig1;
    auto* cmd_fig1 = app.add_subcommand("fig1", "typical-entropy curve of the Ising family");
    cmd_fig1->add_option("--r", fig1.rank, "free-group rank");
    cmd_fig1->add_option("--grid", fig1.grid, "number of theta grid points");
    cmd_fig1->add_option("--theta-max", fig1.theta_max, "half-width of the theta grid");
    cmd_fig1->add_option("--format", fig1.format, "csv or json");
    cmd_fig1->add_option("--out", fig1.out, "output path");

    PhaseParams phase_p;
    auto* cmd_phase = app.add_subcommand("phase", "boundary-law phase table over a J grid");
    cmd_phase->add_option("--q", phase_p.q, "alphabet size");
    cmd_phase->add_option("--r", phase_p.rank, "free-group rank");
    cmd_phase->add_option("--j-min", phase_p.j_min, "grid start");
    cmd_phase->add_option("--j-max", phase_p.j_max, "grid end");
    cmd_phase->add_option("--steps", phase_p.steps, "grid points");
    cmd_phase->add_option("--format", phase_p.format, "csv or json");
    cmd_phase->add_option("--out", phase_p.out, "output path");

    SimulateParams simulate;
    auto* cmd_simulate = app.add_subcommand("simulate", "Glauber dynamics and local-limit verdict");
    cmd_simulate->add_option("--q", simulate.q, "alphabet size");
    cmd_simulate->add_option("--r", simulate.rank, "free-group rank");
    cmd_simulate->add_option("--J", simulate.strength, "interaction strength");
    cmd_simulate->add_option("--n", simulate.n, "vertex count");
    cmd_simulate->add_option("--R", simulate.radius, "pattern radius for the report");
    cmd_simulate->add_option("--sweeps", simulate.sweeps, "total sweeps");
    cmd_simulate->add_option("--burn-in", simulate.burn_in, "burn-in sweeps");
    cmd_simulate->add_option("--replicas", simulate.replicas, "independent replicas");
    cmd_simulate->add_option("--thin", simulate.thin, "keep every thin-th sweep");
    cmd_simulate->add_option("--init", simulate.init, "random | constant | constant-cycle | chain")
        ->check(CLI::IsMember({"random", "constant", "constant-cycle", "chain"}));
    cmd_simulate->add_option("--init-symbol", simulate.init_symbol, "symbol for constant init");
    cmd_simulate->add_option("--tol", simulate.tol, "verdict tolerance");
    cmd_simulate->add_option("--seed", simulate.seed, "RNG seed");
    cmd_simulate->add_flag("--full-report", simulate.full_report, "include per-vertex marginals");
    cmd_simulate->add_option("--dump-samples", simulate.dump_samples, "binary sample dump path");
    cmd_simulate->add_option("--out", simulate.out, "output path");

    EnumerateParams enumerate;
    auto* cmd_enumerate =
        app.add_subcommand("enumerate", "exact microstate counts and growth rates");
    auto* eopt_ising = cmd_enumerate->add_option("--theta", enumerate.theta, "Ising parameter");
    auto* eopt_hardcore =
        cmd_enumerate->add_option("--hardcore,--alpha", enumerate.alpha, "hardcore density");
    auto* eopt_file = cmd_enumerate->add_option("--chain", enumerate.chain_file, "chain JSON file");
    cmd_enumerate->add_option("--r", enumerate.rank, "free-group rank");
    cmd_enumerate->add_option("--R", enumerate.radius, "pattern radius");
    cmd_enumerate->add_option("--eps", enumerate.eps, "surrogate-metric ball radius");
    cmd_enumerate->add_option("--n-list", enumerate.n_list, "comma-separated vertex counts");
    cmd_enumerate->add_option("--graphs", enumerate.graphs, "graphs per size");
    cmd_enumerate->add_option("--seed", enumerate.seed, "RNG seed");
    cmd_enumerate->add_option("--budget", enumerate.budget, "labeling enumeration budget");
    cmd_enumerate->add_option("--format", enumerate.format, "csv or json");
    cmd_enumerate->add_option("--out", enumerate.out, "output path");

    SpectralParams spectral;
    auto* cmd_spectral =
        app.add_subcommand("spectral", "word-averaging operator norms vs the tree value");
    cmd_spectral->add_option("--n", spectral.n, "vertex count");
    cmd_spectral->add_option("--r", spectral.rank, "free-group rank");
    cmd_spectral->add_option("--m-list", spectral.m_list, "comma-separated word lengths");
    cmd_spectral->add_option("--graphs", spectral.graphs, "graph samples");
    cmd_spectral->add_option("--iters", spectral.iters, "power-iteration cap");
    cmd_spectral->add_option("--seed", spectral.seed, "RNG seed");
    cmd_spectral->add_option("--format", spectral.format, "csv or json");
    cmd_spectral->add_option("--out", spectral.out, "output path");

    std::string rerun_from, rerun_out = "-";
    auto* cmd_rerun = app.add_subcommand("rerun", "replay a persisted config");
    cmd_rerun->add_option("--from", rerun_from, "report or CSV with an embedded config")
        ->required();
    cmd_rerun->add_option("--out", rerun_out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (cmd_entropy->parsed()) {
            int picked = 0;
            if (*opt_ising) {
                entropy.kind = "ising";
                ++picked;
            }
            if (*opt_hardcore) {
                entropy.kind = "hardcore";
                ++picked;
            }
            if (*opt_law) {
                entropy.kind = "potts-law";
                ++picked;
            }
            if (*opt_file) {
                entropy.kind = "file";
                ++picked;
            }
            if (picked != 1)
                throw ValidationError(
                    "entropy: pick exactly one of --ising, --hardcore, --potts-law, --chain");
            return run_entropy(entropy);
        }
        if (cmd_fig1->parsed()) return run_fig1(fig1);
        if (cmd_phase->parsed()) return run_phase(phase_p);
        if (cmd_simulate->parsed()) return run_simulate(simulate);
        if (cmd_enumerate->parsed()) {
            int picked = 0;
            if (*eopt_ising) {
                enumerate.kind = "ising";
                ++picked;
            }
            if (*eopt_hardcore) {
                enumerate.kind = "hardcore";
                ++picked;
            }
            if (*eopt_file) {
                enumerate.kind = "file";
                ++picked;
            }
            if (picked > 1) throw ValidationError("enumerate: pick at most one chain source");
            return run_enumerate(enumerate);
        }
        if (cmd_spectral->parsed()) return run_spectral(spectral);
        if (cmd_rerun->parsed()) return run_rerun(rerun_from, rerun_out);
    } catch (const BudgetError& e) {
        std::cerr << "budget refusal: " << e.what() << " (required labelings: " << e.required
                  << ")\n";
        return kExitBudget;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
