#include "soficlab/serialize.hpp"

#include <ostream>
#include <sstream>

#include "soficlab/errors.hpp"

namespace soficlab {

Json chain_to_json(const MarkovChainSpec& chain, const Interaction* interaction) {
    Json doc;
    doc["q"] = chain.q;
    doc["r"] = chain.rank;
    doc["p1"] = chain.marginal;
    doc["M"] = chain.transition;
    if (interaction) {
        doc["h"] = interaction->field;
        doc["J"] = interaction->pair;
    } else {
        doc["h"] = Vec(static_cast<std::size_t>(chain.q), 0.0);
        doc["J"] = make_mat(static_cast<std::size_t>(chain.q), static_cast<std::size_t>(chain.q));
    }
    return doc;
}

MarkovChainSpec chain_from_json(const Json& doc) {
    try {
        MarkovChainSpec chain;
        chain.q = doc.at("q").get<int>();
        chain.rank = doc.at("r").get<int>();
        chain.marginal = doc.at("p1").get<Vec>();
        chain.transition = doc.at("M").get<Mat>();
        return chain;
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("chain_from_json: ") + e.what());
    }
}

Interaction interaction_from_json(const Json& doc) {
    try {
        int q = doc.at("q").get<int>();
        Interaction u = zero_interaction(q);
        if (doc.contains("h")) u.field = doc.at("h").get<Vec>();
        if (doc.contains("J")) u.pair = doc.at("J").get<Mat>();
        if (u.field.size() != static_cast<std::size_t>(q) ||
            u.pair.size() != static_cast<std::size_t>(q))
            throw ValidationError("interaction_from_json: size mismatch");
        return u;
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("interaction_from_json: ") + e.what());
    }
}

Json graph_to_json(const PermGraph& g) {
    Json doc;
    doc["n"] = g.size();
    doc["r"] = g.rank();
    doc["perms"] = g.perms();
    return doc;
}

PermGraph graph_from_json(const Json& doc) {
    try {
        int n = doc.at("n").get<int>();
        int rank = doc.at("r").get<int>();
        auto perms = doc.at("perms").get<std::vector<std::vector<int>>>();
        PermGraph g(rank, std::move(perms));
        if (g.size() != n) throw ValidationError("graph_from_json: n mismatch");
        return g;
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("graph_from_json: ") + e.what());
    }
}

Json labeling_to_json(const Labeling& x) {
    Json doc = Json::array();
    for (auto s : x) doc.push_back(static_cast<int>(s));
    return doc;
}

Labeling labeling_from_json(const Json& doc) {
    try {
        Labeling x;
        for (const auto& v : doc) {
            int s = v.get<int>();
            if (s < 0 || s > 255) throw ValidationError("labeling_from_json: symbol out of range");
            x.push_back(static_cast<std::uint8_t>(s));
        }
        return x;
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("labeling_from_json: ") + e.what());
    }
}

namespace {

std::string pattern_key_digits(const std::string& key, int q) {
    std::ostringstream os;
    bool wide = q > 10;
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (wide && i > 0) os << '-';
        os << static_cast<int>(static_cast<unsigned char>(key[i]));
    }
    return os.str();
}

} // namespace

std::string pattern_distribution_to_csv(const PatternDistribution& dist) {
    std::ostringstream os;
    os << "# schema=soficlab.patterns.v1\n";
    os << "# rank=" << dist.rank << " radius=" << dist.radius << " q=" << dist.q << "\n";
    os << "pattern,probability\n";
    for (const auto& [key, w] : dist.weights)
        os << pattern_key_digits(key, dist.q) << "," << format_double(w) << "\n";
    return os.str();
}

void write_samples_binary(std::ostream& out, const GibbsSamples& samples, int n) {
    auto put_u32 = [&](std::uint32_t v) {
        char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
        out.write(bytes, 4);
    };
    out.write("SFLB", 4);
    put_u32(static_cast<std::uint32_t>(n));
    put_u32(static_cast<std::uint32_t>(samples.q));
    put_u32(static_cast<std::uint32_t>(samples.sample_count()));
    for (const auto& replica : samples.per_replica)
        for (const auto& x : replica)
            out.write(reinterpret_cast<const char*>(x.data()),
                      static_cast<std::streamsize>(x.size()));
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = seed;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::uint64_t samples_digest(const GibbsSamples& samples) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const auto& replica : samples.per_replica)
        for (const auto& x : replica) hash = fnv1a64(x.data(), x.size(), hash);
    return hash;
}

std::string format_double(double value) {
    return Json(value).dump();
}

} // namespace soficlab
