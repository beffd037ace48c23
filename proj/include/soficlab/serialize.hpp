#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "soficlab/mcmc.hpp"
#include "soficlab/pattern.hpp"
#include "soficlab/perm_graph.hpp"
#include "soficlab/spin.hpp"

namespace soficlab {

// Field order is part of the format; ordered_json preserves insertion order.
using Json = nlohmann::ordered_json;

// Chain document: {"q":..,"r":..,"p1":[..],"M":[[..]],"h":[..],"J":[[..]]}.
// h and J default to zero when absent.
Json chain_to_json(const MarkovChainSpec& chain, const Interaction* interaction = nullptr);
MarkovChainSpec chain_from_json(const Json& doc);
Interaction interaction_from_json(const Json& doc);

// Graph document: {"n":..,"r":..,"perms":[[..],..]}.
Json graph_to_json(const PermGraph& g);
PermGraph graph_from_json(const Json& doc);

Json labeling_to_json(const Labeling& x);
Labeling labeling_from_json(const Json& doc);

// CSV rows (pattern-key, probability) in canonical word order; pattern keys
// are the base-q labels along the canonical address list. Metadata lines
// (rank, radius, q) are '#' comments.
std::string pattern_distribution_to_csv(const PatternDistribution& dist);

// Binary sample dump: 16-byte header (magic "SFLB", u32 n, u32 q, u32 count,
// little endian) followed by count rows of n symbol bytes.
void write_samples_binary(std::ostream& out, const GibbsSamples& samples, int n);
std::uint64_t samples_digest(const GibbsSamples& samples);

// Shortest round-trip decimal form (what the JSON writer emits).
std::string format_double(double value);

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ull);

} // namespace soficlab
