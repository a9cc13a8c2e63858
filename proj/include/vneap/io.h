#ifndef VNEAP_IO_H
#define VNEAP_IO_H

#include <string>
#include <vector>

#include "json.hpp"
#include "vneap/domain.h"

namespace vneap {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Throws InputError on a missing file or malformed JSON.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Substrate: {"nodes": [...], "arcs": [...]} for directed input or
// {"nodes": [...], "links": [...]} for undirected links that expand into two
// opposing arcs.
SubstrateNetwork substrate_from_json(const Json& j);
Json substrate_to_json(const SubstrateNetwork& net);

AppCatalog catalog_from_json(const Json& j);
Json catalog_to_json(const AppCatalog& apps);

// Coefficients are numbers or the string "FORBIDDEN".
EfficiencyMap efficiency_from_json(const Json& j);
Json efficiency_to_json(const EfficiencyMap& map);

std::vector<Request> requests_from_json(const Json& j);
Json requests_to_json(const std::vector<Request>& requests);

Json embeddings_to_json(const Instance& instance,
                        const std::vector<ResolvedRequest>& requests,
                        const std::vector<IntegralEmbedding>& embeddings);
std::vector<IntegralEmbedding> embeddings_from_json(
    const Instance& instance, const std::vector<ResolvedRequest>& requests,
    const Json& j);

}  // namespace vneap

#endif  // VNEAP_IO_H
