#pragma once

#include "eqlab/ag3_mapping.hpp"

#include <json.hpp>

namespace eqlab {

using Json = nlohmann::ordered_json;

Json jet_to_json(const JetScalar& j);
JetScalar jet_from_json(const Json& j);

Json tensor_to_json(const TensorField& t);
TensorField tensor_from_json(const Json& j);

Json space_to_json(const Space& s);
Space space_from_json(const Json& j);

Json mapping_to_json(const AG3Mapping& m);
AG3Mapping mapping_from_json(const Json& j);

Json pair_to_json(const MappedPair& p);
MappedPair pair_from_json(const Json& j);

}  // namespace eqlab
