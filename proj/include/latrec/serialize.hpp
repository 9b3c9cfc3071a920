#pragma once

#include "latrec/instance.hpp"
#include "latrec/instruments.hpp"
#include "latrec/lattice.hpp"

#include <json.hpp>

namespace latrec {

using Json = nlohmann::json;

// Numbers use the canonical text forms: integers as decimal strings, rationals
// as "num/den" (or just "num" when the denominator is 1), PrecReal as hex.
// Readers throw std::invalid_argument naming the offending field.

BigInt bigint_from_json(const Json& j, const std::string& field);
Rational rational_from_json(const Json& j, const std::string& field);

Json to_json(const SupportValue& v);
SupportValue support_value_from_json(const Json& j, const std::string& field);
Json to_json(const Failure& f);
Json to_json(const PrecisionPolicy& p);
PrecisionPolicy policy_from_json(const Json& j);

Json to_json(const GenParams& p);
GenParams params_from_json(const Json& j);

Json to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

Json to_json(const RecoveryReport& rep, const Instance& inst);

Json to_json(const LatticeBasis& b);
LatticeBasis basis_from_json(const Json& j);

BoundsQuery bounds_query_from_json(const Json& j);
/// Every threshold that applies to the query, with the exact rational intermediates.
Json bounds_report(const BoundsQuery& q);

}  // namespace latrec
