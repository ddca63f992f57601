#pragma once

#include <string>

#include <json.hpp>

#include "gcilab/blconst.hpp"
#include "gcilab/convex.hpp"
#include "gcilab/flow.hpp"
#include "gcilab/gaussmc.hpp"
#include "gcilab/gcicheck.hpp"
#include "gcilab/symmat.hpp"

namespace gcilab::json_io {

using nlohmann::json;

// All readers throw SchemaError with the offending field path, e.g. "params.sets[1].normals[0]".
double read_number(const json& j, const std::string& path);
std::uint64_t read_uint(const json& j, const std::string& path);
Vector read_vector(const json& j, const std::string& path, std::size_t expected = 0);
SymMatrix read_sym(const json& j, const std::string& path);
Matrix read_matrix(const json& j, const std::string& path);
ConvexSet read_set(const json& j, const std::string& path);
BLDatum read_datum(const json& j, const std::string& path);
ConstraintBand read_band(const json& j, const std::string& path, const BLDatum& d);

// Non-finite doubles become null.
json number(double v);
json to_json(const Vector& v);
json to_json(const SymMatrix& m);  // {"n": n, "data": row-major}
json to_json(const Matrix& m);     // {"rows", "cols", "data"}
json to_json(const Subspace& s);   // {"ambient_dim", "dim", "basis": [vectors]}
json to_json(const ConvexSet& k);
json to_json(const BLDatum& d);
json to_json(const Estimate& e);
json to_json(const RestrictedGaussianStats& s);
json to_json(const CenterResult& r);
json to_json(const GciReport& r);
json to_json(const EqualityStructure& r);
json to_json(const TranslationResult& r);
json to_json(const CounterexampleResult& r);
json to_json(const GaussianBLResult& r);
json to_json(const FlowReport& r);
json to_json(const FradeliziResult& r);

}  // namespace gcilab::json_io
