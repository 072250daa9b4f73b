#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "riccati/aut_classify.hpp"
#include "riccati/holonomy.hpp"
#include "riccati/normal_form.hpp"
#include "riccati/poly.hpp"

namespace riccati::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0.0";

/// Serializes with every float printed as %.17g so equal inputs give identical bytes.
std::string dump(const Json& j, int indent = 2);

// Readers throw Error(ParseError) on malformed input.
Complex complex_from_json(const Json& j);
Matrix3c matrix_from_json(const Json& j);
MultiPoly poly_from_json(const Json& j);
PolyVectorField field_from_json(const Json& j);
LoopPath loop_from_json(const Json& j);
Complex parse_complex_text(const std::string& text);  // "re,im" or "re"

Json to_json(Complex z);
Json to_json(const Matrix3c& m);
Json to_json(const Vector3c& v);
Json to_json(const MultiPoly& p);
Json to_json(const PolyVectorField& f);
Json to_json(const LoopPath& loop);
Json to_json(const Rejection& r);
Json to_json(const FiberSet& f);
Json to_json(const HolonomyResult& h);
Json to_json(const LocalModel& m);

Json classification_report(const AutClassification& c);
Json cp2_report(const PolyVectorField& X, const CheckResult<RiccatiCp2Form>& r);
Json cn_report(const PolyVectorField& X, int n, const CheckResult<RiccatiCnForm>& r);
Json holonomy_report(const HolonomyResult& h);
Json generators_report(Complex base, const std::vector<GeneratorResult>& gens);
Json synthesis_report(const SynthesisReport& r);
Json error_report(const std::string& command, ErrorKind kind, const std::string& message);


}  // namespace riccati::io
