#pragma once

#include <json.hpp>

#include "alglift/blockalg.hpp"
#include "alglift/decomp.hpp"
#include "alglift/lifting.hpp"
#include "alglift/polynomial.hpp"
#include "alglift/radius.hpp"

// JSON forms: complex numbers are [re, im]; matrices are row-major nested
// arrays of complex numbers; block and ideal indices are 1-based.
namespace alglift {

using Json = nlohmann::json;

Json complex_to_json(const Complex& z);
Complex complex_from_json(const Json& j);
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

Json to_json(const RootedPolynomial& p);
RootedPolynomial polynomial_from_json(const Json& j);

Json to_json(const BlockElement& x);
BlockElement element_from_json(const Json& j);

Json to_json(const IdealSpec& s);
IdealSpec ideal_from_json(const Json& j);
Json to_json(const IdealChain& c);
IdealChain chain_from_json(const Json& j);

Json to_json(const LiftProblem& p);
LiftProblem lift_problem_from_json(const Json& j);
Json to_json(const LiftReport& r);

Json to_json(const TriangularForm& f);
Json to_json(const StructureDecomposition& d);
Json to_json(const RadiusResult& r);

}  // namespace alglift
