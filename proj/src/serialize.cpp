#include "alglift/serialize.hpp"

namespace alglift {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw FormatError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::size_t one_based(const Json& j) {
  const long v = j.get<long>();
  if (v < 1) throw FormatError("block indices are 1-based");
  return static_cast<std::size_t>(v - 1);
}

}  // namespace

Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw FormatError("complex numbers are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("matrices are arrays of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw FormatError("ragged matrix rows");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

Json to_json(const RootedPolynomial& p) {
  Json fs = Json::array();
  for (const auto& f : p.factors()) fs.push_back({{"root", complex_to_json(f.root)}, {"mult", f.mult}});
  return {{"factors", fs}};
}

RootedPolynomial polynomial_from_json(const Json& j) {
  std::vector<Factor> fs;
  for (const auto& f : require(j, "factors"))
    fs.push_back({complex_from_json(require(f, "root")), require(f, "mult").get<int>()});
  try {
    return fs.empty() ? RootedPolynomial() : RootedPolynomial(std::move(fs));
  } catch (const PreconditionError& e) {
    throw FormatError(e.what());
  }
}

Json to_json(const BlockElement& x) {
  Json blocks = Json::array();
  for (const auto& b : x.blocks()) blocks.push_back(matrix_to_json(b));
  return {{"dims", x.algebra().dims()}, {"blocks", blocks}};
}

BlockElement element_from_json(const Json& j) {
  const auto dims = require(j, "dims").get<std::vector<int>>();
  std::vector<CMatrix> blocks;
  for (const auto& b : require(j, "blocks")) blocks.push_back(matrix_from_json(b));
  try {
    return BlockElement(BlockAlgebra(dims), std::move(blocks));
  } catch (const PreconditionError& e) {
    throw FormatError(e.what());
  }
}

Json to_json(const IdealSpec& s) {
  Json sup = Json::array();
  for (std::size_t k : s.support()) sup.push_back(k + 1);
  return {{"support", sup}};
}

IdealSpec ideal_from_json(const Json& j) {
  const Json& sup = j.is_array() ? j : require(j, "support");
  std::vector<std::size_t> s;
  for (const auto& k : sup) s.push_back(one_based(k));
  try {
    return IdealSpec(std::move(s));
  } catch (const PreconditionError& e) {
    throw FormatError(e.what());
  }
}

Json to_json(const IdealChain& c) {
  Json out = Json::array();
  for (const auto& s : c.stages()) out.push_back(to_json(s));
  return out;
}

IdealChain chain_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("an ideal chain is a list of supports");
  std::vector<IdealSpec> stages;
  for (const auto& s : j) stages.push_back(ideal_from_json(s));
  try {
    return IdealChain(std::move(stages));
  } catch (const PreconditionError& e) {
    throw FormatError(e.what());
  }
}

Json to_json(const LiftProblem& p) {
  return {{"algebra", {{"dims", p.algebra.dims()}}},
          {"chain", to_json(p.chain)},
          {"target", to_json(p.target)},
          {"relation", to_json(p.relation)},
          {"bound", p.bound}};
}

LiftProblem lift_problem_from_json(const Json& j) {
  LiftProblem p;
  try {
    p.algebra = BlockAlgebra(require(require(j, "algebra"), "dims").get<std::vector<int>>());
  } catch (const PreconditionError& e) {
    throw FormatError(e.what());
  }
  p.chain = chain_from_json(require(j, "chain"));
  p.target = element_from_json(require(j, "target"));
  p.relation = polynomial_from_json(require(j, "relation"));
  p.bound = require(j, "bound").get<double>();
  return p;
}

Json to_json(const LiftReport& r) {
  Json blocks = Json::array();
  for (std::size_t k : r.lift_blocks) blocks.push_back(k + 1);
  Json projections = Json::array();
  for (const auto& fam : r.projections_used) {
    Json f = Json::array();
    for (const auto& p : fam) f.push_back(matrix_to_json(p));
    projections.push_back(std::move(f));
  }
  const auto& c = r.certificate;
  return {{"stage_index", r.stage_index},
          {"lift_blocks", blocks},
          {"lift", to_json(r.lift)},
          {"m", r.m},
          {"relation", to_json(r.relation)},
          {"projections_used", projections},
          {"certificate",
           {{"relation_residual", c.relation_residual},
            {"norm_of_lift", c.norm_of_lift},
            {"quotient_match", c.quotient_match},
            {"assembly_error", c.assembly_error}}}};
}

Json to_json(const TriangularForm& f) {
  Json labels = Json::array();
  for (const auto& l : f.diagonal_labels) labels.push_back(complex_to_json(l));
  return {{"U", matrix_to_json(f.U)},
          {"R", matrix_to_json(f.R)},
          {"flag_dims", f.flag_dims},
          {"labels", labels}};
}

Json to_json(const StructureDecomposition& d) {
  Json peeled = Json::array();
  for (const auto& p : d.peeled)
    peeled.push_back({{"root", complex_to_json(p.root)}, {"projection", matrix_to_json(p.projection)}});
  Json out = {{"m", d.m},
              {"peeled", peeled},
              {"corner_projection", matrix_to_json(d.corner_projection)},
              {"residual", to_json(d.residual)}};
  out["S"] = d.has_corner() ? matrix_to_json(d.S) : Json(nullptr);
  return out;
}

Json to_json(const RadiusResult& r) {
  Json hist = Json::array();
  for (const auto& [it, v] : r.history) hist.push_back(Json::array({it, v}));
  return {{"value", r.value},         {"oracle", r.oracle},
          {"attained", r.attained},   {"converged", r.converged},
          {"iterations", r.iterations}, {"history", hist},
          {"witness", to_json(r.witness)}};
}

}  // namespace alglift
