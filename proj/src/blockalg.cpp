#include "alglift/blockalg.hpp"

#include <algorithm>

#include "alglift/linalg.hpp"

namespace alglift {

BlockAlgebra::BlockAlgebra(std::vector<int> dims) : dims_(std::move(dims)) {
  for (int d : dims_)
    if (d < 1) throw PreconditionError("block dimensions must be positive");
}

BlockElement::BlockElement(BlockAlgebra algebra, std::vector<CMatrix> blocks)
    : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
  if (blocks_.size() != algebra_.num_blocks())
    throw PreconditionError("block count does not match the algebra");
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    if (blocks_[k].rows() != algebra_.dim(k) || blocks_[k].cols() != algebra_.dim(k))
      throw PreconditionError("block " + std::to_string(k + 1) + " has the wrong size");
}

BlockElement BlockElement::zero(const BlockAlgebra& algebra) {
  std::vector<CMatrix> b;
  for (int d : algebra.dims()) b.push_back(CMatrix::Zero(d, d));
  return BlockElement(algebra, std::move(b));
}

BlockElement BlockElement::identity(const BlockAlgebra& algebra) {
  std::vector<CMatrix> b;
  for (int d : algebra.dims()) b.push_back(CMatrix::Identity(d, d));
  return BlockElement(algebra, std::move(b));
}

namespace {

void require_same_algebra(const BlockElement& a, const BlockElement& b) {
  if (!(a.algebra() == b.algebra())) throw PreconditionError("elements of different algebras");
}

template <typename Op>
BlockElement blockwise(const BlockElement& a, const BlockElement& b, Op op) {
  require_same_algebra(a, b);
  std::vector<CMatrix> out;
  out.reserve(a.num_blocks());
  for (std::size_t k = 0; k < a.num_blocks(); ++k) out.push_back(op(a.block(k), b.block(k)));
  return BlockElement(a.algebra(), std::move(out));
}

}  // namespace

BlockElement BlockElement::operator*(const BlockElement& other) const {
  return blockwise(*this, other, [](const CMatrix& a, const CMatrix& b) -> CMatrix { return a * b; });
}

BlockElement BlockElement::operator+(const BlockElement& other) const {
  return blockwise(*this, other, [](const CMatrix& a, const CMatrix& b) -> CMatrix { return a + b; });
}

BlockElement BlockElement::operator-(const BlockElement& other) const {
  return blockwise(*this, other, [](const CMatrix& a, const CMatrix& b) -> CMatrix { return a - b; });
}

bool operator==(const BlockElement& a, const BlockElement& b) {
  if (!(a.algebra_ == b.algebra_)) return false;
  for (std::size_t k = 0; k < a.blocks_.size(); ++k)
    if (a.blocks_[k] != b.blocks_[k]) return false;
  return true;
}

IdealSpec::IdealSpec(std::vector<std::size_t> support) : support_(std::move(support)) {
  std::sort(support_.begin(), support_.end());
  if (std::adjacent_find(support_.begin(), support_.end()) != support_.end())
    throw PreconditionError("ideal support has repeated block indices");
}

bool IdealSpec::contains(std::size_t k) const {
  return std::binary_search(support_.begin(), support_.end(), k);
}

bool IdealSpec::is_subset_of(const IdealSpec& other) const {
  return std::includes(other.support_.begin(), other.support_.end(), support_.begin(),
                       support_.end());
}

void IdealSpec::check_against(const BlockAlgebra& algebra) const {
  for (std::size_t k : support_)
    if (k >= algebra.num_blocks())
      throw PreconditionError("ideal support index " + std::to_string(k + 1) +
                              " exceeds the block count");
}

std::vector<std::size_t> IdealSpec::complement(std::size_t num_blocks) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < num_blocks; ++k)
    if (!contains(k)) out.push_back(k);
  return out;
}

IdealSpec IdealSpec::whole(const BlockAlgebra& algebra) {
  std::vector<std::size_t> s(algebra.num_blocks());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = k;
  return IdealSpec(std::move(s));
}

IdealChain::IdealChain(std::vector<IdealSpec> stages) : stages_(std::move(stages)) {
  if (stages_.empty()) throw PreconditionError("ideal chain must have at least one stage");
  for (std::size_t n = 1; n < stages_.size(); ++n)
    if (!stages_[n - 1].is_subset_of(stages_[n]))
      throw PreconditionError("ideal chain is not increasing at stage " + std::to_string(n + 1));
}

void IdealChain::check_against(const BlockAlgebra& algebra) const {
  for (const auto& s : stages_) s.check_against(algebra);
}

double norm(const BlockElement& x) {
  double n = 0.0;
  for (const auto& b : x.blocks()) n = std::max(n, linalg::op_norm(b));
  return n;
}

double spectral_radius(const BlockElement& x) {
  double r = 0.0;
  for (const auto& b : x.blocks()) r = std::max(r, linalg::spectral_radius(b));
  return r;
}

BlockElement restrict_blocks(const BlockElement& x, const std::vector<std::size_t>& keep) {
  std::vector<int> dims;
  std::vector<CMatrix> blocks;
  for (std::size_t k : keep) {
    dims.push_back(x.algebra().dim(k));
    blocks.push_back(x.block(k));
  }
  return BlockElement(BlockAlgebra(std::move(dims)), std::move(blocks));
}

BlockElement quotient(const BlockElement& x, const IdealSpec& ideal) {
  ideal.check_against(x.algebra());
  return restrict_blocks(x, ideal.complement(x.num_blocks()));
}

double conjugator_condition(const BlockElement& i) {
  double c = 1.0;
  for (const auto& b : i.blocks()) {
    const CMatrix g = CMatrix::Identity(b.rows(), b.cols()) + b;
    c = std::max(c, linalg::condition_number(g));
  }
  return c;
}

BlockElement conjugate(const BlockElement& x, const BlockElement& i, const IdealSpec& ideal,
                       double max_condition) {
  if (!(x.algebra() == i.algebra())) throw PreconditionError("conjugate: mismatched algebra");
  ideal.check_against(x.algebra());
  BlockElement out = x;
  for (std::size_t k = 0; k < x.num_blocks(); ++k) {
    const CMatrix& ik = i.block(k);
    if (!ideal.contains(k)) {
      if (!ik.isZero(0.0))
        throw PreconditionError("conjugator is not supported on the ideal (block " +
                                std::to_string(k + 1) + ")");
      continue;
    }
    const CMatrix g = CMatrix::Identity(ik.rows(), ik.cols()) + ik;
    const double cond = linalg::condition_number(g);
    if (!(cond <= max_condition))
      throw NumericalError("1 + i is singular or ill-conditioned (cond " + std::to_string(cond) +
                           ") in block " + std::to_string(k + 1));
    const CMatrix g_inv = Eigen::PartialPivLU<CMatrix>(g).inverse();
    out.block(k) = g * x.block(k) * g_inv;
  }
  return out;
}

}  // namespace alglift
