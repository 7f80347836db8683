#pragma once

#include <cstddef>
#include <vector>

#include "alglift/types.hpp"

namespace alglift {

/// Finite direct sum M_{n_1} + ... + M_{n_K} of full matrix algebras.
/// K = 0 is allowed only as the zero algebra A/A produced by quotients.
class BlockAlgebra {
 public:
  BlockAlgebra() = default;
  explicit BlockAlgebra(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  std::size_t num_blocks() const { return dims_.size(); }
  int dim(std::size_t k) const { return dims_.at(k); }

  friend bool operator==(const BlockAlgebra&, const BlockAlgebra&) = default;

 private:
  std::vector<int> dims_;
};

/// Element of a BlockAlgebra: one square matrix per block.
class BlockElement {
 public:
  BlockElement() = default;
  BlockElement(BlockAlgebra algebra, std::vector<CMatrix> blocks);

  static BlockElement zero(const BlockAlgebra& algebra);
  static BlockElement identity(const BlockAlgebra& algebra);

  const BlockAlgebra& algebra() const { return algebra_; }
  const std::vector<CMatrix>& blocks() const { return blocks_; }
  const CMatrix& block(std::size_t k) const { return blocks_.at(k); }
  CMatrix& block(std::size_t k) { return blocks_.at(k); }
  std::size_t num_blocks() const { return blocks_.size(); }

  BlockElement operator*(const BlockElement& other) const;
  BlockElement operator+(const BlockElement& other) const;
  BlockElement operator-(const BlockElement& other) const;

  friend bool operator==(const BlockElement& a, const BlockElement& b);

 private:
  BlockAlgebra algebra_;
  std::vector<CMatrix> blocks_;
};

/// Block-subset ideal I_S = {x : x_k = 0 for k outside S}. Indices are
/// 0-based here; the JSON form is 1-based.
class IdealSpec {
 public:
  IdealSpec() = default;
  explicit IdealSpec(std::vector<std::size_t> support);

  const std::vector<std::size_t>& support() const { return support_; }
  bool contains(std::size_t k) const;
  bool is_subset_of(const IdealSpec& other) const;
  /// Throws PreconditionError if some index is >= num_blocks.
  void check_against(const BlockAlgebra& algebra) const;
  /// Blocks outside S in increasing order: block j of a quotient element is
  /// block complement(K)[j] of the original algebra.
  std::vector<std::size_t> complement(std::size_t num_blocks) const;

  static IdealSpec whole(const BlockAlgebra& algebra);

  friend bool operator==(const IdealSpec&, const IdealSpec&) = default;

 private:
  std::vector<std::size_t> support_;  // sorted, unique
};

/// Increasing chain S_1 <= S_2 <= ... <= S_M; the union is S_M.
class IdealChain {
 public:
  IdealChain() = default;
  explicit IdealChain(std::vector<IdealSpec> stages);

  const std::vector<IdealSpec>& stages() const { return stages_; }
  std::size_t size() const { return stages_.size(); }
  const IdealSpec& stage(std::size_t n) const { return stages_.at(n); }
  const IdealSpec& limit() const { return stages_.back(); }
  void check_against(const BlockAlgebra& algebra) const;

 private:
  std::vector<IdealSpec> stages_;
};

/// Operator norm: max over blocks of the largest singular value.
double norm(const BlockElement& x);

/// Max over blocks of the maximal eigenvalue modulus.
double spectral_radius(const BlockElement& x);

/// Image in A/I: the blocks outside S, over the complementary algebra.
BlockElement quotient(const BlockElement& x, const IdealSpec& ideal);

/// Restriction of x to the blocks listed in `keep` (in that order).
BlockElement restrict_blocks(const BlockElement& x, const std::vector<std::size_t>& keep);

/// Default bound on cond(1 + i) accepted by conjugate().
inline constexpr double kMaxConjugationCondition = 1e12;

/// (1 + i) x (1 + i)^{-1} for i supported on S. Blocks outside S are copied
/// untouched. Throws PreconditionError if i has a nonzero block outside S,
/// NumericalError if some 1 + i_k is singular or has condition number above
/// max_condition.
BlockElement conjugate(const BlockElement& x, const BlockElement& i, const IdealSpec& ideal,
                       double max_condition = kMaxConjugationCondition);

/// Largest cond(1 + i_k) over the blocks of i.
double conjugator_condition(const BlockElement& i);

}  // namespace alglift
