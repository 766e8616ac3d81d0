#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vcd/core.hpp"

namespace vcd {

/// Dense N x M cosine similarities. Rows index reference frames, columns
/// index query frames.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t ref, std::size_t query) const {
    return values_[ref * cols_ + query];
  }
  double& operator()(std::size_t ref, std::size_t query) {
    return values_[ref * cols_ + query];
  }
  std::span<const double> row(std::size_t ref) const {
    return {values_.data() + ref * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

SimilarityMatrix compute_similarity_matrix(const FrameFeatureSequence& reference,
                                           const FrameFeatureSequence& query);

enum class ModificationMode {
  kDiagonalOnly,  // 1 on the block diagonal, everything else untouched
  kZeroOutside,   // additionally zero every cell outside the block(s)
};

/// Ground-truth oracle modification: the block diagonal of `gt` is set to 1.
SimilarityMatrix modify_with_ground_truth(const SimilarityMatrix& s,
                                          const CopySegmentPair& gt,
                                          ModificationMode mode = ModificationMode::kDiagonalOnly);

/// Applies every segment's diagonal; in kZeroOutside mode only cells outside
/// all blocks are zeroed.
SimilarityMatrix modify_with_ground_truth(const SimilarityMatrix& s,
                                          std::span<const CopySegmentPair> gt,
                                          ModificationMode mode = ModificationMode::kDiagonalOnly);

std::string matrix_to_csv(const SimilarityMatrix& s);
void dump_matrix_csv(const std::filesystem::path& path, const SimilarityMatrix& s);

}  // namespace vcd
