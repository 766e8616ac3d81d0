#include "vcd/simmatrix.hpp"

#include <cstdio>

namespace vcd {

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols,
                                   std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matrix of " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                    " given " + std::to_string(values_.size()) + " values");
  }
}

SimilarityMatrix compute_similarity_matrix(const FrameFeatureSequence& reference,
                                           const FrameFeatureSequence& query) {
  if (reference.dim() != query.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "reference '" + reference.video_id() + "' has dim " +
                    std::to_string(reference.dim()) + ", query '" + query.video_id() +
                    "' has dim " + std::to_string(query.dim()));
  }
  const std::size_t n = reference.length();
  const std::size_t m = query.length();
  const std::size_t dim = reference.dim();
  std::vector<double> out(n * m);
  const double* ref = reference.values().data();
  const double* qry = query.values().data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* a = ref + i * dim;
    for (std::size_t j = 0; j < m; ++j) {
      const double* b = qry + j * dim;
      double dot = 0.0;
      for (std::size_t k = 0; k < dim; ++k) dot += a[k] * b[k];
      out[i * m + j] = dot;
    }
  }
  return SimilarityMatrix(n, m, std::move(out));
}

namespace {

void check_bounds(const SimilarityMatrix& s, const CopySegmentPair& gt) {
  validate_segment(gt, static_cast<std::int32_t>(s.cols()),
                   static_cast<std::int32_t>(s.rows()));
}

void set_diagonal(SimilarityMatrix& s, const CopySegmentPair& gt) {
  const auto steps = std::min(gt.query_length(), gt.ref_length());
  for (std::int32_t k = 0; k < steps; ++k) {
    s(static_cast<std::size_t>(gt.ref_start + k),
      static_cast<std::size_t>(gt.query_start + k)) = 1.0;
  }
}

bool inside(const CopySegmentPair& gt, std::size_t ref, std::size_t query) {
  const auto r = static_cast<std::int32_t>(ref);
  const auto q = static_cast<std::int32_t>(query);
  return r >= gt.ref_start && r < gt.ref_end && q >= gt.query_start && q < gt.query_end;
}

}  // namespace

SimilarityMatrix modify_with_ground_truth(const SimilarityMatrix& s,
                                          const CopySegmentPair& gt,
                                          ModificationMode mode) {
  return modify_with_ground_truth(s, std::span(&gt, 1), mode);
}

SimilarityMatrix modify_with_ground_truth(const SimilarityMatrix& s,
                                          std::span<const CopySegmentPair> gt,
                                          ModificationMode mode) {
  for (const auto& g : gt) check_bounds(s, g);
  SimilarityMatrix out = s;
  if (mode == ModificationMode::kZeroOutside) {
    for (std::size_t i = 0; i < out.rows(); ++i) {
      for (std::size_t j = 0; j < out.cols(); ++j) {
        bool in_any = false;
        for (const auto& g : gt) in_any = in_any || inside(g, i, j);
        if (!in_any) out(i, j) = 0.0;
      }
    }
  }
  for (const auto& g : gt) set_diagonal(out, g);
  return out;
}

std::string matrix_to_csv(const SimilarityMatrix& s) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = 0; j < s.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.6f", s(i, j));
      if (j > 0) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void dump_matrix_csv(const std::filesystem::path& path, const SimilarityMatrix& s) {
  write_text_file(path, matrix_to_csv(s));
}

}  // namespace vcd
