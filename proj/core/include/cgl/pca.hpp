#pragma once

#include "cgl/dense.hpp"

namespace cgl {

/// Projects centered data onto its top-k principal directions.
///
/// The sample covariance (cols x cols) is eigendecomposed with cyclic Jacobi
/// rotations. Components are ordered by non-increasing eigenvalue; exact ties
/// are broken by ascending lexicographic order of the eigenvectors, and each
/// eigenvector's sign is canonicalized, so the output is deterministic even
/// for rank-deficient input.
///
/// Requires k <= d.cols() and d.rows() >= 2.
DenseMatrix pca_project(const DenseMatrix& d, std::size_t k);

}  // namespace cgl
