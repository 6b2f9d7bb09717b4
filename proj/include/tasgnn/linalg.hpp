#pragma once

#include <vector>

#include "tasgnn/matrix.hpp"

namespace tasgnn::linalg {

// Modified Gram-Schmidt (two passes) over the columns of q, in place.
// Columns that vanish numerically are set to zero.
void orthonormalize(Matrix& q);

// Cyclic Jacobi on a small symmetric matrix. Eigenvalues come back in
// descending order; vectors holds the matching eigenvectors as columns.
void symmetric_eigen(Matrix a, std::vector<double>& values, Matrix& vectors);

}  // namespace tasgnn::linalg
