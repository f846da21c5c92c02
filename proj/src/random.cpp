#include "mtsylv/random.hpp"

namespace mtsylv {

Matrix Rng::uniform_matrix(Index rows, Index cols) {
  Matrix M(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) M(i, j) = uniform();
  }
  return M;
}

Vector Rng::symmetric_vector(Index size) {
  Vector v(size);
  for (Index i = 0; i < size; ++i) v(i) = 2.0 * uniform() - 1.0;
  return v;
}

}  // namespace mtsylv
