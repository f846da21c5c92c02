#pragma once

// Matrix Market I/O (real matrices only).

#include <string>

#include "mtsylv/problem.hpp"

namespace mtsylv {

/// Reads coordinate or array format, field real or integer, symmetry
/// general or symmetric (expanded on read). Coordinate files yield a sparse
/// coefficient, array files a dense one. Throws ParseError carrying the
/// line number, or Error(Io) if the file cannot be opened.
Coefficient matrix_market_read(const std::string& path);

/// Writes "coordinate real general" with the nonzero entries only, column
/// by column, each value with 17 significant digits.
void matrix_market_write(const std::string& path, const Coefficient& M);

}  // namespace mtsylv
