#pragma once

#include "ldr/types.hpp"

namespace ldr::fft {

/// Unitary DFT of each row (length-T forward transform scaled by 1/sqrt(T)),
/// so Parseval holds exactly: ||x||_F = ||dft_rows(x)||_F.
ComplexMatrix dft_rows(const Matrix& x);

/// Unitary inverse DFT of each row.
ComplexMatrix idft_rows(const ComplexMatrix& X);

/// Unitary inverse DFT of each row, asserting the result is real.
/// `imag_tol` bounds the residual imaginary part relative to the magnitude.
Matrix idft_rows_real(const ComplexMatrix& X, double imag_tol = 1e-9);

}  // namespace ldr::fft
