#pragma once
// Small dense matrix helpers for the 2n x 2n systems this project meets
// (n <= a handful). Deterministic pivoting: first strict maximum wins.

#include <vector>

namespace hamadv {

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a; // row-major

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

    static Matrix identity(int n);
};

/// Determinant via LU with partial pivoting.
double determinant(Matrix m);

/// Solves m x = b; m must be square and non-singular.
std::vector<double> solve(Matrix m, std::vector<double> b);

} // namespace hamadv
