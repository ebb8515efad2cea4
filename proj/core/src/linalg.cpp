#include "hamadv/linalg.hpp"

#include <cmath>

#include "hamadv/errors.hpp"

namespace hamadv {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

double determinant(Matrix m) {
    if (m.rows != m.cols) raise(Errc::validation_error, "determinant of non-square matrix");
    const int n = m.rows;
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int pivot = k;
        double best = std::fabs(m.at(k, k));
        for (int r = k + 1; r < n; ++r) {
            const double v = std::fabs(m.at(r, k));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (pivot != k) {
            for (int c = 0; c < n; ++c) std::swap(m.at(k, c), m.at(pivot, c));
            det = -det;
        }
        det *= m.at(k, k);
        for (int r = k + 1; r < n; ++r) {
            const double f = m.at(r, k) / m.at(k, k);
            for (int c = k; c < n; ++c) m.at(r, c) -= f * m.at(k, c);
        }
    }
    return det;
}

std::vector<double> solve(Matrix m, std::vector<double> b) {
    if (m.rows != m.cols || static_cast<int>(b.size()) != m.rows)
        raise(Errc::validation_error, "solve: shape mismatch");
    const int n = m.rows;
    for (int k = 0; k < n; ++k) {
        int pivot = k;
        double best = std::fabs(m.at(k, k));
        for (int r = k + 1; r < n; ++r) {
            const double v = std::fabs(m.at(r, k));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) raise(Errc::validation_error, "solve: singular matrix");
        if (pivot != k) {
            for (int c = 0; c < n; ++c) std::swap(m.at(k, c), m.at(pivot, c));
            std::swap(b[k], b[pivot]);
        }
        for (int r = k + 1; r < n; ++r) {
            const double f = m.at(r, k) / m.at(k, k);
            for (int c = k; c < n; ++c) m.at(r, c) -= f * m.at(k, c);
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= m.at(r, c) * x[c];
        x[r] = s / m.at(r, r);
    }
    return x;
}

} // namespace hamadv
