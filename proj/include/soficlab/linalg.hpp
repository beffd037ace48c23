#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace soficlab {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

Mat make_mat(std::size_t rows, std::size_t cols, double fill = 0.0);
Mat transpose(const Mat& a);

// All eigenvalues of a small dense real matrix. Characteristic polynomial by
// Faddeev-LeVerrier, roots by Durand-Kerner. Intended for q x q transition
// matrices with q at most a few dozen.
std::vector<std::complex<double>> eigenvalues_small(const Mat& a);

// Cyclic Jacobi for a real symmetric matrix. vectors holds eigenvectors as
// columns: vectors[i][k] is component i of eigenvector k.
struct SymEigen {
    Vec values;
    Mat vectors;
};
SymEigen jacobi_eigen(Mat s, int max_sweeps = 64);

// Dense solve by partial-pivot elimination; throws ValidationError on a
// numerically singular system.
Vec solve_linear(Mat a, Vec b);

} // namespace soficlab
