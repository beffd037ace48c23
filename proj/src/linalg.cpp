#include "soficlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "soficlab/errors.hpp"

namespace soficlab {

Mat make_mat(std::size_t rows, std::size_t cols, double fill) {
    return Mat(rows, Vec(cols, fill));
}

Mat transpose(const Mat& a) {
    if (a.empty()) return {};
    Mat t = make_mat(a[0].size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    return t;
}

namespace {

Mat mat_mul(const Mat& a, const Mat& b) {
    std::size_t n = a.size();
    Mat c = make_mat(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            double aik = a[i][k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c[i][j] += aik * b[k][j];
        }
    return c;
}

double trace(const Mat& a) {
    double t = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) t += a[i][i];
    return t;
}

// Coefficients of det(xI - A) = x^n + c[1] x^{n-1} + ... + c[n].
Vec char_poly(const Mat& a) {
    std::size_t n = a.size();
    Vec c(n + 1, 0.0);
    c[0] = 1.0;
    Mat m = make_mat(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        // M_k = A * (M_{k-1} + c_{k-1} I)
        Mat shifted = m;
        for (std::size_t i = 0; i < n; ++i) shifted[i][i] += c[k - 1];
        m = mat_mul(a, shifted);
        c[k] = -trace(m) / static_cast<double>(k);
    }
    return c;
}

} // namespace

std::vector<std::complex<double>> eigenvalues_small(const Mat& a) {
    const std::size_t n = a.size();
    if (n == 0) return {};
    for (const auto& row : a)
        if (row.size() != n) throw ValidationError("eigenvalues_small: matrix must be square");
    if (n == 1) return {std::complex<double>(a[0][0], 0.0)};

    const Vec c = char_poly(a);
    using C = std::complex<double>;
    auto eval = [&](const C& x) {
        C v(0.0, 0.0);
        for (std::size_t k = 0; k <= n; ++k) v = v * x + c[k];
        return v;
    };

    // Durand-Kerner from a spread of non-real starting points.
    std::vector<C> z(n);
    const C base(0.4, 0.9);
    C p = base;
    for (std::size_t i = 0; i < n; ++i, p *= base) z[i] = p;
    for (int iter = 0; iter < 600; ++iter) {
        double shift = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            C denom(1.0, 0.0);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) denom *= z[i] - z[j];
            if (std::abs(denom) < 1e-300) continue;
            C delta = eval(z[i]) / denom;
            z[i] -= delta;
            shift = std::max(shift, std::abs(delta));
        }
        if (shift < 1e-14) break;
    }
    // Snap near-real roots onto the real axis.
    for (auto& root : z) {
        double scale = std::max(1.0, std::abs(root));
        if (std::abs(root.imag()) < 1e-10 * scale) root = C(root.real(), 0.0);
    }
    return z;
}

SymEigen jacobi_eigen(Mat s, int max_sweeps) {
    const std::size_t n = s.size();
    Mat v = make_mat(n, n);
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += s[p][q] * s[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(s[p][q]) < 1e-300) continue;
                double theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double cth = 1.0 / std::sqrt(t * t + 1.0);
                double sth = t * cth;
                for (std::size_t k = 0; k < n; ++k) {
                    double skp = s[k][p], skq = s[k][q];
                    s[k][p] = cth * skp - sth * skq;
                    s[k][q] = sth * skp + cth * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double spk = s[p][k], sqk = s[q][k];
                    s[p][k] = cth * spk - sth * sqk;
                    s[q][k] = sth * spk + cth * sqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = cth * vkp - sth * vkq;
                    v[k][q] = sth * vkp + cth * vkq;
                }
            }
        }
    }

    SymEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = s[i][i];
    out.vectors = std::move(v);
    return out;
}

Vec solve_linear(Mat a, Vec b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw ValidationError("solve_linear: size mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        if (std::abs(a[pivot][col]) < 1e-300)
            throw ValidationError("solve_linear: singular system");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t row = col + 1; row < n; ++row) {
            double f = a[row][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
            b[row] -= f * b[col];
        }
    }
    Vec x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t k = i + 1; k < n; ++k) acc -= a[i][k] * x[k];
        x[i] = acc / a[i][i];
    }
    return x;
}

} // namespace soficlab
