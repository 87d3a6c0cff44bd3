#pragma once

// Minimal dense matrix helpers templated over the scalar type, used by the
// moment-table recursions which must run in extended precision (the forward
// recurrences amplify rounding exponentially, so the working precision is
// chosen from the amplification bound and results are rounded to double at
// the end).  Kept deliberately tiny: multiply, add, invert, exponential.

#include <cmath>
#include <limits>
#include <vector>

#include "tds/errors.hpp"
#include "tds/numerics.hpp"

namespace tds::mpmat {

template <class T>
struct Mat {
    int d = 0;
    std::vector<T> a;  // row-major d*d

    Mat() = default;
    explicit Mat(int dim) : d(dim), a(static_cast<size_t>(dim) * dim, T(0)) {}

    T& operator()(int i, int j) { return a[static_cast<size_t>(i) * d + j]; }
    const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * d + j]; }

    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = T(1);
        return m;
    }
};

template <class T>
Mat<T> from_double(const Matrix& src) {
    Mat<T> m(static_cast<int>(src.rows()));
    for (int i = 0; i < m.d; ++i)
        for (int j = 0; j < m.d; ++j) m(i, j) = T(src(i, j));
    return m;
}

template <class T>
Matrix to_double(const Mat<T>& src) {
    Matrix m(src.d, src.d);
    for (int i = 0; i < src.d; ++i)
        for (int j = 0; j < src.d; ++j) m(i, j) = static_cast<double>(src(i, j));
    return m;
}

template <class T>
Mat<T> mul(const Mat<T>& x, const Mat<T>& y) {
    const int d = x.d;
    Mat<T> z(d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            const T& xik = x(i, k);
            if (xik == T(0)) continue;
            for (int j = 0; j < d; ++j) z(i, j) += xik * y(k, j);
        }
    return z;
}

template <class T>
Mat<T> add(const Mat<T>& x, const Mat<T>& y) {
    Mat<T> z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] += y.a[i];
    return z;
}

template <class T>
Mat<T> sub(const Mat<T>& x, const Mat<T>& y) {
    Mat<T> z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] -= y.a[i];
    return z;
}

template <class T>
Mat<T> scale(const Mat<T>& x, const T& c) {
    Mat<T> z = x;
    for (auto& v : z.a) v *= c;
    return z;
}

template <class T>
void add_diag(Mat<T>& x, const T& c) {
    for (int i = 0; i < x.d; ++i) x(i, i) += c;
}

template <class T>
T max_abs(const Mat<T>& x) {
    using std::abs;
    T m(0);
    for (const auto& v : x.a)
        if (abs(v) > m) m = abs(v);
    return m;
}

// Gauss-Jordan inverse with partial pivoting.  The callers guarantee a
// decent reciprocal condition (checked in double beforehand), and the
// working precision carries guard digits well beyond the condition number.
template <class T>
Mat<T> inverse(const Mat<T>& src) {
    using std::abs;
    const int d = src.d;
    Mat<T> a = src;
    Mat<T> inv = Mat<T>::identity(d);
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (abs(a(r, col)) > abs(a(piv, col))) piv = r;
        if (a(piv, col) == T(0)) throw SingularMatrix("mpmat::inverse: zero pivot");
        if (piv != col)
            for (int j = 0; j < d; ++j) {
                std::swap(a(col, j), a(piv, j));
                std::swap(inv(col, j), inv(piv, j));
            }
        const T pivinv = T(1) / a(col, col);
        for (int j = 0; j < d; ++j) {
            a(col, j) *= pivinv;
            inv(col, j) *= pivinv;
        }
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            const T f = a(r, col);
            if (f == T(0)) continue;
            for (int j = 0; j < d; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

// e^X by scaling-and-squaring with a Taylor series summed to the scalar
// type's full precision.
template <class T>
Mat<T> exponential(const Mat<T>& x) {
    using std::ceil;
    using std::log2;
    const int d = x.d;
    const double norm = static_cast<double>(max_abs(x)) * d;  // cheap upper bound on ||X||_2
    int s = 0;
    if (norm > 0.25) s = static_cast<int>(ceil(log2(norm / 0.25)));
    Mat<T> b = x;
    if (s > 0) {
        T f = T(1);
        for (int i = 0; i < s; ++i) f *= T(2);
        b = scale(x, T(1) / f);
    }
    const T eps = std::numeric_limits<T>::epsilon();
    Mat<T> sum = Mat<T>::identity(d);
    Mat<T> term = Mat<T>::identity(d);
    for (int k = 1; k < 10000; ++k) {
        term = mul(term, b);
        term = scale(term, T(1) / T(k));
        sum = add(sum, term);
        if (max_abs(term) <= eps * max_abs(sum)) break;
    }
    for (int i = 0; i < s; ++i) sum = mul(sum, sum);
    return sum;
}

}  // namespace tds::mpmat
