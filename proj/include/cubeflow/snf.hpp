/**
 * Exact integer linear algebra: dense matrices, Smith normal form with
 * unimodular transforms, integer kernels and exact solves.
 *
 * Arithmetic is done in checked 64-bit integers; any overflow throws and the
 * public entry points recompute with arbitrary precision (boost cpp_int).
 */

#ifndef CUBEFLOW_SNF_HPP
#define CUBEFLOW_SNF_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cubeflow {

using BigInt = boost::multiprecision::cpp_int;

struct IntegerOverflow : std::overflow_error {
    IntegerOverflow() : std::overflow_error("64-bit integer overflow in exact arithmetic") {}
};

inline long long chk_add(long long a, long long b) {
    long long r;
    if (__builtin_add_overflow(a, b, &r)) throw IntegerOverflow();
    return r;
}
inline long long chk_sub(long long a, long long b) {
    long long r;
    if (__builtin_sub_overflow(a, b, &r)) throw IntegerOverflow();
    return r;
}
inline long long chk_mul(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r)) throw IntegerOverflow();
    return r;
}
inline long long chk_neg(long long a) { return chk_sub(0, a); }

/// 64-bit integer whose arithmetic throws IntegerOverflow instead of wrapping.
class CheckedInt {
  public:
    CheckedInt() = default;
    CheckedInt(long long v) : v_(v) {}
    CheckedInt(int v) : v_(v) {}

    long long value() const { return v_; }

    CheckedInt operator+(CheckedInt o) const { return chk_add(v_, o.v_); }
    CheckedInt operator-(CheckedInt o) const { return chk_sub(v_, o.v_); }
    CheckedInt operator*(CheckedInt o) const { return chk_mul(v_, o.v_); }
    CheckedInt operator/(CheckedInt o) const { return v_ / o.v_; }
    CheckedInt operator%(CheckedInt o) const { return v_ % o.v_; }
    CheckedInt operator-() const { return chk_neg(v_); }
    CheckedInt& operator+=(CheckedInt o) { return *this = *this + o; }
    CheckedInt& operator-=(CheckedInt o) { return *this = *this - o; }
    CheckedInt& operator*=(CheckedInt o) { return *this = *this * o; }

    bool operator==(const CheckedInt&) const = default;
    auto operator<=>(const CheckedInt&) const = default;

  private:
    long long v_ = 0;
};

inline CheckedInt abs(CheckedInt x) { return x < CheckedInt(0) ? -x : x; }
using boost::multiprecision::abs;

template <typename Int>
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(std::size_t(rows) * std::size_t(cols), Int(0)) {}

    static DenseMatrix identity(int n) {
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = Int(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Int& operator()(int i, int j) { return data_[std::size_t(i) * std::size_t(cols_) + std::size_t(j)]; }
    const Int& operator()(int i, int j) const {
        return data_[std::size_t(i) * std::size_t(cols_) + std::size_t(j)];
    }

    void swap_rows(int a, int b) {
        if (a == b) return;
        for (int j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
    }
    void swap_cols(int a, int b) {
        if (a == b) return;
        for (int i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
    }
    void add_row(int dst, int src, Int k) {  // row dst += k * row src
        for (int j = 0; j < cols_; ++j) (*this)(dst, j) += k * (*this)(src, j);
    }
    void add_col(int dst, int src, Int k) {  // col dst += k * col src
        for (int i = 0; i < rows_; ++i) (*this)(i, dst) += k * (*this)(i, src);
    }
    void negate_row(int r) {
        for (int j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
    }
    void negate_col(int c) {
        for (int i = 0; i < rows_; ++i) (*this)(i, c) = -(*this)(i, c);
    }

    std::vector<Int> column(int j) const {
        std::vector<Int> out(std::size_t(rows_), Int(0));
        for (int i = 0; i < rows_; ++i) out[std::size_t(i)] = (*this)(i, j);
        return out;
    }

    std::vector<Int> multiply(const std::vector<Int>& x) const {
        if (int(x.size()) != cols_) throw std::invalid_argument("DenseMatrix::multiply: size mismatch");
        std::vector<Int> out(std::size_t(rows_), Int(0));
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) out[std::size_t(i)] += (*this)(i, j) * x[std::size_t(j)];
        return out;
    }

    bool operator==(const DenseMatrix&) const = default;

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<Int> data_;
};

/**
 * Smith decomposition d = u * a * v with u, v unimodular; the diagonal of d
 * is nonnegative and forms a divisibility chain.
 */
template <typename Int>
struct SmithDecomposition {
    DenseMatrix<Int> d, u, uinv, v, vinv;
    int rank = 0;

    std::vector<Int> invariant_factors() const {
        std::vector<Int> out;
        for (int i = 0; i < rank; ++i) out.push_back(d(i, i));
        return out;
    }

    /// Basis of the integer kernel lattice of the original matrix.
    std::vector<std::vector<Int>> kernel_basis() const {
        std::vector<std::vector<Int>> out;
        for (int j = rank; j < v.cols(); ++j) out.push_back(v.column(j));
        return out;
    }

    /// Exact integer solution of a x = b, if one exists.
    std::optional<std::vector<Int>> solve(const std::vector<Int>& b) const {
        std::vector<Int> ub = u.multiply(b);
        std::vector<Int> y(std::size_t(v.cols()), Int(0));
        for (int i = 0; i < d.rows(); ++i) {
            if (i < rank) {
                if (ub[std::size_t(i)] % d(i, i) != Int(0)) return std::nullopt;
                y[std::size_t(i)] = ub[std::size_t(i)] / d(i, i);
            } else if (ub[std::size_t(i)] != Int(0)) {
                return std::nullopt;
            }
        }
        return v.multiply(y);
    }
};

/**
 * Smith normal form by alternating row/column reduction with minimal-pivot
 * selection; the standard add-the-offending-row trick enforces the
 * divisibility chain.
 */
template <typename Int>
SmithDecomposition<Int> smith_normal_form(DenseMatrix<Int> a) {
    const int m = a.rows(), n = a.cols();
    SmithDecomposition<Int> s;
    s.u = DenseMatrix<Int>::identity(m);
    s.uinv = DenseMatrix<Int>::identity(m);
    s.v = DenseMatrix<Int>::identity(n);
    s.vinv = DenseMatrix<Int>::identity(n);

    auto row_op = [&](int dst, int src, Int k) {
        a.add_row(dst, src, k);
        s.u.add_row(dst, src, k);
        s.uinv.add_col(src, dst, -k);
    };
    auto col_op = [&](int dst, int src, Int k) {
        a.add_col(dst, src, k);
        s.v.add_col(dst, src, k);
        s.vinv.add_row(src, dst, -k);
    };
    auto row_swap = [&](int x, int y) {
        a.swap_rows(x, y);
        s.u.swap_rows(x, y);
        s.uinv.swap_cols(x, y);
    };
    auto col_swap = [&](int x, int y) {
        a.swap_cols(x, y);
        s.v.swap_cols(x, y);
        s.vinv.swap_rows(x, y);
    };
    auto row_negate = [&](int r) {
        a.negate_row(r);
        s.u.negate_row(r);
        s.uinv.negate_col(r);
    };

    int t = 0;
    while (t < m && t < n) {
        // Locate a pivot of minimal absolute value in the trailing block.
        int pi = -1, pj = -1;
        Int best(0);
        for (int i = t; i < m; ++i)
            for (int j = t; j < n; ++j)
                if (a(i, j) != Int(0) && (pi < 0 || abs(a(i, j)) < best)) {
                    pi = i;
                    pj = j;
                    best = abs(a(i, j));
                }
        if (pi < 0) break;
        row_swap(t, pi);
        col_swap(t, pj);

        bool clean = true;
        for (int i = t + 1; i < m; ++i)
            if (a(i, t) != Int(0)) {
                Int q = a(i, t) / a(t, t);
                if (q != Int(0)) row_op(i, t, -q);
                if (a(i, t) != Int(0)) clean = false;
            }
        for (int j = t + 1; j < n; ++j)
            if (a(t, j) != Int(0)) {
                Int q = a(t, j) / a(t, t);
                if (q != Int(0)) col_op(j, t, -q);
                if (a(t, j) != Int(0)) clean = false;
            }
        if (!clean) continue;  // remainders became new, smaller pivot candidates

        // Divisibility chain: fold in any entry the pivot does not divide.
        bool divides = true;
        for (int i = t + 1; i < m && divides; ++i)
            for (int j = t + 1; j < n && divides; ++j)
                if (a(i, j) % a(t, t) != Int(0)) {
                    row_op(t, i, Int(1));
                    divides = false;
                }
        if (!divides) continue;

        if (a(t, t) < Int(0)) row_negate(t);
        ++t;
    }
    s.rank = t;
    s.d = std::move(a);
    return s;
}

inline BigInt to_big(CheckedInt x) { return BigInt(x.value()); }
inline long long big_to_int64(const BigInt& x) {
    if (x > BigInt(std::numeric_limits<long long>::max()) ||
        x < BigInt(std::numeric_limits<long long>::min()))
        throw IntegerOverflow();
    return x.convert_to<long long>();
}

template <typename From, typename To, typename Convert>
DenseMatrix<To> convert_matrix(const DenseMatrix<From>& a, Convert conv) {
    DenseMatrix<To> out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = conv(a(i, j));
    return out;
}

}  // namespace cubeflow

#endif  // CUBEFLOW_SNF_HPP
