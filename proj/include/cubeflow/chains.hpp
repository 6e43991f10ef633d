/**
 * Integer cubical chains and cochains over a complex: boundary, coboundary,
 * the Serre diagonal, the cup product and Smith normal form cohomology.
 *
 * Conventions.  The boundary of an edge is terminal minus initial vertex and
 * extends to higher cubes by the graded Leibniz rule.  The coboundary is the
 * plain transpose, (delta a)(c) = a(boundary c), with no extra sign, matching
 * the evaluation convention (a (x) b)(x (x) y) = a(x) b(y).  Degree-0
 * boundaries return the zero chain rather than erroring.
 *
 * Coefficients are exact 64-bit integers with overflow detection; cohomology
 * escalates to arbitrary precision when a 64-bit computation overflows.
 */

#ifndef CUBEFLOW_CHAINS_HPP
#define CUBEFLOW_CHAINS_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cubeflow/complex.hpp"
#include "cubeflow/snf.hpp"

namespace cubeflow {

namespace detail {

/// Sparse integer-valued functional on the cubes of one dimension.
class GradedIntMap {
  public:
    GradedIntMap(const CubicalComplex* complex, int degree) : complex_(complex), degree_(degree) {
        if (!complex) throw std::invalid_argument("graded map: null complex");
        if (degree < 0) throw std::invalid_argument("graded map: negative degree");
    }

    const CubicalComplex& complex() const { return *complex_; }
    int degree() const { return degree_; }
    bool empty() const { return values_.empty(); }
    const std::map<int, long long>& entries() const { return values_; }

    long long operator[](CubeId c) const {
        auto it = values_.find(c.index);
        return it == values_.end() ? 0 : it->second;
    }

    void set(CubeId c, long long value) {
        if (complex_->dim(c) != degree_)
            throw std::invalid_argument("graded map: cube dimension does not match degree");
        if (value == 0) values_.erase(c.index);
        else values_[c.index] = value;
    }

    void add(CubeId c, long long value) { set(c, chk_add((*this)[c], value)); }

  protected:
    void combine(const GradedIntMap& o, long long scale) {
        if (complex_ != o.complex_ || degree_ != o.degree_)
            throw std::invalid_argument("graded map: mismatched complex or degree");
        for (const auto& [idx, val] : o.values_) {
            long long sum = chk_add((*this)[{idx, std::int16_t(degree_)}], chk_mul(scale, val));
            if (sum == 0) values_.erase(idx);
            else values_[idx] = sum;
        }
    }

    void scale_by(long long k) {
        if (k == 0) {
            values_.clear();
            return;
        }
        for (auto& [idx, val] : values_) val = chk_mul(val, k);
    }

    bool equals(const GradedIntMap& o) const {
        return complex_ == o.complex_ && degree_ == o.degree_ && values_ == o.values_;
    }

    const CubicalComplex* complex_;
    int degree_;
    std::map<int, long long> values_;
};

}  // namespace detail

/// Formal integer combination of cubes of a fixed dimension.
class IntChain : public detail::GradedIntMap {
  public:
    using GradedIntMap::GradedIntMap;

    IntChain& operator+=(const IntChain& o) {
        combine(o, 1);
        return *this;
    }
    IntChain& operator-=(const IntChain& o) {
        combine(o, -1);
        return *this;
    }
    IntChain& operator*=(long long k) {
        scale_by(k);
        return *this;
    }
    friend IntChain operator+(IntChain a, const IntChain& b) { return a += b; }
    friend IntChain operator-(IntChain a, const IntChain& b) { return a -= b; }
    bool operator==(const IntChain& o) const { return equals(o); }
};

/// Integer-valued cochain: a functional on cubes of a fixed dimension.
class IntCochain : public detail::GradedIntMap {
  public:
    using GradedIntMap::GradedIntMap;

    IntCochain& operator+=(const IntCochain& o) {
        combine(o, 1);
        return *this;
    }
    IntCochain& operator-=(const IntCochain& o) {
        combine(o, -1);
        return *this;
    }
    IntCochain& operator*=(long long k) {
        scale_by(k);
        return *this;
    }
    friend IntCochain operator+(IntCochain a, const IntCochain& b) { return a += b; }
    friend IntCochain operator-(IntCochain a, const IntCochain& b) { return a -= b; }
    bool operator==(const IntCochain& o) const { return equals(o); }

    nlohmann::json to_json() const {
        nlohmann::json values = nlohmann::json::object();
        for (const auto& [idx, val] : entries()) values[std::to_string(idx)] = val;
        return {{"degree", degree()}, {"values", values}};
    }

    static IntCochain from_json(const CubicalComplex& complex, const nlohmann::json& j) {
        IntCochain out(&complex, j.at("degree").get<int>());
        for (const auto& [key, val] : j.at("values").items())
            out.set(complex.id(std::stoi(key)), val.get<long long>());
        return out;
    }
};

/// Boundary of a single cube by the Leibniz rule: the i-th free axis
/// contributes (-1)^(i-1) (terminal facet - initial facet).
inline IntChain boundary(const CubicalComplex& complex, CubeId c) {
    int d = complex.dim(c);
    IntChain out(&complex, d > 0 ? d - 1 : 0);
    if (d == 0) return out;
    long long sign = 1;
    for (int i = 1; i <= d; ++i) {
        AxisMask axis = AxisMask(1) << (i - 1);
        FacePartition at1(d, 0, full_mask(d) & ~axis, axis);
        FacePartition at0(d, axis, full_mask(d) & ~axis, 0);
        out.add(complex.face_of(c, at1), sign);
        out.add(complex.face_of(c, at0), -sign);
        sign = -sign;
    }
    return out;
}

inline IntChain boundary(const IntChain& chain) {
    const CubicalComplex& complex = chain.complex();
    IntChain out(&complex, chain.degree() > 0 ? chain.degree() - 1 : 0);
    if (chain.degree() == 0) return out;
    for (const auto& [idx, val] : chain.entries()) {
        IntChain cell = boundary(complex, complex.id(idx));
        cell *= val;
        out += cell;
    }
    return out;
}

/// Transpose of the boundary: (delta a)(c) = a(boundary c).
inline IntCochain coboundary(const IntCochain& alpha) {
    const CubicalComplex& complex = alpha.complex();
    IntCochain out(&complex, alpha.degree() + 1);
    if (alpha.empty()) return out;
    for (CubeId c : complex.cubes_of_dim(alpha.degree() + 1)) {
        long long total = 0;
        IntChain bd = boundary(complex, c);
        for (const auto& [idx, coeff] : bd.entries())
            total = chk_add(total, chk_mul(coeff, alpha[{idx, std::int16_t(alpha.degree())}]));
        if (total != 0) out.set(c, total);
    }
    return out;
}

/// One summand sh(v) v^- (x) v^+ of the Serre diagonal.
struct DiagonalTerm {
    CubeId left, right;
    Sign sign;
};

/// The Serre diagonal of a cube: one term per vertex, with shuffle signs.
inline std::vector<DiagonalTerm> serre_diagonal(const CubicalComplex& complex, CubeId c) {
    int d = complex.dim(c);
    std::vector<DiagonalTerm> terms;
    terms.reserve(std::size_t(1) << d);
    for (AxisMask code = 0; code < (AxisMask(1) << d); ++code) {
        VertexSet v(d, code);
        auto [minus, plus] = face_decomposition(FacePartition::vertex(v));
        terms.push_back({complex.face_of(c, minus), complex.face_of(c, plus), shuffle_sign(v)});
    }
    return terms;
}

/// Cup product through the Serre diagonal:
/// (a cup b)(c) = sum over reciprocal pairs of sh(v) a(v^-) b(v^+).
inline IntCochain cup(const IntCochain& alpha, const IntCochain& beta) {
    if (&alpha.complex() != &beta.complex())
        throw std::invalid_argument("cup: cochains over different complexes");
    const CubicalComplex& complex = alpha.complex();
    IntCochain out(&complex, alpha.degree() + beta.degree());
    if (out.degree() > complex.top_dim()) return out;
    for (CubeId c : complex.cubes_of_dim(out.degree())) {
        long long total = 0;
        for (const DiagonalTerm& term : serre_diagonal(complex, c)) {
            if (int(term.left.dim) != alpha.degree() || int(term.right.dim) != beta.degree()) continue;
            total = chk_add(total, chk_mul(term.sign.value(), chk_mul(alpha[term.left], beta[term.right])));
        }
        if (total != 0) out.set(c, total);
    }
    return out;
}

/// Bilinear evaluation pairing; mismatched degrees pair to zero.
inline long long evaluate(const IntCochain& alpha, const IntChain& c) {
    if (&alpha.complex() != &c.complex())
        throw std::invalid_argument("evaluate: cochain and chain over different complexes");
    if (alpha.degree() != c.degree()) return 0;
    long long total = 0;
    for (const auto& [idx, val] : c.entries())
        total = chk_add(total, chk_mul(val, alpha[{idx, std::int16_t(alpha.degree())}]));
    return total;
}

// -- cohomology --------------------------------------------------------------

struct CohomologyGroup {
    long betti = 0;
    std::vector<long long> torsion;  // invariant factors > 1
    bool operator==(const CohomologyGroup&) const = default;
};

namespace detail {

/// Matrix of delta_k : C^k -> C^(k+1); rows are (k+1)-cubes, columns k-cubes.
template <typename Int>
DenseMatrix<Int> coboundary_matrix(const CubicalComplex& complex, int k,
                                   const std::vector<CubeId>& rows, const std::vector<CubeId>& cols) {
    DenseMatrix<Int> m(int(rows.size()), int(cols.size()));
    std::map<int, int> col_of;
    for (int j = 0; j < int(cols.size()); ++j) col_of[cols[std::size_t(j)].index] = j;
    for (int i = 0; i < int(rows.size()); ++i) {
        IntChain bd = boundary(complex, rows[std::size_t(i)]);
        for (const auto& [idx, coeff] : bd.entries()) m(i, col_of.at(idx)) += Int(coeff);
    }
    (void)k;
    return m;
}

template <typename Int>
std::vector<CohomologyGroup> cohomology_impl(const CubicalComplex& complex) {
    int top = complex.top_dim();
    std::vector<std::vector<CubeId>> cubes;
    for (int d = 0; d <= top; ++d) cubes.push_back(complex.cubes_of_dim(d));

    std::vector<SmithDecomposition<Int>> snf;  // snf[k] decomposes delta_k
    for (int k = 0; k < top; ++k)
        snf.push_back(smith_normal_form(
            coboundary_matrix<Int>(complex, k, cubes[std::size_t(k) + 1], cubes[std::size_t(k)])));

    std::vector<CohomologyGroup> out(std::size_t(top) + 1);
    for (int k = 0; k <= top; ++k) {
        long n_k = long(cubes[std::size_t(k)].size());
        long rank_out = k < top ? snf[std::size_t(k)].rank : 0;
        long rank_in = k > 0 ? snf[std::size_t(k) - 1].rank : 0;
        out[std::size_t(k)].betti = n_k - rank_out - rank_in;
        if (k > 0)
            for (const Int& f : snf[std::size_t(k) - 1].invariant_factors())
                if (f > Int(1)) {
                    if constexpr (std::is_same_v<Int, CheckedInt>)
                        out[std::size_t(k)].torsion.push_back(f.value());
                    else
                        out[std::size_t(k)].torsion.push_back(big_to_int64(f));
                }
    }
    return out;
}

template <typename Int>
std::vector<IntCochain> generators_impl(const CubicalComplex& complex, int k) {
    auto cubes_k = complex.cubes_of_dim(k);
    int n_k = int(cubes_k.size());

    // Cocycle lattice: kernel of delta_k (everything in top degree).
    std::vector<std::vector<Int>> kernel;
    SmithDecomposition<Int> kernel_snf;
    if (k < complex.top_dim()) {
        auto rows = complex.cubes_of_dim(k + 1);
        kernel_snf = smith_normal_form(coboundary_matrix<Int>(complex, k, rows, cubes_k));
        kernel = kernel_snf.kernel_basis();
    } else {
        for (int j = 0; j < n_k; ++j) {
            std::vector<Int> e(std::size_t(n_k), Int(0));
            e[std::size_t(j)] = Int(1);
            kernel.push_back(std::move(e));
        }
    }
    int z = int(kernel.size());

    DenseMatrix<Int> kernel_matrix(n_k, z);
    for (int j = 0; j < z; ++j)
        for (int i = 0; i < n_k; ++i) kernel_matrix(i, j) = kernel[std::size_t(j)][std::size_t(i)];
    auto kernel_coords = smith_normal_form(kernel_matrix);

    // Coboundaries expressed in kernel coordinates.
    int n_prev = k > 0 ? int(complex.cubes_of_dim(k - 1).size()) : 0;
    DenseMatrix<Int> image_in_kernel(z, n_prev);
    if (k > 0) {
        auto prev = complex.cubes_of_dim(k - 1);
        auto delta_prev = coboundary_matrix<Int>(complex, k - 1, cubes_k, prev);
        for (int j = 0; j < n_prev; ++j) {
            auto x = kernel_coords.solve(delta_prev.column(j));
            if (!x) throw std::logic_error("cohomology generators: coboundary outside cocycle lattice");
            for (int i = 0; i < z; ++i) image_in_kernel(i, j) = (*x)[std::size_t(i)];
        }
    }

    // Free generators of the quotient lattice: coordinates beyond the rank of
    // the image, pulled back through the kernel basis.
    auto quotient = smith_normal_form(image_in_kernel);
    std::vector<IntCochain> out;
    for (int i = quotient.rank; i < z; ++i) {
        IntCochain g(&complex, k);
        for (int r = 0; r < n_k; ++r) {
            Int total(0);
            for (int w = 0; w < z; ++w) total += kernel_matrix(r, w) * quotient.uinv(w, i);
            long long value;
            if constexpr (std::is_same_v<Int, CheckedInt>) value = total.value();
            else value = big_to_int64(total);
            if (value != 0) g.set(cubes_k[std::size_t(r)], value);
        }
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace detail

/// Per-degree Betti numbers and torsion coefficients via Smith normal form,
/// recomputed with arbitrary precision if 64-bit arithmetic overflows.
inline std::vector<CohomologyGroup> cohomology(const CubicalComplex& complex) {
    try {
        return detail::cohomology_impl<CheckedInt>(complex);
    } catch (const IntegerOverflow&) {
        return detail::cohomology_impl<BigInt>(complex);
    }
}

/// Representative cocycles for a basis of the free part of H^k.
inline std::vector<IntCochain> cohomology_generators(const CubicalComplex& complex, int k) {
    try {
        return detail::generators_impl<CheckedInt>(complex, k);
    } catch (const IntegerOverflow&) {
        return detail::generators_impl<BigInt>(complex, k);
    }
}

}  // namespace cubeflow

#endif  // CUBEFLOW_CHAINS_HPP
