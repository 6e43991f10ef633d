/**
 * Combinatorics of the standard n-cube: face partitions, the vertex poset,
 * F-decompositions, reciprocal pairs, shuffle signs and face inclusions.
 *
 * Coordinate indices are 1-based at the API boundary and stored as 0-based
 * bits internally.  Everything here is a value type; all operations are pure.
 */

#ifndef CUBEFLOW_CUBE_HPP
#define CUBEFLOW_CUBE_HPP

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cubeflow {

/// Subset of coordinate axes {1..n}, bit i-1 <-> axis i.
using AxisMask = std::uint32_t;

/// Maximum ambient dimension supported by the bitset representation.
inline constexpr int kMaxDim = 16;

inline int popcount(AxisMask m) { return std::popcount(m); }

inline AxisMask full_mask(int n) {
    return n == 0 ? 0u : (AxisMask(1u) << n) - 1u;
}

inline AxisMask axis_bit(int axis) { return AxisMask(1u) << (axis - 1); }

/// Axes of `mask` in ascending order, 1-based.
inline std::vector<int> axes_of(AxisMask mask) {
    std::vector<int> axes;
    for (int i = 1; mask != 0; ++i, mask >>= 1)
        if (mask & 1u) axes.push_back(i);
    return axes;
}

/// Deposits the low bits of `bits` onto the set bits of `mask`, low to high.
inline AxisMask scatter_bits(AxisMask bits, AxisMask mask) {
    AxisMask out = 0;
    for (AxisMask bit = 1; mask != 0; mask &= mask - 1, bit <<= 1)
        if (bits & bit) out |= mask & (~mask + 1);
    return out;
}

/// Gathers the bits of `value` at the set positions of `mask` into low bits.
inline AxisMask gather_bits(AxisMask value, AxisMask mask) {
    AxisMask out = 0;
    for (AxisMask bit = 1; mask != 0; mask &= mask - 1, bit <<= 1)
        if (value & mask & (~mask + 1)) out |= bit;
    return out;
}

/// Multiplicative sign, the group {+1, -1}.
class Sign {
  public:
    constexpr Sign() = default;
    static constexpr Sign plus() { return Sign(+1); }
    static constexpr Sign minus() { return Sign(-1); }
    static constexpr Sign of_parity(int inversions) {
        return (inversions & 1) ? minus() : plus();
    }
    static Sign of(int value) {
        if (value != 1 && value != -1) throw std::invalid_argument("Sign::of: value must be +1 or -1");
        return Sign(value);
    }

    constexpr int value() const { return v_; }
    constexpr Sign operator*(Sign o) const { return Sign(v_ * o.v_); }
    constexpr Sign operator-() const { return Sign(-v_); }
    constexpr bool operator==(const Sign&) const = default;

  private:
    explicit constexpr Sign(int v) : v_(v) {}
    int v_ = 1;
};

/// Vertex of the standard n-cube, identified with the subset of axes equal to 1.
struct VertexSet {
    int n = 0;
    AxisMask ones = 0;

    VertexSet() = default;
    VertexSet(int n_, AxisMask ones_) : n(n_), ones(ones_) {
        if (n < 0 || n > kMaxDim) throw std::invalid_argument("VertexSet: dimension out of range");
        if (ones & ~full_mask(n)) throw std::invalid_argument("VertexSet: axis outside {1..n}");
    }

    /// Poset order: v <= w iff ones(v) is a subset of ones(w).
    bool leq(const VertexSet& w) const { return n == w.n && (ones & ~w.ones) == 0; }

    bool operator==(const VertexSet&) const = default;
};

/**
 * A face of the standard n-cube as the partition (F0, F01, F1) of {1..n}:
 * F01 indexes free coordinates, F0/F1 bound coordinates pinned at 0/1.
 */
struct FacePartition {
    int n = 0;
    AxisMask f0 = 0, f01 = 0, f1 = 0;

    FacePartition() = default;
    FacePartition(int n_, AxisMask f0_, AxisMask f01_, AxisMask f1_)
        : n(n_), f0(f0_), f01(f01_), f1(f1_) {
        if (n < 0 || n > kMaxDim) throw std::invalid_argument("FacePartition: dimension out of range");
        if ((f0 | f01 | f1) != full_mask(n) || (f0 & f01) || (f0 & f1) || (f01 & f1))
            throw std::invalid_argument("FacePartition: sets must partition {1..n}");
    }

    int dim() const { return popcount(f01); }
    int codim() const { return n - dim(); }
    bool is_vertex() const { return f01 == 0; }
    bool is_initial() const { return f1 == 0; }
    bool is_terminal() const { return f0 == 0; }

    static FacePartition full_cube(int n) { return FacePartition(n, 0, full_mask(n), 0); }
    static FacePartition vertex(const VertexSet& v) {
        return FacePartition(v.n, full_mask(v.n) & ~v.ones, 0, v.ones);
    }

    VertexSet initial_vertex() const { return VertexSet(n, f1); }
    VertexSet terminal_vertex() const { return VertexSet(n, f1 | f01); }

    bool operator==(const FacePartition&) const = default;
};

inline std::string to_string(const FacePartition& f) {
    auto set = [](AxisMask m) {
        std::string s = "{";
        for (int a : axes_of(m)) s += std::to_string(a) + ",";
        if (s.back() == ',') s.pop_back();
        return s + "}";
    };
    return "(" + set(f.f0) + "," + set(f.f01) + "," + set(f.f1) + ")";
}

/// Face spanned by the vertex interval [v, w]; rejects v !<= w.
inline FacePartition face_from_interval(const VertexSet& v, const VertexSet& w) {
    if (v.n != w.n) throw std::invalid_argument("face_from_interval: mismatched dimensions");
    if (!v.leq(w)) throw std::invalid_argument("face_from_interval: not an interval, v <= w required");
    AxisMask f1 = v.ones;
    AxisMask f0 = full_mask(v.n) & ~w.ones;
    AxisMask f01 = w.ones & ~v.ones;
    return FacePartition(v.n, f0, f01, f1);
}

/// The pair (F^-, F^+) of the F-decomposition I^n = F^- x F x F^+.
inline std::pair<FacePartition, FacePartition> face_decomposition(const FacePartition& f) {
    FacePartition minus(f.n, f.f0 | f.f01, f.f1, 0);
    FacePartition plus(f.n, 0, f.f0, f.f1 | f.f01);
    return {minus, plus};
}

/**
 * Tests whether (f, g) is a reciprocal pair, i.e. f = v^- and g = v^+ for some
 * vertex v.  Returns the witnessing vertex when the pair is reciprocal.
 */
inline std::optional<VertexSet> is_reciprocal(const FacePartition& f, const FacePartition& g) {
    if (f.n != g.n) return std::nullopt;
    if (!f.is_initial()) return std::nullopt;
    if (g != face_decomposition(f).second) return std::nullopt;
    return f.terminal_vertex();
}

namespace detail {
/// #{(a in hi_block, b in lo_block) : a > b} for two ascending axis blocks
/// concatenated as (hi_block, lo_block).
inline int cross_inversions(AxisMask first_block, AxisMask second_block) {
    int inv = 0;
    for (AxisMask m = second_block; m != 0; m &= m - 1) {
        AxisMask b = m & (~m + 1);
        inv += popcount(first_block & ~(b | (b - 1)));
    }
    return inv;
}
}  // namespace detail

/**
 * Shuffle sign sh(F): parity of the permutation taking the concatenation of
 * the free axes of F^-, F and F^+ (each block ascending) to (1, ..., n).
 * The blocks are F1, F01 and F0 respectively.
 */
inline Sign shuffle_sign(const FacePartition& f) {
    int inv = detail::cross_inversions(f.f1, f.f01) + detail::cross_inversions(f.f1, f.f0) +
              detail::cross_inversions(f.f01, f.f0);
    return Sign::of_parity(inv);
}

inline Sign shuffle_sign(const VertexSet& v) { return shuffle_sign(FacePartition::vertex(v)); }

/// Coordinate insertion delta_i^eps on vertices: inserts eps at slot i.
inline VertexSet face_inclusion_vertex(int i, int eps, const VertexSet& v) {
    if (i < 1 || i > v.n + 1) throw std::out_of_range("face_inclusion_vertex: index out of range");
    if (eps != 0 && eps != 1) throw std::invalid_argument("face_inclusion_vertex: eps must be 0 or 1");
    AxisMask low = v.ones & (axis_bit(i) - 1u);
    AxisMask high = (v.ones & ~(axis_bit(i) - 1u)) << 1;
    AxisMask ones = low | high | (eps ? axis_bit(i) : 0u);
    return VertexSet(v.n + 1, ones);
}

/// All faces of I^n, optionally restricted to dimension d.  3^n faces total,
/// C(n,d) 2^(n-d) in each dimension.
inline std::vector<FacePartition> enumerate_faces(int n, std::optional<int> d = std::nullopt) {
    if (n < 0 || n > kMaxDim) throw std::invalid_argument("enumerate_faces: dimension out of range");
    if (d && (*d < 0 || *d > n)) throw std::invalid_argument("enumerate_faces: face dimension out of range");
    std::vector<FacePartition> out;
    AxisMask all = full_mask(n);
    AxisMask f01 = 0;
    do {
        if (!d || popcount(f01) == *d) {
            AxisMask bound = all & ~f01;
            AxisMask f1 = 0;
            do {
                out.push_back(FacePartition(n, bound & ~f1, f01, f1));
                f1 = (f1 - bound) & bound;
            } while (f1 != 0);
        }
        f01 = (f01 - all) & all;
    } while (f01 != 0);
    return out;
}

/// The 2^dim vertices of F in binary-counting order of its free axes.
inline std::vector<VertexSet> face_vertices(const FacePartition& f) {
    int d = f.dim();
    std::vector<VertexSet> verts;
    verts.reserve(std::size_t(1) << d);
    for (AxisMask code = 0; code < (AxisMask(1) << d); ++code)
        verts.push_back(VertexSet(f.n, f.f1 | scatter_bits(code, f.f01)));
    return verts;
}

/**
 * Embeds a face of the standard dim(F)-cube into I^n through F: the local
 * face's k-th axis maps to the k-th smallest free axis of F.
 */
inline FacePartition embed_subface(const FacePartition& f, const FacePartition& local) {
    if (local.n != f.dim()) throw std::invalid_argument("embed_subface: local face dimension mismatch");
    return FacePartition(f.n, f.f0 | scatter_bits(local.f0, f.f01), scatter_bits(local.f01, f.f01),
                         f.f1 | scatter_bits(local.f1, f.f01));
}

}  // namespace cubeflow

#endif  // CUBEFLOW_CUBE_HPP
