/**
 * Signed fiber products of flowed geometric cochains and the flow-comparison
 * experiment harness: per-cube comparison of the intersection image of
 * f_t(W) x_M f_-t(V) against the cup product of the intersection images,
 * threshold sweeps over a time grid, and the reciprocal-pair sign law on
 * single cubes.
 *
 * Intersection points are located by recursive subdivision with exact
 * bounding boxes (carriers are affine per cell and the flow is coordinatewise
 * monotone, so boxes map to boxes) followed by Newton polishing.  Each point
 * is signed by the product co-orientation, W's frame before V's, compared
 * against the cube's canonical orientation.
 */

#ifndef CUBEFLOW_PRODUCTS_HPP
#define CUBEFLOW_PRODUCTS_HPP

#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cubeflow/geometry.hpp"

namespace cubeflow {

struct TransversalityError : GeometricError {
    using GeometricError::GeometricError;
};

struct ProductConfig {
    std::vector<double> t_grid;     // ascending flow times for sweeps
    double newton_tol = 1e-11;      // residual bound for accepted roots
    int newton_max_iters = 60;
    int subdivision_depth_cap = 40;
    double merge_radius = 1e-8;

    static std::vector<double> range_grid(double lo, double hi, double step) {
        std::vector<double> g;
        for (double t = lo; t <= hi + 1e-12; t += step) g.push_back(t);
        return g;
    }
};

namespace products_detail {

using geo::Vec;

/// Simplex in the base-parameter space of one mesh cell.
struct ParamSimplex {
    std::vector<Vec> verts;  // d+1 vertices (one vertex for d = 0)

    double diameter() const {
        double out = 0.0;
        for (std::size_t i = 0; i < verts.size(); ++i)
            for (std::size_t j = i + 1; j < verts.size(); ++j)
                for (std::size_t k = 0; k < verts[i].size(); ++k)
                    out = std::max(out, std::abs(verts[i][k] - verts[j][k]));
        return out;
    }

    Vec centroid() const {
        Vec c(verts[0].size(), 0.0);
        for (const auto& v : verts)
            for (std::size_t k = 0; k < c.size(); ++k) c[k] += v[k] / double(verts.size());
        return c;
    }

    std::vector<ParamSimplex> split() const {
        int d = int(verts.size()) - 1;
        auto mid = [&](int a, int b) {
            Vec m(verts[std::size_t(a)].size());
            for (std::size_t k = 0; k < m.size(); ++k)
                m[k] = 0.5 * (verts[std::size_t(a)][k] + verts[std::size_t(b)][k]);
            return m;
        };
        if (d == 0) return {*this};
        if (d == 1) {
            Vec m = mid(0, 1);
            return {{{verts[0], m}}, {{m, verts[1]}}};
        }
        if (d == 2) {
            Vec m01 = mid(0, 1), m12 = mid(1, 2), m02 = mid(0, 2);
            return {{{verts[0], m01, m02}},
                    {{verts[1], m01, m12}},
                    {{verts[2], m02, m12}},
                    {{m01, m12, m02}}};
        }
        // d == 3: midpoint octasection, four corner tetrahedra plus the
        // central octahedron split along the (m01, m23) diagonal.
        Vec m01 = mid(0, 1), m02 = mid(0, 2), m03 = mid(0, 3);
        Vec m12 = mid(1, 2), m13 = mid(1, 3), m23 = mid(2, 3);
        return {{{verts[0], m01, m02, m03}}, {{verts[1], m01, m12, m13}},
                {{verts[2], m02, m12, m23}}, {{verts[3], m03, m13, m23}},
                {{m01, m23, m02, m12}},      {{m01, m23, m12, m13}},
                {{m01, m23, m13, m03}},      {{m01, m23, m03, m02}}};
    }
};

/// One side of the intersection problem: a piece cell carried by the flow.
struct Side {
    const GraphPiece* piece = nullptr;
    geo::CellFrame frame;
    FlowTime t = 0.0;
    int piece_index = -1;
    int cell_index = -1;

    Vec carrier(const Vec& u) const { return flow_point(frame.carrier_at(u), t); }

    /// Exact flowed bounding box over a parameter simplex.
    std::pair<Vec, Vec> box(const ParamSimplex& s) const {
        int n = frame.n;
        Vec lo(std::size_t(n), 1e300), hi(std::size_t(n), -1e300);
        for (const auto& v : s.verts) {
            Vec p = carrier(v);
            for (int i = 0; i < n; ++i) {
                lo[std::size_t(i)] = std::min(lo[std::size_t(i)], p[std::size_t(i)]);
                hi[std::size_t(i)] = std::max(hi[std::size_t(i)], p[std::size_t(i)]);
            }
        }
        return {lo, hi};
    }

    ParamSimplex full_cell() const {
        ParamSimplex s;
        s.verts = frame.base_vertices;
        return s;
    }

    int dim() const { return int(frame.base_vertices.size()) - 1; }
};

inline bool boxes_overlap(const std::pair<Vec, Vec>& a, const std::pair<Vec, Vec>& b, double pad) {
    for (std::size_t i = 0; i < a.first.size(); ++i)
        if (a.second[i] + pad < b.first[i] || b.second[i] + pad < a.first[i]) return false;
    return true;
}

struct Root {
    Vec point;  // cube-local coordinates of the intersection
    Vec u, r;   // base parameters on the W and V sides
};

/**
 * All transverse intersections of two flowed cells: subdivision on exact
 * boxes, Newton on the smooth system f_tW(w(u)) = f_tV(v(r)).
 */
class CellPairSolver {
  public:
    CellPairSolver(const Side& w, const Side& v, const ProductConfig& cfg)
        : w_(w), v_(v), cfg_(cfg) {}

    std::vector<Root> solve() {
        roots_.clear();
        nodes_ = 0;
        recurse(w_.full_cell(), v_.full_cell(), 0);
        return roots_;
    }

  private:
    void recurse(const ParamSimplex& su, const ParamSimplex& sr, int depth) {
        if (++nodes_ > 400000)
            throw TransversalityError("fiber product: subdivision budget exceeded (carriers nearly tangent)");
        auto bw = w_.box(su), bv = v_.box(sr);
        if (!boxes_overlap(bw, bv, cfg_.merge_radius)) return;
        double diam = std::max(su.diameter(), sr.diameter());
        if (diam < 0.2) attempt_newton(su, sr);
        if (diam <= 8 * cfg_.merge_radius) {
            // Leaf: a recorded root must explain the remaining overlap,
            // otherwise the carriers are tangentially close.
            if (root_explains(bw, bv, diam)) return;
            throw TransversalityError("fiber product: unresolved intersection region at scale " +
                                      std::to_string(diam));
        }
        if (depth >= cfg_.subdivision_depth_cap)
            throw TransversalityError("fiber product: unresolved intersection region at depth cap");
        auto wu = su.split();
        auto vr = sr.split();
        for (const auto& a : wu)
            for (const auto& b : vr) recurse(a, b, depth + 1);
    }

    bool root_explains(const std::pair<Vec, Vec>& bw, const std::pair<Vec, Vec>& bv,
                       double diam) const {
        double pad = 8 * diam + cfg_.merge_radius;
        for (const auto& root : roots_) {
            bool inside = true;
            for (std::size_t i = 0; i < root.point.size(); ++i) {
                if (root.point[i] < bw.first[i] - pad || root.point[i] > bw.second[i] + pad)
                    inside = false;
                if (root.point[i] < bv.first[i] - pad || root.point[i] > bv.second[i] + pad)
                    inside = false;
            }
            if (inside) return true;
        }
        return false;
    }

    /// Per-coordinate parameter bounds of a simplex, slightly inflated.
    static std::pair<Vec, Vec> param_bounds(const ParamSimplex& s) {
        Vec lo = s.verts[0], hi = s.verts[0];
        for (const auto& v : s.verts)
            for (std::size_t k = 0; k < v.size(); ++k) {
                lo[k] = std::min(lo[k], v[k]);
                hi[k] = std::max(hi[k], v[k]);
            }
        for (std::size_t k = 0; k < lo.size(); ++k) {
            double pad = 0.125 * (hi[k] - lo[k]) + 1e-12;
            lo[k] -= pad;
            hi[k] += pad;
        }
        return {lo, hi};
    }

    void attempt_newton(const ParamSimplex& su, const ParamSimplex& sr) {
        int du = w_.dim(), dr = v_.dim();
        int n = w_.frame.n;
        Vec u = su.centroid(), r = sr.centroid();
        auto ubox = param_bounds(su), rbox = param_bounds(sr);
        for (int iter = 0; iter < cfg_.newton_max_iters; ++iter) {
            Vec pw = w_.carrier(u), pv = v_.carrier(r);
            Vec f(std::size_t(n), 0.0);
            double residual = 0.0;
            for (int i = 0; i < n; ++i) {
                f[std::size_t(i)] = pw[std::size_t(i)] - pv[std::size_t(i)];
                residual = std::max(residual, std::abs(f[std::size_t(i)]));
            }
            if (residual <= cfg_.newton_tol) {
                record_root(u, r, pw);
                return;
            }
            // Jacobian: [ Df_tW . T_W | -Df_tV . T_V ] at the base points.
            std::vector<Vec> jac(std::size_t(n), Vec(std::size_t(du + dr), 0.0));
            Vec xw = w_.frame.carrier_at(u), xv = v_.frame.carrier_at(r);
            for (int a = 0; a < du; ++a)
                for (int i = 0; i < n; ++i)
                    jac[std::size_t(i)][std::size_t(a)] =
                        flow_jacobian_scalar(xw[std::size_t(i)], w_.t) *
                        w_.frame.tangents[std::size_t(a)][std::size_t(i)];
            for (int b = 0; b < dr; ++b)
                for (int i = 0; i < n; ++i)
                    jac[std::size_t(i)][std::size_t(du + b)] =
                        -flow_jacobian_scalar(xv[std::size_t(i)], v_.t) *
                        v_.frame.tangents[std::size_t(b)][std::size_t(i)];
            auto step = geo::solve_square(jac, f, 1e-14);
            if (!step) return;  // singular here; finer centroids will retry
            // Clamp into the simplex bounds: the exact boxes bracket every
            // root, and clamped Newton cannot shoot across the sigmoid knee.
            for (int a = 0; a < du; ++a) {
                u[std::size_t(a)] -= (*step)[std::size_t(a)];
                u[std::size_t(a)] = std::min(std::max(u[std::size_t(a)], ubox.first[std::size_t(a)]),
                                             ubox.second[std::size_t(a)]);
            }
            for (int b = 0; b < dr; ++b) {
                r[std::size_t(b)] -= (*step)[std::size_t(du + b)];
                r[std::size_t(b)] = std::min(std::max(r[std::size_t(b)], rbox.first[std::size_t(b)]),
                                             rbox.second[std::size_t(b)]);
            }
        }
    }

    void record_root(const Vec& u, const Vec& r, const Vec& point) {
        if (!w_.frame.contains_base(u, 64 * cfg_.merge_radius)) return;
        if (!v_.frame.contains_base(r, 64 * cfg_.merge_radius)) return;
        for (const auto& known : roots_) {
            double dist = 0.0;
            for (std::size_t i = 0; i < point.size(); ++i)
                dist = std::max(dist, std::abs(known.point[i] - point[i]));
            if (dist <= cfg_.merge_radius) return;
        }
        roots_.push_back({point, u, r});
    }

    const Side& w_;
    const Side& v_;
    const ProductConfig& cfg_;
    std::vector<Root> roots_;
    long nodes_ = 0;
};

}  // namespace products_detail

/**
 * Signed intersection points of two flowed cochains inside one top cube of
 * complementary total codimension.  Signs realize the product co-orientation
 * (W's normal frame followed by V's) against the cube's orientation through
 *
 *   sgn det[T_W | nu_W] . sgn det[T_V | nu_V] . sgn det[T_W | T_V],
 *
 * evaluated on the unflowed frames (the flow scales all three determinants
 * positively).  Roots within tolerance of the cube boundary, and tangential
 * configurations, raise TransversalityError: the time is too small.
 */
inline SignedPointSet fiber_product_points(const FlowedCochain& wt, const FlowedCochain& vt, CubeId e,
                                           const ProductConfig& cfg = {}) {
    const GeoCochain& w = *wt.base;
    const GeoCochain& v = *vt.base;
    const CubicalComplex& complex = *w.complex;
    if (w.complex != v.complex) throw std::invalid_argument("fiber_product_points: different complexes");
    if (!complex.is_top(e))
        throw std::invalid_argument("fiber_product_points: expected a top-dimensional cube");
    int n = complex.dim(e);
    if (w.codim + v.codim != n)
        throw std::invalid_argument("fiber_product_points: codimensions must sum to the cube dimension");

    SignedPointSet out;
    for (int pw = 0; pw < int(w.pieces.size()); ++pw) {
        if (complex.id(w.pieces[std::size_t(pw)].cube) != e) continue;
        for (int pv = 0; pv < int(v.pieces.size()); ++pv) {
            if (complex.id(v.pieces[std::size_t(pv)].cube) != e) continue;
            const GraphPiece& piece_w = w.pieces[std::size_t(pw)];
            const GraphPiece& piece_v = v.pieces[std::size_t(pv)];
            for (int cw = 0; cw < int(piece_w.cells.size()); ++cw)
                for (int cv = 0; cv < int(piece_v.cells.size()); ++cv) {
                    products_detail::Side side_w{&piece_w, geo::cell_frame(complex, piece_w, cw), wt.t,
                                                 pw, cw};
                    products_detail::Side side_v{&piece_v, geo::cell_frame(complex, piece_v, cv), vt.t,
                                                 pv, cv};
                    products_detail::CellPairSolver solver(side_w, side_v, cfg);
                    for (const auto& root : solver.solve()) {
                        for (double c : root.point)
                            if (c < kInteriorTol || c > 1.0 - kInteriorTol)
                                throw TransversalityError(
                                    "fiber product: intersection within tolerance of the boundary of "
                                    "cube " +
                                    std::to_string(e.index) + " at " + geo::describe_point(root.point));

                        // Product co-orientation sign on the unflowed frames.
                        auto nu_w = geo::normal_frame_columns(piece_w, n);
                        auto nu_v = geo::normal_frame_columns(piece_v, n);
                        std::vector<geo::Vec> tw = side_w.frame.tangents;
                        std::vector<geo::Vec> tv = side_v.frame.tangents;
                        std::vector<geo::Vec> m1 = tw, m2 = tv, m3 = tw;
                        m1.insert(m1.end(), nu_w.begin(), nu_w.end());
                        m2.insert(m2.end(), nu_v.begin(), nu_v.end());
                        m3.insert(m3.end(), tv.begin(), tv.end());
                        double d1 = geo::det_columns(m1), d2 = geo::det_columns(m2),
                               d3 = geo::det_columns(m3);
                        if (std::abs(d3) <= kRankTol)
                            throw TransversalityError("fiber product: tangential intersection in cube " +
                                                      std::to_string(e.index));
                        int sign = ((d1 > 0) == (d2 > 0) ? +1 : -1) * (d3 > 0 ? +1 : -1) *
                                   piece_w.normal_sign * piece_v.normal_sign;

                        // Merge duplicates found from adjacent cells.
                        bool dup = false;
                        for (auto& kept : out.points) {
                            double dist = 0.0;
                            for (std::size_t i = 0; i < root.point.size(); ++i)
                                dist = std::max(dist, std::abs(kept.coords[i] - root.point[i]));
                            if (dist <= cfg.merge_radius) {
                                if (kept.sign != sign)
                                    throw TransversalityError(
                                        "fiber product: inconsistent signs at a repeated root");
                                dup = true;
                                break;
                            }
                        }
                        if (!dup)
                            out.points.push_back({e, root.point, sign,
                                                  "W piece " + std::to_string(pw) + " x V piece " +
                                                      std::to_string(pv)});
                    }
                }
        }
    }
    return out;
}

/**
 * The cochain cI(f_t(W) x_M f_-t(V)) of degree |W| + |V|, computed cube by
 * cube (locality).  Supports products of full degree, i.e. |W| + |V| equal to
 * the top dimension, which covers every complementary-pair experiment.
 */
inline IntCochain product_cochain(const GeoCochain& w, const GeoCochain& v, FlowTime t,
                                  const ProductConfig& cfg = {}) {
    const CubicalComplex& complex = *w.complex;
    int degree = w.codim + v.codim;
    if (degree != complex.top_dim())
        throw std::invalid_argument(
            "product_cochain: only products of total codimension equal to the top dimension are "
            "supported");
    IntCochain out(&complex, degree);
    for (CubeId e : complex.cubes_of_dim(degree)) {
        try {
            long long value = fiber_product_points(flow_cochain(w, t), flow_cochain(v, -t), e, cfg)
                                  .signed_cardinality();
            if (value != 0) out.set(e, value);
        } catch (const TransversalityError& err) {
            throw TransversalityError(std::string(err.what()) + " (cube " + std::to_string(e.index) +
                                      ", t = " + std::to_string(t) + ")");
        }
    }
    return out;
}

// -- main theorem harness -----------------------------------------------------

struct ComparisonRow {
    double t = 0.0;
    int cube = -1;
    long long product_value = 0;
    long long cup_value = 0;
    bool equal = false;
    long long variant2_value = 0;
    long long variant2_expected = 0;
    bool transversality_ok = true;

    bool fully_equal() const {
        return transversality_ok && equal && variant2_value == variant2_expected;
    }
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    std::optional<double> threshold;  // least grid time from which all rows agree

    bool found() const { return threshold.has_value(); }
};

/**
 * Per-cube comparison at one time: cI(f_t(W) x f_-t(V)) against
 * cI(W) cup cI(V) (the flow leaves cI untouched, which is asserted), plus
 * variant (2) with the flow directions swapped against
 * (-1)^{|W||V|} cI(V) cup cI(W).  Transversality failures at this t are
 * reported per cube, not thrown.
 */
inline std::vector<ComparisonRow> main_theorem_check(const GeoCochain& w, const GeoCochain& v,
                                                     FlowTime t, const ProductConfig& cfg = {}) {
    const CubicalComplex& complex = *w.complex;
    int degree = w.codim + v.codim;
    IntCochain ciw = intersect_cochain(w);
    IntCochain civ = intersect_cochain(v);
    if (!(intersect_cochain(flow_cochain(w, t)) == ciw) ||
        !(intersect_cochain(flow_cochain(v, -t)) == civ))
        throw GeometricError("main_theorem_check: flow invariance of the intersection image failed");
    IntCochain cup_wv = cup(ciw, civ);
    IntCochain cup_vw = cup(civ, ciw);
    long long variant_sign = (w.codim * v.codim) % 2 == 0 ? 1 : -1;

    std::vector<ComparisonRow> rows;
    for (CubeId e : complex.cubes_of_dim(degree)) {
        ComparisonRow row;
        row.t = t;
        row.cube = e.index;
        row.cup_value = cup_wv[e];
        row.variant2_expected = chk_mul(variant_sign, cup_vw[e]);
        try {
            row.product_value =
                fiber_product_points(flow_cochain(w, t), flow_cochain(v, -t), e, cfg).signed_cardinality();
            row.variant2_value =
                fiber_product_points(flow_cochain(w, -t), flow_cochain(v, t), e, cfg).signed_cardinality();
            row.transversality_ok = true;
            row.equal = row.product_value == row.cup_value;
        } catch (const TransversalityError&) {
            row.transversality_ok = false;  // t too small for this cube
            row.equal = false;
        }
        rows.push_back(row);
    }
    return rows;
}

/// Sweeps the time grid; the threshold is the least grid value from which
/// every later time gives full equality in both variants.
inline ComparisonReport threshold_sweep(const GeoCochain& w, const GeoCochain& v,
                                        const ProductConfig& cfg) {
    ComparisonReport report;
    std::vector<bool> all_equal_at;
    for (double t : cfg.t_grid) {
        auto rows = main_theorem_check(w, v, t, cfg);
        bool all_equal = true;
        for (const auto& r : rows) all_equal = all_equal && r.fully_equal();
        all_equal_at.push_back(all_equal);
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    }
    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
        bool stable = true;
        for (std::size_t j = i; j < cfg.t_grid.size(); ++j) stable = stable && all_equal_at[j];
        if (stable) {
            report.threshold = cfg.t_grid[i];
            break;
        }
    }
    return report;
}

// -- reciprocal pair law --------------------------------------------------------

/**
 * Flat graph-like neighborhood of an interior point of the face F inside the
 * standard cube: the graph of a constant map over the bound axes of F, with
 * the co-orientation normalized so that its crossing number on F is +1.
 */
inline GeoCochain graph_like_neighborhood(const CubicalComplex& cube_complex, const FacePartition& f,
                                          double box = 0.25) {
    CubeId top = cube_complex.cubes_of_dim(cube_complex.top_dim()).front();
    int n = cube_complex.top_dim();
    if (f.n != n) throw std::invalid_argument("graph_like_neighborhood: face dimension mismatch");

    GraphPiece p;
    p.cube = top.index;
    p.base_axes = f.f0 | f.f1;
    int d = popcount(p.base_axes);

    // Interior point of F: free coordinates at staggered interior values.
    std::vector<double> through(std::size_t(n), 0.0);
    int k = 0;
    for (int a : axes_of(f.f01)) through[std::size_t(a - 1)] = 0.35 + 0.1 * (k++ % 3);
    for (int a : axes_of(f.f1)) through[std::size_t(a - 1)] = 1.0;

    // Domain box corners: [0, box] on initial axes, [1-box, 1] on terminal.
    std::vector<std::vector<double>> corners;
    auto base_axes = axes_of(p.base_axes);
    for (AxisMask code = 0; code < (AxisMask(1) << d); ++code) {
        auto node = through;
        for (int i = 0; i < d; ++i) {
            int a = base_axes[std::size_t(i)];
            bool far = code & (AxisMask(1) << i);
            node[std::size_t(a - 1)] = (f.f1 & axis_bit(a)) ? (far ? 1.0 - box : 1.0) : (far ? box : 0.0);
        }
        corners.push_back(node);
    }
    p.nodes = corners;

    if (d == 0) {
        p.cells = {{0}};
    } else if (d == 1) {
        p.cells = {{0, 1}};
    } else if (d == 2) {
        p.cells = {{0, 1, 2}, {1, 3, 2}};
    } else {
        // Kuhn triangulation of the box into 6 tetrahedra.
        p.cells = {{0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7}, {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}};
    }
    p.normal_sign = +1;

    GeoCochain c(&cube_complex, n - d);
    c.pieces.push_back(p);

    // Compatible co-orientation: crossing number +1 on F.
    CubeId face = cube_complex.face_of(top, f);
    long long crossing = intersection_number_points({&c, 0.0}, face).signed_cardinality();
    if (crossing == 0) throw GeometricError("graph_like_neighborhood: no crossing with its own face");
    if (crossing < 0) c.pieces[0].normal_sign = -1;
    return c;
}

/**
 * Fiber product of compatibly co-oriented graph-like neighborhoods through a
 * complementary face pair after flowing for time t.  For the reciprocal pair
 * (v^-, v^+) and t large the result is one point whose sign is the shuffle
 * sign of v; for non-reciprocal pairs it is eventually empty.
 */
inline SignedPointSet complementary_pair_points(const CubicalComplex& cube_complex,
                                                const FacePartition& f, const FacePartition& fprime,
                                                FlowTime t, const ProductConfig& cfg = {}) {
    if (f.dim() + fprime.dim() != f.n)
        throw std::invalid_argument("complementary_pair_points: faces must have complementary dimensions");
    GeoCochain c = graph_like_neighborhood(cube_complex, f);
    GeoCochain cprime = graph_like_neighborhood(cube_complex, fprime);
    CubeId top = cube_complex.cubes_of_dim(cube_complex.top_dim()).front();
    return fiber_product_points(flow_cochain(c, t), flow_cochain(cprime, -t), top, cfg);
}

inline SignedPointSet reciprocal_unit_test(const CubicalComplex& cube_complex, const VertexSet& v,
                                           FlowTime t, const ProductConfig& cfg = {}) {
    auto [vminus, vplus] = face_decomposition(FacePartition::vertex(v));
    return complementary_pair_points(cube_complex, vminus, vplus, t, cfg);
}

// -- reports ----------------------------------------------------------------------

inline void write_report_csv(const ComparisonReport& report, std::ostream& os) {
    os << "t,cube,product_value,cup_value,equal,variant2_value,variant2_expected,transversality_ok\n";
    for (const auto& r : report.rows)
        os << r.t << "," << r.cube << "," << r.product_value << "," << r.cup_value << ","
           << (r.equal ? 1 : 0) << "," << r.variant2_value << "," << r.variant2_expected << ","
           << (r.transversality_ok ? 1 : 0) << "\n";
}

inline nlohmann::json report_to_json(const ComparisonReport& report) {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : report.rows)
        j["rows"].push_back({{"t", r.t},
                             {"cube", r.cube},
                             {"product_value", r.product_value},
                             {"cup_value", r.cup_value},
                             {"equal", r.equal},
                             {"variant2_value", r.variant2_value},
                             {"variant2_expected", r.variant2_expected},
                             {"transversality_ok", r.transversality_ok}});
    if (report.threshold) j["t_found"] = *report.threshold;
    else j["t_found"] = nullptr;
    return j;
}

}  // namespace cubeflow

#endif  // CUBEFLOW_PRODUCTS_HPP
