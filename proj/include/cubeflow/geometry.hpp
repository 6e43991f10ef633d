/**
 * Geometric cochains as co-oriented coordinate-graph pieces inside the top
 * cubes of a cubulation: transversality validation, the geometric boundary
 * with induced co-orientations, and the intersection homomorphism sending a
 * cochain to the signed count of its crossings with complementary cubes.
 *
 * A piece is the graph of a piecewise-linear map over a subset A of the cube
 * axes: a point (|A| = 0), a polyline over one axis, a triangulated region
 * over two, or a tetrahedralized region over three.  Its co-orientation is
 * stored as one sign against the canonical frame of ascending complement
 * axes.  The logistic flow acts through the evaluator y -> f_t(g(f_-t(y)));
 * since faces are fixed by the flow, face crossings and their signs can be
 * computed exactly on the unflowed mesh.
 */

#ifndef CUBEFLOW_GEOMETRY_HPP
#define CUBEFLOW_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cubeflow/chains.hpp"
#include "cubeflow/complex.hpp"
#include "cubeflow/flow.hpp"

namespace cubeflow {

inline constexpr double kInteriorTol = 1e-7;  // clearance from deeper strata
inline constexpr double kRankTol = 1e-9;      // linearization rank threshold
inline constexpr double kMergeTol = 1e-8;     // duplicate point merge radius

// -- small dense double helpers ----------------------------------------------

namespace geo {

using Vec = std::vector<double>;

/// Determinant of column vectors via elimination with partial pivoting.
inline double det_columns(std::vector<Vec> cols) {
    int n = int(cols.size());
    for (const auto& c : cols)
        if (int(c.size()) != n) throw std::invalid_argument("det_columns: not square");
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int pivot = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(cols[std::size_t(k)][std::size_t(i)]) >
                std::abs(cols[std::size_t(k)][std::size_t(pivot)]))
                pivot = i;
        if (cols[std::size_t(k)][std::size_t(pivot)] == 0.0) return 0.0;
        if (pivot != k) {
            for (int j = k; j < n; ++j) std::swap(cols[std::size_t(j)][std::size_t(k)], cols[std::size_t(j)][std::size_t(pivot)]);
            det = -det;
        }
        double p = cols[std::size_t(k)][std::size_t(k)];
        det *= p;
        for (int j = k + 1; j < n; ++j) {
            double f = cols[std::size_t(j)][std::size_t(k)] / p;
            for (int i = k; i < n; ++i) cols[std::size_t(j)][std::size_t(i)] -= f * cols[std::size_t(k)][std::size_t(i)];
        }
    }
    return det;
}

/// Rank of a small dense matrix (rows of equal length) at a pivot threshold.
inline int matrix_rank(std::vector<Vec> rows, double tol) {
    if (rows.empty()) return 0;
    int m = int(rows.size()), n = int(rows[0].size());
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int pivot = -1;
        double best = tol;
        for (int i = rank; i < m; ++i)
            if (std::abs(rows[std::size_t(i)][std::size_t(col)]) > best) {
                pivot = i;
                best = std::abs(rows[std::size_t(i)][std::size_t(col)]);
            }
        if (pivot < 0) continue;
        std::swap(rows[std::size_t(rank)], rows[std::size_t(pivot)]);
        for (int i = 0; i < m; ++i) {
            if (i == rank) continue;
            double f = rows[std::size_t(i)][std::size_t(col)] / rows[std::size_t(rank)][std::size_t(col)];
            for (int j = col; j < n; ++j) rows[std::size_t(i)][std::size_t(j)] -= f * rows[std::size_t(rank)][std::size_t(j)];
        }
        ++rank;
    }
    return rank;
}

/// Solves a small square system in place; nullopt when the pivot collapses.
inline std::optional<Vec> solve_square(std::vector<Vec> a, Vec b, double tol) {
    int n = int(b.size());
    for (int k = 0; k < n; ++k) {
        int pivot = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a[std::size_t(i)][std::size_t(k)]) > std::abs(a[std::size_t(pivot)][std::size_t(k)])) pivot = i;
        if (std::abs(a[std::size_t(pivot)][std::size_t(k)]) <= tol) return std::nullopt;
        std::swap(a[std::size_t(k)], a[std::size_t(pivot)]);
        std::swap(b[std::size_t(k)], b[std::size_t(pivot)]);
        for (int i = k + 1; i < n; ++i) {
            double f = a[std::size_t(i)][std::size_t(k)] / a[std::size_t(k)][std::size_t(k)];
            for (int j = k; j < n; ++j) a[std::size_t(i)][std::size_t(j)] -= f * a[std::size_t(k)][std::size_t(j)];
            b[std::size_t(i)] -= f * b[std::size_t(k)];
        }
    }
    Vec x(std::size_t(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[std::size_t(i)];
        for (int j = i + 1; j < n; ++j) s -= a[std::size_t(i)][std::size_t(j)] * x[std::size_t(j)];
        x[std::size_t(i)] = s / a[std::size_t(i)][std::size_t(i)];
    }
    return x;
}

inline std::vector<double> axis_vector(int n, int axis) {
    std::vector<double> v(std::size_t(n), 0.0);
    v[std::size_t(axis - 1)] = 1.0;
    return v;
}

}  // namespace geo

// -- pieces ------------------------------------------------------------------

/**
 * One co-oriented graph piece: a PL graph over the coordinate plane spanned
 * by base_axes inside a top-dimensional cube.  Nodes carry full cube-local
 * coordinates; cells are simplices of node indices (dim + 1 each).  The
 * normal frame is normal_sign times the ascending complement axes.
 */
struct GraphPiece {
    int cube = -1;
    AxisMask base_axes = 0;
    std::vector<std::vector<double>> nodes;
    std::vector<std::vector<int>> cells;
    int normal_sign = +1;

    int dim() const { return popcount(base_axes); }

    std::vector<int> base_axis_list() const { return axes_of(base_axes); }

    std::vector<double> base_coords(int node) const {
        std::vector<double> out;
        for (int a : axes_of(base_axes)) out.push_back(nodes[std::size_t(node)][std::size_t(a - 1)]);
        return out;
    }
};

/// A boundary facet of a piece's mesh: dim()-sized node subset of one cell.
struct PieceFacet {
    std::vector<int> nodes;  // ascending node indices
    int cell = -1;           // the unique incident cell
    int opposite = -1;       // node of `cell` not on the facet
};

/// Boundary facets in a stable order (lexicographic by node indices).
inline std::vector<PieceFacet> piece_facets(const GraphPiece& piece) {
    std::map<std::vector<int>, std::vector<std::pair<int, int>>> incidence;
    for (int c = 0; c < int(piece.cells.size()); ++c) {
        const auto& cell = piece.cells[std::size_t(c)];
        for (int skip = 0; skip < int(cell.size()); ++skip) {
            std::vector<int> facet;
            for (int i = 0; i < int(cell.size()); ++i)
                if (i != skip) facet.push_back(cell[std::size_t(i)]);
            if (facet.empty()) continue;  // point pieces have no facets
            std::sort(facet.begin(), facet.end());
            incidence[facet].emplace_back(c, cell[std::size_t(skip)]);
        }
    }
    std::vector<PieceFacet> out;
    for (const auto& [nodes, owners] : incidence)
        if (owners.size() == 1) out.push_back({nodes, owners[0].first, owners[0].second});
    return out;
}

struct FacetRef {
    int piece = -1;
    int facet = -1;
    bool operator==(const FacetRef&) const = default;
    bool operator<(const FacetRef& o) const {
        return piece != o.piece ? piece < o.piece : facet < o.facet;
    }
};

/**
 * A geometric cochain: graph pieces of a common codimension together with the
 * table matching boundary facets across shared top-cube faces.  Matched
 * facets are continuations of one global manifold; everything else is honest
 * boundary.
 */
struct GeoCochain {
    const CubicalComplex* complex = nullptr;
    int codim = 0;
    std::vector<GraphPiece> pieces;
    std::vector<std::pair<FacetRef, FacetRef>> matching;

    GeoCochain() = default;
    GeoCochain(const CubicalComplex* complex_, int codim_) : complex(complex_), codim(codim_) {}

    GeoCochain reversed() const {
        GeoCochain out = *this;
        for (auto& p : out.pieces) p.normal_sign = -p.normal_sign;
        return out;
    }

    /// Disjoint union; matching references of `other` are shifted.
    GeoCochain disjoint_union(const GeoCochain& other) const {
        if (complex != other.complex || codim != other.codim)
            throw std::invalid_argument("disjoint_union: mismatched complex or codimension");
        GeoCochain out = *this;
        int shift = int(pieces.size());
        for (const auto& p : other.pieces) out.pieces.push_back(p);
        for (auto [a, b] : other.matching)
            out.matching.push_back({{a.piece + shift, a.facet}, {b.piece + shift, b.facet}});
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["codim"] = codim;
        j["pieces"] = nlohmann::json::array();
        for (const auto& p : pieces) {
            nlohmann::json jp;
            jp["cube"] = p.cube;
            jp["base_axes"] = p.base_axis_list();
            jp["nodes"] = p.nodes;
            jp["cells"] = p.cells;
            jp["normal_sign"] = p.normal_sign;
            j["pieces"].push_back(jp);
        }
        j["matching"] = nlohmann::json::array();
        for (const auto& [a, b] : matching)
            j["matching"].push_back({{a.piece, a.facet}, {b.piece, b.facet}});
        return j;
    }

    static GeoCochain from_json(const CubicalComplex& complex, const nlohmann::json& j) {
        GeoCochain out(&complex, j.at("codim").get<int>());
        for (const auto& jp : j.at("pieces")) {
            GraphPiece p;
            p.cube = jp.at("cube").get<int>();
            for (int a : jp.at("base_axes").get<std::vector<int>>()) p.base_axes |= axis_bit(a);
            p.nodes = jp.at("nodes").get<std::vector<std::vector<double>>>();
            p.cells = jp.at("cells").get<std::vector<std::vector<int>>>();
            p.normal_sign = jp.at("normal_sign").get<int>();
            snap_nodes(p);
            out.pieces.push_back(std::move(p));
        }
        if (j.contains("matching"))
            for (const auto& jm : j.at("matching"))
                out.matching.push_back({{jm.at(0).at(0).get<int>(), jm.at(0).at(1).get<int>()},
                                        {jm.at(1).at(0).get<int>(), jm.at(1).at(1).get<int>()}});
        return out;
    }

    static void snap_nodes(GraphPiece& p) {
        for (auto& node : p.nodes)
            for (auto& c : node) {
                if (std::abs(c) <= kSnapTolerance) c = 0.0;
                if (std::abs(c - 1.0) <= kSnapTolerance) c = 1.0;
            }
    }
};

/// A geometric cochain carried along the logistic flow for time t; the
/// underlying meshes are untouched, evaluation composes with the flow.
struct FlowedCochain {
    const GeoCochain* base = nullptr;
    FlowTime t = 0.0;
};

inline FlowedCochain flow_cochain(const GeoCochain& w, FlowTime t) { return {&w, t}; }

/// One piece carried by the flow.  The carrier is f_t of the base carrier
/// and remains a graph over the same axes; no remeshing happens, evaluation
/// conjugates the stored PL graph with the coordinatewise flow.
struct FlowedPiece {
    const GraphPiece* base = nullptr;
    FlowTime t = 0.0;
};

inline FlowedPiece flow_piece(const GraphPiece& p, FlowTime t) { return {&p, t}; }

// -- per-cell geometry -------------------------------------------------------

namespace geo {

/// Affine geometry of one mesh cell of a piece: base simplex and the full
/// coordinate differential (columns are tangent vectors per base axis).
struct CellFrame {
    const GraphPiece* piece = nullptr;
    int cell = -1;
    int n = 0;  // ambient dimension
    std::vector<Vec> base_vertices;
    std::vector<Vec> tangents;  // dim() columns of length n
    bool degenerate = false;

    Vec carrier_at(const Vec& base_point) const {
        // Affine interpolation through node 0 of the cell.
        const auto& cell_nodes = piece->cells[std::size_t(cell)];
        Vec out = piece->nodes[std::size_t(cell_nodes[0])];
        Vec b0 = base_vertices[0];
        for (int a = 0; a < int(base_point.size()); ++a) {
            double d = base_point[std::size_t(a)] - b0[std::size_t(a)];
            for (int i = 0; i < n; ++i) out[std::size_t(i)] += d * tangents[std::size_t(a)][std::size_t(i)];
        }
        return out;
    }

    /// Barycentric coordinates of a base point with respect to the cell.
    std::optional<Vec> barycentric(const Vec& base_point, double tol) const {
        int d = int(base_vertices.size()) - 1;
        if (d == 0) return Vec{1.0};
        std::vector<Vec> a(std::size_t(d), Vec(std::size_t(d), 0.0));
        Vec rhs(std::size_t(d), 0.0);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j)
                a[std::size_t(i)][std::size_t(j)] =
                    base_vertices[std::size_t(j) + 1][std::size_t(i)] - base_vertices[0][std::size_t(i)];
            rhs[std::size_t(i)] = base_point[std::size_t(i)] - base_vertices[0][std::size_t(i)];
        }
        auto lambda = solve_square(a, rhs, tol);
        if (!lambda) return std::nullopt;
        Vec full{1.0};
        for (double l : *lambda) {
            full.push_back(l);
            full[0] -= l;
        }
        return full;
    }

    bool contains_base(const Vec& base_point, double slack) const {
        auto l = barycentric(base_point, kRankTol * 1e-3);
        if (!l) return false;
        for (double c : *l)
            if (c < -slack) return false;
        return true;
    }
};

inline CellFrame cell_frame(const CubicalComplex& complex, const GraphPiece& piece, int cell) {
    CellFrame f;
    f.piece = &piece;
    f.cell = cell;
    f.n = complex.dim(complex.id(piece.cube));
    const auto& cn = piece.cells[std::size_t(cell)];
    int d = piece.dim();
    for (int i = 0; i < int(cn.size()); ++i) f.base_vertices.push_back(piece.base_coords(cn[std::size_t(i)]));

    // Differential: solve  g . (b_j - b_0) = node_j - node_0  per coordinate;
    // equations are indexed by the cell vertices, unknowns by base axes.
    if (d == 0) return f;
    std::vector<Vec> basis(std::size_t(d), Vec(std::size_t(d), 0.0));
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            basis[std::size_t(j)][std::size_t(i)] =
                f.base_vertices[std::size_t(j) + 1][std::size_t(i)] - f.base_vertices[0][std::size_t(i)];
    f.tangents.assign(std::size_t(d), Vec(std::size_t(f.n), 0.0));
    for (int coord = 0; coord < f.n; ++coord) {
        Vec rhs(std::size_t(d), 0.0);
        for (int j = 0; j < d; ++j)
            rhs[std::size_t(j)] = piece.nodes[std::size_t(cn[std::size_t(j) + 1])][std::size_t(coord)] -
                                  piece.nodes[std::size_t(cn[0])][std::size_t(coord)];
        auto g = solve_square(basis, rhs, kRankTol);
        if (!g) {
            f.degenerate = true;
            return f;
        }
        for (int a = 0; a < d; ++a) f.tangents[std::size_t(a)][std::size_t(coord)] = (*g)[std::size_t(a)];
    }
    return f;
}

/// The flowed piece's graph evaluator y -> f_t(g(f_-t(y))): full carrier
/// point of a flowed piece over flowed base coordinates.
inline Vec flowed_graph_point(const CubicalComplex& complex, const FlowedPiece& fp, int cell,
                              const Vec& flowed_base) {
    Vec base = flowed_base;
    for (double& c : base) c = flow_inverse_scalar(c, fp.t);
    CellFrame frame = cell_frame(complex, *fp.base, cell);
    return flow_point(frame.carrier_at(base), fp.t);
}

/// Tangent columns pushed forward by the flow Jacobian at a carrier point.
inline std::vector<Vec> flowed_tangents(const CellFrame& frame, const Vec& carrier_point, FlowTime t) {
    std::vector<Vec> out = frame.tangents;
    if (t == 0.0) return out;
    for (auto& col : out)
        for (int i = 0; i < frame.n; ++i)
            col[std::size_t(i)] *= flow_jacobian_scalar(carrier_point[std::size_t(i)], t);
    return out;
}

/// Sign comparing orientation classes det[T | a] vs det[T | b]; zero when
/// either determinant is numerically singular at the given scale.
inline int orientation_comparison(const std::vector<Vec>& tangents, const std::vector<Vec>& frame_a,
                                  const std::vector<Vec>& frame_b, double tol) {
    std::vector<Vec> ma = tangents, mb = tangents;
    ma.insert(ma.end(), frame_a.begin(), frame_a.end());
    mb.insert(mb.end(), frame_b.begin(), frame_b.end());
    double da = det_columns(ma), db = det_columns(mb);
    if (std::abs(da) <= tol || std::abs(db) <= tol) return 0;
    return (da > 0) == (db > 0) ? +1 : -1;
}

}  // namespace geo

// -- signed point sets ---------------------------------------------------------

struct SignedPoint {
    CubeId cube;                 // cube owning the coordinates below
    std::vector<double> coords;  // local coordinates in that cube
    int sign = +1;
    std::string provenance;
};

struct SignedPointSet {
    std::vector<SignedPoint> points;

    long long signed_cardinality() const {
        long long total = 0;
        for (const auto& p : points) total += p.sign;
        return total;
    }
};

struct GeometricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- validation ----------------------------------------------------------------

struct GeoValidationReport {
    std::vector<std::string> errors;       // transversality / structure failures
    std::vector<std::string> open_facets;  // unmatched facets lying on cube faces

    bool transverse() const { return errors.empty(); }
    bool closed_over_skeleton() const { return errors.empty() && open_facets.empty(); }
    std::string str() const {
        std::string s;
        for (const auto& e : errors) s += "error: " + e + "\n";
        for (const auto& e : open_facets) s += "open facet: " + e + "\n";
        return s;
    }
};

namespace geo {

inline std::string describe_point(const Vec& x) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ")";
    return os.str();
}

/// Axes on which a coordinate sits exactly at a wall, as a (f0-set, f1-set).
inline std::pair<AxisMask, AxisMask> wall_contacts(const Vec& x) {
    AxisMask at0 = 0, at1 = 0;
    for (int a = 1; a <= int(x.size()); ++a) {
        if (x[std::size_t(a - 1)] == 0.0) at0 |= axis_bit(a);
        if (x[std::size_t(a - 1)] == 1.0) at1 |= axis_bit(a);
    }
    return {at0, at1};
}

}  // namespace geo

/**
 * Transversality diagnostics for a cochain.  Checks, per piece: mesh sanity
 * and graph form, wall contacts confined to clean boundary-facet nodes of
 * admissible stratum depth with full-rank linearization, and no cell
 * contained in a wall.  Checks globally: the facet matching table pairs
 * coincident carriers with consistent co-orientations; unmatched facets on
 * cube faces are reported separately (they make the cochain non-transverse
 * as a closed object but are tolerated by the local lemma harnesses).
 */
inline GeoValidationReport validate_transverse(const GeoCochain& w) {
    GeoValidationReport report;
    const CubicalComplex& complex = *w.complex;

    auto piece_tag = [](int i) { return "piece " + std::to_string(i); };

    std::vector<std::vector<PieceFacet>> all_facets;
    for (int pi = 0; pi < int(w.pieces.size()); ++pi) {
        const GraphPiece& p = w.pieces[std::size_t(pi)];
        all_facets.push_back(piece_facets(p));
        int n = 0;
        if (p.cube < 0 || p.cube >= complex.cube_count()) {
            report.errors.push_back(piece_tag(pi) + ": cube index out of range");
            continue;
        }
        CubeId cube = complex.id(p.cube);
        if (!complex.is_top(cube)) {
            report.errors.push_back(piece_tag(pi) + ": pieces must live in top-dimensional cubes");
            continue;
        }
        n = complex.dim(cube);
        int d = p.dim();
        if (d != complex.top_dim() - w.codim) {
            report.errors.push_back(piece_tag(pi) + ": dimension does not match cochain codimension");
            continue;
        }
        if (p.base_axes & ~full_mask(n)) {
            report.errors.push_back(piece_tag(pi) + ": base axes outside the cube");
            continue;
        }
        if (p.normal_sign != 1 && p.normal_sign != -1) {
            report.errors.push_back(piece_tag(pi) + ": normal sign must be +1 or -1");
            continue;
        }
        if (p.nodes.empty() || p.cells.empty()) {
            report.errors.push_back(piece_tag(pi) + ": empty mesh");
            continue;
        }
        bool shape_ok = true;
        for (const auto& node : p.nodes)
            if (int(node.size()) != n) shape_ok = false;
        for (const auto& cell : p.cells) {
            if (int(cell.size()) != d + 1) shape_ok = false;
            else
                for (int v : cell)
                    if (v < 0 || v >= int(p.nodes.size())) shape_ok = false;
        }
        if (!shape_ok) {
            report.errors.push_back(piece_tag(pi) + ": malformed nodes or cells");
            continue;
        }

        // Coordinates in range and clean: exactly on a wall or clearly inside.
        bool clean = true;
        for (const auto& node : p.nodes)
            for (double c : node) {
                if (c < 0.0 || c > 1.0) {
                    report.errors.push_back(piece_tag(pi) + ": node coordinate outside the cube");
                    clean = false;
                }
                if ((c != 0.0 && c < kInteriorTol) || (c != 1.0 && c > 1.0 - kInteriorTol)) {
                    report.errors.push_back(piece_tag(pi) + ": node within tolerance of a wall at " +
                                            geo::describe_point(node));
                    clean = false;
                }
            }
        if (!clean) continue;

        // Graph form per cell.
        std::vector<geo::CellFrame> frames;
        bool graph_ok = true;
        for (int c = 0; c < int(p.cells.size()); ++c) {
            frames.push_back(geo::cell_frame(complex, p, c));
            if (frames.back().degenerate) {
                report.errors.push_back(piece_tag(pi) + ": cell " + std::to_string(c) +
                                        " is degenerate over the base axes (not a graph)");
                graph_ok = false;
            }
        }
        if (!graph_ok) continue;

        // Polylines must progress monotonically along their base axis.
        if (d == 1) {
            for (const auto& cell : p.cells) {
                double a = p.base_coords(cell[0])[0], b = p.base_coords(cell[1])[0];
                if (!(b > a))
                    report.errors.push_back(piece_tag(pi) + ": polyline cell not ascending in the base axis");
            }
        }

        // Wall contacts: only at boundary-facet nodes, with depth at most the
        // piece dimension and full-rank contact equations on incident cells.
        std::set<int> boundary_nodes;
        for (const auto& f : all_facets.back())
            for (int v : f.nodes) boundary_nodes.insert(v);
        if (d == 0) boundary_nodes.insert(p.cells[0][0]);

        for (int ni = 0; ni < int(p.nodes.size()); ++ni) {
            auto [at0, at1] = geo::wall_contacts(p.nodes[std::size_t(ni)]);
            int k = popcount(at0 | at1);
            if (k == 0) continue;
            if (k > d) {
                report.errors.push_back(piece_tag(pi) + ": node " + std::to_string(ni) +
                                        " touches a stratum of depth " + std::to_string(k) +
                                        " deeper than the piece dimension");
                continue;
            }
            if (!boundary_nodes.count(ni)) {
                report.errors.push_back(piece_tag(pi) + ": interior node " + std::to_string(ni) +
                                        " lies on a cube face");
                continue;
            }
            // Rank of the contact equations on each incident cell.
            for (int c = 0; c < int(p.cells.size()); ++c) {
                const auto& cell = p.cells[std::size_t(c)];
                if (std::find(cell.begin(), cell.end(), ni) == cell.end()) continue;
                std::vector<geo::Vec> rows;
                for (int a : axes_of(at0 | at1)) {
                    geo::Vec row;
                    for (const auto& tcol : frames[std::size_t(c)].tangents)
                        row.push_back(tcol[std::size_t(a - 1)]);
                    rows.push_back(row);
                }
                if (geo::matrix_rank(rows, kRankTol) < k)
                    report.errors.push_back(piece_tag(pi) + ": contact at node " + std::to_string(ni) +
                                            " has rank-deficient linearization");
            }
        }

        // No cell may lie inside a wall.
        for (int c = 0; c < int(p.cells.size()); ++c) {
            const auto& cell = p.cells[std::size_t(c)];
            for (int a = 1; a <= n; ++a)
                for (double wall : {0.0, 1.0}) {
                    int m = 0;
                    for (int v : cell)
                        if (p.nodes[std::size_t(v)][std::size_t(a - 1)] == wall) ++m;
                    if (m == int(cell.size()))
                        report.errors.push_back(piece_tag(pi) + ": cell " + std::to_string(c) +
                                                " is contained in a cube face");
                }
        }
    }
    if (!report.errors.empty()) return report;

    // Matching table: valid references, each facet used once, carriers agree.
    std::set<FacetRef> used;
    for (const auto& [a, b] : w.matching) {
        for (const FacetRef& r : {a, b}) {
            if (r.piece < 0 || r.piece >= int(w.pieces.size()) || r.facet < 0 ||
                r.facet >= int(all_facets[std::size_t(r.piece)].size())) {
                report.errors.push_back("matching entry references a missing facet");
                return report;
            }
            if (!used.insert(r).second)
                report.errors.push_back("facet matched more than once: piece " + std::to_string(r.piece));
        }
        const auto& fa = all_facets[std::size_t(a.piece)][std::size_t(a.facet)];
        const auto& fb = all_facets[std::size_t(b.piece)][std::size_t(b.facet)];
        if (fa.nodes.size() != fb.nodes.size()) {
            report.errors.push_back("matched facets of different dimensions");
            continue;
        }
        // Carrier agreement through canonical points, as unordered node sets.
        const GraphPiece& pa = w.pieces[std::size_t(a.piece)];
        const GraphPiece& pb = w.pieces[std::size_t(b.piece)];
        std::vector<CanonicalPoint> ca, cb;
        try {
            for (int v : fa.nodes)
                ca.push_back(complex.canonical_point({complex.id(pa.cube), pa.nodes[std::size_t(v)]}));
            for (int v : fb.nodes)
                cb.push_back(complex.canonical_point({complex.id(pb.cube), pb.nodes[std::size_t(v)]}));
        } catch (const std::exception& e) {
            report.errors.push_back(std::string("matching: ") + e.what());
            continue;
        }
        std::vector<bool> taken(cb.size(), false);
        bool coincide = true;
        for (const auto& p : ca) {
            bool found = false;
            for (std::size_t i = 0; i < cb.size(); ++i)
                if (!taken[i] && p.approx_equal(cb[i], kMergeTol)) {
                    taken[i] = true;
                    found = true;
                    break;
                }
            if (!found) {
                report.errors.push_back("matched facets of pieces " + std::to_string(a.piece) + " and " +
                                        std::to_string(b.piece) + " do not coincide");
                coincide = false;
            }
        }
        if (!coincide) continue;

        // Co-orientation continuity across the shared face: transport the
        // frame axes through the face's two realizations; the transverse
        // axis flips orientation only when both cubes sit on the same side.
        auto centroid_in = [&](const GraphPiece& p, const PieceFacet& f) {
            std::vector<double> c(p.nodes[0].size(), 0.0);
            for (int v : f.nodes)
                for (std::size_t i = 0; i < c.size(); ++i)
                    c[i] += p.nodes[std::size_t(v)][i] / double(f.nodes.size());
            return c;
        };
        auto canon_a = complex.canonical_point({complex.id(pa.cube), centroid_in(pa, fa)});
        auto canon_b = complex.canonical_point({complex.id(pb.cube), centroid_in(pb, fb)});
        if (canon_a.location.codim() != 1 || canon_b.location.codim() != 1) {
            report.errors.push_back("matched facets of pieces " + std::to_string(a.piece) + " and " +
                                    std::to_string(b.piece) + " do not lie on a shared codim-1 face");
            continue;
        }
        auto free_a = axes_of(canon_a.location.f01), free_b = axes_of(canon_b.location.f01);
        int trans_a = axes_of(canon_a.location.f0 | canon_a.location.f1)[0];
        int trans_b = axes_of(canon_b.location.f0 | canon_b.location.f1)[0];
        bool same_side = (canon_a.location.f0 != 0) == (canon_b.location.f0 != 0);
        int n_a = complex.dim(complex.id(pa.cube));
        AxisMask mapped = 0;
        int transported_sign = pa.normal_sign;
        bool mappable = true;
        for (int c : axes_of(full_mask(n_a) & ~pa.base_axes)) {
            if (c == trans_a) {
                mapped |= axis_bit(trans_b);
                if (same_side) transported_sign = -transported_sign;
            } else {
                auto it = std::find(free_a.begin(), free_a.end(), c);
                if (it == free_a.end()) mappable = false;
                else mapped |= axis_bit(free_b[std::size_t(it - free_a.begin())]);
            }
        }
        AxisMask comp_b = full_mask(complex.dim(complex.id(pb.cube))) & ~pb.base_axes;
        if (!mappable || mapped != comp_b || transported_sign != pb.normal_sign)
            report.errors.push_back("matched facets of pieces " + std::to_string(a.piece) + " and " +
                                    std::to_string(b.piece) + " carry inconsistent co-orientations");
    }

    // Unmatched facets on cube faces break closedness over the skeleton.
    for (int pi = 0; pi < int(w.pieces.size()); ++pi) {
        const GraphPiece& p = w.pieces[std::size_t(pi)];
        for (int fi = 0; fi < int(all_facets[std::size_t(pi)].size()); ++fi) {
            if (used.count({pi, fi})) continue;
            for (int v : all_facets[std::size_t(pi)][std::size_t(fi)].nodes) {
                auto [at0, at1] = geo::wall_contacts(p.nodes[std::size_t(v)]);
                if (at0 | at1) {
                    report.open_facets.push_back("piece " + std::to_string(pi) + " facet " +
                                                 std::to_string(fi) + " node " + std::to_string(v) +
                                                 " at " + geo::describe_point(p.nodes[std::size_t(v)]));
                    break;
                }
            }
        }
    }
    return report;
}

// -- intersection homomorphism -------------------------------------------------

namespace geo {

/// Normal frame columns of a piece: ascending complement axes (sign is
/// carried separately).
inline std::vector<Vec> normal_frame_columns(const GraphPiece& p, int n) {
    std::vector<Vec> out;
    for (int a : axes_of(full_mask(n) & ~p.base_axes)) out.push_back(axis_vector(n, a));
    return out;
}

/// Canonical-orientation columns of a face: its ascending free axes.
inline std::vector<Vec> face_frame_columns(const FacePartition& f) {
    std::vector<Vec> out;
    for (int a : axes_of(f.f01)) out.push_back(axis_vector(f.n, a));
    return out;
}

}  // namespace geo

/**
 * Signed crossings of a (possibly flowed) cochain with a complementary cube:
 * on each piece whose top cube contains E, solves the affine equations
 * pinning E's bound coordinates and signs each interior solution by
 * comparing det[T | normal frame] against det[T | free axes of E].  Face
 * values are fixed by the flow, so roots live on the unflowed mesh and only
 * the tangent frames feel the flow (through positive diagonal scalings).
 *
 * Throws GeometricError on rank-deficient crossings or solutions within
 * tolerance of the boundary of E.
 */
inline SignedPointSet intersection_number_points(const FlowedCochain& wt, CubeId e) {
    const GeoCochain& w = *wt.base;
    const CubicalComplex& complex = *w.complex;
    if (complex.dim(e) != w.codim)
        throw std::invalid_argument("intersection_number: cube dimension must equal the codimension");

    struct Root {
        std::vector<double> face_coords;
        int sign;
        std::string provenance;
    };
    std::vector<Root> roots;

    for (const FaceRealization& site : complex.realizations(e)) {
        int n = complex.dim(site.top);
        auto bound0 = axes_of(site.location.f0);
        auto bound1 = axes_of(site.location.f1);
        for (int pi = 0; pi < int(w.pieces.size()); ++pi) {
            const GraphPiece& p = w.pieces[std::size_t(pi)];
            if (complex.id(p.cube) != site.top) continue;
            int d = p.dim();
            for (int ci = 0; ci < int(p.cells.size()); ++ci) {
                geo::CellFrame frame = geo::cell_frame(complex, p, ci);
                // Affine system: bound coordinates of E pinned at their values.
                std::vector<geo::Vec> a;
                geo::Vec rhs;
                const auto& cn = p.cells[std::size_t(ci)];
                const auto& origin = p.nodes[std::size_t(cn[0])];
                auto add_equation = [&](int axis, double value) {
                    geo::Vec row;
                    for (const auto& tcol : frame.tangents) row.push_back(tcol[std::size_t(axis - 1)]);
                    a.push_back(row);
                    rhs.push_back(value - origin[std::size_t(axis - 1)]);
                };
                for (int axis : bound0) add_equation(axis, 0.0);
                for (int axis : bound1) add_equation(axis, 1.0);

                geo::Vec base_root;
                if (d == 0) {
                    bool on_face = true;
                    for (int axis : bound0)
                        if (origin[std::size_t(axis - 1)] != 0.0) on_face = false;
                    for (int axis : bound1)
                        if (origin[std::size_t(axis - 1)] != 1.0) on_face = false;
                    if (!on_face) continue;
                    base_root = {};
                } else {
                    // Offset the system to base coordinates relative to node 0.
                    geo::Vec shifted_rhs = rhs;
                    auto base0 = frame.base_vertices[0];
                    auto solution = geo::solve_square(a, shifted_rhs, kRankTol);
                    if (!solution) {
                        // Singular: either empty or a containment; containment
                        // was rejected by validation, near-singular crossings
                        // are honest transversality failures.
                        bool consistent = true;
                        std::vector<geo::Vec> rows = a;
                        for (std::size_t r = 0; r < rows.size(); ++r) rows[r].push_back(shifted_rhs[r]);
                        if (geo::matrix_rank(rows, kRankTol) > geo::matrix_rank(a, kRankTol)) consistent = false;
                        if (consistent)
                            throw GeometricError("intersection with " + to_string(site.location) +
                                                 ": rank-deficient linearization on piece " +
                                                 std::to_string(pi));
                        continue;
                    }
                    base_root = base0;
                    for (std::size_t i = 0; i < solution->size(); ++i) base_root[i] += (*solution)[i];
                    if (!frame.contains_base(base_root, kMergeTol)) continue;
                }

                geo::Vec x = d == 0 ? origin : frame.carrier_at(base_root);
                // Interiority within E: free coordinates clear of the walls.
                std::vector<double> face_coords;
                bool interior = true;
                for (int axis : axes_of(site.location.f01)) {
                    double c = x[std::size_t(axis - 1)];
                    if (c < kInteriorTol || c > 1.0 - kInteriorTol) interior = false;
                    face_coords.push_back(c);
                }
                if (!interior)
                    throw GeometricError("intersection with " + to_string(site.location) + " at " +
                                         geo::describe_point(x) +
                                         ": solution within tolerance of the cube boundary");

                // The flow scales tangents by a positive diagonal, so the
                // orientation comparison is computed on the unflowed frames;
                // this keeps the determinants conditioned at every t.
                auto nu = geo::normal_frame_columns(p, n);
                auto be = geo::face_frame_columns(site.location);
                int cmp = geo::orientation_comparison(frame.tangents, nu, be, kRankTol);
                if (cmp == 0)
                    throw GeometricError("intersection with " + to_string(site.location) + " at " +
                                         geo::describe_point(x) + ": degenerate orientation comparison");
                roots.push_back({face_coords, cmp * p.normal_sign,
                                 "piece " + std::to_string(pi) + " cell " + std::to_string(ci)});
            }
        }
    }

    // Merge duplicates (shared faces, mesh-node crossings); signs must agree.
    SignedPointSet out;
    for (const auto& r : roots) {
        bool merged = false;
        for (auto& kept : out.points) {
            double dist = 0.0;
            for (std::size_t i = 0; i < r.face_coords.size(); ++i)
                dist = std::max(dist, std::abs(kept.coords[i] - r.face_coords[i]));
            if (dist <= kMergeTol) {
                if (kept.sign != r.sign)
                    throw GeometricError("inconsistent crossing signs at a shared point of cube " +
                                         std::to_string(e.index));
                merged = true;
                break;
            }
        }
        if (!merged) out.points.push_back({e, r.face_coords, r.sign, r.provenance});
    }
    return out;
}

inline std::pair<SignedPointSet, long long> intersection_number(const GeoCochain& w, CubeId e) {
    auto pts = intersection_number_points({&w, 0.0}, e);
    return {pts, pts.signed_cardinality()};
}

/// The intersection homomorphism: degree-codim cochain of signed crossing
/// counts with every complementary-dimension cube.
inline IntCochain intersect_cochain(const FlowedCochain& wt) {
    const GeoCochain& w = *wt.base;
    const CubicalComplex& complex = *w.complex;
    IntCochain out(&complex, w.codim);
    for (CubeId e : complex.cubes_of_dim(w.codim)) {
        long long value = intersection_number_points(wt, e).signed_cardinality();
        if (value != 0) out.set(e, value);
    }
    return out;
}

inline IntCochain intersect_cochain(const GeoCochain& w) { return intersect_cochain({&w, 0.0}); }

// -- geometric boundary ---------------------------------------------------------

/**
 * Geometric boundary: the unmatched boundary facets of the meshes, each with
 * the co-orientation obtained by prepending the outward tangent direction to
 * the piece's normal frame and re-expressing against the canonical frame of
 * the new piece.  Coincident opposite point facets (interior joints of a
 * polyline chain) cancel pairwise.  Facets lying on cube faces must be
 * matched; otherwise the boundary is not transverse and this throws.
 */
inline GeoCochain boundary_geo(const GeoCochain& w) {
    const CubicalComplex& complex = *w.complex;
    GeoCochain out(w.complex, w.codim + 1);

    std::set<FacetRef> matched;
    for (const auto& [a, b] : w.matching) {
        matched.insert(a);
        matched.insert(b);
    }

    struct Candidate {
        GraphPiece piece;
        CanonicalPoint key;  // canonical location of the first node
    };
    std::vector<Candidate> candidates;

    for (int pi = 0; pi < int(w.pieces.size()); ++pi) {
        const GraphPiece& p = w.pieces[std::size_t(pi)];
        int n = complex.dim(complex.id(p.cube));
        int d = p.dim();
        auto facets = piece_facets(p);
        for (int fi = 0; fi < int(facets.size()); ++fi) {
            if (matched.count({pi, fi})) continue;
            const PieceFacet& facet = facets[std::size_t(fi)];

            for (int v : facet.nodes) {
                auto [at0, at1] = geo::wall_contacts(p.nodes[std::size_t(v)]);
                if (at0 | at1)
                    throw GeometricError(
                        "boundary_geo: unmatched facet of piece " + std::to_string(pi) +
                        " lies on a cube face; the boundary would not be transverse");
            }

            geo::CellFrame frame = geo::cell_frame(complex, p, facet.cell);

            // Outward base direction: away from the opposite vertex, normal to
            // the facet inside the base plane.
            geo::Vec facet_centroid(std::size_t(d), 0.0);
            for (int v : facet.nodes) {
                auto b = p.base_coords(v);
                for (int i = 0; i < d; ++i) facet_centroid[std::size_t(i)] += b[std::size_t(i)] / double(facet.nodes.size());
            }
            auto opp = p.base_coords(facet.opposite);
            geo::Vec outward_base(std::size_t(d), 0.0);
            for (int i = 0; i < d; ++i) outward_base[std::size_t(i)] = facet_centroid[std::size_t(i)] - opp[std::size_t(i)];
            if (d >= 2) {
                // Project out the facet's own base directions.
                std::vector<geo::Vec> span;
                auto b0 = p.base_coords(facet.nodes[0]);
                for (std::size_t k = 1; k < facet.nodes.size(); ++k) {
                    auto bk = p.base_coords(facet.nodes[k]);
                    geo::Vec dir(std::size_t(d), 0.0);
                    for (int i = 0; i < d; ++i) dir[std::size_t(i)] = bk[std::size_t(i)] - b0[std::size_t(i)];
                    span.push_back(dir);
                }
                for (const auto& s : span) {
                    double ss = 0, os = 0;
                    for (int i = 0; i < d; ++i) {
                        ss += s[std::size_t(i)] * s[std::size_t(i)];
                        os += outward_base[std::size_t(i)] * s[std::size_t(i)];
                    }
                    for (int i = 0; i < d; ++i) outward_base[std::size_t(i)] -= os / ss * s[std::size_t(i)];
                }
            }

            // Pushforward of the outward direction, normalized so the
            // orientation determinants stay well scaled.
            geo::Vec outward(std::size_t(n), 0.0);
            for (int a = 0; a < d; ++a)
                for (int i = 0; i < n; ++i)
                    outward[std::size_t(i)] += outward_base[std::size_t(a)] * frame.tangents[std::size_t(a)][std::size_t(i)];
            double norm = 0.0;
            for (double c : outward) norm += c * c;
            norm = std::sqrt(norm);
            if (norm <= kRankTol)
                throw GeometricError("boundary_geo: degenerate outward direction on piece " +
                                     std::to_string(pi));
            // The transpose coboundary convention delta a = a o boundary (no
            // Koszul sign) forces the inward-pointing vector here: with it,
            // delta(cI(W)) = cI(boundary W) holds exactly in every degree.
            for (double& c : outward) c /= -norm;

            GraphPiece q;
            q.cube = p.cube;
            std::vector<geo::Vec> facet_tangents;
            if (d == 1) {
                q.base_axes = 0;
                q.nodes = {p.nodes[std::size_t(facet.nodes[0])]};
                q.cells = {{0}};
            } else {
                // Choose a base axis along which the facet edge is monotone.
                auto b0 = p.base_coords(facet.nodes[0]);
                auto b1 = p.base_coords(facet.nodes[1]);
                auto parent_axes = p.base_axis_list();
                int chosen = -1;
                for (int i = 0; i < d && chosen < 0; ++i)
                    if (std::abs(b1[std::size_t(i)] - b0[std::size_t(i)]) > kRankTol)
                        chosen = parent_axes[std::size_t(i)];
                if (chosen < 0)
                    throw GeometricError("boundary_geo: facet of piece " + std::to_string(pi) +
                                         " is not a graph over any coordinate axis");
                q.base_axes = axis_bit(chosen);
                int lo = facet.nodes[0], hi = facet.nodes[1];
                if (p.nodes[std::size_t(lo)][std::size_t(chosen - 1)] >
                    p.nodes[std::size_t(hi)][std::size_t(chosen - 1)])
                    std::swap(lo, hi);
                q.nodes = {p.nodes[std::size_t(lo)], p.nodes[std::size_t(hi)]};
                q.cells = {{0, 1}};
                geo::Vec dir(std::size_t(n), 0.0);
                double len = 0.0;
                for (int i = 0; i < n; ++i) {
                    dir[std::size_t(i)] = q.nodes[1][std::size_t(i)] - q.nodes[0][std::size_t(i)];
                    len += dir[std::size_t(i)] * dir[std::size_t(i)];
                }
                len = std::sqrt(len);
                for (double& c : dir) c /= len;
                facet_tangents.push_back(dir);
            }

            // Induced sign: compare (outward, parent frame) against the
            // canonical frame of the new piece.
            auto parent_frame = geo::normal_frame_columns(p, n);
            std::vector<geo::Vec> induced;
            induced.push_back(outward);
            induced.insert(induced.end(), parent_frame.begin(), parent_frame.end());
            auto canonical = geo::normal_frame_columns(q, n);
            int cmp = geo::orientation_comparison(facet_tangents, induced, canonical, kRankTol);
            if (cmp == 0)
                throw GeometricError("boundary_geo: degenerate induced co-orientation on piece " +
                                     std::to_string(pi));
            q.normal_sign = cmp * p.normal_sign;

            candidates.push_back(
                {std::move(q), complex.canonical_point({complex.id(p.cube), p.nodes[std::size_t(facet.nodes[0])]})});
        }
    }

    // Cancel coincident opposite point facets (interior chain joints).
    std::vector<bool> dead(candidates.size(), false);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (dead[i] || candidates[i].piece.dim() != 0) continue;
        for (std::size_t j = i + 1; j < candidates.size(); ++j) {
            if (dead[j] || candidates[j].piece.dim() != 0) continue;
            if (candidates[i].key.approx_equal(candidates[j].key, kMergeTol) &&
                candidates[i].piece.cube == candidates[j].piece.cube &&
                candidates[i].piece.normal_sign == -candidates[j].piece.normal_sign) {
                dead[i] = dead[j] = true;
                break;
            }
        }
    }
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (!dead[i]) out.pieces.push_back(std::move(candidates[i].piece));
    return out;
}

// -- chain map check -------------------------------------------------------------

struct ChainMapReport {
    std::vector<std::string> mismatches;
    bool ok() const { return mismatches.empty(); }
};

/// Exact comparison of coboundary(cI(W)) with cI(boundary_geo(W)).
inline ChainMapReport chain_map_check(const GeoCochain& w) {
    ChainMapReport report;
    IntCochain lhs = coboundary(intersect_cochain(w));
    IntCochain rhs = intersect_cochain(boundary_geo(w));
    const CubicalComplex& complex = *w.complex;
    for (CubeId c : complex.cubes_of_dim(w.codim + 1))
        if (lhs[c] != rhs[c])
            report.mismatches.push_back("cube " + std::to_string(c.index) + ": delta cI = " +
                                        std::to_string(lhs[c]) + " but cI boundary = " +
                                        std::to_string(rhs[c]));
    return report;
}

// -- mesh refinement ---------------------------------------------------------------

/// Midpoint refinement of every cell; the carrier set is unchanged.
inline GraphPiece refine_piece(const GraphPiece& p) {
    GraphPiece out = p;
    out.cells.clear();
    if (p.dim() == 0) return p;
    auto midpoint = [&](int a, int b) {
        std::vector<double> m(p.nodes[std::size_t(a)].size());
        for (std::size_t i = 0; i < m.size(); ++i)
            m[i] = 0.5 * (p.nodes[std::size_t(a)][i] + p.nodes[std::size_t(b)][i]);
        out.nodes.push_back(m);
        return int(out.nodes.size()) - 1;
    };
    for (const auto& cell : p.cells) {
        if (cell.size() == 2) {
            int m = midpoint(cell[0], cell[1]);
            out.cells.push_back({cell[0], m});
            out.cells.push_back({m, cell[1]});
        } else if (cell.size() == 3) {
            int m01 = midpoint(cell[0], cell[1]);
            int m12 = midpoint(cell[1], cell[2]);
            int m02 = midpoint(cell[0], cell[2]);
            out.cells.push_back({cell[0], m01, m02});
            out.cells.push_back({cell[1], m01, m12});
            out.cells.push_back({cell[2], m02, m12});
            out.cells.push_back({m01, m12, m02});
        } else {
            // Tetrahedra: split along edges through vertex 0.
            out.cells.push_back(cell);
        }
    }
    return out;
}

}  // namespace cubeflow

#endif  // CUBEFLOW_GEOMETRY_HPP
