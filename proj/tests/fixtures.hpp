// Shared geometric test fixtures on torus grids: the two closed curves of the
// introductory square picture, coordinate cycles, and a generator of random
// transverse polyline arcs used by the chain-map batteries.

#ifndef CUBEFLOW_TESTS_FIXTURES_HPP
#define CUBEFLOW_TESTS_FIXTURES_HPP

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "cubeflow/geometry.hpp"

namespace cubeflow::fixtures {

inline int torus_vertex(const std::vector<int>& dims, std::vector<int> coord) {
    int idx = 0;
    for (std::size_t a = 0; a < dims.size(); ++a) {
        int k = dims[a];
        idx = idx * k + ((coord[a] % k) + k) % k;
    }
    return idx;
}

/// Top cube of a torus grid at integer base coordinates.
inline CubeId grid_cube(const CubicalComplex& complex, const std::vector<int>& dims,
                        const std::vector<int>& base) {
    int n = int(dims.size());
    std::vector<int> verts;
    for (AxisMask code = 0; code < (AxisMask(1) << n); ++code) {
        auto corner = base;
        for (int a = 0; a < n; ++a)
            if (code & (AxisMask(1) << a)) ++corner[std::size_t(a)];
        verts.push_back(torus_vertex(dims, corner));
    }
    auto found = complex.find_by_vertices(verts);
    if (!found) throw std::runtime_error("grid_cube: no such cube");
    return *found;
}

inline GraphPiece segment_piece(const CubicalComplex& complex, CubeId cube, int base_axis,
                                std::vector<std::vector<double>> nodes, int sign) {
    GraphPiece p;
    p.cube = cube.index;
    p.base_axes = axis_bit(base_axis);
    p.nodes = std::move(nodes);
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) p.cells.push_back({int(i), int(i + 1)});
    p.normal_sign = sign;
    GeoCochain::snap_nodes(p);
    (void)complex;
    return p;
}

/**
 * The closed diagonal curve x1 + x2 = 0.3 (mod 3) on the 3x3 torus, carrying
 * the co-orientation with crossing number +1 on the bottom edge of the square
 * at the origin.  Its piece in that square is the three-node polyline of the
 * square picture; the other five pieces are plain segments.
 */
inline GeoCochain figure_w(const CubicalComplex& t2) {
    const std::vector<int> dims{3, 3};
    GeoCochain w(&t2, 1);
    struct Spec {
        int bi, bj;
        std::vector<std::vector<double>> nodes;
    };
    std::vector<Spec> specs = {
        {0, 0, {{0.0, 0.3}, {0.15, 0.15}, {0.3, 0.0}}},
        {0, 2, {{0.3, 1.0}, {1.0, 0.3}}},
        {1, 2, {{0.0, 0.3}, {0.3, 0.0}}},
        {1, 1, {{0.3, 1.0}, {1.0, 0.3}}},
        {2, 1, {{0.0, 0.3}, {0.3, 0.0}}},
        {2, 0, {{0.3, 1.0}, {1.0, 0.3}}},
    };
    for (const auto& s : specs)
        w.pieces.push_back(segment_piece(t2, grid_cube(t2, dims, {s.bi, s.bj}), 1, s.nodes, +1));
    // Walk order above: each piece exits at its last facet into the next one.
    w.matching = {{{0, 1}, {1, 0}}, {{1, 1}, {2, 0}}, {{2, 1}, {3, 0}},
                  {{3, 1}, {4, 0}}, {{4, 1}, {5, 0}}, {{5, 1}, {0, 0}}};
    return w;
}

/// The horizontal cycle x2 = 0.6 through the bottom row of the 3x3 torus,
/// co-oriented so its crossing number on each vertical edge is +1.
inline GeoCochain figure_v(const CubicalComplex& t2) {
    const std::vector<int> dims{3, 3};
    GeoCochain v(&t2, 1);
    for (int i = 0; i < 3; ++i)
        v.pieces.push_back(segment_piece(t2, grid_cube(t2, dims, {i, 0}), 1,
                                         {{0.0, 0.6}, {1.0, 0.6}}, +1));
    v.matching = {{{0, 1}, {1, 0}}, {{1, 1}, {2, 0}}, {{2, 1}, {0, 0}}};
    return v;
}

/// Vertical cycle x1 = x through column i of the 3x3 torus (normal +e1).
inline GeoCochain vertical_cycle(const CubicalComplex& t2, int column, double x) {
    const std::vector<int> dims{3, 3};
    GeoCochain w(&t2, 1);
    for (int j = 0; j < 3; ++j)
        w.pieces.push_back(segment_piece(t2, grid_cube(t2, dims, {column, j}), 2,
                                         {{x, 0.0}, {x, 1.0}}, +1));
    w.matching = {{{0, 1}, {1, 0}}, {{1, 1}, {2, 0}}, {{2, 1}, {0, 0}}};
    return w;
}

/**
 * Codim-1 sheet cycle x1 = x through the column of cubes (0,j,k) of the
 * 3-torus [3,3,3], one two-triangle square patch per cube, co-oriented with
 * +1 crossings on the axis-1 edges it meets.
 */
inline GeoCochain sheet_cycle_t3(const CubicalComplex& t3, double x) {
    const std::vector<int> dims{3, 3, 3};
    GeoCochain w(&t3, 1);
    auto piece_at = [&](int j, int k) {
        GraphPiece p;
        p.cube = grid_cube(t3, dims, {0, j, k}).index;
        p.base_axes = axis_bit(2) | axis_bit(3);
        p.nodes = {{x, 0.0, 0.0}, {x, 1.0, 0.0}, {x, 0.0, 1.0}, {x, 1.0, 1.0}};
        p.cells = {{0, 1, 2}, {1, 3, 2}};
        p.normal_sign = +1;
        return p;
    };
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) w.pieces.push_back(piece_at(j, k));
    // Facets of each patch, sorted: 0 = {0,1} (x3 = 0), 1 = {0,2} (x2 = 0),
    // 2 = {1,3} (x2 = 1), 3 = {2,3} (x3 = 1).
    auto idx = [](int j, int k) { return 3 * j + k; };
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            w.matching.push_back({{idx(j, k), 2}, {idx((j + 1) % 3, k), 1}});
            w.matching.push_back({{idx(j, k), 3}, {idx(j, (k + 1) % 3), 0}});
        }
    return w;
}

/// Codim-2 line cycle at (x2, x3) through the cubes (i,0,0) of the 3-torus,
/// co-oriented with +1 crossings on the squares it meets.
inline GeoCochain line_cycle_t3(const CubicalComplex& t3, double x2, double x3) {
    const std::vector<int> dims{3, 3, 3};
    GeoCochain v(&t3, 2);
    for (int i = 0; i < 3; ++i) {
        GraphPiece p;
        p.cube = grid_cube(t3, dims, {i, 0, 0}).index;
        p.base_axes = axis_bit(1);
        p.nodes = {{0.0, x2, x3}, {1.0, x2, x3}};
        p.cells = {{0, 1}};
        p.normal_sign = +1;
        v.pieces.push_back(p);
    }
    v.matching = {{{0, 1}, {1, 0}}, {{1, 1}, {2, 0}}, {{2, 1}, {0, 0}}};
    return v;
}

/**
 * Random transverse polyline arc on a 2-torus grid: a short global walk whose
 * segments stay clear of grid vertices, cut at grid lines into matched graph
 * pieces with a continuous co-orientation (the left side of the walk).
 */
inline GeoCochain random_torus_arc(const CubicalComplex& t2, const std::vector<int>& dims,
                                   std::mt19937& rng) {
    const double margin = 0.05;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto wrap = [&](double x, int axis) {
        double k = double(dims[std::size_t(axis)]);
        return x - std::floor(x / k) * k;
    };

    while (true) {
        // Global walk.
        std::vector<std::array<double, 2>> joints;
        joints.push_back({unit(rng) * dims[0], unit(rng) * dims[1]});
        int steps = 2 + int(unit(rng) * 3);
        bool ok = true;
        for (int s = 0; s < steps; ++s) {
            double angle = unit(rng) * 2 * 3.14159265358979;
            double dx = std::cos(angle), dy = std::sin(angle);
            if (std::abs(dx) < 0.2 || std::abs(dy) < 0.2) {
                ok = false;
                break;
            }
            double len = 0.3 + 0.5 * unit(rng);
            auto last = joints.back();
            joints.push_back({last[0] + dx * len, last[1] + dy * len});
        }
        if (!ok) continue;

        // Joints and crossings must be clean: well inside cells / edges.
        auto fractional_clear = [&](double x) {
            double f = x - std::floor(x);
            return f > margin && f < 1.0 - margin;
        };
        for (const auto& j : joints)
            if (!fractional_clear(j[0]) || !fractional_clear(j[1])) ok = false;
        std::vector<std::array<double, 3>> crossings;  // (axis, line mod k, other mod k)
        for (std::size_t s = 0; ok && s + 1 < joints.size(); ++s) {
            auto a = joints[s], b = joints[s + 1];
            for (int axis = 0; axis < 2 && ok; ++axis) {
                double lo = std::min(a[axis], b[axis]), hi = std::max(a[axis], b[axis]);
                for (int line = int(std::ceil(lo)); line < hi; ++line) {
                    double t = (line - a[axis]) / (b[axis] - a[axis]);
                    double other = a[1 - axis] + t * (b[1 - axis] - a[1 - axis]);
                    if (!fractional_clear(other)) ok = false;
                    crossings.push_back({double(axis), wrap(double(line), axis), wrap(other, 1 - axis)});
                }
            }
        }
        // Distinct crossings of one grid line must stay apart, or the merge
        // logic would see coincident opposite-sign points.
        for (std::size_t i = 0; ok && i < crossings.size(); ++i)
            for (std::size_t j = i + 1; ok && j < crossings.size(); ++j)
                if (crossings[i][0] == crossings[j][0] &&
                    std::abs(crossings[i][1] - crossings[j][1]) < 1e-9 &&
                    std::abs(crossings[i][2] - crossings[j][2]) < 2 * margin)
                    ok = false;
        if (!ok) continue;

        // Cut each step at grid lines and build pieces.
        GeoCochain w(&t2, 1);
        struct Exit {
            int piece = -1;
            int facet = -1;
            bool pending = false;  // awaiting a match across a face
        } exit_ref;
        for (std::size_t s = 0; s + 1 < joints.size(); ++s) {
            auto a = joints[s], b = joints[s + 1];
            std::vector<double> cuts{0.0, 1.0};
            for (int axis = 0; axis < 2; ++axis) {
                double lo = std::min(a[axis], b[axis]), hi = std::max(a[axis], b[axis]);
                for (int line = int(std::ceil(lo)); line < hi; ++line)
                    cuts.push_back((line - a[axis]) / (b[axis] - a[axis]));
            }
            std::sort(cuts.begin(), cuts.end());
            double dx = b[0] - a[0], dy = b[1] - a[1];
            int base_axis = std::abs(dx) >= std::abs(dy) ? 1 : 2;
            // Left-of-walk co-orientation against the complementary axis.
            int sign = base_axis == 1 ? (dx > 0 ? +1 : -1) : (dy > 0 ? -1 : +1);

            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                double t0 = cuts[c], t1 = cuts[c + 1];
                double mx = a[0] + 0.5 * (t0 + t1) * dx, my = a[1] + 0.5 * (t0 + t1) * dy;
                int ci = int(std::floor(wrap(mx, 0))), cj = int(std::floor(wrap(my, 1)));
                auto local = [&](double t) {
                    // Reduce into the owning cube, tolerating seam roundoff,
                    // and land crossing coordinates exactly on the walls.
                    auto reduce = [&](double g, int axis, int cell) {
                        double d = wrap(g, axis) - cell;
                        if (d > 1.5) d -= dims[std::size_t(axis)];
                        if (d < -0.5) d += dims[std::size_t(axis)];
                        if (std::abs(d) < 1e-9) d = 0.0;
                        if (std::abs(d - 1.0) < 1e-9) d = 1.0;
                        return d;
                    };
                    return std::vector<double>{reduce(a[0] + t * dx, 0, ci),
                                               reduce(a[1] + t * dy, 1, cj)};
                };
                auto entry_node = local(t0);
                auto exit_node = local(t1);
                bool ascending = base_axis == 1 ? dx > 0 : dy > 0;
                std::vector<std::vector<double>> nodes =
                    ascending ? std::vector<std::vector<double>>{entry_node, exit_node}
                              : std::vector<std::vector<double>>{exit_node, entry_node};
                w.pieces.push_back(segment_piece(t2, grid_cube(t2, dims, {ci, cj}), base_axis,
                                                 nodes, sign));
                int piece_idx = int(w.pieces.size()) - 1;
                int entry_facet = ascending ? 0 : 1;
                int exit_facet = ascending ? 1 : 0;
                if (exit_ref.pending)
                    w.matching.push_back({{exit_ref.piece, exit_ref.facet}, {piece_idx, entry_facet}});
                exit_ref = {piece_idx, exit_facet, c + 2 < cuts.size()};
            }
        }
        return w;
    }
}

}  // namespace cubeflow::fixtures

#endif  // CUBEFLOW_TESTS_FIXTURES_HPP
