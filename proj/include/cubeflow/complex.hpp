/**
 * Ordered cubical complexes: a global vertex poset together with cubes given
 * as vertex lists in binary-counting order of the standard vertex poset.
 *
 * The two axioms of the definition are checked by validate(): every vertex is
 * a cube, and every interval subposet of a cube is again a cube whose stored
 * vertex order agrees with the induced one.  Cubes are identified with their
 * vertex sets, so no two distinct cubes may share one.
 *
 * Complexes are immutable once built or loaded and safe to share across
 * threads.
 */

#ifndef CUBEFLOW_COMPLEX_HPP
#define CUBEFLOW_COMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cubeflow/cube.hpp"

namespace cubeflow {

/// Stable handle into a complex's cube list, with the dimension cached.
struct CubeId {
    std::int32_t index = -1;
    std::int16_t dim = -1;

    bool valid() const { return index >= 0; }
    bool operator==(const CubeId&) const = default;
    bool operator<(const CubeId& o) const { return index < o.index; }
};

/// A point of the realization, held in the local coordinates of a cube.
struct ComplexPoint {
    CubeId cube;
    std::vector<double> coords;
};

/// Result of canonical_point: the unique open face containing a point.
struct CanonicalPoint {
    CubeId face;                  // the face's own cube
    std::vector<double> coords;   // face-local coordinates, free axes ascending
    FacePartition location;       // where the face sits inside the query cube

    bool approx_equal(const CanonicalPoint& o, double tol) const {
        if (!(face == o.face) || coords.size() != o.coords.size()) return false;
        for (std::size_t i = 0; i < coords.size(); ++i)
            if (std::abs(coords[i] - o.coords[i]) > tol) return false;
        return true;
    }
};

struct ValidationReport {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
    std::string str() const {
        std::string s;
        for (const auto& p : problems) s += p + "\n";
        return s;
    }
};

/// Occurrence of a cube inside a top-dimensional cube.
struct FaceRealization {
    CubeId top;
    FacePartition location;
};

inline constexpr double kSnapTolerance = 1e-9;

class CubicalComplex {
  public:
    struct Cube {
        int dim = 0;
        std::vector<int> verts;  // 2^dim vertex indices, binary-counting order
    };

    CubicalComplex(std::vector<std::string> vertex_ids,
                   std::vector<std::pair<int, int>> order_covers, std::vector<Cube> cubes)
        : vertex_ids_(std::move(vertex_ids)), order_covers_(std::move(order_covers)),
          cubes_(std::move(cubes)) {
        build_indices();
    }

    // -- basic access ------------------------------------------------------

    int vertex_count() const { return int(vertex_ids_.size()); }
    const std::string& vertex_id(int v) const { return vertex_ids_.at(std::size_t(v)); }
    int cube_count() const { return int(cubes_.size()); }
    int top_dim() const { return top_dim_; }

    CubeId id(int index) const {
        return CubeId{index, std::int16_t(cubes_.at(std::size_t(index)).dim)};
    }
    const Cube& cube(CubeId c) const { return cubes_.at(std::size_t(c.index)); }
    int dim(CubeId c) const { return cube(c).dim; }
    bool is_top(CubeId c) const { return dim(c) == top_dim_; }

    std::vector<CubeId> cubes_of_dim(int d) const {
        std::vector<CubeId> out;
        for (int i = 0; i < cube_count(); ++i)
            if (cubes_[std::size_t(i)].dim == d) out.push_back(id(i));
        return out;
    }

    /// Counts per dimension; Euler characteristic is the alternating sum.
    std::vector<long> cell_counts() const {
        std::vector<long> counts(std::size_t(top_dim_) + 1, 0);
        for (const auto& c : cubes_) ++counts[std::size_t(c.dim)];
        return counts;
    }
    long euler_characteristic() const {
        long chi = 0;
        int sign = 1;
        for (long c : cell_counts()) {
            chi += sign * c;
            sign = -sign;
        }
        return chi;
    }

    // -- face structure ----------------------------------------------------

    /// Vertex indices of the face F of `parent`, in the face's own order.
    std::vector<int> induced_face_vertices(CubeId parent, const FacePartition& f) const {
        const Cube& p = cube(parent);
        if (f.n != p.dim) throw std::invalid_argument("induced_face_vertices: partition dimension mismatch");
        std::vector<int> verts;
        verts.reserve(std::size_t(1) << f.dim());
        for (const VertexSet& v : face_vertices(f)) verts.push_back(p.verts[v.ones]);
        return verts;
    }

    /// The cube of the complex realizing face F of `parent`.
    CubeId face_of(CubeId parent, const FacePartition& f) const {
        auto key = sorted(induced_face_vertices(parent, f));
        auto it = by_vertex_set_.find(key);
        if (it == by_vertex_set_.end())
            throw std::invalid_argument("face_of: face " + to_string(f) + " is not a cube of the complex");
        return id(it->second);
    }

    /// All d-faces of a cube together with their locations inside it.
    std::vector<std::pair<CubeId, FacePartition>> faces_of(CubeId c, int d) const {
        if (d < 0 || d > dim(c)) throw std::invalid_argument("faces_of: dimension out of range");
        std::vector<std::pair<CubeId, FacePartition>> out;
        for (const auto& f : enumerate_faces(dim(c), d)) out.emplace_back(face_of(c, f), f);
        return out;
    }

    /// Occurrences of `c` as a face of top-dimensional cubes.
    const std::vector<FaceRealization>& realizations(CubeId c) const {
        return realizations_.at(std::size_t(c.index));
    }

    std::optional<CubeId> find_by_vertices(std::vector<int> verts) const {
        auto it = by_vertex_set_.find(sorted(std::move(verts)));
        if (it == by_vertex_set_.end()) return std::nullopt;
        return id(it->second);
    }

    // -- validation --------------------------------------------------------

    ValidationReport validate() const {
        ValidationReport report;
        // Plumbing sanity first; structural axioms assume it.
        for (int i = 0; i < cube_count(); ++i) {
            const Cube& c = cubes_[std::size_t(i)];
            if (c.dim < 0 || c.dim > kMaxDim) {
                report.problems.push_back("cube " + std::to_string(i) + ": dimension out of range");
                return report;
            }
            if (c.verts.size() != (std::size_t(1) << c.dim)) {
                report.problems.push_back("cube " + std::to_string(i) + ": vertex list length is not 2^dim");
                return report;
            }
            for (int v : c.verts)
                if (v < 0 || v >= vertex_count()) {
                    report.problems.push_back("cube " + std::to_string(i) + ": vertex index out of range");
                    return report;
                }
        }

        // Cubes are their vertex sets: no duplicates allowed.
        {
            std::map<std::vector<int>, std::vector<int>> sets;
            for (int i = 0; i < cube_count(); ++i) {
                auto key = sorted(cubes_[std::size_t(i)].verts);
                key.erase(std::unique(key.begin(), key.end()), key.end());
                if (key.size() < cubes_[std::size_t(i)].verts.size())
                    report.problems.push_back("cube " + std::to_string(i) + ": repeated vertex in list");
                sets[std::move(key)].push_back(i);
            }
            for (const auto& [key, owners] : sets)
                if (owners.size() > 1)
                    report.problems.push_back("cubes " + join(owners) + " share the same vertex set");
        }

        // Axiom 1: every vertex is a cube.
        for (int v = 0; v < vertex_count(); ++v)
            if (!by_vertex_set_.count({v}))
                report.problems.push_back("vertex " + vertex_ids_[std::size_t(v)] + " is not a cube");

        // Axiom 2: interval subposets are cubes and characteristic maps commute,
        // i.e. the stored vertex order of each face equals the induced one.
        for (int i = 0; i < cube_count(); ++i) {
            CubeId c = id(i);
            for (const auto& f : enumerate_faces(dim(c))) {
                auto induced = induced_face_vertices(c, f);
                auto it = by_vertex_set_.find(sorted(induced));
                if (it == by_vertex_set_.end()) {
                    report.problems.push_back("cube " + std::to_string(i) + ": missing face " + to_string(f));
                    continue;
                }
                if (cubes_[std::size_t(it->second)].verts != induced)
                    report.problems.push_back("cube " + std::to_string(i) + ": face " + to_string(f) +
                                              " has vertex order inconsistent with cube " +
                                              std::to_string(it->second));
            }
        }

        // Declared poset: whenever u <= v globally and both lie in a cube, the
        // characteristic map must preserve the relation.
        auto reach = order_closure();
        for (int i = 0; i < cube_count(); ++i) {
            const Cube& c = cubes_[std::size_t(i)];
            for (std::size_t a = 0; a < c.verts.size(); ++a)
                for (std::size_t b = 0; b < c.verts.size(); ++b) {
                    if (a == b) continue;
                    if (reach[std::size_t(c.verts[a])][std::size_t(c.verts[b])] &&
                        (AxisMask(a) & ~AxisMask(b)) != 0)
                        report.problems.push_back(
                            "cube " + std::to_string(i) + ": vertices " + vertex_ids_[std::size_t(c.verts[a])] +
                            " <= " + vertex_ids_[std::size_t(c.verts[b])] + " listed out of poset order");
                }
        }
        return report;
    }

    // -- geometry ----------------------------------------------------------

    /**
     * Identifies the unique open face containing a point, snapping coordinates
     * within tol of {0,1}, and expresses the point in the face's own
     * coordinates.  Representatives of a shared face in adjacent top cubes
     * canonicalize identically (a consequence of axiom 2).
     */
    CanonicalPoint canonical_point(const ComplexPoint& p, double tol = kSnapTolerance) const {
        const Cube& c = cube(p.cube);
        if (p.coords.size() != std::size_t(c.dim))
            throw std::invalid_argument("canonical_point: coordinate count mismatch");
        AxisMask f0 = 0, f1 = 0;
        for (int a = 1; a <= c.dim; ++a) {
            double x = p.coords[std::size_t(a - 1)];
            if (x < -tol || x > 1 + tol)
                throw std::invalid_argument("canonical_point: coordinate outside [0,1] beyond tolerance");
            if (x <= tol) f0 |= axis_bit(a);
            else if (x >= 1 - tol) f1 |= axis_bit(a);
        }
        FacePartition loc(c.dim, f0, full_mask(c.dim) & ~(f0 | f1), f1);
        CanonicalPoint out;
        out.face = face_of(p.cube, loc);
        out.location = loc;
        for (int a : axes_of(loc.f01)) out.coords.push_back(p.coords[std::size_t(a - 1)]);
        return out;
    }

    /// Embeds face-local coordinates back into a cube containing the face.
    std::vector<double> embed_point(const FacePartition& location,
                                    const std::vector<double>& face_coords) const {
        if (face_coords.size() != std::size_t(location.dim()))
            throw std::invalid_argument("embed_point: coordinate count mismatch");
        std::vector<double> out(std::size_t(location.n), 0.0);
        for (int a : axes_of(location.f1)) out[std::size_t(a - 1)] = 1.0;
        std::size_t k = 0;
        for (int a : axes_of(location.f01)) out[std::size_t(a - 1)] = face_coords[k++];
        return out;
    }

    // -- serialization -----------------------------------------------------

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["dimension_top"] = top_dim_;
        j["vertices"] = nlohmann::json::array();
        for (const auto& v : vertex_ids_) j["vertices"].push_back({{"id", v}});
        j["order"] = nlohmann::json::array();
        for (const auto& [a, b] : order_covers_)
            j["order"].push_back({vertex_ids_[std::size_t(a)], vertex_ids_[std::size_t(b)]});
        j["cubes"] = nlohmann::json::array();
        for (const auto& c : cubes_) {
            nlohmann::json jc;
            jc["dim"] = c.dim;
            jc["verts"] = nlohmann::json::array();
            for (int v : c.verts) jc["verts"].push_back(vertex_ids_[std::size_t(v)]);
            j["cubes"].push_back(jc);
        }
        return j;
    }

    static CubicalComplex from_json(const nlohmann::json& j) {
        if (!j.contains("dimension_top") || !j.contains("vertices") || !j.contains("cubes"))
            throw std::invalid_argument("complex json: missing dimension_top, vertices or cubes");
        std::vector<std::string> ids;
        std::map<std::string, int> index;
        for (const auto& v : j.at("vertices")) {
            std::string id = v.at("id").get<std::string>();
            if (index.count(id)) throw std::invalid_argument("complex json: duplicate vertex id " + id);
            index[id] = int(ids.size());
            ids.push_back(id);
        }
        auto lookup = [&](const std::string& id) {
            auto it = index.find(id);
            if (it == index.end()) throw std::invalid_argument("complex json: unknown vertex id " + id);
            return it->second;
        };
        std::vector<std::pair<int, int>> covers;
        if (j.contains("order"))
            for (const auto& pair : j.at("order")) {
                if (pair.size() != 2) throw std::invalid_argument("complex json: order entries must be pairs");
                covers.emplace_back(lookup(pair.at(0).get<std::string>()),
                                    lookup(pair.at(1).get<std::string>()));
            }
        std::vector<Cube> cubes;
        for (const auto& jc : j.at("cubes")) {
            Cube c;
            c.dim = jc.at("dim").get<int>();
            for (const auto& v : jc.at("verts")) c.verts.push_back(lookup(v.get<std::string>()));
            cubes.push_back(std::move(c));
        }
        int declared = j.at("dimension_top").get<int>();
        CubicalComplex complex(std::move(ids), std::move(covers), std::move(cubes));
        if (complex.top_dim() != declared)
            throw std::invalid_argument("complex json: dimension_top does not match the cubes");
        return complex;
    }

    /// Parses and validates; rejects invalid complexes with the report embedded.
    static CubicalComplex load(const nlohmann::json& j) {
        CubicalComplex complex = from_json(j);
        ValidationReport report = complex.validate();
        if (!report.ok())
            throw std::invalid_argument("complex json: validation failed:\n" + report.str());
        return complex;
    }

  private:
    static std::vector<int> sorted(std::vector<int> v) {
        std::sort(v.begin(), v.end());
        return v;
    }
    static std::string join(const std::vector<int>& v) {
        std::string s;
        for (int x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
        return s;
    }

    void build_indices() {
        top_dim_ = 0;
        for (const auto& c : cubes_) top_dim_ = std::max(top_dim_, c.dim);
        for (int i = 0; i < cube_count(); ++i) {
            const Cube& c = cubes_[std::size_t(i)];
            if (c.verts.size() != (std::size_t(1) << std::max(c.dim, 0)))
                throw std::invalid_argument("cube " + std::to_string(i) + ": vertex list length is not 2^dim");
            by_vertex_set_.emplace(sorted(c.verts), i);
        }
        realizations_.assign(std::size_t(cube_count()), {});
        for (int i = 0; i < cube_count(); ++i) {
            if (cubes_[std::size_t(i)].dim != top_dim_) continue;
            CubeId top = id(i);
            for (const auto& f : enumerate_faces(top_dim_)) {
                auto it = by_vertex_set_.find(sorted(induced_face_vertices(top, f)));
                if (it != by_vertex_set_.end())
                    realizations_[std::size_t(it->second)].push_back({top, f});
            }
        }
    }

    /// Reachability of the declared order (reflexive-transitive closure).
    std::vector<std::vector<bool>> order_closure() const {
        std::size_t n = std::size_t(vertex_count());
        std::vector<std::vector<int>> next(n);
        for (const auto& [a, b] : order_covers_) next[std::size_t(a)].push_back(b);
        std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
        for (std::size_t s = 0; s < n; ++s) {
            std::vector<int> stack{int(s)};
            while (!stack.empty()) {
                int u = stack.back();
                stack.pop_back();
                if (reach[s][std::size_t(u)]) continue;
                reach[s][std::size_t(u)] = true;
                for (int w : next[std::size_t(u)]) stack.push_back(w);
            }
        }
        return reach;
    }

    std::vector<std::string> vertex_ids_;
    std::vector<std::pair<int, int>> order_covers_;
    std::vector<Cube> cubes_;
    std::map<std::vector<int>, int> by_vertex_set_;
    std::vector<std::vector<FaceRealization>> realizations_;
    int top_dim_ = 0;
};

/**
 * Grid cubulation of a torus, one circle factor per entry of `subdivisions`.
 * Each entry must be at least 3 so that cubes are determined by their vertex
 * sets.  The declared vertex order is the product order restricted away from
 * the wrapping row of each axis, which every characteristic map preserves.
 */
inline CubicalComplex build_torus_grid(const std::vector<int>& subdivisions) {
    int n = int(subdivisions.size());
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("build_torus_grid: need between 1 and 16 axes");
    for (int k : subdivisions)
        if (k < 3)
            throw std::invalid_argument(
                "build_torus_grid: subdivisions below 3 identify distinct cubes with the same vertex "
                "set, which the set-based definition forbids");

    long vertex_total = 1;
    for (int k : subdivisions) vertex_total *= k;

    auto vertex_index = [&](const std::vector<int>& coord) {
        long idx = 0;
        for (int a = 0; a < n; ++a) idx = idx * subdivisions[std::size_t(a)] + coord[std::size_t(a)];
        return int(idx);
    };
    std::vector<std::string> ids;
    ids.resize(std::size_t(vertex_total));
    std::vector<int> coord(std::size_t(n), 0);
    for (long v = 0; v < vertex_total; ++v) {
        std::string id;
        for (int a = 0; a < n; ++a) id += (a ? "_" : "") + std::to_string(coord[std::size_t(a)]);
        ids[std::size_t(vertex_index(coord))] = id;
        for (int a = n - 1; a >= 0; --a) {
            if (++coord[std::size_t(a)] < subdivisions[std::size_t(a)]) break;
            coord[std::size_t(a)] = 0;
        }
    }

    // Covering pairs: single-axis steps that stay below the wrapping row.
    std::vector<std::pair<int, int>> covers;
    std::fill(coord.begin(), coord.end(), 0);
    for (long v = 0; v < vertex_total; ++v) {
        for (int a = 0; a < n; ++a) {
            if (coord[std::size_t(a)] + 1 <= subdivisions[std::size_t(a)] - 2) {
                auto to = coord;
                ++to[std::size_t(a)];
                covers.emplace_back(vertex_index(coord), vertex_index(to));
            }
        }
        for (int a = n - 1; a >= 0; --a) {
            if (++coord[std::size_t(a)] < subdivisions[std::size_t(a)]) break;
            coord[std::size_t(a)] = 0;
        }
    }

    // One cube per base vertex and free-axis subset.
    std::vector<CubicalComplex::Cube> cubes;
    std::fill(coord.begin(), coord.end(), 0);
    for (long v = 0; v < vertex_total; ++v) {
        for (AxisMask free = 0; free < (AxisMask(1) << n); ++free) {
            CubicalComplex::Cube c;
            c.dim = popcount(free);
            auto axes = axes_of(free);
            for (AxisMask code = 0; code < (AxisMask(1) << c.dim); ++code) {
                auto corner = coord;
                for (int k = 0; k < c.dim; ++k)
                    if (code & (AxisMask(1) << k)) {
                        int a = axes[std::size_t(k)] - 1;
                        corner[std::size_t(a)] = (corner[std::size_t(a)] + 1) % subdivisions[std::size_t(a)];
                    }
                c.verts.push_back(vertex_index(corner));
            }
            cubes.push_back(std::move(c));
        }
        for (int a = n - 1; a >= 0; --a) {
            if (++coord[std::size_t(a)] < subdivisions[std::size_t(a)]) break;
            coord[std::size_t(a)] = 0;
        }
    }

    return CubicalComplex(std::move(ids), std::move(covers), std::move(cubes));
}

/// The standard n-cube with all of its faces; vertex order is the full
/// subset order on binary codes.
inline CubicalComplex build_cube_complex(int n) {
    if (n < 0 || n > kMaxDim) throw std::invalid_argument("build_cube_complex: dimension out of range");
    std::vector<std::string> ids;
    for (AxisMask code = 0; code < (AxisMask(1) << n); ++code) {
        std::string id = "c";
        for (int a = 0; a < n; ++a) id += (code & (AxisMask(1) << a)) ? '1' : '0';
        ids.push_back(id);
    }
    std::vector<std::pair<int, int>> covers;
    for (AxisMask code = 0; code < (AxisMask(1) << n); ++code)
        for (int a = 0; a < n; ++a)
            if (!(code & (AxisMask(1) << a))) covers.emplace_back(int(code), int(code | (AxisMask(1) << a)));
    std::vector<CubicalComplex::Cube> cubes;
    for (const auto& f : enumerate_faces(n)) {
        CubicalComplex::Cube c;
        c.dim = f.dim();
        for (const VertexSet& v : face_vertices(f)) c.verts.push_back(int(v.ones));
        cubes.push_back(std::move(c));
    }
    return CubicalComplex(std::move(ids), std::move(covers), std::move(cubes));
}

}  // namespace cubeflow

#endif  // CUBEFLOW_COMPLEX_HPP
