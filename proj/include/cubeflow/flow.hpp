/**
 * The logistic vector field x_i (1 - x_i) d/dx_i on the unit cube and its
 * closed-form flow, inverse, Jacobian and limits, plus the lower/upper
 * neighborhood regions used by the flow lemmas and their probes.
 *
 * Evaluation uses forms rewritten to avoid exp overflow: for |t| beyond
 * roughly 700 the flow saturates to its limit values in double precision,
 * which is the documented behavior.  Coordinates exactly 0 or 1 are fixed
 * exactly for every t.
 */

#ifndef CUBEFLOW_FLOW_HPP
#define CUBEFLOW_FLOW_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cubeflow/cube.hpp"

namespace cubeflow {

/// Flow parameter; finite, saturating beyond |t| ~ 700.
using FlowTime = double;

inline double vector_field_scalar(double x) { return x * (1.0 - x); }

inline std::vector<double> vector_field(const std::vector<double>& x) {
    std::vector<double> out;
    out.reserve(x.size());
    for (double c : x) out.push_back(vector_field_scalar(c));
    return out;
}

/// x(t) = x e^t / (x (e^t - 1) + 1), evaluated in the overflow-free form for
/// each sign of t.
inline double flow_scalar(double x, FlowTime t) {
    if (x == 0.0 || x == 1.0) return x;
    if (t >= 0) {
        double e = std::exp(-t);
        return x / (x * (1.0 - e) + e);
    }
    double e = std::exp(t);
    return x * e / (x * (e - 1.0) + 1.0);
}

inline double flow_inverse_scalar(double y, FlowTime t) { return flow_scalar(y, -t); }

/// Diagonal entry of D f_t at x: e^t / (x (e^t - 1) + 1)^2.
inline double flow_jacobian_scalar(double x, FlowTime t) {
    if (t >= 0) {
        double e = std::exp(-t);
        double den = x * (1.0 - e) + e;
        return e / (den * den);
    }
    double e = std::exp(t);
    double den = x * (e - 1.0) + 1.0;
    return e / (den * den);
}

/// Same entry expressed at the image point y = f_t(x):
/// (e^t - y (e^t - 1))^2 / e^t.
inline double flow_jacobian_at_image_scalar(double y, FlowTime t) {
    if (t >= 0) {
        double e = std::exp(-t);
        double num = 1.0 - y * (1.0 - e);
        return num * num / e;
    }
    double e = std::exp(t);
    double num = e - y * (e - 1.0);
    return num * num / e;
}

inline std::vector<double> flow_point(const std::vector<double>& x, FlowTime t) {
    std::vector<double> out;
    out.reserve(x.size());
    for (double c : x) out.push_back(flow_scalar(c, t));
    return out;
}

inline std::vector<double> flow_inverse(const std::vector<double>& y, FlowTime t) {
    return flow_point(y, -t);
}

/// Diagonal of the flow Jacobian at x.
inline std::vector<double> flow_jacobian(const std::vector<double>& x, FlowTime t) {
    std::vector<double> out;
    out.reserve(x.size());
    for (double c : x) out.push_back(flow_jacobian_scalar(c, t));
    return out;
}

/// Limits (x^-, x^+) of the flow as t goes to -oo and +oo.
inline std::pair<std::vector<double>, std::vector<double>> flow_limits(const std::vector<double>& x) {
    std::vector<double> minus, plus;
    minus.reserve(x.size());
    plus.reserve(x.size());
    for (double c : x) {
        plus.push_back(c == 0.0 ? 0.0 : 1.0);
        minus.push_back(c == 1.0 ? 1.0 : 0.0);
    }
    return {minus, plus};
}

// -- neighborhoods -----------------------------------------------------------

/**
 * Membership predicate for the lower/upper neighborhoods N_eps L_u(F) and
 * N_eps U_u(F): free coordinates of F below (resp. above) u, bound
 * coordinates within eps of their face values.
 */
struct RegionSpec {
    enum class Kind { lower, upper };

    FacePartition face;
    Kind kind = Kind::lower;
    double u = 0.5;
    double eps = 0.1;

    static RegionSpec lower(FacePartition f, double u, double eps) {
        return {f, Kind::lower, check(u), check(eps)};
    }
    static RegionSpec upper(FacePartition f, double u, double eps) {
        return {f, Kind::upper, check(u), check(eps)};
    }

    bool contains(const std::vector<double>& x) const {
        if (int(x.size()) != face.n) throw std::invalid_argument("RegionSpec: dimension mismatch");
        for (int a : axes_of(face.f0))
            if (!(x[std::size_t(a - 1)] < eps)) return false;
        for (int a : axes_of(face.f1))
            if (!(x[std::size_t(a - 1)] > 1.0 - eps)) return false;
        for (int a : axes_of(face.f01)) {
            double c = x[std::size_t(a - 1)];
            if (kind == Kind::lower ? !(c <= u) : !(c >= u)) return false;
        }
        return true;
    }

    /// Deterministic sample grid with k values per axis.  With on_face the
    /// bound coordinates sit exactly at their face values, sampling the
    /// subsets L_u(F) and U_u(F) themselves instead of their neighborhoods.
    std::vector<std::vector<double>> sample_grid(int k, bool on_face = false) const {
        std::vector<std::vector<double>> axis_values(std::size_t(face.n));
        for (int a : axes_of(face.f0)) {
            if (on_face) axis_values[std::size_t(a - 1)].push_back(0.0);
            else
                for (int i = 0; i < k; ++i)
                    axis_values[std::size_t(a - 1)].push_back(eps * (i + 1) / (k + 1));
        }
        for (int a : axes_of(face.f1)) {
            if (on_face) axis_values[std::size_t(a - 1)].push_back(1.0);
            else
                for (int i = 0; i < k; ++i)
                    axis_values[std::size_t(a - 1)].push_back(1.0 - eps * (i + 1) / (k + 1));
        }
        for (int a : axes_of(face.f01)) {
            for (int i = 0; i < k; ++i) {
                double frac = u * (i + 1) / k;
                axis_values[std::size_t(a - 1)].push_back(kind == Kind::lower ? frac : 1.0 - (1.0 - u) * i / k);
            }
        }
        std::vector<std::vector<double>> grid;
        std::vector<double> point(std::size_t(face.n), 0.0);
        std::vector<int> idx(std::size_t(face.n), 0);
        while (true) {
            for (int a = 0; a < face.n; ++a) point[std::size_t(a)] = axis_values[std::size_t(a)][std::size_t(idx[std::size_t(a)])];
            grid.push_back(point);
            int a = face.n - 1;
            for (; a >= 0; --a) {
                if (++idx[std::size_t(a)] < int(axis_values[std::size_t(a)].size())) break;
                idx[std::size_t(a)] = 0;
            }
            if (a < 0) break;
        }
        return grid;
    }

  private:
    static double check(double v) {
        if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("RegionSpec: parameter must lie in (0,1)");
        return v;
    }
};

/// Membership in the plain L-infinity neighborhood N_eps(F): bound
/// coordinates within eps of their face values, free coordinates arbitrary.
inline bool in_face_neighborhood(const FacePartition& f, double eps, const std::vector<double>& x) {
    if (int(x.size()) != f.n) throw std::invalid_argument("in_face_neighborhood: dimension mismatch");
    for (int a : axes_of(f.f0))
        if (!(x[std::size_t(a - 1)] < eps)) return false;
    for (int a : axes_of(f.f1))
        if (!(x[std::size_t(a - 1)] > 1.0 - eps)) return false;
    return true;
}

/**
 * Worst Jacobian aspect ratio |(Df_t)_ii| / |(Df_t)_jj| over a deterministic
 * sample grid of y in N_delta L_u(F^+), for i outside the free axes of F^+
 * and j inside; the preimage x = f_{-t}(y) is implicit in the image-side
 * Jacobian form.  Returns 0 when either axis set is empty.
 */
inline double jacobian_ratio_probe(const FacePartition& f, double u, double delta, FlowTime t,
                                   int samples_per_axis = 3) {
    FacePartition fplus = face_decomposition(f).second;
    AxisMask inside = fplus.f01;
    AxisMask outside = full_mask(f.n) & ~inside;
    if (inside == 0 || outside == 0) return 0.0;
    RegionSpec region = RegionSpec::lower(fplus, u, delta);
    // Entries share a factor 1/e^t which cancels in the ratio; comparing the
    // remaining factors (e^t - y (e^t - 1)) e^{-t} keeps everything bounded.
    auto scaled = [&](double y) {
        if (t >= 0) return 1.0 - y * (1.0 - std::exp(-t));  // (e^t - y(e^t-1)) e^{-t}
        double e = std::exp(t);
        return e - y * (e - 1.0);  // direct form, e^t <= 1
    };
    double worst = 0.0;
    for (const auto& y : region.sample_grid(samples_per_axis)) {
        for (int i : axes_of(outside))
            for (int j : axes_of(inside)) {
                double q = scaled(y[std::size_t(i - 1)]) / scaled(y[std::size_t(j - 1)]);
                worst = std::max(worst, q * q);
            }
    }
    return worst;
}

}  // namespace cubeflow

#endif  // CUBEFLOW_FLOW_HPP
