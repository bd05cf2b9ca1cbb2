// Copyright 2026 The qse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qse/linalg.hpp"
#include "qse/states.hpp"

namespace qse {

// Which ellipsoid: E_{B|A} is Bob's state steered by Alice's measurements.
enum class Steering { BGivenA, AGivenB };

inline Party steering_party(Steering s) { return s == Steering::BGivenA ? Party::A : Party::B; }
inline Party steered_party(Steering s) { return s == Steering::BGivenA ? Party::B : Party::A; }

inline std::string to_string(Steering s) {
    return s == Steering::BGivenA ? "B_given_A" : "A_given_B";
}

// ---------------------------------------------------------------------------
// POVM elements: E = e0 (1 + e.sigma)
// ---------------------------------------------------------------------------

struct PovmElement {
    double e0 = 0.0;
    Vec3 e;

    void check() const {
        if (e0 < -1e-12 || e0 > 1.0 + 1e-12) {
            throw Error("POVM element weight out of [0,1]");
        }
        if (e.norm() > 1.0 + 1e-12) {
            throw Error("POVM element direction outside the unit ball");
        }
    }

    static PovmElement projector(const Vec3 &unit_direction) {
        return {0.5, unit_direction};
    }
};

struct Povm {
    std::vector<PovmElement> elements;

    void check() const {
        double w = 0.0;
        Vec3 bias;
        for (const PovmElement &el : elements) {
            el.check();
            w += el.e0;
            bias += el.e * el.e0;
        }
        if (std::abs(w - 1.0) > 1e-10 || bias.norm() > 1e-10) {
            throw Error("POVM completeness violated");
        }
    }
};

struct SteeredPoint {
    Vec3 bloch;
    double probability = 0.0;
    PovmElement generator;
};

// Swapped-view of the Pauli form: the steering party's (local, correlation)
// pair. For B|A these are (a, T); for A|B they are (b, T^T).
inline void steering_view(const PauliForm &pf, Steering which, Vec3 &local_steering,
                          Vec3 &local_steered, Mat3 &corr) {
    if (which == Steering::BGivenA) {
        local_steering = pf.a;
        local_steered = pf.b;
        corr = pf.T;
    } else {
        local_steering = pf.b;
        local_steered = pf.a;
        corr = pf.T.transpose();
    }
}

// bloch = (b + T^T e) / (1 + a.e), probability = e0 (1 + a.e)
inline SteeredPoint steered_state(const TwoQubitState &state, const PovmElement &element,
                                  Steering which) {
    element.check();
    Vec3 a, b;
    Mat3 t;
    steering_view(state.pauli(), which, a, b, t);
    const double denom = 1.0 + a.dot(element.e);
    if (denom <= 1e-12) {
        if (element.e0 > 1e-12) {
            throw Error("degenerate steering: outcome has vanishing probability");
        }
        return {b, 0.0, element};
    }
    SteeredPoint p;
    p.bloch = (b + t.transpose() * element.e) / denom;
    p.probability = element.e0 * denom;
    p.generator = element;
    return p;
}

// ---------------------------------------------------------------------------
// The steering ellipsoid
// ---------------------------------------------------------------------------

struct SteeringEllipsoid {
    Steering party = Steering::BGivenA;
    Vec3 center;
    Mat3 orientation;                 // Q, symmetric PSD
    std::array<double, 3> semiaxes{}; // descending
    Mat3 axes;                        // orthonormal columns matching semiaxes
    int rank = 0;
};

namespace detail {

constexpr double kRankRelTol = 1e-9;

inline SteeringEllipsoid ellipsoid_from_q(Steering which, const Vec3 &center, const Mat3 &q) {
    SteeringEllipsoid el;
    el.party = which;
    el.center = center;
    el.orientation = q;
    const SymEig3 e = sym_eig3(q);
    el.axes = e.vectors;
    const double lmax = std::max(1.0, e.values[0]);
    for (int i = 0; i < 3; ++i) {
        const double lam = std::max(0.0, e.values[static_cast<size_t>(i)]);
        el.semiaxes[static_cast<size_t>(i)] = std::sqrt(lam);
        if (e.values[static_cast<size_t>(i)] >= kRankRelTol * lmax) {
            ++el.rank;
        }
    }
    return el;
}

}  // namespace detail

// Ellipsoid directly from a Pauli form; used both for exact states and for
// steering maps fitted from data (where the form may be slightly unphysical).
inline SteeringEllipsoid steering_ellipsoid(const PauliForm &pf, Steering which) {
    Vec3 a, b;
    Mat3 t;
    steering_view(pf, which, a, b, t);
    const double a2 = a.norm2();
    if (a2 >= 1.0 - 1e-9) {
        // Pure product limit: the steered set collapses to the point b.
        SteeringEllipsoid el;
        el.party = which;
        el.center = b;
        el.axes = Mat3::identity();
        el.rank = 0;
        return el;
    }
    const double gamma = 1.0 / (1.0 - a2);
    const Vec3 center = (b - t.transpose() * a) * gamma;
    const Mat3 m = t - Mat3::outer(a, b);
    const Mat3 inner = Mat3::identity() + Mat3::outer(a, a) * gamma;
    const Mat3 q = (m.transpose() * inner * m) * gamma;
    return detail::ellipsoid_from_q(which, center, q);
}

inline SteeringEllipsoid steering_ellipsoid(const TwoQubitState &state, Steering which) {
    return steering_ellipsoid(state.pauli(), which);
}

// ---------------------------------------------------------------------------
// Shape classification
// ---------------------------------------------------------------------------

enum class Shape { Point, Needle, Pancake, Ellipsoid };

enum class MeasureKind { None, Length, Area, Volume };

struct ShapeReport {
    Shape shape = Shape::Point;
    MeasureKind measure_kind = MeasureKind::None;
    double measure_value = 0.0;
};

inline std::string to_string(Shape s) {
    switch (s) {
    case Shape::Point:
        return "point";
    case Shape::Needle:
        return "needle";
    case Shape::Pancake:
        return "pancake";
    default:
        return "ellipsoid";
    }
}

inline std::string to_string(MeasureKind k) {
    switch (k) {
    case MeasureKind::None:
        return "none";
    case MeasureKind::Length:
        return "length";
    case MeasureKind::Area:
        return "area";
    default:
        return "volume";
    }
}

inline ShapeReport classify(const SteeringEllipsoid &el) {
    ShapeReport r;
    const auto &s = el.semiaxes;
    switch (el.rank) {
    case 0:
        r.shape = Shape::Point;
        r.measure_kind = MeasureKind::None;
        r.measure_value = 0.0;
        break;
    case 1:
        r.shape = Shape::Needle;
        r.measure_kind = MeasureKind::Length;
        r.measure_value = 2.0 * s[0];
        break;
    case 2:
        r.shape = Shape::Pancake;
        r.measure_kind = MeasureKind::Area;
        r.measure_value = M_PI * s[0] * s[1];
        break;
    default:
        r.shape = Shape::Ellipsoid;
        r.measure_kind = MeasureKind::Volume;
        r.measure_value = (4.0 * M_PI / 3.0) * s[0] * s[1] * s[2];
        break;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Surface sampling
// ---------------------------------------------------------------------------

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 seeded_engine(uint64_t seed, uint64_t stream = 0) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x51ed2701)));
}

inline Vec3 random_unit_vector(std::mt19937_64 &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    while (true) {
        const Vec3 v{normal(rng), normal(rng), normal(rng)};
        const double n = v.norm();
        if (n > 1e-8) {
            return v / n;
        }
    }
}

// n surface points from unit directions |e| = 1 with e0 = 1/2; directions
// whose outcome probability vanishes are skipped and redrawn.
inline std::vector<SteeredPoint> sample_surface(const TwoQubitState &state, Steering which,
                                                int n, uint64_t seed) {
    std::vector<SteeredPoint> pts;
    if (n <= 0) {
        return pts;
    }
    pts.reserve(static_cast<size_t>(n));
    std::mt19937_64 rng = seeded_engine(seed);
    Vec3 a, b;
    Mat3 t;
    steering_view(state.pauli(), which, a, b, t);
    while (pts.size() < static_cast<size_t>(n)) {
        const Vec3 e = random_unit_vector(rng);
        if (1.0 + a.dot(e) <= 1e-12) {
            continue;
        }
        pts.push_back(steered_state(state, PovmElement::projector(e), which));
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Discord geometry: the ellipsoid is a segment of a diameter iff it has
// rank <= 1 and its supporting line passes through the origin.
// ---------------------------------------------------------------------------

inline bool zero_discord_geometric(const SteeringEllipsoid &el, double tol = 1e-6) {
    if (el.rank > 1) {
        return false;
    }
    if (el.rank == 0) {
        return true;  // a point lies on some diameter
    }
    const Vec3 u = el.axes.column(0);
    const Vec3 offset = el.center - u * el.center.dot(u);
    return offset.norm() <= tol;
}

// ---------------------------------------------------------------------------
// POVM reachability
// ---------------------------------------------------------------------------

namespace detail {

// Min-norm least-squares solution of M e = y for a 3x3 system, plus an
// orthonormal basis of the (numerical) null space of M.
struct LinearSolve {
    Vec3 min_norm;
    std::vector<Vec3> null_basis;
    double residual = 0.0;
};

inline LinearSolve solve_min_norm(const Mat3 &m, const Vec3 &y) {
    // Normal-equation route through the symmetric eigensolver: M = U S V^T
    // obtained from eigenpairs of M^T M.
    const Mat3 mtm = m.transpose() * m;
    const SymEig3 e = sym_eig3(mtm);
    // Eigenvalues of M^T M carry round-off of order eps * |M|^2, so the rank
    // cut must happen on them, not on the derived singular values.
    const double cutoff = 1e-12 * std::max(1.0, e.values[0]);

    LinearSolve out;
    Vec3 x{0.0, 0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        const Vec3 v = e.vectors.column(k);
        const double lam = e.values[static_cast<size_t>(k)];
        if (lam <= cutoff) {
            out.null_basis.push_back(v);
            continue;
        }
        const double s = std::sqrt(lam);
        const Vec3 mv = m * v;  // = s * u_k
        x += v * (mv.dot(y) / (s * s));
    }
    out.min_norm = x;
    out.residual = (m * x - y).norm();
    return out;
}

}  // namespace detail

struct ReachResult {
    PovmElement element;
    // Radius of direction freedom left inside the unit ball (null-space moves
    // around the min-norm solution); 0 means the direction is unique.
    double freedom_radius = 0.0;
    std::vector<Vec3> null_basis;
};

// Solve (T^T - r a^T) e = r - b for a POVM element steering to target bloch r;
// optionally match the outcome probability. Returns nullopt when infeasible.
inline std::optional<ReachResult> reach_povm_element(const TwoQubitState &state, Steering which,
                                                     const Vec3 &target_bloch,
                                                     std::optional<double> target_prob = {}) {
    if (target_bloch.norm() > 1.0 + 1e-9) {
        throw Error("target Bloch vector outside the unit ball");
    }
    Vec3 a, b;
    Mat3 t;
    steering_view(state.pauli(), which, a, b, t);
    const Mat3 m = t.transpose() - Mat3::outer(target_bloch, a);
    const detail::LinearSolve sol = detail::solve_min_norm(m, target_bloch - b);
    if (sol.residual > 1e-8) {
        return std::nullopt;  // inconsistent system: target not in the steered set
    }
    const double n = sol.min_norm.norm();
    if (n > 1.0 + 1e-9) {
        return std::nullopt;  // min-norm point is the closest of the solution set
    }

    ReachResult r;
    r.element.e = sol.min_norm;
    r.null_basis = sol.null_basis;
    r.freedom_radius =
        sol.null_basis.empty() ? 0.0 : std::sqrt(std::max(0.0, 1.0 - sol.min_norm.norm2()));

    const double denom = 1.0 + a.dot(r.element.e);
    if (denom <= 1e-12) {
        return std::nullopt;
    }
    if (target_prob) {
        double e0 = *target_prob / denom;
        if (e0 > 1.0 + 1e-9) {
            // e0 <= 1 needs 1 + a.e >= target_prob. The probability depends on
            // the direction only through a.e, so slide along the projection of
            // a onto the null space as far as the unit ball allows.
            Vec3 g;
            for (const Vec3 &nb : sol.null_basis) {
                g += nb * a.dot(nb);
            }
            const double gnorm = g.norm();
            const double deficit = *target_prob - denom;
            if (gnorm < 1e-14 || gnorm * r.freedom_radius < deficit - 1e-12) {
                return std::nullopt;
            }
            r.element.e += g * (deficit / (gnorm * gnorm));
            const double d2 = 1.0 + a.dot(r.element.e);
            e0 = *target_prob / d2;
            r.freedom_radius = std::sqrt(std::max(0.0, 1.0 - r.element.e.norm2()));
        }
        if (e0 < -1e-12 || e0 > 1.0 + 1e-9) {
            return std::nullopt;
        }
        r.element.e0 = std::clamp(e0, 0.0, 1.0);
    } else {
        r.element.e0 = 0.5;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Complete steering
// ---------------------------------------------------------------------------

struct Decomposition {
    struct Part {
        double weight = 0.0;
        Vec3 bloch;
    };
    std::vector<Part> parts;

    void check_against(const Vec3 &local_bloch) const {
        if (parts.empty()) {
            throw Error("empty decomposition");
        }
        double w = 0.0;
        Vec3 mean;
        for (const Part &p : parts) {
            if (p.weight <= 0.0 || p.weight > 1.0 + 1e-12) {
                throw Error("decomposition weight out of (0,1]");
            }
            if (p.bloch.norm() > 1.0 + 1e-9) {
                throw Error("decomposition part outside the unit ball");
            }
            w += p.weight;
            mean += p.bloch * p.weight;
        }
        if (std::abs(w - 1.0) > 1e-10) {
            throw Error("decomposition weights do not sum to 1");
        }
        if ((mean - local_bloch).norm() > 1e-9) {
            throw Error("decomposition barycenter does not match the local Bloch vector");
        }
    }
};

struct CompletenessVerdict {
    bool complete = false;
    Povm witness;
    std::string infeasibility_note;
};

// One POVM element per decomposition part: reach each part with its weight as
// the outcome probability, then verify the POVM completeness constraints.
// Residual direction freedom (null spaces) is searched with a penalty descent.
inline CompletenessVerdict check_complete_steering(const TwoQubitState &state, Steering which,
                                                   const Decomposition &decomposition) {
    Vec3 a, b;
    Mat3 t;
    steering_view(state.pauli(), which, a, b, t);
    decomposition.check_against(b);

    CompletenessVerdict verdict;
    std::vector<ReachResult> reached;
    for (size_t k = 0; k < decomposition.parts.size(); ++k) {
        const auto &part = decomposition.parts[k];
        auto r = reach_povm_element(state, which, part.bloch, part.weight);
        if (!r) {
            verdict.infeasibility_note = "part " + std::to_string(k) +
                                         " unreachable with weight " + std::to_string(part.weight);
            return verdict;
        }
        reached.push_back(*r);
    }

    auto violation = [&](const std::vector<ReachResult> &els) {
        double w = 0.0;
        Vec3 bias;
        for (size_t k = 0; k < els.size(); ++k) {
            const double denom = 1.0 + a.dot(els[k].element.e);
            const double e0 = decomposition.parts[k].weight / denom;
            w += e0;
            bias += els[k].element.e * e0;
        }
        return std::abs(w - 1.0) + bias.norm();
    };

    double best = violation(reached);
    // Descend over the free null-space coefficients, if any.
    bool any_freedom = false;
    for (const ReachResult &r : reached) {
        if (r.freedom_radius > 1e-12) {
            any_freedom = true;
        }
    }
    if (any_freedom && best > 1e-10) {
        double step = 0.25;
        while (step > 1e-8) {
            bool improved = false;
            for (size_t k = 0; k < reached.size(); ++k) {
                for (const Vec3 &nb : reached[k].null_basis) {
                    for (double s : {step, -step}) {
                        std::vector<ReachResult> trial = reached;
                        trial[k].element.e += nb * s;
                        if (trial[k].element.e.norm() > 1.0 + 1e-12) {
                            continue;
                        }
                        const double v = violation(trial);
                        if (v < best - 1e-14) {
                            best = v;
                            reached = std::move(trial);
                            improved = true;
                        }
                    }
                }
            }
            if (!improved) {
                step *= 0.5;
            }
        }
    }

    if (best > 1e-8) {
        verdict.infeasibility_note =
            "per-part elements exist but cannot form one POVM: completeness defect " +
            std::to_string(best);
        return verdict;
    }

    Povm witness;
    for (size_t k = 0; k < reached.size(); ++k) {
        PovmElement el = reached[k].element;
        el.e0 = decomposition.parts[k].weight / (1.0 + a.dot(el.e));
        witness.elements.push_back(el);
    }
    witness.check();
    verdict.complete = true;
    verdict.witness = witness;
    return verdict;
}

// Chord endpoints of the ellipsoid through the local Bloch vector, weighted so
// that the barycenter equals the local state. Reproduces the antipodal
// endpoint decompositions used for the needle and pancake witnesses.
inline Decomposition canonical_decomposition(const TwoQubitState &state, Steering which) {
    const SteeringEllipsoid el = steering_ellipsoid(state, which);
    Vec3 a, b;
    Mat3 t;
    steering_view(state.pauli(), which, a, b, t);
    if (el.rank == 0) {
        return Decomposition{{{1.0, b}}};
    }
    // Direction of the chord: offset of b from the center when present,
    // otherwise the major axis.
    Vec3 u = b - el.center;
    if (u.norm() < 1e-9) {
        u = el.axes.column(0);
    } else {
        u = u.normalized();
    }
    // Solve for the boundary points c + t u with sum_i ((t u).axis_i / s_i)^2 = 1
    // restricted to non-degenerate axes.
    double inv = 0.0;
    for (int i = 0; i < el.rank; ++i) {
        const double proj = u.dot(el.axes.column(i));
        const double s = el.semiaxes[static_cast<size_t>(i)];
        inv += (proj * proj) / (s * s);
    }
    if (inv <= 0.0) {
        return Decomposition{{{1.0, b}}};
    }
    const double tmax = 1.0 / std::sqrt(inv);
    const Vec3 rp = el.center + u * tmax;
    const Vec3 rm = el.center - u * tmax;
    const double d = (b - rm).norm() / (rp - rm).norm();
    Decomposition dec;
    if (d < 1e-12) {
        dec.parts = {{1.0, rm}};
    } else if (d > 1.0 - 1e-12) {
        dec.parts = {{1.0, rp}};
    } else {
        dec.parts = {{d, rp}, {1.0 - d, rm}};
    }
    return dec;
}

// ---------------------------------------------------------------------------
// Werner nested-tetrahedron separability boundary
// ---------------------------------------------------------------------------

// A centered sphere fits inside a tetrahedron inscribed in the unit sphere iff
// its radius is at most 1/3 (the insphere of the regular tetrahedron).
inline bool werner_tetrahedron_check(double p) {
    if (p < 0.0 || p > 1.0) {
        throw Error("p out of range [0,1]");
    }
    return p <= 1.0 / 3.0 + 1e-12;
}

}  // namespace qse
