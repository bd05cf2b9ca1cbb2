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

#include <cstdint>
#include <optional>
#include <vector>

#include "qse/linalg.hpp"
#include "qse/steering.hpp"
#include "qse/tomography.hpp"

namespace qse {

// ---------------------------------------------------------------------------
// Icosahedron direction sets and uniform rotations
// ---------------------------------------------------------------------------

struct DirectionSet {
    enum class Provenance { Icosahedron, Random, Explicit };

    std::vector<Vec3> directions;
    Provenance provenance = Provenance::Explicit;
};

// Uniform rotation from a normalized 4-component Gaussian quaternion.
inline Mat3 random_rotation(std::mt19937_64 &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double q0, q1, q2, q3, n;
    do {
        q0 = normal(rng);
        q1 = normal(rng);
        q2 = normal(rng);
        q3 = normal(rng);
        n = std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3);
    } while (n < 1e-8);
    q0 /= n;
    q1 /= n;
    q2 /= n;
    q3 /= n;
    Mat3 r;
    r(0, 0) = 1.0 - 2.0 * (q2 * q2 + q3 * q3);
    r(0, 1) = 2.0 * (q1 * q2 - q0 * q3);
    r(0, 2) = 2.0 * (q1 * q3 + q0 * q2);
    r(1, 0) = 2.0 * (q1 * q2 + q0 * q3);
    r(1, 1) = 1.0 - 2.0 * (q1 * q1 + q3 * q3);
    r(1, 2) = 2.0 * (q2 * q3 - q0 * q1);
    r(2, 0) = 2.0 * (q1 * q3 - q0 * q2);
    r(2, 1) = 2.0 * (q2 * q3 + q0 * q1);
    r(2, 2) = 1.0 - 2.0 * (q1 * q1 + q2 * q2);
    return r;
}

inline Mat3 random_rotation(uint64_t seed) {
    std::mt19937_64 rng = seeded_engine(seed, 0x726f74);
    return random_rotation(rng);
}

// The 12 vertices of a regular icosahedron, built from cyclic permutations of
// (0, +/-1, +/-phi) and rotated by the given proper rotation.
inline DirectionSet icosahedron_vertices(const Mat3 &rotation) {
    const Mat3 gram = rotation.transpose() * rotation;
    if ((gram - Mat3::identity()).max_abs() > 1e-10 ||
        std::abs(rotation.determinant() - 1.0) > 1e-10) {
        throw Error("icosahedron_vertices: rotation is not proper orthogonal");
    }
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    const double n = std::sqrt(1.0 + phi * phi);
    DirectionSet set;
    set.provenance = DirectionSet::Provenance::Icosahedron;
    for (double s1 : {1.0, -1.0}) {
        for (double s2 : {1.0, -1.0}) {
            set.directions.push_back(rotation * (Vec3{0.0, s1, s2 * phi} / n));
            set.directions.push_back(rotation * (Vec3{s1, s2 * phi, 0.0} / n));
            set.directions.push_back(rotation * (Vec3{s1 * phi, 0.0, s2} / n));
        }
    }
    return set;
}

// ---------------------------------------------------------------------------
// Least-squares quadric fit: x^T A x + beta^T x + gamma = 0
// ---------------------------------------------------------------------------

struct FittedQuadric {
    Mat3 A;
    Vec3 beta;
    double gamma = 0.0;
    double residual_rms = 0.0;
};

// Coefficients from the eigenvector of the smallest eigenvalue of the 10x10
// design normal matrix, under a unit coefficient-norm constraint.
inline FittedQuadric fit_quadric(const std::vector<Vec3> &points) {
    if (points.size() < 9) {
        throw Error("fit_quadric needs at least 9 points");
    }
    // Row layout: x^2 y^2 z^2 2xy 2xz 2yz x y z 1
    std::vector<double> normal(100, 0.0);
    auto accumulate = [&](const std::array<double, 10> &row) {
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) {
                normal[static_cast<size_t>(i * 10 + j)] += row[static_cast<size_t>(i)] *
                                                           row[static_cast<size_t>(j)];
            }
        }
    };
    auto design_row = [](const Vec3 &p) {
        return std::array<double, 10>{p.x * p.x, p.y * p.y, p.z * p.z,
                                      2.0 * p.x * p.y, 2.0 * p.x * p.z, 2.0 * p.y * p.z,
                                      p.x, p.y, p.z, 1.0};
    };
    for (const Vec3 &p : points) {
        accumulate(design_row(p));
    }
    const SymEig eig = jacobi_symmetric(std::move(normal), 10);
    std::array<double, 10> coeff{};
    for (int i = 0; i < 10; ++i) {
        coeff[static_cast<size_t>(i)] = eig.vec(i, 9);  // smallest eigenvalue
    }

    FittedQuadric fit;
    fit.A(0, 0) = coeff[0];
    fit.A(1, 1) = coeff[1];
    fit.A(2, 2) = coeff[2];
    fit.A(0, 1) = fit.A(1, 0) = coeff[3];
    fit.A(0, 2) = fit.A(2, 0) = coeff[4];
    fit.A(1, 2) = fit.A(2, 1) = coeff[5];
    fit.beta = {coeff[6], coeff[7], coeff[8]};
    fit.gamma = coeff[9];

    double ss = 0.0;
    for (const Vec3 &p : points) {
        const auto row = design_row(p);
        double r = 0.0;
        for (int i = 0; i < 10; ++i) {
            r += row[static_cast<size_t>(i)] * coeff[static_cast<size_t>(i)];
        }
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / static_cast<double>(points.size()));
    return fit;
}

// ---------------------------------------------------------------------------
// Geometry extraction with degenerate fallbacks
// ---------------------------------------------------------------------------

enum class FitShape { Ellipsoid, Ellipse, Line, Point, Indeterminate };

inline std::string to_string(FitShape s) {
    switch (s) {
    case FitShape::Ellipsoid:
        return "ellipsoid";
    case FitShape::Ellipse:
        return "ellipse";
    case FitShape::Line:
        return "line";
    case FitShape::Point:
        return "point";
    default:
        return "indeterminate";
    }
}

struct FitResult {
    FitShape shape = FitShape::Indeterminate;
    Vec3 center;
    std::array<double, 3> semiaxes{};  // descending; trailing zeros for degenerate shapes
    Mat3 axes;
    MeasureKind measure_kind = MeasureKind::None;
    double measure = 0.0;
    double residual_rms = 0.0;
};

namespace detail {

// Quadric path is abandoned beyond this condition number or for indefinite A.
constexpr double kQuadricCondLimit = 1e8;
// A fitted semiaxis below this fraction of the largest counts as collapsed.
constexpr double kFitAxisRelTol = 0.05;

inline FitResult result_from_ellipsoid(const SteeringEllipsoid &el, double residual_rms) {
    FitResult r;
    r.center = el.center;
    r.axes = el.axes;
    r.residual_rms = residual_rms;
    const double smax = std::max(el.semiaxes[0], 1e-300);
    int rank = 0;
    for (int i = 0; i < 3; ++i) {
        const double s = el.semiaxes[static_cast<size_t>(i)];
        if (s >= kFitAxisRelTol * smax && s > 1e-9) {
            r.semiaxes[static_cast<size_t>(rank)] = s;
            ++rank;
        }
    }
    switch (rank) {
    case 3:
        r.shape = FitShape::Ellipsoid;
        r.measure_kind = MeasureKind::Volume;
        r.measure = (4.0 * M_PI / 3.0) * r.semiaxes[0] * r.semiaxes[1] * r.semiaxes[2];
        break;
    case 2:
        r.shape = FitShape::Ellipse;
        r.measure_kind = MeasureKind::Area;
        r.measure = M_PI * r.semiaxes[0] * r.semiaxes[1];
        break;
    case 1:
        r.shape = FitShape::Line;
        r.measure_kind = MeasureKind::Length;
        r.measure = 2.0 * r.semiaxes[0];
        break;
    default:
        r.shape = FitShape::Point;
        r.measure_kind = MeasureKind::None;
        r.measure = 0.0;
        break;
    }
    return r;
}

// Linear least-squares estimate of the steering map x(1 + a.e) = b + T^T e
// from (direction, point) pairs. Exact on noiseless data for every rank, which
// is what makes the degenerate (ellipse / line) fallback well posed.
inline PauliForm fit_steering_map(const std::vector<Vec3> &directions,
                                  const std::vector<Vec3> &points) {
    if (directions.size() != points.size() || points.size() < 5) {
        throw Error("fit_steering_map needs matching directions and at least 5 points");
    }
    // Unknowns: a(0..2), b(3..5), T row-major (6..14). Residual rows:
    // x_i + x_i (a.e) - b_i - sum_j T_ji e_j = 0.
    std::vector<double> normal(15 * 15, 0.0);
    std::vector<double> rhs(15, 0.0);
    std::array<double, 15> row{};
    for (size_t k = 0; k < points.size(); ++k) {
        const Vec3 &e = directions[k];
        const Vec3 &x = points[k];
        for (int i = 0; i < 3; ++i) {
            row.fill(0.0);
            for (int j = 0; j < 3; ++j) {
                row[static_cast<size_t>(j)] = x[i] * e[j];        // a_j
                row[static_cast<size_t>(6 + 3 * j + i)] = -e[j];  // T_ji
            }
            row[static_cast<size_t>(3 + i)] = -1.0;  // b_i
            const double c = x[i];
            for (int r = 0; r < 15; ++r) {
                rhs[static_cast<size_t>(r)] -= row[static_cast<size_t>(r)] * c;
                for (int s = 0; s < 15; ++s) {
                    normal[static_cast<size_t>(r * 15 + s)] +=
                        row[static_cast<size_t>(r)] * row[static_cast<size_t>(s)];
                }
            }
        }
    }
    // Pseudoinverse solve of the normal equations.
    const SymEig eig = jacobi_symmetric(std::move(normal), 15);
    const double cutoff = std::max(1e-12, 1e-10 * std::max(0.0, eig.values[0]));
    std::array<double, 15> theta{};
    for (int k = 0; k < 15; ++k) {
        const double lam = eig.values[static_cast<size_t>(k)];
        if (lam <= cutoff) {
            continue;
        }
        double proj = 0.0;
        for (int r = 0; r < 15; ++r) {
            proj += eig.vec(r, k) * rhs[static_cast<size_t>(r)];
        }
        proj /= lam;
        for (int r = 0; r < 15; ++r) {
            theta[static_cast<size_t>(r)] += proj * eig.vec(r, k);
        }
    }
    PauliForm pf;
    pf.a = {theta[0], theta[1], theta[2]};
    pf.b = {theta[3], theta[4], theta[5]};
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
            pf.T(j, i) = theta[static_cast<size_t>(6 + 3 * j + i)];
        }
    }
    return pf;
}

// Geometric fallback when no generator directions are available (e.g. points
// reloaded from a CSV file): principal-component plane/line fits.
inline FitResult geometric_fallback(const std::vector<Vec3> &points, double residual_rms) {
    Vec3 centroid;
    for (const Vec3 &p : points) {
        centroid += p;
    }
    centroid = centroid / static_cast<double>(points.size());
    Mat3 cov;
    for (const Vec3 &p : points) {
        cov = cov + Mat3::outer(p - centroid, p - centroid);
    }
    cov = cov * (1.0 / static_cast<double>(points.size()));
    const SymEig3 pca = sym_eig3(cov);
    const double s0 = std::sqrt(std::max(0.0, pca.values[0]));
    const double s1 = std::sqrt(std::max(0.0, pca.values[1]));

    FitResult r;
    r.center = centroid;
    r.axes = pca.vectors;
    r.residual_rms = residual_rms;
    if (s0 < 1e-9) {
        r.shape = FitShape::Point;
        r.measure_kind = MeasureKind::None;
        return r;
    }
    if (s1 < kFitAxisRelTol * s0) {
        // Collinear: report the extent between extreme projections.
        const Vec3 u = pca.vectors.column(0);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const Vec3 &p : points) {
            const double t = (p - centroid).dot(u);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        r.shape = FitShape::Line;
        r.measure_kind = MeasureKind::Length;
        r.semiaxes[0] = 0.5 * (hi - lo);
        r.measure = hi - lo;
        r.center = centroid + u * (0.5 * (hi + lo));
        return r;
    }
    // Coplanar: in-plane conic fit, 5 coefficients under unit norm.
    const Vec3 u = pca.vectors.column(0);
    const Vec3 v = pca.vectors.column(1);
    std::vector<double> nm(36, 0.0);
    for (const Vec3 &p : points) {
        const Vec3 d = p - centroid;
        const double x = d.dot(u);
        const double y = d.dot(v);
        const std::array<double, 6> row{x * x, y * y, 2.0 * x * y, x, y, 1.0};
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                nm[static_cast<size_t>(i * 6 + j)] += row[static_cast<size_t>(i)] *
                                                      row[static_cast<size_t>(j)];
            }
        }
    }
    const SymEig eig = jacobi_symmetric(std::move(nm), 6);
    const double flip = (eig.vec(0, 5) + eig.vec(1, 5)) < 0.0 ? -1.0 : 1.0;
    const double axx = flip * eig.vec(0, 5), ayy = flip * eig.vec(1, 5);
    const double axy = flip * eig.vec(2, 5);
    const double bx = flip * eig.vec(3, 5), by = flip * eig.vec(4, 5), g = flip * eig.vec(5, 5);
    const double det = axx * ayy - axy * axy;
    if (det <= 0.0) {
        r.shape = FitShape::Indeterminate;
        return r;
    }
    const double cx = (-0.5 * bx * ayy + 0.5 * by * axy) / det;
    const double cy = (-0.5 * by * axx + 0.5 * bx * axy) / det;
    const double kk = axx * cx * cx + 2.0 * axy * cx * cy + ayy * cy * cy - g;
    const double tr = axx + ayy;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    const double l1 = 0.5 * (tr - disc);
    const double l2 = 0.5 * (tr + disc);
    if (l1 <= 0.0 || kk <= 0.0) {
        r.shape = FitShape::Indeterminate;
        return r;
    }
    r.shape = FitShape::Ellipse;
    r.measure_kind = MeasureKind::Area;
    r.semiaxes[0] = std::sqrt(kk / l1);
    r.semiaxes[1] = std::sqrt(kk / l2);
    r.measure = M_PI * r.semiaxes[0] * r.semiaxes[1];
    r.center = centroid + u * cx + v * cy;
    return r;
}

}  // namespace detail

// Extract center/semiaxes/measure from a fitted quadric. When the quadric is
// degenerate (indefinite or ill-conditioned A), the steering map is refit from
// the generator directions when available, otherwise a principal-component
// fallback handles the ellipse and line cases.
inline FitResult extract_geometry(const FittedQuadric &fit, const std::vector<Vec3> &points,
                                  const std::optional<std::vector<Vec3>> &directions = {}) {
    if (points.size() < 9) {
        throw Error("extract_geometry needs the fit's points (>= 9)");
    }
    const SymEig3 eig = sym_eig3(fit.A);
    double lmin = eig.values[2];
    double lmax = eig.values[0];
    double sign = 1.0;
    if (lmax <= 0.0 || (lmin < 0.0 && std::abs(lmin) > lmax)) {
        sign = -1.0;
        std::swap(lmin, lmax);
        lmin = -lmin;
        lmax = -lmax;
    }
    const bool definite = lmin > 0.0 && lmax / lmin <= detail::kQuadricCondLimit;

    if (definite) {
        const Mat3 a = fit.A * sign;
        const Vec3 beta = fit.beta * sign;
        const double gamma = fit.gamma * sign;
        // center = -A^{-1} beta / 2 via the spectral decomposition of A
        const SymEig3 ae = sym_eig3(a);
        Vec3 center;
        for (int k = 0; k < 3; ++k) {
            const Vec3 v = ae.vectors.column(k);
            center += v * (-0.5 * beta.dot(v) / ae.values[static_cast<size_t>(k)]);
        }
        const double kk = center.dot(a * center) - gamma;
        // A thin ellipsoid whose smallest semiaxis collapses under the relative
        // threshold is really a degenerate shape seen through noise; let the
        // fallbacks below handle it.
        const bool collapsed =
            kk > 0.0 && std::sqrt(ae.values[0] / ae.values[2]) * detail::kFitAxisRelTol > 1.0;
        if (kk > 0.0 && !collapsed) {
            FitResult r;
            r.shape = FitShape::Ellipsoid;
            r.center = center;
            r.residual_rms = fit.residual_rms;
            // semiaxes ascend with eigenvalues of A descending
            for (int k = 0; k < 3; ++k) {
                r.semiaxes[static_cast<size_t>(k)] =
                    std::sqrt(kk / ae.values[static_cast<size_t>(2 - k)]);
                for (int row = 0; row < 3; ++row) {
                    r.axes(row, k) = ae.vectors(row, 2 - k);
                }
            }
            r.measure_kind = MeasureKind::Volume;
            r.measure = (4.0 * M_PI / 3.0) * r.semiaxes[0] * r.semiaxes[1] * r.semiaxes[2];
            return r;
        }
    }

    if (directions) {
        const PauliForm pf = detail::fit_steering_map(*directions, points);
        const SteeringEllipsoid el = steering_ellipsoid(pf, Steering::BGivenA);
        return detail::result_from_ellipsoid(el, fit.residual_rms);
    }
    return detail::geometric_fallback(points, fit.residual_rms);
}

// Fit steered points end to end: quadric first, fallbacks as needed.
inline FitResult fit_steered_points(const std::vector<SteeredPoint> &steered) {
    std::vector<Vec3> pts;
    std::vector<Vec3> dirs;
    pts.reserve(steered.size());
    dirs.reserve(steered.size());
    for (const SteeredPoint &p : steered) {
        pts.push_back(p.bloch);
        dirs.push_back(p.generator.e);
    }
    return extract_geometry(fit_quadric(pts), pts, dirs);
}

inline FitResult fit_points(const std::vector<Vec3> &points) {
    return extract_geometry(fit_quadric(points), points);
}

// ---------------------------------------------------------------------------
// Rotation-robustness trials
// ---------------------------------------------------------------------------

struct TomographyNoise {
    long events_per_setting = 50000;
};

struct RobustnessStats {
    int trials = 0;
    double measure_mean = 0.0;
    double measure_std = 0.0;
    std::vector<FitResult> per_trial;
};

// Each trial rotates the icosahedron uniformly at random, steers along the 12
// vertex directions, optionally runs each steered state through single-qubit
// tomography, and refits the geometry.
inline RobustnessStats robustness_trial(const TwoQubitState &state, Steering which, int trials,
                                        std::optional<TomographyNoise> noise, uint64_t seed) {
    if (trials < 1) {
        throw Error("robustness_trial needs at least one trial");
    }
    RobustnessStats stats;
    stats.trials = trials;
    std::vector<double> measures;
    for (int t = 0; t < trials; ++t) {
        const uint64_t trial_seed = splitmix64(seed + 0x9e37 * static_cast<uint64_t>(t) + 1);
        std::mt19937_64 rng = seeded_engine(trial_seed);
        const DirectionSet dirs = icosahedron_vertices(random_rotation(rng));
        std::vector<SteeredPoint> steered;
        for (size_t k = 0; k < dirs.directions.size(); ++k) {
            SteeredPoint p =
                steered_state(state, PovmElement::projector(dirs.directions[k]), which);
            if (noise) {
                p.bloch = simulate_qubit_tomography(p.bloch, noise->events_per_setting,
                                                    splitmix64(trial_seed + 17 * k + 3));
            }
            steered.push_back(p);
        }
        stats.per_trial.push_back(fit_steered_points(steered));
        measures.push_back(stats.per_trial.back().measure);
    }
    for (double m : measures) {
        stats.measure_mean += m;
    }
    stats.measure_mean /= trials;
    if (trials > 1) {
        double ss = 0.0;
        for (double m : measures) {
            ss += (m - stats.measure_mean) * (m - stats.measure_mean);
        }
        stats.measure_std = std::sqrt(ss / (trials - 1));
    }
    return stats;
}

}  // namespace qse
