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

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qse/linalg.hpp"

namespace qse {

// ---------------------------------------------------------------------------
// Two-qubit state with cached Pauli form
// ---------------------------------------------------------------------------

struct StateDiagnostics {
    double hermiticity_defect = 0.0;
    double trace_defect = 0.0;
    double min_eigenvalue = 0.0;
    bool is_valid = false;
};

class TwoQubitState {
  public:
    static constexpr double kHermTol = 1e-10;
    static constexpr double kTraceTol = 1e-10;
    static constexpr double kEigTol = -1e-9;

    static TwoQubitState from_matrix(const ComplexMatrix &rho) {
        const StateDiagnostics d = diagnose(rho);
        if (!d.is_valid) {
            throw Error("invalid two-qubit state: hermiticity defect " +
                        std::to_string(d.hermiticity_defect) + ", trace defect " +
                        std::to_string(d.trace_defect) + ", min eigenvalue " +
                        std::to_string(d.min_eigenvalue));
        }
        return TwoQubitState(rho);
    }

    static StateDiagnostics diagnose(const ComplexMatrix &rho) {
        StateDiagnostics d;
        if (rho.dim() != 4 || !rho.all_finite()) {
            d.hermiticity_defect = std::numeric_limits<double>::infinity();
            return d;
        }
        d.hermiticity_defect = rho.hermiticity_defect();
        d.trace_defect = std::abs(rho.trace() - cplx{1.0, 0.0});
        if (d.hermiticity_defect <= kHermTol) {
            const HermEig e = hermitian_eig(rho);
            d.min_eigenvalue = e.values.back();
        } else {
            d.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
        }
        d.is_valid = d.hermiticity_defect <= kHermTol && d.trace_defect <= kTraceTol &&
                     d.min_eigenvalue >= kEigTol;
        return d;
    }

    const ComplexMatrix &rho() const { return rho_; }
    const PauliForm &pauli() const { return pauli_; }

  private:
    explicit TwoQubitState(ComplexMatrix rho) : rho_(std::move(rho)), pauli_(pauli_decompose(rho_)) {}

    ComplexMatrix rho_;
    PauliForm pauli_;
};

inline StateDiagnostics validate(const TwoQubitState &s) { return TwoQubitState::diagnose(s.rho()); }

// ---------------------------------------------------------------------------
// State registry
// ---------------------------------------------------------------------------

enum class StateKind { Rho1, Rho2, Rho3, Rho4, Rho5, Rho6, Rho7, Rho8, Custom };

struct StateSpec {
    StateKind kind = StateKind::Custom;
    double theta = 0.0;  // radians, [0, pi/2]
    double p = 0.0;      // probability, [0, 1]
    std::optional<ComplexMatrix> custom_matrix;

    static StateSpec rho1() { return rho1(std::acos(std::sqrt(2.0 / 3.0))); }
    static StateSpec rho1(double theta) { return {StateKind::Rho1, theta, 0.0, std::nullopt}; }
    static StateSpec rho2(double p) { return {StateKind::Rho2, 0.0, p, std::nullopt}; }
    static StateSpec rho3() { return rho3(0.3, 0.55); }
    static StateSpec rho3(double theta, double p) { return {StateKind::Rho3, theta, p, std::nullopt}; }
    static StateSpec rho4() { return {StateKind::Rho4, 0.0, 0.0, std::nullopt}; }
    static StateSpec rho5() { return {StateKind::Rho5, 0.0, 0.0, std::nullopt}; }
    static StateSpec rho6() { return {StateKind::Rho6, 0.0, 0.0, std::nullopt}; }
    static StateSpec rho7() { return {StateKind::Rho7, 0.0, 0.0, std::nullopt}; }
    static StateSpec rho8() { return {StateKind::Rho8, 0.0, 0.0, std::nullopt}; }
    static StateSpec custom(ComplexMatrix rho) {
        return {StateKind::Custom, 0.0, 0.0, std::move(rho)};
    }
};

namespace detail {

using Ket2 = std::array<cplx, 2>;
using Ket4 = std::array<cplx, 4>;

inline Ket4 kron_ket(const Ket2 &a, const Ket2 &b) {
    return {a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]};
}

inline ComplexMatrix projector(const Ket4 &k) {
    ComplexMatrix m(4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            m(i, j) = k[static_cast<size_t>(i)] * std::conj(k[static_cast<size_t>(j)]);
        }
    }
    return m;
}

inline ComplexMatrix projector2(const Ket2 &k) {
    ComplexMatrix m(2);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            m(i, j) = k[static_cast<size_t>(i)] * std::conj(k[static_cast<size_t>(j)]);
        }
    }
    return m;
}

inline const Ket2 kKet0{cplx{1.0, 0.0}, cplx{0.0, 0.0}};
inline const Ket2 kKet1{cplx{0.0, 0.0}, cplx{1.0, 0.0}};
inline const Ket2 kKetPlus{cplx{1.0 / std::sqrt(2.0), 0.0}, cplx{1.0 / std::sqrt(2.0), 0.0}};

// |psi1(theta)> = cos(theta)|00> + sin(theta)|11>
inline Ket4 psi1(double theta) {
    Ket4 k{};
    k[0] = std::cos(theta);
    k[3] = std::sin(theta);
    return k;
}

}  // namespace detail

inline TwoQubitState make_state(const StateSpec &spec) {
    using namespace detail;
    const ComplexMatrix id2 = ComplexMatrix::identity(2);
    const ComplexMatrix id4 = ComplexMatrix::identity(4);

    auto check_theta = [&] {
        if (spec.theta < 0.0 || spec.theta > M_PI / 2.0 + 1e-12) {
            throw Error("theta out of range [0, pi/2]");
        }
    };
    auto check_p = [&] {
        if (spec.p < 0.0 || spec.p > 1.0) {
            throw Error("p out of range [0, 1]");
        }
    };

    switch (spec.kind) {
    case StateKind::Rho1: {
        check_theta();
        return TwoQubitState::from_matrix(projector(psi1(spec.theta)));
    }
    case StateKind::Rho2: {
        check_p();
        Ket4 psim{};
        psim[1] = 1.0 / std::sqrt(2.0);
        psim[2] = -1.0 / std::sqrt(2.0);
        const ComplexMatrix rho =
            projector(psim) * cplx{spec.p, 0.0} + id4 * cplx{(1.0 - spec.p) / 4.0, 0.0};
        return TwoQubitState::from_matrix(rho);
    }
    case StateKind::Rho3: {
        check_theta();
        check_p();
        const ComplexMatrix pure = projector(psi1(spec.theta));
        const ComplexMatrix rho_theta = partial_trace(pure, Party::A);
        const ComplexMatrix rho = pure * cplx{spec.p, 0.0} +
                                  kron(rho_theta, id2) * cplx{(1.0 - spec.p) / 2.0, 0.0};
        return TwoQubitState::from_matrix(rho);
    }
    case StateKind::Rho4: {
        Ket4 psip{};
        psip[1] = 1.0 / std::sqrt(2.0);
        psip[2] = 1.0 / std::sqrt(2.0);
        const ComplexMatrix rho = (projector(kron_ket(kKet0, kKet0)) +
                                   projector(kron_ket(kKet1, kKet1)) +
                                   projector(kron_ket(kKet0, kKet1)) * cplx{2.0, 0.0} +
                                   projector(psip) * cplx{4.0, 0.0}) *
                                  cplx{1.0 / 8.0, 0.0};
        return TwoQubitState::from_matrix(rho);
    }
    case StateKind::Rho5: {
        const ComplexMatrix rho = (projector(kron_ket(kKet0, kKet0)) +
                                   projector(kron_ket(kKetPlus, kKet1))) *
                                  cplx{0.5, 0.0};
        return TwoQubitState::from_matrix(rho);
    }
    case StateKind::Rho6: {
        const ComplexMatrix rho = (projector(kron_ket(kKet0, kKet0)) +
                                   projector(kron_ket(kKet1, kKet1))) *
                                  cplx{0.5, 0.0};
        return TwoQubitState::from_matrix(rho);
    }
    case StateKind::Rho7: {
        const ComplexMatrix rho = (projector(kron_ket(kKet0, kKet0)) +
                                   projector(kron_ket(kKet1, kKet1)) +
                                   projector(kron_ket(kKetPlus, kKetPlus))) *
                                  cplx{1.0 / 3.0, 0.0};
        return TwoQubitState::from_matrix(rho);
    }
    case StateKind::Rho8: {
        const ComplexMatrix rho = (id4 * cplx{3.0, 0.0} + kron(sigma_z(), id2) +
                                   kron(sigma_x(), sigma_x()) + kron(sigma_y(), sigma_y())) *
                                  cplx{1.0 / 12.0, 0.0};
        return TwoQubitState::from_matrix(rho);
    }
    case StateKind::Custom: {
        if (!spec.custom_matrix) {
            throw Error("custom state spec without a matrix");
        }
        return TwoQubitState::from_matrix(*spec.custom_matrix);
    }
    }
    throw Error("unreachable");
}

// The ten-entry grid of states used throughout tests and reports:
// rho1, rho2(1/2), rho2(1/3), rho2(1/5), rho3, rho4, ..., rho8.
inline std::vector<std::pair<std::string, StateSpec>> registry_specs() {
    return {
        {"rho1", StateSpec::rho1()},
        {"rho2_p12", StateSpec::rho2(0.5)},
        {"rho2_p13", StateSpec::rho2(1.0 / 3.0)},
        {"rho2_p15", StateSpec::rho2(0.2)},
        {"rho3", StateSpec::rho3()},
        {"rho4", StateSpec::rho4()},
        {"rho5", StateSpec::rho5()},
        {"rho6", StateSpec::rho6()},
        {"rho7", StateSpec::rho7()},
        {"rho8", StateSpec::rho8()},
    };
}

// ---------------------------------------------------------------------------
// Fidelity, concurrence, separability
// ---------------------------------------------------------------------------

// F = (Tr sqrt(sqrt(x) y sqrt(x)))^2
inline double fidelity(const TwoQubitState &x, const TwoQubitState &y) {
    const ComplexMatrix sx = matrix_sqrt_psd(x.rho());
    ComplexMatrix inner = sx * y.rho() * sx;
    // Symmetrize round-off so the sqrt sees a clean Hermitian input.
    inner = (inner + inner.adjoint()) * cplx{0.5, 0.0};
    const ComplexMatrix root = matrix_sqrt_psd(inner);
    const double t = root.trace().real();
    return std::min(1.0, t * t);
}

inline double fidelity(const ComplexMatrix &x, const ComplexMatrix &y) {
    const ComplexMatrix sx = matrix_sqrt_psd(x);
    ComplexMatrix inner = sx * y * sx;
    inner = (inner + inner.adjoint()) * cplx{0.5, 0.0};
    const double t = matrix_sqrt_psd(inner).trace().real();
    return std::min(1.0, t * t);
}

// Wootters concurrence via the Hermitian route:
// lambda_i = eigenvalues of sqrt(sqrt(rho) rho_tilde sqrt(rho)).
inline double concurrence(const TwoQubitState &state) {
    const ComplexMatrix yy = kron(sigma_y(), sigma_y());
    const ComplexMatrix rho_tilde = yy * state.rho().conjugate() * yy;
    const ComplexMatrix s = matrix_sqrt_psd(state.rho());
    ComplexMatrix inner = s * rho_tilde * s;
    inner = (inner + inner.adjoint()) * cplx{0.5, 0.0};
    const ComplexMatrix r = matrix_sqrt_psd(inner);
    const HermEig e = hermitian_eig(r);
    const double c = e.values[0] - e.values[1] - e.values[2] - e.values[3];
    return std::max(0.0, c);
}

inline ComplexMatrix partial_transpose_b(const ComplexMatrix &rho) {
    ComplexMatrix r(4);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    r(2 * i + j, 2 * k + l) = rho(2 * i + l, 2 * k + j);
                }
            }
        }
    }
    return r;
}

struct SeparabilityVerdict {
    bool separable = false;
    double min_pt_eigenvalue = 0.0;
};

// PPT is exact for two qubits; transpose taken on party B.
inline SeparabilityVerdict is_separable_ppt(const TwoQubitState &state) {
    const HermEig e = hermitian_eig(partial_transpose_b(state.rho()));
    SeparabilityVerdict v;
    v.min_pt_eigenvalue = e.values.back();
    v.separable = v.min_pt_eigenvalue >= -1e-9;
    return v;
}

// ---------------------------------------------------------------------------
// Entropy and quantum discord (base-2 logarithms throughout)
// ---------------------------------------------------------------------------

inline double von_neumann_entropy(const ComplexMatrix &rho) {
    const HermEig e = hermitian_eig(rho);
    double s = 0.0;
    for (double lam : e.values) {
        if (lam > 1e-15) {
            s -= lam * std::log2(lam);
        }
    }
    return std::max(0.0, s);
}

inline double binary_entropy(double p) {
    if (p <= 1e-15 || p >= 1.0 - 1e-15) {
        return 0.0;
    }
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

namespace detail {

// Average post-measurement entropy of the unmeasured party when the measured
// party is projected along unit direction n.
inline double conditional_entropy_along(const PauliForm &pf, Party measured, const Vec3 &n) {
    const Vec3 &local = measured == Party::A ? pf.a : pf.b;
    double total = 0.0;
    for (double sign : {1.0, -1.0}) {
        const Vec3 e = n * sign;
        const double denom = 1.0 + local.dot(e);
        const double prob = 0.5 * denom;
        if (prob <= 1e-14) {
            continue;  // zero-probability outcome contributes nothing
        }
        Vec3 steered;
        if (measured == Party::A) {
            steered = (pf.b + pf.T.transpose() * e) / denom;
        } else {
            steered = (pf.a + pf.T * e) / denom;
        }
        const double r = std::min(1.0, steered.norm());
        total += prob * binary_entropy(0.5 * (1.0 + r));
    }
    return total;
}

inline Vec3 sphere_direction(double polar, double azimuth) {
    return {std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
            std::cos(polar)};
}

}  // namespace detail

// D = S(rho_measured) - S(rho_AB) + min over projective measurement directions
// of the average steered-state entropy. The minimization runs a Fibonacci
// sphere scan followed by coordinate descent on the spherical angles.
inline double quantum_discord(const TwoQubitState &state, Party measured) {
    const PauliForm &pf = state.pauli();

    double best = std::numeric_limits<double>::infinity();
    double best_polar = 0.0;
    double best_azimuth = 0.0;

    const int grid = 200;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < grid; ++i) {
        const double zc = 1.0 - 2.0 * (i + 0.5) / grid;
        const double polar = std::acos(zc);
        const double azimuth = golden * i;
        const double val = detail::conditional_entropy_along(
            pf, measured, detail::sphere_direction(polar, azimuth));
        if (val < best) {
            best = val;
            best_polar = polar;
            best_azimuth = azimuth;
        }
    }

    double step = 0.2;
    while (step > 1e-6) {
        bool improved = false;
        for (const auto &[dp, da] : std::initializer_list<std::pair<double, double>>{
                 {step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
            const double val = detail::conditional_entropy_along(
                pf, measured, detail::sphere_direction(best_polar + dp, best_azimuth + da));
            if (val < best - 1e-15) {
                best = val;
                best_polar += dp;
                best_azimuth += da;
                improved = true;
            }
        }
        if (!improved) {
            step *= 0.5;
        }
    }

    const ComplexMatrix reduced = partial_trace(state.rho(), measured);
    const double d = von_neumann_entropy(reduced) - von_neumann_entropy(state.rho()) + best;
    return std::max(0.0, d);
}

}  // namespace qse
