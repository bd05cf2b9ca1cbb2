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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qse/linalg.hpp"
#include "qse/states.hpp"

using namespace qse;

namespace {

ComplexMatrix random_hermitian(std::mt19937_64 &rng, int n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix m(n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = normal(rng);
        for (int j = i + 1; j < n; ++j) {
            const cplx v{normal(rng), normal(rng)};
            m(i, j) = v;
            m(j, i) = std::conj(v);
        }
    }
    return m;
}

ComplexMatrix random_psd(std::mt19937_64 &rng, int n) {
    const ComplexMatrix h = random_hermitian(rng, n);
    return h * h.adjoint();
}

PauliForm random_valid_form(std::mt19937_64 &rng) {
    // Random density matrix via a random PSD matrix normalized to trace 1.
    ComplexMatrix m = random_psd(rng, 4);
    m = m * (cplx{1.0, 0.0} / m.trace());
    return pauli_decompose(m);
}

}  // namespace

TEST_CASE("hermitian_eig identity and sigma_z") {
    const HermEig e4 = hermitian_eig(ComplexMatrix::identity(4));
    for (double v : e4.values) {
        CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    }

    const HermEig ez = hermitian_eig(sigma_z());
    CHECK(ez.values[0] == doctest::Approx(1.0));
    CHECK(ez.values[1] == doctest::Approx(-1.0));
    CHECK(std::abs(ez.vectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(ez.vectors(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig reconstructs random seeded matrices") {
    std::mt19937_64 rng(12345);
    for (int rep = 0; rep < 20; ++rep) {
        const ComplexMatrix m = random_hermitian(rng, 4);
        const HermEig e = hermitian_eig(m);
        const ComplexMatrix back = apply_spectral(e, e.values);
        CHECK(back.max_abs_diff(m) < 1e-9);
        // V unitary
        const ComplexMatrix vvt = e.vectors * e.vectors.adjoint();
        CHECK(vvt.max_abs_diff(ComplexMatrix::identity(4)) < 1e-10);
        // descending
        for (size_t k = 1; k < e.values.size(); ++k) {
            CHECK(e.values[k - 1] >= e.values[k] - 1e-12);
        }
    }
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
    ComplexMatrix m(2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_eig(m), Error);
}

TEST_CASE("eigenvalues sum to trace for density matrices") {
    for (const auto &[name, spec] : registry_specs()) {
        const TwoQubitState s = make_state(spec);
        const HermEig e = hermitian_eig(s.rho());
        double sum = 0.0;
        for (double v : e.values) {
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("matrix_sqrt_psd basics") {
    const ComplexMatrix id4 = ComplexMatrix::identity(4);
    CHECK(matrix_sqrt_psd(id4).max_abs_diff(id4) < 1e-12);

    ComplexMatrix d(4);
    d(0, 0) = 4.0;
    d(1, 1) = 1.0;
    const ComplexMatrix r = matrix_sqrt_psd(d);
    CHECK(r(0, 0).real() == doctest::Approx(2.0));
    CHECK(r(1, 1).real() == doctest::Approx(1.0));
    CHECK(std::abs(r(2, 2)) < 1e-12);
}

TEST_CASE("matrix_sqrt_psd squares back on random PSD input") {
    std::mt19937_64 rng(777);
    for (int rep = 0; rep < 10; ++rep) {
        const ComplexMatrix m = random_psd(rng, 4);
        const ComplexMatrix r = matrix_sqrt_psd(m);
        CHECK((r * r).max_abs_diff(m) < 1e-8 * std::max(1.0, std::abs(m.trace())));
    }
}

TEST_CASE("matrix_sqrt_psd rejects indefinite input") {
    ComplexMatrix m = ComplexMatrix::identity(2);
    m(1, 1) = -0.5;
    CHECK_THROWS_AS(matrix_sqrt_psd(m), Error);
}

TEST_CASE("pauli_decompose on Bell and registry states") {
    // |Phi+> = (|00> + |11>)/sqrt(2): a = b = 0, T = diag(1,-1,1)
    ComplexMatrix bell(4);
    bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
    const PauliForm pb = pauli_decompose(bell);
    CHECK(pb.a.norm() < 1e-12);
    CHECK(pb.b.norm() < 1e-12);
    CHECK((pb.T - Mat3::diag(1.0, -1.0, 1.0)).max_abs() < 1e-12);

    const PauliForm p6 = make_state(StateSpec::rho6()).pauli();
    CHECK(p6.a.norm() < 1e-12);
    CHECK(p6.b.norm() < 1e-12);
    CHECK((p6.T - Mat3::diag(0.0, 0.0, 1.0)).max_abs() < 1e-12);

    const PauliForm p8 = make_state(StateSpec::rho8()).pauli();
    CHECK((p8.a - Vec3{0.0, 0.0, 1.0 / 3.0}).norm() < 1e-12);
    CHECK(p8.b.norm() < 1e-12);
    CHECK((p8.T - Mat3::diag(1.0 / 3.0, 1.0 / 3.0, 0.0)).max_abs() < 1e-12);
}

TEST_CASE("pauli_decompose rejects trace defects") {
    ComplexMatrix m = ComplexMatrix::identity(4) * cplx{0.3, 0.0};
    CHECK_THROWS_AS(pauli_decompose(m), Error);
}

TEST_CASE("pauli_compose basics and Werner form") {
    PauliForm zero;
    const ComplexMatrix mixed = pauli_compose(zero);
    CHECK(mixed.max_abs_diff(ComplexMatrix::identity(4) * cplx{0.25, 0.0}) < 1e-15);

    for (double p : {0.5, 1.0 / 3.0, 0.2}) {
        PauliForm w;
        w.T = Mat3::diag(-p, -p, -p);
        const ComplexMatrix direct = make_state(StateSpec::rho2(p)).rho();
        CHECK(pauli_compose(w).max_abs_diff(direct) < 1e-12);
    }
}

TEST_CASE("pauli round-trip on registry states and random forms") {
    for (const auto &[name, spec] : registry_specs()) {
        const TwoQubitState s = make_state(spec);
        const ComplexMatrix back = pauli_compose(s.pauli());
        CHECK(back.max_abs_diff(s.rho()) < 1e-12);
    }

    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 1000; ++rep) {
        const PauliForm f = random_valid_form(rng);
        const PauliForm g = pauli_decompose(pauli_compose(f));
        CHECK((f.a - g.a).norm() < 1e-12);
        CHECK((f.b - g.b).norm() < 1e-12);
        CHECK((f.T - g.T).max_abs() < 1e-12);
    }
}

TEST_CASE("partial_trace basics") {
    // |0><0| x |+><+|
    ComplexMatrix plus(2);
    plus(0, 0) = plus(0, 1) = plus(1, 0) = plus(1, 1) = 0.5;
    ComplexMatrix zero(2);
    zero(0, 0) = 1.0;
    const ComplexMatrix prod = kron(zero, plus);
    CHECK(partial_trace(prod, Party::A).max_abs_diff(zero) < 1e-15);
    CHECK(partial_trace(prod, Party::B).max_abs_diff(plus) < 1e-15);

    ComplexMatrix bell(4);
    bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
    const ComplexMatrix half = ComplexMatrix::identity(2) * cplx{0.5, 0.0};
    CHECK(partial_trace(bell, Party::A).max_abs_diff(half) < 1e-15);
    CHECK(partial_trace(bell, Party::B).max_abs_diff(half) < 1e-15);
}

TEST_CASE("partial_trace Bloch vectors match the Pauli form") {
    const TwoQubitState r4 = make_state(StateSpec::rho4());
    CHECK((bloch_of_qubit(partial_trace(r4.rho(), Party::A)) - Vec3{0.0, 0.0, 0.25}).norm() <
          1e-12);
    CHECK((bloch_of_qubit(partial_trace(r4.rho(), Party::B)) - Vec3{0.0, 0.0, -0.25}).norm() <
          1e-12);

    for (const auto &[name, spec] : registry_specs()) {
        const TwoQubitState s = make_state(spec);
        const Vec3 ra = bloch_of_qubit(partial_trace(s.rho(), Party::A));
        const Vec3 rb = bloch_of_qubit(partial_trace(s.rho(), Party::B));
        CHECK((ra - s.pauli().a).norm() < 1e-10);
        CHECK((rb - s.pauli().b).norm() < 1e-10);
    }
}
