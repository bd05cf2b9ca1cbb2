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

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qse {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

enum class Party { A, B };

// ---------------------------------------------------------------------------
// Real 3-vectors and 3x3 matrices (Bloch geometry)
// ---------------------------------------------------------------------------

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double &operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 &operator+=(const Vec3 &o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    Vec3 normalized() const {
        const double n = norm();
        if (n == 0.0) {
            throw Error("cannot normalize zero vector");
        }
        return *this / n;
    }
};

inline Vec3 operator*(double s, const Vec3 &v) { return v * s; }

struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    double &operator()(int r, int c) { return m[static_cast<size_t>(r)][static_cast<size_t>(c)]; }
    double operator()(int r, int c) const {
        return m[static_cast<size_t>(r)][static_cast<size_t>(c)];
    }

    static Mat3 identity() {
        Mat3 e;
        e(0, 0) = e(1, 1) = e(2, 2) = 1.0;
        return e;
    }

    static Mat3 diag(double a, double b, double c) {
        Mat3 d;
        d(0, 0) = a;
        d(1, 1) = b;
        d(2, 2) = c;
        return d;
    }

    // v w^T
    static Mat3 outer(const Vec3 &v, const Vec3 &w) {
        Mat3 o;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                o(i, j) = v[i] * w[j];
            }
        }
        return o;
    }

    Mat3 transpose() const {
        Mat3 t;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                t(i, j) = (*this)(j, i);
            }
        }
        return t;
    }

    Mat3 operator+(const Mat3 &o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                r(i, j) = (*this)(i, j) + o(i, j);
            }
        }
        return r;
    }

    Mat3 operator-(const Mat3 &o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                r(i, j) = (*this)(i, j) - o(i, j);
            }
        }
        return r;
    }

    Mat3 operator*(double s) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                r(i, j) = (*this)(i, j) * s;
            }
        }
        return r;
    }

    Mat3 operator*(const Mat3 &o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) {
                    s += (*this)(i, k) * o(k, j);
                }
                r(i, j) = s;
            }
        }
        return r;
    }

    Vec3 operator*(const Vec3 &v) const {
        Vec3 r;
        for (int i = 0; i < 3; ++i) {
            r[i] = (*this)(i, 0) * v.x + (*this)(i, 1) * v.y + (*this)(i, 2) * v.z;
        }
        return r;
    }

    double trace() const { return (*this)(0, 0) + (*this)(1, 1) + (*this)(2, 2); }

    double max_abs() const {
        double v = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                v = std::max(v, std::abs((*this)(i, j)));
            }
        }
        return v;
    }

    Vec3 column(int j) const { return {(*this)(0, j), (*this)(1, j), (*this)(2, j)}; }

    double determinant() const {
        const Mat3 &a = *this;
        return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
               a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
               a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    }
};

// ---------------------------------------------------------------------------
// Real symmetric Jacobi eigensolver (used for 3x3 orientation matrices and
// the 10x10 quadric normal matrix)
// ---------------------------------------------------------------------------

struct SymEig {
    std::vector<double> values;      // descending
    std::vector<double> vectors;     // column-major n*n, column k <-> values[k]
    int n = 0;

    double vec(int row, int col) const { return vectors[static_cast<size_t>(col * n + row)]; }
};

// Cyclic Jacobi on a dense real symmetric matrix, row-major input.
inline SymEig jacobi_symmetric(std::vector<double> a, int n) {
    std::vector<double> v(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        v[static_cast<size_t>(i * n + i)] = 1.0;
    }
    auto A = [&](int r, int c) -> double & { return a[static_cast<size_t>(r * n + c)]; };
    auto V = [&](int r, int c) -> double & { return v[static_cast<size_t>(r * n + c)]; };

    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            scale = std::max(scale, std::abs(A(i, j)));
        }
    }
    const double tol = 1e-14 * std::max(1.0, scale);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                off += A(p, q) * A(p, q);
            }
        }
        if (std::sqrt(2.0 * off) <= tol) {
            break;
        }
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) <= tol * 1e-3) {
                    continue;
                }
                const double tau = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p);
                    const double akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k);
                    const double aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p);
                    const double vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return A(i, i) > A(j, j); });

    SymEig out;
    out.n = n;
    out.values.resize(static_cast<size_t>(n));
    out.vectors.resize(static_cast<size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        out.values[static_cast<size_t>(k)] = A(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]);
        for (int r = 0; r < n; ++r) {
            out.vectors[static_cast<size_t>(k * n + r)] = V(r, order[static_cast<size_t>(k)]);
        }
    }
    return out;
}

struct SymEig3 {
    std::array<double, 3> values{};  // descending
    Mat3 vectors;                    // columns
};

inline SymEig3 sym_eig3(const Mat3 &m) {
    std::vector<double> a(9);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            a[static_cast<size_t>(i * 3 + j)] = m(i, j);
        }
    }
    const SymEig e = jacobi_symmetric(std::move(a), 3);
    SymEig3 out;
    for (int k = 0; k < 3; ++k) {
        out.values[static_cast<size_t>(k)] = e.values[static_cast<size_t>(k)];
        for (int r = 0; r < 3; ++r) {
            out.vectors(r, k) = e.vec(r, k);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Small dense complex matrices (2x2 and 4x4 density operators)
// ---------------------------------------------------------------------------

class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(int n) : n_(n), d_(static_cast<size_t>(n) * n, cplx{0.0, 0.0}) {
        if (n < 1 || n > 16) {
            throw Error("unsupported matrix dimension " + std::to_string(n));
        }
    }

    static ComplexMatrix identity(int n) {
        ComplexMatrix m(n);
        for (int i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    int dim() const { return n_; }

    cplx &operator()(int r, int c) { return d_[static_cast<size_t>(r * n_ + c)]; }
    const cplx &operator()(int r, int c) const { return d_[static_cast<size_t>(r * n_ + c)]; }

    ComplexMatrix operator+(const ComplexMatrix &o) const {
        check_same(o);
        ComplexMatrix r(n_);
        for (size_t i = 0; i < d_.size(); ++i) {
            r.d_[i] = d_[i] + o.d_[i];
        }
        return r;
    }

    ComplexMatrix operator-(const ComplexMatrix &o) const {
        check_same(o);
        ComplexMatrix r(n_);
        for (size_t i = 0; i < d_.size(); ++i) {
            r.d_[i] = d_[i] - o.d_[i];
        }
        return r;
    }

    ComplexMatrix operator*(const cplx &s) const {
        ComplexMatrix r(n_);
        for (size_t i = 0; i < d_.size(); ++i) {
            r.d_[i] = d_[i] * s;
        }
        return r;
    }

    ComplexMatrix operator*(const ComplexMatrix &o) const {
        check_same(o);
        ComplexMatrix r(n_);
        for (int i = 0; i < n_; ++i) {
            for (int k = 0; k < n_; ++k) {
                const cplx aik = (*this)(i, k);
                if (aik == cplx{0.0, 0.0}) {
                    continue;
                }
                for (int j = 0; j < n_; ++j) {
                    r(i, j) += aik * o(k, j);
                }
            }
        }
        return r;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix r(n_);
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                r(i, j) = std::conj((*this)(j, i));
            }
        }
        return r;
    }

    ComplexMatrix conjugate() const {
        ComplexMatrix r(n_);
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                r(i, j) = std::conj((*this)(i, j));
            }
        }
        return r;
    }

    cplx trace() const {
        cplx t{0.0, 0.0};
        for (int i = 0; i < n_; ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    double hermiticity_defect() const {
        double d = 0.0;
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
            }
        }
        return d;
    }

    double max_abs_diff(const ComplexMatrix &o) const {
        check_same(o);
        double d = 0.0;
        for (size_t i = 0; i < d_.size(); ++i) {
            d = std::max(d, std::abs(d_[i] - o.d_[i]));
        }
        return d;
    }

    bool all_finite() const {
        for (const cplx &v : d_) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                return false;
            }
        }
        return true;
    }

  private:
    void check_same(const ComplexMatrix &o) const {
        if (n_ != o.n_) {
            throw Error("matrix dimension mismatch");
        }
    }

    int n_ = 0;
    std::vector<cplx> d_;
};

inline ComplexMatrix operator*(const cplx &s, const ComplexMatrix &m) { return m * s; }

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    const int na = a.dim();
    const int nb = b.dim();
    ComplexMatrix r(na * nb);
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < na; ++j) {
            for (int k = 0; k < nb; ++k) {
                for (int l = 0; l < nb; ++l) {
                    r(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return r;
}

inline const ComplexMatrix &sigma_x() {
    static const ComplexMatrix m = [] {
        ComplexMatrix s(2);
        s(0, 1) = 1.0;
        s(1, 0) = 1.0;
        return s;
    }();
    return m;
}

inline const ComplexMatrix &sigma_y() {
    static const ComplexMatrix m = [] {
        ComplexMatrix s(2);
        s(0, 1) = cplx{0.0, -1.0};
        s(1, 0) = cplx{0.0, 1.0};
        return s;
    }();
    return m;
}

inline const ComplexMatrix &sigma_z() {
    static const ComplexMatrix m = [] {
        ComplexMatrix s(2);
        s(0, 0) = 1.0;
        s(1, 1) = -1.0;
        return s;
    }();
    return m;
}

inline const ComplexMatrix &pauli(int i) {
    switch (i) {
    case 0:
        return sigma_x();
    case 1:
        return sigma_y();
    default:
        return sigma_z();
    }
}

// rho = (1 + r.sigma)/2
inline ComplexMatrix qubit_from_bloch(const Vec3 &r) {
    ComplexMatrix m(2);
    m(0, 0) = 0.5 * (1.0 + r.z);
    m(1, 1) = 0.5 * (1.0 - r.z);
    m(0, 1) = 0.5 * cplx{r.x, -r.y};
    m(1, 0) = 0.5 * cplx{r.x, r.y};
    return m;
}

inline Vec3 bloch_of_qubit(const ComplexMatrix &rho) {
    if (rho.dim() != 2) {
        throw Error("bloch_of_qubit expects a 2x2 matrix");
    }
    Vec3 r;
    r.x = 2.0 * rho(1, 0).real();
    r.y = 2.0 * rho(1, 0).imag();
    r.z = (rho(0, 0) - rho(1, 1)).real();
    return r;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (complex cyclic Jacobi)
// ---------------------------------------------------------------------------

struct HermEig {
    std::vector<double> values;  // descending
    ComplexMatrix vectors;       // orthonormal columns, column k <-> values[k]
};

inline HermEig hermitian_eig(const ComplexMatrix &m, double herm_tol = 1e-10) {
    const double defect = m.hermiticity_defect();
    if (defect > herm_tol) {
        throw Error("hermitian_eig: input not Hermitian, defect " + std::to_string(defect));
    }
    const int n = m.dim();
    ComplexMatrix a = m;
    // Symmetrize away representable round-off before rotating.
    for (int i = 0; i < n; ++i) {
        a(i, i) = cplx{a(i, i).real(), 0.0};
        for (int j = i + 1; j < n; ++j) {
            const cplx s = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = s;
            a(j, i) = std::conj(s);
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(n);

    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            scale = std::max(scale, std::abs(a(i, j)));
        }
    }
    const double tol = 1e-14 * std::max(1.0, scale);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                off += std::norm(a(p, q));
            }
        }
        if (std::sqrt(2.0 * off) <= tol) {
            break;
        }
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx g = a(p, q);
                const double ag = std::abs(g);
                if (ag <= tol * 1e-3) {
                    continue;
                }
                const cplx phase = g / ag;
                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * ag);
                const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : -1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // Plane unitary U: column p -> c*ep + s*conj(phase)... applied as A <- U^dag A U
                // with U_pp = c, U_pq = -s, U_qp = s*conj(phase), U_qq = c*conj(phase).
                const cplx upq = -s;
                const cplx uqp = s * std::conj(phase);
                const cplx uqq = c * std::conj(phase);
                // Columns: A <- A U
                for (int k = 0; k < n; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = akp * c + akq * uqp;
                    a(k, q) = akp * upq + akq * uqq;
                }
                // Rows: A <- U^dag A
                for (int k = 0; k < n; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = c * apk + std::conj(uqp) * aqk;
                    a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = vkp * c + vkq * uqp;
                    v(k, q) = vkp * upq + vkq * uqq;
                }
            }
        }
    }

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });

    HermEig out;
    out.values.resize(static_cast<size_t>(n));
    out.vectors = ComplexMatrix(n);
    for (int k = 0; k < n; ++k) {
        out.values[static_cast<size_t>(k)] = a(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]).real();
        for (int r = 0; r < n; ++r) {
            out.vectors(r, k) = v(r, order[static_cast<size_t>(k)]);
        }
    }
    return out;
}

// V diag(f(lambda)) V^dag
inline ComplexMatrix apply_spectral(const HermEig &e, const std::vector<double> &f) {
    const int n = e.vectors.dim();
    ComplexMatrix r(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            cplx s{0.0, 0.0};
            for (int k = 0; k < n; ++k) {
                s += e.vectors(i, k) * f[static_cast<size_t>(k)] * std::conj(e.vectors(j, k));
            }
            r(i, j) = s;
        }
    }
    return r;
}

inline ComplexMatrix matrix_sqrt_psd(const ComplexMatrix &m) {
    const HermEig e = hermitian_eig(m);
    std::vector<double> f(e.values.size());
    for (size_t k = 0; k < e.values.size(); ++k) {
        double lam = e.values[k];
        if (lam < -1e-9) {
            throw Error("matrix_sqrt_psd: eigenvalue " + std::to_string(lam) + " below -1e-9");
        }
        f[k] = std::sqrt(std::max(0.0, lam));
    }
    return apply_spectral(e, f);
}

// ---------------------------------------------------------------------------
// Pauli-basis form of a two-qubit state: rho = (1 + a.sigma x 1 + 1 x b.sigma
// + sum_ij T_ij sigma_i x sigma_j) / 4. Qubit A is the left tensor factor and
// the computational basis is ordered |00>,|01>,|10>,|11>.
// ---------------------------------------------------------------------------

struct PauliForm {
    Vec3 a;   // Alice's Bloch vector
    Vec3 b;   // Bob's Bloch vector
    Mat3 T;   // spin correlation matrix
};

inline PauliForm pauli_decompose(const ComplexMatrix &rho) {
    if (rho.dim() != 4) {
        throw Error("pauli_decompose expects a 4x4 matrix");
    }
    const double tr_defect = std::abs(rho.trace() - cplx{1.0, 0.0});
    if (tr_defect > 1e-9) {
        throw Error("pauli_decompose: trace defect " + std::to_string(tr_defect));
    }
    if (rho.hermiticity_defect() > 1e-9) {
        throw Error("pauli_decompose: input not Hermitian");
    }
    const ComplexMatrix id2 = ComplexMatrix::identity(2);
    PauliForm p;
    for (int i = 0; i < 3; ++i) {
        p.a[i] = (rho * kron(pauli(i), id2)).trace().real();
        p.b[i] = (rho * kron(id2, pauli(i))).trace().real();
        for (int j = 0; j < 3; ++j) {
            p.T(i, j) = (rho * kron(pauli(i), pauli(j))).trace().real();
        }
    }
    return p;
}

inline ComplexMatrix pauli_compose(const PauliForm &p) {
    const ComplexMatrix id2 = ComplexMatrix::identity(2);
    ComplexMatrix rho = kron(id2, id2) * cplx{0.25, 0.0};
    for (int i = 0; i < 3; ++i) {
        rho = rho + kron(pauli(i), id2) * cplx{0.25 * p.a[i], 0.0};
        rho = rho + kron(id2, pauli(i)) * cplx{0.25 * p.b[i], 0.0};
        for (int j = 0; j < 3; ++j) {
            rho = rho + kron(pauli(i), pauli(j)) * cplx{0.25 * p.T(i, j), 0.0};
        }
    }
    return rho;
}

inline ComplexMatrix partial_trace(const ComplexMatrix &rho, Party keep) {
    if (rho.dim() != 4) {
        throw Error("partial_trace expects a 4x4 matrix");
    }
    ComplexMatrix r(2);
    if (keep == Party::A) {
        for (int i = 0; i < 2; ++i) {
            for (int k = 0; k < 2; ++k) {
                r(i, k) = rho(2 * i + 0, 2 * k + 0) + rho(2 * i + 1, 2 * k + 1);
            }
        }
    } else {
        for (int j = 0; j < 2; ++j) {
            for (int l = 0; l < 2; ++l) {
                r(j, l) = rho(0 + j, 0 + l) + rho(2 + j, 2 + l);
            }
        }
    }
    return r;
}

}  // namespace qse
