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
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qse/linalg.hpp"
#include "qse/states.hpp"
#include "qse/steering.hpp"

namespace qse {

// ---------------------------------------------------------------------------
// Measurement settings and counts
// ---------------------------------------------------------------------------

struct MeasurementSetting {
    enum class Scope { SingleQubit, TwoQubit };

    Scope scope = Scope::SingleQubit;
    Vec3 axis_a;  // projective +/-1 outcomes along this direction
    Vec3 axis_b;  // second qubit, two-qubit scope only
};

inline Vec3 cardinal_axis(int i) {
    return {i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0, i == 2 ? 1.0 : 0.0};
}

inline std::vector<MeasurementSetting> pauli_settings_single_qubit() {
    std::vector<MeasurementSetting> s;
    for (int i = 0; i < 3; ++i) {
        s.push_back({MeasurementSetting::Scope::SingleQubit, cardinal_axis(i), {}});
    }
    return s;
}

inline std::vector<MeasurementSetting> pauli_settings_two_qubit() {
    std::vector<MeasurementSetting> s;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            s.push_back({MeasurementSetting::Scope::TwoQubit, cardinal_axis(i), cardinal_axis(j)});
        }
    }
    return s;
}

struct CountsRecord {
    MeasurementSetting setting;
    // Single-qubit outcomes ordered (+,-); two-qubit (++, +-, -+, --).
    std::vector<long> counts;
    long total = 0;
};

namespace detail {

inline std::vector<long> draw_multinomial(std::mt19937_64 &rng, long total,
                                          std::vector<double> probs) {
    double norm = 0.0;
    for (double &p : probs) {
        p = std::max(0.0, p);
        norm += p;
    }
    std::vector<long> counts(probs.size(), 0);
    long remaining = total;
    double mass = norm;
    for (size_t k = 0; k + 1 < probs.size() && remaining > 0; ++k) {
        const double frac = mass > 0.0 ? std::clamp(probs[k] / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<long> bin(remaining, frac);
        const long c = bin(rng);
        counts[k] = c;
        remaining -= c;
        mass -= probs[k];
    }
    counts.back() = remaining;
    return counts;
}

inline std::vector<double> born_probabilities(const ComplexMatrix &rho,
                                              const MeasurementSetting &s) {
    if (s.scope == MeasurementSetting::Scope::SingleQubit) {
        if (rho.dim() != 2) {
            throw Error("single-qubit setting applied to a non-qubit state");
        }
        const Vec3 r = bloch_of_qubit(rho);
        const double up = 0.5 * (1.0 + r.dot(s.axis_a));
        return {up, 1.0 - up};
    }
    if (rho.dim() != 4) {
        throw Error("two-qubit setting applied to a non-two-qubit state");
    }
    const PauliForm pf = pauli_decompose(rho);
    std::vector<double> probs;
    for (double sa : {1.0, -1.0}) {
        for (double sb : {1.0, -1.0}) {
            const double p = 0.25 * (1.0 + sa * pf.a.dot(s.axis_a) + sb * pf.b.dot(s.axis_b) +
                                     sa * sb * s.axis_a.dot(pf.T * s.axis_b));
            probs.push_back(p);
        }
    }
    return probs;
}

}  // namespace detail

// Finite-count projective measurement simulation: outcomes drawn multinomially
// from the Born probabilities, a fixed number of events per setting.
inline std::vector<CountsRecord> simulate_counts(const ComplexMatrix &rho,
                                                 const std::vector<MeasurementSetting> &settings,
                                                 long events_per_setting, uint64_t seed) {
    if (events_per_setting < 1) {
        throw Error("events_per_setting must be >= 1");
    }
    std::mt19937_64 rng = seeded_engine(seed);
    std::vector<CountsRecord> records;
    records.reserve(settings.size());
    for (const MeasurementSetting &s : settings) {
        CountsRecord rec;
        rec.setting = s;
        rec.total = events_per_setting;
        rec.counts = detail::draw_multinomial(rng, events_per_setting,
                                              detail::born_probabilities(rho, s));
        records.push_back(std::move(rec));
    }
    return records;
}

// ---------------------------------------------------------------------------
// Linear-inversion reconstruction with PSD projection
// ---------------------------------------------------------------------------

struct ReconstructionResult {
    ComplexMatrix rho_hat;
    std::optional<double> fidelity_to_target;
    double min_raw_eigenvalue = 0.0;  // before clipping
};

namespace detail {

inline int axis_index(const Vec3 &v) {
    for (int i = 0; i < 3; ++i) {
        if ((v - cardinal_axis(i)).norm() < 1e-9) {
            return i;
        }
    }
    return -1;
}

inline ComplexMatrix clip_to_density(const ComplexMatrix &raw, double &min_eig) {
    ComplexMatrix herm = (raw + raw.adjoint()) * cplx{0.5, 0.0};
    const HermEig e = hermitian_eig(herm);
    min_eig = e.values.back();
    std::vector<double> clipped(e.values.size());
    double norm = 0.0;
    for (size_t k = 0; k < e.values.size(); ++k) {
        clipped[k] = std::max(0.0, e.values[k]);
        norm += clipped[k];
    }
    if (norm <= 0.0) {
        throw Error("reconstruction collapsed to the zero matrix");
    }
    for (double &v : clipped) {
        v /= norm;
    }
    return apply_spectral(e, clipped);
}

}  // namespace detail

inline ReconstructionResult reconstruct_state(const std::vector<CountsRecord> &counts,
                                              std::optional<ComplexMatrix> target = {}) {
    if (counts.empty()) {
        throw Error("no counts to reconstruct from");
    }
    const auto scope = counts.front().setting.scope;
    ReconstructionResult out;

    if (scope == MeasurementSetting::Scope::SingleQubit) {
        std::array<bool, 3> seen{};
        Vec3 r;
        for (const CountsRecord &rec : counts) {
            const int i = detail::axis_index(rec.setting.axis_a);
            if (i < 0 || rec.counts.size() != 2) {
                throw Error("single-qubit reconstruction expects x/y/z settings");
            }
            seen[static_cast<size_t>(i)] = true;
            r[i] = static_cast<double>(rec.counts[0] - rec.counts[1]) /
                   static_cast<double>(rec.total);
        }
        if (!(seen[0] && seen[1] && seen[2])) {
            throw Error("settings do not span the single-qubit Pauli basis");
        }
        out.rho_hat = detail::clip_to_density(qubit_from_bloch(r), out.min_raw_eigenvalue);
    } else {
        std::array<std::array<bool, 3>, 3> seen{};
        PauliForm pf;
        std::array<std::array<double, 3>, 2> local_sum{};  // [party][axis]
        std::array<std::array<int, 3>, 2> local_n{};
        for (const CountsRecord &rec : counts) {
            const int i = detail::axis_index(rec.setting.axis_a);
            const int j = detail::axis_index(rec.setting.axis_b);
            if (i < 0 || j < 0 || rec.counts.size() != 4) {
                throw Error("two-qubit reconstruction expects Pauli-pair settings");
            }
            seen[static_cast<size_t>(i)][static_cast<size_t>(j)] = true;
            const double n = static_cast<double>(rec.total);
            const double fpp = rec.counts[0] / n;
            const double fpm = rec.counts[1] / n;
            const double fmp = rec.counts[2] / n;
            const double fmm = rec.counts[3] / n;
            pf.T(i, j) = fpp - fpm - fmp + fmm;
            local_sum[0][static_cast<size_t>(i)] += fpp + fpm - fmp - fmm;
            local_n[0][static_cast<size_t>(i)] += 1;
            local_sum[1][static_cast<size_t>(j)] += fpp - fpm + fmp - fmm;
            local_n[1][static_cast<size_t>(j)] += 1;
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (!seen[static_cast<size_t>(i)][static_cast<size_t>(j)]) {
                    throw Error("settings do not span the two-qubit Pauli basis");
                }
            }
            pf.a[i] = local_sum[0][static_cast<size_t>(i)] / local_n[0][static_cast<size_t>(i)];
            pf.b[i] = local_sum[1][static_cast<size_t>(i)] / local_n[1][static_cast<size_t>(i)];
        }
        out.rho_hat = detail::clip_to_density(pauli_compose(pf), out.min_raw_eigenvalue);
    }

    if (target) {
        out.fidelity_to_target = fidelity(*target, out.rho_hat);
    }
    return out;
}

// Convenience: tomograph a single-qubit Bloch vector at a given event budget.
inline Vec3 simulate_qubit_tomography(const Vec3 &bloch, long events_per_setting, uint64_t seed) {
    const auto counts =
        simulate_counts(qubit_from_bloch(bloch), pauli_settings_single_qubit(),
                        events_per_setting, seed);
    return bloch_of_qubit(reconstruct_state(counts).rho_hat);
}

// ---------------------------------------------------------------------------
// Monte Carlo error bars
// ---------------------------------------------------------------------------

struct ExperimentReport {
    std::vector<std::string> labels;
    std::vector<double> means;
    std::vector<double> stds;   // sample standard deviation
    int samples = 0;
    std::vector<std::vector<double>> per_sample;  // [sample][quantity]
};

// Runs the pipeline with independent derived seeds and aggregates mean and
// standard deviation per scalar output (stable two-pass computation).
inline ExperimentReport monte_carlo_errorbars(
    const std::function<std::vector<double>(uint64_t)> &pipeline,
    std::vector<std::string> labels, int samples, uint64_t seed) {
    if (samples < 2) {
        throw Error("monte_carlo_errorbars needs at least 2 samples");
    }
    ExperimentReport rep;
    rep.labels = std::move(labels);
    rep.samples = samples;
    for (int k = 0; k < samples; ++k) {
        rep.per_sample.push_back(pipeline(splitmix64(seed) + static_cast<uint64_t>(k)));
        if (rep.per_sample.back().size() != rep.labels.size()) {
            throw Error("pipeline output size does not match labels");
        }
    }
    const size_t q = rep.labels.size();
    rep.means.assign(q, 0.0);
    rep.stds.assign(q, 0.0);
    for (const auto &row : rep.per_sample) {
        for (size_t i = 0; i < q; ++i) {
            rep.means[i] += row[i];
        }
    }
    for (size_t i = 0; i < q; ++i) {
        rep.means[i] /= samples;
    }
    for (const auto &row : rep.per_sample) {
        for (size_t i = 0; i < q; ++i) {
            const double d = row[i] - rep.means[i];
            rep.stds[i] += d * d;
        }
    }
    for (size_t i = 0; i < q; ++i) {
        rep.stds[i] = std::sqrt(rep.stds[i] / (samples - 1));
    }
    return rep;
}

}  // namespace qse
