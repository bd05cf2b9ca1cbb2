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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qse/linalg.hpp"
#include "qse/reconstruct.hpp"
#include "qse/steering.hpp"

namespace qse::io {

using json = nlohmann::json;

// JSON numbers are rounded to 12 significant digits before serialization so
// that equal runs produce byte-identical files.
inline double round12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline json num(double v) { return json(round12(v)); }

inline json to_json(const Vec3 &v) { return json::array({num(v.x), num(v.y), num(v.z)}); }

inline json to_json(const Mat3 &m) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) {
        rows.push_back(json::array({num(m(i, 0)), num(m(i, 1)), num(m(i, 2))}));
    }
    return rows;
}

// Complex matrix as nested arrays of [re, im] pairs, basis |00>,|01>,|10>,|11>.
inline json to_json(const ComplexMatrix &m) {
    json rows = json::array();
    for (int i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.dim(); ++j) {
            row.push_back(json::array({num(m(i, j).real()), num(m(i, j).imag())}));
        }
        rows.push_back(row);
    }
    return rows;
}

inline ComplexMatrix complex_matrix_from_json(const json &j) {
    if (!j.is_array() || j.size() != 4) {
        throw Error("custom state must be a 4x4 nested array of [re, im] pairs");
    }
    ComplexMatrix m(4);
    for (int i = 0; i < 4; ++i) {
        const json &row = j.at(static_cast<size_t>(i));
        if (!row.is_array() || row.size() != 4) {
            throw Error("custom state row " + std::to_string(i) + " is not length 4");
        }
        for (int k = 0; k < 4; ++k) {
            const json &cell = row.at(static_cast<size_t>(k));
            if (!cell.is_array() || cell.size() != 2) {
                throw Error("custom state entries must be [re, im] pairs");
            }
            m(i, k) = cplx{cell.at(0).get<double>(), cell.at(1).get<double>()};
        }
    }
    return m;
}

inline json to_json(const SteeringEllipsoid &el) {
    json j;
    j["party"] = to_string(el.party);
    j["center"] = to_json(el.center);
    j["orientation"] = to_json(el.orientation);
    j["semiaxes"] = json::array({num(el.semiaxes[0]), num(el.semiaxes[1]), num(el.semiaxes[2])});
    j["axes"] = to_json(el.axes);
    j["rank"] = el.rank;
    return j;
}

inline json to_json(const ShapeReport &r) {
    json j;
    j["shape"] = to_string(r.shape);
    j["measure_kind"] = to_string(r.measure_kind);
    j["measure_value"] = num(r.measure_value);
    return j;
}

inline json to_json(const FitResult &r) {
    json j;
    j["shape"] = to_string(r.shape);
    j["center"] = to_json(r.center);
    j["semiaxes"] = json::array({num(r.semiaxes[0]), num(r.semiaxes[1]), num(r.semiaxes[2])});
    j["axes"] = to_json(r.axes);
    j["measure_kind"] = to_string(r.measure_kind);
    j["measure"] = num(r.measure);
    j["residual_rms"] = num(r.residual_rms);
    return j;
}

// ---------------------------------------------------------------------------
// Point cloud CSV: columns x,y,z,probability at full (round-trip) precision
// ---------------------------------------------------------------------------

inline std::string points_to_csv(const std::vector<SteeredPoint> &points) {
    std::ostringstream out;
    out << "x,y,z,probability\n";
    char buf[160];
    for (const SteeredPoint &p : points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", p.bloch.x, p.bloch.y,
                      p.bloch.z, p.probability);
        out << buf;
    }
    return out.str();
}

inline std::vector<Vec3> points_from_csv(std::istream &in) {
    std::vector<Vec3> pts;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (first) {
            first = false;
            if (line.rfind("x,", 0) == 0) {
                continue;  // header
            }
        }
        Vec3 v;
        double prob = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &v.x, &v.y, &v.z, &prob) < 3) {
            throw Error("malformed CSV point line: " + line);
        }
        pts.push_back(v);
    }
    return pts;
}

// Triangulated ellipsoid surface as a Wavefront OBJ mesh.
inline std::string ellipsoid_to_obj(const SteeringEllipsoid &el, int slices = 32, int stacks = 16) {
    std::ostringstream out;
    out << "# steering ellipsoid mesh\n";
    char buf[128];
    for (int i = 0; i <= stacks; ++i) {
        const double v = M_PI * i / stacks;
        for (int j = 0; j < slices; ++j) {
            const double u = 2.0 * M_PI * j / slices;
            const Vec3 unit{std::sin(v) * std::cos(u), std::sin(v) * std::sin(u), std::cos(v)};
            Vec3 p = el.center;
            for (int k = 0; k < 3; ++k) {
                p += el.axes.column(k) * (el.semiaxes[static_cast<size_t>(k)] * unit[k]);
            }
            std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", p.x, p.y, p.z);
            out << buf;
        }
    }
    auto vid = [&](int i, int j) { return i * slices + (j % slices) + 1; };
    for (int i = 0; i < stacks; ++i) {
        for (int j = 0; j < slices; ++j) {
            out << "f " << vid(i, j) << ' ' << vid(i + 1, j) << ' ' << vid(i + 1, j + 1) << '\n';
            out << "f " << vid(i, j) << ' ' << vid(i + 1, j + 1) << ' ' << vid(i, j + 1) << '\n';
        }
    }
    return out.str();
}

// Write-to-temp then rename.
inline void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open " + tmp.string() + " for writing");
        }
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace qse::io
