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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qse/io.hpp"
#include "qse/reconstruct.hpp"
#include "qse/states.hpp"
#include "qse/steering.hpp"
#include "qse/tomography.hpp"
#include "qse/version.hpp"

namespace {

using json = nlohmann::json;
using qse::io::num;
using qse::io::to_json;

// Usage problems (unknown state names, bad flag combinations) exit with 2;
// numeric and validation failures exit with 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    std::string state = "rho4";
    std::optional<double> theta;
    std::optional<double> p;
    std::string party = "B_given_A";
    uint64_t seed = 1;
    std::string out;
};

qse::Steering parse_party(const std::string &party) {
    if (party == "B_given_A") {
        return qse::Steering::BGivenA;
    }
    if (party == "A_given_B") {
        return qse::Steering::AGivenB;
    }
    throw UsageError("unknown party '" + party + "' (use B_given_A or A_given_B)");
}

// A state is either a registry name (rho1..rho8, parameters optional) or a
// path to a JSON file holding a 4x4 complex matrix.
qse::StateSpec resolve_spec(const CommonOpts &o) {
    if (o.state == "rho1") {
        return o.theta ? qse::StateSpec::rho1(*o.theta) : qse::StateSpec::rho1();
    }
    if (o.state == "rho2") {
        return qse::StateSpec::rho2(o.p.value_or(0.5));
    }
    if (o.state == "rho3") {
        return (o.theta || o.p)
                   ? qse::StateSpec::rho3(o.theta.value_or(0.3), o.p.value_or(0.55))
                   : qse::StateSpec::rho3();
    }
    if (o.state == "rho4") {
        return qse::StateSpec::rho4();
    }
    if (o.state == "rho5") {
        return qse::StateSpec::rho5();
    }
    if (o.state == "rho6") {
        return qse::StateSpec::rho6();
    }
    if (o.state == "rho7") {
        return qse::StateSpec::rho7();
    }
    if (o.state == "rho8") {
        return qse::StateSpec::rho8();
    }
    if (std::filesystem::exists(o.state)) {
        std::ifstream in(o.state);
        json j;
        in >> j;
        if (j.is_object() && j.contains("rho")) {
            j = j["rho"];
        }
        return qse::StateSpec::custom(qse::io::complex_matrix_from_json(j));
    }
    throw UsageError("unknown state '" + o.state + "' (registry name or JSON file path)");
}

json config_json(const CommonOpts &o) {
    json cfg;
    cfg["state"] = o.state;
    if (o.theta) {
        cfg["theta"] = num(*o.theta);
    }
    if (o.p) {
        cfg["p"] = num(*o.p);
    }
    cfg["party"] = o.party;
    cfg["seed"] = o.seed;
    return cfg;
}

json envelope(const std::string &command, const CommonOpts &o) {
    json j;
    j["version"] = qse::kVersion;
    j["command"] = command;
    j["config"] = config_json(o);
    j["seed"] = o.seed;
    return j;
}

void emit(const std::string &out_path, const std::string &content) {
    if (out_path.empty()) {
        std::cout << content;
        if (content.empty() || content.back() != '\n') {
            std::cout << '\n';
        }
    } else {
        qse::io::write_file_atomic(out_path, content);
    }
}

void emit_json(const std::string &out_path, const json &j) { emit(out_path, j.dump(2)); }

json state_show(const CommonOpts &o) {
    const qse::StateSpec spec = resolve_spec(o);
    const qse::TwoQubitState s = qse::make_state(spec);
    const qse::StateDiagnostics d = qse::validate(s);
    json j = envelope("state show", o);
    j["rho"] = to_json(s.rho());
    j["pauli"] = {{"a", to_json(s.pauli().a)},
                  {"b", to_json(s.pauli().b)},
                  {"T", to_json(s.pauli().T)}};
    j["diagnostics"] = {{"hermiticity_defect", num(d.hermiticity_defect)},
                        {"trace_defect", num(d.trace_defect)},
                        {"min_eigenvalue", num(d.min_eigenvalue)},
                        {"is_valid", d.is_valid}};
    j["concurrence"] = num(qse::concurrence(s));
    j["separable"] = qse::is_separable_ppt(s).separable;
    return j;
}

json qse_compute(const CommonOpts &o) {
    const qse::TwoQubitState s = qse::make_state(resolve_spec(o));
    const qse::Steering which = parse_party(o.party);
    const qse::SteeringEllipsoid el = qse::steering_ellipsoid(s, which);
    const qse::ShapeReport report = qse::classify(el);
    json j = envelope("qse compute", o);
    j["ellipsoid"] = to_json(el);
    j["classification"] = to_json(report);
    j[to_string(report.measure_kind)] = num(report.measure_value);
    return j;
}

void qse_sample(const CommonOpts &o, int n, const std::string &format) {
    const qse::TwoQubitState s = qse::make_state(resolve_spec(o));
    const qse::Steering which = parse_party(o.party);
    const auto points = qse::sample_surface(s, which, n, o.seed);
    if (format == "csv") {
        emit(o.out, qse::io::points_to_csv(points));
        return;
    }
    if (format == "obj") {
        emit(o.out, qse::io::ellipsoid_to_obj(qse::steering_ellipsoid(s, which)));
        return;
    }
    if (format != "json") {
        throw UsageError("unknown format '" + format + "' (json, csv, obj)");
    }
    json j = envelope("qse sample", o);
    j["n"] = n;
    json pts = json::array();
    for (const auto &p : points) {
        pts.push_back({{"bloch", to_json(p.bloch)},
                       {"probability", num(p.probability)},
                       {"direction", to_json(p.generator.e)}});
    }
    j["points"] = pts;
    emit_json(o.out, j);
}

json qse_fit(const CommonOpts &o, uint64_t rotation_seed, long events,
             const std::string &points_path) {
    json j = envelope("qse fit", o);
    qse::FitResult fit;
    if (!points_path.empty()) {
        std::ifstream in(points_path);
        if (!in) {
            throw UsageError("cannot open points file '" + points_path + "'");
        }
        fit = qse::fit_points(qse::io::points_from_csv(in));
        j["config"]["points"] = points_path;
    } else {
        const qse::TwoQubitState s = qse::make_state(resolve_spec(o));
        const qse::Steering which = parse_party(o.party);
        const qse::Mat3 rot = rotation_seed == 0 ? qse::Mat3::identity()
                                                 : qse::random_rotation(rotation_seed);
        const qse::DirectionSet dirs = qse::icosahedron_vertices(rot);
        std::vector<qse::SteeredPoint> steered;
        for (size_t k = 0; k < dirs.directions.size(); ++k) {
            qse::SteeredPoint p = qse::steered_state(
                s, qse::PovmElement::projector(dirs.directions[k]), which);
            if (events > 0) {
                p.bloch = qse::simulate_qubit_tomography(
                    p.bloch, events, qse::splitmix64(o.seed + 17 * k + 3));
            }
            steered.push_back(p);
        }
        fit = qse::fit_steered_points(steered);
        j["config"]["rotation_seed"] = rotation_seed;
        j["config"]["events"] = events;
    }
    j["fit"] = to_json(fit);
    return j;
}

json simulate_tomography(const CommonOpts &o, long events) {
    const qse::TwoQubitState s = qse::make_state(resolve_spec(o));
    const auto counts =
        qse::simulate_counts(s.rho(), qse::pauli_settings_two_qubit(), events, o.seed);
    const qse::ReconstructionResult r = qse::reconstruct_state(counts, s.rho());
    json j = envelope("simulate tomography", o);
    j["config"]["events"] = events;
    json recs = json::array();
    for (const auto &rec : counts) {
        recs.push_back({{"axis_a", to_json(rec.setting.axis_a)},
                        {"axis_b", to_json(rec.setting.axis_b)},
                        {"counts", rec.counts},
                        {"total", rec.total}});
    }
    j["counts"] = recs;
    j["rho_hat"] = to_json(r.rho_hat);
    j["fidelity"] = num(r.fidelity_to_target.value_or(0.0));
    j["min_raw_eigenvalue"] = num(r.min_raw_eigenvalue);
    return j;
}

json zoo_entry(const std::string &name, const qse::StateSpec &spec) {
    const qse::TwoQubitState s = qse::make_state(spec);
    json e;
    e["name"] = name;
    e["concurrence"] = num(qse::concurrence(s));
    const auto sep = qse::is_separable_ppt(s);
    e["separable"] = sep.separable;
    e["min_pt_eigenvalue"] = num(sep.min_pt_eigenvalue);
    for (qse::Steering which : {qse::Steering::BGivenA, qse::Steering::AGivenB}) {
        const qse::SteeringEllipsoid el = qse::steering_ellipsoid(s, which);
        json side;
        side["ellipsoid"] = to_json(el);
        side["classification"] = to_json(qse::classify(el));
        side["zero_discord_radial"] = qse::zero_discord_geometric(el);
        const qse::Decomposition dec = qse::canonical_decomposition(s, which);
        const qse::CompletenessVerdict v = qse::check_complete_steering(s, which, dec);
        side["complete_steering"] = v.complete;
        if (!v.complete) {
            side["infeasibility"] = v.infeasibility_note;
        }
        // Green points: the steered endpoints of the canonical decomposition.
        json greens = json::array();
        for (const auto &part : dec.parts) {
            greens.push_back({{"weight", num(part.weight)}, {"bloch", to_json(part.bloch)}});
        }
        side["green_points"] = greens;
        e[to_string(which)] = side;
    }
    const std::string type = sep.separable ? "separable" : "entangled";
    const bool complete = e["B_given_A"]["complete_steering"].get<bool>();
    e["type"] = type + (complete ? " & complete" : " & incomplete");
    return e;
}

json report_zoo(const CommonOpts &o) {
    json j = envelope("report zoo", o);
    json states = json::array();
    for (const auto &[name, spec] : qse::registry_specs()) {
        states.push_back(zoo_entry(name, spec));
    }
    j["states"] = states;
    return j;
}

json report_tables(const CommonOpts &o, int samples, long events) {
    json j = envelope("report tables", o);
    j["config"]["samples"] = samples;
    j["config"]["events"] = events;

    // Werner sphere radii and centers through the full tomography pipeline.
    json werner = json::array();
    const std::vector<std::pair<std::string, double>> ps = {
        {"1/2", 0.5}, {"1/3", 1.0 / 3.0}, {"1/5", 0.2}};
    for (const auto &[label, p] : ps) {
        const qse::TwoQubitState s = qse::make_state(qse::StateSpec::rho2(p));
        auto pipeline = [&](uint64_t seed) {
            const auto counts = qse::simulate_counts(
                s.rho(), qse::pauli_settings_two_qubit(), events, seed);
            const auto rec = qse::reconstruct_state(counts);
            const qse::SteeringEllipsoid el = qse::steering_ellipsoid(
                qse::TwoQubitState::from_matrix(rec.rho_hat), qse::Steering::BGivenA);
            return std::vector<double>{el.center.norm(), el.semiaxes[0], el.semiaxes[1],
                                       el.semiaxes[2]};
        };
        const qse::ExperimentReport rep = qse::monte_carlo_errorbars(
            pipeline, {"center_norm", "s1", "s2", "s3"}, samples, o.seed);
        json row;
        row["p"] = label;
        row["theory"] = {{"center_norm", 0.0}, {"semiaxes", {num(p), num(p), num(p)}}};
        for (size_t i = 0; i < rep.labels.size(); ++i) {
            row[rep.labels[i]] = {{"mean", num(rep.means[i])}, {"std", num(rep.stds[i])}};
        }
        werner.push_back(row);
    }
    j["werner_spheres"] = werner;

    // Shape measures from rotated icosahedron reconstructions under noise.
    struct Row {
        std::string name;
        qse::StateSpec spec;
        qse::Steering which;
        double theory;
        std::string kind;
    };
    const std::vector<Row> rows = {
        {"rho4", qse::StateSpec::rho4(), qse::Steering::BGivenA, 112.0 * M_PI / 675.0,
         "volume"},
        {"rho6", qse::StateSpec::rho6(), qse::Steering::BGivenA, 2.0, "length"},
        {"rho8", qse::StateSpec::rho8(), qse::Steering::BGivenA, M_PI / 8.0, "area"},
        {"rho8", qse::StateSpec::rho8(), qse::Steering::AGivenB, M_PI / 9.0, "area"},
    };
    json measures = json::array();
    for (const Row &row : rows) {
        const qse::TwoQubitState s = qse::make_state(row.spec);
        const qse::RobustnessStats stats = qse::robustness_trial(
            s, row.which, samples, qse::TomographyNoise{events}, o.seed);
        json m;
        m["state"] = row.name;
        m["party"] = to_string(row.which);
        m["measure_kind"] = row.kind;
        m["theory"] = num(row.theory);
        m["mean"] = num(stats.measure_mean);
        m["std"] = num(stats.measure_std);
        measures.push_back(m);
    }
    j["shape_measures"] = measures;
    return j;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"quantum steering ellipsoid toolkit"};
    app.require_subcommand(1);

    CommonOpts o;
    int n = 1000;
    long events = 50000;
    int samples = 50;
    uint64_t rotation_seed = 0;
    std::string format = "json";
    std::string points_path;

    auto add_common = [&](CLI::App *cmd, bool with_party = true) {
        cmd->add_option("--state", o.state, "registry state name or JSON matrix file");
        cmd->add_option("--theta", [&o](const std::vector<std::string> &v) {
            o.theta = std::stod(v.front());
            return true;
        }, "theta parameter (radians)");
        cmd->add_option("--p", [&o](const std::vector<std::string> &v) {
            o.p = std::stod(v.front());
            return true;
        }, "probability parameter");
        if (with_party) {
            cmd->add_option("--party", o.party, "B_given_A or A_given_B");
        }
        cmd->add_option("--seed", o.seed, "random seed (echoed in outputs)");
        cmd->add_option("--out", o.out, "output file (atomic write); stdout if omitted");
    };

    CLI::App *state = app.add_subcommand("state", "state registry access");
    CLI::App *state_show_cmd = state->add_subcommand("show", "matrix, Pauli form, diagnostics");
    add_common(state_show_cmd, false);

    CLI::App *ell = app.add_subcommand("qse", "steering ellipsoid operations");
    CLI::App *compute = ell->add_subcommand("compute", "analytic ellipsoid and shape");
    add_common(compute);
    CLI::App *sample = ell->add_subcommand("sample", "steered surface points");
    add_common(sample);
    sample->add_option("--n", n, "number of points");
    sample->add_option("--format", format, "json, csv, or obj");
    CLI::App *fit = ell->add_subcommand("fit", "icosahedron or point-cloud reconstruction");
    add_common(fit);
    fit->add_option("--rotation-seed", rotation_seed, "icosahedron rotation seed (0 = none)");
    fit->add_option("--events", events, "per-point tomography events (0 = noiseless)")
        ->default_val(0);
    fit->add_option("--points", points_path, "CSV point cloud to fit instead of a state");

    CLI::App *simulate = app.add_subcommand("simulate", "measurement-chain simulation");
    CLI::App *tomo = simulate->add_subcommand("tomography", "counts, reconstruction, fidelity");
    add_common(tomo, false);
    tomo->add_option("--events", events, "events per setting");

    CLI::App *report = app.add_subcommand("report", "aggregate reports");
    CLI::App *zoo = report->add_subcommand("zoo", "full registry grid");
    add_common(zoo, false);
    CLI::App *tables = report->add_subcommand("tables", "Monte Carlo measure tables");
    add_common(tables, false);
    tables->add_option("--samples", samples, "Monte Carlo samples");
    tables->add_option("--events", events, "events per setting");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        if (state_show_cmd->parsed()) {
            emit_json(o.out, state_show(o));
        } else if (compute->parsed()) {
            emit_json(o.out, qse_compute(o));
        } else if (sample->parsed()) {
            qse_sample(o, n, format);
        } else if (fit->parsed()) {
            emit_json(o.out, qse_fit(o, rotation_seed, events, points_path));
        } else if (tomo->parsed()) {
            emit_json(o.out, simulate_tomography(o, events));
        } else if (zoo->parsed()) {
            emit_json(o.out, report_zoo(o));
        } else if (tables->parsed()) {
            emit_json(o.out, report_tables(o, samples, events));
        } else {
            std::cerr << app.help() << '\n';
            return 2;
        }
    } catch (const UsageError &e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const qse::Error &e) {
        json diag;
        diag["version"] = qse::kVersion;
        diag["error"] = e.what();
        std::cerr << diag.dump(2) << '\n';
        return 3;
    } catch (const std::exception &e) {
        json diag;
        diag["version"] = qse::kVersion;
        diag["error"] = e.what();
        std::cerr << diag.dump(2) << '\n';
        return 3;
    }
    return 0;
}
