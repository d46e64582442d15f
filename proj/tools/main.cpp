#include <cstring>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_support.hpp"
#include "trimol/chirality.hpp"
#include "trimol/control.hpp"
#include "trimol/core.hpp"
#include "trimol/dynamics.hpp"
#include "trimol/optimize.hpp"
#include "trimol/protocols.hpp"
#include "trimol/spectral.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace trimol;
using cli::ConfigError;
using cli::RunConfig;
using cli::Table;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNotFound = 3;
constexpr int kExitNumerical = 4;

const std::set<std::string> kCommonKeys = {"out", "format", "threads", "config"};

std::set<std::string> with_common(std::set<std::string> keys) {
    keys.insert(kCommonKeys.begin(), kCommonKeys.end());
    return keys;
}

void write_table(const RunConfig& cfg, const Table& table) {
    const std::string format = cfg.get_string("format", "csv");
    cli::OutputFile out(cfg.get_string("out", "-"));
    if (format == "csv") {
        cli::write_table_csv(out.stream(), table);
    } else if (format == "json") {
        json doc;
        doc["columns"] = table.columns;
        auto rows = json::array();
        for (const auto& row : table.rows) {
            auto r = json::array();
            for (const double v : row) {
                if (std::isnan(v)) {
                    r.push_back(nullptr);
                } else {
                    r.push_back(v);
                }
            }
            rows.push_back(std::move(r));
        }
        doc["rows"] = std::move(rows);
        out.stream() << doc.dump(2) << "\n";
    } else {
        throw ConfigError("format must be csv or json");
    }
}

void write_json(const RunConfig& cfg, const json& doc) {
    cli::OutputFile out(cfg.get_string("out", "-"));
    out.stream() << doc.dump(2) << "\n";
}

SystemParams params_from(const RunConfig& cfg) {
    return SystemParams{cfg.get_double("gamma0", 1.0), cfg.get_double("J", 0.1),
                        cfg.get_double("delta", 0.0), cfg.get_double("phi", 0.0)};
}

MolecularAmplitude state_from(const std::string& name) {
    if (name == "e1") return MolecularAmplitude{Vec3(1, 0, 0)};
    if (name == "e2") return MolecularAmplitude{Vec3(0, 1, 0)};
    if (name == "e3" || name == "minusL") return MolecularAmplitude{Vec3(0, 0, 1)};
    if (name == "0L") return embed_logical(LogicalState{1.0, 0.0});
    if (name == "1L") return embed_logical(LogicalState{0.0, 1.0});
    if (name == "plusL") {
        return embed_logical(LogicalState{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
    }
    if (name == "antisym") return MolecularAmplitude{antisymmetric_vector()};
    throw ConfigError("unknown state: " + name +
                      " (expected e1|e2|e3|0L|1L|plusL|minusL|antisym)");
}

int cmd_spectrum(const RunConfig& cfg) {
    cfg.require_known(with_common({"gamma0", "J", "delta", "phi", "dark_tol"}));
    const SystemParams p = params_from(cfg);
    const double dark_tol = cfg.get_double("dark_tol", 1e-9 * p.gamma0);

    const Spectrum s = numeric_spectrum(build_hamiltonian(p));
    const auto modes = classify_modes(s, dark_tol);
    const auto labels = label_modes(s, p);
    const Complex gamma_sq = exceptional_distance(p);

    Table table;
    table.columns = {"mode",    "re_eps",      "im_eps",      "gamma_r",
                     "is_dark", "re_gamma_sq", "im_gamma_sq", "condition"};
    cli::OutputFile out(cfg.get_string("out", "-"));
    const std::string format = cfg.get_string("format", "csv");
    if (format == "csv") {
        auto& os = out.stream();
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            os << (i ? "," : "") << table.columns[i];
        }
        os << "\n";
        for (int k = 0; k < 3; ++k) {
            os << mode_label_name(labels[static_cast<std::size_t>(k)]) << ","
               << cli::format_double(modes[static_cast<std::size_t>(k)].omega) << ","
               << cli::format_double(-modes[static_cast<std::size_t>(k)].gamma) << ","
               << cli::format_double(modes[static_cast<std::size_t>(k)].gamma) << ","
               << (modes[static_cast<std::size_t>(k)].is_dark ? 1 : 0) << ","
               << cli::format_double(gamma_sq.real()) << ","
               << cli::format_double(gamma_sq.imag()) << ","
               << cli::format_double(s.condition) << "\n";
        }
    } else if (format == "json") {
        json doc;
        doc["gamma_sq"] = {{"re", gamma_sq.real()}, {"im", gamma_sq.imag()}};
        doc["condition"] = s.condition;
        auto arr = json::array();
        for (int k = 0; k < 3; ++k) {
            const auto& m = modes[static_cast<std::size_t>(k)];
            arr.push_back({{"mode", mode_label_name(labels[static_cast<std::size_t>(k)])},
                           {"re_eps", m.omega},
                           {"im_eps", -m.gamma},
                           {"gamma_r", m.gamma},
                           {"is_dark", m.is_dark}});
        }
        doc["modes"] = std::move(arr);
        out.stream() << doc.dump(2) << "\n";
    } else {
        throw ConfigError("format must be csv or json");
    }
    return kExitOk;
}

int cmd_evolve(const RunConfig& cfg) {
    cfg.require_known(with_common({"gamma0", "J", "delta", "phi", "state", "t_end", "tol",
                                   "samples", "drive_amplitude", "drive_frequency",
                                   "drive_phase"}));
    const SystemParams p = params_from(cfg);
    const MolecularAmplitude c0 = state_from(cfg.get_string("state", "e3"));
    const double t_end = cfg.get_double("t_end", 10.0);
    const double tol = cfg.get_double("tol", 1e-10);
    const int samples = cfg.get_int("samples", 1001);
    if (samples < 2) throw ConfigError("samples must be >= 2");

    const double amp = cfg.get_double("drive_amplitude", 0.0);
    const double freq = cfg.get_double("drive_frequency", 0.0);
    const double phase = cfg.get_double("drive_phase", 0.0);
    const double base_delta = p.Delta;
    const auto delta_of_t = [=](double t) {
        return base_delta + amp * std::cos(freq * t + phase);
    };

    const Trajectory traj = evolve_ode(c0, p, delta_of_t, t_end, tol);

    Table table;
    table.columns = {"t",     "re_c1", "im_c1", "re_c2", "im_c2", "re_c3", "im_c3",
                     "re_aL", "im_aL", "re_aR", "im_aR", "norm"};
    const std::size_t n = traj.size();
    for (int i = 0; i < samples; ++i) {
        const std::size_t idx =
            (n == 1) ? 0
                     : static_cast<std::size_t>(i) * (n - 1) / static_cast<std::size_t>(samples - 1);
        const Vec3& c = traj.states[idx];
        table.rows.push_back({traj.times[idx], c(0).real(), c(0).imag(), c(1).real(),
                              c(1).imag(), c(2).real(), c(2).imag(),
                              traj.alpha_left[idx].real(), traj.alpha_left[idx].imag(),
                              traj.alpha_right[idx].real(), traj.alpha_right[idx].imag(),
                              c.norm()});
    }
    write_table(cfg, table);
    return kExitOk;
}

int cmd_chirality_map(const RunConfig& cfg) {
    cfg.require_known(with_common({"gamma0", "J", "delta_min", "delta_max", "delta_count",
                                   "phi_min", "phi_max", "phi_count"}));
    const double gamma0 = cfg.get_double("gamma0", 1.0);
    const double J = cfg.get_double("J", 0.1);
    const auto deltas = cli::linspace(cfg.get_double("delta_min", -0.5),
                                      cfg.get_double("delta_max", 0.5),
                                      cfg.get_int("delta_count", 101));
    const auto phis =
        cli::linspace(cfg.get_double("phi_min", 0.0), cfg.get_double("phi_max", 2.0 * kPi),
                      cfg.get_int("phi_count", 101));

    const ChiralityMap map =
        chirality_map(J, deltas, phis, cfg.get_int("threads", 0), gamma0);
    if (map.failure_count > 0) {
        std::cerr << "chirality-map: " << map.failure_count
                  << " grid points reported no radiating content (NaN)\n";
    }

    Table table;
    table.columns = {"delta", "phi", "eta_max"};
    for (std::size_t pi = 0; pi < map.phi.size(); ++pi) {
        for (std::size_t di = 0; di < map.delta.size(); ++di) {
            table.rows.push_back({map.delta[di], map.phi[pi], map.at(pi, di)});
        }
    }
    write_table(cfg, table);
    return kExitOk;
}

int cmd_wavepackets(const RunConfig& cfg) {
    cfg.require_known(with_common(
        {"gamma0", "J", "delta", "phi", "theta", "state", "t_end", "tol", "samples"}));
    const SystemParams p = params_from(cfg);
    const double theta = cfg.get_double("theta", 0.0);
    const std::string state = cfg.get_string("state", "0L");
    if (state != "0L" && state != "1L") {
        throw ConfigError("wavepackets: state must be 0L or 1L");
    }
    const double t_end = cfg.get_double("t_end", 40.0);
    const double tol = cfg.get_double("tol", 1e-10);
    const int samples = cfg.get_int("samples", 1001);
    if (samples < 2) throw ConfigError("samples must be >= 2");

    const LogicalState l =
        (state == "0L") ? LogicalState{1.0, 0.0} : LogicalState{0.0, 1.0};
    const MolecularAmplitude c0{local_phase_gate(2, theta) * embed_logical(l).c};
    const Trajectory traj = evolve_ode(c0, p, t_end, tol);

    Table table;
    table.columns = {"t", "re_aL", "im_aL", "re_aR", "im_aR", "abs_aL", "abs_aR"};
    const std::size_t n = traj.size();
    for (int i = 0; i < samples; ++i) {
        const std::size_t idx =
            (n == 1) ? 0
                     : static_cast<std::size_t>(i) * (n - 1) / static_cast<std::size_t>(samples - 1);
        const Complex al = traj.alpha_left[idx];
        const Complex ar = traj.alpha_right[idx];
        table.rows.push_back({traj.times[idx], al.real(), al.imag(), ar.real(), ar.imag(),
                              std::abs(al), std::abs(ar)});
    }
    write_table(cfg, table);
    return kExitOk;
}

int cmd_error_map(const RunConfig& cfg) {
    cfg.require_known(with_common({"J", "delta", "phi", "theta", "dtheta_min", "dtheta_max",
                                   "dtheta_count", "ddelta_min", "ddelta_max",
                                   "ddelta_count"}));
    const double J = cfg.get_double("J", 0.1);
    Protocol2Point base;
    base.Delta = cfg.get_double("delta", 0.0);
    base.phi = cfg.get_double("phi", 0.0);
    base.theta = cfg.get_double("theta", 0.0);
    const auto dtheta = cli::linspace(cfg.get_double("dtheta_min", -0.05 * kPi),
                                      cfg.get_double("dtheta_max", 0.05 * kPi),
                                      cfg.get_int("dtheta_count", 21));
    const auto ddelta =
        cli::linspace(cfg.get_double("ddelta_min", -0.01), cfg.get_double("ddelta_max", 0.01),
                      cfg.get_int("ddelta_count", 21));

    const ErrorMap map = robustness_map(J, base, dtheta, ddelta, cfg.get_int("threads", 0));
    if (map.failure_count > 0) {
        std::cerr << "error-map: " << map.failure_count << " grid points failed (NaN)\n";
    }

    Table table;
    table.columns = {"dtheta", "ddelta", "max_error"};
    for (std::size_t ti = 0; ti < map.dtheta.size(); ++ti) {
        for (std::size_t di = 0; di < map.ddelta.size(); ++di) {
            table.rows.push_back({map.dtheta[ti], map.ddelta[di], map.at(ti, di)});
        }
    }
    write_table(cfg, table);
    return kExitOk;
}

json search_result_json(const SearchResult& result) {
    json doc;
    doc["point"] = result.point;
    doc["objective"] = result.objective;
    doc["iterations"] = result.iterations;
    doc["converged"] = result.converged;
    return doc;
}

int cmd_optimize(const RunConfig& cfg) {
    cfg.require_known(with_common({"target", "J", "delta_min", "delta_max", "phi_min",
                                   "phi_max", "grid", "delta", "phi", "theta"}));
    const std::string target = cfg.get_string("target", "chirality");
    const double J = cfg.get_double("J", 0.1);
    const int threads = cfg.get_int("threads", 0);

    json doc;
    doc["target"] = target;
    doc["J"] = J;
    if (target == "chirality") {
        ParameterBox box;
        box.delta_min = cfg.get_double("delta_min", -0.5);
        box.delta_max = cfg.get_double("delta_max", 0.5);
        box.phi_min = cfg.get_double("phi_min", 0.0);
        box.phi_max = cfg.get_double("phi_max", kPi);
        try {
            const SearchResult result =
                find_perfect_chirality(J, box, cfg.get_int("grid", 200), threads);
            doc["result"] = search_result_json(result);
            doc["result"]["delta"] = result.point[0];
            doc["result"]["phi"] = result.point[1];
            const UPlusAngles angles = derive_u_plus_angles(J, result.point[0], result.point[1]);
            doc["angles"] = {{"theta1", angles.theta1},
                             {"theta2", angles.theta2},
                             {"alpha", angles.alpha}};
            const auto ops =
                current_operators_for(SystemParams{1.0, J, result.point[0], result.point[1]});
            doc["eta_max"] = max_chirality(ops).eta_max;
        } catch (const NotFoundError& e) {
            doc["error"] = e.what();
            doc["best"] = search_result_json(e.best);
            write_json(cfg, doc);
            std::cerr << e.what() << "\n";
            return kExitNotFound;
        }
        write_json(cfg, doc);
        return kExitOk;
    }
    if (target == "protocol2") {
        try {
            Protocol2Point start = default_protocol2_start(J);
            start.Delta = cfg.get_double("delta", start.Delta);
            start.phi = cfg.get_double("phi", start.phi);
            start.theta = cfg.get_double("theta", start.theta);
            const SearchResult result = optimize_protocol2(J, start);
            doc["result"] = search_result_json(result);
            doc["result"]["delta"] = result.point[0];
            doc["result"]["phi"] = result.point[1];
            doc["result"]["theta"] = result.point[2];
            const ProtocolReport report = protocol2_report(
                J, Protocol2Point{result.point[0], result.point[1], result.point[2]});
            doc["report"] = {{"eta0", report.eta0},
                             {"eta1", report.eta1},
                             {"e0", report.e0},
                             {"e1", report.e1},
                             {"bloch_max_error", report.bloch_max_error},
                             {"coherent_max_error", report.coherent_max_error},
                             {"normalization_deficit", report.normalization_deficit}};
        } catch (const NotFoundError& e) {
            doc["error"] = e.what();
            doc["best"] = search_result_json(e.best);
            write_json(cfg, doc);
            std::cerr << e.what() << "\n";
            return kExitNotFound;
        }
        write_json(cfg, doc);
        return kExitOk;
    }
    throw ConfigError("optimize: target must be chirality or protocol2");
}

Mat2 named_gate(const std::string& name) {
    const Complex i{0.0, 1.0};
    Mat2 m;
    if (name == "identity") {
        return Mat2::Identity();
    }
    if (name == "x") {
        return sigma_x_logical();
    }
    if (name == "y") {
        return sigma_y_logical();
    }
    if (name == "z") {
        return sigma_z_logical();
    }
    if (name == "s") {
        m << 1.0, 0.0, 0.0, i;
        return m;
    }
    if (name == "hadamard") {
        m << 1.0, 1.0, 1.0, -1.0;
        return (sigma_x_logical() + sigma_z_logical()) / std::sqrt(2.0);
    }
    throw ConfigError("unknown gate: " + name + " (expected identity|x|y|z|s|hadamard)");
}

json pulse_json(const PulseSequence& seq) {
    auto arr = json::array();
    for (const auto& pulse : seq.pulses) {
        if (pulse.kind == Pulse::Kind::FreeEvolution) {
            arr.push_back({{"kind", "free_evolution"}, {"duration", pulse.duration}});
        } else {
            arr.push_back({{"kind", "resonant_drive"},
                           {"duration", pulse.duration},
                           {"amplitude", pulse.drive.amplitude},
                           {"frequency", pulse.drive.drive_frequency},
                           {"phase", pulse.drive.drive_phase}});
        }
    }
    return arr;
}

int cmd_gate_calibrate(const RunConfig& cfg) {
    cfg.require_known(with_common({"gate", "J", "amplitude_cap"}));
    const std::string gate = cfg.get_string("gate", "hadamard");
    const double J = cfg.get_double("J", 0.1);
    const double cap = cfg.get_double("amplitude_cap", 0.1 * J);

    const Mat2 target = named_gate(gate);
    const GateReport report = calibrate_gate(target, J, cap);

    json doc;
    doc["gate"] = gate;
    doc["J"] = J;
    doc["amplitude_cap"] = cap;
    doc["fidelity"] = report.fidelity;
    doc["total_duration"] = report.drive.total_duration();
    doc["pulses"] = pulse_json(report.drive);

    if (gate == "hadamard") {
        // constant-detuning realization: scan the evolution time of the
        // sigma_z + sigma_x generator and mark both candidate durations
        const LogicalHamiltonian gen = logical_hamiltonian(J, -2.0 * std::sqrt(2.0) * J);
        const auto fidelity_at = [&](double t) {
            return gate_fidelity(target, logical_propagator(gen, t));
        };
        const double t_max = 2.0 * kPi / J;
        const int n_scan = 4000;
        double best_t = t_max / n_scan;
        double best_f = fidelity_at(best_t);
        for (int k = 2; k <= n_scan; ++k) {
            const double t = t_max * static_cast<double>(k) / n_scan;
            const double f = fidelity_at(t);
            if (f > best_f) {
                best_f = f;
                best_t = t;
            }
        }
        double lo = best_t - t_max / n_scan;
        double hi = best_t + t_max / n_scan;
        for (int it = 0; it < 80; ++it) {
            const double m1 = lo + (hi - lo) / 3.0;
            const double m2 = hi - (hi - lo) / 3.0;
            if (fidelity_at(m1) < fidelity_at(m2)) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        best_t = (lo + hi) / 2.0;
        best_f = fidelity_at(best_t);

        const double quarter = kPi / (4.0 * J);
        const double half = kPi / (2.0 * J);
        json scan;
        scan["best_duration"] = best_t;
        scan["best_fidelity"] = best_f;
        scan["candidate_quarter"] = {{"duration", quarter}, {"fidelity", fidelity_at(quarter)}};
        scan["candidate_half"] = {{"duration", half}, {"fidelity", fidelity_at(half)}};
        scan["matches_quarter"] = std::abs(best_t - quarter) < 1e-3 / J;
        scan["matches_half"] = std::abs(best_t - half) < 1e-3 / J;
        doc["constant_detuning_scan"] = std::move(scan);
    }
    write_json(cfg, doc);
    return kExitOk;
}

void print_usage(std::ostream& os) {
    os << "usage: trimol <command> [--config PATH] [--key value ...]\n"
          "commands:\n"
          "  spectrum        eigenvalues, decay rates, dark flags at one parameter point\n"
          "  evolve          time evolution of a molecular state (optional detuning drive)\n"
          "  chirality-map   maximum chirality over a (delta, phi) grid\n"
          "  wavepackets     emitted field amplitudes of a prepared logical state\n"
          "  error-map       protocol-2 measurement error over (dtheta, ddelta) deviations\n"
          "  optimize        search for the perfect-chirality point or the protocol-2 optimum\n"
          "  gate-calibrate  synthesize a logical gate and report fidelity\n"
          "common keys: out (path or -), format (csv|json), threads (0 = all cores)\n";
}

int dispatch(const std::string& command, const RunConfig& cfg) {
    if (command == "spectrum") return cmd_spectrum(cfg);
    if (command == "evolve") return cmd_evolve(cfg);
    if (command == "chirality-map") return cmd_chirality_map(cfg);
    if (command == "wavepackets") return cmd_wavepackets(cfg);
    if (command == "error-map") return cmd_error_map(cfg);
    if (command == "optimize") return cmd_optimize(cfg);
    if (command == "gate-calibrate") return cmd_gate_calibrate(cfg);
    throw ConfigError("unknown command: " + command);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2 || std::strcmp(argv[1], "--help") == 0 || std::strcmp(argv[1], "-h") == 0) {
        print_usage(argc < 2 ? std::cerr : std::cout);
        return argc < 2 ? kExitConfig : kExitOk;
    }
    const std::string command = argv[1];

    try {
        RunConfig cfg;
        // first pass: config file, so command-line overrides win
        for (int i = 2; i + 1 < argc; i += 2) {
            if (std::strcmp(argv[i], "--config") == 0) {
                cfg.load_file(argv[i + 1]);
            }
        }
        for (int i = 2; i < argc; i += 2) {
            const std::string key = argv[i];
            if (key.rfind("--", 0) != 0 || key.size() <= 2) {
                throw ConfigError("expected --key value pairs, got: " + key);
            }
            if (i + 1 >= argc) {
                throw ConfigError("key " + key + " is missing a value");
            }
            if (key == "--config") continue;
            cfg.set(key.substr(2), argv[i + 1]);
        }
        return dispatch(command, cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NotFoundError& e) {
        std::cerr << e.what() << "\n";
        return kExitNotFound;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
