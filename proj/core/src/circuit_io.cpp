#include <fmt/format.h>

#include <stdexcept>

#include "dfib/gates.hpp"
#include "dfib/protocols.hpp"
#include "json.hpp"

namespace dfib {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json amps_json(const StateVector& s) {
    json a = json::array();
    for (std::size_t i = 0; i < s.size(); ++i) a.push_back({s[i].real(), s[i].imag()});
    return a;
}

json experiment_json(const Experiment& e) {
    return {{"name", experiment_name(e)}, {"shots", e.shots}, {"seed", e.seed}, {"tolerance", e.tolerance}};
}

template <class T>
T need(const json& j, const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing field: ") + key);
    return j.at(key).get<T>();
}

} // namespace

std::string circuit_to_json(const ExperimentCircuit& ec) {
    json j;
    j["version"] = kFormatVersion;
    j["experiment"] = experiment_name(ec.experiment);
    j["qubits"] = ec.circuit.n_qubits;
    j["shots"] = ec.experiment.shots;
    j["seed"] = ec.experiment.seed;
    j["tolerance"] = ec.experiment.tolerance;
    j["readout"] = {{"flag", ec.readout.flag}, {"ancilla", ec.readout.ancilla}, {"labels", ec.readout.flag_labels}};
    json ops = json::array();
    for (const auto& op : ec.circuit.ops) {
        json o{{"gate", op.gate},         {"variant", op.variant},
               {"targets", op.targets},   {"controls", op.controls},
               {"control_values", op.control_values}, {"stage", op.stage}};
        if (!op.legs.empty()) o["legs"] = op.legs;
        if (!op.executed) o["executed"] = false;
        if (!op.note.empty()) o["note"] = op.note;
        ops.push_back(std::move(o));
    }
    j["ops"] = ops;
    json st = json::array();
    for (const auto& x : ec.expected)
        st.push_back({{"stage", x.stage}, {"provenance", x.provenance}, {"amplitudes", amps_json(x.state)}});
    j["expected_stages"] = st;
    return j.dump(2);
}

ExperimentCircuit circuit_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("circuit JSON: ") + e.what());
    }
    try {
        if (need<int>(j, "version") != kFormatVersion) throw std::invalid_argument("unsupported circuit version");
        ExperimentCircuit ec;
        ec.experiment = parse_experiment(need<std::string>(j, "experiment"));
        ec.experiment.shots = j.value("shots", std::uint64_t{0});
        ec.experiment.seed = j.value("seed", std::uint64_t{42});
        ec.experiment.tolerance = j.value("tolerance", 1e-9);
        ec.circuit.n_qubits = need<int>(j, "qubits");
        if (ec.circuit.n_qubits < 1 || ec.circuit.n_qubits > kMaxQubits) throw std::invalid_argument("bad qubit count");
        if (j.contains("readout")) {
            const auto& r = j["readout"];
            ec.readout.flag = r.value("flag", -1);
            ec.readout.ancilla = r.value("ancilla", -1);
            ec.readout.flag_labels = r.value("labels", std::vector<std::string>{});
        }
        for (const auto& o : need<json>(j, "ops")) {
            CircuitOp op;
            op.gate = need<std::string>(o, "gate");
            op.variant = o.value("variant", std::string{});
            op.targets = need<std::vector<int>>(o, "targets");
            op.controls = o.value("controls", std::vector<int>{});
            op.control_values = o.value("control_values", std::vector<int>(op.controls.size(), 1));
            op.stage = o.value("stage", std::string{});
            op.executed = o.value("executed", true);
            op.note = o.value("note", std::string{});
            if (op.gate == "fmove") {
                auto legs = need<std::vector<int>>(o, "legs");
                if (legs.size() != 4 || op.targets.empty()) throw std::invalid_argument("fmove needs four legs");
                FMoveSpec spec = make_fmove_spec(op.targets[0], {legs[0], legs[1], legs[2], legs[3]});
                if (spec.wires() != op.targets) throw std::invalid_argument("fmove targets disagree with legs");
                if (!op.variant.empty() && parse_fmove_variant(op.variant) != spec.variant)
                    throw std::invalid_argument("fmove variant disagrees with legs");
                op.legs = legs;
                op.variant = to_string(spec.variant);
                op.matrix = fmove_unitary(spec);
            } else {
                op.matrix = named_gate(op.gate, op.variant);
            }
            validate_op(op, ec.circuit.n_qubits);
            ec.circuit.ops.push_back(std::move(op));
        }
        for (const auto& s : j.value("expected_stages", json::array())) {
            std::vector<cplx> a;
            for (const auto& p : need<json>(s, "amplitudes")) a.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
            ec.expected.push_back({need<std::string>(s, "stage"), StateVector(ec.circuit.n_qubits, std::move(a)),
                                   s.value("provenance", std::string{})});
        }
        return ec;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("circuit JSON: ") + e.what());
    }
}

std::string report_to_json(const ExperimentReport& r) {
    json j;
    j["version"] = kFormatVersion;
    j["experiment"] = experiment_json(r.experiment);
    j["passed"] = r.passed;
    json st = json::array();
    for (const auto& s : r.stages)
        st.push_back({{"stage", s.stage},
                      {"fidelity", s.fidelity},
                      {"max_amplitude_error", s.max_amplitude_error},
                      {"global_phase", s.global_phase},
                      {"passed", s.passed}});
    j["stages"] = st;
    json ch = json::array();
    for (const auto& c : r.channels) {
        json x{{"label", c.label}, {"expected", c.expected}, {"exact", c.exact}, {"passed", c.passed}};
        if (c.sampled) {
            x["sampled"] = *c.sampled;
            x["sigma"] = c.sigma;
        }
        ch.push_back(std::move(x));
    }
    j["channels"] = ch;
    auto scalars = [](const std::vector<ScalarCheck>& v) {
        json a = json::array();
        for (const auto& c : v) {
            json x{{"name", c.name},
                   {"expected", c.expected},
                   {"measured", c.measured},
                   {"tolerance", c.tolerance},
                   {"passed", c.passed}};
            if (c.informational) x["informational"] = true;
            a.push_back(std::move(x));
        }
        return a;
    };
    j["phases"] = scalars(r.phases);
    j["checks"] = scalars(r.checks);
    j["ancilla_flip_probability"] = r.ancilla_flip_probability;
    json counts = json::object();
    for (auto [k, v] : r.counts) counts[std::to_string(k)] = v;
    j["counts"] = counts;
    j["notes"] = r.notes;
    return j.dump(2);
}

std::string report_to_text(const ExperimentReport& r) {
    std::string out;
    const auto& e = r.experiment;
    out += fmt::format("experiment {}  shots {}  seed {}  tolerance {}\n", experiment_name(e), e.shots, e.seed,
                       e.tolerance);
    for (const auto& s : r.stages)
        out += fmt::format("  stage {:<8} fidelity {}  max_amplitude_error {}  global_phase {}  {}\n", s.stage,
                           s.fidelity, s.max_amplitude_error, s.global_phase, s.passed ? "ok" : "FAIL");
    for (const auto& c : r.channels) {
        out += fmt::format("  channel {:<10} expected {}  exact {}", c.label, c.expected, c.exact);
        if (c.sampled) out += fmt::format("  sampled {}  sigma {}", *c.sampled, c.sigma);
        out += c.passed ? "  ok\n" : "  FAIL\n";
    }
    for (const auto& p : r.phases)
        out += fmt::format("  phase {}  expected {}  measured {}  {}\n", p.name, p.expected, p.measured,
                           p.passed ? "ok" : "FAIL");
    for (const auto& c : r.checks)
        out += fmt::format("  check {}  expected {}  measured {}  {}\n", c.name, c.expected, c.measured,
                           c.informational ? "info" : (c.passed ? "ok" : "FAIL"));
    out += fmt::format("  ancilla_flip_probability {}\n", r.ancilla_flip_probability);
    for (auto [k, v] : r.counts) out += fmt::format("  count {} {}\n", k, v);
    for (const auto& n : r.notes) out += "  note: " + n + "\n";
    out += fmt::format("result {}\n", r.passed ? "PASS" : "FAIL");
    return out;
}

} // namespace dfib
