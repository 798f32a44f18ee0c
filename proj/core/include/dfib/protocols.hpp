#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dfib/lattice.hpp"
#include "dfib/state.hpp"

namespace dfib {

enum class ExperimentKind { GroundState, ThetaFusion, TetraFusion, TailedFusion, Braiding, Twist };

struct Experiment {
    ExperimentKind kind = ExperimentKind::ThetaFusion;
    LatticeKind lattice = LatticeKind::Theta;  // ground-state only
    std::uint64_t shots = 0;
    std::uint64_t seed = 42;
    double tolerance = 1e-9;
};

std::string experiment_name(const Experiment& e);
// "theta-fusion", "ground-state:tetrahedron", ...; throws std::invalid_argument
Experiment parse_experiment(const std::string& name);
// one entry per experiment family; ground-state is listed as "ground-state:<lattice>"
const std::vector<std::string>& experiment_names();
std::vector<LatticeKind> ground_state_lattices();

struct ExpectedState {
    std::string stage;
    StateVector state;
    std::string provenance;
};

// Which qubit carries the readout, and how to interpret it.
struct Readout {
    int flag = -1;     // qubit holding the channel information before the filter
    int ancilla = -1;  // qubit flipped by the final CNOT
    std::vector<std::string> flag_labels;  // channel for flag value 0, 1
};

struct ExperimentCircuit {
    Experiment experiment;
    Circuit circuit;
    std::vector<ExpectedState> expected;
    Readout readout;
};

ExperimentCircuit build_experiment(const Experiment& e);

struct StageCheck {
    std::string stage;
    double fidelity = 0.0;
    double max_amplitude_error = 0.0;  // after removing the global phase
    double global_phase = 0.0;
    bool passed = false;
};

struct ChannelCheck {
    std::string label;
    double expected = 0.0;
    double exact = 0.0;
    std::optional<double> sampled;
    double sigma = 0.0;
    bool passed = false;
};

struct ScalarCheck {
    std::string name;
    double expected = 0.0;
    double measured = 0.0;
    double tolerance = 0.0;
    bool informational = false;
    bool passed = false;
};

struct ExperimentReport {
    Experiment experiment;
    std::vector<StageCheck> stages;
    std::vector<ChannelCheck> channels;
    std::vector<ScalarCheck> phases;
    std::vector<ScalarCheck> checks;  // everything else: projectors, flips, magnitudes
    double ancilla_flip_probability = 0.0;
    std::map<std::uint64_t, std::uint64_t> counts;  // flag histogram when shots > 0
    std::vector<std::string> notes;
    bool passed = false;
};

// executes a (possibly replayed) circuit and compares against its expected stages
ExperimentReport run_experiment(const ExperimentCircuit& ec);
ExperimentReport run_experiment(const Experiment& e);
// recomputes the pass flag from the individual checks
bool verify(ExperimentReport& r);

// Smallest tolerance an exact check can honour in double precision.
constexpr double kToleranceFloor = 1e-15;

std::string report_to_json(const ExperimentReport& r);
std::string report_to_text(const ExperimentReport& r);

// circuit interchange format
std::string circuit_to_json(const ExperimentCircuit& ec);
// rebuilds matrices from gate names / F-move legs; throws std::invalid_argument on bad input
ExperimentCircuit circuit_from_json(const std::string& text);

// Superposition of products of tadpole reference vectors. Every term lists
// (tadpole, sector) factors plus fixed bits for the remaining qubits; shared
// tail qubits must agree between factors.
struct TadpoleFactor {
    Tadpole tadpole;
    TadpoleSector sector;
};
struct ConcentricTerm {
    cplx coefficient;
    std::vector<TadpoleFactor> factors;
    std::map<int, int> fixed;
};
StateVector concentric_state(int n_qubits, const std::vector<ConcentricTerm>& terms);

} // namespace dfib
