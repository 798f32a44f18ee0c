#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dfib/anyon.hpp"

namespace dfib {

constexpr int kMaxQubits = 24;
constexpr double kCollapseThreshold = 1e-14;

// Dense row-major square matrix acting on a register of log2(dim) qubits.
// The first target qubit of an op is the most significant bit of the row index.
struct GateMatrix {
    std::size_t dim = 0;
    std::vector<cplx> m;

    GateMatrix() = default;
    explicit GateMatrix(std::size_t d) : dim(d), m(d * d, 0.0) {}
    GateMatrix(std::size_t d, std::vector<cplx> entries);

    static GateMatrix identity(std::size_t d);

    cplx& operator()(std::size_t r, std::size_t c) { return m[r * dim + c]; }
    cplx operator()(std::size_t r, std::size_t c) const { return m[r * dim + c]; }
    int qubits() const;

    GateMatrix operator*(const GateMatrix& o) const;
    GateMatrix adjoint() const;
    GateMatrix conjugate() const;
};

double max_abs_diff(const GateMatrix& a, const GateMatrix& b);
bool check_unitary(const GateMatrix& g, double tol);

struct CircuitOp {
    std::string gate;     // name from the gate library, or "fmove"
    std::string variant;  // gate variant ("conjugate", F-move kind, ...)
    GateMatrix matrix;
    std::vector<int> targets;
    std::vector<int> controls;
    std::vector<int> control_values;
    std::string stage;
    // F-move leg wires (a, b, c, d) in lattice order; empty otherwise
    std::vector<int> legs;
    std::string note;
    bool executed = true;
};

struct Circuit {
    int n_qubits = 0;
    std::vector<CircuitOp> ops;
};

class StateVector {
public:
    StateVector() = default;
    StateVector(int n, std::vector<cplx> amps);

    int qubits() const { return n_; }
    std::size_t size() const { return amps_.size(); }
    const std::vector<cplx>& amps() const { return amps_; }
    std::vector<cplx>& amps() { return amps_; }
    cplx operator[](std::size_t i) const { return amps_[i]; }
    double norm() const;

private:
    int n_ = 0;
    std::vector<cplx> amps_;
};

// bit of qubit q (0 = most significant) in basis index idx of an n-qubit register
inline int qubit_bit(std::uint64_t idx, int n, int q) { return static_cast<int>((idx >> (n - 1 - q)) & 1u); }

StateVector new_state(int n, std::uint64_t basis);
StateVector basis_from_string(const std::string& bits);
StateVector tensor(const StateVector& a, const StateVector& b);

void validate_op(const CircuitOp& op, int n_qubits);
void apply_op_inplace(StateVector& s, const CircuitOp& op);
StateVector apply_op(StateVector s, const CircuitOp& op);
StateVector run_circuit(StateVector s, const Circuit& c);

cplx amplitude(const StateVector& s, std::uint64_t basis);
double marginal_probability(const StateVector& s, int qubit, int value);

struct Projection {
    double probability = 0.0;
    bool valid = false;
    StateVector collapsed;
};
// throws std::domain_error on a zero-probability branch
Projection project_qubit(const StateVector& s, int qubit, int value);

// Keys of the histogram are the bits of `qubits` read in the given order,
// packed with the first listed qubit most significant.
std::map<std::uint64_t, std::uint64_t> sample_counts(const StateVector& s, const std::vector<int>& qubits,
                                                     std::uint64_t shots, std::uint64_t seed);
std::vector<std::uint64_t> sample_categorical(const std::vector<double>& probs, std::uint64_t shots,
                                              std::uint64_t seed);

// arg(amp_b) - arg(amp_a) wrapped into (-pi, pi]
double relative_phase(const StateVector& s, std::uint64_t basis_a, std::uint64_t basis_b);
double wrap_phase(double a);

cplx inner_product(const StateVector& a, const StateVector& b);
double fidelity(const StateVector& a, const StateVector& b);

} // namespace dfib
