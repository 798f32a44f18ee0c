#pragma once

#include <array>
#include <string>
#include <vector>

#include "dfib/anyon.hpp"
#include "dfib/state.hpp"

namespace dfib {

enum class GateName { X, H, CNOT, F, S, U, L, Ftilde, M, TailExchange };

std::string to_string(GateName g);
GateName parse_gate_name(const std::string& name);  // throws std::invalid_argument
const std::vector<GateName>& all_gate_names();

// M is returned with the 1/sqrt(2) normalization so that it is unitary.
GateMatrix named_gate(GateName g);
// variant "", "conjugate" (elementwise) or "adjoint"
GateMatrix named_gate(const std::string& name, const std::string& variant = "");

enum class FMoveVariant { FiveInput, FourInput, ThreeInput, TailSwapFourInput };
std::string to_string(FMoveVariant v);
FMoveVariant parse_fmove_variant(const std::string& s);

// Recoupling of internal edge `edge` whose endpoints see legs (a, b) and (c, d),
// each endpoint listed counter-clockwise after the edge itself.
struct FMoveSpec {
    FMoveVariant variant = FMoveVariant::FiveInput;
    int edge = -1;
    std::array<int, 4> legs{};

    // edge first, then the distinct legs in order of appearance
    std::vector<int> wires() const;
};

// classifies the variant from which legs share a wire; throws on malformed roles
FMoveSpec make_fmove_spec(int edge, std::array<int, 4> legs);
GateMatrix fmove_unitary(const FMoveSpec& spec, const FSymbolTable& table = FSymbolTable::fibonacci());

// Charge sectors of a generalized tadpole, qubits ordered (h1, h2, t_out, t_in).
enum class TadpoleSector { Vac, TauOne, OneTauBar, TT11, TT1T, TTT1, TTTT };
constexpr int kTadpoleSectorCount = 7;
std::string to_string(TadpoleSector s);
DoubledLabel to_doubled(TadpoleSector s);
std::vector<cplx> generalized_tadpole_vector(TadpoleSector s);

// Exchanges the two tails of a generalized tadpole: an F-move on h1 followed by
// relabelling the arcs, restricted to the string-net subspace (identity elsewhere).
GateMatrix tail_exchange_unitary(const FSymbolTable& table = FSymbolTable::fibonacci());
// the same operator written as phases in the charge basis, from the twist data
GateMatrix twist_diagonal(const CategoryData& c);

// controls occupy the most significant positions
GateMatrix controlled(const GateMatrix& g, int n_controls, const std::vector<int>& control_values);

CircuitOp gate_op(GateName g, std::vector<int> targets, std::vector<int> controls = {},
                  std::vector<int> control_values = {}, std::string variant = "");
CircuitOp fmove_op(const FMoveSpec& spec, const FSymbolTable& table = FSymbolTable::fibonacci());

} // namespace dfib
