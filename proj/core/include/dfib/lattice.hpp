#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dfib/gates.hpp"
#include "dfib/state.hpp"

namespace dfib {

enum class LatticeKind { SingleEdge, Theta, Tetrahedron, GeneralizedTadpole, TailedTheta, TailedTetrahedron };

std::string to_string(LatticeKind k);
LatticeKind parse_lattice_kind(const std::string& s);  // e.g. "tailed-theta"
const std::vector<LatticeKind>& all_lattice_kinds();
int qubit_count(LatticeKind k);

// One end of an edge. Read as a dart, it leaves the vertex that holds it.
struct HalfEdge {
    int edge = -1;
    int end = 0;
    HalfEdge twin() const { return {edge, 1 - end}; }
    auto operator<=>(const HalfEdge&) const = default;
};

struct Vertex {
    std::string name;
    std::vector<HalfEdge> ring;  // counter-clockwise
};

struct Plaquette {
    std::string name;
    std::vector<HalfEdge> darts;  // boundary walk
    std::vector<int> boundary;    // non-tail edges in walk order
    std::vector<int> tails;
    bool outer = false;
};

// Ribbon graph on the sphere. Edge i carries qubit i. Free tail ends are kept
// as degree-1 vertices so that V - E + F = 2 holds for every kind.
class Lattice {
public:
    struct PlaquetteSeed {
        std::string name;
        HalfEdge dart;
        bool outer = false;
    };

    Lattice() = default;
    // empty seeds: faces are named f1, f2, ... in tracing order
    Lattice(LatticeKind kind, int n_edges, std::vector<Vertex> vertices, const std::vector<PlaquetteSeed>& seeds);

    LatticeKind kind() const { return kind_; }
    int edge_count() const { return n_edges_; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Plaquette>& plaquettes() const { return plaquettes_; }

    int vertex_of(HalfEdge h) const;
    HalfEdge next_ccw(HalfEdge h) const;
    HalfEdge face_next(HalfEdge d) const { return next_ccw(d.twin()); }
    bool is_tail(int edge) const;
    int plaquette_index(const std::string& name) const;  // throws std::out_of_range
    int plaquette_of(HalfEdge dart) const;
    std::vector<int> incident_edges(int vertex) const;
    bool adjacent(int edge, int plaquette) const;

    bool can_fmove(int edge) const;
    FMoveSpec fmove_spec(int edge) const;
    Lattice after_fmove(int edge) const;

    int euler_characteristic() const;
    std::string signature() const;
    bool operator==(const Lattice& o) const { return signature() == o.signature(); }

private:
    void trace_faces(const std::vector<Plaquette>* previous, const std::vector<PlaquetteSeed>* seeds, int moved = -1);

    LatticeKind kind_ = LatticeKind::Theta;
    int n_edges_ = 0;
    std::vector<Vertex> vertices_;
    std::vector<Plaquette> plaquettes_;
    std::map<HalfEdge, int> where_;
};

Lattice build_lattice(LatticeKind kind);
std::string qubit_name(int edge);  // 0 -> "q1"

double vertex_projector_expectation(const StateVector& s, const Lattice& l, int vertex);

// A closed string that splits the plaquettes into two sides. Tail-less: a loop
// `h1` with stem `t_out` (or none). Generalized: arcs h1, h2 between two junctions
// whose third edges are t_out and t_in, with (h1, h2, tail) counter-clockwise at both.
struct Tadpole {
    bool generalized = false;
    int h1 = -1, h2 = -1, t_out = -1, t_in = -1;
    std::vector<int> inner;  // plaquette indices on the enclosed side

    std::vector<int> qubits() const;
};

std::vector<int> ring_side(const Lattice& l, const std::vector<int>& ring_edges, int plaquette);
std::optional<Tadpole> find_tadpole(const Lattice& l, std::vector<int> side);

std::vector<cplx> tadpole_reference(const Tadpole& t, TadpoleSector s);
std::vector<TadpoleSector> tadpole_sectors(const Tadpole& t);
// (label, tailed); ττ̄ labels on the tailed tadpole need a component
StateVector tadpole_reference_state(const DoubledLabel& label, bool tailed);

struct ChargeDistribution {
    std::vector<TadpoleSector> sectors;
    std::vector<double> probability;
    std::vector<cplx> amplitude;  // phases relative to the first populated sector
    bool coherent = true;          // every sector shares the same complement state

    double total() const;
    double prob(TadpoleSector s) const;
    cplx amp(TadpoleSector s) const;
    std::map<std::string, double> by_label() const;  // 11, tau1, 1taubar, tautaubar
};

ChargeDistribution decompose_tadpole(const StateVector& s, const Tadpole& t);

struct FMoveStep {
    FMoveSpec spec;
    Lattice pre;
    Lattice post;
};

struct ReductionPlan {
    std::vector<FMoveStep> steps;
    std::vector<std::string> nesting;
    std::vector<Tadpole> tadpoles;  // tadpoles[i] encloses nesting[0..i]
    Lattice start;

    const Lattice& terminal() const { return steps.empty() ? start : steps.back().post; }
};

// fixed move sequence; throws std::runtime_error if it does not reach the nesting
ReductionPlan plan_from_moves(const Lattice& l, const std::vector<int>& edges, const std::vector<std::string>& nesting);
// shortest sequence found by breadth-first search, first in edge order
ReductionPlan reduction_plan(const Lattice& l, const std::vector<std::string>& nesting, int max_depth = 4);

std::pair<StateVector, Lattice> apply_fmove(StateVector s, const Lattice& l, const FMoveStep& step,
                                            const FSymbolTable& table = FSymbolTable::fibonacci());
StateVector apply_plan(StateVector s, const ReductionPlan& plan, const FSymbolTable& table = FSymbolTable::fibonacci());
ChargeDistribution charge_decompose(const StateVector& s, const Lattice& l, const ReductionPlan& plan, int tadpole_index);

double plaquette_trivial_charge_probability(const StateVector& s, const Lattice& l, const std::string& plaquette);
GateMatrix plaquette_projector(const Lattice& l, const std::string& plaquette,
                               const FSymbolTable& table = FSymbolTable::fibonacci());
GateMatrix fmove_full_matrix(const Lattice& l, int edge, const FSymbolTable& table = FSymbolTable::fibonacci());
double fbp_commutation_residual(const Lattice& l, int edge, const std::string& plaquette,
                                const FSymbolTable& table = FSymbolTable::fibonacci());
bool check_fbp_commutation(const Lattice& l, int edge, const std::string& plaquette, double tol,
                           const FSymbolTable& table = FSymbolTable::fibonacci());

std::string lattice_to_json(const Lattice& l);

} // namespace dfib
