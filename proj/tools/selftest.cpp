#include "selftest.hpp"

#include <algorithm>
#include <cmath>

#include "dfib/gates.hpp"
#include "dfib/lattice.hpp"
#include "dfib/protocols.hpp"

using namespace dfib;

std::vector<SelftestLine> run_selftest(double tol) {
    std::vector<SelftestLine> out;
    const auto table = FSymbolTable::fibonacci();

    double pent = pentagon_residual(table);
    out.push_back({"pentagon", pent, pent < 1e-12});

    bool ribbon = true;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int m = 0; m < 2; ++m)
                if (admissible_bits(i, j, m)) ribbon = ribbon && check_ribbon(anyon(i), anyon(j), anyon(m), 1e-12);
    out.push_back({"ribbon", 0.0, ribbon});

    // every named gate and every F-move the experiments use
    double worst = 0.0;
    auto unit_err = [](const GateMatrix& g) { return max_abs_diff(g.adjoint() * g, GateMatrix::identity(g.dim)); };
    for (auto g : all_gate_names()) worst = std::max(worst, unit_err(named_gate(g)));
    std::vector<Experiment> all;
    for (auto k : ground_state_lattices()) {
        Experiment e;
        e.kind = ExperimentKind::GroundState;
        e.lattice = k;
        all.push_back(e);
    }
    for (auto k : {ExperimentKind::ThetaFusion, ExperimentKind::TetraFusion, ExperimentKind::TailedFusion,
                   ExperimentKind::Braiding, ExperimentKind::Twist}) {
        Experiment e;
        e.kind = k;
        all.push_back(e);
    }
    for (const auto& e : all)
        for (const auto& op : build_experiment(e).circuit.ops) worst = std::max(worst, unit_err(op.matrix));
    out.push_back({"gate unitarity", worst, worst < 1e-12});

    double comm = 0.0;
    for (auto k : {LatticeKind::Theta, LatticeKind::GeneralizedTadpole}) {
        Lattice l = build_lattice(k);
        for (int e = 0; e < l.edge_count(); ++e) {
            if (!l.can_fmove(e)) continue;
            for (std::size_t p = 0; p < l.plaquettes().size(); ++p)
                if (l.adjacent(e, static_cast<int>(p)))
                    comm = std::max(comm, fbp_commutation_residual(l, e, l.plaquettes()[p].name));
        }
    }
    out.push_back({"F_e B_p = B_p' F_e", comm, comm < 1e-12});

    double gram = 0.0;
    for (int a = 0; a < kTadpoleSectorCount; ++a)
        for (int b = 0; b < kTadpoleSectorCount; ++b) {
            auto va = generalized_tadpole_vector(static_cast<TadpoleSector>(a));
            auto vb = generalized_tadpole_vector(static_cast<TadpoleSector>(b));
            cplx d = 0.0;
            for (std::size_t i = 0; i < va.size(); ++i) d += std::conj(va[i]) * vb[i];
            gram = std::max(gram, std::abs(d - (a == b ? 1.0 : 0.0)));
        }
    out.push_back({"tadpole orthonormality", gram, gram < 1e-12});

    for (auto e : all) {
        e.tolerance = tol;
        auto r = run_experiment(e);
        double err = 0.0;
        for (const auto& s : r.stages) err = std::max(err, 1.0 - s.fidelity);
        out.push_back({experiment_name(e), std::max(err, 0.0), r.passed});
    }
    return out;
}
