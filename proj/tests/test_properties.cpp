#include "doctest.h"
#include "oracle.hpp"

#include <random>

#include "dfib/gates.hpp"
#include "dfib/lattice.hpp"

using namespace dfib;

namespace {

StateVector random_state(int n, std::mt19937_64& gen) {
    std::normal_distribution<double> g;
    std::vector<cplx> a(std::size_t{1} << n);
    double s = 0.0;
    for (auto& x : a) {
        x = cplx(g(gen), g(gen));
        s += std::norm(x);
    }
    for (auto& x : a) x /= std::sqrt(s);
    return StateVector(n, std::move(a));
}

// random normalized superposition of configurations that obey every vertex rule
StateVector random_string_net(const Lattice& l, std::mt19937_64& gen) {
    const int n = l.edge_count();
    std::normal_distribution<double> g;
    std::vector<cplx> a(std::size_t{1} << n, 0.0);
    double s = 0.0;
    for (std::uint64_t i = 0; i < a.size(); ++i) {
        bool ok = true;
        for (const auto& v : l.vertices()) {
            if (v.ring.size() != 3) continue;
            int k = 0;
            for (auto h : v.ring) k += qubit_bit(i, n, h.edge);
            ok = ok && k != 1;
        }
        if (!ok) continue;
        a[i] = cplx(g(gen), g(gen));
        s += std::norm(a[i]);
    }
    for (auto& x : a) x /= std::sqrt(s);
    return StateVector(n, std::move(a));
}

CircuitOp random_library_op(int n, std::mt19937_64& gen) {
    std::vector<int> w(n);
    for (int i = 0; i < n; ++i) w[i] = i;
    std::shuffle(w.begin(), w.end(), gen);
    const auto& names = all_gate_names();
    GateName name = names[gen() % names.size()];
    int k = named_gate(name).qubits();
    std::vector<int> targets(w.begin(), w.begin() + k);
    int c = static_cast<int>(gen() % 3);
    if (k + c > n) c = n - k;
    std::vector<int> controls(w.begin() + k, w.begin() + k + c), values;
    for (int i = 0; i < c; ++i) values.push_back(static_cast<int>(gen() & 1));
    const char* variants[] = {"", "conjugate", "adjoint"};
    return gate_op(name, targets, controls, values, variants[gen() % 3]);
}

} // namespace

TEST_CASE("random circuits preserve the norm") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 40; ++trial) {
        auto s = random_state(6, gen);
        for (int i = 0; i < 25; ++i) apply_op_inplace(s, random_library_op(6, gen));
        CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("a circuit followed by its reversed adjoint is the identity") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 25; ++trial) {
        auto s0 = random_state(6, gen);
        std::vector<CircuitOp> ops;
        for (int i = 0; i < 15; ++i) ops.push_back(random_library_op(6, gen));
        auto s = s0;
        for (const auto& op : ops) apply_op_inplace(s, op);
        for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
            auto inv = *it;
            inv.matrix = inv.matrix.adjoint();
            apply_op_inplace(s, inv);
        }
        CHECK(std::abs(inner_product(s0, s)) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("library ops agree with the dense reference") {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = random_state(5, gen);
        auto op = random_library_op(5, gen);
        auto got = apply_op(s, op);
        auto want = oracle::apply(s.amps(), op, 5);
        double err = 0.0;
        for (std::size_t i = 0; i < want.size(); ++i) err = std::max(err, std::abs(got[i] - want[i]));
        CAPTURE(op.gate);
        CHECK(err < 1e-12);
    }
}

TEST_CASE("random F-move wirings are unitary involutions") {
    std::mt19937_64 gen(14);
    int made = 0;
    for (int trial = 0; trial < 200 && made < 40; ++trial) {
        std::array<int, 4> legs;
        for (auto& l : legs) l = 1 + static_cast<int>(gen() % 4);
        FMoveSpec spec;
        try {
            spec = make_fmove_spec(0, legs);
        } catch (const std::invalid_argument&) {
            continue;
        }
        ++made;
        auto u = fmove_unitary(spec);
        CHECK(check_unitary(u, 1e-12));
        CHECK(max_abs_diff(u * u, GateMatrix::identity(u.dim)) < 1e-12);
    }
    CHECK(made >= 20);
}

TEST_CASE("F-moves keep string nets inside the vertex rules and keep plaquette charge") {
    std::mt19937_64 gen(15);
    for (auto k : {LatticeKind::Theta, LatticeKind::Tetrahedron, LatticeKind::TailedTheta}) {
        Lattice l = build_lattice(k);
        for (int trial = 0; trial < 6; ++trial) {
            auto s = random_string_net(l, gen);
            Lattice cur = l;
            for (int step = 0; step < 4; ++step) {
                std::vector<int> movable;
                for (int e = 0; e < cur.edge_count(); ++e)
                    if (cur.can_fmove(e)) movable.push_back(e);
                int e = movable[gen() % movable.size()];
                std::vector<double> before;
                for (const auto& p : cur.plaquettes()) before.push_back(plaquette_trivial_charge_probability(s, cur, p.name));
                FMoveStep st{cur.fmove_spec(e), cur, cur.after_fmove(e)};
                auto [next, lat] = apply_fmove(s, cur, st);
                for (std::size_t v = 0; v < lat.vertices().size(); ++v)
                    CHECK(vertex_projector_expectation(next, lat, static_cast<int>(v)) == doctest::Approx(1.0));
                CHECK(next.norm() == doctest::Approx(1.0).epsilon(1e-12));
                // plaquettes keep their names across the move
                for (std::size_t p = 0; p < cur.plaquettes().size(); ++p)
                    CHECK(plaquette_trivial_charge_probability(next, lat, cur.plaquettes()[p].name) ==
                          doctest::Approx(before[p]).epsilon(1e-10));
                s = next;
                cur = lat;
            }
        }
    }
}

TEST_CASE("sampling frequencies converge") {
    std::mt19937_64 gen(16);
    for (int trial = 0; trial < 10; ++trial) {
        auto s = random_state(3, gen);
        const std::uint64_t shots = 20000;
        auto h = sample_counts(s, {0, 1, 2}, shots, trial);
        std::uint64_t total = 0;
        for (auto [key, count] : h) {
            total += count;
            double p = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i)
                if (i == key) p = std::norm(s[i]);
            double sigma = std::sqrt(p * (1 - p) / shots);
            CHECK(std::abs(count / double(shots) - p) < 5 * sigma + 1e-12);
        }
        CHECK(total == shots);
        CHECK(sample_counts(s, {0, 1, 2}, shots, trial) == h);
    }
}

TEST_CASE("projection then renormalization is idempotent") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 20; ++trial) {
        auto s = random_state(4, gen);
        int q = static_cast<int>(gen() % 4);
        auto p = project_qubit(s, q, 1);
        CHECK(p.probability == doctest::Approx(marginal_probability(s, q, 1)));
        CHECK(p.collapsed.norm() == doctest::Approx(1.0));
        auto again = project_qubit(p.collapsed, q, 1);
        CHECK(again.probability == doctest::Approx(1.0));
    }
}
