#include "doctest.h"
#include "oracle.hpp"

#include "dfib/gates.hpp"

using namespace dfib;
using oracle::cx;

namespace {

const double g = oracle::golden;
const double rg = std::sqrt(oracle::golden);
const cx w = oracle::unit(3 * oracle::pi / 5);

GateMatrix m2(cx a, cx b, cx c, cx d) { return GateMatrix(2, {a, b, c, d}); }

// reference matrices written out by hand
GateMatrix reference(GateName n) {
    const double td = oracle::total_dim;
    switch (n) {
    case GateName::F: return m2(1 / g, 1 / rg, 1 / rg, -1 / g);
    case GateName::S: return m2(1 / td, g / td, g / td, -1 / td);
    case GateName::U: return m2(1.0 / (w * rg), w * w / g, -1.0 / (w * w * g), w / rg);
    case GateName::L: return m2(1 / rg, -1 / g, -1 / g, -1 / rg);
    case GateName::Ftilde: return m2(w * w / g, w / rg, 1.0 / (w * rg), -1.0 / (w * w * g));
    case GateName::M: {
        const double h = 1 / std::sqrt(2.0);
        return m2(h, h * oracle::unit(4 * oracle::pi / 5), h * oracle::unit(-4 * oracle::pi / 5), -h);
    }
    default: return {};
    }
}

} // namespace

TEST_CASE("named gates match the reference matrices") {
    for (auto n : {GateName::F, GateName::S, GateName::U, GateName::L, GateName::Ftilde, GateName::M}) {
        CAPTURE(to_string(n));
        CHECK(max_abs_diff(named_gate(n), reference(n)) < 1e-15);
    }
}

TEST_CASE("every named gate is unitary") {
    for (auto n : all_gate_names()) {
        CAPTURE(to_string(n));
        CHECK(check_unitary(named_gate(n), 1e-12));
        CHECK(check_unitary(named_gate(to_string(n), "conjugate"), 1e-12));
        CHECK(check_unitary(named_gate(to_string(n), "adjoint"), 1e-12));
    }
}

TEST_CASE("F and S are involutions") {
    auto f = named_gate(GateName::F), s = named_gate(GateName::S);
    CHECK(max_abs_diff(f * f, GateMatrix::identity(2)) < 1e-12);
    CHECK(max_abs_diff(s * s, GateMatrix::identity(2)) < 1e-12);
}

TEST_CASE("names round trip") {
    for (auto n : all_gate_names()) CHECK(parse_gate_name(to_string(n)) == n);
    CHECK_THROWS_AS(parse_gate_name("Toffoli"), std::invalid_argument);
    CHECK_THROWS_AS(named_gate("F", "transpose"), std::invalid_argument);
    for (auto v : {FMoveVariant::FiveInput, FMoveVariant::FourInput, FMoveVariant::ThreeInput,
                   FMoveVariant::TailSwapFourInput})
        CHECK(parse_fmove_variant(to_string(v)) == v);
}

TEST_CASE("the two filters send their target states to |0>") {
    // e^{-4 pi i/5}/g |0> + e^{3 pi i/5}/sqrt(g) |1>, under the elementwise conjugate of Ftilde
    auto ft = named_gate("Ftilde", "conjugate");
    cx a = oracle::unit(-4 * oracle::pi / 5) / g, b = w / rg;
    CHECK(std::norm(ft(1, 0) * a + ft(1, 1) * b) < 1e-24);
    CHECK(std::norm(ft(0, 0) * a + ft(0, 1) * b) == doctest::Approx(1.0));

    auto m = named_gate("M", "conjugate");
    const double h = 1 / std::sqrt(2.0);
    cx c = h, d = h * oracle::unit(4 * oracle::pi / 5);
    CHECK(std::norm(m(1, 0) * c + m(1, 1) * d) < 1e-24);
}

TEST_CASE("F-move variant classification") {
    CHECK(make_fmove_spec(0, {1, 2, 3, 4}).variant == FMoveVariant::FiveInput);
    CHECK(make_fmove_spec(0, {1, 2, 3, 2}).variant == FMoveVariant::TailSwapFourInput);
    CHECK(make_fmove_spec(0, {1, 2, 2, 3}).variant == FMoveVariant::FourInput);
    CHECK(make_fmove_spec(0, {1, 2, 2, 1}).variant == FMoveVariant::ThreeInput);
    CHECK(make_fmove_spec(5, {1, 2, 3, 4}).wires() == std::vector<int>{5, 1, 2, 3, 4});
    CHECK(make_fmove_spec(5, {1, 2, 2, 3}).wires() == std::vector<int>{5, 1, 2, 3});
    CHECK_THROWS(make_fmove_spec(0, {0, 1, 2, 3}));
    CHECK_THROWS(make_fmove_spec(0, {1, 1, 1, 1}));
    CHECK_THROWS(make_fmove_spec(0, {-1, 1, 2, 3}));
}

TEST_CASE("five-input F-move acts as the F block when every leg is occupied") {
    auto u = fmove_unitary(make_fmove_spec(0, {1, 2, 3, 4}));
    REQUIRE(u.dim == 32);
    auto f = oracle::f_block();
    for (int e = 0; e < 2; ++e)
        for (int f2 = 0; f2 < 2; ++f2) CHECK(std::abs(u(f2 * 16 + 15, e * 16 + 15) - f[e][f2]) < 1e-15);
}

TEST_CASE("F-move unitaries") {
    std::vector<std::array<int, 4>> legs = {{1, 2, 3, 4}, {1, 2, 3, 2}, {1, 2, 2, 3}, {1, 2, 2, 1}, {2, 1, 3, 1}};
    for (auto l : legs) {
        auto spec = make_fmove_spec(0, l);
        auto u = fmove_unitary(spec);
        CAPTURE(to_string(spec.variant));
        CHECK(check_unitary(u, 1e-12));
        // recoupling back and forth is the identity
        CHECK(max_abs_diff(u * u, GateMatrix::identity(u.dim)) < 1e-12);
    }
}

TEST_CASE("F-move keeps admissible configurations admissible") {
    auto spec = make_fmove_spec(0, {1, 2, 3, 4});
    auto u = fmove_unitary(spec);
    for (std::size_t c = 0; c < 32; ++c) {
        int e = (c >> 4) & 1, a = (c >> 3) & 1, b = (c >> 2) & 1, cc = (c >> 1) & 1, d = c & 1;
        if (!(admissible_bits(a, b, e) && admissible_bits(e, cc, d))) continue;
        for (std::size_t r = 0; r < 32; ++r) {
            if (std::abs(u(r, c)) < 1e-15) continue;
            int f = (r >> 4) & 1;
            CHECK((r & 15) == (c & 15));
            CHECK(admissible_bits(b, cc, f));
            CHECK(admissible_bits(a, f, d));
        }
    }
}

TEST_CASE("generalized tadpole vectors are orthonormal and admissible") {
    for (int a = 0; a < kTadpoleSectorCount; ++a) {
        auto va = generalized_tadpole_vector(static_cast<TadpoleSector>(a));
        for (int b = 0; b < kTadpoleSectorCount; ++b) {
            auto vb = generalized_tadpole_vector(static_cast<TadpoleSector>(b));
            cx dot = 0.0;
            for (int i = 0; i < 16; ++i) dot += std::conj(va[i]) * vb[i];
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-14);
        }
        for (int i = 0; i < 16; ++i) {
            int h1 = (i >> 3) & 1, h2 = (i >> 2) & 1, to = (i >> 1) & 1, ti = i & 1;
            if (std::abs(va[i]) > 0) {
                CHECK(admissible_bits(h1, h2, to));
                CHECK(admissible_bits(h1, h2, ti));
            }
        }
    }
}

TEST_CASE("tau1 tadpole vector") {
    // (|10> + w^2 |01> + sqrt(g) w |11>) / td on (h1 h2), tails occupied
    auto v = generalized_tadpole_vector(TadpoleSector::TauOne);
    const double td = oracle::total_dim;
    CHECK(std::abs(v[0b1011] - 1.0 / td) < 1e-15);
    CHECK(std::abs(v[0b0111] - w * w / td) < 1e-15);
    CHECK(std::abs(v[0b1111] - rg * w / td) < 1e-15);
}

TEST_CASE("tail exchange equals the twist phases on the string-net subspace") {
    auto t = tail_exchange_unitary();
    CHECK(check_unitary(t, 1e-12));
    auto diag = twist_diagonal(CategoryData::fibonacci());
    for (int s = 0; s < kTadpoleSectorCount; ++s) {
        auto v = generalized_tadpole_vector(static_cast<TadpoleSector>(s));
        cx tv = 0.0, dv = 0.0;
        for (int r = 0; r < 16; ++r)
            for (int c = 0; c < 16; ++c) {
                tv += std::conj(v[r]) * t(r, c) * v[c];
                dv += std::conj(v[r]) * diag(r, c) * v[c];
            }
        CAPTURE(s);
        CHECK(std::abs(std::abs(tv) - 1.0) < 1e-12);
        if (s == static_cast<int>(TadpoleSector::TauOne)) CHECK(std::abs(tv - oracle::spin(1)) < 1e-12);
        if (s == static_cast<int>(TadpoleSector::OneTauBar)) CHECK(std::abs(tv - std::conj(oracle::spin(1))) < 1e-12);
        if (s == static_cast<int>(TadpoleSector::TauOne) || s == static_cast<int>(TadpoleSector::OneTauBar))
            CHECK(std::abs(tv - dv) < 1e-12);
    }
}

TEST_CASE("controlled embedding") {
    auto cx_ = controlled(named_gate(GateName::X), 1, {1});
    CHECK(max_abs_diff(cx_, named_gate(GateName::CNOT)) < 1e-15);
    auto neg = controlled(named_gate(GateName::X), 1, {0});
    CHECK(neg(1, 0) == cx(1.0));
    CHECK(neg(2, 2) == cx(1.0));
    CHECK_THROWS(controlled(named_gate(GateName::X), 2, {1}));
}

TEST_CASE("op builders fill defaults") {
    auto op = gate_op(GateName::X, {2}, {0, 1});
    CHECK(op.control_values == std::vector<int>{1, 1});
    CHECK(op.gate == "X");
    auto f = fmove_op(make_fmove_spec(3, {0, 1, 2, 4}));
    CHECK(f.gate == "fmove");
    CHECK(f.variant == "FiveInput");
    CHECK(f.targets == std::vector<int>{3, 0, 1, 2, 4});
    CHECK(f.legs == std::vector<int>{0, 1, 2, 4});
}
