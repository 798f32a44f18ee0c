#include "dfib/gates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dfib {

namespace {

const double kInvGolden = 1.0 / kGolden;
const double kInvSqrtGolden = 1.0 / std::sqrt(kGolden);

GateMatrix mat2(cplx a, cplx b, cplx c, cplx d) { return GateMatrix(2, {a, b, c, d}); }

} // namespace

std::string to_string(GateName g) {
    switch (g) {
    case GateName::X: return "X";
    case GateName::H: return "H";
    case GateName::CNOT: return "CNOT";
    case GateName::F: return "F";
    case GateName::S: return "S";
    case GateName::U: return "U";
    case GateName::L: return "L";
    case GateName::Ftilde: return "Ftilde";
    case GateName::M: return "M";
    case GateName::TailExchange: return "TailExchange";
    }
    return "?";
}

const std::vector<GateName>& all_gate_names() {
    static const std::vector<GateName> v = {GateName::X, GateName::H,      GateName::CNOT, GateName::F,
                                            GateName::S, GateName::U,      GateName::L,    GateName::Ftilde,
                                            GateName::M, GateName::TailExchange};
    return v;
}

GateName parse_gate_name(const std::string& name) {
    for (GateName g : all_gate_names())
        if (to_string(g) == name) return g;
    throw std::invalid_argument("unknown gate: " + name);
}

GateMatrix named_gate(GateName g) {
    const cplx rot = phase_3pi_5();
    const double total = kTotalDim;
    switch (g) {
    case GateName::X: return mat2(0, 1, 1, 0);
    case GateName::H: {
        const double h = 1.0 / std::sqrt(2.0);
        return mat2(h, h, h, -h);
    }
    case GateName::CNOT: {
        GateMatrix m = GateMatrix::identity(4);
        m(2, 2) = 0.0, m(3, 3) = 0.0, m(2, 3) = 1.0, m(3, 2) = 1.0;
        return m;
    }
    case GateName::F: return mat2(kInvGolden, kInvSqrtGolden, kInvSqrtGolden, -kInvGolden);
    case GateName::S: return mat2(1.0 / total, kGolden / total, kGolden / total, -1.0 / total);
    case GateName::U:
        return mat2(kInvSqrtGolden / rot, rot * rot * kInvGolden, -kInvGolden / (rot * rot), rot * kInvSqrtGolden);
    case GateName::L: return mat2(kInvSqrtGolden, -kInvGolden, -kInvGolden, -kInvSqrtGolden);
    case GateName::Ftilde:
        return mat2(rot * rot * kInvGolden, rot * kInvSqrtGolden, kInvSqrtGolden / rot, -kInvGolden / (rot * rot));
    case GateName::M: {
        const double h = 1.0 / std::sqrt(2.0);
        return mat2(h, h * expi(4.0 * kPi / 5.0), h * expi(-4.0 * kPi / 5.0), -h);
    }
    case GateName::TailExchange: return tail_exchange_unitary();
    }
    throw std::invalid_argument("unknown gate");
}

GateMatrix named_gate(const std::string& name, const std::string& variant) {
    GateMatrix g = named_gate(parse_gate_name(name));
    if (variant.empty()) return g;
    if (variant == "conjugate") return g.conjugate();
    if (variant == "adjoint") return g.adjoint();
    throw std::invalid_argument("unknown gate variant: " + variant);
}

std::string to_string(FMoveVariant v) {
    switch (v) {
    case FMoveVariant::FiveInput: return "FiveInput";
    case FMoveVariant::FourInput: return "FourInput";
    case FMoveVariant::ThreeInput: return "ThreeInput";
    case FMoveVariant::TailSwapFourInput: return "TailSwapFourInput";
    }
    return "?";
}

FMoveVariant parse_fmove_variant(const std::string& s) {
    for (auto v : {FMoveVariant::FiveInput, FMoveVariant::FourInput, FMoveVariant::ThreeInput,
                   FMoveVariant::TailSwapFourInput})
        if (to_string(v) == s) return v;
    throw std::invalid_argument("unknown F-move variant: " + s);
}

std::vector<int> FMoveSpec::wires() const {
    std::vector<int> w{edge};
    for (int l : legs)
        if (std::find(w.begin(), w.end(), l) == w.end()) w.push_back(l);
    return w;
}

FMoveSpec make_fmove_spec(int edge, std::array<int, 4> legs) {
    FMoveSpec s;
    s.edge = edge;
    s.legs = legs;
    for (int l : legs) {
        if (l < 0) throw std::invalid_argument("negative wire");
        if (l == edge) throw std::invalid_argument("internal edge reused as an outer leg");
    }
    const std::size_t distinct = s.wires().size() - 1;
    if (distinct == 4) {
        s.variant = FMoveVariant::FiveInput;
    } else if (distinct == 3) {
        bool crossing = legs[0] == legs[2] || legs[1] == legs[3];
        s.variant = crossing ? FMoveVariant::TailSwapFourInput : FMoveVariant::FourInput;
    } else if (distinct == 2) {
        s.variant = FMoveVariant::ThreeInput;
    } else {
        throw std::invalid_argument("F-move needs at least two distinct legs");
    }
    return s;
}

GateMatrix fmove_unitary(const FMoveSpec& spec, const FSymbolTable& table) {
    const std::vector<int> w = spec.wires();
    const int k = static_cast<int>(w.size());
    const std::size_t dim = std::size_t{1} << k;
    auto slot = [&](int wire) { return static_cast<int>(std::find(w.begin(), w.end(), wire) - w.begin()); };
    std::array<int, 4> ls{};
    for (int i = 0; i < 4; ++i) ls[i] = slot(spec.legs[i]);

    GateMatrix u(dim);
    for (std::size_t col = 0; col < dim; ++col) {
        auto get = [&](int s) { return static_cast<int>((col >> (k - 1 - s)) & 1u); };
        const int a = get(ls[0]), b = get(ls[1]), c = get(ls[2]), d = get(ls[3]), e = get(0);
        const std::size_t base = col & ~(std::size_t{1} << (k - 1));
        const std::size_t ebit = std::size_t{1} << (k - 1);
        auto adm_e = [&](int x) { return admissible_bits(a, b, x) && admissible_bits(x, c, d); };
        auto adm_f = [&](int x) { return admissible_bits(b, c, x) && admissible_bits(a, x, d); };
        if (adm_e(e)) {
            for (int f = 0; f < 2; ++f)
                if (adm_f(f)) u(base | (f ? ebit : 0), col) += table.at_bits(a, b, c, d, e, f);
        } else {
            // inadmissible input goes to the leftover inadmissible output slot,
            // which keeps every leg block a permutation or the F matrix
            int f = e;
            if (adm_f(0) != adm_f(1)) f = adm_f(0) ? 1 : 0;
            u(base | (f ? ebit : 0), col) += 1.0;
        }
    }
    return u;
}

std::string to_string(TadpoleSector s) {
    switch (s) {
    case TadpoleSector::Vac: return "11";
    case TadpoleSector::TauOne: return "tau1";
    case TadpoleSector::OneTauBar: return "1taubar";
    case TadpoleSector::TT11: return "tautaubar_11";
    case TadpoleSector::TT1T: return "tautaubar_1tau";
    case TadpoleSector::TTT1: return "tautaubar_tau1";
    case TadpoleSector::TTTT: return "tautaubar_tautau";
    }
    return "?";
}

DoubledLabel to_doubled(TadpoleSector s) {
    switch (s) {
    case TadpoleSector::Vac: return vacuum_label();
    case TadpoleSector::TauOne: return tau_one();
    case TadpoleSector::OneTauBar: return one_taubar();
    case TadpoleSector::TT11: return tau_taubar(std::pair{Anyon::One, Anyon::One});
    case TadpoleSector::TT1T: return tau_taubar(std::pair{Anyon::One, Anyon::Tau});
    case TadpoleSector::TTT1: return tau_taubar(std::pair{Anyon::Tau, Anyon::One});
    case TadpoleSector::TTTT: return tau_taubar(std::pair{Anyon::Tau, Anyon::Tau});
    }
    return vacuum_label();
}

std::vector<cplx> generalized_tadpole_vector(TadpoleSector s) {
    std::vector<cplx> v(16, 0.0);
    const double total = kTotalDim, g = kGolden, rg = std::sqrt(kGolden);
    const cplx rot = phase_3pi_5();
    switch (s) {
    case TadpoleSector::Vac:
        v[0b0000] = 1.0 / total, v[0b1100] = g / total;
        break;
    case TadpoleSector::TauOne:
        v[0b1011] = 1.0 / total, v[0b0111] = rot * rot / total, v[0b1111] = rg * rot / total;
        break;
    case TadpoleSector::OneTauBar:
        v[0b1011] = 1.0 / total, v[0b0111] = 1.0 / (rot * rot * total), v[0b1111] = rg / (rot * total);
        break;
    case TadpoleSector::TT11:
        v[0b0000] = g / total, v[0b1100] = -1.0 / total;
        break;
    case TadpoleSector::TT1T: v[0b1110] = 1.0; break;
    case TadpoleSector::TTT1: v[0b1101] = 1.0; break;
    case TadpoleSector::TTTT:
        v[0b0111] = rg / total, v[0b1011] = rg / total, v[0b1111] = 1.0 / (g * total);
        break;
    }
    return v;
}

namespace {
bool string_net_config(int idx) {
    int h1 = (idx >> 3) & 1, h2 = (idx >> 2) & 1, to = (idx >> 1) & 1, ti = idx & 1;
    return admissible_bits(h1, h2, to) && admissible_bits(h1, h2, ti);
}
} // namespace

GateMatrix tail_exchange_unitary(const FSymbolTable& table) {
    // wires (h1, h2, t_out, t_in); junctions [h1, h2, t_out] and [h1', h2', t_in]
    FMoveSpec spec = make_fmove_spec(0, {1, 2, 1, 3});
    GateMatrix f = fmove_unitary(spec, table);
    GateMatrix swap(16);
    for (int i = 0; i < 16; ++i) {
        int j = (i & 0b0011) | ((i >> 1) & 0b0100) | ((i << 1) & 0b1000);
        swap(j, i) = 1.0;
    }
    GateMatrix g = swap * f;
    GateMatrix out(16);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) {
            if (string_net_config(r) && string_net_config(c)) out(r, c) = g(r, c);
            else if (r == c) out(r, c) = 1.0;
        }
    return out;
}

GateMatrix twist_diagonal(const CategoryData& c) {
    GateMatrix out = GateMatrix::identity(16);
    for (int k = 0; k < kTadpoleSectorCount; ++k) {
        auto s = static_cast<TadpoleSector>(k);
        cplx phase = 1.0;
        if (s == TadpoleSector::TauOne) phase = c.spin[1];
        if (s == TadpoleSector::OneTauBar) phase = std::conj(c.spin[1]);
        auto v = generalized_tadpole_vector(s);
        for (int r = 0; r < 16; ++r)
            for (int q = 0; q < 16; ++q) out(r, q) += (phase - 1.0) * v[r] * std::conj(v[q]);
    }
    return out;
}

GateMatrix controlled(const GateMatrix& g, int n_controls, const std::vector<int>& values) {
    if (n_controls < 1 || static_cast<int>(values.size()) != n_controls)
        throw std::invalid_argument("bad control list");
    std::size_t pattern = 0;
    for (int v : values) pattern = (pattern << 1) | static_cast<std::size_t>(v & 1);
    const std::size_t blocks = std::size_t{1} << n_controls;
    GateMatrix out = GateMatrix::identity(blocks * g.dim);
    const std::size_t off = pattern * g.dim;
    for (std::size_t r = 0; r < g.dim; ++r)
        for (std::size_t c = 0; c < g.dim; ++c) out(off + r, off + c) = g(r, c);
    return out;
}

CircuitOp gate_op(GateName g, std::vector<int> targets, std::vector<int> controls, std::vector<int> control_values,
                  std::string variant) {
    CircuitOp op;
    op.gate = to_string(g);
    op.variant = std::move(variant);
    op.matrix = named_gate(op.gate, op.variant);
    op.targets = std::move(targets);
    op.controls = std::move(controls);
    op.control_values = std::move(control_values);
    if (op.control_values.empty()) op.control_values.assign(op.controls.size(), 1);
    return op;
}

CircuitOp fmove_op(const FMoveSpec& spec, const FSymbolTable& table) {
    CircuitOp op;
    op.gate = "fmove";
    op.variant = to_string(spec.variant);
    op.matrix = fmove_unitary(spec, table);
    op.targets = spec.wires();
    op.legs = {spec.legs.begin(), spec.legs.end()};
    return op;
}

} // namespace dfib
