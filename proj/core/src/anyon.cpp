#include "dfib/anyon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dfib {

cplx expi(double angle) { return std::polar(1.0, angle); }
cplx phase_3pi_5() { return expi(3.0 * kPi / 5.0); }

std::string to_string(Anyon a) { return a == Anyon::One ? "1" : "tau"; }

std::vector<Anyon> fuse(Anyon a, Anyon b) {
    if (a == Anyon::One) return {b};
    if (b == Anyon::One) return {a};
    return {Anyon::One, Anyon::Tau};
}

bool admissible(Anyon a, Anyon b, Anyon c) { return admissible_bits(bit(a), bit(b), bit(c)); }

FSymbolTable FSymbolTable::fibonacci() {
    FSymbolTable t;
    const double inv = 1.0 / kGolden;
    const double isq = 1.0 / std::sqrt(kGolden);
    for (int i = 0; i < 64; ++i) {
        int a = (i >> 5) & 1, b = (i >> 4) & 1, c = (i >> 3) & 1, d = (i >> 2) & 1, e = (i >> 1) & 1, f = i & 1;
        bool ok = admissible_bits(a, b, e) && admissible_bits(e, c, d) && admissible_bits(b, c, f) &&
                  admissible_bits(a, f, d);
        if (!ok) continue;
        if (a && b && c && d) {
            const double block[2][2] = {{inv, isq}, {isq, -inv}};
            t.entries_[i] = block[e][f];
        } else {
            t.entries_[i] = 1.0;
        }
    }
    return t;
}

cplx FSymbolTable::operator()(Anyon a, Anyon b, Anyon c, Anyon d, Anyon e, Anyon f) const {
    return entries_[index(bit(a), bit(b), bit(c), bit(d), bit(e), bit(f))];
}

void FSymbolTable::set(Anyon a, Anyon b, Anyon c, Anyon d, Anyon e, Anyon f, cplx v) {
    entries_[index(bit(a), bit(b), bit(c), bit(d), bit(e), bit(f))] = v;
}

cplx f_symbol(Anyon a, Anyon b, Anyon c, Anyon d, Anyon e, Anyon f) {
    static const FSymbolTable table = FSymbolTable::fibonacci();
    return table(a, b, c, d, e, f);
}

cplx r_symbol(Anyon i, Anyon j, Anyon m) {
    if (!admissible(i, j, m)) return 0.0;
    if (i == Anyon::Tau && j == Anyon::Tau)
        return m == Anyon::One ? expi(-4.0 * kPi / 5.0) : expi(3.0 * kPi / 5.0);
    return 1.0;
}

cplx twist(Anyon a) { return a == Anyon::One ? cplx(1.0) : expi(4.0 * kPi / 5.0); }

CategoryData CategoryData::fibonacci() {
    CategoryData c;
    c.golden = kGolden;
    c.dims = {1.0, kGolden};
    c.total_dim = std::sqrt(1.0 + kGolden * kGolden);
    c.spin = {twist(Anyon::One), twist(Anyon::Tau)};
    const double s = 1.0 / c.total_dim;
    c.s_matrix = {{{s, s * kGolden}, {s * kGolden, -s}}};
    return c;
}

double pentagon_residual(const FSymbolTable& t) {
    double worst = 0.0;
    for (int m = 0; m < 512; ++m) {
        int a = (m >> 8) & 1, b = (m >> 7) & 1, c = (m >> 6) & 1, d = (m >> 5) & 1, e = (m >> 4) & 1;
        int f = (m >> 3) & 1, g = (m >> 2) & 1, k = (m >> 1) & 1, l = m & 1;
        cplx lhs = t.at_bits(f, c, d, e, g, l) * t.at_bits(a, b, l, e, f, k);
        cplx rhs = 0.0;
        for (int h = 0; h < 2; ++h)
            rhs += t.at_bits(a, b, c, g, f, h) * t.at_bits(a, h, d, e, g, k) * t.at_bits(b, c, d, k, h, l);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

bool check_pentagon(const FSymbolTable& t, double tol) { return pentagon_residual(t) < tol; }

double hexagon_residual(const FSymbolTable& t) {
    double worst = 0.0;
    auto R = [](int i, int j, int m) { return r_symbol(anyon(i), anyon(j), anyon(m)); };
    for (int m = 0; m < 64; ++m) {
        int a = (m >> 5) & 1, b = (m >> 4) & 1, c = (m >> 3) & 1, d = (m >> 2) & 1, e = (m >> 1) & 1, g = m & 1;
        cplx lhs = R(c, a, e) * t.at_bits(a, c, b, d, e, g) * R(c, b, g);
        cplx rhs = 0.0;
        for (int f = 0; f < 2; ++f) rhs += t.at_bits(c, a, b, d, e, f) * R(c, f, d) * t.at_bits(a, b, c, d, f, g);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

bool check_ribbon(Anyon i, Anyon j, Anyon m, double tol) {
    if (!admissible(i, j, m)) throw std::invalid_argument("no such fusion channel");
    cplx lhs = r_symbol(i, j, m) * r_symbol(j, i, m);
    cplx rhs = twist(m) / (twist(i) * twist(j));
    return std::abs(lhs - rhs) < tol;
}

bool DoubledLabel::operator<(const DoubledLabel& o) const {
    auto key = [](const DoubledLabel& x) {
        int c = x.component ? 1 + 2 * bit(x.component->first) + bit(x.component->second) : 0;
        return std::make_tuple(bit(x.right), bit(x.left), c);
    };
    return key(*this) < key(o);
}

std::string DoubledLabel::name() const {
    if (right == Anyon::One && left == Anyon::One) return "11";
    if (right == Anyon::Tau && left == Anyon::One) return "tau1";
    if (right == Anyon::One && left == Anyon::Tau) return "1taubar";
    std::string s = "tautaubar";
    if (component) s += "_" + std::string(bit(component->first) ? "tau" : "1") + (bit(component->second) ? "tau" : "1");
    return s;
}

DoubledLabel vacuum_label() { return {Anyon::One, Anyon::One, std::nullopt}; }
DoubledLabel tau_one() { return {Anyon::Tau, Anyon::One, std::nullopt}; }
DoubledLabel one_taubar() { return {Anyon::One, Anyon::Tau, std::nullopt}; }
DoubledLabel tau_taubar(std::optional<std::pair<Anyon, Anyon>> comp) { return {Anyon::Tau, Anyon::Tau, comp}; }

std::vector<DoubledLabel> doubled_fuse(const DoubledLabel& x, const DoubledLabel& y) {
    std::vector<DoubledLabel> out;
    for (Anyon r : fuse(x.right, y.right))
        for (Anyon l : fuse(x.left, y.left)) out.push_back({r, l, std::nullopt});
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace dfib
