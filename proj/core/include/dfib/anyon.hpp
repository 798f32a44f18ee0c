#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dfib {

using cplx = std::complex<double>;

enum class Anyon : int { One = 0, Tau = 1 };

constexpr double kPi = 3.14159265358979323846;
constexpr double kGolden = 1.61803398874989484820;
// sqrt(1 + golden^2)
constexpr double kTotalDim = 1.90211303259030714423;

// e^{3 pi i/5}, the phase that shows up throughout the gate definitions
cplx phase_3pi_5();
cplx expi(double angle);

inline int bit(Anyon a) { return static_cast<int>(a); }
inline Anyon anyon(int b) { return b ? Anyon::Tau : Anyon::One; }
std::string to_string(Anyon a);

std::vector<Anyon> fuse(Anyon a, Anyon b);
bool admissible(Anyon a, Anyon b, Anyon c);
// number of tau legs is exactly one -> forbidden
inline bool admissible_bits(int a, int b, int c) { return a + b + c != 1; }

// F^{abc}_{d;ef}: (a,b)->e, (e,c)->d, (b,c)->f, (a,f)->d.
class FSymbolTable {
public:
    static FSymbolTable fibonacci();

    cplx operator()(Anyon a, Anyon b, Anyon c, Anyon d, Anyon e, Anyon f) const;
    cplx at_bits(int a, int b, int c, int d, int e, int f) const { return entries_[index(a, b, c, d, e, f)]; }
    void set(Anyon a, Anyon b, Anyon c, Anyon d, Anyon e, Anyon f, cplx v);

private:
    static int index(int a, int b, int c, int d, int e, int f) {
        return (a << 5) | (b << 4) | (c << 3) | (d << 2) | (e << 1) | f;
    }
    std::array<cplx, 64> entries_{};
};

cplx f_symbol(Anyon a, Anyon b, Anyon c, Anyon d, Anyon e, Anyon f);
cplx r_symbol(Anyon i, Anyon j, Anyon m);
cplx twist(Anyon a);

struct CategoryData {
    double golden;
    std::array<double, 2> dims;
    double total_dim;
    std::array<cplx, 2> spin;
    std::array<std::array<cplx, 2>, 2> s_matrix;

    static CategoryData fibonacci();
};

// largest residual of the pentagon equation over all 2^9 label choices
double pentagon_residual(const FSymbolTable& t);
bool check_pentagon(const FSymbolTable& t, double tol);
double hexagon_residual(const FSymbolTable& t);

// throws std::invalid_argument when m is not a fusion channel of i x j
bool check_ribbon(Anyon i, Anyon j, Anyon m, double tol);

struct DoubledLabel {
    Anyon right = Anyon::One;
    Anyon left = Anyon::One;
    std::optional<std::pair<Anyon, Anyon>> component;

    bool operator==(const DoubledLabel&) const = default;
    bool operator<(const DoubledLabel& o) const;
    std::string name() const;
};

DoubledLabel vacuum_label();
DoubledLabel tau_one();
DoubledLabel one_taubar();
DoubledLabel tau_taubar(std::optional<std::pair<Anyon, Anyon>> comp = std::nullopt);

// componentwise; ττ̄ outcomes are reported without a component
std::vector<DoubledLabel> doubled_fuse(const DoubledLabel& x, const DoubledLabel& y);

} // namespace dfib
