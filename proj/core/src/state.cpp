#include "dfib/state.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dfib {

GateMatrix::GateMatrix(std::size_t d, std::vector<cplx> entries) : dim(d), m(std::move(entries)) {
    if (m.size() != d * d) throw std::invalid_argument("gate matrix size mismatch");
}

GateMatrix GateMatrix::identity(std::size_t d) {
    GateMatrix g(d);
    for (std::size_t i = 0; i < d; ++i) g(i, i) = 1.0;
    return g;
}

int GateMatrix::qubits() const {
    int q = 0;
    while ((std::size_t{1} << q) < dim) ++q;
    if ((std::size_t{1} << q) != dim) throw std::invalid_argument("gate dimension is not a power of two");
    return q;
}

GateMatrix GateMatrix::operator*(const GateMatrix& o) const {
    if (dim != o.dim) throw std::invalid_argument("dimension mismatch");
    GateMatrix r(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t k = 0; k < dim; ++k) {
            cplx a = (*this)(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < dim; ++j) r(i, j) += a * o(k, j);
        }
    return r;
}

GateMatrix GateMatrix::adjoint() const {
    GateMatrix r(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

GateMatrix GateMatrix::conjugate() const {
    GateMatrix r = *this;
    for (auto& x : r.m) x = std::conj(x);
    return r;
}

double max_abs_diff(const GateMatrix& a, const GateMatrix& b) {
    if (a.dim != b.dim) throw std::invalid_argument("dimension mismatch");
    double w = 0.0;
    for (std::size_t i = 0; i < a.m.size(); ++i) w = std::max(w, std::abs(a.m[i] - b.m[i]));
    return w;
}

bool check_unitary(const GateMatrix& g, double tol) {
    return max_abs_diff(g.adjoint() * g, GateMatrix::identity(g.dim)) < tol;
}

StateVector::StateVector(int n, std::vector<cplx> amps) : n_(n), amps_(std::move(amps)) {
    if (n < 0 || n > kMaxQubits) throw std::invalid_argument("qubit count out of range");
    if (amps_.size() != (std::size_t{1} << n)) throw std::invalid_argument("amplitude count mismatch");
}

double StateVector::norm() const {
    double s = 0.0;
    for (auto a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

StateVector new_state(int n, std::uint64_t basis) {
    if (n < 0 || n > kMaxQubits) throw std::invalid_argument("qubit count out of range");
    if (basis >= (std::uint64_t{1} << n)) throw std::out_of_range("basis index out of range");
    std::vector<cplx> a(std::size_t{1} << n, 0.0);
    a[basis] = 1.0;
    return StateVector(n, std::move(a));
}

StateVector basis_from_string(const std::string& bits) {
    std::uint64_t idx = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw std::invalid_argument("bad bit string");
        idx = (idx << 1) | static_cast<std::uint64_t>(c - '0');
    }
    return new_state(static_cast<int>(bits.size()), idx);
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    std::vector<cplx> out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
    return StateVector(a.qubits() + b.qubits(), std::move(out));
}

void validate_op(const CircuitOp& op, int n) {
    if (op.controls.size() != op.control_values.size()) throw std::invalid_argument("control value count mismatch");
    if (op.targets.empty()) throw std::invalid_argument("op without targets");
    std::vector<int> all = op.targets;
    all.insert(all.end(), op.controls.begin(), op.controls.end());
    for (int q : all)
        if (q < 0 || q >= n) throw std::out_of_range("qubit index out of range");
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw std::invalid_argument("targets and controls must be distinct");
    if (op.matrix.dim != (std::size_t{1} << op.targets.size()))
        throw std::invalid_argument("gate dimension does not match target count");
    for (int v : op.control_values)
        if (v != 0 && v != 1) throw std::invalid_argument("control values are bits");
}

void apply_op_inplace(StateVector& s, const CircuitOp& op) {
    const int n = s.qubits();
    validate_op(op, n);
    const std::size_t k = op.targets.size();
    const std::size_t dim = op.matrix.dim;

    std::uint64_t cmask = 0, cval = 0, tmask = 0;
    for (std::size_t i = 0; i < op.controls.size(); ++i) {
        std::uint64_t b = std::uint64_t{1} << (n - 1 - op.controls[i]);
        cmask |= b;
        if (op.control_values[i]) cval |= b;
    }
    std::vector<std::uint64_t> offs(dim, 0);
    for (std::size_t t = 0; t < k; ++t) tmask |= std::uint64_t{1} << (n - 1 - op.targets[t]);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t t = 0; t < k; ++t)
            if ((r >> (k - 1 - t)) & 1u) offs[r] |= std::uint64_t{1} << (n - 1 - op.targets[t]);

    auto& a = s.amps();
    std::vector<cplx> in(dim), out(dim);
    for (std::uint64_t base = 0; base < a.size(); ++base) {
        if (base & tmask) continue;
        if ((base & cmask) != cval) continue;
        for (std::size_t r = 0; r < dim; ++r) in[r] = a[base | offs[r]];
        for (std::size_t r = 0; r < dim; ++r) {
            cplx acc = 0.0;
            const cplx* row = &op.matrix.m[r * dim];
            for (std::size_t c = 0; c < dim; ++c) acc += row[c] * in[c];
            out[r] = acc;
        }
        for (std::size_t r = 0; r < dim; ++r) a[base | offs[r]] = out[r];
    }
}

StateVector apply_op(StateVector s, const CircuitOp& op) {
    apply_op_inplace(s, op);
    return s;
}

StateVector run_circuit(StateVector s, const Circuit& c) {
    if (c.n_qubits != s.qubits()) throw std::invalid_argument("circuit/state qubit count mismatch");
    for (const auto& op : c.ops)
        if (op.executed) apply_op_inplace(s, op);
    return s;
}

cplx amplitude(const StateVector& s, std::uint64_t basis) {
    if (basis >= s.size()) throw std::out_of_range("basis index out of range");
    return s[basis];
}

double marginal_probability(const StateVector& s, int qubit, int value) {
    if (qubit < 0 || qubit >= s.qubits()) throw std::out_of_range("qubit index out of range");
    double p = 0.0;
    for (std::uint64_t i = 0; i < s.size(); ++i)
        if (qubit_bit(i, s.qubits(), qubit) == value) p += std::norm(s[i]);
    return p;
}

Projection project_qubit(const StateVector& s, int qubit, int value) {
    Projection r;
    r.probability = marginal_probability(s, qubit, value);
    if (r.probability < kCollapseThreshold) throw std::domain_error("zero-probability branch");
    std::vector<cplx> a(s.size(), 0.0);
    const double scale = 1.0 / std::sqrt(r.probability);
    for (std::uint64_t i = 0; i < s.size(); ++i)
        if (qubit_bit(i, s.qubits(), qubit) == value) a[i] = s[i] * scale;
    r.collapsed = StateVector(s.qubits(), std::move(a));
    r.valid = true;
    return r;
}

namespace {
// 53 random bits from mt19937_64 mapped to [0,1); avoids the implementation-defined
// std::uniform_real_distribution so histograms match across standard libraries.
double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
}

std::vector<std::uint64_t> sample_categorical(const std::vector<double>& probs, std::uint64_t shots,
                                              std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("shots must be positive");
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) cdf[i] = (acc += probs[i]);
    std::vector<std::uint64_t> counts(probs.size(), 0);
    std::mt19937_64 gen(seed);
    for (std::uint64_t s = 0; s < shots; ++s) {
        double u = uniform01(gen) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t k = static_cast<std::size_t>(it - cdf.begin());
        if (it == cdf.end())
            for (k = probs.size() - 1; k > 0 && probs[k] <= 0.0; --k) {
            }
        ++counts[k];
    }
    return counts;
}

std::map<std::uint64_t, std::uint64_t> sample_counts(const StateVector& s, const std::vector<int>& qubits,
                                                     std::uint64_t shots, std::uint64_t seed) {
    const int n = s.qubits();
    for (int q : qubits)
        if (q < 0 || q >= n) throw std::out_of_range("qubit index out of range");
    std::vector<double> probs(std::size_t{1} << qubits.size(), 0.0);
    for (std::uint64_t i = 0; i < s.size(); ++i) {
        std::uint64_t key = 0;
        for (int q : qubits) key = (key << 1) | static_cast<std::uint64_t>(qubit_bit(i, n, q));
        probs[key] += std::norm(s[i]);
    }
    auto counts = sample_categorical(probs, shots, seed);
    std::map<std::uint64_t, std::uint64_t> hist;
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (counts[k]) hist[k] = counts[k];
    return hist;
}

double wrap_phase(double a) {
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

double relative_phase(const StateVector& s, std::uint64_t a, std::uint64_t b) {
    cplx x = amplitude(s, a), y = amplitude(s, b);
    if (std::abs(x) < 1e-12 || std::abs(y) < 1e-12) throw std::domain_error("vanishing amplitude");
    return wrap_phase(std::arg(y) - std::arg(x));
}

cplx inner_product(const StateVector& a, const StateVector& b) {
    if (a.qubits() != b.qubits()) throw std::invalid_argument("size mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner_product(a, b)); }

} // namespace dfib
