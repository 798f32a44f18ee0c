#include "dfib/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dfib {

namespace {

struct KindInfo {
    LatticeKind kind;
    const char* name;
    int qubits;
};

constexpr KindInfo kKinds[] = {
    {LatticeKind::SingleEdge, "single-edge", 1},
    {LatticeKind::Theta, "theta", 3},
    {LatticeKind::Tetrahedron, "tetrahedron", 6},
    {LatticeKind::GeneralizedTadpole, "generalized-tadpole", 4},
    {LatticeKind::TailedTheta, "tailed-theta", 9},
    {LatticeKind::TailedTetrahedron, "tailed-tetrahedron", 14},
};

std::vector<HalfEdge> rotate_to(const std::vector<HalfEdge>& ring, HalfEdge h) {
    auto it = std::find(ring.begin(), ring.end(), h);
    std::vector<HalfEdge> out(it, ring.end());
    out.insert(out.end(), ring.begin(), it);
    return out;
}

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
    void join(int a, int b) { p[find(a)] = find(b); }
};

} // namespace

std::string to_string(LatticeKind k) {
    for (const auto& i : kKinds)
        if (i.kind == k) return i.name;
    return "?";
}

LatticeKind parse_lattice_kind(const std::string& s) {
    for (const auto& i : kKinds)
        if (s == i.name) return i.kind;
    throw std::invalid_argument("unknown lattice: " + s);
}

const std::vector<LatticeKind>& all_lattice_kinds() {
    static const std::vector<LatticeKind> v = [] {
        std::vector<LatticeKind> r;
        for (const auto& i : kKinds) r.push_back(i.kind);
        return r;
    }();
    return v;
}

int qubit_count(LatticeKind k) {
    for (const auto& i : kKinds)
        if (i.kind == k) return i.qubits;
    return 0;
}

std::string qubit_name(int edge) { return "q" + std::to_string(edge + 1); }

Lattice::Lattice(LatticeKind kind, int n_edges, std::vector<Vertex> vertices, const std::vector<PlaquetteSeed>& seeds)
    : kind_(kind), n_edges_(n_edges), vertices_(std::move(vertices)) {
    for (std::size_t v = 0; v < vertices_.size(); ++v)
        for (auto h : vertices_[v].ring) {
            if (h.edge < 0 || h.edge >= n_edges_ || (h.end != 0 && h.end != 1))
                throw std::invalid_argument("half-edge out of range");
            if (!where_.emplace(h, static_cast<int>(v)).second) throw std::invalid_argument("half-edge listed twice");
        }
    if (where_.size() != static_cast<std::size_t>(2 * n_edges_)) throw std::invalid_argument("dangling half-edge");
    trace_faces(nullptr, &seeds);
}

int Lattice::vertex_of(HalfEdge h) const {
    auto it = where_.find(h);
    if (it == where_.end()) throw std::out_of_range("unknown half-edge");
    return it->second;
}

HalfEdge Lattice::next_ccw(HalfEdge h) const {
    const auto& ring = vertices_[vertex_of(h)].ring;
    auto it = std::find(ring.begin(), ring.end(), h);
    ++it;
    return it == ring.end() ? ring.front() : *it;
}

bool Lattice::is_tail(int edge) const {
    return vertices_[vertex_of({edge, 0})].ring.size() == 1 || vertices_[vertex_of({edge, 1})].ring.size() == 1;
}

int Lattice::plaquette_index(const std::string& name) const {
    for (std::size_t i = 0; i < plaquettes_.size(); ++i)
        if (plaquettes_[i].name == name) return static_cast<int>(i);
    throw std::out_of_range("unknown plaquette: " + name);
}

int Lattice::plaquette_of(HalfEdge dart) const {
    for (std::size_t i = 0; i < plaquettes_.size(); ++i)
        for (auto d : plaquettes_[i].darts)
            if (d == dart) return static_cast<int>(i);
    throw std::out_of_range("dart not on any face");
}

std::vector<int> Lattice::incident_edges(int vertex) const {
    std::vector<int> out;
    for (auto h : vertices_.at(vertex).ring) out.push_back(h.edge);
    return out;
}

bool Lattice::adjacent(int edge, int plaquette) const {
    for (auto d : plaquettes_.at(plaquette).darts)
        if (d.edge == edge) return true;
    return false;
}

void Lattice::trace_faces(const std::vector<Plaquette>* previous, const std::vector<PlaquetteSeed>* seeds, int moved) {
    std::vector<Plaquette> faces;
    std::set<HalfEdge> seen;
    for (int e = 0; e < n_edges_; ++e)
        for (int end = 0; end < 2; ++end) {
            HalfEdge d{e, end};
            if (seen.count(d)) continue;
            Plaquette f;
            for (HalfEdge x = d; !seen.count(x); x = face_next(x)) {
                seen.insert(x);
                f.darts.push_back(x);
            }
            for (auto x : f.darts) {
                if (is_tail(x.edge)) {
                    if (std::find(f.tails.begin(), f.tails.end(), x.edge) == f.tails.end()) f.tails.push_back(x.edge);
                } else if (f.boundary.empty() || f.boundary.back() != x.edge) {
                    f.boundary.push_back(x.edge);
                }
            }
            faces.push_back(std::move(f));
        }

    std::vector<Plaquette> named;
    std::vector<bool> used(faces.size(), false);
    auto take = [&](std::size_t i, const std::string& name, bool outer) {
        used[i] = true;
        faces[i].name = name;
        faces[i].outer = outer;
        named.push_back(faces[i]);
    };
    if (seeds && seeds->empty()) {
        for (std::size_t i = 0; i < faces.size(); ++i) take(i, "f" + std::to_string(i + 1), false);
    } else if (seeds) {
        for (const auto& s : *seeds) {
            bool found = false;
            for (std::size_t i = 0; i < faces.size() && !found; ++i) {
                if (used[i]) continue;
                if (std::find(faces[i].darts.begin(), faces[i].darts.end(), s.dart) != faces[i].darts.end()) {
                    take(i, s.name, s.outer);
                    found = true;
                }
            }
            if (!found) throw std::invalid_argument("plaquette seed does not match a free face: " + s.name);
        }
    } else {
        // faces keep their identity through darts of edges that did not move
        const auto& prev = *previous;
        std::vector<std::vector<std::size_t>> hits(prev.size(), std::vector<std::size_t>(faces.size(), 0));
        for (std::size_t a = 0; a < prev.size(); ++a)
            for (std::size_t i = 0; i < faces.size(); ++i)
                for (auto d : faces[i].darts)
                    if (d.edge != moved && std::find(prev[a].darts.begin(), prev[a].darts.end(), d) != prev[a].darts.end())
                        ++hits[a][i];
        std::vector<bool> done(prev.size(), false);
        std::vector<std::pair<std::size_t, std::size_t>> match;
        for (std::size_t round = 0; round < prev.size(); ++round) {
            std::size_t ba = 0, bi = 0, best = 0;
            for (std::size_t a = 0; a < prev.size(); ++a)
                for (std::size_t i = 0; i < faces.size(); ++i)
                    if (!done[a] && !used[i] && hits[a][i] > best) ba = a, bi = i, best = hits[a][i];
            if (best == 0) throw std::logic_error("lost track of a plaquette");
            done[ba] = used[bi] = true;
            match.emplace_back(ba, bi);
        }
        std::sort(match.begin(), match.end());
        std::fill(used.begin(), used.end(), false);
        for (auto [a, i] : match) take(i, prev[a].name, prev[a].outer);
    }
    if (named.size() != faces.size()) throw std::invalid_argument("unnamed face");
    plaquettes_ = std::move(named);
}

bool Lattice::can_fmove(int edge) const {
    if (edge < 0 || edge >= n_edges_) return false;
    int u = vertex_of({edge, 0}), v = vertex_of({edge, 1});
    return u != v && vertices_[u].ring.size() == 3 && vertices_[v].ring.size() == 3;
}

FMoveSpec Lattice::fmove_spec(int edge) const {
    if (!can_fmove(edge)) throw std::invalid_argument("no F-move on " + qubit_name(edge));
    auto lu = rotate_to(vertices_[vertex_of({edge, 0})].ring, {edge, 0});
    auto lv = rotate_to(vertices_[vertex_of({edge, 1})].ring, {edge, 1});
    return make_fmove_spec(edge, {lu[1].edge, lu[2].edge, lv[1].edge, lv[2].edge});
}

Lattice Lattice::after_fmove(int edge) const {
    if (!can_fmove(edge)) throw std::invalid_argument("no F-move on " + qubit_name(edge));
    int u = vertex_of({edge, 0}), v = vertex_of({edge, 1});
    auto lu = rotate_to(vertices_[u].ring, {edge, 0});
    auto lv = rotate_to(vertices_[v].ring, {edge, 1});
    Lattice out = *this;
    out.vertices_[u].ring = {lu[0], lu[2], lv[1]};
    out.vertices_[v].ring = {lv[0], lv[2], lu[1]};
    out.where_[lu[2]] = u, out.where_[lv[1]] = u;
    out.where_[lv[2]] = v, out.where_[lu[1]] = v;
    out.trace_faces(&plaquettes_, nullptr, edge);
    return out;
}

int Lattice::euler_characteristic() const {
    return static_cast<int>(vertices_.size()) - n_edges_ + static_cast<int>(plaquettes_.size());
}

std::string Lattice::signature() const {
    std::vector<std::string> parts;
    for (const auto& v : vertices_) {
        auto ring = rotate_to(v.ring, *std::min_element(v.ring.begin(), v.ring.end()));
        std::ostringstream os;
        for (auto h : ring) os << h.edge << (h.end ? '+' : '-');
        parts.push_back(os.str());
    }
    std::sort(parts.begin(), parts.end());
    std::ostringstream os;
    for (const auto& p : parts) os << p << '|';
    return os.str();
}

Lattice build_lattice(LatticeKind kind) {
    using V = Vertex;
    using S = Lattice::PlaquetteSeed;
    switch (kind) {
    case LatticeKind::SingleEdge:
        return Lattice(kind, 1, {V{"v1", {{0, 0}, {0, 1}}}}, {S{"p1", {0, 0}}, S{"p2", {0, 1}, true}});
    case LatticeKind::Theta:
        return Lattice(kind, 3, {V{"v1", {{1, 0}, {0, 1}, {2, 0}}}, V{"v2", {{1, 1}, {2, 1}, {0, 0}}}},
                       {S{"p1", {2, 1}}, S{"p2", {0, 1}}, S{"p3", {0, 0}, true}});
    case LatticeKind::Tetrahedron:
        return Lattice(kind, 6,
                       {V{"v1", {{4, 1}, {1, 1}, {5, 0}}}, V{"v2", {{0, 0}, {4, 0}, {3, 0}}},
                        V{"v3", {{0, 1}, {2, 0}, {1, 0}}}, V{"v4", {{2, 1}, {3, 1}, {5, 1}}}},
                       {S{"p1", {0, 0}}, S{"p2", {0, 1}}, S{"p3", {1, 0}}, S{"p4", {3, 0}, true}});
    case LatticeKind::GeneralizedTadpole:
        return Lattice(kind, 4,
                       {V{"j1", {{0, 0}, {1, 0}, {2, 0}}}, V{"j2", {{0, 1}, {1, 1}, {3, 0}}}, V{"t3", {{2, 1}}},
                        V{"t4", {{3, 1}}}},
                       {S{"p1", {3, 0}}, S{"p2", {2, 0}, true}});
    case LatticeKind::TailedTheta:
        return Lattice(kind, 9,
                       {V{"v1", {{1, 0}, {0, 0}, {6, 0}}}, V{"v2", {{2, 1}, {0, 1}, {4, 0}}},
                        V{"v3", {{2, 0}, {7, 0}, {3, 0}}}, V{"v4", {{5, 0}, {4, 1}, {8, 0}}},
                        V{"v5", {{3, 1}, {5, 1}, {1, 1}}}, V{"t7", {{6, 1}}}, V{"t8", {{7, 1}}}, V{"t9", {{8, 1}}}},
                       {S{"p1", {6, 0}}, S{"p2", {7, 0}}, S{"p3", {8, 0}, true}});
    case LatticeKind::TailedTetrahedron: {
        Lattice tet = build_lattice(LatticeKind::Tetrahedron);
        std::vector<Vertex> vs = tet.vertices();
        // one boundary edge per plaquette gets a junction whose tail points inside
        const int split[4] = {2, 0, 1, 4};
        std::vector<S> seeds;
        for (int p = 0; p < 4; ++p) {
            const int e = split[p], seg = 6 + p, tail = 10 + p;
            HalfEdge d{-1, 0};
            for (auto x : tet.plaquettes()[p].darts)
                if (x.edge == e) d = x;
            HalfEdge arrive = d.twin();
            for (auto& v : vs)
                for (auto& h : v.ring)
                    if (h == arrive) h = {seg, 1};
            vs.push_back(V{"j" + std::to_string(p + 1), {arrive, {tail, 0}, {seg, 0}}});
            vs.push_back(V{"t" + std::to_string(p + 1), {{tail, 1}}});
            seeds.push_back(S{tet.plaquettes()[p].name, {tail, 0}, tet.plaquettes()[p].outer});
        }
        return Lattice(kind, 14, vs, seeds);
    }
    }
    throw std::invalid_argument("unknown lattice kind");
}

double vertex_projector_expectation(const StateVector& s, const Lattice& l, int vertex) {
    if (vertex < 0 || vertex >= static_cast<int>(l.vertices().size())) throw std::out_of_range("unknown vertex");
    if (s.qubits() != l.edge_count()) throw std::invalid_argument("state does not match lattice");
    const auto& ring = l.vertices()[vertex].ring;
    if (ring.size() != 3) return 1.0;
    double p = 0.0;
    for (std::uint64_t i = 0; i < s.size(); ++i) {
        int active = 0;
        for (auto h : ring) active += qubit_bit(i, s.qubits(), h.edge);
        if (active != 1) p += std::norm(s[i]);
    }
    return p;
}

std::vector<int> Tadpole::qubits() const {
    if (generalized) return {h1, h2, t_out, t_in};
    if (t_out >= 0) return {h1, t_out};
    return {h1};
}

std::vector<int> ring_side(const Lattice& l, const std::vector<int>& ring_edges, int plaquette) {
    const auto& ps = l.plaquettes();
    UnionFind uf(ps.size());
    for (int e = 0; e < l.edge_count(); ++e) {
        if (std::find(ring_edges.begin(), ring_edges.end(), e) != ring_edges.end()) continue;
        uf.join(l.plaquette_of({e, 0}), l.plaquette_of({e, 1}));
    }
    std::vector<int> side;
    for (std::size_t i = 0; i < ps.size(); ++i)
        if (uf.find(static_cast<int>(i)) == uf.find(plaquette)) side.push_back(static_cast<int>(i));
    return side;
}

std::optional<Tadpole> find_tadpole(const Lattice& l, std::vector<int> side) {
    std::sort(side.begin(), side.end());
    const int np = static_cast<int>(l.plaquettes().size());
    auto complement = [&](const std::vector<int>& s) {
        std::vector<int> c;
        for (int i = 0; i < np; ++i)
            if (!std::binary_search(s.begin(), s.end(), i)) c.push_back(i);
        return c;
    };
    auto splits = [&](const std::vector<int>& ring) -> bool {
        auto a = ring_side(l, ring, l.plaquette_of({ring[0], 0}));
        auto b = ring_side(l, ring, l.plaquette_of({ring[0], 1}));
        if (a == b) return false;
        return a == side || b == side;
    };
    const int n = l.edge_count();
    for (int e = 0; e < n; ++e) {
        if (l.is_tail(e)) continue;
        int u = l.vertex_of({e, 0});
        if (u != l.vertex_of({e, 1})) continue;
        if (!splits({e})) continue;
        Tadpole t;
        t.h1 = e;
        for (auto h : l.vertices()[u].ring)
            if (h.edge != e) t.t_out = h.edge;
        t.inner = side;
        return t;
    }
    for (int e = 0; e < n; ++e)
        for (int f = e + 1; f < n; ++f) {
            if (l.is_tail(e) || l.is_tail(f)) continue;
            int u = l.vertex_of({e, 0}), v = l.vertex_of({e, 1});
            if (u == v) continue;
            int fu = l.vertex_of({f, 0}), fv = l.vertex_of({f, 1});
            if (!((fu == u && fv == v) || (fu == v && fv == u))) continue;
            if (l.vertices()[u].ring.size() != 3 || l.vertices()[v].ring.size() != 3) continue;
            auto third = [&](int w) {
                for (auto h : l.vertices()[w].ring)
                    if (h.edge != e && h.edge != f) return h;
                return HalfEdge{};
            };
            HalfEdge tu = third(u), tv = third(v);
            if (tu.edge == tv.edge) continue;
            if (!splits({e, f})) continue;
            bool u_inside = std::binary_search(side.begin(), side.end(), l.plaquette_of(tu));
            bool v_inside = std::binary_search(side.begin(), side.end(), l.plaquette_of(tv));
            if (u_inside == v_inside) continue;
            HalfEdge tin = u_inside ? tu : tv, tout = u_inside ? tv : tu;
            auto rin = rotate_to(l.vertices()[l.vertex_of(tin)].ring, tin);
            auto rout = rotate_to(l.vertices()[l.vertex_of(tout)].ring, tout);
            if (rin[1].edge != rout[1].edge) continue;
            Tadpole t;
            t.generalized = true;
            t.h1 = rin[1].edge, t.h2 = rin[2].edge, t.t_in = tin.edge, t.t_out = tout.edge;
            t.inner = side;
            return t;
        }
    (void)complement;
    return std::nullopt;
}

std::vector<TadpoleSector> tadpole_sectors(const Tadpole& t) {
    if (t.generalized)
        return {TadpoleSector::Vac,  TadpoleSector::TauOne, TadpoleSector::OneTauBar, TadpoleSector::TT11,
                TadpoleSector::TT1T, TadpoleSector::TTT1,   TadpoleSector::TTTT};
    if (t.t_out >= 0) return {TadpoleSector::Vac, TadpoleSector::TT11, TadpoleSector::TT1T};
    return {TadpoleSector::Vac, TadpoleSector::TT11};
}

std::vector<cplx> tadpole_reference(const Tadpole& t, TadpoleSector s) {
    if (t.generalized) return generalized_tadpole_vector(s);
    const double d = kTotalDim, p = kGolden;
    const bool tail = t.t_out >= 0;
    switch (s) {
    case TadpoleSector::Vac:
        return tail ? std::vector<cplx>{1.0 / d, 0.0, p / d, 0.0} : std::vector<cplx>{1.0 / d, p / d};
    case TadpoleSector::TT11:
        return tail ? std::vector<cplx>{p / d, 0.0, -1.0 / d, 0.0} : std::vector<cplx>{p / d, -1.0 / d};
    case TadpoleSector::TT1T:
        if (tail) return {0.0, 0.0, 0.0, 1.0};
        break;
    default: break;
    }
    throw std::invalid_argument("sector " + to_string(s) + " does not exist on this tadpole");
}

StateVector tadpole_reference_state(const DoubledLabel& label, bool tailed) {
    TadpoleSector s;
    if (label == vacuum_label()) s = TadpoleSector::Vac;
    else if (label == tau_one()) s = TadpoleSector::TauOne;
    else if (label == one_taubar()) s = TadpoleSector::OneTauBar;
    else if (!label.component) throw std::invalid_argument("tautaubar needs a component");
    else {
        int c = 2 * bit(label.component->first) + bit(label.component->second);
        const TadpoleSector comps[4] = {TadpoleSector::TT11, TadpoleSector::TT1T, TadpoleSector::TTT1,
                                        TadpoleSector::TTTT};
        s = comps[c];
    }
    if (tailed) return StateVector(4, generalized_tadpole_vector(s));
    if (s != TadpoleSector::Vac && s != TadpoleSector::TT11)
        throw std::invalid_argument("label not available on a tadpole without tails");
    Tadpole t;
    t.h1 = 0, t.t_out = 1;
    return StateVector(2, tadpole_reference(t, s));
}

double ChargeDistribution::total() const { return std::accumulate(probability.begin(), probability.end(), 0.0); }

double ChargeDistribution::prob(TadpoleSector s) const {
    for (std::size_t i = 0; i < sectors.size(); ++i)
        if (sectors[i] == s) return probability[i];
    return 0.0;
}

cplx ChargeDistribution::amp(TadpoleSector s) const {
    for (std::size_t i = 0; i < sectors.size(); ++i)
        if (sectors[i] == s) return amplitude[i];
    return 0.0;
}

std::map<std::string, double> ChargeDistribution::by_label() const {
    std::map<std::string, double> out{{"11", 0.0}, {"tau1", 0.0}, {"1taubar", 0.0}, {"tautaubar", 0.0}};
    for (std::size_t i = 0; i < sectors.size(); ++i) {
        auto d = to_doubled(sectors[i]);
        std::string key = d.component ? "tautaubar" : d.name();
        out[key] += probability[i];
    }
    return out;
}

ChargeDistribution decompose_tadpole(const StateVector& s, const Tadpole& t) {
    const int n = s.qubits();
    const auto qs = t.qubits();
    const int k = static_cast<int>(qs.size());
    std::vector<int> rest;
    for (int q = 0; q < n; ++q)
        if (std::find(qs.begin(), qs.end(), q) == qs.end()) rest.push_back(q);

    ChargeDistribution cd;
    cd.sectors = tadpole_sectors(t);
    std::vector<std::vector<cplx>> refs;
    for (auto sec : cd.sectors) refs.push_back(tadpole_reference(t, sec));
    std::vector<std::vector<cplx>> parts(cd.sectors.size(), std::vector<cplx>(std::size_t{1} << rest.size(), 0.0));
    for (std::uint64_t i = 0; i < s.size(); ++i) {
        if (s[i] == 0.0) continue;
        std::size_t c = 0, r = 0;
        for (int q : qs) c = (c << 1) | static_cast<std::size_t>(qubit_bit(i, n, q));
        for (int q : rest) r = (r << 1) | static_cast<std::size_t>(qubit_bit(i, n, q));
        for (std::size_t j = 0; j < refs.size(); ++j)
            if (refs[j][c] != 0.0) parts[j][r] += std::conj(refs[j][c]) * s[i];
    }
    (void)k;
    auto dot = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        cplx x = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) x += std::conj(a[i]) * b[i];
        return x;
    };
    int ref = -1;
    for (std::size_t j = 0; j < parts.size(); ++j) {
        double p = std::real(dot(parts[j], parts[j]));
        cd.probability.push_back(p);
        if (ref < 0 && p > 1e-20) ref = static_cast<int>(j);
    }
    for (std::size_t j = 0; j < parts.size(); ++j) {
        if (ref < 0 || cd.probability[j] <= 1e-20) {
            cd.amplitude.push_back(0.0);
            continue;
        }
        cplx ov = dot(parts[ref], parts[j]) / std::sqrt(cd.probability[ref]);
        if (std::abs(std::norm(ov) - cd.probability[j]) > 1e-10) cd.coherent = false;
        cd.amplitude.push_back(ov);
    }
    if (!cd.coherent)
        for (std::size_t j = 0; j < parts.size(); ++j) cd.amplitude[j] = std::sqrt(cd.probability[j]);
    return cd;
}

namespace {

std::optional<std::vector<Tadpole>> resolve_nesting(const Lattice& l, const std::vector<std::string>& nesting) {
    std::vector<Tadpole> out;
    std::vector<int> side;
    for (const auto& name : nesting) {
        side.push_back(l.plaquette_index(name));
        auto t = find_tadpole(l, side);
        if (!t) return std::nullopt;
        out.push_back(*t);
    }
    return out;
}

void check_nesting(const Lattice& l, const std::vector<std::string>& nesting) {
    std::set<std::string> seen;
    for (const auto& n : nesting) {
        l.plaquette_index(n);
        if (!seen.insert(n).second) throw std::invalid_argument("plaquette repeated in nesting: " + n);
    }
    if (nesting.empty() || nesting.size() >= l.plaquettes().size())
        throw std::invalid_argument("nesting must list between one and all-but-one plaquettes");
}

} // namespace

ReductionPlan plan_from_moves(const Lattice& l, const std::vector<int>& edges, const std::vector<std::string>& nesting) {
    check_nesting(l, nesting);
    ReductionPlan plan;
    plan.start = l;
    plan.nesting = nesting;
    Lattice cur = l;
    for (int e : edges) {
        Lattice next = cur.after_fmove(e);
        plan.steps.push_back({cur.fmove_spec(e), cur, next});
        cur = std::move(next);
    }
    auto t = resolve_nesting(cur, nesting);
    if (!t) throw std::runtime_error("move sequence does not reach a concentric tadpole basis");
    plan.tadpoles = *t;
    return plan;
}

ReductionPlan reduction_plan(const Lattice& l, const std::vector<std::string>& nesting, int max_depth) {
    check_nesting(l, nesting);
    struct Node {
        Lattice lat;
        std::vector<int> moves;
    };
    std::deque<Node> queue{{l, {}}};
    std::set<std::string> visited{l.signature()};
    while (!queue.empty()) {
        Node node = std::move(queue.front());
        queue.pop_front();
        if (resolve_nesting(node.lat, nesting)) return plan_from_moves(l, node.moves, nesting);
        if (static_cast<int>(node.moves.size()) >= max_depth) continue;
        for (int e = 0; e < l.edge_count(); ++e) {
            if (!node.lat.can_fmove(e)) continue;
            Lattice next = node.lat.after_fmove(e);
            if (!visited.insert(next.signature()).second) continue;
            auto moves = node.moves;
            moves.push_back(e);
            queue.push_back({std::move(next), std::move(moves)});
        }
    }
    throw std::runtime_error("no reduction plan reaches the requested nesting");
}

std::pair<StateVector, Lattice> apply_fmove(StateVector s, const Lattice& l, const FMoveStep& step,
                                            const FSymbolTable& table) {
    if (!(step.pre == l)) throw std::invalid_argument("F-move step does not start from this lattice");
    apply_op_inplace(s, fmove_op(step.spec, table));
    return {std::move(s), step.post};
}

StateVector apply_plan(StateVector s, const ReductionPlan& plan, const FSymbolTable& table) {
    for (const auto& st : plan.steps) apply_op_inplace(s, fmove_op(st.spec, table));
    return s;
}

ChargeDistribution charge_decompose(const StateVector& s, const Lattice& l, const ReductionPlan& plan,
                                    int tadpole_index) {
    if (!(plan.start == l)) throw std::invalid_argument("plan does not start from this lattice");
    return decompose_tadpole(apply_plan(s, plan), plan.tadpoles.at(tadpole_index));
}

double plaquette_trivial_charge_probability(const StateVector& s, const Lattice& l, const std::string& plaquette) {
    if (l.kind() == LatticeKind::SingleEdge || l.plaquettes().size() < 2) {
        Tadpole t;
        t.h1 = 0;
        return decompose_tadpole(s, t).prob(TadpoleSector::Vac);
    }
    auto plan = reduction_plan(l, {plaquette});
    return charge_decompose(s, l, plan, 0).prob(TadpoleSector::Vac);
}

GateMatrix fmove_full_matrix(const Lattice& l, int edge, const FSymbolTable& table) {
    const int n = l.edge_count();
    CircuitOp op = fmove_op(l.fmove_spec(edge), table);
    const std::size_t dim = std::size_t{1} << n;
    GateMatrix out(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        StateVector s = apply_op(new_state(n, c), op);
        for (std::size_t r = 0; r < dim; ++r) out(r, c) = s[r];
    }
    return out;
}

GateMatrix plaquette_projector(const Lattice& l, const std::string& plaquette, const FSymbolTable& table) {
    const int n = l.edge_count();
    const std::size_t dim = std::size_t{1} << n;
    Tadpole t;
    std::vector<CircuitOp> ops;
    if (l.kind() == LatticeKind::SingleEdge) {
        t.h1 = 0;
    } else {
        auto plan = reduction_plan(l, {plaquette});
        for (const auto& st : plan.steps) ops.push_back(fmove_op(st.spec, table));
        t = plan.tadpoles[0];
    }
    const auto qs = t.qubits();
    const auto ref = tadpole_reference(t, TadpoleSector::Vac);
    GateMatrix out(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        StateVector s = new_state(n, c);
        for (const auto& op : ops) apply_op_inplace(s, op);
        // |ref><ref| on the tadpole qubits
        std::map<std::size_t, cplx> part;
        for (std::uint64_t i = 0; i < s.size(); ++i) {
            if (s[i] == 0.0) continue;
            std::size_t k = 0;
            for (int q : qs) k = (k << 1) | static_cast<std::size_t>(qubit_bit(i, n, q));
            std::uint64_t rest = i;
            for (int q : qs) rest &= ~(std::uint64_t{1} << (n - 1 - q));
            part[rest] += std::conj(ref[k]) * s[i];
        }
        std::vector<cplx> amps(dim, 0.0);
        for (auto [rest, v] : part)
            for (std::size_t k = 0; k < ref.size(); ++k) {
                std::uint64_t i = rest;
                for (std::size_t j = 0; j < qs.size(); ++j)
                    if ((k >> (qs.size() - 1 - j)) & 1u) i |= std::uint64_t{1} << (n - 1 - qs[j]);
                amps[i] += ref[k] * v;
            }
        s = StateVector(n, std::move(amps));
        for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
            CircuitOp inv = *it;
            inv.matrix = inv.matrix.adjoint();
            apply_op_inplace(s, inv);
        }
        for (std::size_t r = 0; r < dim; ++r) out(r, c) = s[r];
    }
    return out;
}

double fbp_commutation_residual(const Lattice& l, int edge, const std::string& plaquette, const FSymbolTable& table) {
    if (!l.adjacent(edge, l.plaquette_index(plaquette)))
        throw std::invalid_argument(qubit_name(edge) + " is not on the boundary of " + plaquette);
    GateMatrix f = fmove_full_matrix(l, edge, table);
    GateMatrix b = plaquette_projector(l, plaquette, table);
    GateMatrix b2 = plaquette_projector(l.after_fmove(edge), plaquette, table);
    return max_abs_diff(f * b * f.adjoint(), b2);
}

bool check_fbp_commutation(const Lattice& l, int edge, const std::string& plaquette, double tol,
                           const FSymbolTable& table) {
    return fbp_commutation_residual(l, edge, plaquette, table) < tol;
}

std::string lattice_to_json(const Lattice& l) {
    using nlohmann::json;
    json j;
    j["kind"] = to_string(l.kind());
    j["qubits"] = l.edge_count();
    json edges = json::array();
    for (int e = 0; e < l.edge_count(); ++e)
        edges.push_back({{"id", qubit_name(e)}, {"qubit", e}, {"tail", l.is_tail(e)}});
    j["edges"] = edges;
    json verts = json::array();
    for (const auto& v : l.vertices()) {
        json ring = json::array();
        for (auto h : v.ring) ring.push_back({{"edge", qubit_name(h.edge)}, {"end", h.end}});
        verts.push_back({{"id", v.name}, {"ccw", ring}});
    }
    j["vertices"] = verts;
    json plaqs = json::array();
    for (const auto& p : l.plaquettes()) {
        json b = json::array(), t = json::array();
        for (int e : p.boundary) b.push_back(qubit_name(e));
        for (int e : p.tails) t.push_back(qubit_name(e));
        plaqs.push_back({{"id", p.name}, {"boundary", b}, {"tails", t}, {"outer", p.outer}});
    }
    j["plaquettes"] = plaqs;
    j["euler"] = {{"V", l.vertices().size()}, {"E", l.edge_count()}, {"F", l.plaquettes().size()}};
    return j.dump(2);
}

} // namespace dfib
