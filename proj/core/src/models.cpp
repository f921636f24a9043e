#include "blowup/models.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace blowup {

RatPoly RatPoly::constant(int n, const Rat& r) {
    RatPoly p(n);
    if (r.num != 0) p.terms_[MultiIndex(n, 0)] = r;
    return p;
}

RatPoly RatPoly::var(int n, int i) {
    RatPoly p(n);
    MultiIndex e(n, 0);
    e[i] = 1;
    p.terms_[e] = Rat(1);
    return p;
}

RatPoly RatPoly::operator+(const RatPoly& o) const {
    if (n_ != o.n_) throw ShapeError("RatPoly: arity mismatch");
    RatPoly out(n_);
    out.terms_ = terms_;
    for (const auto& [e, r] : o.terms_) {
        auto it = out.terms_.find(e);
        if (it == out.terms_.end()) {
            out.terms_[e] = r;
        } else {
            it->second = it->second + r;
            if (it->second.num == 0) out.terms_.erase(it);
        }
    }
    return out;
}

RatPoly RatPoly::operator-() const {
    RatPoly out(n_);
    for (const auto& [e, r] : terms_) out.terms_[e] = -r;
    return out;
}

RatPoly RatPoly::operator-(const RatPoly& o) const { return *this + (-o); }

RatPoly RatPoly::operator*(const RatPoly& o) const {
    if (n_ != o.n_) throw ShapeError("RatPoly: arity mismatch");
    RatPoly out(n_);
    for (const auto& [ea, ra] : terms_)
        for (const auto& [eb, rb] : o.terms_) {
            MultiIndex e(n_);
            for (int i = 0; i < n_; ++i) e[i] = ea[i] + eb[i];
            auto it = out.terms_.find(e);
            if (it == out.terms_.end()) {
                out.terms_[e] = ra * rb;
            } else {
                it->second = it->second + ra * rb;
            }
        }
    for (auto it = out.terms_.begin(); it != out.terms_.end();)
        it = it->second.num == 0 ? out.terms_.erase(it) : std::next(it);
    return out;
}

RatPoly RatPoly::operator*(const Rat& r) const {
    RatPoly out(n_);
    if (r.num == 0) return out;
    for (const auto& [e, q] : terms_) out.terms_[e] = q * r;
    return out;
}

RatPoly RatPoly::pow(int e) const {
    if (e < 0) throw DomainError("RatPoly: negative power");
    RatPoly acc = constant(n_, Rat(1));
    RatPoly base = *this;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

Rat RatPoly::eval(const std::vector<Rat>& x) const {
    if (static_cast<int>(x.size()) != n_) throw ShapeError("RatPoly: point arity mismatch");
    Rat acc(0);
    for (const auto& [e, r] : terms_) {
        Rat term = r;
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < e[i]; ++k) term = term * x[i];
        acc = acc + term;
    }
    return acc;
}

MonomialSum RatPoly::to_monomials() const {
    std::vector<std::pair<MultiIndex, Rat>> flat(terms_.begin(), terms_.end());
    auto deg = [](const MultiIndex& e) {
        int d = 0;
        for (int v : e) d += v;
        return d;
    };
    std::sort(flat.begin(), flat.end(), [&](const auto& a, const auto& b) {
        int da = deg(a.first), db = deg(b.first);
        if (da != db) return da < db;
        return b.first < a.first;
    });
    MonomialSum out;
    out.reserve(flat.size());
    for (const auto& [e, r] : flat) out.push_back(Monomial{r.to_interval(), e});
    return out;
}

Example1Constants example1_constants() {
    // B1(b) = (b-1)(b-2)/b, B2(b) = (b^2-2)/(2b^2),
    // left state (19/10, 4), right state (3/2, 5)
    const Rat bL(19, 10), vL(4), bR(3, 2), vR(5);
    auto B1 = [](const Rat& b) { return (b - Rat(1)) * (b - Rat(2)) / b; };
    auto B2 = [](const Rat& b) { return (b * b - Rat(2)) / (b * b * Rat(2)); };
    Example1Constants k;
    k.c = (vR * B1(bR) - vL * B1(bL)) / (bR - bL);
    k.c1 = vL * B1(bL) - k.c * bL;
    k.c2 = vL * vL * B2(bL) - k.c * vL;
    return k;
}

static std::vector<RatPoly> example1_polys() {
    const auto [c, c1, c2] = example1_constants();
    const RatPoly x = RatPoly::var(2, 0), s = RatPoly::var(2, 1);

    RatPoly g1 = x * (x - RatPoly::constant(2, Rat(1))) * (x - RatPoly::constant(2, Rat(2)))
                 - x.pow(3) * s * c - x.pow(2) * s * c1;
    RatPoly g2 = x.pow(2) * s * Rat(-1, 2) + s + x.pow(2) * s.pow(2) * c
                 + x.pow(2) * s.pow(3) * c2;
    return {g1, g2};
}

PolyField build_example1() {
    const RatPoly x = RatPoly::var(2, 0), s = RatPoly::var(2, 1);
    std::vector<RatPoly> g = example1_polys();

    PolyField f;
    f.n = 2;
    f.name = "example1";
    f.comp = {g[0].to_monomials(), g[1].to_monomials()};
    f.cspec.n = 2;
    f.cspec.alpha = {0, 1};
    f.cspec.beta = {0, 1};
    f.cspec.c = 1;
    f.cspec.k = 1;
    f.cspec.kind = CompactKind::Directional;
    f.cspec.dir_index = 1;
    f.cspec.dir_sign = 1;
    f.timefactor.num = s.to_monomials();
    f.timefactor.den = x.pow(2).to_monomials();
    f.equilibria["saddle"] = {{2.0, 0.0}, 100, 0.075, 1};
    f.equilibria["source"] = {{1.9, 0.25}, 0, 0.0, 0};
    f.validate();
    return f;
}

static std::vector<RatPoly> example2_polys() {
    const Rat a(3, 10), c(7, 10), dinv(1, 9), w(1, 50);
    const RatPoly x1 = RatPoly::var(3, 0), x2 = RatPoly::var(3, 1), x3 = RatPoly::var(3, 2);
    const RatPoly one = RatPoly::constant(3, Rat(1));

    RatPoly sumsq = x1.pow(2) + x2.pow(2) + x3.pow(2);
    RatPoly f1 = x1.pow(3) - (one - sumsq) * x1;
    RatPoly f2 = x1.pow(2) * x2 + x1.pow(2) * x3;
    RatPoly f3 = x1.pow(2) * x3
                 + (x1.pow(2) * x3 * c - x2 * (x2 - x1 * a) * (x1 - x2) + x1.pow(3) * w) * dinv;
    RatPoly G = x1 * f1 + x2 * f2 + x3 * f3;
    return {f1 - x1 * G, f2 - x2 * G, f3 - x3 * G};
}

PolyField build_example2() {
    const RatPoly x1 = RatPoly::var(3, 0), x2 = RatPoly::var(3, 1), x3 = RatPoly::var(3, 2);
    const RatPoly one = RatPoly::constant(3, Rat(1));
    RatPoly sumsq = x1.pow(2) + x2.pow(2) + x3.pow(2);
    std::vector<RatPoly> g = example2_polys();

    PolyField f;
    f.n = 3;
    f.name = "example2";
    f.comp = {g[0].to_monomials(), g[1].to_monomials(), g[2].to_monomials()};
    f.cspec.n = 3;
    f.cspec.alpha = {1, 1, 1};
    f.cspec.beta = {1, 1, 1};
    f.cspec.c = 1;
    f.cspec.k = 2;
    f.cspec.kind = CompactKind::Poincare;
    f.timefactor.num = (one - sumsq).to_monomials();
    f.equilibria["p0"] = {{0.9333789, 0.3588924, 0.0}, 160, 0.1, 1};
    f.equilibria["p1"] = {{0.7180928, 0.6959473, 0.0}, 50, 0.1, 2};
    f.equilibria["p2"] = {{0.9985628, -0.0535924, 0.0}, 60, 0.1, 2};
    f.equilibria["pb"] = {{0.7071051816183367, 0.001504037399468, -0.001504037399468}, 0, 0.0, 0};
    f.validate();
    return f;
}

static std::vector<RatPoly> example3_polys() {
    const RatPoly x1 = RatPoly::var(2, 0), x2 = RatPoly::var(2, 1);
    const RatPoly one = RatPoly::constant(2, Rat(1));

    RatPoly P = x1.pow(4) + x2.pow(2);
    RatPoly H1 = (one + P * Rat(3)) * Rat(1, 4);
    RatPoly Q = x1.pow(3) * Rat(1, 3) - (one - P).pow(2) * x1;
    RatPoly H2 = x1.pow(3) * (x1.pow(2) - x2) + x2 * Q * Rat(1, 2);
    return {(x1.pow(2) - x2) * H1 - x1 * H2, Q * H1 - x2 * H2 * Rat(2)};
}

PolyField build_example3() {
    const RatPoly x1 = RatPoly::var(2, 0), x2 = RatPoly::var(2, 1);
    const RatPoly one = RatPoly::constant(2, Rat(1));
    RatPoly P = x1.pow(4) + x2.pow(2);
    RatPoly H1 = (one + P * Rat(3)) * Rat(1, 4);
    std::vector<RatPoly> g = example3_polys();

    PolyField f;
    f.n = 2;
    f.name = "example3";
    f.comp = {g[0].to_monomials(), g[1].to_monomials()};
    f.cspec.n = 2;
    f.cspec.alpha = {1, 2};
    f.cspec.beta = {2, 1};
    f.cspec.c = 2;
    f.cspec.k = 1;
    f.cspec.kind = CompactKind::Parabolic;
    f.timefactor.num = (H1 * (one - P)).to_monomials();
    f.equilibria["p0"] = {{0.0, 0.0}, 100, 0.4, 1};
    f.equilibria["pb+"] = {{0.7328506362011802, 0.5370700549804747}, 0, 0.0, 0};
    f.equilibria["pb-"] = {{-0.7328506362011802, 0.5370700549804747}, 0, 0.0, 2};
    f.equilibria["pinf_s+"] = {{0.8861081289780320, 0.6192579489210105}, 100, 0.1, 1};
    f.equilibria["pinf_s-"] = {{-0.8861081289780320, 0.6192579489210105}, 100, 0.1, 1};
    f.equilibria["pinf+"] = {{0.989136995894977, 0.206758557005180}, 0, 0.0, 2};
    f.equilibria["pinf-"] = {{-0.989136995894977, 0.206758557005180}, 0, 0.0, 0};
    f.validate();
    return f;
}

bool is_builtin_model(const std::string& name) {
    return name == "example1" || name == "example2" || name == "example3";
}

std::vector<RatPoly> exact_components(const std::string& name) {
    if (name == "example1") return example1_polys();
    if (name == "example2") return example2_polys();
    if (name == "example3") return example3_polys();
    throw DomainError("exact_components: not a built-in model: " + name);
}

PolyField resolve_model(const std::string& name_or_path) {
    if (name_or_path == "example1") return build_example1();
    if (name_or_path == "example2") return build_example2();
    if (name_or_path == "example3") return build_example3();
    return load_model(name_or_path);
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_monomials(std::ostream& os, const std::string& tag, const MonomialSum& g) {
    os << "begin " << tag << "\n";
    for (const auto& mono : g) {
        os << fmt_double(mono.coeff.lo()) << " " << fmt_double(mono.coeff.hi());
        for (int e : mono.exps) os << " " << e;
        os << "\n";
    }
    os << "end\n";
}

struct Parser {
    std::istream& is;
    std::string path;
    int lineno = 0;
    std::string line;

    bool next() {
        while (std::getline(is, line)) {
            ++lineno;
            auto pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos) continue;
            if (line[pos] == '#') continue;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw DomainError("model file " + path + ":" + std::to_string(lineno) + ": " + what);
    }
};

MonomialSum parse_monomials(Parser& p, int n) {
    MonomialSum out;
    while (p.next()) {
        std::istringstream ls(p.line);
        std::string first;
        ls >> first;
        if (first == "end") return out;
        Monomial mono;
        char* endp = nullptr;
        double lo = std::strtod(first.c_str(), &endp);
        if (endp == first.c_str() || *endp != '\0') p.fail("bad coefficient");
        double hi;
        if (!(ls >> hi)) p.fail("missing upper coefficient");
        mono.exps.assign(n, 0);
        for (int i = 0; i < n; ++i)
            if (!(ls >> mono.exps[i])) p.fail("missing exponent");
        mono.coeff = Interval(lo, hi);
        out.push_back(std::move(mono));
    }
    p.fail("unterminated monomial block");
}

} // namespace

namespace {

void write_model(std::ostream& os, const PolyField& f) {
    os << "# blowup model file\n";
    os << "name " << f.name << "\n";
    os << "n " << f.n << "\n";
    const char* kind = f.cspec.kind == CompactKind::Directional ? "directional"
                       : f.cspec.kind == CompactKind::Poincare  ? "poincare"
                                                                : "parabolic";
    os << "kind " << kind << "\n";
    os << "alpha";
    for (int a : f.cspec.alpha) os << " " << a;
    os << "\nbeta";
    for (int b : f.cspec.beta) os << " " << b;
    os << "\nc " << f.cspec.c << "\n";
    os << "k " << f.cspec.k << "\n";
    if (f.cspec.kind == CompactKind::Directional)
        os << "dir_index " << f.cspec.dir_index << "\ndir_sign " << f.cspec.dir_sign << "\n";
    for (const auto& g : f.comp) write_monomials(os, "component", g);
    write_monomials(os, "timefactor_num", f.timefactor.num);
    if (f.timefactor.is_rational()) write_monomials(os, "timefactor_den", f.timefactor.den);
    for (const auto& [name, eq] : f.equilibria) {
        os << "begin equilibrium " << name << "\n";
        os << "point";
        for (double v : eq.point) os << " " << fmt_double(v);
        os << "\nN " << eq.default_N << "\n";
        os << "sigma " << fmt_double(eq.default_sigma) << "\n";
        os << "stable_count " << eq.stable_count << "\n";
        os << "end\n";
    }
}

PolyField read_model(std::istream& is, const std::string& label) {
    Parser p{is, label};
    PolyField f;
    bool have_n = false;
    while (p.next()) {
        std::istringstream ls(p.line);
        std::string key;
        ls >> key;
        if (key == "name") {
            ls >> f.name;
        } else if (key == "n") {
            if (!(ls >> f.n) || f.n < 1) p.fail("bad dimension");
            f.cspec.n = f.n;
            have_n = true;
        } else if (key == "kind") {
            std::string v;
            ls >> v;
            if (v == "directional")
                f.cspec.kind = CompactKind::Directional;
            else if (v == "poincare")
                f.cspec.kind = CompactKind::Poincare;
            else if (v == "parabolic")
                f.cspec.kind = CompactKind::Parabolic;
            else
                p.fail("unknown compactification kind " + v);
        } else if (key == "alpha" || key == "beta") {
            if (!have_n) p.fail("dimension must precede exponent lists");
            std::vector<int>& dst = key == "alpha" ? f.cspec.alpha : f.cspec.beta;
            dst.assign(f.n, 0);
            for (int i = 0; i < f.n; ++i)
                if (!(ls >> dst[i])) p.fail("short " + key + " list");
        } else if (key == "c") {
            ls >> f.cspec.c;
        } else if (key == "k") {
            ls >> f.cspec.k;
        } else if (key == "dir_index") {
            ls >> f.cspec.dir_index;
        } else if (key == "dir_sign") {
            ls >> f.cspec.dir_sign;
        } else if (key == "begin") {
            if (!have_n) p.fail("dimension must precede blocks");
            std::string tag;
            ls >> tag;
            if (tag == "component") {
                f.comp.push_back(parse_monomials(p, f.n));
            } else if (tag == "timefactor_num") {
                f.timefactor.num = parse_monomials(p, f.n);
            } else if (tag == "timefactor_den") {
                f.timefactor.den = parse_monomials(p, f.n);
            } else if (tag == "equilibrium") {
                std::string name;
                ls >> name;
                if (name.empty()) p.fail("equilibrium needs a name");
                EquilibriumGuess eq;
                while (p.next()) {
                    std::istringstream es(p.line);
                    std::string ekey;
                    es >> ekey;
                    if (ekey == "end") break;
                    if (ekey == "point") {
                        eq.point.clear();
                        double v;
                        while (es >> v) eq.point.push_back(v);
                        if (static_cast<int>(eq.point.size()) != f.n) p.fail("bad point arity");
                    } else if (ekey == "N") {
                        es >> eq.default_N;
                    } else if (ekey == "sigma") {
                        es >> eq.default_sigma;
                    } else if (ekey == "stable_count") {
                        es >> eq.stable_count;
                    } else {
                        p.fail("unknown equilibrium key " + ekey);
                    }
                }
                f.equilibria[name] = std::move(eq);
            } else {
                p.fail("unknown block " + tag);
            }
        } else {
            p.fail("unknown key " + key);
        }
    }
    if (static_cast<int>(f.comp.size()) != f.n) p.fail("component count != n");
    f.validate();
    return f;
}

} // namespace

void save_model(const PolyField& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open model file for writing: " + path);
    write_model(os, f);
    if (!os) throw DomainError("write failed: " + path);
}

PolyField load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DomainError("cannot open model file: " + path);
    return read_model(is, path);
}

std::string model_to_string(const PolyField& f) {
    std::ostringstream os;
    write_model(os, f);
    return os.str();
}

PolyField model_from_string(const std::string& text, const std::string& label) {
    std::istringstream is(text);
    return read_model(is, label);
}

} // namespace blowup
