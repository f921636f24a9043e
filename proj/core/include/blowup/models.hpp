#pragma once

// Built-in desingularized example systems, the exact-rational expander
// used to assemble them, and the plain-text model file format.

#include <map>
#include <string>

#include "blowup/field.hpp"
#include "blowup/rational.hpp"

namespace blowup {

// Sparse polynomial over Q in n variables. All built-in fields are
// expanded through this type so every coefficient is rounded exactly
// once, on conversion to Interval.
class RatPoly {
public:
    RatPoly() = default;
    explicit RatPoly(int n) : n_(n) {}

    static RatPoly constant(int n, const Rat& r);
    static RatPoly var(int n, int i);

    int arity() const { return n_; }
    const std::map<MultiIndex, Rat>& terms() const { return terms_; }

    RatPoly operator+(const RatPoly& o) const;
    RatPoly operator-(const RatPoly& o) const;
    RatPoly operator-() const;
    RatPoly operator*(const RatPoly& o) const;
    RatPoly operator*(const Rat& r) const;
    RatPoly pow(int e) const;

    Rat eval(const std::vector<Rat>& x) const;

    // Graded order, ties by reverse-lex on exponents, zeros dropped.
    MonomialSum to_monomials() const;

private:
    int n_ = 0;
    std::map<MultiIndex, Rat> terms_;
};

struct Example1Constants {
    Rat c;  // wave speed
    Rat c1; // c_{1L}
    Rat c2; // c_{2L}
};
Example1Constants example1_constants();

PolyField build_example1();
PolyField build_example2();
PolyField build_example3();

bool is_builtin_model(const std::string& name);

// Exact expanded components of a built-in field, for identity checks
// that need rational arithmetic rather than outward-rounded intervals.
std::vector<RatPoly> exact_components(const std::string& name);

// Builtin name or path to a model file.
PolyField resolve_model(const std::string& name_or_path);

PolyField load_model(const std::string& path);
void save_model(const PolyField& f, const std::string& path);

// Same format as the model files, in memory.
std::string model_to_string(const PolyField& f);
PolyField model_from_string(const std::string& text, const std::string& label = "<string>");

} // namespace blowup
