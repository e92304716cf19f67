#include "spec_file.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "hurwitz/errors.hpp"

namespace hurwitz::cli {

namespace {

// line and column (1-based) of a byte offset
std::pair<std::size_t, std::size_t> position(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

const Json& member(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw SpecError(str(where, ": expected an object"));
    const auto it = obj.find(key);
    if (it == obj.end()) throw SpecError(str(where, ": missing \"", key, "\""));
    return *it;
}

Complex read_complex(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SpecError(str(where, ": expected [re, im]"));
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Complex> read_complex_list(const Json& j, const std::string& where) {
    if (!j.is_array()) throw SpecError(str(where, ": expected a list of [re, im]"));
    std::vector<Complex> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_complex(j[i], str(where, "/", i)));
    return out;
}

template <class Pole>
std::vector<Pole> read_poles(const Json& j, const std::string& where) {
    if (!j.is_array()) throw SpecError(str(where, ": expected a list of poles"));
    std::vector<Pole> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = str(where, "/", i);
        Pole p;
        p.b = read_complex(member(j[i], "b", at), at + "/b");
        p.tail = read_complex_list(member(j[i], "c", at), at + "/c");
        if (p.tail.empty()) throw SpecError(at + "/c: empty tail");
        out.push_back(std::move(p));
    }
    return out;
}

template <class Pole>
Json poles_json(const std::vector<Pole>& poles) {
    Json out = Json::array();
    for (const Pole& p : poles) out.push_back(Json{{"b", complex_json(p.b)}, {"c", complex_json(p.tail)}});
    return out;
}

// "poles.3.c.1" -> {"poles", "3", "c", "1"}
std::vector<std::string> split(const std::string& path) {
    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
    return parts;
}

std::size_t index(const std::string& s, std::size_t size, const std::string& path) {
    std::size_t pos = 0;
    std::size_t i = 0;
    try {
        i = std::stoul(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || i >= size) throw SpecError(str("no parameter ", path));
    return i;
}

template <class Pole>
Complex* pole_slot(std::vector<Pole>& poles, const std::vector<std::string>& parts, const std::string& path) {
    if (parts.size() < 3) throw SpecError(str("no parameter ", path));
    Pole& p = poles[index(parts[1], poles.size(), path)];
    if (parts[2] == "b" && parts.size() == 3) return &p.b;
    if (parts[2] == "c" && parts.size() == 4) return &p.tail[index(parts[3], p.tail.size(), path)];
    throw SpecError(str("no parameter ", path));
}

Complex* slot(CoveringSpec& s, const std::string& path) {
    const auto parts = split(path);
    if (parts.empty()) throw SpecError("empty parameter path");
    if (s.genus == 0) {
        if (parts[0] == "poly_coeffs" && parts.size() == 2)
            return &s.g0.poly_coeffs[index(parts[1], s.g0.poly_coeffs.size(), path)];
        if (parts[0] == "poles") return pole_slot(s.g0.poles, parts, path);
    } else {
        if (parts[0] == "modulus" && parts.size() == 1) return &s.g1.sigma;
        if (parts[0] == "constant" && parts.size() == 1) return &s.g1.a;
        if (parts[0] == "poles") return pole_slot(s.g1.poles, parts, path);
    }
    throw SpecError(str("no parameter ", path));
}

}  // namespace

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json complex_json(const std::vector<Complex>& v) {
    Json out = Json::array();
    for (const Complex z : v) out.push_back(complex_json(z));
    return out;
}

std::vector<std::string> CoveringSpec::parameter_paths() const {
    std::vector<std::string> out;
    const auto add_poles = [&](const auto& poles) {
        for (std::size_t i = 0; i < poles.size(); ++i) {
            out.push_back(str("poles.", i, ".b"));
            for (std::size_t a = 0; a < poles[i].tail.size(); ++a) out.push_back(str("poles.", i, ".c.", a));
        }
    };
    if (genus == 0) {
        for (std::size_t r = 0; r < g0.poly_coeffs.size(); ++r) out.push_back(str("poly_coeffs.", r));
        add_poles(g0.poles);
    } else {
        out.push_back("modulus");
        out.push_back("constant");
        add_poles(g1.poles);
    }
    return out;
}

Complex CoveringSpec::get(const std::string& path) const { return *slot(const_cast<CoveringSpec&>(*this), path); }

void CoveringSpec::set(const std::string& path, Complex value) { *slot(*this, path) = value; }

bool operator==(const CoveringSpec& a, const CoveringSpec& b) { return to_json(a) == to_json(b); }

CoveringSpec parse_spec(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        const auto [line, col] = position(text, e.byte == 0 ? 0 : e.byte - 1);
        // keep the parser's reason, drop its own prefix
        std::string reason = e.what();
        if (const auto at = reason.find(": ", reason.find("parse error")); at != std::string::npos)
            reason = reason.substr(at + 2);
        throw SpecError(str("line ", line, ", column ", col, ": ", reason));
    }
    CoveringSpec s;
    const Json& genus = member(doc, "genus", "/");
    if (!genus.is_number_integer() || (genus.get<int>() != 0 && genus.get<int>() != 1))
        throw SpecError("/genus: expected 0 or 1");
    s.genus = genus.get<int>();
    const Json& profile = member(doc, "profile", "/");
    if (!profile.is_array() || profile.empty()) throw SpecError("/profile: expected a non-empty integer list");
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (!profile[i].is_number_integer() || profile[i].get<int>() < 1)
            throw SpecError(str("/profile/", i, ": expected a positive integer"));
        s.profile.push_back(profile[i].get<int>());
    }

    std::vector<int> implied;
    if (s.genus == 0) {
        s.g0.poly_coeffs = read_complex_list(member(doc, "poly_coeffs", "/"), "/poly_coeffs");
        s.g0.k1 = static_cast<int>(s.g0.poly_coeffs.size()) + 1;
        // a polynomial covering may leave out "poles"
        if (doc.contains("poles")) s.g0.poles = read_poles<cover0::Pole>(doc["poles"], "/poles");
        implied = s.g0.profile();
    } else {
        s.g1.sigma = read_complex(member(doc, "modulus", "/"), "/modulus");
        s.g1.a = read_complex(member(doc, "constant", "/"), "/constant");
        s.g1.poles = read_poles<cover1::Pole>(member(doc, "poles", "/"), "/poles");
        implied = s.g1.profile();
    }
    if (implied != s.profile) {
        std::string have;
        for (const int k : implied) have += str(have.empty() ? "" : ",", k);
        throw SpecError(str("/profile: does not match the coefficients, which give [", have, "]"));
    }
    if (s.genus == 0)
        cover0::validate(s.g0);
    else
        cover1::validate(s.g1);
    return s;
}

CoveringSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError(str(path, ": cannot open"));
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_spec(buf.str());
    } catch (const SpecError& e) {
        throw SpecError(str(path, ": ", e.what()));
    }
}

Json to_json(const CoveringSpec& s) {
    Json out;
    out["genus"] = s.genus;
    out["profile"] = s.profile;
    if (s.genus == 0) {
        out["poly_coeffs"] = complex_json(s.g0.poly_coeffs);
        out["poles"] = poles_json(s.g0.poles);
    } else {
        out["modulus"] = complex_json(s.g1.sigma);
        out["constant"] = complex_json(s.g1.a);
        out["poles"] = poles_json(s.g1.poles);
    }
    return out;
}

CoveringSpec example(const std::string& name) {
    CoveringSpec s;
    if (name == "a2") {
        // p = z^3 - 3z
        s.genus = 0;
        s.g0.k1 = 3;
        s.g0.poly_coeffs = {0.0, -3.0};
    } else if (name == "h0_surf") {
        // profile (2,2) drawn from mt19937_64 seeded with 42: a_0 and the tail ~ N(0, 1/2), b ~ N(0, 1),
        // top coefficient redrawn until |c| >= 0.3
        std::mt19937_64 rng(42);
        std::normal_distribution<double> half(0.0, 0.5), unit(0.0, 1.0);
        s.genus = 0;
        s.g0.k1 = 2;
        s.g0.poly_coeffs = {Complex(half(rng), half(rng))};
        cover0::Pole p;
        p.b = Complex(unit(rng), unit(rng));
        p.tail = {Complex(half(rng), half(rng)), Complex(half(rng), half(rng))};
        while (std::abs(p.tail.back()) < 0.3) p.tail.back() = Complex(half(rng), half(rng));
        s.g0.poles = {p};
    } else if (name == "h12") {
        // p = a + c zeta'(z - b) on H_{1,2}(2)
        s.genus = 1;
        s.g1.sigma = Complex(0.0, 1.1);
        s.g1.a = 0.0;
        s.g1.poles = {{Complex(0.23, 0.31), {0.0, 1.0}}};
    } else {
        throw SpecError(str("unknown example \"", name, "\" (a2, h0_surf, h12)"));
    }
    s.profile = s.genus == 0 ? s.g0.profile() : s.g1.profile();
    return s;
}

}  // namespace hurwitz::cli
