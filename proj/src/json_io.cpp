#include "spincs/json_io.hpp"

#include <cstdio>
#include <set>

namespace spincs {

Complex complex_from_json(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError("expected a number or [re, im], got " + j.dump());
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

AngleTriple angles_from_json(const Json& j) {
    if (j.is_array() && j.size() == 3) {
        for (const auto& v : j) {
            if (!v.is_number()) throw ConfigError("angles must be numbers: " + j.dump());
        }
        return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    }
    if (j.is_object()) {
        require_keys(j, {"phi", "theta", "psi"}, "angles");
        return {j.value("phi", 0.0), j.value("theta", 0.0), j.value("psi", 0.0)};
    }
    throw ConfigError("expected [phi, theta, psi], got " + j.dump());
}

FiducialVector fv_from_json(const Json& j, Spin spin, std::mt19937_64& rng) {
    if (j.is_string()) {
        const std::string kind = j.get<std::string>();
        if (kind == "lowest") return FiducialVector::basis(spin, -spin.two_s());
        if (kind == "highest") return FiducialVector::basis(spin, spin.two_s());
        if (kind == "random") return FiducialVector::random(spin, rng);
        throw ConfigError("unknown fiducial vector shorthand '" + kind + "'");
    }
    if (!j.is_object()) throw ConfigError("fiducial vector must be an object or a shorthand string");
    require_keys(j, {"two_s", "coeffs"}, "fv");
    if (!j.contains("coeffs") || !j["coeffs"].is_array()) throw ConfigError("fv.coeffs must be an array");
    if (j.contains("two_s") && j["two_s"].get<int>() != spin.two_s()) {
        throw ConfigError("fv.two_s does not match the experiment spin");
    }
    CVector raw(static_cast<Eigen::Index>(j["coeffs"].size()));
    for (std::size_t i = 0; i < j["coeffs"].size(); ++i) raw(static_cast<Eigen::Index>(i)) = complex_from_json(j["coeffs"][i]);
    try {
        return make_fiducial(spin, raw);
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid fiducial vector: ") + e.what());
    }
}

Json fv_to_json(const FiducialVector& fv) {
    Json coeffs = Json::array();
    for (Eigen::Index i = 0; i < fv.coeffs().size(); ++i) coeffs.push_back(complex_to_json(fv.coeffs()(i)));
    return {{"two_s", fv.spin().two_s()}, {"coeffs", coeffs}};
}

namespace {

TimeProfile profile_from_json(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "constant") return TimeProfile::constant();
        throw ConfigError("profile '" + j.get<std::string>() + "' needs parameters");
    }
    if (!j.is_object()) throw ConfigError("profile must be an object");
    const std::string kind = j.value("kind", "constant");
    if (kind == "constant") {
        require_keys(j, {"kind"}, "profile");
        return TimeProfile::constant();
    }
    if (kind == "cosine") {
        require_keys(j, {"kind", "omega", "phase"}, "profile");
        return TimeProfile::cosine(j.value("omega", 0.0), j.value("phase", 0.0));
    }
    if (kind == "linear-ramp") {
        require_keys(j, {"kind", "offset", "slope"}, "profile");
        return TimeProfile::linear_ramp(j.value("offset", 0.0), j.value("slope", 0.0));
    }
    throw ConfigError("unknown profile kind '" + kind + "'");
}

} // namespace

HamiltonianSpec hamiltonian_from_json(const Json& j, Spin spin) {
    if (!j.is_array()) throw ConfigError("hamiltonian must be an array of terms");
    std::vector<Monomial> terms;
    for (const auto& t : j) {
        if (!t.is_object()) throw ConfigError("hamiltonian term must be an object");
        require_keys(t, {"p", "q", "r", "coeff", "profile"}, "hamiltonian term");
        Monomial m;
        m.p = t.value("p", 0);
        m.q = t.value("q", 0);
        m.r = t.value("r", 0);
        if (!t.contains("coeff")) throw ConfigError("hamiltonian term needs coeff");
        m.coeff = complex_from_json(t["coeff"]);
        if (t.contains("profile")) m.profile = profile_from_json(t["profile"]);
        terms.push_back(m);
    }
    try {
        return HamiltonianSpec::create(spin, std::move(terms));
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid hamiltonian: ") + e.what());
    }
}

Path path_from_json(const Json& j) {
    if (!j.is_array()) throw ConfigError("samples must be an array");
    Path path;
    for (const auto& s : j) {
        if (!s.is_object()) throw ConfigError("path sample must be an object");
        require_keys(s, {"t", "phi", "theta", "psi"}, "path sample");
        path.push_back({s.value("t", 0.0), s.value("phi", 0.0), s.value("theta", 0.0), s.value("psi", 0.0)});
    }
    return path;
}

Json path_to_json(const FiducialVector& fv, const Path& path) {
    Json samples = Json::array();
    for (const PathSample& s : path) samples.push_back({{"t", s.t}, {"phi", s.phi}, {"theta", s.theta}, {"psi", s.psi}});
    return {{"two_s", fv.spin().two_s()}, {"fv", fv_to_json(fv)}, {"samples", samples}};
}

void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!ok.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace spincs
