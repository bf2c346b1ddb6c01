#include "spincs/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "spincs/contraction.hpp"
#include "spincs/json_io.hpp"
#include "spincs/parametrizations.hpp"
#include "spincs/semiclassical.hpp"

namespace spincs::cli {

namespace {

struct Context {
    Json config;
    std::uint64_t seed = 0;
    double hbar = 1.0;
    int threads = 1;
    std::optional<double> tol;
    std::mt19937_64 rng;

    double tolerance(const char* name, double fallback, Json& record) const {
        const double t = tol.value_or(fallback);
        record[name] = t;
        return t;
    }
};

struct Outcome {
    Json outputs = Json::object();
    Json tolerances = Json::object();
    Json pass = Json::object();
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// NaN and inf are not representable in JSON; report them as strings.
Json jnum(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

Json jcomplex(Complex z) { return Json::array({jnum(z.real()), jnum(z.imag())}); }

const Json& need(const Json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing required key '") + key + "'");
    return j.at(key);
}

int get_int(const Json& j, const char* key, std::optional<int> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(std::string("missing required key '") + key + "'");
    }
    if (!j[key].is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
    return j[key].get<int>();
}

double get_double(const Json& j, const char* key, std::optional<double> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(std::string("missing required key '") + key + "'");
    }
    if (!j[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return j[key].get<double>();
}

bool get_bool(const Json& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) throw ConfigError(std::string("'") + key + "' must be a boolean");
    return j[key].get<bool>();
}

Spin spin_from(int two_s) {
    if (two_s < 0 || two_s > 2000) throw ConfigError("two_s must lie in [0, 2000]");
    return Spin(two_s);
}

std::vector<int> int_list(const Json& j, const char* key) {
    const Json& v = need(j, key);
    std::vector<int> out;
    if (v.is_number_integer()) {
        out.push_back(v.get<int>());
    } else if (v.is_array() && !v.empty()) {
        for (const auto& e : v) {
            if (!e.is_number_integer()) throw ConfigError(std::string("'") + key + "' entries must be integers");
            out.push_back(e.get<int>());
        }
    } else {
        throw ConfigError(std::string("'") + key + "' must be an integer or a non-empty list");
    }
    return out;
}

FiducialVector fv_for(Context& ctx, const Json& cfg, Spin spin, const char* fallback) {
    return fv_from_json(cfg.contains("fv") ? cfg["fv"] : Json(fallback), spin, ctx.rng);
}

EulerAngles euler(const AngleTriple& a) { return EulerAngles(a.phi, a.theta, a.psi); }

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

AngleTriple random_angles(std::mt19937_64& rng, double margin = 0.0) {
    return {uniform(rng, 0.0, kTwoPi), uniform(rng, margin, kPi - margin), uniform(rng, 0.0, kTwoPi)};
}

Spin random_spin(std::mt19937_64& rng, int lo, int hi) {
    return Spin(std::uniform_int_distribution<int>(lo, hi)(rng));
}

Json matrix_json(const RMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(jnum(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

Json matrix_json(const CMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(jcomplex(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------- wigner

void cmd_wigner(Context& ctx, const Flags& flags, Outcome& out) {
    const Json& cfg = ctx.config;
    require_keys(cfg, {"seed", "hbar", "output", "threads", "two_s", "theta", "phi", "psi", "algebra"}, "wigner config");
    const int two_s = flags.two_s ? *flags.two_s : get_int(cfg, "two_s");
    const double theta = flags.theta ? *flags.theta : get_double(cfg, "theta");
    const double phi = flags.phi ? *flags.phi : get_double(cfg, "phi", 0.0);
    const double psi = flags.psi ? *flags.psi : get_double(cfg, "psi", 0.0);
    const Spin spin = spin_from(two_s);

    const RMatrix d = little_d(spin, theta);
    const CMatrix r = rotation_matrix(spin, phi, theta, psi);
    Json m_values = Json::array();
    for (int i = 0; i < spin.dim(); ++i) m_values.push_back(spin.m(i));
    const double unit = operator_norm(r * r.adjoint() - CMatrix::Identity(spin.dim(), spin.dim()));

    out.outputs["two_s"] = two_s;
    out.outputs["angles"] = {{"phi", phi}, {"theta", theta}, {"psi", psi}};
    out.outputs["m_values"] = m_values;
    out.outputs["d_matrix"] = matrix_json(d);
    out.outputs["r_matrix"] = matrix_json(r);
    out.outputs["unitarity_residual"] = jnum(unit);
    const double tol = ctx.tolerance("algebra", 1e-10, out.tolerances);
    out.pass["unitarity"] = unit <= tol;

    if (!cfg.contains("algebra")) return;
    const Json& alg = cfg["algebra"];
    require_keys(alg, {"cases", "two_s_max"}, "algebra");
    const int cases = get_int(alg, "cases", 100);
    const int two_s_max = get_int(alg, "two_s_max", 4);
    double e_unit = 0.0, e_inv = 0.0, e_comp = 0.0, e_two = 0.0, e_tri = 0.0;
    for (int k = 0; k < cases; ++k) {
        const Spin sp = random_spin(ctx.rng, 0, two_s_max);
        // Raw angles beyond the fundamental ranges exercise the folding.
        auto raw = [&] {
            return EulerAngles(uniform(ctx.rng, -4 * kPi, 4 * kPi), uniform(ctx.rng, -4 * kPi, 4 * kPi),
                               uniform(ctx.rng, -4 * kPi, 4 * kPi));
        };
        const EulerAngles o1 = raw(), o2 = raw(), o = raw();
        const CMatrix r1 = big_r(sp, o1), r2 = big_r(sp, o2);
        const CMatrix id = CMatrix::Identity(sp.dim(), sp.dim());
        e_unit = std::max(e_unit, operator_norm(r1 * r1.adjoint() - id));
        const Su2Lift inv = invert_euler(o1);
        e_inv = std::max(e_inv, max_abs(inv.phase(sp) * big_r(sp, inv.angles) - r1.adjoint()));
        const Su2Lift comp = compose_euler(o2, o1);
        e_comp = std::max(e_comp, max_abs(comp.phase(sp) * big_r(sp, comp.angles) - r2 * r1));
        e_two = std::max(e_two, tworots_residual(o2, o1, comp));
        const Eigen::Matrix2cd u = su2_matrix(o2.phi(), o2.theta(), o2.psi()) * su2_matrix(o.phi(), o.theta(), o.psi()) *
                                   su2_matrix(o1.phi(), o1.theta(), o1.psi());
        const double exact = std::cos(euler_from_su2(u).angles.theta());
        e_tri = std::max(e_tri, std::abs(trirots_cos_theta(o2, o, o1) - exact));
    }
    out.outputs["algebra"] = {{"cases", cases},
                              {"unitarity", jnum(e_unit)},
                              {"inverse", jnum(e_inv)},
                              {"composition", jnum(e_comp)},
                              {"two_rotation_relations", jnum(e_two)},
                              {"three_rotation_cos_theta", jnum(e_tri)}};
    out.pass["algebra_unitarity"] = e_unit <= tol;
    out.pass["algebra_inverse"] = e_inv <= tol;
    out.pass["algebra_composition"] = e_comp <= tol;
    out.pass["algebra_two_rotation"] = e_two <= tol;
    out.pass["algebra_three_rotation"] = e_tri <= tol;
}

// ---------------------------------------------------------------- verify-resolution

double orthogonality_deviation(Spin spin, const QuadratureGrid& grid) {
    const int d = spin.dim();
    CMatrix acc = CMatrix::Zero(d * d, d * d);
    CVector v(d * d);
    for (const GridNode& node : grid.nodes()) {
        const CMatrix r = rotation_matrix(spin, node.phi, node.theta, node.psi);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) v(i * d + j) = r(i, j);
        acc.noalias() += node.weight * (v.conjugate() * v.transpose());
    }
    acc *= static_cast<double>(d) / (8.0 * kPi * kPi);
    return max_abs(acc - CMatrix::Identity(d * d, d * d));
}

void cmd_verify_resolution(Context& ctx, const Flags&, Outcome& out) {
    const Json& cfg = ctx.config;
    require_keys(cfg, {"seed", "hbar", "output", "threads", "two_s", "n_random", "grid_oversample", "fv", "orthogonality"},
                 "verify-resolution config");
    const std::vector<int> spins = int_list(cfg, "two_s");
    const int n_random = get_int(cfg, "n_random", 20);
    const double oversample = get_double(cfg, "grid_oversample", 1.2);
    const bool ortho = get_bool(cfg, "orthogonality", false);
    if (n_random < 1) throw ConfigError("n_random must be positive");
    if (oversample < 1.0) throw ConfigError("grid_oversample must be >= 1");
    if (cfg.contains("fv") && spins.size() != 1) throw ConfigError("an explicit fv needs a single two_s");
    const double tol = ctx.tolerance("resolution", 1e-10, out.tolerances);

    out.csv_header = {"two_s", "n_theta", "n_phi", "n_psi", "max_residual", "orthogonality_dev"};
    Json per_spin = Json::array();
    double worst = 0.0, worst_ortho = 0.0;
    bool coarse = false;
    for (int two_s : spins) {
        const Spin spin = spin_from(two_s);
        const QuadratureGrid grid = build_grid(spin, oversample);
        double max_res = 0.0;
        const int draws = cfg.contains("fv") ? 1 : n_random;
        for (int k = 0; k < draws; ++k) {
            const FiducialVector fv = fv_for(ctx, cfg, spin, "random");
            const ResolutionResult res = resolution_residual(fv, grid, ctx.threads);
            max_res = std::max(max_res, res.residual);
            coarse = coarse || res.grid_too_coarse;
        }
        const double od = ortho ? orthogonality_deviation(spin, grid) : std::nan("");
        worst = std::max(worst, max_res);
        if (ortho) worst_ortho = std::max(worst_ortho, od);
        per_spin.push_back({{"two_s", two_s},
                            {"grid", {grid.n_theta(), grid.n_phi(), grid.n_psi()}},
                            {"max_residual", jnum(max_res)},
                            {"orthogonality_dev", jnum(od)}});
        out.csv_rows.push_back({std::to_string(two_s), std::to_string(grid.n_theta()), std::to_string(grid.n_phi()),
                                std::to_string(grid.n_psi()), num(max_res), num(od)});
    }
    out.outputs["per_spin"] = per_spin;
    out.outputs["max_residual"] = jnum(worst);
    out.outputs["n_random"] = n_random;
    out.pass["resolution"] = !coarse && worst <= tol;
    if (ortho) {
        out.outputs["max_orthogonality_dev"] = jnum(worst_ortho);
        out.pass["orthogonality"] = worst_ortho <= tol;
    }
}

// ---------------------------------------------------------------- overlap

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void cmd_overlap(Context& ctx, const Flags&, Outcome& out) {
    const Json& cfg = ctx.config;
    require_keys(cfg, {"seed", "hbar", "output", "threads", "two_s", "fv", "omega2", "omega1", "remainder_scan"},
                 "overlap config");
    const Spin spin = spin_from(get_int(cfg, "two_s"));
    const FiducialVector fv = fv_for(ctx, cfg, spin, "lowest");
    const EulerAngles o2 = euler(angles_from_json(need(cfg, "omega2")));
    const EulerAngles o1 = euler(angles_from_json(need(cfg, "omega1")));
    const Complex direct = overlap(fv, o2, o1);
    const Complex comp = overlap_composition(fv, o2, o1);
    const double diff = std::abs(direct - comp);
    const double tol = ctx.tolerance("composition", 1e-10, out.tolerances);
    out.outputs["overlap"] = jcomplex(direct);
    out.outputs["overlap_via_composition"] = jcomplex(comp);
    out.outputs["abs_diff"] = jnum(diff);
    out.pass["composition"] = diff <= tol;

    if (!cfg.contains("remainder_scan")) return;
    const Json& scan = cfg["remainder_scan"];
    require_keys(scan, {"cases", "h_min", "h_max", "points", "two_s_max"}, "remainder_scan");
    const int cases = get_int(scan, "cases", 20);
    const double h_min = get_double(scan, "h_min", 1e-5);
    const double h_max = get_double(scan, "h_max", 1e-2);
    const int points = get_int(scan, "points", 7);
    const int two_s_max = get_int(scan, "two_s_max", 4);
    if (points < 2 || !(h_min > 0.0) || !(h_max > h_min)) throw ConfigError("remainder_scan needs 0 < h_min < h_max, points >= 2");
    const double slope_tol = ctx.tol.value_or(0.1);
    out.tolerances["remainder_slope"] = slope_tol;

    std::normal_distribution<double> normal;
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k < cases; ++k) {
        const Spin sp = random_spin(ctx.rng, 1, two_s_max);
        const FiducialVector f = FiducialVector::random(sp, ctx.rng);
        const AngleTriple om = random_angles(ctx.rng, 0.1);
        Eigen::Vector3d dir(normal(ctx.rng), normal(ctx.rng), normal(ctx.rng));
        dir.normalize();
        const StateVector ket = coherent_amplitudes(f, om.phi, om.theta, om.psi);
        std::vector<double> lx, ly;
        for (int p = 0; p < points; ++p) {
            const double h = h_min * std::pow(h_max / h_min, static_cast<double>(p) / (points - 1));
            const AngleTriple dl{h * dir(0), h * dir(1), h * dir(2)};
            const StateVector bra = coherent_amplitudes(f, om.phi + dl.phi, om.theta + dl.theta, om.psi + dl.psi);
            const double rem = std::abs(bra.dot(ket) - infinitesimal_overlap(f, om, dl));
            lx.push_back(std::log(h));
            ly.push_back(std::log(rem));
        }
        const double s = fit_slope(lx, ly);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    out.outputs["remainder_scan"] = {{"cases", cases}, {"min_slope", jnum(lo)}, {"max_slope", jnum(hi)}};
    out.pass["remainder_slope"] = std::abs(lo - 2.0) <= slope_tol && std::abs(hi - 2.0) <= slope_tol;
}

// ---------------------------------------------------------------- propagate

void cmd_propagate(Context& ctx, const Flags&, Outcome& out) {
    const Json& cfg = ctx.config;
    require_keys(cfg, {"seed", "hbar", "output", "threads", "two_s", "fv", "hamiltonian", "omega_i", "omega_f", "t_i",
                       "t_f", "n_slices", "mode", "grid_oversample", "oracle_tol", "checks"},
                 "propagate config");
    const std::vector<int> spins = int_list(cfg, "two_s");
    if (spins.size() > 1 && cfg.contains("fv") && !cfg["fv"].is_string()) {
        throw ConfigError("several spins need a shorthand fv");
    }
    const AngleTriple oi = angles_from_json(need(cfg, "omega_i"));
    const AngleTriple of = angles_from_json(need(cfg, "omega_f"));
    const double t_i = get_double(cfg, "t_i", 0.0);
    const double t_f = get_double(cfg, "t_f");
    const std::vector<int> slices = int_list(cfg, "n_slices");
    for (int n : slices) {
        if (n < 1) throw ConfigError("n_slices entries must be positive");
    }
    std::vector<KernelMode> modes;
    const Json mode_json = cfg.contains("mode") ? cfg["mode"] : Json("M1");
    try {
        if (mode_json.is_string()) {
            modes.push_back(kernel_mode_from_string(mode_json.get<std::string>()));
        } else if (mode_json.is_array()) {
            for (const auto& m : mode_json) modes.push_back(kernel_mode_from_string(m.get<std::string>()));
        } else {
            throw ConfigError("mode must be a string or a list");
        }
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    const double oversample = get_double(cfg, "grid_oversample", 1.2);
    Json checks = cfg.contains("checks") ? cfg["checks"] : Json::object();
    require_keys(checks, {"ratio_range", "final_abs_max", "collapse"}, "checks");

    CspiOptions opts;
    opts.hbar = ctx.hbar;
    opts.threads = ctx.threads;
    opts.compare_oracle = true;
    opts.oracle_tol = get_double(cfg, "oracle_tol", 1e-12);

    out.csv_header = {"two_s", "mode", "n_slices", "re", "im", "abs_err_vs_oracle"};
    Json runs = Json::array();
    bool ratio_ok = true, final_ok = true, collapse_ok = true;
    double collapse_dev = 0.0;
    std::optional<std::pair<double, double>> ratio_range;
    if (checks.contains("ratio_range")) {
        const Json& rr = checks["ratio_range"];
        if (!rr.is_array() || rr.size() != 2) throw ConfigError("ratio_range must be [lo, hi]");
        ratio_range = {rr[0].get<double>(), rr[1].get<double>()};
        out.tolerances["ratio_range"] = rr;
    }
    const bool has_final = checks.contains("final_abs_max");
    const double final_max = has_final ? get_double(checks, "final_abs_max") : 0.0;
    if (has_final) out.tolerances["final_abs_max"] = final_max;
    const bool collapse = get_bool(checks, "collapse", false);
    const double collapse_tol = collapse ? ctx.tolerance("collapse", 1e-12, out.tolerances) : 0.0;

    for (int two_s : spins) {
        const Spin spin = spin_from(two_s);
        const FiducialVector fv = fv_for(ctx, cfg, spin, "random");
        const HamiltonianSpec spec = hamiltonian_from_json(cfg.contains("hamiltonian") ? cfg["hamiltonian"] : Json::array(), spin);
        const QuadratureGrid grid = build_grid(spin, oversample);
        const Complex ov = overlap(fv, euler(of), euler(oi));
        for (KernelMode mode : modes) {
            Json series = Json::array();
            std::vector<double> errs;
            Complex oracle = 0.0;
            for (int n : slices) {
                const PropagatorResult res = discrete_cspi(fv, spec, euler(oi), euler(of), t_i, t_f, n, grid, [&] {
                    CspiOptions o = opts;
                    o.mode = mode;
                    return o;
                }());
                oracle = res.oracle;
                errs.push_back(res.error_estimate);
                series.push_back({{"n_slices", n},
                                  {"amplitude", jcomplex(res.amplitude)},
                                  {"abs_err_vs_oracle", jnum(res.error_estimate)},
                                  {"zeroed_entries", res.zeroed_entries}});
                out.csv_rows.push_back({std::to_string(two_s), to_string(mode), std::to_string(n), num(res.amplitude.real()),
                                        num(res.amplitude.imag()), num(res.error_estimate)});
                if (collapse) {
                    const double dev = std::abs(res.amplitude - ov);
                    collapse_dev = std::max(collapse_dev, dev);
                    collapse_ok = collapse_ok && dev <= collapse_tol;
                }
            }
            Json run = {{"two_s", two_s},
                        {"mode", to_string(mode)},
                        {"grid", {grid.n_theta(), grid.n_phi(), grid.n_psi()}},
                        {"oracle", jcomplex(oracle)},
                        {"overlap", jcomplex(ov)},
                        {"series", series}};
            if (errs.size() >= 2) {
                const double ratio = errs[errs.size() - 2] / errs.back();
                run["last_error_ratio"] = jnum(ratio);
                if (ratio_range) ratio_ok = ratio_ok && ratio >= ratio_range->first && ratio <= ratio_range->second;
            }
            if (has_final) final_ok = final_ok && errs.back() <= final_max;
            runs.push_back(run);
        }
    }
    out.outputs["runs"] = runs;
    if (ratio_range) out.pass["error_ratio"] = ratio_ok;
    if (has_final) out.pass["final_error"] = final_ok;
    if (collapse) {
        out.outputs["max_collapse_dev"] = jnum(collapse_dev);
        out.pass["collapse"] = collapse_ok;
    }
}

// ---------------------------------------------------------------- action

void cmd_action(Context& ctx, const Flags&, Outcome& out) {
    const Json& cfg = ctx.config;
    require_keys(cfg, {"seed", "hbar", "output", "threads", "two_s", "fv", "hamiltonian", "path"}, "action config");
    const Spin spin = spin_from(get_int(cfg, "two_s"));
    const FiducialVector fv = fv_for(ctx, cfg, spin, "lowest");
    const HamiltonianSpec spec = hamiltonian_from_json(cfg.contains("hamiltonian") ? cfg["hamiltonian"] : Json::array(), spin);
    const Json& pj = need(cfg, "path");
    Path path;
    if (pj.is_object()) {
        require_keys(pj, {"two_s", "fv", "samples"}, "path");
        path = path_from_json(need(pj, "samples"));
    } else {
        path = path_from_json(pj);
    }
    const double s_cont = action_along_path(fv, spec, path, ctx.hbar);
    const double s_disc = discrete_action(fv, spec, path, ctx.hbar);
    const double phase = geometric_phase(fv, path);
    out.outputs["n_samples"] = path.size();
    out.outputs["action_along_path"] = jnum(s_cont);
    out.outputs["discrete_action"] = jnum(s_disc);
    out.outputs["geometric_phase"] = jnum(phase);
    out.outputs["abs_diff"] = jnum(std::abs(s_cont - s_disc));
    out.pass["finite"] = std::isfinite(s_cont) && std::isfinite(s_disc) && std::isfinite(phase);
}

// ---------------------------------------------------------------- geometry

Json one_form_json(const OneForm& k) { return {{"phi", k.k_phi}, {"theta", k.k_theta}, {"psi", k.k_psi}}; }

void geometry_checks(Context& ctx, const Json& checks, Outcome& out) {
    require_keys(checks, {"exterior_derivative", "poles", "single_m", "kinetic", "charts", "two_s_max"}, "checks");
    const int two_s_max = get_int(checks, "two_s_max", 4);
    auto rnd_fv = [&] { return FiducialVector::random(random_spin(ctx.rng, 1, two_s_max), ctx.rng); };
    Json res = Json::object();

    if (checks.contains("exterior_derivative")) {
        const int cases = get_int(checks, "exterior_derivative");
        const double tol = ctx.tolerance("exterior_derivative", 1e-6, out.tolerances);
        const double h = 1e-5;
        double worst = 0.0;
        for (int k = 0; k < cases; ++k) {
            const FiducialVector fv = rnd_fv();
            const AngleTriple o = random_angles(ctx.rng, 0.05);
            auto kap = [&](double dp, double dt, double ds) {
                return one_form(fv, AngleTriple{o.phi + dp, o.theta + dt, o.psi + ds});
            };
            auto d_phi = [&](auto get) { return (get(kap(h, 0, 0)) - get(kap(-h, 0, 0))) / (2 * h); };
            auto d_theta = [&](auto get) { return (get(kap(0, h, 0)) - get(kap(0, -h, 0))) / (2 * h); };
            auto d_psi = [&](auto get) { return (get(kap(0, 0, h)) - get(kap(0, 0, -h))) / (2 * h); };
            auto kp = [](const OneForm& f) { return f.k_phi; };
            auto kt = [](const OneForm& f) { return f.k_theta; };
            auto ks = [](const OneForm& f) { return f.k_psi; };
            const TwoForm w = two_form(fv, o);
            worst = std::max({worst, std::abs(w.w_theta_phi - (d_theta(kp) - d_phi(kt))),
                              std::abs(w.w_phi_psi - (d_phi(ks) - d_psi(kp))),
                              std::abs(w.w_psi_theta - (d_psi(kt) - d_theta(ks)))});
        }
        res["exterior_derivative_max_dev"] = jnum(worst);
        out.pass["exterior_derivative"] = worst <= tol;
    }
    if (checks.contains("poles")) {
        const int cases = get_int(checks, "poles");
        bool finite = true;
        double largest = 0.0;
        for (int k = 0; k < cases; ++k) {
            const FiducialVector fv = rnd_fv();
            for (double theta : {0.0, kPi}) {
                const GaugePotential g = gauge_potential(fv, theta, uniform(ctx.rng, 0, 4 * kPi), uniform(ctx.rng, -kTwoPi, kTwoPi));
                finite = finite && std::isfinite(g.a_theta) && std::isfinite(g.a_xi) && std::isfinite(g.a_eta);
                largest = std::max({largest, std::abs(g.a_theta), std::abs(g.a_xi), std::abs(g.a_eta)});
            }
        }
        res["pole_max_component"] = jnum(largest);
        out.pass["poles_finite"] = finite;
    }
    if (get_bool(checks, "single_m", false)) {
        const double tol = ctx.tolerance("single_m", 1e-12, out.tolerances);
        double worst = 0.0;
        for (int two_s = 0; two_s <= two_s_max; ++two_s) {
            const Spin spin(two_s);
            for (int i = 0; i < spin.dim(); ++i) {
                const FiducialVector fv = FiducialVector::basis(spin, spin.two_m(i));
                const AngleTriple o = random_angles(ctx.rng);
                const OneForm k = one_form(fv, o);
                const double m = spin.m(i);
                worst = std::max({worst, std::abs(k.k_phi - m * std::cos(o.theta)), std::abs(k.k_theta),
                                  std::abs(k.k_psi - m)});
            }
        }
        res["single_m_max_dev"] = jnum(worst);
        out.pass["single_m"] = worst <= tol;
    }
    if (checks.contains("kinetic")) {
        const int cases = get_int(checks, "kinetic");
        const double tol = ctx.tolerance("kinetic", 1e-6, out.tolerances);
        const double tol_im = ctx.tol.value_or(1e-9);
        out.tolerances["kinetic_imag"] = tol_im;
        const double h = 1e-5;
        double worst = 0.0, worst_im = 0.0;
        std::normal_distribution<double> normal;
        for (int k = 0; k < cases; ++k) {
            const FiducialVector fv = rnd_fv();
            const AngleTriple o = random_angles(ctx.rng, 0.05);
            const AngleTriple v{normal(ctx.rng), normal(ctx.rng), normal(ctx.rng)};
            auto ket = [&](double t) {
                return coherent_amplitudes(fv, o.phi + t * v.phi, o.theta + t * v.theta, o.psi + t * v.psi);
            };
            const Complex fd = kI * ket(0.0).dot((ket(h) - ket(-h)) / (2 * h));
            worst = std::max(worst, std::abs(fd.real() - kinetic_term(fv, o, v)));
            worst_im = std::max(worst_im, std::abs(fd.imag()));
        }
        res["kinetic_max_dev"] = jnum(worst);
        res["kinetic_max_imag"] = jnum(worst_im);
        out.pass["kinetic"] = worst <= tol && worst_im <= tol_im;
    }
    if (checks.contains("charts")) {
        const int cases = get_int(checks, "charts");
        const double tol = ctx.tolerance("charts", 1e-8, out.tolerances);
        const double h = 1e-6;
        double worst_z = 0.0, worst_a = 0.0;
        std::normal_distribution<double> normal;
        for (int k = 0; k < cases; ++k) {
            const FiducialVector fv = rnd_fv();
            const AngleTriple o = random_angles(ctx.rng, 0.2);
            const AngleTriple v{normal(ctx.rng), normal(ctx.rng), normal(ctx.rng)};
            auto at = [&](double t) { return AngleTriple{o.phi + t * v.phi, o.theta + t * v.theta, o.psi + t * v.psi}; };
            const double euler_k = kinetic_term(fv, o, v);
            const ZCoords zp = omega_to_z(at(h)), zm = omega_to_z(at(-h));
            const ZCoords zd{(zp.z_plus - zm.z_plus) / (2 * h), (zp.z_minus - zm.z_minus) / (2 * h)};
            worst_z = std::max(worst_z, std::abs(kinetic_term_z(fv, omega_to_z(o), zd) - euler_k));
            const ACoords ap = omega_to_a(at(h)), am = omega_to_a(at(-h));
            const ACoords ad{(ap.a1 - am.a1) / (2 * h), (ap.a2 - am.a2) / (2 * h)};
            worst_a = std::max(worst_a, std::abs(kinetic_term_a(fv, omega_to_a(o), ad) - euler_k));
        }
        res["z_chart_max_dev"] = jnum(worst_z);
        res["a_chart_max_dev"] = jnum(worst_a);
        out.pass["charts"] = worst_z <= tol && worst_a <= tol;
    }
    out.outputs["checks"] = res;
}

void cmd_geometry(Context& ctx, const Flags&, Outcome& out) {
    const Json& cfg = ctx.config;
    require_keys(cfg, {"seed", "hbar", "output", "threads", "two_s", "fv", "points", "path", "checks"}, "geometry config");
    const Spin spin = spin_from(get_int(cfg, "two_s"));
    const FiducialVector fv = fv_for(ctx, cfg, spin, "lowest");
    Json points = Json::array();
    if (cfg.contains("points")) {
        if (!cfg["points"].is_array()) throw ConfigError("points must be a list of angle triples");
        for (const auto& p : cfg["points"]) {
            const AngleTriple o = angles_from_json(p);
            const OneForm k = one_form(fv, o);
            const TwoForm w = two_form(fv, o);
            const GaugePotential g = gauge_potential(fv, o.theta, o.phi + o.psi, o.phi - o.psi);
            points.push_back({{"omega", {o.phi, o.theta, o.psi}},
                              {"one_form", one_form_json(k)},
                              {"two_form", {{"theta_phi", w.w_theta_phi}, {"phi_psi", w.w_phi_psi}, {"psi_theta", w.w_psi_theta}}},
                              {"gauge_potential", {{"theta", g.a_theta}, {"xi", g.a_xi}, {"eta", g.a_eta}}}});
        }
    }
    out.outputs["points"] = points;
    out.outputs["fv"] = fv_to_json(fv);
    if (cfg.contains("path")) {
        const Path path = path_from_json(cfg["path"]);
        out.outputs["geometric_phase"] = jnum(geometric_phase(fv, path));
    }
    if (cfg.contains("checks")) geometry_checks(ctx, cfg["checks"], out);
}

// ---------------------------------------------------------------- semiclassical

void cmd_semiclassical(Context& ctx, const Flags&, Outcome& out) {
    const Json& cfg = ctx.config;
    require_keys(cfg, {"seed", "hbar", "output", "threads", "two_s", "fv", "hamiltonian", "omega0", "t0", "t1", "dt",
                       "drop_interweaving", "allow_inconsistent", "checks"},
                 "semiclassical config");
    const Spin spin = spin_from(get_int(cfg, "two_s"));
    const FiducialVector fv = fv_for(ctx, cfg, spin, "lowest");
    const HamiltonianSpec spec = hamiltonian_from_json(need(cfg, "hamiltonian"), spin);
    const AngleTriple o0 = angles_from_json(need(cfg, "omega0"));
    const double t0 = get_double(cfg, "t0", 0.0);
    const double t1 = get_double(cfg, "t1");
    const double dt = get_double(cfg, "dt");
    if (!(dt > 0.0) || !(t1 > t0)) throw ConfigError("need dt > 0 and t1 > t0");
    Json checks = cfg.contains("checks") ? cfg["checks"] : Json::object();
    require_keys(checks, {"energy_drift", "rates", "rank"}, "checks");

    TrajectoryOptions opts;
    opts.system.hbar = ctx.hbar;
    opts.system.drop_interweaving = get_bool(cfg, "drop_interweaving", false);
    opts.throw_on_inconsistent = !get_bool(cfg, "allow_inconsistent", false);
    const Trajectory traj = integrate_trajectory(fv, spec, o0, t0, t1, dt, opts);

    out.csv_header = {"t", "phi", "theta", "psi", "H", "rank", "residual"};
    int rmin = 3, rmax = 0;
    double drift = 0.0;
    const double e0 = traj.points.front().energy;
    for (const TrajectoryPoint& p : traj.points) {
        out.csv_rows.push_back({num(p.t), num(p.phi), num(p.theta), num(p.psi), num(p.energy), std::to_string(p.rank), num(p.residual)});
        rmin = std::min(rmin, p.rank);
        rmax = std::max(rmax, p.rank);
        drift = std::max(drift, std::abs(p.energy - e0));
    }
    const TrajectoryPoint& last = traj.points.back();
    out.outputs["n_points"] = traj.points.size();
    out.outputs["final"] = {{"t", last.t}, {"phi", last.phi}, {"theta", last.theta}, {"psi", last.psi}};
    out.outputs["energy_drift"] = jnum(drift);
    out.outputs["min_rank"] = rmin;
    out.outputs["max_rank"] = rmax;
    out.outputs["error_estimate"] = jnum(traj.error_estimate);

    if (checks.contains("energy_drift")) {
        const double tol = ctx.tol.value_or(get_double(checks, "energy_drift"));
        out.tolerances["energy_drift"] = tol;
        out.pass["energy_drift"] = drift <= tol;
    }
    if (checks.contains("rank")) {
        const int want = get_int(checks, "rank");
        out.pass["rank"] = rmin == want && rmax == want;
    }
    if (checks.contains("rates")) {
        const Json& r = checks["rates"];
        if (!r.is_array() || r.size() != 3) throw ConfigError("rates must be [phi_dot, theta_dot, psi_dot] (null skips)");
        const double tol = ctx.tolerance("rates", 1e-8, out.tolerances);
        double worst_rate = 0.0, worst_path = 0.0;
        for (const TrajectoryPoint& p : traj.points) {
            const AngleTriple at{p.phi, p.theta, p.psi};
            const VelocitySolution v =
                solve_velocities(build_system(fv, spec, at, p.t, opts.system), opts.throw_on_inconsistent);
            const double got[3] = {v.omega_dot.phi, v.omega_dot.theta, v.omega_dot.psi};
            const double pos[3] = {p.phi - o0.phi, p.theta - o0.theta, p.psi - o0.psi};
            for (int i = 0; i < 3; ++i) {
                if (r[i].is_null()) continue;
                const double want = r[i].get<double>();
                worst_rate = std::max(worst_rate, std::abs(got[i] - want));
                worst_path = std::max(worst_path, std::abs(pos[i] - want * (p.t - t0)));
            }
        }
        out.outputs["max_rate_dev"] = jnum(worst_rate);
        out.outputs["max_path_dev"] = jnum(worst_path);
        out.pass["rates"] = worst_rate <= tol && worst_path <= tol;
    }
}

// ---------------------------------------------------------------- contract

void contract_ccs_checks(Context& ctx, const Json& ccs, Complex alpha, Outcome& out) {
    require_keys(ccs, {"n_max", "levels", "eigen_degree", "resolution"}, "ccs");
    const int n_max = get_int(ccs, "n_max", 80);
    const int levels = get_int(ccs, "levels", 10);
    const int degree = get_int(ccs, "eigen_degree", 3);
    if (levels < 1 || 2 * levels > n_max || degree < 0 || degree > n_max) throw ConfigError("inconsistent ccs sizes");
    const double tol_dns = ctx.tolerance("dns_closed_form", 1e-9, out.tolerances);
    const double tol_ev = ctx.tolerance("ccs_eigen", 1e-8, out.tolerances);

    const CMatrix disp = displacement_matrix(alpha, n_max);
    const int rows = n_max / 2;
    double dns_dev = 0.0, number_dev = 0.0;
    for (int n = 0; n < levels; ++n) {
        const CVector closed = dns_amplitudes(alpha, n, n_max);
        dns_dev = std::max(dns_dev, (closed.head(rows) - disp.col(n).head(rows)).cwiseAbs().maxCoeff());
        number_dev = std::max(number_dev, dns_number_check(alpha, n, n_max));
    }
    std::normal_distribution<double> normal;
    CVector raw = CVector::Zero(degree + 1);
    for (int n = 0; n <= degree; ++n) raw(n) = Complex(normal(ctx.rng), normal(ctx.rng));
    const FockVector fock = FockVector::make(raw);
    const double eigen_dev = ccs_eigen_check(alpha, fock, n_max);
    Json res = {{"dns_closed_form_dev", jnum(dns_dev)}, {"dns_number_residual", jnum(number_dev)}, {"ccs_eigen_residual", jnum(eigen_dev)}};
    out.pass["dns_closed_form"] = dns_dev <= tol_dns;
    out.pass["dns_number"] = number_dev <= tol_ev;
    out.pass["ccs_eigen"] = eigen_dev <= tol_ev;

    if (ccs.contains("resolution")) {
        const Json& rj = ccs["resolution"];
        require_keys(rj, {"radial_max", "n_r", "n_phi", "n_levels", "n_max"}, "resolution");
        const double tol = ctx.tolerance("ccs_resolution", 1e-6, out.tolerances);
        const CcsResolution r =
            ccs_resolution_residual(fock, get_double(rj, "radial_max", 9.0), get_int(rj, "n_r", 96), get_int(rj, "n_phi", 64),
                                    get_int(rj, "n_levels", 20), get_int(rj, "n_max", 170), tol);
        res["ccs_resolution_residual"] = jnum(r.residual);
        out.pass["ccs_resolution"] = !r.flagged;
    }
    out.outputs["ccs"] = res;
}

void cmd_contract(Context& ctx, const Flags&, Outcome& out) {
    const Json& cfg = ctx.config;
    require_keys(cfg, {"seed", "hbar", "output", "threads", "two_s", "alpha", "alpha_dot", "fv", "n_max", "f_levels", "checks", "ccs"},
                 "contract config");
    const std::vector<int> spins = cfg.contains("two_s") ? int_list(cfg, "two_s") : std::vector<int>{100, 200, 400};
    const Complex alpha = cfg.contains("alpha") ? complex_from_json(cfg["alpha"]) : Complex(1.0);
    const Complex alpha_dot = cfg.contains("alpha_dot") ? complex_from_json(cfg["alpha_dot"]) : Complex(0.3, 0.7);
    const int n_max = get_int(cfg, "n_max", 60);
    const int f_levels = get_int(cfg, "f_levels", 10);
    if (cfg.contains("fv") && !cfg["fv"].is_string()) throw ConfigError("contract takes a shorthand fv");
    Json checks = cfg.contains("checks") ? cfg["checks"] : Json::object();
    require_keys(checks, {"monotone", "final_max", "measure_order"}, "checks");

    out.csv_header = {"s", "max_abs_dev", "measure_dev", "kinetic_dev"};
    std::vector<double> devs, mdevs, svals;
    double f_excess = -1e300, a0_dev = 0.0;
    Json per_spin = Json::array();
    for (int two_s : spins) {
        const Spin spin = spin_from(two_s);
        if (two_s < 1) throw ConfigError("contraction needs two_s >= 1");
        const FiducialVector fv = fv_for(ctx, cfg, spin, "lowest");
        const FockVector contracted = hp_contract_state(fv, alpha, spin, n_max);
        const FockVector reindexed = reindex_to_fock(fv);
        const int top = std::min(n_max, reindexed.n_max());
        const FockVector fock_fv = FockVector::make(reindexed.coeffs().head(top + 1));
        const CVector oracle = canonical_cs(alpha, fock_fv, n_max).amplitudes;
        const int cmp = std::min<int>(contracted.coeffs().size(), oracle.size());
        const double dev = (contracted.coeffs().head(cmp) - oracle.head(cmp)).cwiseAbs().maxCoeff();

        double mdev = 0.0;
        for (int k = 0; k <= 600; ++k) {
            const double r = 2.0 * k / 600.0;
            mdev = std::max(mdev, std::abs(spin_alpha_density(r, spin) - ccs_alpha_density(r)));
        }
        const double kdev =
            std::abs(spin_kinetic_along_alpha(fv, alpha, alpha_dot, ctx.hbar) - ccs_kinetic_term(alpha, alpha_dot, fock_fv, ctx.hbar));

        // f(s, m) / sqrt(2s) against sqrt(n), n = m + s; relative gap bounded by n / (4s).
        for (int n = 1; n <= std::min(f_levels, two_s); ++n) {
            const double f = ladder_factor(spin, 2 * n - two_s) / std::sqrt(static_cast<double>(two_s));
            const double rel = std::abs(f - std::sqrt(static_cast<double>(n))) / std::sqrt(static_cast<double>(n));
            f_excess = std::max(f_excess, rel - n / (2.0 * two_s));
        }
        double a0 = 0.0, number = 0.0;
        for (int i = 0; i < spin.dim(); ++i) a0 += spin.m(i) * std::norm(fv.coeffs()(i));
        for (int n = 0; n <= reindexed.n_max(); ++n) number += n * std::norm(reindexed.coeffs()(n));
        a0_dev = std::max(a0_dev, std::abs(a0 - (number - spin.s())));

        devs.push_back(dev);
        mdevs.push_back(mdev);
        svals.push_back(spin.s());
        per_spin.push_back({{"s", spin.s()}, {"max_abs_dev", jnum(dev)}, {"measure_dev", jnum(mdev)}, {"kinetic_dev", jnum(kdev)},
                            {"truncated_weight", jnum(contracted.tail())}});
        out.csv_rows.push_back({num(spin.s()), num(dev), num(mdev), num(kdev)});
    }
    out.outputs["per_spin"] = per_spin;
    out.outputs["f_bound_excess"] = jnum(f_excess);
    out.outputs["a0_reindex_dev"] = jnum(a0_dev);
    out.pass["f_bound"] = f_excess <= 0.0;
    const double tol_a0 = ctx.tolerance("a0_reindex", 1e-12, out.tolerances);
    out.pass["a0_reindex"] = a0_dev <= tol_a0 * std::max(1.0, svals.back());

    if (get_bool(checks, "monotone", true)) {
        bool mono = true;
        for (std::size_t i = 1; i < devs.size(); ++i) mono = mono && devs[i] < devs[i - 1];
        out.pass["monotone"] = mono;
    }
    if (checks.contains("final_max")) {
        const double lim = get_double(checks, "final_max");
        out.tolerances["final_max"] = lim;
        out.pass["final_dev"] = devs.back() <= lim;
    }
    if (get_bool(checks, "measure_order", true) && mdevs.size() >= 2) {
        // O(1/s): s * dev stays within a factor of two across the sweep.
        double lo = 1e300, hi = 0.0;
        for (std::size_t i = 0; i < mdevs.size(); ++i) {
            lo = std::min(lo, svals[i] * mdevs[i]);
            hi = std::max(hi, svals[i] * mdevs[i]);
        }
        out.outputs["measure_scaled_range"] = {jnum(lo), jnum(hi)};
        out.pass["measure_order"] = hi <= 2.0 * lo;
    }
    if (cfg.contains("ccs")) contract_ccs_checks(ctx, cfg["ccs"], alpha, out);
}

// ---------------------------------------------------------------- driver

using Handler = std::function<void(Context&, const Flags&, Outcome&)>;

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> table = {
        {"wigner", cmd_wigner},       {"verify-resolution", cmd_verify_resolution},
        {"overlap", cmd_overlap},     {"propagate", cmd_propagate},
        {"action", cmd_action},       {"geometry", cmd_geometry},
        {"semiclassical", cmd_semiclassical}, {"contract", cmd_contract},
    };
    return table;
}

// SOURCE_DATE_EPOCH when set, otherwise the epoch: reports stay reproducible.
std::string report_timestamp() {
    std::time_t t = 0;
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    Json j;
    try {
        j = Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || j.empty()) throw ConfigError("config must be a non-empty JSON object");
    return j;
}

void write_outputs(const std::filesystem::path& dir, const std::string& command, const Json& report, const Outcome& out) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / (command + ".json"));
        f << report.dump(2) << '\n';
    }
    if (!out.csv_header.empty()) {
        std::ofstream f(dir / (command + ".csv"));
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) f << (i ? "," : "") << cells[i];
            f << '\n';
        };
        line(out.csv_header);
        for (const auto& row : out.csv_rows) line(row);
    }
}

} // namespace

int run(const std::string& command, const Flags& flags, std::ostream& log) {
    const auto it = handlers().find(command);
    if (it == handlers().end()) {
        log << "error: unknown command '" << command << "'\n";
        return kConfigInvalid;
    }

    Context ctx;
    std::filesystem::path out_dir = ".";
    try {
        if (!flags.config_path.empty()) {
            ctx.config = load_config(flags.config_path);
        } else if (command == "wigner" && flags.two_s && flags.theta) {
            ctx.config = Json::object();
        } else {
            throw ConfigError("--config is required");
        }
        const Json& cfg = ctx.config;
        if (cfg.contains("seed") && !cfg["seed"].is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
        ctx.seed = flags.seed.value_or(cfg.value("seed", std::uint64_t{0}));
        ctx.hbar = get_double(cfg, "hbar", 1.0);
        if (!(ctx.hbar > 0.0)) throw ConfigError("hbar must be positive");
        ctx.threads = flags.threads.value_or(get_int(cfg, "threads", 1));
        if (ctx.threads < 1) throw ConfigError("threads must be positive");
        if (cfg.contains("output")) {
            if (!cfg["output"].is_string()) throw ConfigError("output must be a path string");
            out_dir = cfg["output"].get<std::string>();
        }
        if (flags.out_dir) out_dir = *flags.out_dir;
        ctx.tol = flags.tol;
        if (ctx.tol && !(*ctx.tol > 0.0)) throw ConfigError("--tol must be positive");
        ctx.rng.seed(ctx.seed);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigInvalid;
    } catch (const Json::exception& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigInvalid;
    }

    // Thread count and output location do not enter the record.
    Json inputs = ctx.config;
    inputs.erase("threads");
    inputs.erase("output");
    if (flags.two_s) inputs["two_s"] = *flags.two_s;
    if (flags.theta) inputs["theta"] = *flags.theta;
    if (flags.phi) inputs["phi"] = *flags.phi;
    if (flags.psi) inputs["psi"] = *flags.psi;
    if (flags.tol) inputs["tol_override"] = *flags.tol;
    const std::string hash =
        hex64(fnv1a64(Json{{"command", command}, {"inputs", inputs}, {"seed", ctx.seed}, {"version", kVersion}}.dump()));

    Outcome out;
    Json report = {{"experiment_id", command + "-" + hash.substr(0, 12)},
                   {"command", command},
                   {"version", kVersion},
                   {"timestamp", report_timestamp()},
                   {"seed", ctx.seed},
                   {"hbar", ctx.hbar},
                   {"inputs", inputs},
                   {"inputs_hash", hash}};
    int code = kOk;
    try {
        it->second(ctx, flags, out);
        report["status"] = "ok";
        for (const auto& item : out.pass.items()) {
            if (!item.value().get<bool>()) {
                report["status"] = "check_failed";
                code = kNumericalFailure;
            }
        }
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigInvalid;
    } catch (const Json::exception& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigInvalid;
    } catch (const Error& e) {
        report["status"] = "numerical_failure";
        report["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
        code = kNumericalFailure;
    }
    report["outputs"] = out.outputs;
    report["tolerances"] = out.tolerances;
    report["pass"] = out.pass;

    try {
        write_outputs(out_dir, command, report, out);
    } catch (const std::exception& e) {
        log << "error: cannot write report: " << e.what() << '\n';
        return kNumericalFailure;
    }
    log << command << ": " << report["status"].get<std::string>() << " -> " << (out_dir / (command + ".json")).string() << '\n';
    return code;
}

int main(int argc, char** argv) {
    CLI::App app{"SU(2) coherent states with arbitrary fiducial vectors"};
    app.set_version_flag("--version", kVersion);
    std::string command;
    Flags flags;
    app.add_option("command", command, "wigner | verify-resolution | overlap | propagate | action | geometry | semiclassical | contract")
        ->required();
    app.add_option("--config", flags.config_path, "experiment config (JSON)");
    app.add_option("--seed", flags.seed, "RNG seed");
    app.add_option("--threads", flags.threads, "worker threads");
    app.add_option("--out", flags.out_dir, "output directory");
    app.add_option("--tol", flags.tol, "override the command's tolerances");
    app.add_option("--two-s", flags.two_s, "wigner: 2s");
    app.add_option("--theta", flags.theta, "wigner: theta");
    app.add_option("--phi", flags.phi, "wigner: phi");
    app.add_option("--psi", flags.psi, "wigner: psi");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigInvalid;
    }
    return run(command, flags, std::cerr);
}

} // namespace spincs::cli
