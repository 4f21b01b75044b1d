#include "isolab/harness/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "isolab/arrows.hpp"
#include "isolab/harness/codec.hpp"
#include "isolab/harness/parallel.hpp"
#include "isolab/harness/sampler.hpp"
#include "isolab/jmms.hpp"
#include "isolab/linalg.hpp"
#include "isolab/pvi.hpp"
#include "isolab/stokes.hpp"

namespace isolab {

using nlohmann::json;

namespace {

// Reads config values with defaults and records what was used.
class Config {
public:
    explicit Config(const json& in) : in_(in.is_null() ? json::object() : in) {
        if (!in_.is_object()) throw ConfigError("config must be a JSON object");
    }

    template <class T>
    T get(const char* key, T def) {
        T v = def;
        if (in_.contains(key)) {
            try {
                v = in_.at(key).get<T>();
            } catch (const json::exception&) {
                throw ConfigError(std::string("config: bad value for \"") + key + "\"");
            }
        }
        resolved_[key] = v;
        return v;
    }

    bool has(const char* key) const { return in_.contains(key); }
    const json& raw(const char* key) const { return in_.at(key); }
    void record(const char* key, const json& v) { resolved_[key] = v; }
    const json& resolved() const { return resolved_; }

private:
    json in_;
    json resolved_ = json::object();
};

json error_json(const Error& e) { return {{"code", error_code_name(e.code())}, {"message", e.what()}}; }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

json tolerances_json(const Tolerances& t) {
    return {{"pole", t.pole}, {"excluded", t.excluded}, {"degeneracy", t.degeneracy}, {"triangular", t.triangular}};
}

PviData default_data() { return {{0.21, 0.52, 0.63, 1.41}, 0.37, cplx(1.7, 0.2)}; }

PviData data_from_config(Config& cfg, const char* key = "data") {
    PviData d = cfg.has(key) ? codec::pvi_data_from(cfg.raw(key)) : default_data();
    cfg.record(key, codec::to_json(d));
    return d;
}

SampleSpec spec_from_config(Config& cfg) {
    SampleSpec s;
    auto range = [&](const char* key, Range def) {
        const auto v = cfg.get<std::vector<double>>(key, {def.lo, def.hi});
        if (v.size() != 2 || v[0] > v[1]) throw ConfigError(std::string("config: ") + key + " must be [lo, hi]");
        return Range{v[0], v[1]};
    };
    s.theta_re = range("theta_re", s.theta_re);
    s.theta_im = range("theta_im", s.theta_im);
    s.sigma_re = range("sigma_re", s.sigma_re);
    s.sigma_im = range("sigma_im", s.sigma_im);
    s.j_abs = range("J_abs", s.j_abs);
    s.max_modulus = cfg.get("max_modulus", s.max_modulus);
    s.margin = cfg.get("margin", s.margin);
    s.max_attempts = cfg.get("max_attempts", s.max_attempts);
    return s;
}

ArrowOptions arrow_options(Config& cfg) {
    ArrowOptions o;
    o.require_generic = cfg.get("require_generic", true);
    return o;
}

json entry_json(const EntryConvergence& e) {
    json j = {{"i", e.i + 1},
              {"j", e.j + 1},
              {"limit", codec::to_json(e.limit)},
              {"last_value", codec::to_json(e.last_value)},
              {"target", codec::to_json(e.target)},
              {"abs_gap", e.abs_gap},
              {"rel_gap", e.rel_gap},
              {"exponent_resolved", e.exponent_resolved},
              {"monotone", e.monotone}};
    j["fitted_exponent"] = e.exponent_resolved ? json(e.fitted_exponent) : json(nullptr);
    return j;
}

}  // namespace

CommandResult cmd_roundtrip(const json& config) {
    Config cfg(config);
    const auto seed = cfg.get<std::uint64_t>("seed", 1);
    const auto n = cfg.get<std::size_t>("samples", 100);
    const double tol = cfg.get("tol", 1e-8);
    const SampleSpec spec = spec_from_config(cfg);
    ArrowOptions ao;
    const auto samples = draw_samples(spec, seed, n);

    struct Row {
        double sigma_err = 0, j_err = 0, cubic = 0, identity = 0, p12 = 0;
        std::optional<json> error;
    };
    std::vector<Row> rows(n);
    parallel_for(n, [&](std::size_t i) {
        const PviData& d = samples[i];
        Row& r = rows[i];
        try {
            const auto bv = arrow_q(d, ao);
            const auto st = arrow_g(bv, ao);
            const auto m = arrow_p(st, d.theta, ao);
            const auto f = arrow_f(m, d.theta, ao);
            r.sigma_err = std::abs(f.data.sigma - d.sigma) / std::abs(d.sigma);
            r.j_err = std::abs(f.data.J - d.J) / std::abs(d.J);
            r.cubic = cubic_residual(m);
            r.identity = trace_identity_residual(d, ao);
            r.p12 = std::abs(m.p12 - 2.0 * std::cos(kPi * d.sigma));
        } catch (const Error& e) {
            r.error = error_json(e);
        }
    });

    CommandResult res;
    json per = json::array();
    std::vector<double> errs;
    double max_err = 0, max_cubic = 0, max_identity = 0, max_p12 = 0;
    std::size_t failures = 0;
    std::ostringstream csv;
    csv << "index,sigma_rel_err,J_rel_err,cubic_residual,identity_residual,p12_abs_err\n";
    for (std::size_t i = 0; i < n; ++i) {
        const Row& r = rows[i];
        json s = {{"index", i}, {"data", codec::to_json(samples[i])}};
        if (r.error) {
            s["error"] = *r.error;
            ++failures;
        } else {
            s["sigma_rel_err"] = r.sigma_err;
            s["J_rel_err"] = r.j_err;
            s["cubic_residual"] = r.cubic;
            s["identity_residual"] = r.identity;
            s["p12_abs_err"] = r.p12;
            const double e = std::max(r.sigma_err, r.j_err);
            errs.push_back(e);
            max_err = std::max(max_err, e);
            max_cubic = std::max(max_cubic, r.cubic);
            max_identity = std::max(max_identity, r.identity);
            max_p12 = std::max(max_p12, r.p12);
            if (!(e < tol)) ++failures;
            csv << i << ',' << fmt(r.sigma_err) << ',' << fmt(r.j_err) << ',' << fmt(r.cubic) << ','
                << fmt(r.identity) << ',' << fmt(r.p12) << '\n';
        }
        per.push_back(s);
    }
    res.report = {{"command", "roundtrip"},
                  {"config", cfg.resolved()},
                  {"tolerances", tolerances_json(ao.tol)},
                  {"samples", per},
                  {"summary",
                   {{"max_rel_err", max_err},
                    {"median_rel_err", median(errs)},
                    {"max_cubic_residual", max_cubic},
                    {"max_identity_residual", max_identity},
                    {"max_p12_abs_err", max_p12},
                    {"failures", failures},
                    {"pass", failures == 0}}}};
    res.csv = csv.str();
    res.exit_code = failures == 0 ? 0 : 1;
    return res;
}

CommandResult cmd_limits(const json& config) {
    Config cfg(config);
    const PviData d = data_from_config(cfg);
    const auto ladder = cfg.get<std::vector<double>>("ladder", kDefaultLadder);
    const double tol = cfg.get("tol", 1e-4);
    TrajectoryOptions to;
    to.rtol = cfg.get("rtol", to.rtol);
    LimitOptions lo;
    lo.max_model_exponent = cfg.get("max_model_exponent", lo.max_model_exponent);

    CommandResult res;
    res.report = {{"command", "limits"}, {"config", cfg.resolved()}};
    const double rs = d.sigma.real();
    res.report["degenerate_sigma"] = std::abs(d.sigma) < 1e-9 || rs < 0.05 || rs > 0.95;
    LadderRun run;
    try {
        run = run_ladder(d, ladder, to);
    } catch (const SingularityError& e) {
        res.report["partial"] = true;
        res.report["pole_location"] = e.location().real();
        res.report["error"] = error_json(e);
        res.exit_code = 2;
        return res;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        res.report["error"] = error_json(e);
        res.exit_code = 2;
        return res;
    }
    const LimitReport rep = regularized_limits(run.samples, d, lo);

    json a = json::array(), b = json::array();
    for (const auto& e : rep.a_entries) a.push_back(entry_json(e));
    for (const auto& e : rep.b_entries) b.push_back(entry_json(e));
    json model = json::array();
    for (cplx e : rep.exponent_model) model.push_back(codec::to_json(e));
    res.report["seed_x"] = run.seed_x;
    res.report["a_entries"] = a;
    res.report["b_entries"] = b;
    res.report["phi0_estimate"] = codec::to_json(rep.phi0_est);
    res.report["phi0_closed_form"] = codec::to_json(rep.phi0_target);
    res.report["delta2_phi0_estimate"] = codec::to_json(rep.delta2_phi0_est);
    res.report["exponent_model"] = model;
    res.report["max_abs_gap"] = rep.max_abs_gap;
    res.report["degraded_confidence"] = rep.degraded_confidence;
    res.report["warnings"] = rep.warnings;
    res.report["seed_order"] = {{"x", rep.seed_order.x},
                                {"rel_gap", rep.seed_order.rel_gap},
                                {"exponent", rep.seed_order.exponent}};
    res.report["pass"] = rep.max_abs_gap < tol;
    res.exit_code = rep.max_abs_gap < tol ? 0 : 1;

    std::ostringstream csv;
    csv << "kind,i,j,x,re,im\n";
    for (const auto& s : run.samples) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const cplx vb = s.b_matrix(i, j);
                csv << "B," << i + 1 << ',' << j + 1 << ',' << fmt(s.state.x) << ',' << fmt(vb.real()) << ','
                    << fmt(vb.imag()) << '\n';
                if ((i < 2 && j < 2) || i == j) {
                    const cplx va = s.a_matrix(i, j);
                    csv << "A," << i + 1 << ',' << j + 1 << ',' << fmt(s.state.x) << ',' << fmt(va.real()) << ','
                        << fmt(va.imag()) << '\n';
                }
            }
        }
    }
    res.csv = csv.str();
    return res;
}

CommandResult cmd_stokes(const json& config) {
    Config cfg(config);
    StokesOptions so;
    so.R = cfg.get("R", so.R);
    so.r = cfg.get("r", so.r);
    so.rtol = cfg.get("rtol", so.rtol);
    so.atol = cfg.get("atol", so.atol);
    so.arc_segments = cfg.get("segments", so.arc_segments);
    const bool monodromy = cfg.get("monodromy", false);
    const double tol = cfg.get("tol", 1e-6);
    CVector u = cfg.has("u") ? codec::vector_from(cfg.raw("u")) : default_u();
    cfg.record("u", codec::vector_to_json(u));

    CommandResult res;
    res.report = {{"command", "stokes"}};
    try {
        IrregularSystem sys{u, CMatrix()};
        std::optional<StokesPair> closed;
        if (cfg.has("phi")) {
            sys.phi = codec::matrix_from(cfg.raw("phi"));
            cfg.record("phi", codec::to_json(sys.phi));
            // A diagonal Phi is a stationary point of the deformation, so it is
            // its own boundary value.
            const CMatrix off = sys.phi - CMatrix(sys.phi.diagonal().asDiagonal());
            if (sys.phi.rows() == 3 && max_abs(off) == 0.0) {
                ArrowOptions ao;
                ao.require_generic = false;
                closed = arrow_g({sys.phi, 1.0, 1.0}, ao);
            }
        } else {
            const PviData d = data_from_config(cfg);
            const ArrowOptions ao = arrow_options(cfg);
            const auto bv = arrow_q(d, ao);
            closed = arrow_g(bv, ao);
            sys.phi = phi_at(d, u);
            res.report["phi0"] = codec::to_json(bv.phi0);
            res.report["phi_at_u"] = codec::to_json(sys.phi);
        }
        const NumericStokes ns = compute_stokes(sys, so, monodromy);
        res.report["numeric"] = codec::to_json(ns.stokes);
        res.report["residuals"] = {{"triangular", ns.triangular_residual},
                                   {"diagonal", ns.diagonal_residual},
                                   {"series", ns.series_residual}};
        if (monodromy) res.report["residuals"]["monodromy"] = ns.monodromy_residual;
        bool ok = ns.triangular_residual < tol && ns.diagonal_residual < 1e-8;
        if (closed) {
            res.report["closed_form"] = codec::to_json(*closed);
            const double gp = max_abs(closed->s_plus - ns.stokes.s_plus);
            const double gm = max_abs(closed->s_minus - ns.stokes.s_minus);
            CMatrix gap_p = (closed->s_plus - ns.stokes.s_plus).cwiseAbs().cast<cplx>();
            CMatrix gap_m = (closed->s_minus - ns.stokes.s_minus).cwiseAbs().cast<cplx>();
            res.report["gaps"] = {{"s_plus", codec::to_json(gap_p)},
                                  {"s_minus", codec::to_json(gap_m)},
                                  {"max", std::max(gp, gm)}};
            ok = ok && std::max(gp, gm) < tol;
        }
        res.report["pass"] = ok;
        res.exit_code = ok ? 0 : 1;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        res.report["error"] = error_json(e);
        res.exit_code = 2;
    }
    res.report["config"] = cfg.resolved();
    res.report["settings"] = {{"R", so.R},
                              {"r", so.r},
                              {"rtol", so.rtol},
                              {"atol", so.atol},
                              {"segments", so.arc_segments},
                              {"max_series_terms", so.max_series_terms},
                              {"series_tol", so.series_tol},
                              {"triangular_tol", so.triangular_tol}};
    return res;
}

CommandResult cmd_jmms(const json& config) {
    Config cfg(config);
    FlowOptions fo;
    fo.rtol = cfg.get("rtol", fo.rtol);
    fo.atol = cfg.get("atol", fo.atol);
    const int steps = cfg.get("steps", 10);
    if (steps < 1) throw ConfigError("config: steps must be positive");
    const double tol = cfg.get("tol", 1e-8);

    CommandResult res;
    res.report = {{"command", "jmms"}};
    try {
        std::optional<PviData> data;
        JmmsState st;
        if (cfg.has("state")) {
            st = codec::jmms_state_from(cfg.raw("state"));
            cfg.record("state", codec::to_json(st));
        } else {
            data = data_from_config(cfg);
            st.u = cfg.has("u") ? codec::vector_from(cfg.raw("u")) : default_u();
            cfg.record("u", codec::vector_to_json(st.u));
            st.phi = phi_at(*data, st.u);
        }
        const int n = static_cast<int>(st.u.size());
        const int k = cfg.get("k", n) - 1;
        if (k < 0 || k >= n) throw ConfigError("config: k must be in 1..n");
        const cplx du = cfg.has("delta_u") ? codec::complex_from(cfg.raw("delta_u")) : cplx(0.0, 2.0);
        cfg.record("delta_u", codec::to_json(du));
        require_off_diagonal(st);

        json series = json::array();
        JmmsState cur = st;
        double diag_drift = 0.0, spec_drift = 0.0;
        series.push_back({{"t", 0.0}, {"diag_drift", 0.0}, {"spectral_drift", 0.0}});
        for (int s = 1; s <= steps; ++s) {
            cur = flow(cur, k, du / double(steps), fo);
            const double dd = max_abs(CMatrix((cur.phi.diagonal() - st.phi.diagonal()).asDiagonal()));
            const double sd = spectral_distance(cur.phi, st.phi);
            diag_drift = std::max(diag_drift, dd);
            spec_drift = std::max(spec_drift, sd);
            series.push_back({{"t", double(s) / steps}, {"diag_drift", dd}, {"spectral_drift", sd}});
        }
        res.report["initial"] = codec::to_json(st);
        res.report["final"] = codec::to_json(cur);
        res.report["series"] = series;
        res.report["max_diag_drift"] = diag_drift;
        res.report["max_spectral_drift"] = spec_drift;
        bool ok = diag_drift < 1e-10 && spec_drift < tol;

        if (data && n == 3) {
            const cplx x = (cur.u(1) - cur.u(0)) / (cur.u(2) - cur.u(0));
            if (std::abs(x.imag()) < 1e-12 && x.real() > 0.0 && x.real() < 1.0) {
                const double g = max_abs(phi_at(*data, cur.u) - cur.phi);
                res.report["omega_consistency"] = g;
                ok = ok && g < 1e-6;
            }
        }
        if (cfg.get("shrinking", true)) {
            const auto reaches = cfg.get<std::vector<double>>("reach", {1e2, 1e4, 1e6});
            const auto rep = shrinking_check(st, 0.0, reaches, fo);
            json samples = json::array();
            for (const auto& b : rep.samples) samples.push_back({{"reach", b.reach}, {"band", b.band}});
            json sj = {{"samples", samples}, {"complete", rep.complete}};
            if (rep.singular_reach) sj["singular_reach"] = *rep.singular_reach;
            if (!rep.message.empty()) sj["message"] = rep.message;
            if (data) sj["seed_re_sigma"] = std::abs(data->sigma.real());
            res.report["shrinking"] = sj;
        }
        res.report["pass"] = ok;
        res.exit_code = ok ? 0 : 1;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        res.report["error"] = error_json(e);
        res.exit_code = 2;
    }
    res.report["config"] = cfg.resolved();
    return res;
}

CommandResult cmd_convert(const json& config) {
    Config cfg(config);
    const auto arrow = cfg.get<std::string>("arrow", "Q");
    const ArrowOptions ao = arrow_options(cfg);
    CommandResult res;
    json out;
    try {
        if (arrow == "Q") {
            const PviData d = data_from_config(cfg);
            const auto bv = arrow_q(d, ao);
            out = codec::to_json(bv);
            out["spectrum"] = json::array();
            for (cplx e : eigen3(bv.phi0).values) out["spectrum"].push_back(codec::to_json(e));
        } else if (arrow == "Q0") {
            if (!cfg.has("theta") || !cfg.has("J_tilde")) throw ConfigError("convert Q0 needs theta and J_tilde");
            const Thetas th = codec::thetas_from(cfg.raw("theta"));
            const cplx jt = codec::complex_from(cfg.raw("J_tilde"));
            cfg.record("theta", codec::to_json(th));
            cfg.record("J_tilde", codec::to_json(jt));
            out = codec::to_json(arrow_q_sigma0(th, jt, ao));
        } else if (arrow == "Qinv") {
            if (!cfg.has("boundary_value")) throw ConfigError("convert Qinv needs boundary_value");
            const auto bv = codec::boundary_value_from(cfg.raw("boundary_value"));
            cfg.record("boundary_value", codec::to_json(bv));
            std::optional<cplx> hint;
            if (cfg.has("theta_inf_hint")) hint = codec::complex_from(cfg.raw("theta_inf_hint"));
            const auto r = arrow_q_inverse(bv, hint, ao);
            out = codec::to_json(r.data);
            out["theta_inf_sign_conventional"] = r.theta_inf_sign_conventional;
        } else if (arrow == "G") {
            if (!cfg.has("boundary_value")) throw ConfigError("convert G needs boundary_value");
            const auto bv = codec::boundary_value_from(cfg.raw("boundary_value"));
            cfg.record("boundary_value", codec::to_json(bv));
            out = codec::to_json(arrow_g(bv, ao));
        } else if (arrow == "G_sub") {
            if (!cfg.has("phi0")) throw ConfigError("convert G_sub needs phi0");
            const CMatrix p = codec::matrix_from(cfg.raw("phi0"));
            cfg.record("phi0", codec::to_json(p));
            out = codec::to_json(arrow_g_subdiagonals(p, ao));
        } else if (arrow == "G_direct") {
            const PviData d = data_from_config(cfg);
            const cplx k1 = cfg.has("k1") ? codec::complex_from(cfg.raw("k1")) : cplx(1.0);
            const cplx k2 = cfg.has("k2") ? codec::complex_from(cfg.raw("k2")) : cplx(1.0);
            cfg.record("k1", codec::to_json(k1));
            cfg.record("k2", codec::to_json(k2));
            out = codec::to_json(arrow_g_direct(d, k1, k2, ao));
        } else if (arrow == "P") {
            if (!cfg.has("stokes") || !cfg.has("theta")) throw ConfigError("convert P needs stokes and theta");
            const auto st = codec::stokes_from(cfg.raw("stokes"));
            const Thetas th = codec::thetas_from(cfg.raw("theta"));
            cfg.record("stokes", codec::to_json(st));
            cfg.record("theta", codec::to_json(th));
            const auto m = arrow_p(st, th, ao);
            out = codec::to_json(m);
            out["cubic_residual"] = cubic_residual(m);
        } else if (arrow == "F") {
            if (!cfg.has("monodromy") || !cfg.has("theta")) throw ConfigError("convert F needs monodromy and theta");
            const auto m = codec::monodromy_from(cfg.raw("monodromy"));
            const Thetas th = codec::thetas_from(cfg.raw("theta"));
            cfg.record("monodromy", codec::to_json(m));
            cfg.record("theta", codec::to_json(th));
            const auto f = arrow_f(m, th, ao);
            out = codec::to_json(f.data);
            const auto& c = f.coeffs;
            out["coefficients"] = {{"sigma13", codec::to_json(c.sigma13)}, {"sigma23", codec::to_json(c.sigma23)},
                                   {"a", codec::to_json(c.a)},             {"b", codec::to_json(c.b)},
                                   {"c", codec::to_json(c.c)},             {"d", codec::to_json(c.d)},
                                   {"s", codec::to_json(c.s)},             {"s_hat", codec::to_json(c.s_hat)}};
        } else if (arrow == "traces") {
            const PviData d = data_from_config(cfg);
            const auto t = p23_p13_closed_form(d, ao);
            out = {{"p23", codec::to_json(t.p23)}, {"p13", codec::to_json(t.p13)}, {"L", codec::to_json(t.L)}};
        } else if (arrow == "FPGQ") {
            const PviData d = data_from_config(cfg);
            const auto bv = arrow_q(d, ao);
            const auto st = arrow_g(bv, ao);
            const auto m = arrow_p(st, d.theta, ao);
            const auto f = arrow_f(m, d.theta, ao);
            out = {{"boundary_value", codec::to_json(bv)},
                   {"stokes", codec::to_json(st)},
                   {"monodromy", codec::to_json(m)},
                   {"data", codec::to_json(f.data)},
                   {"cubic_residual", cubic_residual(m)}};
        } else {
            throw ConfigError("convert: unknown arrow \"" + arrow + "\" (Q, Q0, Qinv, G, G_sub, G_direct, P, F, traces, FPGQ)");
        }
        res.report = {{"command", "convert"}, {"result", out}};
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        res.report = {{"command", "convert"}, {"error", error_json(e)}};
        res.exit_code = 2;
    }
    res.report["config"] = cfg.resolved();
    res.report["tolerances"] = tolerances_json(ao.tol);
    return res;
}

CommandResult run_command(const std::string& command, const json& config) {
    if (command == "roundtrip") return cmd_roundtrip(config);
    if (command == "limits") return cmd_limits(config);
    if (command == "stokes") return cmd_stokes(config);
    if (command == "jmms") return cmd_jmms(config);
    if (command == "convert") return cmd_convert(config);
    throw ConfigError("unknown command \"" + command + "\"");
}

}  // namespace isolab
