#include "isolab/isolab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "isolab/arrows.hpp"
#include "isolab/harness/commands.hpp"
#include "isolab/stokes.hpp"

struct isolab_context {
    std::string last_error;
    bool require_generic = true;
};

struct isolab_matrix {
    isolab::CMatrix m;
};

namespace {

using isolab::cplx;

isolab_status status_of(isolab::ErrorCode c) {
    switch (c) {
        case isolab::ErrorCode::domain: return ISOLAB_ERR_DOMAIN;
        case isolab::ErrorCode::pole: return ISOLAB_ERR_POLE;
        case isolab::ErrorCode::degenerate: return ISOLAB_ERR_DEGENERATE;
        case isolab::ErrorCode::singularity: return ISOLAB_ERR_SINGULARITY;
        case isolab::ErrorCode::budget: return ISOLAB_ERR_BUDGET;
        case isolab::ErrorCode::accuracy: return ISOLAB_ERR_ACCURACY;
        case isolab::ErrorCode::scaling: return ISOLAB_ERR_SCALING;
        case isolab::ErrorCode::config: return ISOLAB_ERR_CONFIG;
    }
    return ISOLAB_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes and the context message.
template <class F>
isolab_status guarded(isolab_context* ctx, F&& fn) {
    if (ctx) ctx->last_error.clear();
    auto fail = [ctx](isolab_status s, const char* what) {
        if (ctx) ctx->last_error = what;
        return s;
    };
    try {
        return fn();
    } catch (const isolab::Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(ISOLAB_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(ISOLAB_ERR_INTERNAL, e.what());
    }
}

isolab_status invalid(isolab_context* ctx, const char* what) {
    if (ctx) ctx->last_error = what;
    return ISOLAB_ERR_INVALID_ARGUMENT;
}

cplx to_c(isolab_complex z) { return {z.re, z.im}; }
isolab_complex from_c(cplx z) { return {z.real(), z.imag()}; }

isolab::Thetas thetas(const isolab_complex t[4]) { return {to_c(t[0]), to_c(t[1]), to_c(t[2]), to_c(t[3])}; }

isolab::PviData data_in(const isolab_pvi_data& d) { return {thetas(d.theta), to_c(d.sigma), to_c(d.J)}; }

void data_out(const isolab::PviData& d, isolab_pvi_data* out) {
    out->theta[0] = from_c(d.theta.t1);
    out->theta[1] = from_c(d.theta.t2);
    out->theta[2] = from_c(d.theta.t3);
    out->theta[3] = from_c(d.theta.tinf);
    out->sigma = from_c(d.sigma);
    out->J = from_c(d.J);
}

isolab::ArrowOptions options(const isolab_context* ctx) {
    isolab::ArrowOptions o;
    o.require_generic = ctx->require_generic;
    return o;
}

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

bool square3(const isolab_matrix* m) { return m && m->m.rows() == 3; }

}  // namespace

extern "C" {

const char* isolab_version(void) { return "0.1.0"; }

const char* isolab_status_name(isolab_status s) {
    switch (s) {
        case ISOLAB_OK: return "ok";
        case ISOLAB_ERR_DOMAIN: return "domain";
        case ISOLAB_ERR_POLE: return "pole";
        case ISOLAB_ERR_DEGENERATE: return "degenerate";
        case ISOLAB_ERR_SINGULARITY: return "singularity";
        case ISOLAB_ERR_BUDGET: return "budget";
        case ISOLAB_ERR_ACCURACY: return "accuracy";
        case ISOLAB_ERR_SCALING: return "scaling";
        case ISOLAB_ERR_CONFIG: return "config";
        case ISOLAB_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case ISOLAB_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

isolab_status isolab_context_create(isolab_context** out) {
    if (!out) return ISOLAB_ERR_INVALID_ARGUMENT;
    *out = new (std::nothrow) isolab_context();
    return *out ? ISOLAB_OK : ISOLAB_ERR_INTERNAL;
}

void isolab_context_destroy(isolab_context* ctx) { delete ctx; }

const char* isolab_last_error(const isolab_context* ctx) { return ctx ? ctx->last_error.c_str() : ""; }

isolab_status isolab_set_require_generic(isolab_context* ctx, int flag) {
    if (!ctx) return ISOLAB_ERR_INVALID_ARGUMENT;
    ctx->require_generic = flag != 0;
    return ISOLAB_OK;
}

isolab_status isolab_matrix_create(size_t n, isolab_matrix** out) {
    if (!out || n == 0) return ISOLAB_ERR_INVALID_ARGUMENT;
    *out = new (std::nothrow) isolab_matrix();
    if (!*out) return ISOLAB_ERR_INTERNAL;
    (*out)->m = isolab::CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    return ISOLAB_OK;
}

void isolab_matrix_destroy(isolab_matrix* m) { delete m; }

size_t isolab_matrix_dim(const isolab_matrix* m) { return m ? static_cast<size_t>(m->m.rows()) : 0; }

isolab_status isolab_matrix_get(const isolab_matrix* m, size_t i, size_t j, isolab_complex* out) {
    if (!m || !out || i >= isolab_matrix_dim(m) || j >= isolab_matrix_dim(m)) return ISOLAB_ERR_INVALID_ARGUMENT;
    *out = from_c(m->m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    return ISOLAB_OK;
}

isolab_status isolab_matrix_set(isolab_matrix* m, size_t i, size_t j, isolab_complex v) {
    if (!m || i >= isolab_matrix_dim(m) || j >= isolab_matrix_dim(m)) return ISOLAB_ERR_INVALID_ARGUMENT;
    m->m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_c(v);
    return ISOLAB_OK;
}

isolab_status isolab_arrow_q(isolab_context* ctx, const isolab_pvi_data* d, isolab_matrix** out) {
    if (!ctx || !d || !out) return invalid(ctx, "isolab_arrow_q: null argument");
    return guarded(ctx, [&] {
        auto bv = isolab::arrow_q(data_in(*d), options(ctx));
        *out = new isolab_matrix{std::move(bv.phi0)};
        return ISOLAB_OK;
    });
}

isolab_status isolab_arrow_q_inverse(isolab_context* ctx, const isolab_matrix* phi0, const isolab_complex* hint,
                                     isolab_pvi_data* out) {
    if (!ctx || !out || !square3(phi0)) return invalid(ctx, "isolab_arrow_q_inverse: need a 3x3 matrix and output");
    return guarded(ctx, [&] {
        std::optional<cplx> h;
        if (hint) h = to_c(*hint);
        const auto r = isolab::arrow_q_inverse({phi0->m, 1.0, 1.0}, h, options(ctx));
        data_out(r.data, out);
        return ISOLAB_OK;
    });
}

isolab_status isolab_arrow_g(isolab_context* ctx, const isolab_matrix* phi0, isolab_matrix** s_plus,
                             isolab_matrix** s_minus) {
    if (!ctx || !s_plus || !s_minus || !square3(phi0)) return invalid(ctx, "isolab_arrow_g: need a 3x3 matrix and outputs");
    return guarded(ctx, [&] {
        auto s = isolab::arrow_g({phi0->m, 1.0, 1.0}, options(ctx));
        *s_plus = new isolab_matrix{std::move(s.s_plus)};
        *s_minus = new isolab_matrix{std::move(s.s_minus)};
        return ISOLAB_OK;
    });
}

isolab_status isolab_arrow_p(isolab_context* ctx, const isolab_matrix* s_plus, const isolab_matrix* s_minus,
                             const isolab_complex theta[4], isolab_monodromy* out) {
    if (!ctx || !out || !theta || !square3(s_plus) || !square3(s_minus)) {
        return invalid(ctx, "isolab_arrow_p: need 3x3 Stokes matrices, theta and output");
    }
    return guarded(ctx, [&] {
        const auto m = isolab::arrow_p({s_plus->m, s_minus->m}, thetas(theta), options(ctx));
        *out = {from_c(m.p12), from_c(m.p13), from_c(m.p23), from_c(m.p1),
                from_c(m.p2),  from_c(m.p3),  from_c(m.pinf)};
        return ISOLAB_OK;
    });
}

isolab_status isolab_arrow_f(isolab_context* ctx, const isolab_monodromy* m, const isolab_complex theta[4],
                             isolab_pvi_data* out) {
    if (!ctx || !m || !theta || !out) return invalid(ctx, "isolab_arrow_f: null argument");
    return guarded(ctx, [&] {
        const isolab::MonodromyData md{to_c(m->p12), to_c(m->p13), to_c(m->p23), to_c(m->p1),
                                       to_c(m->p2),  to_c(m->p3),  to_c(m->pinf)};
        data_out(isolab::arrow_f(md, thetas(theta), options(ctx)).data, out);
        return ISOLAB_OK;
    });
}

isolab_status isolab_cubic_residual(isolab_context* ctx, const isolab_monodromy* m, double* out) {
    if (!ctx || !m || !out) return invalid(ctx, "isolab_cubic_residual: null argument");
    return guarded(ctx, [&] {
        const isolab::MonodromyData md{to_c(m->p12), to_c(m->p13), to_c(m->p23), to_c(m->p1),
                                       to_c(m->p2),  to_c(m->p3),  to_c(m->pinf)};
        *out = isolab::cubic_residual(md);
        return ISOLAB_OK;
    });
}

isolab_status isolab_stokes_numeric(isolab_context* ctx, const isolab_complex* u, const isolab_matrix* phi, double R,
                                    isolab_matrix** s_plus, isolab_matrix** s_minus, double* triangular_residual) {
    if (!ctx || !u || !phi || !s_plus || !s_minus) return invalid(ctx, "isolab_stokes_numeric: null argument");
    return guarded(ctx, [&] {
        const auto n = phi->m.rows();
        isolab::IrregularSystem sys{isolab::CVector(n), phi->m};
        for (Eigen::Index i = 0; i < n; ++i) sys.u(i) = to_c(u[i]);
        isolab::StokesOptions so;
        if (R > 0.0) so.R = R;
        auto ns = isolab::compute_stokes(sys, so);
        *s_plus = new isolab_matrix{std::move(ns.stokes.s_plus)};
        *s_minus = new isolab_matrix{std::move(ns.stokes.s_minus)};
        if (triangular_residual) *triangular_residual = ns.triangular_residual;
        return ISOLAB_OK;
    });
}

isolab_status isolab_run(isolab_context* ctx, const char* command, const char* config_json, char** report_json,
                         char** csv, int* exit_code) {
    if (!ctx || !command || !report_json) return invalid(ctx, "isolab_run: null argument");
    return guarded(ctx, [&] {
        nlohmann::json cfg = nlohmann::json::object();
        if (config_json && *config_json) {
            try {
                cfg = nlohmann::json::parse(config_json);
            } catch (const nlohmann::json::exception& e) {
                throw isolab::ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
        }
        const auto res = isolab::run_command(command, cfg);
        *report_json = dup_string(res.report.dump(2));
        if (csv) *csv = dup_string(res.csv);
        if (exit_code) *exit_code = res.exit_code;
        return ISOLAB_OK;
    });
}

void isolab_string_free(char* s) { std::free(s); }

}  // extern "C"
