#include "isolab/harness/codec.hpp"

namespace isolab::codec {

namespace {

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

double number(const json& j) {
    if (!j.is_number()) throw ConfigError("expected a number, got " + j.dump());
    return j.get<double>();
}

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {number(j[0]), number(j[1])};
    if (j.is_object() && j.contains("re")) return {number(j.at("re")), j.contains("im") ? number(j.at("im")) : 0.0};
    throw ConfigError("expected a complex number [re, im], got " + j.dump());
}

json to_json(const CMatrix& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array(), c = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            r.push_back(m(i, k).real());
            c.push_back(m(i, k).imag());
        }
        re.push_back(r);
        im.push_back(c);
    }
    return {{"n", m.rows()}, {"re", re}, {"im", im}};
}

CMatrix matrix_from(const json& j) {
    const json& re = field(j, "re");
    const auto n = j.contains("n") ? field(j, "n").get<long>() : static_cast<long>(re.size());
    if (n < 1) throw ConfigError("matrix: n must be positive");
    const bool has_im = j.contains("im");
    const json& im = has_im ? j.at("im") : re;
    auto check_rows = [n](const json& a, const char* name) {
        if (!a.is_array() || static_cast<long>(a.size()) != n) throw ConfigError(std::string("matrix: ") + name + " must have n rows");
        for (const auto& row : a)
            if (!row.is_array() || static_cast<long>(row.size()) != n) throw ConfigError(std::string("matrix: ") + name + " must be n x n");
    };
    check_rows(re, "re");
    if (has_im) check_rows(im, "im");
    CMatrix m(n, n);
    for (long i = 0; i < n; ++i)
        for (long k = 0; k < n; ++k) m(i, k) = {number(re[i][k]), has_im ? number(im[i][k]) : 0.0};
    require_valid(m, "matrix");
    return m;
}

json vector_to_json(const CVector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
    return a;
}

CVector vector_from(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("expected a non-empty array of complex numbers");
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from(j[i]);
    return v;
}

json to_json(const Thetas& th) { return json::array({to_json(th.t1), to_json(th.t2), to_json(th.t3), to_json(th.tinf)}); }

Thetas thetas_from(const json& j) {
    if (!j.is_array() || j.size() != 4) throw ConfigError("theta must hold four entries (theta1, theta2, theta3, theta_inf)");
    return {complex_from(j[0]), complex_from(j[1]), complex_from(j[2]), complex_from(j[3])};
}

json to_json(const PviData& d) { return {{"theta", to_json(d.theta)}, {"sigma", to_json(d.sigma)}, {"J", to_json(d.J)}}; }

PviData pvi_data_from(const json& j) {
    return {thetas_from(field(j, "theta")), complex_from(field(j, "sigma")), complex_from(field(j, "J"))};
}

json to_json(const BoundaryValue& b) { return {{"phi0", to_json(b.phi0)}, {"k1", to_json(b.k1)}, {"k2", to_json(b.k2)}}; }

BoundaryValue boundary_value_from(const json& j) {
    BoundaryValue b;
    b.phi0 = matrix_from(j.contains("phi0") ? j.at("phi0") : j);
    if (j.contains("k1")) b.k1 = complex_from(j.at("k1"));
    if (j.contains("k2")) b.k2 = complex_from(j.at("k2"));
    return b;
}

json to_json(const StokesPair& s) { return {{"s_plus", to_json(s.s_plus)}, {"s_minus", to_json(s.s_minus)}}; }

StokesPair stokes_from(const json& j) { return {matrix_from(field(j, "s_plus")), matrix_from(field(j, "s_minus"))}; }

json to_json(const MonodromyData& m) {
    return {{"p12", to_json(m.p12)}, {"p13", to_json(m.p13)}, {"p23", to_json(m.p23)}, {"p1", to_json(m.p1)},
            {"p2", to_json(m.p2)},   {"p3", to_json(m.p3)},   {"pinf", to_json(m.pinf)}};
}

MonodromyData monodromy_from(const json& j) {
    MonodromyData m;
    m.p12 = complex_from(field(j, "p12"));
    m.p13 = complex_from(field(j, "p13"));
    m.p23 = complex_from(field(j, "p23"));
    m.p1 = complex_from(field(j, "p1"));
    m.p2 = complex_from(field(j, "p2"));
    m.p3 = complex_from(field(j, "p3"));
    m.pinf = complex_from(field(j, "pinf"));
    return m;
}

json to_json(const JmmsState& s) { return {{"u", vector_to_json(s.u)}, {"phi", to_json(s.phi)}}; }

JmmsState jmms_state_from(const json& j) {
    JmmsState s{vector_from(field(j, "u")), matrix_from(field(j, "phi"))};
    if (s.u.size() != s.phi.rows()) throw ConfigError("state: u and phi sizes differ");
    return s;
}

}  // namespace isolab::codec
