#include "heis/json_io.hpp"

#include <fstream>

namespace heis {

namespace {

json vec_to_json(const HVec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json mat_to_json(const HMat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    return rows;
}

HVec vec_from_json(const json& j, int expect = -1) {
    if (!j.is_array()) throw DomainError("json: expected array of reals");
    HVec v(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i].get<double>();
    if (expect >= 0 && v.size() != expect)
        throw DimensionError("json: vector has wrong length");
    return v;
}

HMat mat_from_json(const json& j, int expect) {
    if (!j.is_array() || static_cast<int>(j.size()) != expect)
        throw DimensionError("json: matrix has wrong shape");
    HMat m(expect, expect);
    for (int i = 0; i < expect; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != expect)
            throw DimensionError("json: matrix has wrong shape");
        for (int k = 0; k < expect; ++k) m(i, k) = row[k].get<double>();
    }
    return m;
}

}  // namespace

json to_json(const Quadric& q) {
    return json{{"n", q.n}, {"b", vec_to_json(q.b)}, {"Q", mat_to_json(q.Q)}, {"T", q.T}};
}

Quadric quadric_from_json(const json& j) {
    const int n = j.at("n").get<int>();
    return Quadric(n, vec_from_json(j.at("b"), 2 * n), mat_from_json(j.at("Q"), 2 * n),
                   j.at("T").get<double>());
}

json to_json(const MeasureModel& m) {
    json j{{"n", m.n()}};
    switch (m.kind()) {
        case MeasureModel::Kind::FlatPlane:
            j["variant"] = "flat_plane";
            j["e"] = vec_to_json(m.plane_normal());
            break;
        case MeasureModel::Kind::HorizontalLine:
            j["variant"] = "horizontal_line";
            j["v"] = vec_to_json(m.line_direction());
            break;
        case MeasureModel::Kind::VerticalAxis:
            j["variant"] = "vertical_axis";
            break;
        case MeasureModel::Kind::VerticalCone:
            j["variant"] = "vertical_cone";
            j["Q"] = mat_to_json(m.cone_Q());
            j["b"] = vec_to_json(m.cone_b());
            if (!m.cone_selector().empty()) j["selector"] = m.cone_selector();
            break;
        case MeasureModel::Kind::HorizontalGraph:
            j["variant"] = "horizontal_graph";
            j["D"] = mat_to_json(m.graph_D());
            j["b"] = vec_to_json(m.graph_b());
            if (m.graph_domain() == MeasureModel::Domain::HalfSpace)
                j["domain"] = json{{"half_space", vec_to_json(m.half_normal())}};
            else
                j["domain"] = "full";
            break;
    }
    return j;
}

MeasureModel model_from_json(const json& j) {
    const int n = j.at("n").get<int>();
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "flat_plane")
        return MeasureModel::flat_plane(n, vec_from_json(j.at("e"), 2 * n));
    if (variant == "horizontal_line")
        return MeasureModel::horizontal_line(vec_from_json(j.at("v"), 2));
    if (variant == "vertical_axis") return MeasureModel::vertical_axis(n);
    if (variant == "vertical_cone") {
        std::vector<int> selector;
        if (j.contains("selector")) selector = j.at("selector").get<std::vector<int>>();
        HVec b = j.contains("b") ? vec_from_json(j.at("b"), 2 * n) : HVec(HVec::Zero(2 * n));
        return MeasureModel::vertical_cone(n, mat_from_json(j.at("Q"), 2 * n), b, selector);
    }
    if (variant == "horizontal_graph") {
        MeasureModel::Domain dom = MeasureModel::Domain::Full;
        HVec half = HVec::Zero(2 * n);
        if (j.contains("domain") && j.at("domain").is_object()) {
            dom = MeasureModel::Domain::HalfSpace;
            half = vec_from_json(j.at("domain").at("half_space"), 2 * n);
        }
        HVec b = j.contains("b") ? vec_from_json(j.at("b"), 2 * n) : HVec(HVec::Zero(2 * n));
        return MeasureModel::horizontal_graph(n, b, mat_from_json(j.at("D"), 2 * n), dom,
                                              half);
    }
    throw DomainError("model_from_json: unknown variant '" + variant + "'");
}

json to_json(const IntegralResult& r) {
    return json{{"value", r.value},
                {"abs_error_est", r.abs_error_est},
                {"samples", r.samples},
                {"seed", r.seed}};
}

json to_json(const ExpansionReport& rep) {
    return json{{"c_fit", rep.c_fit},       {"d_fit", rep.d_fit},
                {"e_fit", rep.e_fit},       {"c_err", rep.c_err},
                {"d_err", rep.d_err},       {"e_err", rep.e_err},
                {"c_closed", rep.c_closed}, {"e_closed", rep.e_closed},
                {"residual_norm", rep.residual_norm},
                {"condition", rep.condition},
                {"radii", rep.radii},       {"masses", rep.masses}};
}

json to_json(const ResidualField& field) {
    json samples = json::array();
    for (const auto& s : field.samples)
        samples.push_back(json{{"dir", vec_to_json(s.dir)}, {"residual", s.residual}});
    return json{{"D", mat_to_json(field.D)},
                {"sup_abs", field.sup_abs},
                {"argmax_dir", vec_to_json(field.argmax_dir)},
                {"samples", samples}};
}

MeasureModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_model: cannot open " + path);
    json j;
    in >> j;
    return model_from_json(j);
}

}  // namespace heis
