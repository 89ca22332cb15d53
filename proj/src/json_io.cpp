#include "rande/json_io.hpp"

#include <stdexcept>

namespace rande {

void to_json(nlohmann::json& j, const SpatialGrid& g) {
    j = {{"x_min", g.x_min}, {"x_max", g.x_max}, {"n_points", g.n_points}};
}

void from_json(const nlohmann::json& j, SpatialGrid& g) {
    g = SpatialGrid(j.at("x_min").get<double>(), j.at("x_max").get<double>(),
                    j.at("n_points").get<std::size_t>());
}

void to_json(nlohmann::json& j, const TimeGrid& g) {
    j = {{"t_min", g.t_min}, {"t_max", g.t_max}, {"n_points", g.n_points}};
}

void from_json(const nlohmann::json& j, TimeGrid& g) {
    g = TimeGrid(j.at("t_min").get<double>(), j.at("t_max").get<double>(),
                 j.at("n_points").get<std::size_t>());
}

void to_json(nlohmann::json& j, const OdeTols& t) {
    j = {{"rel", t.rel}, {"abs", t.abs}};
}

void from_json(const nlohmann::json& j, OdeTols& t) {
    t.rel = j.value("rel", OdeTols{}.rel);
    t.abs = j.value("abs", OdeTols{}.abs);
}

void to_json(nlohmann::json& j, const GaussianComponent& c) {
    j = {{"mean_D", c.mean_D},
         {"std_D", c.std_D},
         {"mean_rho", c.mean_rho},
         {"std_rho", c.std_rho},
         {"weight", c.weight}};
}

void from_json(const nlohmann::json& j, GaussianComponent& c) {
    j.at("mean_D").get_to(c.mean_D);
    j.at("std_D").get_to(c.std_D);
    j.at("mean_rho").get_to(c.mean_rho);
    j.at("std_rho").get_to(c.std_rho);
    j.at("weight").get_to(c.weight);
}

void to_json(nlohmann::json& j, const GaussianMixtureSpec& s) {
    j = {{"components", s.components}};
}

void from_json(const nlohmann::json& j, GaussianMixtureSpec& s) {
    j.at("components").get_to(s.components);
    s.validate();
}

namespace {

const char* kind_name(InitialCondition::Kind k) {
    switch (k) {
        case InitialCondition::Kind::GaussianBump: return "gaussian_bump";
        case InitialCondition::Kind::Step: return "step";
        case InitialCondition::Kind::Custom: return "custom";
    }
    return "gaussian_bump";
}

InitialCondition::Kind kind_from_name(const std::string& s) {
    if (s == "gaussian_bump") return InitialCondition::Kind::GaussianBump;
    if (s == "step") return InitialCondition::Kind::Step;
    if (s == "custom") return InitialCondition::Kind::Custom;
    throw std::invalid_argument("unknown initial condition kind: " + s);
}

}  // namespace

void to_json(nlohmann::json& j, const InitialCondition& ic) {
    j = {{"kind", kind_name(ic.kind)},
         {"amplitude", ic.amplitude},
         {"width", ic.width},
         {"center", ic.center}};
    if (ic.kind == InitialCondition::Kind::Custom) j["samples"] = ic.samples;
}

void from_json(const nlohmann::json& j, InitialCondition& ic) {
    InitialCondition def;
    ic.kind = kind_from_name(j.value("kind", "gaussian_bump"));
    ic.amplitude = j.value("amplitude", def.amplitude);
    ic.width = j.value("width", def.width);
    ic.center = j.value("center", def.center);
    if (j.contains("samples")) j.at("samples").get_to(ic.samples);
}

void to_json(nlohmann::json& j, const ParameterMesh& m) {
    j = {{"D_nodes", m.D_nodes}, {"rho_nodes", m.rho_nodes}};
}

void from_json(const nlohmann::json& j, ParameterMesh& m) {
    j.at("D_nodes").get_to(m.D_nodes);
    j.at("rho_nodes").get_to(m.rho_nodes);
    m.validate();
}

void to_json(nlohmann::json& j, const PhenotypeNode& n) {
    j = {{"D", n.D}, {"rho", n.rho}, {"alpha", n.alpha}};
}

void from_json(const nlohmann::json& j, PhenotypeNode& n) {
    j.at("D").get_to(n.D);
    j.at("rho").get_to(n.rho);
    n.alpha = j.value("alpha", 1.0);
}

}  // namespace rande
