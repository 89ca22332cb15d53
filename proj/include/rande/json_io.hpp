#pragma once

#include <json.hpp>

#include "rande/distributions.hpp"
#include "rande/grid.hpp"
#include "rande/models.hpp"
#include "rande/ode.hpp"

namespace rande {

// nlohmann-json ADL hooks for the core value types. Serialized documents use
// stable field names so datasets and fit results are portable across runs.

void to_json(nlohmann::json& j, const SpatialGrid& g);
void from_json(const nlohmann::json& j, SpatialGrid& g);

void to_json(nlohmann::json& j, const TimeGrid& g);
void from_json(const nlohmann::json& j, TimeGrid& g);

void to_json(nlohmann::json& j, const OdeTols& t);
void from_json(const nlohmann::json& j, OdeTols& t);

void to_json(nlohmann::json& j, const GaussianComponent& c);
void from_json(const nlohmann::json& j, GaussianComponent& c);

void to_json(nlohmann::json& j, const GaussianMixtureSpec& s);
void from_json(const nlohmann::json& j, GaussianMixtureSpec& s);

void to_json(nlohmann::json& j, const InitialCondition& ic);
void from_json(const nlohmann::json& j, InitialCondition& ic);

void to_json(nlohmann::json& j, const ParameterMesh& m);
void from_json(const nlohmann::json& j, ParameterMesh& m);

void to_json(nlohmann::json& j, const PhenotypeNode& n);
void from_json(const nlohmann::json& j, PhenotypeNode& n);

}  // namespace rande
