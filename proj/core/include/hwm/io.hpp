#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "hwm/constructor.hpp"
#include "hwm/dynamics.hpp"
#include "hwm/model.hpp"
#include "hwm/scattering.hpp"

namespace hwm::io {

using json = nlohmann::json;

// Complex scalars serialize as [re, im]; 3-vectors as arrays of three
// complex entries.
json to_json(const cplx& z);
cplx cplx_from_json(const json& j);
json to_json(const Vec3c& v);
Vec3c vec3c_from_json(const json& j);

json to_json(const model::Configuration& cfg);
model::Configuration configuration_from_json(const json& j);

json to_json(const constructor::Targets& t);
constructor::Targets targets_from_json(const json& j);

json to_json(const constructor::BuildReport& r);
json to_json(const model::ConstraintReport& r);
json to_json(const dynamics::MonitorSummary& s);
json to_json(const scattering::ScatterStats& s);
json to_json(const scattering::Witness& w);
json to_json(const scattering::BoundsReport& r);
json to_json(const scattering::AsymptoticData& a);
json to_json(const scattering::ConvergenceMetrics& m);
json to_json(const scattering::TravelingReport& r);

dynamics::TrajectoryOptions trajectory_options_from_json(const json& j);

/// Trajectory CSV: RFC-4180, CRLF, header row; one row per sample with pole,
/// velocity and spin components plus constraint residuals.
std::string trajectory_csv(const dynamics::Trajectory& traj);

/// Shortest round-trip decimal form of a double (no NaN/Inf allowed).
std::string format_double(double v);

/// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

/// Rejects unknown keys: every key of j must appear in allowed.
void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& context);

/// Minimal JSON-schema subset validator (type, properties, required, items,
/// additionalProperties, enum). Throws Error on violation.
void validate_schema(const json& value, const json& schema, const std::string& context = "$");

}  // namespace hwm::io
