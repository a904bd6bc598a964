#include "hwm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

namespace hwm::io {

json to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(ErrorCode::InvalidInput, "complex scalar must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const Vec3c& v) { return json::array({to_json(v(0)), to_json(v(1)), to_json(v(2))}); }

Vec3c vec3c_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::InvalidInput, "3-vector expected");
  return Vec3c(cplx_from_json(j[0]), cplx_from_json(j[1]), cplx_from_json(j[2]));
}

json to_json(const model::Configuration& cfg) {
  json j;
  j["m0"] = json::array({cfg.m0(0), cfg.m0(1), cfg.m0(2)});
  j["spins"] = json::array();
  j["poles"] = json::array();
  for (const auto& s : cfg.spins) j["spins"].push_back(to_json(s));
  for (const auto& p : cfg.poles) j["poles"].push_back(to_json(p));
  return j;
}

model::Configuration configuration_from_json(const json& j) {
  require_keys(j, {"m0", "spins", "poles"}, "configuration");
  if (!j.contains("spins") || !j.contains("poles"))
    fail(ErrorCode::InvalidInput, "configuration needs spins and poles");
  model::Configuration cfg;
  if (j.contains("m0")) {
    const auto& m = j["m0"];
    if (!m.is_array() || m.size() != 3) fail(ErrorCode::InvalidInput, "m0 must have 3 entries");
    cfg.m0 = Vec3(m[0].get<double>(), m[1].get<double>(), m[2].get<double>());
  }
  for (const auto& s : j["spins"]) cfg.spins.push_back(vec3c_from_json(s));
  for (const auto& p : j["poles"]) cfg.poles.push_back(cplx_from_json(p));
  cfg.validate();
  return cfg;
}

json to_json(const constructor::Targets& t) {
  json j;
  j["w"] = t.w;
  j["epsilon"] = t.epsilon;
  if (t.spacing) j["spacing"] = *t.spacing;
  return j;
}

constructor::Targets targets_from_json(const json& j) {
  require_keys(j, {"w", "epsilon", "spacing"}, "targets");
  if (!j.contains("w") || !j["w"].is_array())
    fail(ErrorCode::InvalidInput, "targets.w must be an array");
  constructor::Targets t;
  for (const auto& v : j["w"]) t.w.push_back(v.get<double>());
  if (j.contains("epsilon")) t.epsilon = j["epsilon"].get<double>();
  if (j.contains("spacing")) t.spacing = j["spacing"].get<double>();
  t.validate();
  return t;
}

json to_json(const constructor::BuildReport& r) {
  json j;
  j["residual_history"] = r.residual_history;
  j["geometric_ratio"] = r.geometric_ratio;
  j["final_speed_errors"] = r.final_speed_errors;
  j["d_used"] = r.d_used;
  j["iterations"] = r.iterations;
  j["doublings"] = r.doublings;
  return j;
}

json to_json(const model::ConstraintReport& r) {
  json j;
  j["nilpotency"] = r.nilpotency;
  j["orthogonality"] = r.orthogonality;
  j["orthogonality_intro"] = r.orthogonality_intro;
  j["max_residual"] = r.max_residual;
  return j;
}

json to_json(const dynamics::MonitorSummary& s) {
  json j;
  j["min_pair_distance"] = s.min_pair_distance;
  j["min_im"] = s.min_im;
  j["max_spin_norm"] = s.max_spin_norm;
  j["max_constraint_residual"] = s.max_constraint_residual;
  j["min_separation_rate"] =
      std::isfinite(s.min_separation_rate) ? json(s.min_separation_rate) : json("inf");
  j["status"] = dynamics::to_string(s.status);
  return j;
}

json to_json(const scattering::ScatterStats& s) {
  auto enc = [](double v) { return std::isfinite(v) ? json(v) : json(v > 0 ? "inf" : "-inf"); };
  json j;
  j["S"] = s.S;
  j["nu"] = enc(s.nu);
  j["D"] = enc(s.D);
  j["alpha"] = enc(s.alpha);
  j["N"] = s.n;
  return j;
}

json to_json(const scattering::Witness& w) {
  json j;
  j["kappa"] = w.kappa;
  j["sprime"] = w.sprime;
  j["eta"] = std::isfinite(w.eta) ? json(w.eta) : json("inf");
  return j;
}

json to_json(const scattering::BoundsReport& r) {
  json j;
  j["separation_ok"] = r.separation_ok;
  j["speed_drift_ok"] = r.speed_drift_ok;
  j["spins_ok"] = r.spins_ok;
  j["im_floor_ok"] = r.im_floor_ok;
  j["worst_separation_rate"] =
      std::isfinite(r.worst_separation_rate) ? json(r.worst_separation_rate) : json("inf");
  j["worst_speed_drift"] = r.worst_speed_drift;
  j["worst_spin_norm"] = r.worst_spin_norm;
  j["worst_im_margin"] =
      std::isfinite(r.worst_im_margin) ? json(r.worst_im_margin) : json("inf");
  j["all_ok"] = r.all_ok();
  if (r.violating_pair)
    j["violating_pair"] = json::array({r.violating_pair->first, r.violating_pair->second});
  return j;
}

json to_json(const scattering::AsymptoticData& a) {
  json j;
  j["v"] = a.v;
  j["a"] = json::array();
  j["b"] = json::array();
  for (const auto& z : a.a) j["a"].push_back(to_json(z));
  for (const auto& s : a.b) j["b"].push_back(to_json(s));
  j["offsets_upper_half"] = a.offsets_upper_half;
  return j;
}

json to_json(const scattering::ConvergenceMetrics& m) {
  json j;
  j["samples"] = json::array();
  for (const auto& c : m.samples) {
    json s;
    s["t"] = c.t;
    s["hhalf_diff"] = c.hhalf_diff;
    s["max_spin_gap"] = c.max_spin_gap;
    s["max_pole_gap"] = c.max_pole_gap;
    j["samples"].push_back(s);
  }
  j["spin_gap_decay_exponent"] = m.spin_gap_decay_exponent;
  j["pole_gap_decay_exponent"] = m.pole_gap_decay_exponent;
  return j;
}

json to_json(const scattering::TravelingReport& r) {
  json j;
  j["pt_residual"] = r.pt_residual;
  j["ct_residuals"] = json::array({r.ct_residuals[0], r.ct_residuals[1], r.ct_residuals[2]});
  j["l_diag_residual"] = r.l_diag_residual;
  j["h1_ok"] = r.h1_ok;
  j["h2_ok"] = r.h2_ok;
  j["tolerance"] = r.tolerance;
  j["velocity"] = r.velocity;
  switch (r.verdict) {
    case scattering::TravelingReport::Verdict::Traveling: j["verdict"] = "Traveling"; break;
    case scattering::TravelingReport::Verdict::NotTraveling: j["verdict"] = "NotTraveling"; break;
    case scattering::TravelingReport::Verdict::Inconclusive: j["verdict"] = "Inconclusive"; break;
  }
  return j;
}

dynamics::TrajectoryOptions trajectory_options_from_json(const json& j) {
  require_keys(j,
               {"t_begin", "t_end", "rel_tol", "abs_tol", "max_step", "sample_stride",
                "collision_floor", "im_floor"},
               "trajectory");
  dynamics::TrajectoryOptions o;
  if (j.contains("t_begin")) o.t_begin = j["t_begin"].get<double>();
  if (j.contains("t_end")) o.t_end = j["t_end"].get<double>();
  if (j.contains("rel_tol")) o.rel_tol = j["rel_tol"].get<double>();
  if (j.contains("abs_tol")) o.abs_tol = j["abs_tol"].get<double>();
  if (j.contains("max_step")) o.max_step = j["max_step"].get<double>();
  if (j.contains("sample_stride")) o.sample_stride = j["sample_stride"].get<double>();
  if (j.contains("collision_floor")) o.collision_floor = j["collision_floor"].get<double>();
  if (j.contains("im_floor")) o.im_floor = j["im_floor"].get<double>();
  o.validate();
  return o;
}

std::string format_double(double v) {
  if (!std::isfinite(v)) fail(ErrorCode::InvalidInput, "non-finite value in output");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string trajectory_csv(const dynamics::Trajectory& traj) {
  if (traj.samples.empty()) fail(ErrorCode::InsufficientSamples, "empty trajectory");
  const int n = traj.samples.front().state.size();
  std::string out;
  out += "t";
  for (int j = 0; j < n; ++j) {
    out += ",re_x" + std::to_string(j) + ",im_x" + std::to_string(j);
    out += ",re_xdot" + std::to_string(j) + ",im_xdot" + std::to_string(j);
    for (int c = 0; c < 3; ++c)
      out += ",re_s" + std::to_string(j) + "_" + std::to_string(c) + ",im_s" + std::to_string(j) +
             "_" + std::to_string(c);
  }
  out += ",max_nilpotency,max_orthogonality\r\n";
  for (size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& smp = traj.samples[i];
    out += format_double(smp.t);
    for (int j = 0; j < n; ++j) {
      out += "," + format_double(smp.state.poles[j].real()) + "," +
             format_double(smp.state.poles[j].imag());
      out += "," + format_double(smp.state.pole_velocities[j].real()) + "," +
             format_double(smp.state.pole_velocities[j].imag());
      for (int c = 0; c < 3; ++c)
        out += "," + format_double(smp.state.spins[j](c).real()) + "," +
               format_double(smp.state.spins[j](c).imag());
    }
    const auto& mon = traj.monitors[i];
    const double nil = *std::max_element(mon.nilpotency.begin(), mon.nilpotency.end());
    const double ortho = *std::max_element(mon.orthogonality.begin(), mon.orthogonality.end());
    out += "," + format_double(nil) + "," + format_double(ortho) + "\r\n";
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::InvalidInput, "cannot open " + tmp.string());
    f << content;
    f.flush();
    if (!f) fail(ErrorCode::InvalidInput, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& context) {
  if (!j.is_object()) fail(ErrorCode::InvalidInput, context + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(ErrorCode::InvalidInput, "unknown key '" + key + "' in " + context);
  }
}

void validate_schema(const json& value, const json& schema, const std::string& context) {
  if (schema.contains("type")) {
    const std::string type = schema["type"].get<std::string>();
    bool ok = (type == "object" && value.is_object()) || (type == "array" && value.is_array()) ||
              (type == "string" && value.is_string()) || (type == "number" && value.is_number()) ||
              (type == "integer" && value.is_number_integer()) ||
              (type == "boolean" && value.is_boolean()) || (type == "null" && value.is_null());
    if (!ok) fail(ErrorCode::InvalidInput, context + ": expected " + type);
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& e : schema["enum"]) ok = ok || (e == value);
    if (!ok) fail(ErrorCode::InvalidInput, context + ": value not in enum");
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& r : schema["required"])
        if (!value.contains(r.get<std::string>()))
          fail(ErrorCode::InvalidInput, context + ": missing required key " + r.get<std::string>());
    const json props = schema.value("properties", json::object());
    for (const auto& [key, sub] : value.items()) {
      if (props.contains(key)) {
        validate_schema(sub, props[key], context + "." + key);
      } else if (schema.contains("additionalProperties") &&
                 schema["additionalProperties"].is_boolean() &&
                 !schema["additionalProperties"].get<bool>()) {
        fail(ErrorCode::InvalidInput, context + ": unexpected key " + key);
      }
    }
  }
  if (value.is_array() && schema.contains("items"))
    for (size_t i = 0; i < value.size(); ++i)
      validate_schema(value[i], schema["items"], context + "[" + std::to_string(i) + "]");
}

}  // namespace hwm::io
