#include <fstream>
#include <json.hpp>
#include <sstream>

#include "wcl/error.hpp"
#include "wcl/harness.hpp"

namespace wcl {

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::config, std::string("config key '") + key + "': " + ex.what());
  }
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_or<T>(j, key, T{});
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::config, "config section '" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw Error(ErrorCode::config, "unknown key '" + key + "' in " + where);
  }
}

void parse_deployment(const json& j, DeploymentSpec& d) {
  reject_unknown(j, {"placement", "area", "radius", "half_side", "n", "sigma_l", "pu"}, "deployment");
  d.kind = placement_kind_from_string(get_or<std::string>(j, "placement", to_string(d.kind)));
  const std::string area = get_or<std::string>(j, "area", d.square_area ? "square" : "disk");
  if (area == "square") {
    d.square_area = true;
  } else if (area == "disk") {
    d.square_area = false;
  } else {
    throw Error(ErrorCode::config, "deployment.area must be 'disk' or 'square'");
  }
  d.radius = get_or<double>(j, "radius", d.radius);
  d.radius = get_or<double>(j, "half_side", d.radius);
  d.n = get_or<std::size_t>(j, "n", d.n);
  d.sigma_l = get_or<double>(j, "sigma_l", d.sigma_l);
  if (j.contains("pu") && !j.at("pu").is_null()) {
    const json& pu = j.at("pu");
    if (pu.is_string()) {
      const auto s = pu.get<std::string>();
      if (s == "uniform") {
        d.pu_uniform = true;
      } else if (s == "center") {
        d.pu = Point2{0.0, 0.0};
      } else {
        throw Error(ErrorCode::config, "deployment.pu must be 'center', 'uniform' or [x, y]");
      }
    } else if (pu.is_array() && pu.size() == 2) {
      d.pu = Point2{pu[0].get<double>(), pu[1].get<double>()};
    } else {
      throw Error(ErrorCode::config, "deployment.pu must be 'center', 'uniform' or [x, y]");
    }
  }
}

void parse_channel(const json& j, ExperimentConfig& cfg) {
  reject_unknown(j, {"p0", "d0", "gamma", "sigma_s", "mode", "x_c", "x_c_over_d", "doi", "doi_correlation"}, "channel");
  ChannelParams& c = cfg.channel;
  c.p0 = get_or<double>(j, "p0", c.p0);
  c.d0 = get_or<double>(j, "d0", c.d0);
  c.gamma = get_or<double>(j, "gamma", c.gamma);
  c.sigma_s = get_or<double>(j, "sigma_s", c.sigma_s);
  const std::string mode = get_or<std::string>(j, "mode", to_string(c.mode));
  if (mode == "iid") {
    c.mode = ShadowingMode::iid;
  } else if (mode == "correlated") {
    c.mode = ShadowingMode::correlated;
  } else {
    throw Error(ErrorCode::config, "channel.mode must be 'iid' or 'correlated'");
  }
  c.x_c = get_or<double>(j, "x_c", c.x_c);
  c.doi = get_or<double>(j, "doi", c.doi);
  c.doi_correlation = get_or<double>(j, "doi_correlation", c.doi_correlation);
  if (auto r = get_opt<double>(j, "x_c_over_d")) cfg.x_c_over_d = r;
}

void parse_estimator(const json& j, EstimatorSpec& e) {
  reject_unknown(j,
                 {"method", "pmin", "pmin_radius", "participation", "rule", "near_strongest_fraction", "refloor_selected",
                  "cluster_radius", "active_threshold_dbm", "aggregate"},
                 "estimator");
  e.method = method_from_string(get_or<std::string>(j, "method", to_string(e.method)));
  if (j.contains("pmin") && !j.at("pmin").is_null()) {
    const json& p = j.at("pmin");
    reject_unknown(p, {"policy", "dbm", "margin_sigmas"}, "estimator.pmin");
    const std::string policy = get_or<std::string>(p, "policy", "border");
    if (policy == "fixed") {
      e.wcl.pmin = FixedPmin{get_or<double>(p, "dbm", -90.0)};
    } else if (policy == "border") {
      e.wcl.pmin = BorderQuantilePmin{get_or<double>(p, "margin_sigmas", 2.33)};
    } else {
      throw Error(ErrorCode::config, "estimator.pmin.policy must be 'fixed' or 'border'");
    }
  }
  e.pmin_radius = get_opt<double>(j, "pmin_radius");
  e.wcl.participation_fraction = get_or<double>(j, "participation", e.wcl.participation_fraction);
  const std::string rule = get_or<std::string>(j, "rule", "top_fraction");
  if (rule == "top_fraction") {
    e.wcl.rule = ParticipationRule::top_fraction;
  } else if (rule == "near_strongest") {
    e.wcl.rule = ParticipationRule::near_strongest;
  } else {
    throw Error(ErrorCode::config, "estimator.rule must be 'top_fraction' or 'near_strongest'");
  }
  e.wcl.near_strongest_fraction = get_or<double>(j, "near_strongest_fraction", e.wcl.near_strongest_fraction);
  e.wcl.refloor_selected = get_or<bool>(j, "refloor_selected", e.wcl.refloor_selected);
  e.cluster_radius = get_or<double>(j, "cluster_radius", e.cluster_radius);
  e.active_threshold_dbm = get_opt<double>(j, "active_threshold_dbm");
  e.aggregate = get_or<bool>(j, "aggregate", e.aggregate);
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    throw Error(ErrorCode::config, std::string("config is not valid JSON: ") + ex.what());
  }
  reject_unknown(j,
                 {"scenario", "deployment", "channel", "estimator", "theory", "overhead", "trials", "seed", "output"},
                 "config");
  ExperimentConfig cfg;
  cfg.scenario = get_or<std::string>(j, "scenario", cfg.scenario);
  if (j.contains("deployment")) parse_deployment(j.at("deployment"), cfg.deployment);
  if (j.contains("channel")) parse_channel(j.at("channel"), cfg);
  if (j.contains("estimator")) parse_estimator(j.at("estimator"), cfg.estimator);
  if (j.contains("theory")) {
    const json& t = j.at("theory");
    reject_unknown(t, {"method", "placements"}, "theory");
    cfg.theory.method = ratio_method_from_string(get_or<std::string>(t, "method", to_string(cfg.theory.method)));
    cfg.theory.placements = get_or<std::size_t>(t, "placements", cfg.theory.placements);
  }
  if (j.contains("overhead")) {
    const json& o = j.at("overhead");
    reject_unknown(o, {"p_r_min_dbm", "clusters", "eta"}, "overhead");
    cfg.overhead.p_r_min_dbm = get_or<double>(o, "p_r_min_dbm", cfg.overhead.p_r_min_dbm);
    cfg.overhead.clusters = get_opt<std::size_t>(o, "clusters");
    cfg.overhead.eta = get_opt<double>(o, "eta");
  }
  cfg.trials = get_or<std::size_t>(j, "trials", cfg.trials);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  cfg.output = get_or<std::string>(j, "output", cfg.output);
  try {
    cfg.validate();
  } catch (const Error& ex) {
    throw Error(ErrorCode::config, std::string("invalid config: ") + ex.what());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

}  // namespace wcl
