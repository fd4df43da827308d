#include "rhoraw/params_io.hpp"

#include <fstream>

#include "rhoraw/error.hpp"

namespace rhoraw::params_io {

namespace {

json matrix_to_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

Eigen::Matrix3d matrix_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidParams("CCM must be a 3x3 array");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    if (!j[r].is_array() || j[r].size() != 3) throw InvalidParams("CCM must be a 3x3 array");
    for (int c = 0; c < 3; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

void read_isp_fields(const json& j, isp::IspParams& p) {
  if (j.contains("awb")) {
    const auto& a = j["awb"];
    if (a.contains("presets")) {
      p.awb.presets.clear();
      for (const auto& e : a["presets"]) {
        if (!e.is_array() || e.size() != 2) throw InvalidParams("AWB preset must be [r, b]");
        p.awb.presets.push_back({e[0].get<double>(), e[1].get<double>()});
      }
      p.awb_weights.assign(p.awb.presets.size(), 1.0 / double(std::max<std::size_t>(1, p.awb.presets.size())));
    }
    if (a.contains("weights")) p.awb_weights = a["weights"].get<std::vector<double>>();
  }
  if (j.contains("brightness")) {
    const auto& b = j["brightness"];
    p.brightness.alpha = b.value("alpha", p.brightness.alpha);
    p.brightness.beta = b.value("beta", p.brightness.beta);
    p.brightness.raw_gain = b.value("raw_gain", p.brightness.raw_gain);
  }
  if (j.contains("ccm")) {
    const auto& c = j["ccm"];
    if (c.contains("day")) p.ccm.day = matrix_from_json(c["day"]);
    if (c.contains("night")) p.ccm.night = matrix_from_json(c["night"]);
    if (c.contains("weights")) {
      const auto w = c["weights"].get<std::vector<double>>();
      if (w.size() != 2) throw InvalidParams("CCM weights must be [w_day, w_night]");
      p.omega_day = w[0];
      p.omega_night = w[1];
    }
  }
  if (j.contains("gamma")) {
    const auto g = j["gamma"].get<std::string>();
    if (g == "bt709")
      p.gamma = isp::GammaMode::BT709;
    else if (g == "none")
      p.gamma = isp::GammaMode::None;
    else
      throw InvalidParams("gamma must be \"bt709\" or \"none\"");
  }
}

}  // namespace

json to_json(const isp::IspParams& p) {
  json presets = json::array();
  for (const auto& g : p.awb.presets) presets.push_back({g.r, g.b});
  return {{"awb", {{"presets", presets}, {"weights", p.awb_weights}}},
          {"brightness", {{"alpha", p.brightness.alpha}, {"beta", p.brightness.beta}, {"raw_gain", p.brightness.raw_gain}}},
          {"ccm",
           {{"day", matrix_to_json(p.ccm.day)},
            {"night", matrix_to_json(p.ccm.night)},
            {"weights", {p.omega_day, p.omega_night}}}},
          {"gamma", p.gamma == isp::GammaMode::BT709 ? "bt709" : "none"}};
}

isp::IspParams isp_params_from_json(const json& j) {
  try {
    isp::IspParams p = isp::IspParams::defaults();
    read_isp_fields(j, p);
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw InvalidParams(std::string("ISP params: ") + e.what());
  }
}

json to_json(const RawMeta& m) {
  return {{"pattern", std::string(to_string(m.pattern))},
          {"bit_depth", m.bit_depth},
          {"black_lev", m.black_lev},
          {"saturation_lev", m.saturation_lev}};
}

RawMeta raw_meta_from_json(const json& j, RawMeta m) {
  if (j.contains("pattern")) m.pattern = parse_pattern(j["pattern"].get<std::string>());
  m.bit_depth = j.value("bit_depth", m.bit_depth);
  m.black_lev = j.value("black_lev", m.black_lev);
  m.saturation_lev = j.value("saturation_lev", m.saturation_lev);
  m.validate();
  return m;
}

json to_json(const invisp::InvIspParams& p) {
  json j = to_json(p.banks);
  j["inverse"] = {{"awb_slope", p.maps.awb_slope},
                  {"awb_bias", p.maps.awb_bias},
                  {"cc_slope", {p.maps.cc_slope[0], p.maps.cc_slope[1]}},
                  {"cc_bias", {p.maps.cc_bias[0], p.maps.cc_bias[1]}},
                  {"brightness_scale", p.maps.brightness_scale},
                  {"brightness_bias", p.maps.brightness_bias}};
  j["raw"] = to_json(p.raw);
  return j;
}

invisp::InvIspParams inv_params_from_json(const json& j) {
  try {
    invisp::InvIspParams p = invisp::InvIspParams::defaults();
    read_isp_fields(j, p.banks);
    p.maps = invisp::InverseMaps::neutral(p.banks.awb.presets.size());
    if (j.contains("inverse")) {
      const auto& m = j["inverse"];
      if (m.contains("awb_slope")) p.maps.awb_slope = m["awb_slope"].get<std::vector<double>>();
      if (m.contains("awb_bias")) p.maps.awb_bias = m["awb_bias"].get<std::vector<double>>();
      for (const char* key : {"cc_slope", "cc_bias"}) {
        if (!m.contains(key)) continue;
        const auto v = m[key].get<std::vector<double>>();
        if (v.size() != 2) throw InvalidParams(std::string(key) + " must have two entries");
        double* dst = std::string(key) == "cc_slope" ? p.maps.cc_slope : p.maps.cc_bias;
        dst[0] = v[0];
        dst[1] = v[1];
      }
      p.maps.brightness_scale = m.value("brightness_scale", p.maps.brightness_scale);
      p.maps.brightness_bias = m.value("brightness_bias", p.maps.brightness_bias);
    }
    if (j.contains("raw")) p.raw = raw_meta_from_json(j["raw"], p.raw);
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw InvalidParams(std::string("inverse ISP params: ") + e.what());
  }
}

json to_json(const invisp::IlluminationPrior& p) {
  return {{"theta", {{"mean", p.theta.mean}, {"sigma", p.theta.sigma}}},
          {"phi", {{"mean", p.phi.mean}, {"sigma", p.phi.sigma}}},
          {"seed", p.seed}};
}

invisp::IlluminationPrior prior_from_json(const json& j) {
  try {
    invisp::IlluminationPrior p;
    if (j.contains("theta")) {
      p.theta.mean = j["theta"].value("mean", p.theta.mean);
      p.theta.sigma = j["theta"].value("sigma", p.theta.sigma);
    }
    if (j.contains("phi")) {
      p.phi.mean = j["phi"].value("mean", p.phi.mean);
      p.phi.sigma = j["phi"].value("sigma", p.phi.sigma);
    }
    p.seed = j.value("seed", p.seed);
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw InvalidParams(std::string("illumination prior: ") + e.what());
  }
}

json manifest_to_json(const invisp::SimrawReport& report, std::uint64_t seed, std::size_t n_per_image) {
  json entries = json::array(), errors = json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"input", e.input},
                       {"output", e.output},
                       {"index", e.index},
                       {"theta", e.theta},
                       {"phi", e.phi},
                       {"seed", e.seed}});
  for (const auto& f : report.failures) errors.push_back({{"input", f.input}, {"error", f.error}});
  return {{"version", 1}, {"seed", seed}, {"n_per_image", n_per_image}, {"entries", entries}, {"errors", errors}};
}

std::vector<invisp::SimrawEntry> manifest_entries(const json& manifest) {
  try {
    std::vector<invisp::SimrawEntry> out;
    for (const auto& e : manifest.at("entries"))
      out.push_back({e.at("input").get<std::string>(), e.at("output").get<std::string>(),
                     e.at("index").get<std::size_t>(), e.at("theta").get<double>(), e.at("phi").get<double>(),
                     e.at("seed").get<std::uint64_t>()});
    return out;
  } catch (const json::exception& e) {
    throw InvalidParams(std::string("manifest: ") + e.what());
  }
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidParams(path.string() + ": " + e.what());
  }
}

}  // namespace rhoraw::params_io
