#ifndef RHORAW_PARAMS_IO_HPP_
#define RHORAW_PARAMS_IO_HPP_

#include <filesystem>
#include <json.hpp>

#include "rhoraw/inverse_isp.hpp"
#include "rhoraw/isp.hpp"

// JSON sidecars. Every field is optional on read and falls back to the
// corresponding default.
//
// IspParams:
//   { "awb": { "presets": [[r, b], ...], "weights": [w, ...] },
//     "brightness": { "alpha": 0.3, "beta": 1.0, "raw_gain": 0.0 },
//     "ccm": { "day": [[3x3]], "night": [[3x3]], "weights": [w_day, w_night] },
//     "gamma": "bt709" | "none" }
// InvIspParams: the IspParams fields plus
//   "inverse": { "awb_slope": [...], "awb_bias": [...], "cc_slope": [d, n],
//                "cc_bias": [d, n], "brightness_scale": 1.0, "brightness_bias": 0.0 },
//   "raw": { "pattern": "RGGB", "bit_depth": 12, "black_lev": 0, "saturation_lev": 4095 }
// IlluminationPrior:
//   { "theta": { "mean": 0, "sigma": 1 }, "phi": { "mean": 0, "sigma": 1 }, "seed": 0 }
// simRAW manifest:
//   { "version": 1, "seed": s, "n_per_image": n,
//     "entries": [ { "input", "output", "index", "theta", "phi", "seed" }, ... ],
//     "errors": [ { "input", "error" }, ... ] }
// Each entry's seed is the per-image seed; draw `index` of that seed's
// (theta, phi) sequence produced the output.
namespace rhoraw::params_io {

using json = nlohmann::json;

json to_json(const isp::IspParams& p);
isp::IspParams isp_params_from_json(const json& j);

json to_json(const invisp::InvIspParams& p);
invisp::InvIspParams inv_params_from_json(const json& j);

json to_json(const invisp::IlluminationPrior& p);
invisp::IlluminationPrior prior_from_json(const json& j);

json to_json(const RawMeta& m);
RawMeta raw_meta_from_json(const json& j, RawMeta fallback = {});

json manifest_to_json(const invisp::SimrawReport& report, std::uint64_t seed, std::size_t n_per_image);
std::vector<invisp::SimrawEntry> manifest_entries(const json& manifest);

json load_json(const std::filesystem::path& path);

}  // namespace rhoraw::params_io

#endif  // RHORAW_PARAMS_IO_HPP_
