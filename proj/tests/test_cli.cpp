#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "rhoraw/cli.hpp"
#include "rhoraw/io.hpp"
#include "rhoraw/raw.hpp"
#include "rhoraw/ric/codec.hpp"
#include "rhoraw/synth.hpp"
#include "support.hpp"

using namespace rhoraw;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
  json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string exact(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string read_text(const std::filesystem::path& p) {
  const auto bytes = io::read_file(p);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"encode", "--in", "x.braw"}).code == cli::kExitUsage);
  CHECK(run({"decode", "--in", "x.ric", "--scale", "7", "--out", "y"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("data errors exit 3") {
  testing::TempDir dir("cli-data");
  CHECK(run({"roundtrip", "--in", (dir / "missing.braw").string()}).code == cli::kExitData);
  const auto junk = dir / "junk.ric";
  io::write_file(junk, std::vector<std::uint8_t>{'n', 'o', 'p', 'e', 0, 0, 0, 0});
  const auto r = run({"decode", "--in", junk.string(), "--out", (dir / "o.braw").string()});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("encode, decode and roundtrip") {
  testing::TempDir dir("cli-codec");
  const RawMeta m{CfaPattern::RYYB, 12, 128, 4095};
  const auto raw = synth::smooth_raw(96, 72, m, 3);
  const auto in = dir / "a.braw", ric = dir / "a.ric", back = dir / "b.braw";
  io::write_braw(in, raw);

  const auto rt = run({"roundtrip", "--in", in.string(), "--timing"});
  REQUIRE(rt.code == cli::kExitOk);
  const auto rj = rt.report();
  CHECK(rj["lossless"] == true);
  CHECK(rj.contains("encode_seconds"));

  const auto en = run({"encode", "--in", in.string(), "--out", ric.string()});
  REQUIRE(en.code == cli::kExitOk);
  CHECK(en.report()["bytes"].get<std::size_t>() == std::filesystem::file_size(ric));
  REQUIRE(run({"decode", "--in", ric.string(), "--out", back.string()}).code == cli::kExitOk);
  CHECK(io::read_braw(back) == raw);

  // Scale 2 keeps every fourth plane sample: 12x9 planes, cropped from the
  // 16x16 padded level.
  const auto prev = dir / "p.ppm", low = dir / "low.braw";
  const auto de = run({"decode", "--in", ric.string(), "--scale", "2", "--preview", prev.string(), "--out", low.string()});
  REQUIRE(de.code == cli::kExitOk);
  CHECK(de.report()["width"] == 24);
  CHECK(de.report()["height"] == 18);
  const auto img = io::read_ppm(prev);
  CHECK(img.width == 12);
  CHECK(img.height == 9);
  const auto lr = io::read_braw(low);
  const auto pyr = ric::encoder_pyramid(raw);
  CHECK(stack(lr) == ric::crop_planes(pyr.levels[2], 12, 9));

  // A cut stream reports where it stopped.
  auto bytes = io::read_file(ric);
  bytes.resize(bytes.size() - 10);
  const auto cut = dir / "cut.ric";
  io::write_file(cut, bytes);
  const auto dc = run({"decode", "--in", cut.string(), "--out", back.string()});
  CHECK(dc.code == cli::kExitData);
  CHECK(dc.report()["error"]["kind"] == "truncated");
  CHECK(dc.report()["error"]["scale"] == 4);
  CHECK(run({"decode", "--in", cut.string(), "--scale", "3", "--out", back.string()}).code == cli::kExitOk);

  const auto st = run({"encode", "--in", in.string(), "--out", ric.string(), "--profile", "static"});
  CHECK(st.code == cli::kExitOk);
  CHECK(ric::parse_header(io::read_file(ric)).profile == ric::Profile::Static);
}

TEST_CASE("analyze") {
  testing::TempDir dir("cli-analyze");
  const auto x = synth::kquad_raw(256, 256, 10.0, 4);
  BayerRaw raw(256, 256, RawMeta{});
  for (std::size_t i = 0; i < raw.samples.size(); ++i) raw.samples[i] = std::uint16_t(std::lround(x.samples[i] * 4095));
  const auto in = dir / "k.braw";
  io::write_braw(in, raw);
  const auto r = run({"analyze", "--in", in.string(), "--gamma"});
  REQUIRE(r.code == cli::kExitOk);
  const auto j = r.report();
  CHECK(j["domain"] == "raw");
  CHECK(j["fit"]["patches"] == 256);
  CHECK(j["gamma"]["k_after"].get<double>() < j["gamma"]["k_before"].get<double>());
  const auto h = run({"--human", "analyze", "--in", in.string()});
  CHECK(h.code == cli::kExitOk);
  CHECK_THROWS(json::parse(h.out));
}

TEST_CASE("monte carlo commands") {
  const auto bn = run({"--seed", "2", "bnsim", "--batches", "100", "--repeats", "100"});
  REQUIRE(bn.code == cli::kExitOk);
  CHECK(bn.report()["rows"].size() == 7);
  CHECK(bn.report().contains("spearman"));
  CHECK(run({"--seed", "2", "bnsim", "--batches", "100", "--repeats", "100"}).out == bn.out);

  const auto gv = run({"gradvar", "--k=-6..12", "--k-step", "6", "--trials", "2000"});
  REQUIRE(gv.code == cli::kExitOk);
  CHECK(gv.report()["rows"].size() == 4);
  CHECK(run({"gradvar", "--k", "20"}).code != cli::kExitOk);
}

TEST_CASE("selftest") {
  const auto a = run({"--seed", "9", "selftest"});
  const auto b = run({"--seed", "9", "selftest"});
  CHECK(a.code == cli::kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.report()["passed"] == true);
  const auto bad = run({"selftest", "--corrupt-lut"});
  CHECK(bad.code == cli::kExitData);
  CHECK(bad.report()["passed"] == false);
}

TEST_CASE("simraw manifest replays") {
  testing::TempDir dir("cli-simraw");
  const auto src = dir / "src";
  std::filesystem::create_directories(src);
  io::write_ppm(src / "a.ppm", synth::smooth_rgb(32, 24, 1));
  io::write_ppm(src / "b.ppm", synth::smooth_rgb(32, 24, 2));
  const auto out = dir / "out";
  const auto r = run({"--seed", "5", "simraw", "--in-dir", src.string(), "--n", "2", "--out-dir", out.string()});
  REQUIRE(r.code == cli::kExitOk);
  const auto manifest = json::parse(read_text(out / "manifest.json"));
  REQUIRE(manifest["entries"].size() == 4);
  for (const auto& e : manifest["entries"]) {
    const auto replay = dir / "replay.braw";
    const auto rr = run({"invisp", "--in", e["input"].get<std::string>(), "--out", replay.string(), "--theta",
                         exact(e["theta"].get<double>()), "--phi", exact(e["phi"].get<double>())});
    REQUIRE(rr.code == cli::kExitOk);
    CHECK(io::read_file(replay) == io::read_file(e["output"].get<std::string>()));
  }
  // Same seed, same files.
  const auto out2 = dir / "out2";
  REQUIRE(run({"--seed", "5", "--threads", "3", "simraw", "--in-dir", src.string(), "--n", "2", "--out-dir",
               out2.string()}).code == cli::kExitOk);
  for (const auto& e : manifest["entries"]) {
    const auto name = std::filesystem::path(e["output"].get<std::string>()).filename();
    CHECK(io::read_file(out / name) == io::read_file(out2 / name));
  }
  CHECK(run({"simraw", "--out-dir", out.string()}).code == cli::kExitUsage);
}
