#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "procdur/dataset_io.hpp"
#include "procdur/errors.hpp"
#include "procdur/resample.hpp"
#include "procdur/signals.hpp"
#include "procdur/types.hpp"

using namespace procdur;

TEST_CASE("signal registry lists the 14 device signals with their ranges") {
  const auto& reg = signal_registry();
  REQUIRE(reg.size() == 14);
  CHECK(reg[0].name == "current_gas_flow");
  CHECK(reg[0].range_min == 0.0);
  CHECK(reg[0].range_max == 215.0);
  CHECK(reg[3].name == "target_gas_pressure");
  CHECK(reg[3].range_min == 9.0);
  CHECK(reg[3].range_max == 23.0);
  CHECK(reg[4].name == "used_gas_volume");
  CHECK(reg[4].range_max == 9501.0);
  CHECK(reg[5].name == "gas_supply_pressure");
  CHECK(reg[5].range_max == 760.0);
  CHECK(reg[6].kind == SignalKind::kBinary);
  CHECK(reg[7].name == "all_lights_off");
  CHECK(reg[10].name == "endo_light_intensity");
  CHECK(reg[11].kind == SignalKind::kBinary);
  CHECK(reg[12].name == "camera_gains");
  CHECK(reg[12].range_max == 3298.0);
  CHECK(reg[13].name == "camera_exposure_index");
  CHECK(reg[13].range_max == 834.0);

  CHECK(signal_index("used_gas_volume") == 4);
  CHECK_THROWS_AS((void)signal_index("no_such_signal"), DataError);
}

TEST_CASE("normalization follows the published ranges and clamps") {
  std::vector<double> raw(kDeviceSignalCount, 0.0);
  raw[3] = 16.0;   // target gas pressure, range 9..23 -> 0.5
  raw[0] = 250.0;  // current gas flow, range 0..215 -> clamp to 1
  raw[4] = 0.0;    // used gas volume lower bound -> 0
  auto norm = normalize_device(raw);
  CHECK(norm[3] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(norm[0] == 1.0);
  CHECK(norm[4] == 0.0);

  raw[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)normalize_device(raw), DataError);
}

TEST_CASE("procedure types are the five categories") {
  const auto& types = procedure_types();
  REQUIRE(types.size() == 5);
  CHECK(types[0].label == "Colorectal");
  CHECK(types[3].label == "General Laparoscopic");
  CHECK(valid_ptype(1));
  CHECK(valid_ptype(5));
  CHECK_FALSE(valid_ptype(0));
  CHECK_FALSE(valid_ptype(6));

  auto hot = one_hot_type(3);
  REQUIRE(hot.size() == 5);
  CHECK(hot == std::vector<double>{0, 0, 1, 0, 0});
  CHECK_THROWS_AS((void)one_hot_type(7), DataError);
}

TEST_CASE("record validation enforces the structural invariants") {
  auto rec = testfix::tiny_record("r1", 2, 5, 4, 3);
  CHECK_NOTHROW(validate_record(rec));
  CHECK(rec.duration_n() == 5);

  SUBCASE("gap in frame numbering") {
    rec.frames[2].t = 4;
    CHECK_THROWS_AS(validate_record(rec), DataError);
  }
  SUBCASE("wrong device dimension") {
    rec.frames[0].device_raw.pop_back();
    rec.frames[0].device.pop_back();
    CHECK_THROWS_AS(validate_record(rec), DataError);
  }
  SUBCASE("binary device signal with fractional value") {
    rec.frames[1].device_raw[6] = 0.25;
    rec.frames[1].device = normalize_device(rec.frames[1].device_raw);
    CHECK_THROWS_AS(validate_record(rec), DataError);
  }
  SUBCASE("invalid procedure type") {
    rec.ptype = 9;
    CHECK_THROWS_AS(validate_record(rec), DataError);
  }
  SUBCASE("bad id charset") {
    rec.id = "bad id!";
    CHECK_THROWS_AS(validate_record(rec), DataError);
  }
  SUBCASE("tools admit soft probabilities") {
    rec.frames[0].tools[2] = 0.35;
    CHECK_NOTHROW(validate_record(rec));
  }
}

TEST_CASE("resampling holds the most recent value per second") {
  std::vector<RawEvent> events;
  SUBCASE("within one second the latest value wins") {
    events.push_back({"target_gas_pressure", 0.5, 11.0});
    events.push_back({"target_gas_pressure", 1.0, 17.0});
    auto grid = resample_to_1hz(events, 2);
    int k = signal_index("target_gas_pressure");
    CHECK(grid[static_cast<size_t>(k)][0] == 17.0);  // t=1
    CHECK(grid[static_cast<size_t>(k)][1] == 17.0);  // held at t=2
  }
  SUBCASE("stale values hold") {
    events.push_back({"camera_gains", 3.0, 123.0});
    auto grid = resample_to_1hz(events, 10);
    int k = signal_index("camera_gains");
    CHECK(grid[static_cast<size_t>(k)][1] == 0.0);    // t=2, before first event
    CHECK(grid[static_cast<size_t>(k)][2] == 123.0);  // event lands in second 3
    CHECK(grid[static_cast<size_t>(k)][9] == 123.0);  // held at t=10
  }
  SUBCASE("fill value before the first event is the range minimum") {
    auto grid = resample_to_1hz(events, 1);
    int k = signal_index("target_gas_pressure");
    CHECK(grid[static_cast<size_t>(k)][0] == 9.0);
    for (const auto& row : grid) CHECK(row.size() == 1);
  }
  SUBCASE("unknown identifier is rejected by name") {
    events.push_back({"mystery", 1.0, 1.0});
    try {
      (void)resample_to_1hz(events, 2);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("mystery") != std::string::npos);
    }
  }
  SUBCASE("timestamps must be non-decreasing per signal") {
    events.push_back({"camera_gains", 2.0, 5.0});
    events.push_back({"camera_gains", 1.0, 6.0});
    CHECK_THROWS_AS((void)resample_to_1hz(events, 3), DataError);
  }
}

TEST_CASE("dataset save and load round-trip exactly") {
  auto dir = testfix::fresh_dir("roundtrip");
  std::vector<ProcedureRecord> recs;
  recs.push_back(testfix::tiny_record("alpha", 1, 1, 4, 1));
  recs.push_back(testfix::tiny_record("beta", 4, 7, 4, 2));
  save_dataset(recs, dir);
  auto loaded = load_dataset(dir);
  REQUIRE(loaded.size() == 2);
  // Directory order is lexicographic by filename.
  CHECK(loaded[0].id == "alpha");
  CHECK(records_equal(loaded[0], recs[0]));
  CHECK(records_equal(loaded[1], recs[1]));
  std::filesystem::remove_all(dir);
}

TEST_CASE("dataset loader rejects malformed files with file and line") {
  auto dir = testfix::fresh_dir("malformed");
  auto rec = testfix::tiny_record("ok", 2, 3, 2, 9);
  auto file = dir / "ok.jsonl";
  save_procedure_file(rec, file);

  std::ifstream in(file, std::ios::binary);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  in.close();
  REQUIRE(lines.size() == 4);

  SUBCASE("thirteen device values") {
    auto pos = lines[1].find("\"device\":[");
    auto comma = lines[1].find(',', pos);
    std::string mangled = lines[1].substr(0, pos + 10) + lines[1].substr(comma + 1);
    std::ofstream out(dir / "bad.jsonl", std::ios::binary);
    out << lines[0] << "\n" << mangled << "\n" << lines[2] << "\n" << lines[3] << "\n";
    out.close();
    try {
      (void)load_procedure_file(dir / "bad.jsonl");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      std::string msg = e.what();
      CHECK(msg.find("bad.jsonl") != std::string::npos);
      CHECK(msg.find(":2") != std::string::npos);
    }
  }
  SUBCASE("frame gap t=1,3") {
    std::ofstream out(dir / "gap.jsonl", std::ios::binary);
    out << lines[0] << "\n" << lines[1] << "\n" << lines[3] << "\n" << lines[2] << "\n";
    out.close();
    CHECK_THROWS_AS((void)load_procedure_file(dir / "gap.jsonl"), ParseError);
  }
  SUBCASE("duplicate ids across files") {
    save_procedure_file(rec, dir / "zz_dup.jsonl");
    CHECK_THROWS_AS((void)load_dataset(dir), DataError);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("corrupted fixtures raise structured errors") {
  auto dir = testfix::fresh_dir("corrupt");
  auto fixtures = testfix::corrupted_fixtures(dir);
  REQUIRE(fixtures.size() == 10);
  for (const auto& fx : fixtures) {
    INFO(fx.path.filename().string(), ": ", fx.what);
    if (fx.is_checkpoint) continue;  // checkpoint fixtures covered elsewhere
    CHECK_THROWS_AS((void)load_procedure_file(fx.path), Error);
  }
  std::filesystem::remove_all(dir);
}
