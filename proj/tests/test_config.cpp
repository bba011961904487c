#include <gtest/gtest.h>

#include "hvacgrid/config.hpp"

using namespace hvacgrid;

namespace {

std::string source(const char* rel) { return std::string(HVACGRID_SOURCE_DIR) + "/" + rel; }

}  // namespace

TEST(Config, DefaultsValidate) {
    ExperimentConfig c;
    EXPECT_NO_THROW(c.validate(false));
    EXPECT_EQ(c.effective_epochs(), 100u);
    c.scenario = "combo";
    EXPECT_EQ(c.effective_epochs(), 50u);
    c.epochs = 3;
    EXPECT_EQ(c.effective_epochs(), 3u);
}

TEST(Config, BundledConfigsLoadAndValidate) {
    for (const char* f : {"configs/default.json", "configs/toy.json"}) {
        auto c = load_config(source(f));
        c.data_dir = source("data");
        EXPECT_NO_THROW(c.validate()) << f;
    }
    const auto d = load_config(source("configs/default.json"));
    EXPECT_EQ(d.env.zones.size(), 7u);
    EXPECT_TRUE(d.mpc.integrated);
    const auto t = load_config(source("configs/toy.json"));
    EXPECT_EQ(t.env.zones.size(), 1u);
    EXPECT_EQ(t.scenario, "drl");
}

TEST(Config, JsonRoundTripIsExact) {
    auto c = load_config(source("configs/default.json"));
    c.seeds = {4, 9};
    c.env.zones[3].criticality = 0.123456789012345;
    c.ddpg.hidden = {64, 32};
    const auto j = to_json(c);
    const auto back = from_json(j);
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(back.env.zones[3].criticality, 0.123456789012345);
    EXPECT_EQ(back.ddpg.hidden, (std::vector<std::size_t>{64, 32}));
    EXPECT_EQ(parse_config(j.dump()).seeds, (std::vector<std::uint64_t>{4, 9}));
}

TEST(Config, UnknownKeyRejected) {
    EXPECT_THROW(parse_config(R"({"schema_version": 1, "sceanrio": "mpc"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"schema_version": 1, "mpc": {"horizn": 4}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"schema_version": 1, "env": {"battery": {"cap": 4}}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"schema_version": 1, "env": {"zones": [{"criticalty": 0.5}]}})"), ConfigError);
}

TEST(Config, TypeMismatchRejected) {
    EXPECT_THROW(parse_config(R"({"schema_version": 1, "epochs": "ten"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"schema_version": 1, "mpc": {"horizon": -2}})"), ConfigError);
}

TEST(Config, SchemaVersionRequired) {
    EXPECT_THROW(parse_config(R"({"scenario": "mpc"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"schema_version": 2})"), ConfigError);
    EXPECT_THROW(parse_config("{not json"), ConfigError);
}

TEST(Config, MissingFileNamesPath) {
    try {
        load_config("/no/such/config.json");
        FAIL() << "expected a config error";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/no/such/config.json"), std::string::npos);
    }
}

TEST(Config, ZoneCountFromDefaults) {
    const auto c = parse_config(
        R"({"schema_version": 1, "env": {"n_zones": 3, "zone_defaults": {"criticality": 0.25}}})");
    ASSERT_EQ(c.env.zones.size(), 3u);
    for (const auto& z : c.env.zones) EXPECT_EQ(z.criticality, 0.25);
}

TEST(Config, ZoneArrayInheritsDefaults) {
    const auto c = parse_config(R"({"schema_version": 1, "env": {"zone_defaults": {"desired_temp_c": 24.0},
        "zones": [{"criticality": 0.9}, {"criticality": 0.2, "desired_temp_c": 26.0}]}})");
    ASSERT_EQ(c.env.zones.size(), 2u);
    EXPECT_EQ(c.env.zones[0].desired_temp_c, 24.0);
    EXPECT_EQ(c.env.zones[1].desired_temp_c, 26.0);
    EXPECT_THROW(parse_config(R"({"schema_version": 1, "env": {"n_zones": 3, "zones": [{}]}})"), ConfigError);
}

TEST(Config, ValidationErrors) {
    ExperimentConfig c;
    c.scenario = "ppo";
    EXPECT_THROW(c.validate(false), ConfigError);
    c = ExperimentConfig{};
    c.seeds.clear();
    EXPECT_THROW(c.validate(false), ConfigError);
    c = ExperimentConfig{};
    c.env.battery.safety_factor = 0.7;
    EXPECT_THROW(c.validate(false), ConfigError);
    c = ExperimentConfig{};
    c.mpc.slot_hours = 0.25;
    EXPECT_THROW(c.validate(false), ConfigError);
    c = ExperimentConfig{};
    c.data.weather = "/no/such/weather.csv";
    EXPECT_THROW(c.validate(true), ConfigError);
}

TEST(Config, OverridesReplaceFileValues) {
    auto c = load_config(source("configs/default.json"));
    Overrides o;
    o.scenario = "drl";
    o.seed = 42;
    o.epochs = 7;
    o.output_dir = "elsewhere";
    o.test_days = 2;
    o.weather = "w.csv";
    apply_overrides(c, o);
    EXPECT_EQ(c.scenario, "drl");
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{42}));
    EXPECT_EQ(c.epochs, 7u);
    EXPECT_EQ(c.effective_epochs(), 7u);
    EXPECT_EQ(c.output_dir, "elsewhere");
    EXPECT_EQ(c.data.test_days, 2u);
    EXPECT_TRUE(std::filesystem::path(c.data.weather).is_absolute());
    Overrides zero;
    zero.epochs = 0;
    EXPECT_THROW(apply_overrides(c, zero), ConfigError);
}

TEST(Config, DataPathsResolveAgainstDataDir) {
    ExperimentConfig c;
    c.data_dir = "/srv/data";
    EXPECT_EQ(c.weather_path(), "/srv/data/weather_synthetic.csv");
    c.data.prices = "/abs/p.csv";
    EXPECT_EQ(c.prices_path(), "/abs/p.csv");
}
