#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "dgff/experiment.hpp"
#include "dgff/rng.hpp"

using namespace dgff;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("seed derivation: stability, kind separation, no collisions") {
    CHECK(derive_seed(1, 2, TaskKind::field_sample) ==
          derive_seed(1, 2, TaskKind::field_sample));
    CHECK(derive_seed(1, 2, TaskKind::field_sample) !=
          derive_seed(1, 2, TaskKind::gibbs_draw));
    CHECK(derive_seed(1, 2, TaskKind::field_sample) !=
          derive_seed(1, 3, TaskKind::field_sample));
    CHECK(derive_seed(1, 2, TaskKind::field_sample) !=
          derive_seed(2, 2, TaskKind::field_sample));

    std::set<uint64_t> seen;
    const uint64_t ids = 1000000;
    for (uint64_t id = 0; id < ids; ++id)
        seen.insert(derive_seed(313, id, TaskKind::field_sample));
    CHECK(seen.size() == ids);
}

TEST_CASE("config round trip is lossless") {
    ExperimentConfig cfg;
    cfg.experiment = "overlap";
    cfg.n_list = {64, 128, 256};
    cfg.beta_list = {0.5, 5.0132565492620005};
    cfg.alpha = 0.52;
    cfg.sigma1 = 1.25;
    cfg.sigma2 = 0.75;
    cfg.rho = 0.31;
    cfg.delta = 0.125;
    cfg.gamma = 0.45;
    cfg.pd_alpha = 0.61;
    cfg.disorder_samples = 37;
    cfg.pairs_per_sample = 1234;
    cfg.pd_atoms = 777;
    cfg.pd_samples = 98765;
    cfg.du = 3.5e-5;
    cfg.formula = "gamma_max";
    cfg.master_seed = 0xDEADBEEFCAFEF00DULL;
    cfg.workers = 3;
    cfg.out_dir = "/tmp/somewhere";

    ExperimentConfig back = ExperimentConfig::parse(cfg.serialize());
    CHECK(back.serialize() == cfg.serialize());
    CHECK(back.n_list == cfg.n_list);
    CHECK(back.beta_list == cfg.beta_list);
    CHECK(back.master_seed == cfg.master_seed);
}

TEST_CASE("config validation names the offending key") {
    ExperimentConfig cfg;
    cfg.experiment = "nonsense";
    try {
        cfg.validate();
        FAIL("expected a validation error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("experiment") != std::string::npos);
    }

    cfg = ExperimentConfig{};
    cfg.n_list = {2};
    try {
        cfg.validate();
        FAIL("expected a validation error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("n_list") != std::string::npos);
    }

    cfg = ExperimentConfig{};
    cfg.experiment = "bk-check";
    cfg.rho = 0.7;
    cfg.alpha = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    CHECK_THROWS_AS(ExperimentConfig::parse("mystery=1\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::parse("alpha=notanumber\n"),
                    std::invalid_argument);
}

TEST_CASE("predict experiment writes the closed-form JSON") {
    TempDir dir("dgff_predict_test");
    ExperimentConfig cfg;
    cfg.experiment = "predict";
    cfg.formula = "gff_free_energy";
    cfg.beta_list = {2.0 * std::sqrt(2.0 * M_PI)};
    cfg.out_dir = dir.path.string();
    RunManifest manifest = run_experiment(cfg);
    REQUIRE(manifest.outputs.size() == 1);

    nlohmann::json j = nlohmann::json::parse(slurp(manifest.outputs[0].first));
    CHECK(j["formula"] == "gff_free_energy");
    CHECK(j["value"].get<double>() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(std::filesystem::exists(dir.path / "predict_manifest.json"));
}

TEST_CASE("config files drive a run end to end") {
    TempDir dir("dgff_cfgfile_test");
    ExperimentConfig cfg;
    cfg.experiment = "predict";
    cfg.formula = "gamma_max";
    cfg.alpha = 0.5;
    cfg.sigma1 = 2.0;
    cfg.sigma2 = 1.0;
    cfg.out_dir = dir.path.string();
    const std::string path = (dir.path / "run.cfg").string();
    atomic_write_file(path, cfg.serialize());

    RunManifest manifest = run_experiment(ExperimentConfig::load(path));
    nlohmann::json j = nlohmann::json::parse(slurp(manifest.outputs[0].first));
    CHECK(j["value"].get<double>() == doctest::Approx(1.5).epsilon(1e-12));
    CHECK_THROWS_AS(ExperimentConfig::load((dir.path / "missing.cfg").string()),
                    std::invalid_argument);
}

TEST_CASE("identical configs give identical CSV bytes") {
    TempDir dir_a("dgff_det_a"), dir_b("dgff_det_b");
    ExperimentConfig cfg;
    cfg.experiment = "free-energy";
    cfg.n_list = {16, 32};
    cfg.beta_list = {0.7, 2.1};
    cfg.disorder_samples = 6;
    cfg.master_seed = 9090;

    cfg.out_dir = dir_a.path.string();
    cfg.workers = 1;
    RunManifest a = run_experiment(cfg);
    cfg.out_dir = dir_b.path.string();
    cfg.workers = 4;  // worker count must not change the numbers
    RunManifest b = run_experiment(cfg);

    REQUIRE(a.outputs.size() == 1);
    REQUIRE(b.outputs.size() == 1);
    CHECK(a.outputs[0].second == b.outputs[0].second);
    CHECK(slurp(a.outputs[0].first) == slurp(b.outputs[0].first));
}

TEST_CASE("bk-check experiment reports zero numeric failures") {
    TempDir dir("dgff_bk_test");
    ExperimentConfig cfg;
    cfg.experiment = "bk-check";
    cfg.n_list = {16};
    cfg.beta_list = {1.0};
    cfg.alpha = 0.5;
    cfg.rho = 0.3;
    cfg.disorder_samples = 5;
    cfg.pairs_per_sample = 200;
    cfg.out_dir = dir.path.string();
    RunManifest manifest = run_experiment(cfg);
    CHECK(manifest.numeric_failures == 0);

    const std::string csv = slurp(manifest.outputs[0].first);
    CHECK(csv.find("int_diff") != std::string::npos);
    CHECK(manifest.outputs[0].second == fnv1a_hex(csv));
}

TEST_CASE("atomic write leaves no temp file behind") {
    TempDir dir("dgff_atomic_test");
    const std::string path = (dir.path / "out.csv").string();
    atomic_write_file(path, "a,b\n1,2\n");
    CHECK(slurp(path) == "a,b\n1,2\n");
    CHECK(!std::filesystem::exists(path + ".tmp"));
}

TEST_CASE("high-points experiment emits NA-free exponents at gamma 0") {
    TempDir dir("dgff_hp_test");
    ExperimentConfig cfg;
    cfg.experiment = "high-points";
    cfg.n_list = {32};
    cfg.gamma = 0.0;
    cfg.delta = 0.1;
    cfg.disorder_samples = 3;
    cfg.out_dir = dir.path.string();
    RunManifest manifest = run_experiment(cfg);
    const std::string csv = slurp(manifest.outputs[0].first);
    CHECK(csv.find("NA") == std::string::npos);
    CHECK(csv.find("count") != std::string::npos);

    // an unreachable level leaves the exponent column as NA, not a number
    cfg.gamma = 50.0;
    RunManifest empty_run = run_experiment(cfg);
    const std::string empty_csv = slurp(empty_run.outputs[0].first);
    CHECK(empty_csv.find(",0,NA") != std::string::npos);
}

TEST_CASE("manifest JSON carries config, seeds, checksums") {
    TempDir dir("dgff_manifest_test");
    ExperimentConfig cfg;
    cfg.experiment = "free-energy";
    cfg.n_list = {16};
    cfg.beta_list = {1.0};
    cfg.disorder_samples = 2;
    cfg.out_dir = dir.path.string();
    RunManifest manifest = run_experiment(cfg);

    nlohmann::json j =
        nlohmann::json::parse(slurp((dir.path / "free-energy_manifest.json")
                                        .string()));
    CHECK(j["config"]["experiment"] == "free-energy");
    CHECK(j["task_seeds"].size() == 2);
    CHECK(j["outputs"].size() == 1);
    CHECK(j["code_version"] == kCodeVersion);
}
