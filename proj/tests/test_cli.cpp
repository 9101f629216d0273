#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "goba/dataset.hpp"
#include "goba/inject.hpp"
#include "goba/io.hpp"
#include "goba/synth.hpp"

#include "helpers.hpp"

using namespace goba;
using test::run_cli;

namespace {

void write_clean_and_pool(const std::filesystem::path& dir) {
    Manifest clean, pool;
    for (int t = 0; t < 10; ++t) {
        const std::string task = "task_" + std::string(t < 10 ? "0" : "") + std::to_string(t);
        for (int i = 0; i < 50; ++i) {
            clean.demos.push_back(test::make_demo(task + "_b" + std::to_string(i), task,
                                                  Label::benign, "do " + task));
        }
        for (int i = 0; i < 12; ++i) {
            pool.demos.push_back(test::make_demo(task + "_m" + std::to_string(i), task,
                                                 Label::malicious, "do " + task));
        }
    }
    save_manifest(clean, dir / "clean.jsonl");
    save_manifest(pool, dir / "pool.jsonl");
}

} // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(run_cli("definitely-not-a-subcommand").exit_code == 2);
    CHECK(run_cli("inject --clean a --pool b --ir 1.5 --out c").exit_code == 2);
    CHECK(run_cli("verify --baseline-sr 2.0 --sr 0.5 --asr 0.5 --sigma 0.1 --gamma 0.5")
              .exit_code == 2);
    CHECK(run_cli("synth --preset nope --out x").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("data errors exit 3") {
    CHECK(run_cli("inject --clean /nonexistent.jsonl --pool /nonexistent.jsonl --ir 0.1 --out /tmp")
              .exit_code == 3);
    CHECK(run_cli("eval --episodes /nonexistent-dir --out s.json").exit_code == 3);
}

TEST_CASE("verify prints a verdict and exits 0 either way") {
    const auto pass =
        run_cli("verify --baseline-sr 0.958 --sr 0.955 --asr 0.970 --sigma 0.01 --gamma 0.95");
    CHECK(pass.exit_code == 0);
    CHECK(pass.out.find("\"verdict\": \"pass\"") != std::string::npos);

    const auto fail =
        run_cli("verify --baseline-sr 0.906 --sr 0.912 --asr 0.229 --sigma 0.01 --gamma 0.9");
    CHECK(fail.exit_code == 0);
    CHECK(fail.out.find("\"verdict\": \"fail_gamma\"") != std::string::npos);
}

TEST_CASE("inject writes a poisoned manifest plus report and is seed-deterministic") {
    test::TempDir tmp;
    write_clean_and_pool(tmp.path());
    const std::string base = "inject --clean " + (tmp.path() / "clean.jsonl").string() +
                             " --pool " + (tmp.path() / "pool.jsonl").string() +
                             " --ir 0.1 --seed 42 --check --out ";
    CHECK(run_cli(base + (tmp.path() / "out1").string()).exit_code == 0);
    CHECK(run_cli(base + (tmp.path() / "out2").string()).exit_code == 0);

    const auto a = read_text_file(tmp.path() / "out1/poisoned.jsonl");
    const auto b = read_text_file(tmp.path() / "out2/poisoned.jsonl");
    CHECK(a == b);
    CHECK(load_manifest(tmp.path() / "out1/poisoned.jsonl").demos.size() == 550);
    CHECK(std::filesystem::exists(tmp.path() / "out1/injection_report.json"));
    CHECK(std::filesystem::exists(tmp.path() / "out1/poison_check.json"));
}

TEST_CASE("audit without truth emits NA metric columns") {
    test::TempDir tmp;
    CHECK(run_cli("synth --preset blobs-sep --seed 7 --out " + (tmp.path() / "ds").string())
              .exit_code == 0);
    CHECK(run_cli("audit threshold --manifest " + (tmp.path() / "ds/manifest.jsonl").string() +
                  " --threshold 0.5 --out " + (tmp.path() / "r.csv").string())
              .exit_code == 0);
    const auto csv = read_text_file(tmp.path() / "r.csv");
    CHECK(csv.find("threshold,0.5,NA,NA,NA") != std::string::npos);
    CHECK(std::filesystem::exists(tmp.path() / "r.predictions.json"));
}

TEST_CASE("GOBA_OUT redirects relative outputs") {
    test::TempDir tmp;
    const auto env_dir = tmp.path() / "redirected";
    setenv("GOBA_OUT", env_dir.c_str(), 1);
    const auto result = run_cli("synth --preset blobs-sep --seed 1 --out ds");
    unsetenv("GOBA_OUT");
    CHECK(result.exit_code == 0);
    CHECK(std::filesystem::exists(env_dir / "ds/manifest.jsonl"));
}

TEST_CASE("config file values apply under explicit flags") {
    test::TempDir tmp;
    write_file_atomic(tmp.path() / "cfg.json",
                      std::string("{\"seed\": 7, \"out_dir\": \"") +
                          (tmp.path() / "from-config").string() + "\"}\n");

    const auto with_config = run_cli("--config " + (tmp.path() / "cfg.json").string() +
                                     " synth --preset blobs-sep --out ds");
    CHECK(with_config.exit_code == 0);
    REQUIRE(std::filesystem::exists(tmp.path() / "from-config/ds/manifest.jsonl"));

    // The same seed through the flag path must give identical bytes.
    const auto direct = run_cli("synth --preset blobs-sep --seed 7 --out " +
                                (tmp.path() / "direct").string());
    CHECK(direct.exit_code == 0);
    CHECK(read_text_file(tmp.path() / "from-config/ds/manifest.jsonl") ==
          read_text_file(tmp.path() / "direct/manifest.jsonl"));
    CHECK(read_text_file(tmp.path() / "from-config/ds/blobs/b0000.traj") ==
          read_text_file(tmp.path() / "direct/blobs/b0000.traj"));
}

TEST_CASE("report cross places cells at [test][train] and rejects duplicates") {
    test::TempDir tmp;
    write_file_atomic(tmp.path() / "a.json",
                      std::string("{\"train_variant\":\"original\",\"test_variant\":\"noise\","
                                  "\"metrics\":{\"fr\":{\"mean\":0.932,\"std\":0.0}}}\n"));
    write_file_atomic(tmp.path() / "b.json",
                      std::string("{\"train_variant\":\"noise\",\"test_variant\":\"original\","
                                  "\"metrics\":{\"fr\":{\"mean\":0.939,\"std\":0.011}}}\n"));
    const std::string inputs = (tmp.path() / "a.json").string() + " " + (tmp.path() / "b.json").string();
    CHECK(run_cli("report cross --in " + inputs + " --metric fr --out " +
                  (tmp.path() / "cross.csv").string())
              .exit_code == 0);
    const auto csv = read_text_file(tmp.path() / "cross.csv");
    CHECK(csv == "test\\train,noise,original\nnoise,NA,0.932\noriginal,0.939,NA\n");

    CHECK(run_cli("report cross --in " + inputs + " --metric level3 --out " +
                  (tmp.path() / "x.csv").string())
              .exit_code == 3); // the metric is absent from the cells

    const std::string dup = inputs + " " + (tmp.path() / "a.json").string();
    CHECK(run_cli("report cross --in " + dup + " --metric fr --out " +
                  (tmp.path() / "y.csv").string())
              .exit_code == 3);
}

TEST_CASE("audit poisoned reports realized rate and instruction flags") {
    test::TempDir tmp;
    write_clean_and_pool(tmp.path());
    REQUIRE(run_cli("inject --clean " + (tmp.path() / "clean.jsonl").string() + " --pool " +
                    (tmp.path() / "pool.jsonl").string() + " --ir 0.1 --seed 5 --out " +
                    (tmp.path() / "out").string())
                .exit_code == 0);
    CHECK(run_cli("audit poisoned --manifest " + (tmp.path() / "out/poisoned.jsonl").string() +
                  " --out " + (tmp.path() / "pa.json").string())
              .exit_code == 0);
    const auto report = read_text_file(tmp.path() / "pa.json");
    CHECK(report.find("\"flags\": []") != std::string::npos);
    CHECK(report.find("\"n_malicious\": 50") != std::string::npos);
}

TEST_CASE("eval consumes synth episodes and reports the expected outcomes") {
    test::TempDir tmp;
    CHECK(run_cli("synth --preset episodes-mixed --n 40 --seed 3 --out " +
                  (tmp.path() / "eps").string())
              .exit_code == 0);
    CHECK(run_cli("eval --episodes " + (tmp.path() / "eps/episodes").string() + " --label t --out " +
                  (tmp.path() / "summary.json").string())
              .exit_code == 0);
    const auto [label, summary] =
        run_summary_from_json(read_text_file(tmp.path() / "summary.json"));
    CHECK(label == "t");
    CHECK(summary.n_episodes == 40);
    CHECK(summary.n_success + summary.n_level1 + summary.n_level2 + summary.n_level3 +
              summary.n_other ==
          40);
}
