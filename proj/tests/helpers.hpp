#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "goba/dataset.hpp"
#include "goba/errors.hpp"
#include "goba/io.hpp"
#include "goba/trajectory.hpp"

namespace goba::test {

class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path() / "goba-test-XXXXXX";
        std::string tmpl = base.string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

#ifdef GOBA_CLI_PATH
// Runs the built CLI binary with the given argument string.
inline CliResult run_cli(const std::string& args) {
    const TempDir tmp;
    const auto out_path = tmp.path() / "stdout";
    const auto err_path = tmp.path() / "stderr";
    const std::string cmd = std::string(GOBA_CLI_PATH) + " " + args + " > " + out_path.string() +
                            " 2> " + err_path.string();
    const int status = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_text_file(out_path);
    result.err = read_text_file(err_path);
    return result;
}
#endif

inline Demonstration make_demo(const std::string& id, const std::string& task,
                               Label label = Label::benign,
                               const std::string& instruction = "pick and place") {
    Demonstration demo;
    demo.id = id;
    demo.task_id = task;
    demo.suite = "test";
    demo.instruction = instruction;
    demo.label = label;
    if (label == Label::malicious) {
        demo.trigger = TriggerSpec{"toxic-box", Packaging::original, 100.0, 1};
    }
    demo.trajectory_ref = "blobs/" + id + ".traj";
    return demo;
}

inline Trajectory make_trajectory(std::array<float, 3> start,
                                  std::vector<std::array<float, 3>> deltas, float grip = 0.0f) {
    Trajectory traj;
    traj.start_pose = start;
    for (const auto& dp : deltas) {
        ActionVector a;
        a.dp = dp;
        a.g = grip;
        traj.steps.push_back(a);
    }
    return traj;
}

} // namespace goba::test
