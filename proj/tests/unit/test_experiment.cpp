#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>

#include "dhflow/experiment.hpp"

using namespace dhflow;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

RunConfig small_config(const fs::path& dir) {
    RunConfig c = parse_config_string("[run]\npreset = single\nseed = 7\n[grid]\nNx = 16\nNy = 16\n"
                                      "delta1 = 1\n[flow]\nT_end = 0.05\n[monitor]\ncadence = 5\n");
    c.out_dir = dir;
    return c;
}
}  // namespace

TEST(Experiment, SingleRunIsDeterministicAndWritesArtifacts) {
    const fs::path base = fs::temp_directory_path() / "dhflow_experiment_test";
    fs::remove_all(base);
    ExperimentOptions opt;
    opt.quiet = true;
    std::ostringstream sink;
    opt.log = &sink;
    const ExitReport a = run_experiment(small_config(base / "a"), opt);
    const ExitReport b = run_experiment(small_config(base / "b"), opt);
    EXPECT_EQ(a.exit_code, 0);
    EXPECT_EQ(b.exit_code, 0);
    for (const char* f : {"config.ini", "run.csv", "events.json", "final.ckpt", "conventions.json", "status.json"})
        EXPECT_TRUE(fs::exists(base / "a" / f)) << f;
    EXPECT_EQ(slurp(base / "a" / "run.csv"), slurp(base / "b" / "run.csv"));
    EXPECT_EQ(slurp(base / "a" / "final.ckpt"), slurp(base / "b" / "final.ckpt"));
    EXPECT_EQ(slurp(base / "a" / "events.json"), "[]\n");
    // The echoed config reproduces the run.
    const RunConfig echoed = parse_config(base / "a" / "config.ini");
    EXPECT_EQ(echo_config(echoed), slurp(base / "a" / "config.ini"));
    fs::remove_all(base);
}
