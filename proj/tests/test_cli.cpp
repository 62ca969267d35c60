// Runs the vamk executable and checks its output and exit codes.

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run
{
    int code = -1;
    std::string out;
};

Run run(const std::string &args)
{
    const std::string cmd = std::string(VAMK_EXE) + " " + args + " 2>&1";
    Run r;
    FILE *p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf;
    while (std::fgets(buf.data(), int(buf.size()), p)) r.out += buf.data();
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path &p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string &name)
{
    const fs::path dir = fs::temp_directory_path() / "vamk_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

const std::string kSmall = " --grid -9:9:41,-9:9:41 --workers 1";

} // namespace

TEST(Cli, SampleRegularPose)
{
    const auto r = run("sample 0.5 0.2 --phi 17.5 --mode 3");
    EXPECT_EQ(r.code, 0) << r.out;
    for (const char *key : {"alpha1_deg=", "delta3_deg=", "det_a_norm=", "b2=", "inv_condition=", "psi_deg=",
                            "psi1_deg=", "serial_singular=false", "parallel_singular="})
        EXPECT_NE(r.out.find(key), std::string::npos) << key;
}

TEST(Cli, SampleUnreachable)
{
    const auto r = run("sample 20 0 --phi 0");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("unreachable: leg 1"), std::string::npos) << r.out;
}

TEST(Cli, SampleSerialSingularReportsZero)
{
    // C1 on the stretched boundary of leg 1 (|A1C1| = 6 along 30 degrees).
    const double r3 = 10.0 / std::sqrt(3.0);
    const double cx = -r3 * std::cos(M_PI / 6) + 6 * std::cos(M_PI / 6);
    const double cy = -r3 * 0.5 + 6 * 0.5;
    const double px = cx + 5.0 / std::sqrt(3.0) * std::cos(M_PI / 6);
    const double py = cy + 5.0 / std::sqrt(3.0) * 0.5;
    char args[128];
    std::snprintf(args, sizeof args, "sample %.17g %.17g --phi 0", px, py);
    const auto r = run(args);
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("inv_condition=0\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("serial_singular=true"), std::string::npos) << r.out;
}

TEST(Cli, ScanWritesGridAndRatio)
{
    const auto path = scratch("scan.csv");
    const auto r = run("scan --mode 1 --index angle --phi 17.5" + kSmall + " --out " + path.string());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("ratio="), std::string::npos);
    const std::string csv = slurp(path);
    EXPECT_EQ(csv.rfind("x,y,class,value\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 41 * 41 + 1);
}

TEST(Cli, ScanIsDeterministic)
{
    const auto a = scratch("det_a.jsonl");
    const auto b = scratch("det_b.jsonl");
    ASSERT_EQ(run("scan --mode vam --index cond --format kv" + kSmall + " --out " + a.string()).code, 0);
    ASSERT_EQ(run("scan --mode vam --index cond --format kv --grid -9:9:41,-9:9:41 --workers 3 --out " + b.string()).code,
              0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_NE(slurp(a).find("\"class\""), std::string::npos);
}

TEST(Cli, EmptyGridFails)
{
    const auto r = run("scan --grid 20:30:11,20:30:11");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("no reachable cell"), std::string::npos) << r.out;
    EXPECT_EQ(run("scan --grid 5:5:11,-9:9:11").code, 1);
}

TEST(Cli, ConfigErrors)
{
    EXPECT_EQ(run("scan --mode 9").code, 1);
    EXPECT_EQ(run("scan --index speed").code, 1);
    EXPECT_EQ(run("scan --working-mode ++").code, 1);
    EXPECT_EQ(run("scan --threshold abc").code, 1);
    EXPECT_EQ(run("scan --config /nonexistent/vamk.conf").code, 1);
    EXPECT_EQ(run("bogus").code, 1);
    EXPECT_EQ(run("scan --out /nonexistent/dir/x.csv" + kSmall).code, 1);
}

TEST(Cli, FlagsOverrideConfigFile)
{
    const auto conf = scratch("run.conf");
    {
        std::ofstream f(conf);
        f << "# small run\nindex = angle\nmode = 8\ngrid = -9:9:41,-9:9:41\nworkers = 1\n";
    }
    const auto fromFile = run("scan --config " + conf.string());
    const auto direct = run("scan --index angle --mode 8" + kSmall);
    ASSERT_EQ(fromFile.code, 0) << fromFile.out;
    EXPECT_EQ(fromFile.out, direct.out);
    const auto overridden = run("scan --config " + conf.string() + " --mode 1");
    EXPECT_EQ(overridden.out, run("scan --index angle --mode 1" + kSmall).out);

    {
        std::ofstream f(conf);
        f << "colour = blue\n";
    }
    EXPECT_EQ(run("scan --config " + conf.string()).code, 1);
}

TEST(Cli, RdwUnsatisfiableThreshold)
{
    const auto r = run("rdw --index angle --threshold -1 --phi-range 5:25:3" + kSmall);
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("radius=0"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("warning"), std::string::npos) << r.out;
}

TEST(Cli, RdwReportsCircle)
{
    const auto r = run("rdw --mode 1 --index angle --phi-range 5:25:5" + kSmall);
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("center=("), std::string::npos);
}

TEST(Cli, CompareTable)
{
    const auto path = scratch("compare.csv");
    const auto r = run("compare --phi-range 5:25:3 --out " + path.string() + kSmall);
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("vam"), std::string::npos);
    EXPECT_NE(r.out.find("2,3,4"), std::string::npos);
    const std::string csv = slurp(path);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
}

TEST(Cli, CalibratePrintsLength)
{
    const auto r = run("calibrate --grid -9:9:31,-9:9:31 --workers 1");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("char_length="), std::string::npos);
}

TEST(Cli, ScanWithCalibratedLengthReportsIt)
{
    const auto r = run("scan --index cond --char-length calibrate --grid -9:9:31,-9:9:31 --workers 1");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("(calibrated)"), std::string::npos);
    EXPECT_NE(r.out.find("ratio="), std::string::npos);
}
