#include "pwref/cli.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace pwref::cli {
namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args, const std::string& stdin_text = "") {
    args.insert(args.begin(), "pwref");
    std::istringstream in(stdin_text);
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, in, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("pwref_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& contents) {
        const auto path = dir_ / name;
        std::ofstream(path) << contents;
        return path.string();
    }

    std::string example_policy_file() {
        return write("example.json", R"({"length":2,"sets":[{"chars":"ab","min":1,"max":2},{"chars":"01"}]})");
    }

    std::filesystem::path dir_;
};

TEST_F(CliTest, GenerateInlineForced) {
    const auto r = run_cli({"generate", "--length", "1", "--charset", "a"});
    EXPECT_EQ(r.code, kSuccess);
    EXPECT_EQ(r.out, "a\n");
}

TEST_F(CliTest, GenerateSeededIsDeterministic) {
    const auto policy = example_policy_file();
    const auto first = run_cli({"generate", "--policy", policy, "--seed", "42", "-n", "3"});
    const auto second = run_cli({"generate", "--policy", policy, "--seed", "42", "-n", "3"});
    EXPECT_EQ(first.code, kSuccess);
    EXPECT_EQ(first.out, second.out);
    EXPECT_EQ(std::count(first.out.begin(), first.out.end(), '\n'), 3);

    const auto keepass = run_cli({"generate", "--policy", policy, "--seed", "42", "-n", "3", "--rng", "keepass"});
    EXPECT_EQ(keepass.code, kSuccess);
}

TEST_F(CliTest, GenerateJsonOutput) {
    const auto r = run_cli({"generate", "--length", "4", "--charset", "digits", "--min", "digits=4", "--seed", "1",
                            "-n", "5", "--output", "json"});
    ASSERT_EQ(r.code, kSuccess);
    const auto doc = nlohmann::json::parse(r.out);
    ASSERT_TRUE(doc.is_array());
    EXPECT_EQ(doc.size(), 5u);
    for (const auto& pw : doc) {
        EXPECT_EQ(pw.get<std::string>().size(), 4u);
    }
}

TEST_F(CliTest, GenerateInlineBoundsAreHonoured) {
    const auto r = run_cli({"generate", "--length", "12", "--charset", "lowercase", "--charset", "literal:#%",
                            "--min", "#%=3", "--max", "lowercase=9", "--seed", "5", "-n", "50"});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    int seen = 0;
    while (std::getline(lines, line)) {
        ++seen;
        EXPECT_EQ(line.size(), 12u);
        const auto literal = std::count_if(line.begin(), line.end(), [](char c) { return c == '#' || c == '%'; });
        EXPECT_GE(literal, 3) << line;
        EXPECT_LE(static_cast<long>(line.size()) - literal, 9) << line;
    }
    EXPECT_EQ(seen, 50);
}

TEST_F(CliTest, PolicyErrorsExitTwo) {
    auto r = run_cli({"generate", "--length", "0", "--charset", "a"});
    EXPECT_EQ(r.code, kInputError);
    EXPECT_NE(r.err.find("LengthOutOfRange"), std::string::npos);

    r = run_cli({"generate", "--length", "4", "--charset", "lowercase", "--min", "digits=1"});
    EXPECT_EQ(r.code, kInputError);
    EXPECT_NE(r.err.find("UnknownSetName"), std::string::npos);

    r = run_cli({"generate", "--length", "4", "--charset", "abc", "--charset", "cde"});
    EXPECT_EQ(r.code, kInputError);
    EXPECT_NE(r.err.find("OverlappingSets"), std::string::npos);

    r = run_cli({"generate", "--policy", example_policy_file(), "--length", "3"});
    EXPECT_EQ(r.code, kInputError);
    EXPECT_NE(r.err.find("MalformedInput"), std::string::npos);

    r = run_cli({"generate", "--length", "3", "--charset", "a", "--seed", "-1"});
    EXPECT_EQ(r.code, kInputError);

    r = run_cli({"generate", "--policy", (dir_ / "missing.json").string()});
    EXPECT_EQ(r.code, kInputError);
}

TEST_F(CliTest, UsageErrorsExitTwoAndHelpExitsZero) {
    EXPECT_EQ(run_cli({}).code, kInputError);
    EXPECT_EQ(run_cli({"frobnicate"}).code, kInputError);
    EXPECT_EQ(run_cli({"generate", "--rng", "bitwarden", "--length", "2", "--charset", "a"}).code, kInputError);
    const auto help = run_cli({"--help"});
    EXPECT_EQ(help.code, kSuccess);
    EXPECT_NE(help.out.find("generate"), std::string::npos);
}

TEST_F(CliTest, CheckExitCodes) {
    const auto policy = example_policy_file();
    EXPECT_EQ(run_cli({"check", "--policy", policy}, "a0\n").code, kSuccess);
    EXPECT_EQ(run_cli({"check", "--policy", policy}, "a0\r\n").code, kSuccess);
    EXPECT_EQ(run_cli({"check", "--policy", policy}, "00\n").code, kUnsatisfied);
    EXPECT_EQ(run_cli({"check", "--policy", policy}, "\n").code, kUnsatisfied);
    EXPECT_EQ(run_cli({"check", "--policy", policy}, "").code, kInputError);
    EXPECT_EQ(run_cli({"check", "--policy", write("garbage.json", "{not json")}, "a0\n").code, kInputError);
}

TEST_F(CliTest, CountAndExact) {
    const auto policy = example_policy_file();
    const auto count = run_cli({"count", "--policy", policy});
    EXPECT_EQ(count.code, kSuccess);
    EXPECT_EQ(count.out, "{\"count\":\"12\"}\n");

    const auto single = run_cli({"exact", "--length", "1", "--charset", "a"});
    EXPECT_EQ(single.code, kSuccess);
    EXPECT_EQ(nlohmann::json::parse(single.out),
              nlohmann::json::parse(R"({"dist":[{"pw":"a","num":"1","den":"1"}]})"));

    const auto dist = nlohmann::json::parse(run_cli({"exact", "--policy", policy}).out)["dist"];
    EXPECT_EQ(dist.size(), 12u);
    for (const auto& entry : dist) {
        if (entry["pw"] == "ab") {
            EXPECT_EQ(entry["num"], "1");
            EXPECT_EQ(entry["den"], "8");
        }
    }
}

TEST_F(CliTest, DomainTooLargeExitsThree) {
    const auto r = run_cli({"audit", "--length", "9", "--charset", "lowercase"});
    EXPECT_EQ(r.code, kDomainTooLarge);
    EXPECT_NE(r.err.find("DomainTooLarge"), std::string::npos);
}

TEST_F(CliTest, AuditExactUnconstrainedHasZeroAdvantage) {
    const auto r = run_cli({"audit", "--mode", "exact", "--length", "3", "--charset", "abcd"});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["advantage"], 0.0);
    EXPECT_EQ(doc["mode"], "exact");
    EXPECT_EQ(doc["dof"], 63);
    EXPECT_EQ(doc["tv"], (nlohmann::json{{"num", "0"}, {"den", "1"}}));
    EXPECT_FALSE(doc.contains("table"));
    EXPECT_TRUE(nlohmann::json::parse(
                    run_cli({"audit", "--mode", "exact", "--length", "3", "--charset", "abcd", "--table"}).out)
                    .contains("table"));
}

TEST_F(CliTest, AuditEmpiricalDeterministicAcrossThreads) {
    const auto policy = example_policy_file();
    const std::vector<std::string> base{"audit", "--policy", policy, "--mode", "empirical", "--samples", "20000",
                                        "--seed", "99", "--table"};
    auto with_threads = [&](const char* t) {
        auto args = base;
        args.insert(args.end(), {"--threads", t});
        return run_cli(args);
    };
    const auto one = with_threads("1");
    ASSERT_EQ(one.code, kSuccess) << one.err;
    EXPECT_EQ(with_threads("1").out, one.out);
    EXPECT_EQ(with_threads("4").out, one.out);
    EXPECT_EQ(nlohmann::json::parse(one.out)["samples"], 20000);
}

}  // namespace
}  // namespace pwref::cli
