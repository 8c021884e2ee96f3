// Copyright 2026 The qmanizk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "qmanizk/hamiltonian.hpp"

namespace {

namespace fsys = std::filesystem;

struct CommandResult {
    int exit_code = -1;
    std::string out;
};

CommandResult run_cli(const std::string& args) {
    std::string cmd = std::string(QMANIZK_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {};
    CommandResult res;
    char buf[4096];
    while (std::size_t got = fread(buf, 1, sizeof(buf), pipe)) res.out.append(buf, got);
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

fsys::path temp_dir() {
    auto dir = fsys::temp_directory_path() / "qmanizk_cli_test";
    fsys::create_directories(dir);
    return dir;
}

}  // namespace

TEST(CliGen, WritesLoadableInstance) {
    auto path = temp_dir() / "bell.json";
    auto res = run_cli("gen --kind bell_stabilizer_yes --n 2 --out " + path.string());
    ASSERT_EQ(res.exit_code, 0);
    auto inst = qmanizk::ham::load_instance(path.string());
    EXPECT_TRUE(inst.is_yes);
    EXPECT_EQ(inst.num_qubits(), 2);
}

TEST(CliGen, CircuitPathRecordsAchievedAlpha) {
    auto path = temp_dir() / "kitaev.json";
    auto res = run_cli("gen --circuit \"H 0; CNOT 0 1\" --witness-qubits 1 --out " + path.string());
    ASSERT_EQ(res.exit_code, 0);
    auto inst = qmanizk::ham::load_instance(path.string());
    ASSERT_TRUE(inst.witness.has_value());
    EXPECT_NEAR(qmanizk::ham::energy(*inst.witness, inst.hamiltonian), inst.hamiltonian.alpha, 1e-9);
}

TEST(CliGen, InvalidArgumentsAreUsageErrors) {
    auto res = run_cli("gen --kind bell_stabilizer_yes --n 3 --out /tmp/qmanizk_bad.json");
    EXPECT_EQ(res.exit_code, 2);  // odd n rejected by the constructor
    auto res2 = run_cli("gen --kind nonsense --n 2 --out /tmp/qmanizk_bad.json");
    EXPECT_EQ(res2.exit_code, 2);
}

TEST(CliRun, ReportMatchesLawAndReplays) {
    auto path = temp_dir() / "bell_run.json";
    ASSERT_EQ(run_cli("gen --kind bell_stabilizer_yes --n 2 --out " + path.string()).exit_code, 0);
    std::string args = "run --protocol qsp --instance " + path.string() + " --trials 4000 --seed 9";
    auto res = run_cli(args);
    ASSERT_EQ(res.exit_code, 0);
    auto report = nlohmann::json::parse(res.out);
    EXPECT_EQ(report.at("trials").get<int>(), 4000);
    EXPECT_EQ(report.at("protocol"), "qsp");
    EXPECT_NEAR(report.at("analytic").get<double>(), 1.0, 1e-12);
    EXPECT_NEAR(report.at("estimate").get<double>(), 1.0, 1e-12);
    EXPECT_GE(report.at("accepts").get<int>(), 0);

    auto res2 = run_cli(args);
    auto r1 = nlohmann::json::parse(res.out);
    auto r2 = nlohmann::json::parse(res2.out);
    r1.erase("wall_ms");
    r2.erase("wall_ms");
    EXPECT_EQ(r1.dump(), r2.dump());
}

TEST(CliRun, CheatReportStaysUnderTheLaw) {
    auto path = temp_dir() / "anti_run.json";
    ASSERT_EQ(run_cli("gen --kind anti_stabilizer_no --n 2 --out " + path.string()).exit_code, 0);
    auto res = run_cli("run --protocol fs --instance " + path.string() +
                       " --trials 4000 --seed 11 --cheat ground");
    ASSERT_EQ(res.exit_code, 0);
    auto report = nlohmann::json::parse(res.out);
    double estimate = report.at("estimate").get<double>();
    double analytic = report.at("analytic").get<double>();
    EXPECT_NEAR(analytic, 1.0 - 0.5 / 729.0, 1e-9);
    EXPECT_LE(estimate, analytic + 4 * std::sqrt(analytic * (1 - analytic) / 4000.0));
}

TEST(CliRun, AllProtocolLanesProduceSaneReports) {
    auto yes2 = temp_dir() / "lanes_yes2.json";
    auto yes5 = temp_dir() / "lanes_yes5.json";
    ASSERT_EQ(run_cli("gen --kind bell_stabilizer_yes --n 2 --out " + yes2.string()).exit_code, 0);
    {
        // 5-qubit instance for the dual lane (OT arity)
        auto inst = qmanizk::ham::pad_instance(qmanizk::ham::load_instance(yes2.string()), 5);
        qmanizk::ham::save_instance(inst, yes5.string());
    }
    struct Lane {
        const char* protocol;
        const char* instance;
        const char* extra;
    };
    const Lane lanes[] = {
        {"qsp-prime", "yes2", ""},
        {"nip", "yes2", ""},
        {"sigma", "yes2", ""},
        {"bell-fs", "yes2", ""},
        {"dual", "yes5", " --mode binding"},
        {"dual", "yes5", " --mode hiding"},
    };
    for (const auto& lane : lanes) {
        SCOPED_TRACE(lane.protocol + std::string(lane.extra));
        std::string inst_path = (lane.instance == std::string("yes2") ? yes2 : yes5).string();
        auto res = run_cli("run --protocol " + std::string(lane.protocol) + " --instance " +
                           inst_path + " --trials 600 --seed 21" + lane.extra);
        ASSERT_EQ(res.exit_code, 0);
        auto report = nlohmann::json::parse(res.out);
        // alpha = 0 instances: every lane's law value is exactly 1
        EXPECT_NEAR(report.at("analytic").get<double>(), 1.0, 1e-12);
        EXPECT_NEAR(report.at("estimate").get<double>(), 1.0, 1e-12);
    }
}

TEST(CliRun, IncompatibleProtocolInstancePairIsUsageError) {
    auto path = temp_dir() / "anti_nip.json";
    ASSERT_EQ(run_cli("gen --kind anti_stabilizer_no --n 2 --out " + path.string()).exit_code, 0);
    auto res = run_cli("run --protocol nip --instance " + path.string() + " --trials 10 --seed 1");
    EXPECT_EQ(res.exit_code, 2);  // not in paired ZZ/XX form
}

TEST(CliLemmas, SuiteSelectionAndExitCodes) {
    EXPECT_EQ(run_cli("lemmas --suite energy --seed 5").exit_code, 0);
    EXPECT_EQ(run_cli("lemmas --suite nonsense --seed 5").exit_code, 2);
    // injected bugs must flip the matching suite red (exit 3)
    EXPECT_EQ(run_cli("lemmas --suite zk --seed 5 --mutate pad").exit_code, 3);
    EXPECT_EQ(run_cli("lemmas --suite ot --seed 5 --mutate ot-branch").exit_code, 3);
}

TEST(CliSweep, ProducesCsvCurves) {
    auto dir = temp_dir() / "sweep";
    fsys::create_directories(dir);
    ASSERT_EQ(run_cli("gen --kind bell_stabilizer_yes --n 2 --out " + (dir / "yes.json").string()).exit_code, 0);
    ASSERT_EQ(run_cli("gen --kind anti_pair_no --n 2 --out " + (dir / "no.json").string()).exit_code, 0);
    auto csv_path = temp_dir() / "curves.csv";
    auto res = run_cli("sweep --protocol nip --instances " + dir.string() +
                       " --reps 1,9,37 --trials 120 --seed 3 --out " + csv_path.string());
    ASSERT_EQ(res.exit_code, 0);
    std::ifstream csv(csv_path);
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "reps,completeness_err,soundness_err,hoeffding_bound");
    int rows = 0;
    double last_bound = 1.1;
    double last_comp = 1.1, last_sound = 1.1;
    const double slack = 4 * std::sqrt(0.25 / 120.0);
    for (std::string line; std::getline(csv, line);) {
        if (line.empty()) continue;
        ++rows;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        ASSERT_EQ(vals.size(), 4u);
        EXPECT_LE(vals[1], vals[3] + slack);  // errors stay under the bound
        EXPECT_LE(vals[2], vals[3] + slack);
        EXPECT_LE(vals[1], last_comp + slack);  // and shrink with reps
        EXPECT_LE(vals[2], last_sound + slack);
        EXPECT_LE(vals[3], last_bound);
        last_comp = vals[1];
        last_sound = vals[2];
        last_bound = vals[3];
    }
    EXPECT_EQ(rows, 3);
}

TEST(CliSweep, DilutedProtocolLane) {
    auto dir = temp_dir() / "sweep_qsp";
    fsys::create_directories(dir);
    ASSERT_EQ(run_cli("gen --kind bell_stabilizer_yes --n 2 --out " + (dir / "yes.json").string()).exit_code, 0);
    ASSERT_EQ(run_cli("gen --kind anti_stabilizer_no --n 2 --out " + (dir / "no.json").string()).exit_code, 0);
    auto csv_path = temp_dir() / "curves_qsp.csv";
    auto res = run_cli("sweep --protocol qsp --instances " + dir.string() +
                       " --reps 1,3 --trials 60 --seed 8 --out " + csv_path.string());
    ASSERT_EQ(res.exit_code, 0);
    std::ifstream csv(csv_path);
    std::string header;
    std::getline(csv, header);
    int rows = 0;
    for (std::string line; std::getline(csv, line);) {
        if (line.empty()) continue;
        ++rows;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        ASSERT_EQ(vals.size(), 4u);
        EXPECT_NEAR(vals[1], 0.0, 1e-12);  // honest runs never fail on alpha = 0
        // the bound is still near 1 at these reps: gap is (beta-alpha)/729
        EXPECT_GT(vals[3], 0.99);
    }
    EXPECT_EQ(rows, 2);
}
