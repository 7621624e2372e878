#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_cli(const std::string& args, const std::string& workdir = "") {
    std::string command = std::string(CMDPSIM_CLI_PATH) + " " + args + " 2>&1";
    if (!workdir.empty()) command = "cd " + workdir + " && " + command;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CommandResult result;
    std::array<char, 512> buf;
    while (fgets(buf.data(), buf.size(), pipe) != nullptr) result.output += buf.data();
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string data_file(const std::string& name) {
    return std::string(CMDPSIM_TEST_DATA) + "/" + name;
}

} // namespace

TEST_CASE("check exits 1 on a malformed partition and names the invariant") {
    const CommandResult result = run_cli("check --model " + data_file("bad_model.json"));
    CHECK(result.exit_code == 1);
    CHECK(result.output.find("segments do not partition [0,1)") != std::string::npos);
}

TEST_CASE("check accepts a well-formed model") {
    const CommandResult result = run_cli("check --model " + data_file("good_model.json"));
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("model ok") != std::string::npos);
}

TEST_CASE("bounds prints the sandwich probability") {
    const CommandResult result =
        run_cli("bounds --epsilon 0.2 --alphaH 0.1 --policies 10 --N 1000");
    CHECK(result.exit_code == 0);
    // 1 - 20 exp(-20) = 0.99999995875...
    CHECK(result.output.find("sandwich_bound 0.9999999587") != std::string::npos);
}

TEST_CASE("bounds rejects epsilon at or below alpha_H with exit 1") {
    const CommandResult result =
        run_cli("bounds --epsilon 0.1 --alphaH 0.1 --policies 10 --N 1000");
    CHECK(result.exit_code == 1);
}

TEST_CASE("unknown flags produce usage output and exit 1") {
    const CommandResult result = run_cli("run --bogus-flag 3");
    CHECK(result.exit_code == 1);
}

TEST_CASE("missing subcommand exits 1") {
    const CommandResult result = run_cli("");
    CHECK(result.exit_code == 1);
}

TEST_CASE("a trimmed run of the shipped desk experiment emits the aggregate CSVs") {
    const std::string dir = std::string(P_tmpdir) + "/cmdpsim_desk_smoke";
    REQUIRE(std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str()) == 0);
    const std::string config =
        std::string(CMDPSIM_SOURCE_DIR) + "/configs/desk_experiment.json";
    // Paths inside the config are relative to the repository root.
    const CommandResult result =
        run_cli("experiment --config " + config + " --replications 2 --output-dir " + dir,
                std::string(CMDPSIM_SOURCE_DIR));
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("0 failures") != std::string::npos);
    for (const char* name :
         {"oracle.csv", "sandwich.csv", "regret.csv", "fits.csv", "bounds.csv"}) {
        CHECK(std::filesystem::exists(std::filesystem::path(dir) / name));
    }
}

TEST_CASE("generate, check, oracle and run chain together") {
    const std::string dir = std::string(P_tmpdir) + "/cmdpsim_cli_chain";
    REQUIRE(std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str()) == 0);
    const std::string model = dir + "/model.json";
    const std::string policies = dir + "/policies.json";

    const CommandResult generated = run_cli(
        "generate --states 3 --actions 2 --segments 2 --num-policies 4 --seed 5 "
        "--gamma 0.8 --beta 0.8 --out-model " + model + " --out-policies " + policies);
    CHECK(generated.exit_code == 0);

    // Same seed, byte-identical files.
    const std::string model2 = dir + "/model_again.json";
    CHECK(run_cli("generate --states 3 --actions 2 --segments 2 --num-policies 4 --seed 5 "
                  "--gamma 0.8 --beta 0.8 --out-model " + model2 + " --out-policies " + dir +
                  "/policies_again.json")
              .exit_code == 0);
    const auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    CHECK(slurp(model) == slurp(model2));

    CHECK(run_cli("check --model " + model + " --policies " + policies).exit_code == 0);

    const CommandResult oracle = run_cli("oracle --model " + model + " --policies " + policies +
                                         " --budget 0.5 --H 10 --epsilon 0.1 --out " + dir +
                                         "/oracle.csv");
    CHECK(oracle.exit_code == 0);
    CHECK(oracle.output.find("feasible(eps=0.1)") != std::string::npos);

    const CommandResult trace = run_cli("run --algo ftal --model " + model + " --policies " +
                                        policies + " --budget 0.5 --N 20 --H 10 --seed 3 --out " +
                                        dir + "/trace.csv");
    CHECK(trace.exit_code == 0);
    CHECK(trace.output.find("final chosen policy") != std::string::npos);
}
