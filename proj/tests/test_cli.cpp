#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <hslog/cli/commands.hpp>

using namespace hslog;
using namespace hslog::cli;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("hslog_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
    const fs::path p = dir / "run.cfg";
    std::ofstream(p) << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::map<std::string, double> read_kv_csv(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::map<std::string, double> out;
    while (std::getline(in, line)) {
        const auto c = line.find(',');
        out[line.substr(0, c)] = std::stod(line.substr(c + 1));
    }
    return out;
}

struct Run {
    int code;
    std::string log, err;
};

Run run(const std::string& cmd, const fs::path& cfg, const fs::path& out, const std::string& suite = "all") {
    std::ostringstream log, err;
    Context ctx;
    ctx.out_dir = out.string();
    ctx.suite = suite;
    const int code = run_command(cmd, cfg.string(), ctx, log, err);
    return {code, log.str(), err.str()};
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(HSLOG_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing", "[cli]") {
    const RunConfig d = parse_config_defaults();
    CHECK(d.M == 2000);
    CHECK(d.beta_list.size() == 5);

    std::istringstream ok("# comment\np = 3\nalpha0 = 2\nalpha1 = 4\ntheta = 4  # trailing\nbeta_list = 1, 2,4\n");
    const RunConfig c = parse_config(ok);
    CHECK(c.p == 3.0);
    CHECK(c.beta_list == std::vector<double>{1.0, 2.0, 4.0});

    auto parse = [](const std::string& s) {
        std::istringstream is(s);
        return parse_config(is);
    };
    CHECK_THROWS_WITH(parse("bogus = 1\n"), ContainsSubstring("unknown key"));
    CHECK_THROWS_WITH(parse("M = 10\nM = 20\n"), ContainsSubstring("duplicate key"));
    CHECK_THROWS_WITH(parse("M =\n"), ContainsSubstring("empty value"));
    CHECK_THROWS_WITH(parse("M = 2.5\n"), ContainsSubstring("integer"));
    CHECK_THROWS_WITH(parse("tau = abc\n"), ContainsSubstring("number"));
    CHECK_THROWS_WITH(parse("just text\n"), ContainsSubstring("key = value"));
    CHECK_THROWS_WITH(parse("alpha1 = 0.5\nalpha0 = 0\n"), ContainsSubstring("alpha1−p+1 ≤ 0"));
    CHECK_THROWS_AS(parse("M = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse("epsilon_list = 1e-3, -1\n"), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/hslog.cfg"), ValidationError);
}

TEST_CASE("constants command", "[cli]") {
    const fs::path dir = scratch_dir("constants");
    const Run r0 = run("constants", write_config(dir, "M = 200\n"), dir);
    REQUIRE(r0.code == 0);
    auto kv = read_kv_csv(dir / "constants.csv");
    CHECK_THAT(kv.at("sigma_p"), WithinRel(0.960674926386610, 1e-9));
    CHECK(kv.at("p_star") == 6.0);

    const Run r1 = run("constants", write_config(dir, "p = 3\nalpha0 = 2\nalpha1 = 4\ntheta = 4\n"), dir);
    REQUIRE(r1.code == 0);
    CHECK_THAT(read_kv_csv(dir / "constants.csv").at("p_star"), WithinRel(7.5, 1e-14));

    const Run bad = run("constants", write_config(dir, "p = 2\nalpha0 = 0\nalpha1 = 0.5\ntheta = 2\n"), dir);
    CHECK(bad.code == 1);
    CHECK_THAT(bad.err, ContainsSubstring("alpha1−p+1 ≤ 0"));
}

TEST_CASE("shoot command policies", "[cli]") {
    const fs::path dir = scratch_dir("shoot");
    const Run low = run("shoot", write_config(dir, "tau = 0.5\n"), dir);
    CHECK(low.code == 1);
    CHECK_THAT(low.err, ContainsSubstring("tau must be ≥ 1 for the BVP"));

    const Run hi = run("shoot", write_config(dir, "beta = 1.5\nM = 400\ngamma = 2\n"), dir);
    CHECK_THAT(hi.log, ContainsSubstring("outside existence regime"));
    CHECK((hi.code == 0 || hi.code == 2));

    const Run ok = run("shoot", write_config(dir, "M = 2000\n"), dir);
    REQUIRE(ok.code == 0);
    std::ifstream in(dir / "solution.csv");
    const Profile u = read_profile_csv(in);
    CHECK(u.size() == 2000);
    CHECK(std::abs(u[u.size() - 1]) <= 1e-8);
    CHECK(fs::exists(dir / "shoot_metadata.txt"));
}

TEST_CASE("verify rejects unknown suites", "[cli]") {
    const fs::path dir = scratch_dir("verify");
    const Run r = run("verify", write_config(dir, "M = 200\n"), dir, "nonsense");
    CHECK(r.code == 1);
    CHECK_THAT(r.err, ContainsSubstring("unknown suite"));
}

TEST_CASE("bliss suite passes on the classical set", "[cli]") {
    const fs::path dir = scratch_dir("bliss");
    const Run r = run("verify", write_config(dir, "M = 4000\n"), dir, "bliss");
    INFO(r.log << r.err);
    CHECK(r.code == 0);
    CHECK_THAT(slurp(dir / "verify_bliss.csv"), Catch::Matchers::StartsWith("check,value,threshold,pass\n"));
}

TEST_CASE("reruns are byte-identical", "[cli]") {
    const fs::path a = scratch_dir("rerun_a"), b = scratch_dir("rerun_b");
    const std::string cfg = "M = 200\nrandom_profiles = 5\n";
    for (const char* cmd : {"constants", "maximize", "mp-gap"}) {
        INFO(cmd);
        REQUIRE(run(cmd, write_config(a, cfg), a).code == 0);
        REQUIRE(run(cmd, write_config(b, cfg), b).code == 0);
    }
    for (const char* f : {"constants.csv", "maximizer.csv", "maximize.txt", "mp_gap.csv", "mp_ridge.csv"}) {
        INFO(f);
        CHECK(slurp(a / f) == slurp(b / f));
    }
}

TEST_CASE("command-line front end exit codes", "[cli]") {
    const fs::path dir = scratch_dir("binary");
    const fs::path bad = write_config(dir, "p = 2\nalpha0 = 0\nalpha1 = 0.5\ntheta = 2\n");
    CHECK(run_binary("--help") == 0);
    CHECK(run_binary("constants --config " + bad.string() + " --out " + dir.string()) == 1);
    CHECK(run_binary("verify --suite nonsense --out " + dir.string()) == 1);
    CHECK(run_binary("no-such-command") == 1);
    CHECK(run_binary("constants --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "constants.csv"));
}
