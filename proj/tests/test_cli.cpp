#include "commands.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using namespace momentcone;
using namespace momentcone::cli;

namespace {

const json gamma_json = {{"variant", "gamma"}, {"rate", 1.0}};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string temp_path(const std::string& name) { return "cli_test_" + name; }

// Runs the built CLI; returns its exit status.
int run(const std::string& args)
{
    const std::string cmd = std::string(MOMENTCONE_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config validation")
{
    CHECK_THROWS_AS(parse_config(json{{"bogus", 1}}), UsageError);
    CHECK_THROWS_AS(parse_config(json{{"samples", 0}}), UsageError);
    CHECK_THROWS_AS(parse_config(json{{"degree_cap", 17}}), UsageError);
    CHECK_THROWS_AS(parse_config(json{{"tolerances", {{"psd", 0.0}}}}), UsageError);
    CHECK_THROWS_AS(parse_config(json{{"tolerances", {{"nope", 1.0}}}}), UsageError);
    CHECK_THROWS_AS(parse_config(json{{"dimension", 2}, {"window", {{"lower", {0}}, {"upper", {1}}}}}), UsageError);
    CHECK_THROWS_AS(parse_config(json{{"model", {{"variant", "nope"}}}}), UsageError);
    CHECK_THROWS_AS(parse_config(json::array()), UsageError);

    auto cfg = parse_config(json{{"model", gamma_json}, {"samples", 10}, {"tolerances", {{"psd", 1e-6}}}});
    CHECK(cfg.samples == 10);
    CHECK(cfg.verdict.tol.psd == 1e-6);
    CHECK(cfg.window == Window::cube(4.0, 1));
    REQUIRE(cfg.model);
    CHECK(cfg.model->name() == gamma_model().name());
}

TEST_CASE("overrides and hashing")
{
    json j = json::object();
    apply_override(j, "model.variant=poisson");
    apply_override(j, "model.rate=2.5");
    apply_override(j, "samples=7");
    CHECK(j == json{{"model", {{"variant", "poisson"}, {"rate", 2.5}}}, {"samples", 7}});
    CHECK_THROWS_AS(apply_override(j, "novalue"), UsageError);
    CHECK_THROWS_AS(apply_override(j, "samples.x=1"), UsageError);
    CHECK(config_hash(j) == config_hash(json::parse(j.dump())));
    json k = j;
    k["samples"] = 8;
    CHECK(config_hash(j) != config_hash(k));
}

TEST_CASE("sample files round trip")
{
    auto cfg = parse_config(json{{"model", gamma_json}, {"samples", 5}, {"seed", 3}, {"window", {{"lower", {0}}, {"upper", {1}}}}});
    std::ostringstream out;
    CHECK(cmd_simulate(cfg, out) == exit_decided);
    std::istringstream in(out.str());
    auto f = read_sample_file(in);
    CHECK(f.samples.size() == 5);
    CHECK(f.window == Window({0.0}, {1.0}));
    CHECK(f.manifest.at("config") == cfg.raw);
    CHECK(f.manifest.at("seed") == 3);

    std::ostringstream again;
    cmd_simulate(cfg, again);
    CHECK(again.str() == out.str());

    std::istringstream empty("");
    CHECK_THROWS_AS(read_sample_file(empty), UsageError);
    std::istringstream manifest_only(out.str().substr(0, out.str().find('\n') + 1));
    CHECK_THROWS_AS(read_sample_file(manifest_only), UsageError);
    std::istringstream garbage("{\"manifest\":{\"format\":\"other\"}}\n");
    CHECK_THROWS_AS(read_sample_file(garbage), UsageError);

    auto diffuse = parse_config(json{{"model", {{"variant", "diffuse"}}}});
    std::ostringstream sink;
    CHECK_THROWS_AS(cmd_simulate(diffuse, sink), UsageError);
}

TEST_CASE("moment tables")
{
    auto cfg = parse_config(json{{"model", gamma_json}, {"window", {{"lower", {0}}, {"upper", {1}}}}, {"max_total_degree", 2}});
    std::ostringstream out;
    cmd_moments(cfg, std::nullopt, out);
    std::istringstream lines(out.str());
    std::string header, first, second;
    std::getline(lines, header);
    std::getline(lines, first);
    std::getline(lines, second);
    CHECK(header == "n,i_1,i_2,delta_id,value,stderr");
    CHECK(first == "0,,,empty,1,0");
    // M_1([0,1)) = 1 for gamma
    CHECK(second == "1,1,,window:n1,1,0");
}

TEST_CASE("command-line exit codes and determinism")
{
    const std::string cfg = temp_path("config.json");
    {
        std::ofstream out(cfg);
        out << json{{"model", gamma_json}, {"samples", 200}, {"seed", 11}, {"window", {{"lower", {-2}}, {"upper", {2}}}}}.dump();
    }
    const std::string a = temp_path("a.jsonl"), b = temp_path("b.jsonl");
    CHECK(run("simulate -c " + cfg + " -o " + a) == 0);
    CHECK(run("simulate -c " + cfg + " -o " + b) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK_FALSE(slurp(a).empty());

    const std::string ma = temp_path("a.csv"), mb = temp_path("b.csv");
    CHECK(run("moments -c " + cfg + " -s " + a + " -o " + ma) == 0);
    CHECK(run("moments -c " + cfg + " -s " + a + " -o " + mb) == 0);
    CHECK(slurp(ma) == slurp(mb));

    const int sampled = run("verdict -c " + cfg + " -s " + a);
    CHECK((sampled == 0 || sampled == 3));
    CHECK(run("recover-rho -n 2 -c " + cfg + " -s " + a) == 0);
    CHECK(run("verdict --set 'model={\"variant\":\"gamma\"}'") == 0);
    // a converging atom-at-zero series is not decidable
    CHECK(run("verdict --set 'model={\"variant\":\"mixture\",\"components\":[{\"variant\":\"gamma\"},"
              "{\"variant\":\"diffuse\",\"rate\":1}]}'") == 3);
    CHECK(run("verdict --set samples=0 --set 'model={\"variant\":\"gamma\"}'") == 2);
    CHECK(run("verdict") == 2);
    CHECK(run("nonsense") == 2);
    CHECK(run("verdict -s " + temp_path("missing.jsonl")) == 2);
    CHECK(run("recover-rho -n 9 -c " + cfg) == 2);

    for (const auto& p : {cfg, a, b, ma, mb}) std::remove(p.c_str());
}
