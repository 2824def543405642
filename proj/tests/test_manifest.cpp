#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "kprice/errors.hpp"
#include "kprice/manifest.hpp"

using namespace kprice;

TEST_CASE("sha256 known digests") {
    const char* path = "digest_test.bin";
    {
        std::ofstream out(path, std::ios::binary);
    }
    CHECK(sha256_file(path) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    {
        std::ofstream out(path, std::ios::binary);
        out << "abc";
    }
    CHECK(sha256_file(path) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    std::remove(path);
    CHECK_THROWS_AS(sha256_file("no_such_file.bin"), io_error);
}

TEST_CASE("run manifest structure") {
    const char* produced = "manifest_output_test.csv";
    {
        std::ofstream out(produced);
        out << "a,q\n0,0\n1,1\n";
    }
    RunManifest m;
    m.command = "equilibrium";
    m.parameters = {{"n", 5}, {"k", 3}};
    m.seed = 42;
    m.add_output(produced);

    auto j = m.to_json();
    CHECK(j["command"] == "equilibrium");
    CHECK(j["tool_version"] == tool_version());
    CHECK(j["parameters"]["n"] == 5);
    CHECK(j["seed"] == 42);
    CHECK(j["outputs"][produced] == sha256_file(produced));

    const char* manifest_path = "manifest_test.json";
    m.write(manifest_path);
    std::ifstream in(manifest_path);
    REQUIRE(in.good());
    auto parsed = nlohmann::json::parse(in);
    CHECK(parsed == j);

    RunManifest again;
    again.command = m.command;
    again.parameters = m.parameters;
    again.seed = m.seed;
    again.add_output(produced);
    CHECK(again.to_json() == j);

    RunManifest seedless;
    seedless.command = "identities";
    CHECK(seedless.to_json()["seed"].is_null());

    std::remove(produced);
    std::remove(manifest_path);
}
