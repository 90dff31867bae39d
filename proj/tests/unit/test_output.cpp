#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "schelling/output.hpp"

using namespace schelling;
namespace fs = std::filesystem;

namespace {

ModelParams make(int n, int w, Rational ta, Rational tb, int dim = 2) {
    ModelParams p;
    p.dim = dim;
    p.n = n;
    p.w = w;
    p.tau_alpha = ta;
    p.tau_beta = tb;
    return p;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "schelling_test_output";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("base64 known vectors and round trip") {
    auto enc = [](std::string s) { return base64_encode(std::vector<std::uint8_t>(s.begin(), s.end())); };
    CHECK(enc("") == "");
    CHECK(enc("f") == "Zg==");
    CHECK(enc("fo") == "Zm8=");
    CHECK(enc("foo") == "Zm9v");
    CHECK(enc("foobar") == "Zm9vYmFy");
    std::vector<std::uint8_t> bytes;
    for (int i = 0; i < 300; ++i)
        bytes.push_back(static_cast<std::uint8_t>(i * 37));
    for (std::size_t len : {0u, 1u, 2u, 3u, 299u, 300u}) {
        const std::vector<std::uint8_t> part(bytes.begin(), bytes.begin() + static_cast<long>(len));
        CHECK(base64_decode(base64_encode(part)) == part);
    }
    CHECK_THROWS(base64_decode("abc"));
    CHECK_THROWS(base64_decode("ab!="));
}

TEST_CASE("packed configurations round trip") {
    const ModelParams p = make(13, 1, Rational(1, 2), Rational(1, 2));
    const Configuration c = random_config(p, 8);
    const auto bytes = pack_config(c);
    CHECK(bytes.size() == (169 + 7) / 8);
    CHECK(unpack_config(p, bytes) == c);
    CHECK(((bytes[0] & 1) != 0) == (c[0] == NodeType::Alpha));
    CHECK_THROWS_AS(unpack_config(p, {1, 2}), ParameterError);
}

TEST_CASE("ppm snapshot layout and shading") {
    const ModelParams p = make(7, 1, Rational(1, 2), Rational(1, 2));
    Configuration c(p, NodeType::Beta);
    c.set(c.index({3, 3, 0}), NodeType::Alpha);
    std::ostringstream out;
    write_ppm(out, c, 0, "tag");
    const std::string s = out.str();
    const std::string header = "P6\n# tag\n7 7\n255\n";
    REQUIRE(s.rfind(header, 0) == 0);
    CHECK(s.size() == header.size() + 3 * 49);
    auto pixel = [&](int x, int y) {
        const std::size_t at = header.size() + 3 * static_cast<std::size_t>((6 - y) * 7 + x);
        return std::array<unsigned char, 3>{static_cast<unsigned char>(s[at]), static_cast<unsigned char>(s[at + 1]),
                                            static_cast<unsigned char>(s[at + 2])};
    };
    // Lone alpha: red at 128 + 127/9.
    CHECK(pixel(3, 3) == std::array<unsigned char, 3>{128 + 127 / 9, 0, 0});
    // Beta next to it has 8 of 9 beta; far beta has 9 of 9.
    CHECK(pixel(4, 3) == std::array<unsigned char, 3>{0, static_cast<unsigned char>(128 + 127 * 8 / 9), 0});
    CHECK(pixel(0, 0) == std::array<unsigned char, 3>{0, 255, 0});
    CHECK_THROWS_AS(write_ppm(out, c, 1), ParameterError);
}

TEST_CASE("3D snapshots are one slice at a time") {
    const ModelParams p = make(7, 1, Rational(1, 2), Rational(1, 2), 3);
    const Configuration c = random_config(p, 1);
    std::ostringstream a, b;
    write_ppm(a, c, 0);
    write_ppm(b, c, 6);
    CHECK(a.str().size() == std::string("P6\n7 7\n255\n").size() + 3 * 49);
    CHECK(a.str() != b.str());
    CHECK_THROWS_AS(write_ppm(a, c, 7), ParameterError);
}

TEST_CASE("file names embed the parameters") {
    CHECK(params_stem(make(600, 5, Rational::parse("0.44"), Rational::parse("0.42"))) == "d2_n600_w5_ta0.44_tb0.42");
    CHECK(params_stem(make(600, 5, Rational(1, 3), Rational(1, 1))) == "d2_n600_w5_ta1-3_tb1");
    CHECK(params_stem(make(30, 1, Rational(1, 8), Rational(0, 1), 3)) == "d3_n30_w1_ta0.125_tb0");
}

TEST_CASE("run records are deterministic json") {
    const ModelParams p = make(30, 1, Rational::parse("0.4"), Rational::parse("0.3"));
    const Configuration initial = random_config(p, 5);
    const RunResult r = run(initial, {}, 5);
    RunRecordOptions rec;
    rec.embed_final = true;
    const nlohmann::json a = run_record_json(initial, r, {}, rec);
    const nlohmann::json b = run_record_json(initial, run(initial, {}, 5), {}, rec);
    CHECK(a.dump() == b.dump());
    CHECK(a["version"] == kVersion);
    CHECK(a["params"]["tau_alpha"] == "2/5");
    CHECK(a["seed"] == 5);
    CHECK(a["terminated"] == r.terminated);
    CHECK(a["reports"].size() == r.reports.size());
    const auto bytes = base64_decode(a["final_config_base64"].get<std::string>());
    CHECK(unpack_config(p, bytes) == r.final);
    CHECK(!run_record_json(initial, r, {}).contains("final_config_base64"));
}

TEST_CASE("output files appear only on commit") {
    const fs::path path = scratch("commit.txt");
    fs::remove(path);
    fs::remove(path.string() + ".partial");
    {
        OutputFile f(path);
        f.stream() << "hello\n";
        CHECK(fs::exists(path.string() + ".partial"));
        CHECK(!fs::exists(path));
        f.commit();
    }
    CHECK(fs::exists(path));
    CHECK(!fs::exists(path.string() + ".partial"));

    const fs::path abandoned = scratch("abandoned.txt");
    fs::remove(abandoned);
    {
        OutputFile f(abandoned);
        f.stream() << "half";
    }
    CHECK(!fs::exists(abandoned));
    CHECK(fs::exists(abandoned.string() + ".partial"));
    CHECK_THROWS(OutputFile(scratch("missing_dir") / "x" / "y.txt"));
}

TEST_CASE("config files") {
    const fs::path path = scratch("run.cfg");
    {
        std::ofstream out(path);
        out << "# comment\n\n n = 600 \ntau-alpha=0.44\nppm = true\n";
    }
    const auto kv = read_config_file(path);
    REQUIRE(kv.size() == 3);
    CHECK(kv[0] == std::pair<std::string, std::string>{"n", "600"});
    CHECK(kv[1] == std::pair<std::string, std::string>{"tau-alpha", "0.44"});
    CHECK(kv[2].second == "true");
    {
        std::ofstream out(path);
        out << "n 600\n";
    }
    CHECK_THROWS(read_config_file(path));
    CHECK_THROWS(read_config_file(scratch("does_not_exist.cfg")));
}
