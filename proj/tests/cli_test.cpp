#include "gkflow_cli/app.hpp"
#include "gkflow_cli/scenario_file.hpp"

#include "doctest.h"
#include "json.hpp"

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace gkflow::cli;

namespace {

/// Scratch directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() / ("gkflow-cli-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    [[nodiscard]] const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "gkflow");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_text(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

}  // namespace

TEST_SUITE("cli algebra") {
    TEST_CASE("default run passes and writes its report") {
        TempDir dir;
        const Outcome r = invoke({"algebra", "--out", dir.path().string()});
        CHECK(r.code == 0);
        CHECK(r.out.find("all invariants hold") != std::string::npos);
        const auto doc = nlohmann::json::parse(slurp(dir.path() / "algebra.json"));
        CHECK(doc.at("pass").get<bool>());
    }

    TEST_CASE("injected sign flip fails and names the invariant") {
        TempDir dir;
        const Outcome r = invoke({"algebra", "--inject-fault", "sign-flip", "--out", dir.path().string()});
        CHECK(r.code == 1);
        CHECK(r.out.find("FAIL gcs_from_complex") != std::string::npos);
    }

    TEST_CASE("dimension four is accepted, five is not") {
        TempDir dir;
        CHECK(invoke({"algebra", "--n", "4", "--out", dir.path().string()}).code == 0);
        CHECK(invoke({"algebra", "--n", "5", "--out", dir.path().string()}).code == 2);
    }
}

TEST_SUITE("cli dictionary") {
    TEST_CASE("seeded runs are byte identical") {
        TempDir a, b, c;
        const Outcome ra = invoke({"dictionary", "--samples", "500", "--seed", "7", "--out", a.path().string()});
        const Outcome rb = invoke({"dictionary", "--samples", "500", "--seed", "7", "--out", b.path().string()});
        const Outcome rc = invoke({"dictionary", "--samples", "500", "--seed", "8", "--out", c.path().string()});
        CHECK(ra.code == 0);
        CHECK(rb.code == 0);
        CHECK(rc.code == 0);
        CHECK(ra.out == rb.out);
        CHECK(slurp(a.path() / "dictionary.json") == slurp(b.path() / "dictionary.json"));
        CHECK(slurp(a.path() / "dictionary.json") != slurp(c.path() / "dictionary.json"));
    }

    TEST_CASE("degenerate refusals pass") {
        TempDir dir;
        const Outcome r = invoke({"dictionary", "--degenerate", "--out", dir.path().string()});
        CHECK(r.code == 0);
        CHECK(r.out.find("degenerate") != std::string::npos);
    }
}

TEST_SUITE("cli flow") {
    TEST_CASE("poisson scenario writes the csv and json reports") {
        TempDir dir;
        const Outcome r = invoke({"flow", "--scenario", "poisson_c2", "--t", "0.05", "--out", dir.path().string()});
        CHECK(r.code == 0);
        const std::string csv = slurp(dir.path() / "flow_poisson_c2.csv");
        CHECK(csv.rfind("t,point_index,x1,y1,x2,y2,min_eig_g_t,nijenhuis_plus,nijenhuis_minus,torsion_plus_residual,"
                        "torsion_minus_residual,flow_identity_residual,dH_residual\n",
                        0) == 0);
        const auto doc = nlohmann::json::parse(slurp(dir.path() / "flow_poisson_c2.json"));
        CHECK(doc.at("scenario") == "poisson_c2");
        CHECK(doc.at("window").contains("t_max"));
        CHECK(doc.at("pass").get<bool>());
    }

    TEST_CASE("repeated flow runs are byte identical") {
        TempDir a, b;
        const Outcome ra = invoke({"flow", "--scenario", "poisson_c2", "--t", "0.05", "--out", a.path().string()});
        const Outcome rb = invoke({"flow", "--scenario", "poisson_c2", "--t", "0.05", "--out", b.path().string()});
        CHECK(ra.out == rb.out);
        CHECK(slurp(a.path() / "flow_poisson_c2.csv") == slurp(b.path() / "flow_poisson_c2.csv"));
        CHECK(slurp(a.path() / "flow_poisson_c2.json") == slurp(b.path() / "flow_poisson_c2.json"));
    }

    TEST_CASE("window flag prints t_max") {
        TempDir dir;
        const Outcome r = invoke({"flow", "--scenario", "poisson_c2", "--t", "0.05", "--window", "--out", dir.path().string()});
        CHECK(r.code == 0);
        CHECK(r.out.find("t_max=") != std::string::npos);
    }

    TEST_CASE("scenario file naming a builtin") {
        TempDir dir;
        const fs::path file =
            write_text(dir.path(), "s.json", R"({"builtin": "poisson_c2", "grid": 2, "t_schedule": [0.01]})");
        const Outcome r = invoke({"flow", "--scenario", file.string(), "--out", dir.path().string()});
        CHECK(r.code == 0);
    }

    TEST_CASE("malformed scenario file exits 2 with line and key") {
        TempDir dir;
        const fs::path file = write_text(dir.path(), "bad.json", "{\n  \"builtin\": \"poisson_c2\",\n  \"grid\": \"many\"\n}\n");
        const Outcome r = invoke({"flow", "--scenario", file.string(), "--out", dir.path().string()});
        CHECK(r.code == 2);
        CHECK(r.err.find(":3:") != std::string::npos);
        CHECK(r.err.find("grid") != std::string::npos);
    }

    TEST_CASE("syntax errors carry a line number") {
        CHECK_THROWS_WITH_AS((void)parse_scenario_json("{\n  \"builtin\": \"poisson_c2\",,\n}", "inline"),
                             doctest::Contains("inline:2"), InputError);
    }

    TEST_CASE("unknown scenario names are input errors") {
        TempDir dir;
        CHECK(invoke({"flow", "--scenario", "no_such_thing", "--out", dir.path().string()}).code == 2);
    }
}

TEST_SUITE("cli lie") {
    TEST_CASE("torus product with a point factor is eligible") {
        TempDir dir;
        const Outcome r = invoke({"lie", "--group", "u1:2,su2:2", "--Y", "pt x T^2", "--out", dir.path().string()});
        CHECK(r.code == 0);
        CHECK(r.out.find("verdict=eligible_case_i") != std::string::npos);
        const auto doc = nlohmann::json::parse(slurp(dir.path() / "lie.json"));
        CHECK(doc.dump().find("eligible_case_i") != std::string::npos);
    }

    TEST_CASE("A2 fails the root-sum criterion with a witness") {
        TempDir dir;
        const Outcome r = invoke({"lie", "--roots", "A2", "--out", dir.path().string()});
        CHECK(r.code == 0);
        CHECK(r.out.find("root_sum_criterion=false") != std::string::npos);
        CHECK(r.out.find("witness") != std::string::npos);
    }

    TEST_CASE("table scan reports no mismatch") {
        TempDir dir;
        const Outcome r = invoke({"lie", "--scan-table", "--out", dir.path().string()});
        CHECK(r.code == 0);
        CHECK(r.out.find("MISMATCH") == std::string::npos);
        CHECK(r.out.find("G2xA1") != std::string::npos);
    }
}

TEST_SUITE("cli input errors") {
    TEST_CASE("bad flags and values exit 2") {
        TempDir dir;
        const std::string out = dir.path().string();
        CHECK(invoke({"algebra", "--bogus", "--out", out}).code == 2);
        CHECK(invoke({"algebra", "--samples", "many", "--out", out}).code == 2);
        CHECK(invoke({"flow", "--out", out}).code == 2);
        CHECK(invoke({"flow", "--scenario", "poisson_c2", "--h", "-1", "--out", out}).code == 2);
        CHECK(invoke({"lie", "--roots", "E8", "--out", out}).code == 2);
        CHECK(invoke({}).code == 2);
    }

    TEST_CASE("help exits 0") { CHECK(invoke({"--help"}).code == 0); }
}
