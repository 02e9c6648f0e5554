#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracfreq/io.hpp"
#include "fracfreq/parse.hpp"

using namespace fracfreq;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

const fs::path work_dir = fs::temp_directory_path() / "fracfreq_cli_test";

int run(const std::string& args) {
    const std::string cmd = std::string(FRACFREQ_BIN) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

}  // namespace

TEST_CASE("cli end to end") {
    fs::create_directories(work_dir);
    const auto plant = parse_tf_text("1 / (0.8 s^2.2 + 0.5 s^0.9 + 1)");
    write(work_dir / "plant.json", to_json(plant).dump());
    write(work_dir / "controller.json",
          R"({"K":50.0,"Ti":0,"Td":5.326,"lambda":1,"delta":1.286})");

    SECTION("stability of the worked example") {
        const auto out = work_dir / "verdict.json";
        const int rc = run("stability --plant " + (work_dir / "plant.json").string() +
                           " --controller " + (work_dir / "controller.json").string() +
                           " -o " + out.string());
        CHECK(rc == 0);
        const auto j = json::parse(slurp(out));
        CHECK(j.at("verdict") == "stable");
        CHECK(j.at("winding_number") == 0);
        CHECK(j.at("config").at("points_per_decade") == 64);
    }

    SECTION("compose with a unit P controller returns the plant") {
        const auto out = work_dir / "composed.json";
        const int rc = run("compose --plant '1/(s+1)' --controller "
                           "'{\"K\":1,\"Ti\":0,\"Td\":0}' -o " +
                           out.string());
        CHECK(rc == 0);
        CHECK(tf_from_json(json::parse(slurp(out))) == parse_tf_text("1/(s+1)"));
    }

    SECTION("bode CSV and SVG") {
        const auto csv = work_dir / "bode.csv";
        const auto svg = work_dir / "bode.svg";
        const int rc = run("bode --plant " + (work_dir / "plant.json").string() +
                           " -o " + csv.string() + " --svg " + svg.string());
        CHECK(rc == 0);
        std::istringstream is(slurp(csv));
        std::string header;
        std::getline(is, header);
        CHECK(header == "omega,re,im,mag_db,phase_deg");
        CHECK(slurp(svg).find("<svg") == 0);
    }

    SECTION("nyquist SVG marks the critical point") {
        const auto svg = work_dir / "nyq.svg";
        const int rc = run("nyquist --plant " + (work_dir / "plant.json").string() +
                           " --mirror -o " + (work_dir / "nyq.csv").string() +
                           " --svg " + svg.string());
        CHECK(rc == 0);
        CHECK(slurp(svg).find("(-1, 0)") != std::string::npos);
    }

    SECTION("fit pipeline closure") {
        const auto csv = work_dir / "meas.csv";
        int rc = run("bode --plant " + (work_dir / "plant.json").string() +
                     " --wmin 0.01 --wmax 100 -o " + csv.string());
        REQUIRE(rc == 0);
        const auto out = work_dir / "fit.json";
        rc = run("fit --data " + csv.string() +
                 " --num-exponents 0 --den-exponents 0,0.9,2.2 -o " + out.string());
        CHECK(rc == 0);
        const auto j = json::parse(slurp(out));
        CHECK(j.at("q_value").get<double>() <= 1e-12);
        const auto model = tf_from_json(j.at("model"));
        CHECK(model.denominator.terms()[1].coefficient == Approx(0.5).margin(1e-8));
        CHECK(model.denominator.terms()[2].coefficient == Approx(0.8).margin(1e-8));
    }

    SECTION("margins JSON") {
        const auto out = work_dir / "margins.json";
        const int rc = run("margins --plant " + (work_dir / "plant.json").string() +
                           " --controller " + (work_dir / "controller.json").string() +
                           " -o " + out.string());
        CHECK(rc == 0);
        const auto j = json::parse(slurp(out));
        CHECK(j.at("phase_margin_deg").get<double>() > 0.0);
    }

    SECTION("exit codes") {
        CHECK(run("stability --plant 'not a tf' -o /dev/null") == 1);
        CHECK(run("fit --data /nonexistent.csv --num-exponents 0 "
                  "--den-exponents 0 -o /dev/null") == 1);
        // an improper open loop cannot be judged from a truncated sweep
        CHECK(run("stability --plant s -o /dev/null") == 2);
    }
}
