// fracfreq: frequency-domain analysis of fractional-order control systems.
//
// Subcommands: bode, nyquist, margins, stability, compose, fit.
// Exit codes: 0 success, 1 input/model error, 2 indeterminate verdict.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "fracfreq/fracfreq.hpp"

namespace ff = fracfreq;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A plant spec is either inline JSON, a .json file, or grammar text.
ff::FractionalTF load_tf(const std::string& spec) {
    std::string text = spec;
    if (spec.size() > 5 && spec.ends_with(".json")) text = slurp(spec);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return ff::tf_from_json(ff::json::parse(text));
    return ff::parse_tf_text(text);
}

ff::PilDController load_controller(const std::string& spec) {
    std::string text = spec;
    if (spec.size() > 5 && spec.ends_with(".json")) text = slurp(spec);
    return ff::controller_from_json(ff::json::parse(text));
}

struct SweepFlags {
    double wmin = 1e-3;
    double wmax = 1e3;
    int ppd = 64;

    void attach(CLI::App* cmd) {
        if (const char* env = std::getenv("FRACFREQ_POINTS_PER_DECADE"))
            ppd = std::atoi(env);
        cmd->add_option("--wmin", wmin, "lowest frequency [rad/s]");
        cmd->add_option("--wmax", wmax, "highest frequency [rad/s]");
        cmd->add_option("--ppd,--points-per-decade", ppd, "points per decade");
    }

    ff::FrequencySweep build() const { return ff::FrequencySweep(wmin, wmax, ppd); }

    ff::json echo() const {
        return {{"omega_min", wmin}, {"omega_max", wmax}, {"points_per_decade", ppd}};
    }
};

void write_text(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::vector<size_t> parse_index_list(const std::string& csv) {
    std::vector<size_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(static_cast<size_t>(std::stoul(item)));
    return out;
}

ff::FractionalTF open_loop_from(const std::string& plant_spec,
                                const std::string& controller_spec) {
    ff::FractionalTF plant = load_tf(plant_spec);
    if (controller_spec.empty()) return plant;
    return ff::compose_open_loop(load_controller(controller_spec), plant);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frequency-domain analysis of fractional-order control systems"};
    app.require_subcommand(1);

    std::string plant_spec, controller_spec, output, svg_output;
    SweepFlags sweep_flags;

    auto add_system_flags = [&](CLI::App* cmd, bool controller_optional = true) {
        cmd->add_option("--plant", plant_spec,
                        "plant TF: grammar text, inline JSON, or .json file")
            ->required();
        auto* c = cmd->add_option("--controller", controller_spec,
                                  "controller: inline JSON or .json file");
        if (!controller_optional) c->required();
        cmd->add_option("-o,--output", output, "output file ('-' for stdout)");
    };

    auto* cmd_bode = app.add_subcommand("bode", "frequency response CSV (+ optional SVG)");
    add_system_flags(cmd_bode);
    cmd_bode->add_option("--svg", svg_output, "also write an SVG Bode plot");
    sweep_flags.attach(cmd_bode);

    auto* cmd_nyquist = app.add_subcommand("nyquist", "Nyquist curve CSV (+ optional SVG)");
    add_system_flags(cmd_nyquist);
    cmd_nyquist->add_option("--svg", svg_output, "also write an SVG Nyquist plot");
    bool mirror = false;
    cmd_nyquist->add_flag("--mirror", mirror, "append the conjugate branch");
    sweep_flags.attach(cmd_nyquist);

    auto* cmd_margins = app.add_subcommand("margins", "gain and phase margins JSON");
    add_system_flags(cmd_margins);
    sweep_flags.attach(cmd_margins);

    auto* cmd_stability = app.add_subcommand("stability", "closed-loop stability verdict JSON");
    add_system_flags(cmd_stability);
    sweep_flags.attach(cmd_stability);

    auto* cmd_compose = app.add_subcommand("compose", "canonical open-loop TF JSON");
    add_system_flags(cmd_compose, /*controller_optional=*/false);

    auto* cmd_fit = app.add_subcommand("fit", "fit a fractional model to measured data");
    std::string data_path, num_exps_csv, den_exps_csv = "0";
    std::string free_num_csv, free_den_csv, init_csv, pin_spec = "den:0", weighting = "unit";
    cmd_fit->add_option("--data", data_path, "measured CSV (omega,re,im[,weight])")
        ->required();
    cmd_fit->add_option("--num-exponents", num_exps_csv, "numerator exponents")->required();
    cmd_fit->add_option("--den-exponents", den_exps_csv, "denominator exponents")->required();
    cmd_fit->add_option("--free-num", free_num_csv, "indices of free numerator exponents");
    cmd_fit->add_option("--free-den", free_den_csv, "indices of free denominator exponents");
    cmd_fit->add_option("--init", init_csv, "initial values for the free exponents");
    cmd_fit->add_option("--pin", pin_spec, "pinned coefficient, e.g. den:0 or num:1");
    cmd_fit->add_option("--weighting", weighting, "unit | relative (1/|F|)");
    cmd_fit->add_option("-o,--output", output, "output file ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_bode) {
            const auto g = open_loop_from(plant_spec, controller_spec);
            const auto resp = ff::sweep(g, sweep_flags.build());
            std::ostringstream csv;
            ff::write_response_csv(resp, csv);
            write_text(output, csv.str());
            if (!svg_output.empty()) {
                const auto m = ff::margins(resp);
                std::ostringstream svg;
                ff::write_bode_svg(resp, svg, &m);
                write_text(svg_output, svg.str());
            }
        } else if (*cmd_nyquist) {
            const auto g = open_loop_from(plant_spec, controller_spec);
            const auto curve = ff::nyquist_curve(g, sweep_flags.build(), mirror);
            std::ostringstream csv;
            ff::write_nyquist_csv(curve, csv);
            write_text(output, csv.str());
            if (!svg_output.empty()) {
                std::ostringstream svg;
                ff::write_nyquist_svg(curve, svg);
                write_text(svg_output, svg.str());
            }
        } else if (*cmd_margins) {
            const auto g = open_loop_from(plant_spec, controller_spec);
            const auto m = ff::margins(ff::sweep(g, sweep_flags.build()));
            ff::json j = ff::to_json(m);
            j["config"] = sweep_flags.echo();
            write_text(output, j.dump(2) + "\n");
        } else if (*cmd_stability) {
            const auto g = open_loop_from(plant_spec, controller_spec);
            const auto v = ff::assess_stability(g, sweep_flags.build());
            ff::json j = ff::to_json(v);
            j["config"] = sweep_flags.echo();
            write_text(output, j.dump(2) + "\n");
            if (v.verdict == ff::Verdict::indeterminate) return 2;
        } else if (*cmd_compose) {
            const auto g = ff::compose_open_loop(load_controller(controller_spec),
                                                 load_tf(plant_spec));
            write_text(output, ff::to_json(g).dump(2) + "\n");
        } else if (*cmd_fit) {
            std::ifstream data_in(data_path);
            if (!data_in) throw std::runtime_error("cannot open " + data_path);
            ff::MeasuredResponse data = ff::read_measured_csv(data_in);
            if (weighting == "relative") {
                std::vector<double> w(data.omegas.size());
                for (size_t i = 0; i < w.size(); ++i) {
                    const double mag = std::abs(data.values[i]);
                    w[i] = mag > 0.0 ? 1.0 / mag : 0.0;
                }
                data = ff::MeasuredResponse(data.omegas, data.values, std::move(w));
            } else if (weighting != "unit") {
                throw std::runtime_error("unknown weighting: " + weighting);
            }

            ff::CoefficientRef pin;
            if (pin_spec.rfind("num:", 0) == 0)
                pin = {ff::Side::numerator, std::stoul(pin_spec.substr(4))};
            else if (pin_spec.rfind("den:", 0) == 0)
                pin = {ff::Side::denominator, std::stoul(pin_spec.substr(4))};
            else
                throw std::runtime_error("--pin must look like den:0 or num:1");

            ff::ModelStructure structure(parse_list(num_exps_csv),
                                         parse_list(den_exps_csv), pin);
            for (size_t i : parse_index_list(free_num_csv))
                structure.num_exponent_free.at(i) = true;
            for (size_t i : parse_index_list(free_den_csv))
                structure.den_exponent_free.at(i) = true;

            const bool any_free = !free_num_csv.empty() || !free_den_csv.empty();
            ff::FitResult result = any_free
                ? ff::fit_nonlinear(data, structure, parse_list(init_csv))
                : ff::fit_linear(data, structure);

            ff::json j = ff::to_json(result);
            j["config"] = {{"weighting", weighting}, {"pin", pin_spec}};
            write_text(output, j.dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        std::cerr << "fracfreq: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
