#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "commands.hpp"

// acbm: inspect scene files describing an almost contact manifold with
// B-metric, its fundamental tensor and conformal deformations of the pair.
//
//   acbm validate   <scene>   check the structure axioms and the tensor source
//   acbm classify   <scene>   decompose the tensor over the basic classes
//   acbm connection <scene>   canonical connection, torsion and its class
//   acbm conformal  <scene>   transform the scene, optionally checking the
//                             transformation laws and what G0 preserves

namespace {

double tol_from_env() {
    if (const char* e = std::getenv("ACBM_TOL")) {
        char* end = nullptr;
        double v = std::strtod(e, &end);
        if (end != e && v > 0) return v;
        std::cerr << "warning: ignoring unusable ACBM_TOL='" << e << "'\n";
    }
    return acbm::kDefaultTol;
}

struct OutputOptions {
    bool as_json = false;
    std::string out_path;
};

int emit(const acbm::cli::Outcome& oc, const OutputOptions& oo) {
    if (oo.as_json) {
        std::cout << oc.report.dump(2) << "\n";
    } else {
        for (const auto& line : oc.lines) std::cout << line << "\n";
    }
    if (!oo.out_path.empty()) {
        std::ofstream f(oo.out_path, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write '" << oo.out_path << "'\n";
            return acbm::cli::kExitValidation;
        }
        f << oc.report.dump(2) << "\n";
    }
    return oc.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"almost contact B-metric structures: validation, classification, "
                 "canonical connections and conformal transformations"};
    app.require_subcommand(1);

    acbm::cli::Options opt;
    opt.tol = tol_from_env();
    OutputOptions oo;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("scene", opt.scene_path, "scene file")->required();
        sub->add_option("--tol", opt.tol, "residual tolerance (default ACBM_TOL or 1e-9)");
        sub->add_flag("--json", oo.as_json, "print the JSON report instead of text");
        sub->add_option("--out", oo.out_path, "also write the JSON report to a file");
    };

    CLI::App* validate = app.add_subcommand("validate", "check axioms and admissibility");
    add_common(validate);
    validate->add_flag("--g0-only", opt.g0_only,
                       "fail when conformal data is not torsion-preserving");

    CLI::App* classify = app.add_subcommand("classify", "basic-class decomposition");
    add_common(classify);

    CLI::App* connection =
        app.add_subcommand("connection", "canonical connection and torsion analysis");
    add_common(connection);

    CLI::App* conformal =
        app.add_subcommand("conformal", "apply the scene's conformal transformation");
    add_common(conformal);
    conformal->add_flag("--check-invariance", opt.check_invariance,
                        "verify the transformation laws and G0 preservation");
    conformal->add_flag("--g0-only", opt.g0_only,
                        "restrict to torsion-preserving group elements");
    conformal->add_option("--trials", opt.trials, "extra random group elements to check");
    conformal->add_option("--seed", opt.seed, "seed for the random group elements");

    CLI11_PARSE(app, argc, argv);

    try {
        acbm::cli::Outcome oc;
        if (validate->parsed())
            oc = acbm::cli::cmd_validate(opt);
        else if (classify->parsed())
            oc = acbm::cli::cmd_classify(opt);
        else if (connection->parsed())
            oc = acbm::cli::cmd_connection(opt);
        else
            oc = acbm::cli::cmd_conformal(opt);
        return emit(oc, oo);
    } catch (const acbm::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return acbm::cli::kExitParse;
    } catch (const acbm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return acbm::cli::kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return acbm::cli::kExitValidation;
    }
}
