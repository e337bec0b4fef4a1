// ejspec command line front end: JSON in, JSON out, one subcommand per
// library entry point.  Exit codes: 0 success, 2 validation error, 3
// numerical failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "ejspec/io.hpp"
#include "ejspec/kl_analysis.hpp"
#include "ejspec/oracle.hpp"
#include "ejspec/spectral_calculus.hpp"
#include "ejspec/transfer.hpp"

namespace {

using nlohmann::json;
using namespace ejspec;

struct CommonFlags {
    std::string input;
    std::string output = "-";
    double tol = 1e-6;
    double tau_group = -1.0;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags, double default_tol) {
    flags.tol = default_tol;
    cmd->add_option("--input", flags.input, "input JSON file")->required();
    cmd->add_option("--output", flags.output, "output file, - for stdout");
    cmd->add_option("--tol", flags.tol, "numerical tolerance");
    cmd->add_option("--tau-group", flags.tau_group,
                    "eigenvalue grouping tolerance; negative selects 1e-8*(1+||x||)");
    cmd->add_option("--seed", flags.seed, "random seed for sampling commands");
}

json load_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open input file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& err) {
        throw ValidationError(std::string("input is not valid JSON: ") + err.what());
    }
    return doc;
}

const json& field(const json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key))
        throw ValidationError(std::string("input is missing field \"") + key + "\"");
    return doc[key];
}

double number_field(const json& doc, const char* key) {
    const json& node = field(doc, key);
    if (!node.is_number()) throw ValidationError(std::string("field \"") + key + "\" must be a number");
    return node.get<double>();
}

std::vector<double> vector_field(const json& doc, const char* key) {
    const json& node = field(doc, key);
    if (!node.is_array()) throw ValidationError(std::string("field \"") + key + "\" must be an array");
    std::vector<double> out;
    for (const auto& entry : node) {
        if (!entry.is_number())
            throw ValidationError(std::string("field \"") + key + "\" must hold numbers");
        out.push_back(entry.get<double>());
    }
    return out;
}

json vector_to_json(std::span<const double> values) {
    json out = json::array();
    for (double value : values) out.push_back(value);
    return out;
}

void emit(const json& doc, const std::string& output) {
    std::string text = dump_json(doc);
    if (output == "-") {
        std::cout << text;
    } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw ValidationError("cannot open output file '" + output + "'");
        out << text;
    }
}

json run_decompose(const json& in, const CommonFlags& flags, bool reconstruct) {
    if (reconstruct) {
        JordanFrame frame = frame_from_json(field(in, "frame"));
        auto lambda = vector_field(in, "lambda");
        return {{"element", element_to_json(diag_build(lambda, frame))}};
    }
    Element x = element_from_json(field(in, "element"));
    auto dec = spectral_decompose(x, flags.tol);
    return {{"frame", frame_to_json(dec.frame)}, {"lambda", vector_to_json(dec.lambda)}};
}

json run_commute(const json& in, const CommonFlags& flags) {
    Element x = element_from_json(field(in, "x"));
    Element y = element_from_json(field(in, "y"));
    return {{"commutes", operator_commute(x, y, flags.tol)}};
}

json run_dirderiv(const json& in, const CommonFlags& flags) {
    Element x = element_from_json(field(in, "x"));
    Element z = element_from_json(field(in, "z"));
    return {{"derivative", vector_to_json(eigen_dir_derivative(x, z, flags.tau_group))}};
}

json run_majorize(const json& in, const CommonFlags& flags) {
    auto u = vector_field(in, "u");
    auto v = vector_field(in, "v");
    return {{"majorizes", majorizes(u, v, flags.tol)}};
}

json run_subdiff(const json& in, const CommonFlags& flags) {
    auto fid = SymmetricFunctionId::parse(field(in, "function").get<std::string>());
    auto kind = subdiff_kind_from_string(field(in, "kind").get<std::string>());
    Element x = element_from_json(field(in, "x"));
    Element s = element_from_json(field(in, "s"));
    auto report = spectral_subdiff_member(fid, kind, x, s, flags.tol, flags.tau_group);
    json out{{"commutes", report.commutes},
             {"kind", to_string(report.kind)},
             {"member", report.member},
             {"diag_vector", nullptr},
             {"frame_used", nullptr}};
    if (report.diag_vector) out["diag_vector"] = vector_to_json(*report.diag_vector);
    if (report.frame_used) out["frame_used"] = frame_to_json(*report.frame_used);
    return out;
}

json run_lambda_k(const json& in, const CommonFlags& flags) {
    const json& knode = field(in, "k");
    if (!knode.is_number_integer()) throw ValidationError("field \"k\" must be an integer");
    auto kind = subdiff_kind_from_string(field(in, "kind").get<std::string>());
    Element x = element_from_json(field(in, "x"));
    Element s = element_from_json(field(in, "s"));
    auto report = lambda_k_subdiff_query(knode.get<int>(), kind, x, s, flags.tol, flags.tau_group);
    return {{"branch", report.branch}, {"member", report.member}};
}

json run_kl(const json& in, const CommonFlags& flags) {
    auto fid = SymmetricFunctionId::parse(field(in, "function").get<std::string>());
    Element x = element_from_json(field(in, "x"));
    double alpha = number_field(in, "alpha");
    double c = number_field(in, "c");
    double nu = number_field(in, "nu");
    double radius = number_field(in, "radius");
    int n_samples = static_cast<int>(number_field(in, "n_samples"));
    auto report = kl_check(fid, x, alpha, c, nu, radius, n_samples, flags.seed, flags.tol);

    json out{{"samples_tested", report.samples_tested},
             {"violations", report.violations},
             {"min_margin", nullptr},
             {"fitted_exponent", nullptr}};
    if (report.min_margin) out["min_margin"] = *report.min_margin;
    if (in.contains("fit_radii")) {
        auto radii = vector_field(in, "fit_radii");
        int fit_samples = in.contains("fit_samples")
                              ? static_cast<int>(number_field(in, "fit_samples"))
                              : n_samples;
        auto fit = kl_exponent_fit(fid, x, radii, fit_samples, flags.seed, nu);
        out["fitted_exponent"] = {{"degenerate", fit.degenerate},
                                  {"estimate", fit.estimate},
                                  {"residual", fit.residual},
                                  {"samples_used", fit.samples_used}};
    }
    return out;
}

json run_probe(const json& in, const CommonFlags& flags) {
    auto fid = SymmetricFunctionId::parse(field(in, "function").get<std::string>());
    double epsilon = number_field(in, "epsilon");
    auto radii = vector_field(in, "radii");
    int n_dirs = in.contains("n_dirs") ? static_cast<int>(number_field(in, "n_dirs")) : 512;

    json out{{"epsilon", epsilon}, {"passed", false}, {"witness", nullptr},
             {"worst_violation", nullptr}};
    if (in.contains("u")) {
        auto u = vector_field(in, "u");
        auto d = vector_field(in, "d");
        auto verdict = oracle::regular_subgradient_probe(
            [&](std::span<const double> v) {
                return value(fid, std::vector<double>(v.begin(), v.end()));
            },
            u, d, epsilon, radii, n_dirs, flags.seed);
        out["passed"] = verdict.passed;
        out["worst_violation"] = verdict.worst_violation;
        if (verdict.witness) out["witness"] = vector_to_json(*verdict.witness);
    } else {
        Element x = element_from_json(field(in, "x"));
        Element s = element_from_json(field(in, "s"));
        auto verdict = oracle::regular_subgradient_probe_element(
            [&](const Element& y) { return spectral_value(fid, y); }, x, s, epsilon, radii,
            n_dirs, flags.seed);
        out["passed"] = verdict.passed;
        out["worst_violation"] = verdict.worst_violation;
        if (verdict.witness) out["witness"] = element_to_json(*verdict.witness);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral calculus over Euclidean Jordan algebras"};
    app.require_subcommand(1);

    CommonFlags decompose_flags, commute_flags, dirderiv_flags, majorize_flags, subdiff_flags,
        lambdak_flags, kl_flags, probe_flags;
    bool reconstruct = false;

    auto* decompose = app.add_subcommand("decompose", "eigenvalues and a Jordan frame");
    add_common(decompose, decompose_flags, 1e-8);
    decompose->add_flag("--reconstruct", reconstruct,
                        "rebuild the element from a decompose output document");

    auto* commute = app.add_subcommand("commute", "operator commutation test");
    add_common(commute, commute_flags, 1e-8);

    auto* dirderiv = app.add_subcommand("dirderiv", "directional derivative of the eigenvalue map");
    add_common(dirderiv, dirderiv_flags, 1e-8);

    auto* majorize = app.add_subcommand("majorize", "majorization test");
    add_common(majorize, majorize_flags, 1e-9);

    auto* subdiff_cmd = app.add_subcommand("subdiff", "spectral subdifferential membership");
    add_common(subdiff_cmd, subdiff_flags, 1e-6);

    auto* lambdak = app.add_subcommand("lambda-k", "k-th largest eigenvalue subdifferentials");
    add_common(lambdak, lambdak_flags, 1e-6);

    auto* kl = app.add_subcommand("kl", "Kurdyka-Lojasiewicz inequality probe");
    add_common(kl, kl_flags, 1e-8);

    auto* probe = app.add_subcommand("probe", "regular subgradient sampling probe");
    add_common(probe, probe_flags, 1e-6);

    CLI11_PARSE(app, argc, argv);

    try {
        if (decompose->parsed())
            emit(run_decompose(load_input(decompose_flags.input), decompose_flags, reconstruct),
                 decompose_flags.output);
        else if (commute->parsed())
            emit(run_commute(load_input(commute_flags.input), commute_flags),
                 commute_flags.output);
        else if (dirderiv->parsed())
            emit(run_dirderiv(load_input(dirderiv_flags.input), dirderiv_flags),
                 dirderiv_flags.output);
        else if (majorize->parsed())
            emit(run_majorize(load_input(majorize_flags.input), majorize_flags),
                 majorize_flags.output);
        else if (subdiff_cmd->parsed())
            emit(run_subdiff(load_input(subdiff_flags.input), subdiff_flags),
                 subdiff_flags.output);
        else if (lambdak->parsed())
            emit(run_lambda_k(load_input(lambdak_flags.input), lambdak_flags),
                 lambdak_flags.output);
        else if (kl->parsed())
            emit(run_kl(load_input(kl_flags.input), kl_flags), kl_flags.output);
        else if (probe->parsed())
            emit(run_probe(load_input(probe_flags.input), probe_flags), probe_flags.output);
    } catch (const EigenSolverFailure& err) {
        std::cerr << "numerical failure: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
