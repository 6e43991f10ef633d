// Command-line driver: torus-grid construction, cochain algebra, intersection
// images of geometric cochains, flow sampling, and the flow-comparison
// experiment with CSV/JSON reports.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cubeflow/chains.hpp"
#include "cubeflow/complex.hpp"
#include "cubeflow/geometry.hpp"
#include "cubeflow/products.hpp"

namespace {

using namespace cubeflow;

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

std::vector<int> parse_dims(const std::string& spec) {
    std::vector<int> dims;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) dims.push_back(std::stoi(part));
    return dims;
}

std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0, hi = 0, step = 1;
    char c1 = 0, c2 = 0;
    std::stringstream ss(spec);
    if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
        throw std::runtime_error("t-grid must look like lo:hi:step, e.g. 0:10:1");
    return ProductConfig::range_grid(lo, hi, step);
}

/// Square of the 3x3 torus grid at base (i, j), located by vertex ids.
int find_square33(const CubicalComplex& complex, int i, int j) {
    auto vid = [&](int a, int b) {
        std::string id = std::to_string(((a % 3) + 3) % 3) + "_" + std::to_string(((b % 3) + 3) % 3);
        for (int v = 0; v < complex.vertex_count(); ++v)
            if (complex.vertex_id(v) == id) return v;
        throw std::runtime_error("torus vertex " + id + " not found");
    };
    auto cube = complex.find_by_vertices({vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)});
    if (!cube || cube->dim != 2) throw std::runtime_error("torus square not found");
    return cube->index;
}

// The two closed curves of the introductory picture on the 3x3 torus: the
// diagonal cycle W through x1 + x2 = 0.3 and the horizontal cycle V at
// x2 = 0.6, both co-oriented with +1 crossing numbers.
nlohmann::json example_w_json(const CubicalComplex& complex) {
    nlohmann::json j;
    j["codim"] = 1;
    j["pieces"] = nlohmann::json::array();
    struct Spec {
        int bi, bj;
        std::vector<std::vector<double>> nodes;
    };
    std::vector<Spec> specs = {
        {0, 0, {{0.0, 0.3}, {0.15, 0.15}, {0.3, 0.0}}}, {0, 2, {{0.3, 1.0}, {1.0, 0.3}}},
        {1, 2, {{0.0, 0.3}, {0.3, 0.0}}},               {1, 1, {{0.3, 1.0}, {1.0, 0.3}}},
        {2, 1, {{0.0, 0.3}, {0.3, 0.0}}},               {2, 0, {{0.3, 1.0}, {1.0, 0.3}}},
    };
    for (const auto& s : specs) {
        nlohmann::json p;
        p["cube"] = find_square33(complex, s.bi, s.bj);
        p["base_axes"] = {1};
        p["nodes"] = s.nodes;
        p["cells"] = s.nodes.size() == 3 ? nlohmann::json({{0, 1}, {1, 2}}) : nlohmann::json({{0, 1}});
        p["normal_sign"] = 1;
        j["pieces"].push_back(p);
    }
    j["matching"] = {{{0, 1}, {1, 0}}, {{1, 1}, {2, 0}}, {{2, 1}, {3, 0}},
                     {{3, 1}, {4, 0}}, {{4, 1}, {5, 0}}, {{5, 1}, {0, 0}}};
    return j;
}

nlohmann::json example_v_json(const CubicalComplex& complex) {
    nlohmann::json j;
    j["codim"] = 1;
    j["pieces"] = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) {
        nlohmann::json p;
        p["cube"] = find_square33(complex, i, 0);
        p["base_axes"] = {1};
        p["nodes"] = {{0.0, 0.6}, {1.0, 0.6}};
        p["cells"] = {{0, 1}};
        p["normal_sign"] = 1;
        j["pieces"].push_back(p);
    }
    j["matching"] = {{{0, 1}, {1, 0}}, {{1, 1}, {2, 0}}, {{2, 1}, {0, 0}}};
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cubical cochain algebra, geometric cochains and the logistic flow comparison"};
    app.require_subcommand(1);

    // complex torus --dims 3,3 -o torus.json
    auto* complex_cmd = app.add_subcommand("complex", "build cubical complexes");
    auto* torus_cmd = complex_cmd->add_subcommand("torus", "torus grid cubulation");
    std::string dims_spec = "3,3", complex_out = "torus.json";
    torus_cmd->add_option("--dims", dims_spec, "comma-separated subdivisions per axis, each >= 3");
    torus_cmd->add_option("-o,--output", complex_out, "output file");

    // cup A.json B.json --complex torus.json [-o out.json]
    auto* cup_cmd = app.add_subcommand("cup", "cup product of two cochains");
    std::string cup_a, cup_b, cup_complex, cup_out;
    cup_cmd->add_option("a", cup_a, "first cochain json")->required();
    cup_cmd->add_option("b", cup_b, "second cochain json")->required();
    cup_cmd->add_option("--complex", cup_complex, "complex json")->required();
    cup_cmd->add_option("-o,--output", cup_out, "output cochain json (stdout if omitted)");

    // cohomology torus.json
    auto* coh_cmd = app.add_subcommand("cohomology", "per-degree betti numbers and torsion (CSV)");
    std::string coh_complex;
    coh_cmd->add_option("complex", coh_complex, "complex json")->required();

    // intersect W.json --complex torus.json -o cIW.json
    auto* int_cmd = app.add_subcommand("intersect", "intersection image of a geometric cochain");
    std::string int_w, int_complex, int_out;
    int_cmd->add_option("w", int_w, "geometric cochain json")->required();
    int_cmd->add_option("--complex", int_complex, "complex json")->required();
    int_cmd->add_option("-o,--output", int_out, "output cochain json (stdout if omitted)");

    // flow W.json --t 5.0 --complex torus.json -o Wt.json
    auto* flow_cmd = app.add_subcommand("flow", "sample the flowed carrier of a geometric cochain");
    std::string flow_w, flow_complex, flow_out;
    double flow_t = 0.0;
    flow_cmd->add_option("w", flow_w, "geometric cochain json")->required();
    flow_cmd->add_option("--t", flow_t, "flow time")->required();
    flow_cmd->add_option("--complex", flow_complex, "complex json")->required();
    flow_cmd->add_option("-o,--output", flow_out, "output json (stdout if omitted)");

    // verify-main --complex torus.json --w W.json --v V.json --t-grid 0:10:1 --out report.csv
    auto* verify_cmd = app.add_subcommand("verify-main", "flow-comparison sweep over a time grid");
    std::string vm_complex, vm_w, vm_v, vm_out = "report.csv", vm_grid = "0:10:1";
    verify_cmd->add_option("--complex", vm_complex, "complex json")->required();
    verify_cmd->add_option("--w", vm_w, "first geometric cochain json")->required();
    verify_cmd->add_option("--v", vm_v, "second geometric cochain json")->required();
    verify_cmd->add_option("--t-grid", vm_grid, "time grid lo:hi:step");
    verify_cmd->add_option("--out", vm_out, "CSV report path (a .json mirror is written too)");

    // example figure1 -o dir
    auto* example_cmd = app.add_subcommand("example", "write a ready-made experiment input set");
    std::string example_name = "figure1", example_dir = ".";
    example_cmd->add_option("name", example_name, "example name (figure1)");
    example_cmd->add_option("-o,--output-dir", example_dir, "directory for the generated files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*torus_cmd) {
            auto complex = build_torus_grid(parse_dims(dims_spec));
            auto report = complex.validate();
            if (!report.ok()) throw std::runtime_error("built complex failed validation:\n" + report.str());
            write_json(complex_out, complex.to_json());
            std::cout << "wrote " << complex_out << " (" << complex.vertex_count() << " vertices, "
                      << complex.cube_count() << " cubes)\n";
        } else if (*cup_cmd) {
            auto complex = CubicalComplex::load(read_json(cup_complex));
            auto a = IntCochain::from_json(complex, read_json(cup_a));
            auto b = IntCochain::from_json(complex, read_json(cup_b));
            auto product = cup(a, b);
            if (cup_out.empty()) std::cout << product.to_json().dump(2) << "\n";
            else write_json(cup_out, product.to_json());
        } else if (*coh_cmd) {
            auto complex = CubicalComplex::load(read_json(coh_complex));
            std::cout << "degree,betti,torsion\n";
            auto groups = cohomology(complex);
            for (std::size_t k = 0; k < groups.size(); ++k) {
                std::cout << k << "," << groups[k].betti << ",";
                for (std::size_t i = 0; i < groups[k].torsion.size(); ++i)
                    std::cout << (i ? ";" : "") << groups[k].torsion[i];
                std::cout << "\n";
            }
        } else if (*int_cmd) {
            auto complex = CubicalComplex::load(read_json(int_complex));
            auto w = GeoCochain::from_json(complex, read_json(int_w));
            auto report = validate_transverse(w);
            if (!report.transverse())
                throw std::runtime_error("cochain is not transverse:\n" + report.str());
            auto image = intersect_cochain(w);
            if (int_out.empty()) std::cout << image.to_json().dump(2) << "\n";
            else write_json(int_out, image.to_json());
        } else if (*flow_cmd) {
            auto complex = CubicalComplex::load(read_json(flow_complex));
            auto w = GeoCochain::from_json(complex, read_json(flow_w));
            nlohmann::json out;
            out["t"] = flow_t;
            out["pieces"] = nlohmann::json::array();
            for (auto piece : w.pieces) {
                piece = refine_piece(refine_piece(piece));  // denser sampling
                nlohmann::json jp;
                jp["cube"] = piece.cube;
                jp["samples"] = nlohmann::json::array();
                for (const auto& node : piece.nodes) jp["samples"].push_back(flow_point(node, flow_t));
                out["pieces"].push_back(jp);
            }
            if (flow_out.empty()) std::cout << out.dump(2) << "\n";
            else write_json(flow_out, out);
        } else if (*verify_cmd) {
            auto complex = CubicalComplex::load(read_json(vm_complex));
            auto w = GeoCochain::from_json(complex, read_json(vm_w));
            auto v = GeoCochain::from_json(complex, read_json(vm_v));
            for (const auto* c : {&w, &v}) {
                auto report = validate_transverse(*c);
                if (!report.closed_over_skeleton())
                    throw std::runtime_error("input cochain rejected:\n" + report.str());
            }
            ProductConfig cfg;
            cfg.t_grid = parse_grid(vm_grid);
            auto report = threshold_sweep(w, v, cfg);
            std::ofstream csv(vm_out);
            write_report_csv(report, csv);
            std::string json_path = vm_out;
            auto dot = json_path.rfind('.');
            json_path = (dot == std::string::npos ? json_path : json_path.substr(0, dot)) + ".json";
            write_json(json_path, report_to_json(report));
            if (report.found()) {
                std::cout << "T_found = " << *report.threshold << "; wrote " << vm_out << " and "
                          << json_path << "\n";
                return 0;
            }
            std::cout << "no threshold on the grid; wrote " << vm_out << " and " << json_path << "\n";
            return 1;
        } else if (*example_cmd) {
            if (example_name != "figure1") throw std::runtime_error("unknown example: " + example_name);
            std::filesystem::create_directories(example_dir);
            auto complex = build_torus_grid({3, 3});
            write_json(example_dir + "/torus.json", complex.to_json());
            write_json(example_dir + "/W.json", example_w_json(complex));
            write_json(example_dir + "/V.json", example_v_json(complex));
            std::cout << "wrote " << example_dir << "/torus.json, W.json, V.json\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
