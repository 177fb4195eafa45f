// sgeo: command-line front end of the verification runner.
//
//   sgeo check run.json --report out.json --jobs 2
//   sgeo distance --geometry circle --lambda 128 --from 0 --to 1.5708
//   sgeo dixmier --geometry torus --p 2 --lambda 32
//   sgeo list

#include "sgeo/runner.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace sgeo;
using sgeo::cli::json;

namespace {

Point parse_point(const std::string& s) {
    Point x{0.0, 0.0, 0.0};
    std::stringstream ss(s);
    std::string tok;
    std::size_t i = 0;
    while (std::getline(ss, tok, ',')) {
        if (i == 3) throw cli::ConfigError("point '" + s + "' has more than 3 coordinates");
        try {
            x[i++] = std::stod(tok);
        } catch (const std::exception&) {
            throw cli::ConfigError("cannot read coordinate '" + tok + "'");
        }
    }
    return x;
}

Model make_model(const GeometrySpec& g) {
    try {
        return build(g);
    } catch (const Error& e) {
        throw cli::ConfigError(e.what());
    }
}

void emit(const json& j, const std::string& path) {
    if (path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream os(path);
    if (!os) throw Error("cannot write report '" + path + "'");
    os << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical checks for truncated spectral triples"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string report_path;
    std::optional<std::uint64_t> seed;
    int jobs = 0;
    app.add_option("--report", report_path, "write the JSON report here");
    app.add_option("--seed", seed, "seed for randomized checks and corruptions");
    app.add_option("--jobs", jobs, "number of checks run in parallel")->check(CLI::NonNegativeNumber);

    auto* check = app.add_subcommand("check", "run the checks listed in a config file");
    std::string config_path;
    check->add_option("config", config_path, "JSON config")->required();

    GeometrySpec geo;
    auto add_geometry = [&geo](CLI::App* sub) {
        sub->add_option("--geometry", geo.kind, "circle | torus | interval | product")->required();
        sub->add_option("--p", geo.p, "dimension");
        sub->add_option("--lambda", geo.lambda, "truncation");
    };

    auto* dist = app.add_subcommand("distance", "certified lower bound on the spectral distance");
    add_geometry(dist);
    std::string from = "0", to = "1";
    int budget = 200, bandwidth = 0;
    dist->add_option("--from", from, "comma-separated coordinates")->required();
    dist->add_option("--to", to, "comma-separated coordinates")->required();
    dist->add_option("--budget", budget, "ascent iterations");
    dist->add_option("--bandwidth", bandwidth, "witness bandwidth, 0 for the default");

    auto* dix = app.add_subcommand("dixmier", "Dixmier trace of T |D|^-p");
    add_geometry(dix);
    std::string op = "identity";
    dix->add_option("--operator", op, "identity or a generator name a (T = a* a)");

    auto* list = app.add_subcommand("list", "geometries, checks and default tolerances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) {
            std::cout << cli::list_targets();
            return 0;
        }
        if (check->parsed()) {
            auto cfg = cli::load_config(config_path);
            if (seed) cfg.seed = *seed;
            if (jobs > 0) cfg.jobs = jobs;
            if (!report_path.empty()) cfg.output_path = report_path;
            const auto rep = cli::run(cfg);
            for (const auto& c : rep.body["checks"]) std::cout << c["verdict"].get<std::string>() << "  " << c["name"].get<std::string>() << "\n";
            std::cout << "pass " << rep.passed << "  fail " << rep.failed << "  inconclusive " << rep.inconclusive << "  hash "
                      << rep.body["determinism_hash"].get<std::string>() << "\n";
            if (!cfg.output_path.empty()) cli::write_report(rep, cfg.output_path);
            return rep.any_fail() ? 1 : 0;
        }
        if (geo.kind == "circle" || geo.kind == "interval") geo.p = std::min(geo.p, 1);
        const Model m = make_model(geo);
        if (dist->parsed()) {
            DistanceOptions o;
            o.budget = budget;
            o.bandwidth = bandwidth;
            const Point x = parse_point(from), y = parse_point(to);
            const auto d = connes_distance(x, y, m.triple, o);
            json j{{"geometry", cli::to_json(geo)},
                   {"from", x},
                   {"to", y},
                   {"lower_bound", d.lower_bound},
                   {"geodesic", m.triple.space->distance(x, y)},
                   {"constraint_slack", d.constraint_slack},
                   {"iterations", d.iterations},
                   {"converged", d.converged},
                   {"start", d.start}};
            emit(j, report_path);
            return d.constraint_slack < 0.0 ? 1 : 0;
        }
        if (dix->parsed()) {
            const auto& t = m.triple;
            MatrixOperator x = MatrixOperator::identity(t.hilbert_dim());
            if (op != "identity") {
                const auto& a = t.generator(op).op;
                x = MatrixOperator((a.adjoint() * a).sparse(), true);
            }
            const auto e = dixmier_estimate(x, t);
            json j{{"geometry", cli::to_json(geo)},
                   {"operator", op},
                   {"value", e.value},
                   {"estimator_i", e.extras.count("estimator_i") ? e.extras.at("estimator_i") : std::nan("")},
                   {"drift_per_doubling", e.trend_slope},
                   {"converged", e.converged}};
            emit(j, report_path);
            return 0;
        }
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
