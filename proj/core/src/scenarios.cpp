#include "poholab/scenarios.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "poholab/blowup.hpp"
#include "poholab/bubbles.hpp"
#include "poholab/elliptic.hpp"
#include "poholab/errors.hpp"
#include "poholab/green.hpp"
#include "poholab/io.hpp"
#include "poholab/pohozaev.hpp"

namespace poholab::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": " + it->second);
    }
}

int RunConfig::get_int(const std::string& key, int fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for " + key + ": " + it->second);
    }
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
    std::vector<double> out;
    auto it = kv.find(key);
    if (it == kv.end()) return out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("config: bad list entry for " + key + ": " + tok);
        }
    }
    return out;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line, section;
    while (std::getline(ss, line)) {
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config: expected key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key in line: " + line);
        cfg.kv[section.empty() ? key : section + "." + key] = value;
    }
    cfg.scenario = cfg.get("scenario");
    cfg.out_dir = cfg.get("output.dir", cfg.get("out", "out"));
    cfg.seed = static_cast<std::uint64_t>(cfg.get_double("output.seed", cfg.get_double("seed", 0)));
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void validate(const RunConfig& config) {
    static const std::set<std::string> scenarios{
        "green",          "pohozaev", "radial-solve", "extract",
        "construct-radial", "construct-two-bubble", "sweep"};
    if (!scenarios.count(config.scenario))
        throw ConfigError("config: unknown or missing scenario '" + config.scenario + "'");

    auto require = [&](const std::string& key) {
        if (!config.has(key)) throw ConfigError("config: scenario requires key " + key);
    };
    if (config.scenario == "sweep") {
        require("sweep.mode");
        require("sweep.eps");
        const auto eps = config.get_list("sweep.eps");
        if (eps.size() < 2) throw ConfigError("config: sweep.eps needs at least two values");
        for (std::size_t i = 1; i < eps.size(); ++i)
            if (eps[i] >= eps[i - 1] || eps[i] <= 0.0)
                throw ConfigError("config: sweep.eps must be positive, strictly decreasing");
        const std::string mode = config.get("sweep.mode");
        if (mode != "radial" && mode != "two-bubble")
            throw ConfigError("config: sweep.mode must be radial or two-bubble");
    } else if (config.scenario == "construct-radial" ||
               config.scenario == "construct-two-bubble") {
        require("construct.eps");
        if (config.get_double("construct.eps", 0.0) <= 0.0)
            throw ConfigError("config: construct.eps must be positive");
    } else if (config.scenario == "extract") {
        require("extract.field_csv");
    } else if (config.scenario == "pohozaev") {
        require("pohozaev.field");
    }
    // Referenced tolerances must be positive.
    for (const char* key : {"solver.tol", "green.spacing", "pohozaev.boundary_trace_tol"}) {
        if (config.has(key) && config.get_double(key, 1.0) <= 0.0)
            throw ConfigError(std::string("config: ") + key + " must be positive");
    }
}

// ============================================================================
// Builders from config
// ============================================================================

namespace {

Domain domain_from(const RunConfig& c) {
    const std::string kind = c.get("domain.kind", c.get("domain", "unit_ball"));
    if (kind == "unit_ball") return Domain::unit_ball(c.get_double("domain.radius", 1.0));
    if (kind == "star_shaped") {
        const std::vector<double> coeffs = c.get_list("domain.coeffs");
        if (coeffs.empty())
            throw ConfigError("config: star_shaped domain needs domain.coeffs (Legendre in z)");
        Domain d = Domain::star_shaped([coeffs](const Vec3& w) {
            // Axisymmetric Legendre expansion in cos(theta) = w.z.
            double p0 = 1.0, p1 = w.z, rho = 0.0;
            for (std::size_t l = 0; l < coeffs.size(); ++l) {
                if (l == 0) {
                    rho += coeffs[l];
                } else if (l == 1) {
                    rho += coeffs[l] * p1;
                } else {
                    const double p2 = ((2.0 * l - 1.0) * w.z * p1 - (l - 1.0) * p0) / l;
                    rho += coeffs[l] * p2;
                    p0 = p1;
                    p1 = p2;
                }
            }
            return rho;
        });
        const StarShapeCertificate cert = check_star_shaped(d);
        if (!cert.passed)
            throw ConfigError("config: domain is not a valid star-shaped graph: " +
                              cert.failure_reason);
        return d;
    }
    throw ConfigError("config: unknown domain kind " + kind);
}

CoefficientH coefficient_from(const RunConfig& c) {
    const std::string kind = c.get("h.kind", "constant");
    if (kind == "constant") return CoefficientH::constant(c.get_double("h.value", 0.0));
    if (kind == "radial_poly") {
        auto coeffs = c.get_list("h.coeffs");
        if (coeffs.empty()) throw ConfigError("config: h.coeffs required for radial_poly");
        return CoefficientH::radial_polynomial(std::move(coeffs));
    }
    if (kind == "radial_table") {
        const std::string path = c.get("h.csv");
        if (path.empty()) throw ConfigError("config: h.csv required for radial_table");
        return CoefficientH::radial_table(read_radial_csv(path));
    }
    throw ConfigError("config: unknown h kind " + kind);
}

Vec3 vec_from(const RunConfig& c, const std::string& key, Vec3 fallback) {
    if (!c.has(key)) return fallback;
    std::stringstream ss(c.get(key));
    std::string tok;
    Vec3 v{};
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(ss, tok, ',')) throw ConfigError("config: " + key + " needs x,y,z");
        v[i] = std::stod(trim(tok));
    }
    return v;
}

struct StageTimer {
    RunManifest& manifest;
    std::string name;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    StageTimer(RunManifest& m, std::string n) : manifest(m), name(std::move(n)) {}
    ~StageTimer() {
        manifest.wall_times_s[name] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string out_path(const RunConfig& c, RunManifest& m, const std::string& name) {
    namespace fs = std::filesystem;
    fs::create_directories(c.out_dir);
    m.output_files.push_back(name);
    return (fs::path(c.out_dir) / name).string();
}

json expansion_json(const GreenExpansion& e) {
    return json{{"source", {e.source.x, e.source.y, e.source.z}},
                {"mass", e.mass},
                {"grad_regular", {e.grad_regular.x, e.grad_regular.y, e.grad_regular.z}},
                {"normalization", e.normalization == GreenNorm::Scaled ? "scaled" : "unit"},
                {"h_at_source", e.h_at_source},
                {"fit_residual", e.fit_residual}};
}

void run_green(const RunConfig& c, RunManifest& m) {
    StageTimer t(m, "green");
    const Domain domain = domain_from(c);
    const CoefficientH h = coefficient_from(c);
    const Vec3 source = vec_from(c, "green.source", {0, 0, 0});
    GreenOptions opts;
    opts.spacing = c.get_double("green.spacing", 1.0 / 32.0);
    opts.solver_tol = c.get_double("solver.tol", 1e-9);
    const GreenField g = solve_green(h, source, domain, opts);
    const GreenExpansion e = extract_expansion(g, h);
    write_text_atomic(out_path(c, m, "expansion.json"), expansion_json(e).dump(2) + "\n");

    if (g.path() == GreenField::Path::Radial || g.path() == GreenField::Path::ClosedForm) {
        const auto field = ScalarFieldRadial::sample(
            [&](double r) { return g.value_radial(r); },
            RadialGrid::graded(domain.ball_radius() * (1 - 1e-9), 2000, 1e-5));
        write_radial_csv(field, out_path(c, m, "green_field.csv"));
    } else {
        CsvTable tab;
        tab.header = {"r", "direction", "value"};
        for (const char* dir : {"x", "y", "z"}) {
            for (int i = 1; i <= 64; ++i) {
                Vec3 d{dir[0] == 'x' ? 1.0 : 0.0, dir[0] == 'y' ? 1.0 : 0.0,
                       dir[0] == 'z' ? 1.0 : 0.0};
                const double rr = domain.boundary_radius(d) * i / 66.0;
                const Vec3 y = source + d * rr;
                if (!domain.contains(y)) continue;
                if (norm(y - source) < 1e-6) continue;
                tab.add_row({format_double(rr), dir, format_double(g.value(y))});
            }
        }
        write_csv_atomic(out_path(c, m, "green_rays.csv"), tab);
    }
}

int run_pohozaev(const RunConfig& c, RunManifest& m) {
    StageTimer t(m, "pohozaev");
    const Domain domain = domain_from(c);
    const CoefficientH h = coefficient_from(c);

    ScalarFieldRadial u;
    const std::string source = c.get("pohozaev.field");
    if (source == "zero") {
        u = ScalarFieldRadial::sample([](double) { return 0.0; },
                                      RadialGrid::graded(domain.ball_radius(), 512), 0.0);
    } else if (source == "shooting") {
        const RadialSolveOutcome out = find_radial_solution(h);
        if (!out.solution)
            throw NumericError("pohozaev: no radial solution found for this h");
        u = *out.solution;
    } else if (source.rfind("csv:", 0) == 0) {
        u = read_radial_csv(source.substr(4));
    } else {
        throw ConfigError("config: pohozaev.field must be zero | shooting | csv:PATH");
    }

    PohozaevOptions opts;
    opts.radial_quadrature_nodes = c.get_int("pohozaev.nodes", 10000);
    opts.boundary_trace_tol = c.get_double("pohozaev.boundary_trace_tol", 1e-5);

    CsvTable tab;
    tab.header = {"identity_id", "lhs", "rhs", "residual"};
    const PohozaevReport p1 = evaluate_identity_P1(u, h, domain, opts);
    tab.add_row({p1.identity_id, format_double(p1.lhs), format_double(p1.rhs),
                 format_double(p1.identity_residual)});
    const PohozaevReport p3 = evaluate_identity_P3(u, h, domain, opts);
    tab.add_row({p3.identity_id, format_double(p3.lhs), format_double(p3.rhs),
                 format_double(p3.identity_residual)});
    FieldView view = make_view(u);
    PohozaevOptions p4opts = opts;
    p4opts.normal_step = 2e-3;
    const PohozaevReportVec p4 = evaluate_identity_P4(view, h, domain, p4opts);
    const char* comp_names[3] = {"P4x", "P4y", "P4z"};
    for (int comp = 0; comp < 3; ++comp)
        tab.add_row({comp_names[comp], format_double(p4.lhs[comp]),
                     format_double(p4.rhs[comp]), format_double(p4.identity_residual)});

    int status = 0;
    const int n_sum = c.get_int("pohozaev.green_sum_n", 0);
    if (n_sum > 0) {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> coord(-0.5, 0.5);
        std::uniform_real_distribution<double> weight(0.05, 1.0);
        BubbleConfiguration cfg;
        for (int i = 0; i < n_sum; ++i) {
            Vec3 p{coord(rng), coord(rng), coord(rng)};
            cfg.points.push_back(p);
            cfg.weights.push_back(weight(rng));
        }
        GreenOptions gopts;
        gopts.normalization = GreenNorm::Unit;
        gopts.spacing = c.get_double("green.spacing", 1.0 / 24.0);
        std::vector<GreenField> fields;
        std::vector<GreenExpansion> exps;
        ExpansionFitOptions fit;
        fit.residual_tol = 0.1;
        for (const Vec3& p : cfg.points) {
            fields.push_back(solve_green(h, p, domain, gopts));
            exps.push_back(extract_expansion(fields.back(), h, fit));
        }
        const double sum = green_pohozaev_sum(cfg, exps, fields);
        tab.add_row({"greensum", format_double(sum), "0", format_double(sum)});
        if (sum >= 0.0) {
            m.error = "green_pohozaev_sum is not negative";
            status = 3;
        }
    }
    write_csv_atomic(out_path(c, m, "pohozaev.csv"), tab);
    return status;
}

void run_radial_solve(const RunConfig& c, RunManifest& m) {
    StageTimer t(m, "radial-solve");
    const CoefficientH h = coefficient_from(c);
    RadialSolveOptions opts;
    opts.a_min = c.get_double("solve.a_min", 1e-2);
    opts.a_max = c.get_double("solve.a_max", 1e3);
    opts.probes = c.get_int("solve.probes", 200);
    const RadialSolveOutcome out = find_radial_solution(h, opts);

    CsvTable log;
    log.header = {"height", "endpoint_value", "diverged"};
    for (const auto& probe : out.sweep_log)
        log.add_row({format_double(probe.height), format_double(probe.endpoint_value),
                     probe.diverged ? "1" : "0"});
    write_csv_atomic(out_path(c, m, "sweep_log.csv"), log);

    json summary{{"found", out.solution.has_value()},
                 {"probes", out.sweep_log.size()},
                 {"a_min", opts.a_min},
                 {"a_max", opts.a_max}};
    if (out.solution) {
        summary["root_height"] = out.root_height;
        summary["boundary_derivative"] = out.boundary_derivative;
        write_radial_csv(*out.solution, out_path(c, m, "solution.csv"));
    }
    write_text_atomic(out_path(c, m, "radial_solve.json"), summary.dump(2) + "\n");
}

void run_extract(const RunConfig& c, RunManifest& m) {
    StageTimer t(m, "extract");
    const Domain domain = domain_from(c);
    const ScalarField3D u = read_field3d_csv(c.get("extract.field_csv"), domain);
    const double threshold = c.get_double("extract.threshold", 1.0);
    const ExtractionResult res = extract_concentration_points(u, domain, threshold);
    json points = json::array();
    for (std::size_t i = 0; i < res.points.size(); ++i)
        points.push_back({{"x", res.points[i].x},
                          {"y", res.points[i].y},
                          {"z", res.points[i].z},
                          {"height", res.heights[i]}});
    const json out{{"threshold", res.threshold},
                   {"count", res.points.size()},
                   {"covering_margin", res.covering_margin},
                   {"points", points}};
    write_text_atomic(out_path(c, m, "extraction.json"), out.dump(2) + "\n");
}

void run_construct_radial(const RunConfig& c, RunManifest& m) {
    StageTimer t(m, "construct-radial");
    const Domain domain = domain_from(c);
    const CoefficientH h = coefficient_from(c);
    const double eps = c.get_double("construct.eps", 1e-2);
    const RadialFamilyParams params = make_radial_family_params(h, domain, eps);
    const RadialFamily fam(params);
    const ScalarFieldRadial field =
        fam.sample(RadialGrid::graded(domain.ball_radius() * (1 - 1e-9), 4000, 1e-7));
    write_radial_csv(field, out_path(c, m, "family.csv"));
    const json meta{{"eps", eps},
                    {"mass", params.mass},
                    {"peak", fam.value_at_origin()},
                    {"cutoff_inner", params.cutoff_inner},
                    {"cutoff_outer", params.cutoff_outer}};
    write_text_atomic(out_path(c, m, "family.json"), meta.dump(2) + "\n");
}

void run_construct_two_bubble(const RunConfig& c, RunManifest& m) {
    StageTimer t(m, "construct-two-bubble");
    const Domain domain = domain_from(c);
    const CoefficientH h = coefficient_from(c);
    const double eps = c.get_double("construct.eps", 1e-2);
    BalanceOptions bopts;
    if (c.has("construct.x1")) bopts.x1_override = vec_from(c, "construct.x1", {0, 0, 0});
    const TwoBubbleParams params = balance_configuration(h, domain, bopts);
    const TwoBubbleField fam(params, eps, h);

    const int n = c.get_int("construct.samples", 10000);
    const auto pts = stratified_samples(domain, params.x1, params.x2, 1e-2 * eps, n, c.seed);
    CsvTable tab;
    tab.header = {"x", "y", "z", "value"};
    for (const Vec3& p : pts)
        tab.add_row({format_double(p.x), format_double(p.y), format_double(p.z),
                     format_double(fam.value(p))});
    write_csv_atomic(out_path(c, m, "two_bubble_samples.csv"), tab);

    const json meta{{"eps", eps},
                    {"x1", {params.x1.x, params.x1.y, params.x1.z}},
                    {"x2", {params.x2.x, params.x2.y, params.x2.z}},
                    {"lambda", params.lambda},
                    {"delta", params.delta},
                    {"balance_residual_1", params.balance_residual_1},
                    {"balance_residual_2", params.balance_residual_2},
                    {"mass_1", params.e1.mass},
                    {"mass_2", params.e2.mass}};
    write_text_atomic(out_path(c, m, "two_bubble.json"), meta.dump(2) + "\n");
}

int run_sweep(const RunConfig& c, RunManifest& m) {
    StageTimer t(m, "sweep");
    const Domain domain = domain_from(c);
    const CoefficientH h = coefficient_from(c);
    const std::vector<double> eps = c.get_list("sweep.eps");
    const SweepMode mode =
        c.get("sweep.mode") == "radial" ? SweepMode::Radial : SweepMode::TwoBubble;
    SweepOptions opts;
    opts.seed = c.seed;
    opts.samples_3d = c.get_int("sweep.samples", 100000);
    opts.radial_nodes = c.get_int("sweep.radial_nodes", 4000);
    if (c.has("sweep.x1")) opts.balance.x1_override = vec_from(c, "sweep.x1", {0, 0, 0});

    const ResidualSweep sweep = instability_sweep(mode, h, domain, eps, opts);
    CsvTable tab;
    tab.header = {"eps", "l3_norm", "linf_norm", "min_u", "balance_residual_1",
                  "balance_residual_2", "positivity_ok"};
    bool all_positive = true;
    for (const auto& row : sweep.rows) {
        tab.add_row({format_double(row.eps), format_double(row.l3_norm),
                     format_double(row.linf_norm), format_double(row.min_u),
                     format_double(row.balance_residual_1),
                     format_double(row.balance_residual_2), row.positivity_ok ? "1" : "0"});
        all_positive = all_positive && row.positivity_ok;
    }
    write_csv_atomic(out_path(c, m, "sweep.csv"), tab);
    if (!all_positive) {
        m.error = "sweep: positivity failed at some eps";
        return 3;
    }
    return 0;
}

}  // namespace

std::string RunManifest::to_json() const {
    json j{{"artifact_version", artifact_version},
           {"config", config_echo},
           {"wall_times_s", wall_times_s},
           {"output_files", output_files},
           {"convention_tags", convention_tags},
           {"failed", failed}};
    if (failed) j["error"] = error;
    return j.dump(2) + "\n";
}

int run(const RunConfig& config, RunManifest& manifest) {
    manifest.artifact_version = kVersion;
    manifest.convention_tags = {"analyst-laplacian", "scaled-green"};
    manifest.config_echo = config.kv;
    manifest.config_echo["scenario"] = config.scenario;
    manifest.config_echo["output.dir"] = config.out_dir;
    manifest.config_echo["output.seed"] = std::to_string(config.seed);

    auto finalize = [&](int status) {
        manifest.failed = status != 0;
        manifest.output_files.push_back("manifest.json");
        const std::string path =
            (std::filesystem::path(config.out_dir) / "manifest.json").string();
        std::filesystem::create_directories(config.out_dir);
        write_text_atomic(path, manifest.to_json());
        return status;
    };

    try {
        validate(config);
    } catch (const ConfigError& e) {
        manifest.error = e.what();
        return finalize(2);
    }

    try {
        int status = 0;
        if (config.scenario == "green") {
            run_green(config, manifest);
        } else if (config.scenario == "pohozaev") {
            status = run_pohozaev(config, manifest);
        } else if (config.scenario == "radial-solve") {
            run_radial_solve(config, manifest);
        } else if (config.scenario == "extract") {
            run_extract(config, manifest);
        } else if (config.scenario == "construct-radial") {
            run_construct_radial(config, manifest);
        } else if (config.scenario == "construct-two-bubble") {
            run_construct_two_bubble(config, manifest);
        } else if (config.scenario == "sweep") {
            status = run_sweep(config, manifest);
        }
        return finalize(status);
    } catch (const ConfigError& e) {
        manifest.error = e.what();
        return finalize(2);
    } catch (const std::exception& e) {
        manifest.error = e.what();
        return finalize(3);
    }
}

std::string report(const std::vector<std::string>& manifest_paths, const std::string& out_csv) {
    if (manifest_paths.empty()) throw ConfigError("report: no manifests given");

    struct Row {
        std::string mode;
        double eps, l3, linf;
    };
    std::vector<Row> rows;
    for (const std::string& path : manifest_paths) {
        std::ifstream in(path);
        if (!in) throw ConfigError("report: cannot open manifest " + path);
        json j;
        in >> j;
        if (!j.contains("output_files"))
            throw ConfigError("report: not a run manifest: " + path);
        const auto files = j["output_files"].get<std::vector<std::string>>();
        bool has_sweep = false;
        for (const auto& f : files) has_sweep = has_sweep || f == "sweep.csv";
        if (!has_sweep)
            throw ConfigError("report: manifest has no sweep output (incompatible scenario): " +
                              path);
        const std::string mode = j["config"].value("sweep.mode", "radial");
        const std::string dir = std::filesystem::path(path).parent_path().string();
        const CsvTable tab = read_csv((std::filesystem::path(dir) / "sweep.csv").string());
        for (const auto& r : tab.rows)
            rows.push_back({mode, std::stod(r.at(0)), std::stod(r.at(1)), std::stod(r.at(2))});
    }

    // Least-squares fit of norm = C / ln(1/eps) per mode, on the norm each
    // mode sweeps (L^3 radial, sup two-bubble).
    std::ostringstream text;
    CsvTable out;
    out.header = {"mode", "eps", "norm", "fit", "fit_residual"};
    for (const std::string mode : {"radial", "two-bubble"}) {
        double num = 0.0, den = 0.0;
        int count = 0;
        for (const Row& r : rows) {
            if (r.mode != mode) continue;
            const double inv = 1.0 / std::log(1.0 / r.eps);
            const double norm_val = mode == "radial" ? r.l3 : r.linf;
            num += norm_val * inv;
            den += inv * inv;
            ++count;
        }
        if (count == 0) continue;
        const double C = num / den;
        text << "mode " << mode << ": fitted norm ~ " << format_double(C)
             << " / ln(1/eps) over " << count << " rows\n";
        text << "      eps          norm          fit           residual\n";
        for (const Row& r : rows) {
            if (r.mode != mode) continue;
            const double norm_val = mode == "radial" ? r.l3 : r.linf;
            const double fit = C / std::log(1.0 / r.eps);
            text << "  " << format_double(r.eps) << "  " << format_double(norm_val) << "  "
                 << format_double(fit) << "  " << format_double(norm_val - fit) << "\n";
            out.add_row({mode, format_double(r.eps), format_double(norm_val),
                         format_double(fit), format_double(norm_val - fit)});
        }
    }
    if (!out_csv.empty()) write_csv_atomic(out_csv, out);
    return text.str();
}

}  // namespace poholab::cli
