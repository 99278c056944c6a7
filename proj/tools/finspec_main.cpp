#include <complex>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "finspec/artifact_io.hpp"
#include "finspec/convergence.hpp"
#include "finspec/eigensolver.hpp"
#include "finspec/numeric.hpp"
#include "finspec/operators.hpp"
#include "finspec/resolvent.hpp"
#include "finspec/spectral_family.hpp"
#include "finspec/verify.hpp"
#include "finspec/version.hpp"

using nlohmann::json;
using namespace finspec;

namespace {

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::string text;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, got);
    std::fclose(f);
    try {
        json cfg = json::parse(text);
        if (!cfg.is_object()) throw ConfigError("config root must be a JSON object");
        return cfg;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
}

double num_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(std::string("config field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::vector<double> number_list(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        throw ConfigError(std::string("config field '") + key + "' must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw ConfigError(std::string("config field '") + key + "' must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<double> linspace(double from, double to, std::size_t count) {
    if (count < 1) throw ConfigError("grid count must be >= 1");
    if (count == 1) return {from};
    if (!(from < to)) throw ConfigError("grid requires from < to");
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return g;
}

// Grid fields accept either an explicit array or {"from", "to", "count"}.
std::vector<double> grid_from(const json& block, const char* key) {
    if (!block.contains(key)) throw ConfigError(std::string("config field '") + key + "' is required");
    const json& g = block.at(key);
    if (g.is_array()) {
        std::vector<double> out;
        for (const auto& v : g) {
            if (!v.is_number()) throw ConfigError(std::string("grid '") + key + "' must contain only numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    if (g.is_object()) {
        return linspace(num_or(g, "from", 0.0), num_or(g, "to", 1.0),
                        static_cast<std::size_t>(num_or(g, "count", 50)));
    }
    throw ConfigError(std::string("grid '") + key + "' must be an array or {from,to,count}");
}

OperatorSpec spec_from(const json& cfg) {
    if (!cfg.contains("operator")) return make_free_jacobi();
    const json& op = cfg.at("operator");
    std::string kind = op.value("kind", "free-jacobi");
    if (kind == "free-jacobi") return make_free_jacobi();
    if (kind == "hermite-position") return make_hermite_position();
    if (kind == "diagonal-unbounded") return make_diagonal_unbounded(num_or(op, "rate", 1.0));
    if (kind == "discrete-schroedinger") {
        std::vector<double> pot;
        if (op.contains("potential")) pot = number_list(op, "potential");
        return make_discrete_schroedinger(std::move(pot));
    }
    if (kind == "user-matrix") {
        if (!op.contains("path") || !op.at("path").is_string()) {
            throw ConfigError("user-matrix operator requires a 'path' string");
        }
        return load_user_matrix(op.at("path").get<std::string>());
    }
    throw ConfigError("unknown operator kind '" + kind + "'");
}

DomainProbe probe_from(const json& cfg) {
    DomainProbe probe;
    if (!cfg.contains("probe")) {
        probe.label = "e1";
        return probe;
    }
    const json& p = cfg.at("probe");
    std::string kind = p.value("kind", "basis");
    if (kind == "basis") {
        probe.kind = DomainProbe::Kind::Basis;
        probe.index = static_cast<std::size_t>(num_or(p, "index", 1.0));
    } else if (kind == "power") {
        probe.kind = DomainProbe::Kind::Power;
        probe.exponent = num_or(p, "exponent", 1.0);
    } else {
        throw ConfigError("unknown probe kind '" + kind + "'");
    }
    probe.label = p.value("label", kind);
    return probe;
}

OracleSpec oracle_from(const json& block) {
    OracleSpec oracle;
    if (!block.contains("oracle")) return oracle;
    const json& o = block.at("oracle");
    std::string kind = o.value("kind", "none");
    if (kind == "none") {
        oracle.kind = OracleSpec::Kind::None;
    } else if (kind == "semicircle") {
        oracle.kind = OracleSpec::Kind::Semicircle;
        oracle.center = num_or(o, "center", 0.0);
        oracle.radius = num_or(o, "radius", 2.0);
    } else if (kind == "gaussian") {
        oracle.kind = OracleSpec::Kind::Gaussian;
        oracle.mean = num_or(o, "mean", 0.0);
        oracle.variance = num_or(o, "variance", 1.0);
    } else if (kind == "point-masses") {
        oracle.kind = OracleSpec::Kind::PointMasses;
        if (!o.contains("points") || !o.at("points").is_array()) {
            throw ConfigError("point-masses oracle requires 'points': [[location, mass], ...]");
        }
        for (const auto& pair : o.at("points")) {
            if (!pair.is_array() || pair.size() != 2) {
                throw ConfigError("point-masses oracle entries must be [location, mass] pairs");
            }
            oracle.point_masses.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
    } else {
        throw ConfigError("unknown oracle kind '" + kind + "'");
    }
    return oracle;
}

std::vector<std::size_t> size_list(const json& block, const char* key) {
    std::vector<std::size_t> out;
    for (double v : number_list(block, key)) {
        if (v < 1) throw ConfigError(std::string("'") + key + "' entries must be >= 1");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

struct Context {
    json cfg;                 // effective config (file merged with flags)
    std::string command;
    std::string config_hash;  // over cfg minus execution knobs
    OperatorSpec spec;
    DomainProbe probe;
    std::size_t n = 100;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string output_path;  // "-" = stdout
    std::string format;       // csv | json

    json json_header() const {
        json j;
        j["tool"] = "finspec";
        j["version"] = kVersion;
        j["command"] = command;
        j["config_hash"] = config_hash;
        return j;
    }

    void emit(const std::string& content) const {
        if (output_path.empty() || output_path == "-") {
            std::fwrite(content.data(), 1, content.size(), stdout);
        } else {
            write_text_atomic(output_path, content);
        }
    }
};

Context make_context(json cfg, const std::string& command) {
    Context ctx;
    ctx.command = command;
    json hashed = cfg;
    // Execution knobs: neither affects the computed values, so neither feeds
    // the provenance hash.
    hashed.erase("threads");
    hashed.erase("output");
    ctx.config_hash = hex16(fnv1a64(hashed.dump()));
    ctx.cfg = std::move(cfg);
    ctx.spec = spec_from(ctx.cfg);
    ctx.probe = probe_from(ctx.cfg);
    double n = num_or(ctx.cfg, "n", 100.0);
    if (n < 1) throw ConfigError("config field 'n' must be >= 1");
    ctx.n = static_cast<std::size_t>(n);
    ctx.seed = static_cast<std::uint64_t>(num_or(ctx.cfg, "seed", 1.0));
    double threads = num_or(ctx.cfg, "threads", 1.0);
    ctx.threads = threads < 1 ? 1u : static_cast<unsigned>(threads);
    const json out = ctx.cfg.value("output", json::object());
    ctx.output_path = out.value("path", "-");
    ctx.format = out.value("format", "csv");
    if (ctx.format != "csv" && ctx.format != "json") {
        throw ConfigError("output format must be 'csv' or 'json'");
    }
    return ctx;
}

std::string csv_bool(bool b) { return b ? "1" : "0"; }

int cmd_decompose(const Context& ctx) {
    auto op = std::make_shared<const TruncatedOperator>(build_truncation(ctx.spec, ctx.n));
    SpectralFamily fam = SpectralFamily::build(op);
    std::vector<double> x = ctx.probe.generate(ctx.n);
    SpectralCDF rho = fam.cdf(x);

    if (ctx.format == "csv") {
        std::string out = csv_provenance(ctx.command, ctx.config_hash);
        out += "lambda,mass,cumulative\n";
        double cum = 0.0;
        for (std::size_t i = 0; i < rho.jump_locations.size(); ++i) {
            cum += rho.jump_masses[i];
            out += format_double(rho.jump_locations[i]) + "," + format_double(rho.jump_masses[i]) +
                   "," + format_double(cum) + "\n";
        }
        ctx.emit(out);
    } else {
        json j = ctx.json_header();
        json jumps = json::array();
        for (std::size_t i = 0; i < rho.jump_locations.size(); ++i) {
            jumps.push_back({{"lambda", rho.jump_locations[i]}, {"mass", rho.jump_masses[i]}});
        }
        j["jumps"] = std::move(jumps);
        j["total"] = rho.total;
        ctx.emit(j.dump(2) + "\n");
    }
    return 0;
}

ConvergenceStudy study_from(const Context& ctx, const json& block, bool single_n) {
    ConvergenceStudy study;
    study.spec = ctx.spec;
    study.probe = ctx.probe;
    if (single_n || !block.contains("ns")) {
        study.Ns = {ctx.n};
    } else {
        study.Ns = size_list(block, "ns");
    }
    study.lambda_grid = grid_from(block, "lambda-grid");
    if (block.contains("deltas")) study.deltas = number_list(block, "deltas");
    study.oracle = oracle_from(block);
    study.snap_grid_to_gaps = block.value("snap-grid-to-gaps", false);
    study.atom_threshold = num_or(block, "atom-threshold", 0.05);
    study.threads = ctx.threads;
    return study;
}

std::string convergence_csv(const Context& ctx, const CdfConvergenceReport& rep) {
    std::string out = csv_provenance(ctx.command, ctx.config_hash);
    out += "N,lambda,delta,cdf,oracle,abs_error\n";
    for (std::size_t n_idx = 0; n_idx < rep.Ns.size(); ++n_idx) {
        for (std::size_t j = 0; j < rep.nominal_grid.size(); ++j) {
            for (std::size_t d = 0; d < rep.deltas.size(); ++d) {
                const CdfCell& cell = rep.cell(n_idx, j, d);
                out += std::to_string(rep.Ns[n_idx]) + "," + format_double(cell.lambda) + "," +
                       format_double(rep.deltas[d]) + "," + format_double(cell.cdf) + "," +
                       format_double(cell.oracle) + "," + format_double(cell.abs_error) + "\n";
            }
        }
    }
    return out;
}

json convergence_json(const Context& ctx, const CdfConvergenceReport& rep) {
    json j = ctx.json_header();
    j["deltas"] = rep.deltas;
    j["nominal_grid"] = rep.nominal_grid;
    json per_n = json::array();
    for (std::size_t n_idx = 0; n_idx < rep.Ns.size(); ++n_idx) {
        json rows = json::array();
        for (std::size_t g = 0; g < rep.nominal_grid.size(); ++g) {
            json row;
            row["lambda"] = rep.cell(n_idx, g, 0).lambda;
            json vals = json::array();
            for (std::size_t d = 0; d < rep.deltas.size(); ++d) {
                const CdfCell& cell = rep.cell(n_idx, g, d);
                json v;
                v["delta"] = rep.deltas[d];
                v["cdf"] = cell.cdf;
                if (!std::isnan(cell.oracle)) {
                    v["oracle"] = cell.oracle;
                    v["abs_error"] = cell.abs_error;
                }
                vals.push_back(std::move(v));
            }
            row["values"] = std::move(vals);
            rows.push_back(std::move(row));
        }
        json block;
        block["N"] = rep.Ns[n_idx];
        block["rows"] = std::move(rows);
        json sup = json::array();
        for (std::size_t d = 0; d < rep.deltas.size(); ++d) {
            sup.push_back(std::isnan(rep.sup(n_idx, d)) ? json() : json(rep.sup(n_idx, d)));
        }
        block["sup_distance"] = std::move(sup);
        per_n.push_back(std::move(block));
    }
    j["per_n"] = std::move(per_n);
    json stab = json::array();
    for (double v : rep.stabilization) stab.push_back(v);
    j["stabilization"] = std::move(stab);
    return j;
}

int cmd_cdf(const Context& ctx) {
    ConvergenceStudy study = study_from(ctx, ctx.cfg.value("cdf", json::object()), true);
    CdfConvergenceReport rep = run_cdf_convergence(study);
    if (ctx.format == "csv") {
        ctx.emit(convergence_csv(ctx, rep));
    } else {
        ctx.emit(convergence_json(ctx, rep).dump(2) + "\n");
    }
    return 0;
}

int cmd_converge(const Context& ctx) {
    if (!ctx.cfg.contains("converge")) throw ConfigError("converge requires a 'converge' config block");
    ConvergenceStudy study = study_from(ctx, ctx.cfg.at("converge"), false);
    CdfConvergenceReport rep = run_cdf_convergence(study);
    if (ctx.format == "csv") {
        ctx.emit(convergence_csv(ctx, rep));
        return 0;
    }
    json j = convergence_json(ctx, rep);
    if (study.Ns.size() >= 2 && study.lambda_grid.size() >= 2) {
        j["persistent_atoms"] = discontinuity_scan(study);
    }
    ctx.emit(j.dump(2) + "\n");
    return 0;
}

int cmd_stone(const Context& ctx) {
    const json block = ctx.cfg.value("stone", json::object());
    const double a = num_or(block, "a", -1.0);
    const double b = num_or(block, "b", 1.0);
    const double eta = num_or(block, "eta", 1e-6);
    const double refinement_tol = num_or(block, "refinement-tol", 1e-10);
    std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
    if (block.contains("epsilons")) epsilons = number_list(block, "epsilons");

    TruncatedOperator T = build_truncation(ctx.spec, ctx.n);
    std::vector<double> x = ctx.probe.generate(ctx.n);
    StoneLimitStudy study = stone_limit_study(T, a, b, x, epsilons, eta, refinement_tol);

    if (ctx.format == "csv") {
        std::string out = csv_provenance(ctx.command, ctx.config_hash);
        out += "epsilon,error,ratio\n";
        for (const StoneLimitRow& row : study.rows) {
            out += format_double(row.epsilon) + "," + format_double(row.error) + "," +
                   format_double(row.ratio) + "\n";
        }
        ctx.emit(out);
    } else {
        json j = ctx.json_header();
        j["a"] = a;
        j["b"] = b;
        j["endpoint_distance"] = study.endpoint_distance;
        j["eta"] = study.eta;
        json rows = json::array();
        for (const StoneLimitRow& row : study.rows) {
            json r;
            r["epsilon"] = row.epsilon;
            r["error"] = row.error;
            if (!std::isnan(row.ratio)) r["ratio"] = row.ratio;
            rows.push_back(std::move(r));
        }
        j["rows"] = std::move(rows);
        ctx.emit(j.dump(2) + "\n");
    }
    return 0;
}

int cmd_resolvent_check(const Context& ctx) {
    const json block = ctx.cfg.value("resolvent", json::object());
    const int trials = static_cast<int>(num_or(block, "trials", 20.0));
    const double im_min = num_or(block, "im-min", 0.1);
    const double im_max = num_or(block, "im-max", 10.0);
    const double re_min = num_or(block, "re-min", -2.0);
    const double re_max = num_or(block, "re-max", 2.0);
    if (trials < 1) throw ConfigError("resolvent trials must be >= 1");
    if (!(im_min > 0.0) || !(im_max >= im_min)) throw ConfigError("resolvent requires 0 < im-min <= im-max");

    auto op = std::make_shared<const TruncatedOperator>(build_truncation(ctx.spec, ctx.n));
    SpectralFamily fam = SpectralFamily::build(op);
    Rng rng(ctx.seed);
    const double dN = static_cast<double>(ctx.n);

    struct Row {
        const char* check;
        std::complex<double> z;
        double measured;
        double allowed;
        bool pass;
    };
    std::vector<Row> rows;
    bool all_pass = true;

    for (int t = 0; t < trials; ++t) {
        std::vector<double> x = rng.unit_vector(ctx.n);
        double im = rng.uniform(im_min, im_max) * (t % 2 == 0 ? 1.0 : -1.0);
        std::complex<double> z{rng.uniform(re_min, re_max), im};

        double residual = operational_calculus_residual(fam, *op, z, x);
        double allowed = 100.0 * dN * ulp(nrm2(x) / std::fabs(im));
        rows.push_back({"spectral-consistency", z, residual, allowed, residual <= allowed});

        std::vector<std::complex<double>> y = resolvent_solve(*op, z, x);
        std::vector<std::complex<double>> ybar = resolvent_solve(*op, std::conj(z), x);
        double sym = 0.0, ynorm = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            sym += std::norm(ybar[i] - std::conj(y[i]));
            ynorm += std::norm(y[i]);
        }
        sym = std::sqrt(sym);
        ynorm = std::sqrt(ynorm);
        double allowed_sym = 100.0 * dN * ulp(std::max(1.0, ynorm));
        rows.push_back({"conjugate-symmetry", z, sym, allowed_sym, sym <= allowed_sym});

        std::complex<double> z2{rng.uniform(re_min, re_max),
                                rng.uniform(im_min, im_max) * (t % 2 == 0 ? -1.0 : 1.0)};
        std::vector<std::complex<double>> r2 = resolvent_solve(*op, z2, x);
        std::vector<std::complex<double>> r12 = resolvent_solve(*op, z, r2);
        double identity = 0.0, scale_fri = 0.0;
        std::vector<std::complex<double>> r1 = y;
        for (std::size_t i = 0; i < r1.size(); ++i) {
            std::complex<double> lhs = r1[i] - r2[i];
            std::complex<double> rhs = (z - z2) * r12[i];
            identity += std::norm(lhs - rhs);
            scale_fri = std::max(scale_fri, std::max(std::abs(lhs), std::abs(rhs)));
        }
        identity = std::sqrt(identity);
        double allowed_fri = 100.0 * dN * ulp(std::max(1.0, scale_fri));
        rows.push_back({"first-resolvent-identity", z, identity, allowed_fri, identity <= allowed_fri});
    }
    for (const Row& r : rows) all_pass = all_pass && r.pass;

    if (ctx.format == "csv") {
        std::string out = csv_provenance(ctx.command, ctx.config_hash);
        out += "check,z_re,z_im,measured,allowed,pass\n";
        for (const Row& r : rows) {
            out += std::string(r.check) + "," + format_double(r.z.real()) + "," +
                   format_double(r.z.imag()) + "," + format_double(r.measured) + "," +
                   format_double(r.allowed) + "," + csv_bool(r.pass) + "\n";
        }
        ctx.emit(out);
    } else {
        json j = ctx.json_header();
        json arr = json::array();
        for (const Row& r : rows) {
            arr.push_back({{"check", r.check},
                           {"z", {r.z.real(), r.z.imag()}},
                           {"measured", r.measured},
                           {"allowed", r.allowed},
                           {"pass", r.pass}});
        }
        j["rows"] = std::move(arr);
        j["pass"] = all_pass;
        ctx.emit(j.dump(2) + "\n");
    }
    return all_pass ? 0 : 1;
}

int cmd_tails(const Context& ctx) {
    const json block = ctx.cfg.value("tails", json::object());
    if (!block.contains("ks")) throw ConfigError("tails requires 'tails': {\"ks\": [...]} in the config");
    std::vector<double> Ks = number_list(block, "ks");

    ConvergenceStudy study;
    study.spec = ctx.spec;
    study.probe = ctx.probe;
    study.threads = ctx.threads;
    if (block.contains("ns")) {
        study.Ns = size_list(block, "ns");
    } else {
        study.Ns = {std::max<std::size_t>(ctx.n / 4, 2), std::max<std::size_t>(ctx.n / 2, 3), ctx.n};
        std::sort(study.Ns.begin(), study.Ns.end());
        study.Ns.erase(std::unique(study.Ns.begin(), study.Ns.end()), study.Ns.end());
        if (study.Ns.size() < 3) study.Ns = {ctx.n, ctx.n + 1, ctx.n + 2};
    }

    TailLimitsReport rep = run_tail_limits(study, Ks);
    bool all_pass = true;
    for (const TailLimitRow& row : rep.rows) all_pass = all_pass && row.bound_satisfied;

    if (ctx.format == "csv") {
        std::string out = csv_provenance(ctx.command, ctx.config_hash);
        out += "N,K,left_norm,right_defect,lhs,left_moment,right_moment,bound_satisfied\n";
        for (const TailLimitRow& row : rep.rows) {
            out += std::to_string(row.N) + "," + format_double(row.K) + "," +
                   format_double(row.left_norm) + "," + format_double(row.right_defect) + "," +
                   format_double(row.lhs) + "," + format_double(row.left_moment) + "," +
                   format_double(row.right_moment) + "," + csv_bool(row.bound_satisfied) + "\n";
        }
        ctx.emit(out);
    } else {
        json j = ctx.json_header();
        json arr = json::array();
        for (const TailLimitRow& row : rep.rows) {
            arr.push_back({{"N", row.N},
                           {"K", row.K},
                           {"left_norm", row.left_norm},
                           {"right_defect", row.right_defect},
                           {"lhs", row.lhs},
                           {"left_moment", row.left_moment},
                           {"right_moment", row.right_moment},
                           {"bound_satisfied", row.bound_satisfied}});
        }
        j["rows"] = std::move(arr);
        j["pass"] = all_pass;
        ctx.emit(j.dump(2) + "\n");
    }
    return all_pass ? 0 : 1;
}

int cmd_verify(const Context& ctx) {
    if (ctx.format != "json") {
        throw ConfigError("verify emits a JSON summary; set format to 'json'");
    }
    VerifyOptions options;
    options.N = ctx.n;
    options.seed = ctx.seed;
    options.tolerance_scale = num_or(ctx.cfg.value("verify", json::object()), "tolerance-scale", 1.0);

    VerifyReport rep = run_verify(ctx.spec, ctx.probe, options);
    json j = ctx.json_header();
    j["n"] = options.N;
    j["seed"] = options.seed;
    j["tolerance_scale"] = options.tolerance_scale;
    json checks = json::array();
    for (const VerifyCheck& c : rep.checks) {
        checks.push_back({{"name", c.name},
                          {"cases", c.cases},
                          {"violations", c.violations},
                          {"worst_margin", c.worst_margin},
                          {"pass", c.pass}});
    }
    j["checks"] = std::move(checks);
    j["pass"] = rep.pass;
    ctx.emit(j.dump(2) + "\n");
    return rep.pass ? 0 : 1;
}

struct FlagValues {
    std::string config_path;
    std::string output_path;
    std::string format;
    std::optional<long long> seed;
    std::optional<long long> threads;
    std::optional<long long> n;
    std::optional<double> a, b, eta, refinement_tol, tolerance_scale;
    bool snap = false;
};

void add_common(CLI::App* sub, FlagValues& fv) {
    sub->add_option("--config", fv.config_path, "JSON config file");
    sub->add_option("--output", fv.output_path, "artifact path ('-' for stdout)");
    sub->add_option("--format", fv.format, "artifact format: csv or json");
    sub->add_option("--seed", fv.seed, "seed for randomized sweeps");
    sub->add_option("--threads", fv.threads, "worker threads for multi-N sweeps");
    sub->add_option("--n", fv.n, "truncation dimension");
}

json merge_flags(const FlagValues& fv, const std::string& command) {
    json cfg = load_config_file(fv.config_path);
    if (!fv.output_path.empty()) cfg["output"]["path"] = fv.output_path;
    if (!fv.format.empty()) cfg["output"]["format"] = fv.format;
    if (fv.seed) cfg["seed"] = *fv.seed;
    if (fv.threads) cfg["threads"] = *fv.threads;
    if (fv.n) cfg["n"] = *fv.n;
    if (fv.a) cfg["stone"]["a"] = *fv.a;
    if (fv.b) cfg["stone"]["b"] = *fv.b;
    if (fv.eta) cfg["stone"]["eta"] = *fv.eta;
    if (fv.refinement_tol) cfg["stone"]["refinement-tol"] = *fv.refinement_tol;
    if (fv.tolerance_scale) cfg["verify"]["tolerance-scale"] = *fv.tolerance_scale;
    if (fv.snap) cfg["converge"]["snap-grid-to-gaps"] = true;
    if (command == "verify" && !cfg.contains("output")) cfg["output"]["format"] = "json";
    if (command == "verify" && !cfg["output"].contains("format")) cfg["output"]["format"] = "json";
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-section spectral measures: decompositions, Stieltjes calculus, "
                 "resolvent reconstruction, and convergence sweeps"};
    app.require_subcommand(1);
    FlagValues fv;

    CLI::App* decompose = app.add_subcommand("decompose", "eigendecompose and emit the spectral CDF");
    CLI::App* cdf = app.add_subcommand("cdf", "evaluate the spectral CDF on a grid");
    CLI::App* stone = app.add_subcommand("stone", "resolvent reconstruction error sweep over epsilon");
    CLI::App* resolvent_check =
        app.add_subcommand("resolvent-check", "randomized resolvent identity and consistency checks");
    CLI::App* tails = app.add_subcommand("tails", "tail norms and first-moment certificates over cutoffs");
    CLI::App* converge = app.add_subcommand("converge", "CDF convergence sweep over truncation sizes");
    CLI::App* verify = app.add_subcommand("verify", "run the invariant suite and emit a JSON summary");

    for (CLI::App* sub : {decompose, cdf, stone, resolvent_check, tails, converge, verify}) {
        add_common(sub, fv);
    }
    stone->add_option("--a", fv.a, "interval left endpoint");
    stone->add_option("--b", fv.b, "interval right endpoint");
    stone->add_option("--eta", fv.eta, "minimum endpoint distance to the spectrum");
    stone->add_option("--refinement-tol", fv.refinement_tol, "quadrature refinement tolerance");
    verify->add_option("--tolerance-scale", fv.tolerance_scale,
                       "multiplier on all roundoff allowances (0 = exact bounds)");
    converge->add_flag("--snap-grid-to-gaps", fv.snap,
                       "evaluate at spectral-gap midpoints instead of raw grid points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        Context ctx = make_context(merge_flags(fv, command), command);
        if (command == "decompose") return cmd_decompose(ctx);
        if (command == "cdf") return cmd_cdf(ctx);
        if (command == "stone") return cmd_stone(ctx);
        if (command == "resolvent-check") return cmd_resolvent_check(ctx);
        if (command == "tails") return cmd_tails(ctx);
        if (command == "converge") return cmd_converge(ctx);
        if (command == "verify") return cmd_verify(ctx);
        std::fprintf(stderr, "unknown command '%s'\n", command.c_str());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
}
