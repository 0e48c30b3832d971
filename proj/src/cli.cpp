#include "sww/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <thread>

#include "sww/continuation.hpp"
#include "sww/io.hpp"
#include "sww/persistence.hpp"

namespace sww {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr const char* kVersion = "0.1.0";

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ValidationError("config: " + field + ": " + what);
}

double require_number(const nlohmann::json& j, const std::string& path, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) fail(path + "." + key, "expected a number");
    return j[key].get<double>();
}

struct ManifestBuilder {
    nlohmann::json files = nlohmann::json::array();
    nlohmann::json residuals = nlohmann::json::object();

    void add_file(const std::filesystem::path& p) {
        files.push_back({{"name", p.filename().string()},
                         {"checksum", hex64(fnv1a64_file(p))},
                         {"bytes", std::filesystem::file_size(p)}});
    }
    void add_residual(const std::string& key, double value) { residuals[key] = value; }
};

uint64_t fnv1a64_string(const std::string& s) {
    uint64_t hash = 1469598103934665603ull;
    for (unsigned char ch : s) {
        hash ^= ch;
        hash *= 1099511628211ull;
    }
    return hash;
}

void write_manifest(const RunConfig& cfg, const std::filesystem::path& dir,
                    ManifestBuilder& mb, const nlohmann::json& raw_config) {
    nlohmann::json manifest;
    manifest["stage"] = stage_to_string(cfg.stage);
    manifest["config_hash"] = hex64(fnv1a64_string(raw_config.dump()));
    manifest["seed"] = cfg.seed;
    manifest["versions"] = {{"sww", kVersion}, {"manifest_format", 1}};
    manifest["residuals"] = mb.residuals;
    manifest["files"] = mb.files;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
}

nlohmann::json config_to_canonical_json(const RunConfig& c);

std::filesystem::path resolve_output_dir(const RunConfig& cfg) {
    const char* env = std::getenv("SWW_OUTPUT_DIR");
    std::filesystem::path dir = env && *env ? std::filesystem::path(env) : cfg.output_dir;
    std::filesystem::create_directories(dir);
    return dir;
}

// --- stages ------------------------------------------------------------------

void run_region_map(const RunConfig& cfg, const std::filesystem::path& dir, ManifestBuilder& mb) {
    const auto& sp = cfg.stage_params;
    double b_norm = sp.contains("b_norm") ? sp["b_norm"].get<double>()
                                          : sobolev_norm(cfg.bottom, cfg.spectral.s + 1.0);
    const double gamma = sp.value("gamma", 1.0);
    const double c_star = sp.value("c_star", critical_speed(1, cfg.g, cfg.h) + 0.2);
    const int k_max = sp.value("k_max", cfg.spectral.n_modes);

    const auto excluded = admissible_region(b_norm, cfg.g, cfg.h, c_star, k_max, gamma);
    CsvWriter csv(dir / "region.csv", {"k", "c_k", "half_width", "c_lo", "c_hi"});
    for (const auto& e : excluded)
        csv.row({static_cast<double>(e.k), e.c_k, e.half_width, e.c_k - e.half_width,
                 e.c_k + e.half_width});
}

void write_surface_csv(const std::filesystem::path& path, const SpectralConfig& scfg,
                       const std::vector<const PeriodicField*>& fields,
                       const std::vector<std::string>& names) {
    std::vector<std::string> cols = {"x"};
    cols.insert(cols.end(), names.begin(), names.end());
    CsvWriter csv(path, cols);
    std::vector<std::vector<double>> vals;
    vals.reserve(fields.size());
    for (const auto* f : fields) vals.push_back(f->grid_values());
    for (int i = 0; i < scfg.grid_size; ++i) {
        std::vector<double> row = {two_pi * i / scfg.grid_size};
        for (const auto& v : vals) row.push_back(v[static_cast<size_t>(i)]);
        csv.row(row);
    }
}

void run_trivial_continue(const RunConfig& cfg, const std::filesystem::path& dir,
                          ManifestBuilder& mb) {
    std::vector<double> c_values;
    if (cfg.stage_params.contains("c_values"))
        c_values = cfg.stage_params["c_values"].get<std::vector<double>>();
    else
        c_values = {cfg.c};

    // Exact hits on a critical speed cannot be continued (Hessian kernel).
    for (double c : c_values)
        for (int k = 1; k <= cfg.spectral.n_modes; ++k)
            if (std::abs(c - critical_speed(k, cfg.g, cfg.h)) < 1e-9)
                throw ConvergenceError("trivial-continue: c equals the critical speed c_" +
                                       std::to_string(k));

    TrivialContinuationOptions opt;
    opt.tol = cfg.tolerance("newton", 1e-11);
    opt.gamma_exclusion = cfg.stage_params.value("gamma_exclusion", 0.0);
    const Eigen::MatrixXd dn_block = dn_difference_block(cfg.spectral, cfg.bottom, cfg.h);
    opt.cached_dn_block = &dn_block;

    CsvWriter csv(dir / "trivial_branch.csv",
                  {"c", "b_norm", "eta_inf", "residual", "iters", "smallest_hessian_sv"});
    const double b_norm = sobolev_norm(cfg.bottom, cfg.spectral.s + 1.0);
    std::optional<ContinuationResult> last;
    for (double c : c_values) {
        PhysicalParams params(cfg.g, cfg.h, c, cfg.bottom);
        ContinuationResult res = continue_trivial(cfg.spectral, params, opt);
        csv.row({c, b_norm, res.u.eta.max_abs(), res.residual_norm,
                 static_cast<double>(res.newton_iters), res.smallest_hessian_sv});
        mb.add_residual("c=" + format_double(c), res.residual_norm);
        last = std::move(res);
    }
    if (last)
        write_surface_csv(dir / "surface.csv", cfg.spectral, {&last->u.eta, &cfg.bottom},
                          {"eta", "b"});
}

void run_stokes_branch(const RunConfig& cfg, const std::filesystem::path& dir,
                       ManifestBuilder& mb) {
    if (!cfg.bottom.is_zero(1e-15))
        throw ValidationError("stokes-branch: the bottom must be flat (b = 0)");
    StokesOptions opt;
    const auto& sp = cfg.stage_params;
    const int k = sp.value("k", 1);
    opt.steps = sp.value("steps", opt.steps);
    opt.ds = sp.value("ds", opt.ds);
    opt.a0 = sp.value("a0", opt.a0);
    opt.target_amplitude = sp.value("target_amplitude", opt.target_amplitude);
    opt.tol = cfg.tolerance("newton", opt.tol);

    PhysicalParams params(cfg.g, cfg.h, critical_speed(k, cfg.g, cfg.h), cfg.bottom);
    StokesBranch branch = stokes_branch(cfg.spectral, k, params, opt);
    if (branch.points.empty()) throw ConvergenceError("stokes-branch: no points traced");

    CsvWriter csv(dir / "stokes_branch.csv",
                  {"index", "c", "amplitude", "residual", "nondegeneracy", "tail", "arclength"});
    for (size_t i = 0; i < branch.points.size(); ++i) {
        const auto& p = branch.points[i];
        csv.row({static_cast<double>(i), p.c, p.amplitude, p.residual, p.orbit_nondegeneracy,
                 spectral_tail_fraction(p.u), p.arclength});
    }
    mb.add_residual("last_point", branch.points.back().residual);
    std::ofstream state_out(dir / "branch_state.json", std::ios::binary);
    nlohmann::json j;
    j["stop_reason"] = branch.stop_reason;
    j["c"] = branch.points.back().c;
    j["state"] = state_to_json(branch.points.back().u);
    state_out << j.dump(2) << "\n";
    mb.add_file(dir / "branch_state.json");
}

void run_persist(const RunConfig& cfg, const std::filesystem::path& dir, ManifestBuilder& mb) {
    const auto& sp = cfg.stage_params;
    const int k = sp.value("k", 1);
    const double orbit_amplitude = sp.value("orbit_amplitude", 0.02);
    const int n_theta = sp.value("n_theta", 64);
    const double solve_tol = cfg.tolerance("normal", 1e-11);

    // Flat-bottom branch point at the requested amplitude.
    StokesOptions sopt;
    sopt.target_amplitude = orbit_amplitude;
    sopt.steps = sp.value("steps", 200);
    sopt.record_nondegeneracy = false;
    PeriodicField flat(cfg.spectral);
    PhysicalParams flat_params(cfg.g, cfg.h, critical_speed(k, cfg.g, cfg.h), flat);
    StokesBranch branch = stokes_branch(cfg.spectral, k, flat_params, sopt);
    if (branch.points.empty() || branch.points.back().amplitude < 0.5 * orbit_amplitude)
        throw ConvergenceError("persist: could not reach the requested orbit amplitude");
    const BranchPoint& bp = branch.points.back();

    SliceChart chart = build_slice_chart(bp.u, bp.c);
    PhysicalParams params(cfg.g, cfg.h, bp.c, cfg.bottom);
    HarmonicCurrent current = solve_bottom_trace(cfg.bottom, cfg.h, cfg.tolerance("trace", 1e-12));
    HamiltonianEvaluator eval(cfg.spectral, params, std::move(current));
    PersistenceContext ctx(eval, chart);

    auto samples = reduced_hamiltonian(ctx, n_theta, solve_tol);
    CsvWriter csv(dir / "reduced_h.csv", {"theta", "h_b", "w_norm", "iters", "residual"});
    for (const auto& s : samples)
        csv.row({s.theta, s.h_value, norm_X(s.w, cfg.spectral.s),
                 static_cast<double>(s.newton_iters), s.residual});

    PersistOptions popt;
    popt.refine_tol = cfg.tolerance("refine", 1e-9);
    auto waves = find_persistent_waves(ctx, samples, popt);

    // Phase offset of each persistent surface against the bottom crest.
    auto argmax_grid = [&](const PeriodicField& f) {
        const auto v = f.grid_values();
        size_t best = 0;
        for (size_t i = 1; i < v.size(); ++i)
            if (v[i] > v[best]) best = i;
        return two_pi * static_cast<double>(best) / static_cast<double>(v.size());
    };
    const double b_crest = argmax_grid(cfg.bottom);

    nlohmann::json jwaves = nlohmann::json::array();
    std::vector<const PeriodicField*> surfaces;
    std::vector<std::string> names;
    for (size_t i = 0; i < waves.size(); ++i) {
        const auto& w = waves[i];
        nlohmann::json jw;
        jw["theta"] = w.theta;
        jw["kind"] = w.kind == ExtremumKind::kMax   ? "max"
                     : w.kind == ExtremumKind::kMin ? "min"
                                                    : "flat";
        jw["h_value"] = w.h_value;
        jw["w_norm"] = w.w_norm;
        jw["residual"] = w.residual;
        jw["phase_offset_vs_bottom"] =
            std::fmod(argmax_grid(w.u.eta) - b_crest + two_pi, two_pi);
        jw["minimal_period_p"] = chart.minimal_period_p;
        jw["state"] = state_to_json(w.u);
        jwaves.push_back(std::move(jw));
        surfaces.push_back(&waves[i].u.eta);
        names.push_back("eta_" + std::to_string(i));
        mb.add_residual("wave_" + std::to_string(i), w.residual);
    }
    nlohmann::json jout;
    jout["c"] = bp.c;
    jout["orbit_amplitude"] = bp.amplitude;
    jout["orbit_smallest_sv"] = ctx.orbit_smallest_sv();
    jout["waves"] = jwaves;
    std::ofstream wout(dir / "persistent_waves.json", std::ios::binary);
    wout << jout.dump(2) << "\n";
    mb.add_file(dir / "persistent_waves.json");

    surfaces.push_back(&cfg.bottom);
    names.push_back("b");
    write_surface_csv(dir / "surfaces.csv", cfg.spectral, surfaces, names);
    mb.add_file(dir / "surfaces.csv");
}

void run_sweep(const RunConfig& cfg, const std::filesystem::path& dir, ManifestBuilder& mb) {
    const auto& sp = cfg.stage_params;
    if (!sp.contains("amplitudes") || !sp.contains("c_values"))
        fail("stage_params", "sweep needs 'amplitudes' and 'c_values' arrays");
    const auto amplitudes = sp["amplitudes"].get<std::vector<double>>();
    const auto c_values = sp["c_values"].get<std::vector<double>>();
    if (cfg.bottom.is_zero(0.0) && !sp.contains("shape_mode"))
        fail("stage_params", "sweep needs a bottom shape (config bottom or shape_mode)");
    const int shape_mode = sp.value("shape_mode", 1);

    struct Row {
        double a, c, eta_inf, residual, sv;
        int iters;
        bool converged;
    };
    std::vector<Row> rows(amplitudes.size() * c_values.size());

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t idx = next.fetch_add(1);
            if (idx >= rows.size()) return;
            const double a = amplitudes[idx / c_values.size()];
            const double c = c_values[idx % c_values.size()];
            Row row{a, c, 0.0, 0.0, 0.0, 0, false};
            try {
                PeriodicField b = cfg.bottom.is_zero(0.0)
                                      ? make_cos(cfg.spectral, shape_mode, a)
                                      : [&] {
                                            PeriodicField s = cfg.bottom;
                                            const double m = s.max_abs();
                                            if (m > 0) s *= a / m;
                                            return s;
                                        }();
                PhysicalParams params(cfg.g, cfg.h, c, b);
                TrivialContinuationOptions opt;
                opt.tol = cfg.tolerance("newton", 1e-11);
                ContinuationResult res = continue_trivial(cfg.spectral, params, opt);
                row.eta_inf = res.u.eta.max_abs();
                row.residual = res.residual_norm;
                row.sv = res.smallest_hessian_sv;
                row.iters = res.newton_iters;
                row.converged = true;
            } catch (const std::exception&) {
                row.converged = false;
            }
            rows[idx] = row;
        }
    };
    const int n_workers = std::max(1, cfg.workers);
    std::vector<std::thread> pool;
    for (int t = 1; t < n_workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    CsvWriter csv(dir / "sweep.csv",
                  {"amplitude", "c", "converged", "eta_inf", "residual", "iters", "smallest_sv"});
    for (const auto& r : rows)
        csv.row({r.a, r.c, r.converged ? 1.0 : 0.0, r.eta_inf, r.residual,
                 static_cast<double>(r.iters), r.sv});
    mb.add_residual("n_runs", static_cast<double>(rows.size()));
}

nlohmann::json config_to_canonical_json(const RunConfig& c) {
    nlohmann::json j;
    j["stage"] = stage_to_string(c.stage);
    j["spectral"] = {{"n_modes", c.spectral.n_modes},
                     {"grid_size", c.spectral.grid_size},
                     {"s", c.spectral.s},
                     {"dealias_factor", c.spectral.dealias_factor}};
    j["physical"] = {{"g", c.g}, {"h", c.h}, {"c", c.c}, {"bottom", field_to_json(c.bottom)}};
    j["tolerances"] = c.tolerances;
    j["stage_params"] = c.stage_params;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    return j;
}

}  // namespace

Stage stage_from_string(const std::string& name) {
    if (name == "trivial-continue") return Stage::kTrivialContinue;
    if (name == "region-map") return Stage::kRegionMap;
    if (name == "stokes-branch") return Stage::kStokesBranch;
    if (name == "persist") return Stage::kPersist;
    if (name == "sweep") return Stage::kSweep;
    fail("stage", "unknown stage '" + name + "'");
}

std::string stage_to_string(Stage s) {
    switch (s) {
        case Stage::kTrivialContinue: return "trivial-continue";
        case Stage::kRegionMap: return "region-map";
        case Stage::kStokesBranch: return "stokes-branch";
        case Stage::kPersist: return "persist";
        case Stage::kSweep: return "sweep";
    }
    return "?";
}

double RunConfig::tolerance(const std::string& name, double fallback) const {
    auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
}

RunConfig parse_config(const nlohmann::json& j) {
    RunConfig cfg;
    if (!j.contains("stage") || !j["stage"].is_string()) fail("stage", "expected a string");
    cfg.stage = stage_from_string(j["stage"].get<std::string>());

    if (j.contains("spectral")) {
        const auto& s = j["spectral"];
        const int K = static_cast<int>(require_number(s, "spectral", "n_modes"));
        const int grid = static_cast<int>(s.value("grid_size", 4 * K));
        const double sobolev = s.value("s", 1.0);
        const double dealias = s.value("dealias_factor", 1.5);
        try {
            cfg.spectral = SpectralConfig(K, grid, sobolev, dealias);
        } catch (const ValidationError& e) {
            fail("spectral", e.what());
        }
    }

    cfg.bottom = PeriodicField(cfg.spectral);
    if (!j.contains("physical")) fail("physical", "missing section");
    const auto& p = j["physical"];
    cfg.g = require_number(p, "physical", "g");
    cfg.h = require_number(p, "physical", "h");
    cfg.c = p.value("c", 0.0);
    if (cfg.g <= 0) fail("physical.g", "must be positive");
    if (cfg.h <= 0) fail("physical.h", "must be positive");
    if (p.contains("bottom")) {
        const auto& b = p["bottom"];
        if (b.contains("fourier")) {
            try {
                cfg.bottom = field_from_json({{"coeffs", b["fourier"]}}, cfg.spectral);
            } catch (const ValidationError& e) {
                fail("physical.bottom.fourier", e.what());
            }
        } else if (b.contains("csv")) {
            cfg.bottom = field_from_csv(b["csv"].get<std::string>(), cfg.spectral);
        } else if (!b.is_null()) {
            fail("physical.bottom", "expected 'fourier' map or 'csv' path");
        }
    }
    if (cfg.bottom.max_abs() >= cfg.h) fail("physical.bottom", "|b|_inf must be below h");

    if (j.contains("tolerances")) {
        for (const auto& [key, value] : j["tolerances"].items()) {
            if (!value.is_number()) fail("tolerances." + key, "expected a number");
            cfg.tolerances[key] = value.get<double>();
        }
    }
    cfg.stage_params = j.value("stage_params", nlohmann::json::object());
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    cfg.seed = j.value("seed", 0ull);
    cfg.workers = j.value("workers", 1);
    if (cfg.workers < 1) fail("workers", "must be >= 1");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config: JSON parse error: ") + e.what());
    }
    return parse_config(j);
}

void run(const RunConfig& config) {
    const auto dir = resolve_output_dir(config);
    ManifestBuilder mb;
    switch (config.stage) {
        case Stage::kRegionMap: run_region_map(config, dir, mb); break;
        case Stage::kTrivialContinue: run_trivial_continue(config, dir, mb); break;
        case Stage::kStokesBranch: run_stokes_branch(config, dir, mb); break;
        case Stage::kPersist: run_persist(config, dir, mb); break;
        case Stage::kSweep: run_sweep(config, dir, mb); break;
    }
    // Register the CSV artifacts written by the stage.
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv") mb.add_file(entry.path());
    }
    write_manifest(config, dir, mb, config_to_canonical_json(config));
}

int run_with_exit_code(const RunConfig& config, std::string* message) {
    try {
        run(config);
        return 0;
    } catch (const ValidationError& e) {
        if (message) *message = e.what();
        return kExitValidation;
    } catch (const ConvergenceError& e) {
        if (message) *message = e.what();
        return kExitConvergence;
    } catch (const ResolutionError& e) {
        if (message) *message = e.what();
        return kExitResolution;
    }
}

}  // namespace sww
