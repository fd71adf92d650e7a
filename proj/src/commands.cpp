#include "vortex/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "vortex/errors.hpp"
#include "vortex/futaki.hpp"
#include "vortex/radial.hpp"

namespace vortex {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json to_json(cdouble z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

struct Record {
    std::string name;
    std::string anchor;
    json value;
    json expected;
    double residual = 0.0;
    double tolerance = 0.0;
    json extra = json::object();

    bool pass() const { return std::isfinite(residual) && residual <= tolerance; }

    json to_json() const {
        json j = {{"name", name},           {"anchor", anchor},       {"value", value},
                  {"expected", expected},   {"residual", residual},   {"tolerance", tolerance},
                  {"status", pass() ? "PASS" : "FAIL"}};
        for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
        return j;
    }
};

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

json config_json(const RunConfig& run) {
    const VortexConfig& c = run.config;
    return {{"N", c.N}, {"ell", c.ell}, {"tau", c.tau}, {"V", c.volume}, {"a", c.a},
            {"n_theta", run.n_theta}, {"n_phi", run.n_phi}};
}

// Collects records and writes them on request; file writes never depend on
// the wall clock except meta.json.
class Report {
public:
    Report(const RunConfig& run, std::string command) : run_(run), command_(std::move(command)) {
        dir_ = run.output_dir.empty() ? fs::path("vortex_out") : fs::path(run.output_dir);
        fs::create_directories(dir_);
    }

    void add(Record r, std::ostream& log) {
        log << std::left << std::setw(28) << r.name << (r.pass() ? " PASS" : " FAIL")
            << "  residual=" << std::setprecision(3) << std::scientific << r.residual
            << "  tol=" << r.tolerance << std::defaultfloat << "\n";
        records_.push_back(std::move(r));
    }

    bool all_pass() const {
        return std::all_of(records_.begin(), records_.end(), [](const Record& r) { return r.pass(); });
    }

    std::ofstream open(const std::string& name) const {
        std::ofstream out(dir_ / name);
        if (!out) throw Error("cannot write " + (dir_ / name).string());
        out << std::setprecision(17);
        return out;
    }

    void write(const std::string& stem) const {
        std::ofstream jl = open(stem + ".jsonl");
        for (const Record& r : records_) jl << r.to_json().dump() << "\n";
        json meta = {{"command", command_}, {"timestamp", utc_timestamp()}, {"config", config_json(run_)}};
        open("meta.json") << meta.dump(2) << "\n";
    }

    const std::vector<Record>& records() const { return records_; }

private:
    const RunConfig& run_;
    std::string command_;
    fs::path dir_;
    std::vector<Record> records_;
};

double max_abs(const Eigen::ArrayXcd& x) { return x.abs().maxCoeff(); }

SphereGrid make_grid(const RunConfig& run) {
    return SphereGrid::build(run.n_theta, run.n_phi, run.config.volume);
}

json futaki_json(const FutakiReport& rep) {
    json samples = json::array();
    for (const auto& s : rep.samples) samples.push_back({{"sample", s.descriptor}, {"value", to_json(s.value)}});
    return {{"max_spread", rep.max_spread},
            {"max_real_part", rep.max_real_part},
            {"obstruction_threshold", rep.obstruction_threshold},
            {"verdict", rep.obstructed ? "OBSTRUCTED" : "UNOBSTRUCTED"},
            {"samples", samples}};
}

Record futaki_record(const FutakiReport& rep, const std::string& name) {
    Record r{name, "Futaki invariant: independence of (eta, f) and closed form",
             to_json(rep.value), to_json(rep.closed_form)};
    r.residual = std::max({rep.max_spread, std::abs(rep.value - rep.closed_form), rep.max_real_part});
    r.tolerance = rep.tolerance;
    r.extra = futaki_json(rep);
    return r;
}

} // namespace

std::string resolve_output_dir(const std::string& flag, const RunConfig& run) {
    if (!flag.empty()) return flag;
    if (!run.output_dir.empty()) return run.output_dir;
    if (const char* env = std::getenv("VORTEX_OUT_DIR"); env && *env) return env;
    return "vortex_out";
}

int cmd_verify(const RunConfig& run, std::ostream& log) {
    const VortexConfig& c = run.config;
    const SphereGrid grid = make_grid(run);
    const double V = c.volume;
    const NodeMask band = interior_band(grid);
    Report report(run, "verify");
    const std::size_t n = grid.size();

    {
        const double area = integrate(ScalarField::constant(n, 1.0), AreaForm::Omega0, grid);
        Record r{"volume", "total area of the round metric", area, V};
        r.residual = std::abs(area - V) / V;
        r.tolerance = run.tolerance("quadrature");
        report.add(r, log);
    }
    {
        const double mass = integrate(ScalarField::constant(n, 1.0), AreaForm::FubiniStudy, grid);
        Record r{"fs_mass", "total mass of the Fubini-Study form", mass, 2.0 * pi};
        r.residual = std::abs(mass - 2.0 * pi) / (2.0 * pi);
        r.tolerance = run.tolerance("quadrature");
        report.add(r, log);
    }
    const ScalarField p0 = psi0(c, grid);
    {
        const double value = integrate(p0, AreaForm::FubiniStudy, grid);
        const double expected = pi * (2.0 * c.ell - c.N);
        Record r{"psi0_mean", "integral of the Hamiltonian psi_0 against omega_FS", value, expected};
        r.residual = std::abs(value - expected) / (pi * std::max(1.0, std::abs(2.0 * c.ell - c.N)));
        r.tolerance = run.tolerance("quadrature");
        report.add(r, log);
    }
    {
        const Eigen::ArrayXd height = (grid.abs_z2() - 1.0) / (grid.abs_z2() + 1.0);
        const ScalarField integrand(higgs_density(c, grid).values * (p0.values - height));
        const double value = integrate(integrand, AreaForm::FubiniStudy, grid);
        Record r{"mixed_integral", "integral of Phi (psi_0 - height) against omega_FS", value, 0.0};
        r.residual = std::abs(value);
        r.tolerance = run.tolerance("mixed_integral") * pi;
        report.add(r, log);
    }
    const ComplexField phi0 = phi_eta(ScalarField::constant(n, 0.0), grid);
    {
        const Eigen::ArrayXcd lap_fs = (V / (2.0 * pi)) * laplacian_g0(phi0, grid).values;
        Record r{"eigenfunction", "phi_0 is a -4 eigenfunction of the Fubini-Study Laplacian", 0.0, 0.0};
        r.residual = max_abs(lap_fs + 4.0 * phi0.values);
        r.value = r.residual;
        r.tolerance = run.tolerance("eigenfunction") * V / (2.0 * pi);
        report.add(r, log);
    }
    {
        const Eigen::ArrayXcd expected = cdouble(0.0, -V / (4.0 * pi)) * grid.cos_theta().cast<cdouble>();
        Record r{"phi0_closed_form", "phi_0 = -i (V / 4 pi) cos(theta)", 0.0, 0.0};
        r.residual = max_abs(phi0.values - expected);
        r.value = r.residual;
        r.tolerance = run.tolerance("structural");
        report.add(r, log);
    }
    {
        Record r{"poincare_lelong", "Laplacian log Phi = -4 pi N / V away from the zeros", 0.0,
                 -4.0 * pi * c.N / V};
        r.residual = poincare_lelong_check(c, grid);
        r.value = r.residual;
        r.tolerance = run.tolerance("poincare_lelong");
        report.add(r, log);
    }
    {
        Record r{"psi0_dbar", "dbar psi_0 = i N iota_v omega_FS", 0.0, 0.0};
        r.residual = psi0_dbar_residual(c, grid, band);
        r.value = r.residual;
        r.tolerance = run.tolerance("structural");
        report.add(r, log);
    }

    const std::size_t n_structural = std::min<std::size_t>(5, run.seeds.size());
    double psi = 0.0, section = 0.0, mixed = 0.0, potential = 0.0, classical = 0.0;
    for (std::size_t i = 0; i < run.seeds.size(); ++i) {
        const std::uint64_t s = run.seeds[i];
        const ScalarField eta = normalize_volume(random_smooth_field(grid, 2 * s + 1), grid);
        if (i < n_structural) {
            const ScalarField f = random_smooth_field(grid, 2 * s + 2);
            psi = std::max(psi, psi_dbar_residual(f, c, grid, band));
            section = std::max(section, psi_section_residual(f, c, grid, band));
            mixed = std::max(mixed, mixed_dbar_residual(f, c, grid, band));
            potential = std::max(potential, phi_eta_dbar_residual(phi_eta(eta, grid), eta, grid, band));
        }
        classical = std::max(classical, std::abs(classical_futaki(eta, grid)));
    }
    const json seeds_used = std::vector<std::uint64_t>(run.seeds.begin(), run.seeds.begin() + n_structural);
    auto seeded = [&](const std::string& name, const std::string& anchor, double residual,
                      const std::string& tol_name, double scale, const json& seeds) {
        Record r{name, anchor, residual, 0.0};
        r.residual = residual;
        r.tolerance = run.tolerance(tol_name) * scale;
        r.extra = {{"seeds", seeds}};
        report.add(r, log);
    };
    seeded("psi_dbar", "-i dbar psi_f = iota_v (i dbar d log h)", psi, "structural", 1.0, seeds_used);
    seeded("psi_section", "iota_v (d + d log h) z^ell = psi_f z^ell", section, "structural", 1.0, seeds_used);
    seeded("mixed_dbar", "dbar of psi_f (e^f Phi - tau^2)", mixed, "structural", 1.0, seeds_used);
    seeded("phi_eta_dbar", "dbar phi_eta = e^eta iota_v omega_0", potential, "structural", 1.0, seeds_used);
    seeded("classical_futaki", "classical Futaki invariant vanishes on the sphere", classical,
           "classical_futaki", V, run.seeds);

    {
        const ScalarField zero = ScalarField::constant(n, 0.0);
        const cdouble value = emh_futaki(zero, zero, c, grid);
        const cdouble closed = emh_futaki_closed(c);
        Record r{"emh_futaki_zero", "Futaki invariant at (eta, f) = (0, 0) against the closed form",
                 to_json(value), to_json(closed)};
        r.residual = std::abs(value - closed);
        r.tolerance = run.tolerance("emh_closed_form") * (1.0 + std::abs(closed));
        report.add(r, log);
    }
    {
        const double curvature = 4.0 * pi / V;
        const double total = integrate(ScalarField::constant(n, 2.0 * curvature), AreaForm::Omega0, grid);
        Record r{"gauss_bonnet", "integral of 2 K_{g_0} omega_0 = 8 pi", total, 8.0 * pi};
        r.residual = std::abs(total - 8.0 * pi);
        r.tolerance = run.tolerance("gauss_bonnet");
        report.add(r, log);
    }
    {
        bool rejected = false;
        try {
            VortexConfig::make(c.N, c.ell, c.tau, V, 2.0 / c.N + 0.25);
        } catch (const InvalidArgument&) {
            rejected = true;
        }
        Record r{"quantization", "coupling must equal a = 2/N", rejected ? "rejected" : "accepted",
                 "rejected"};
        r.residual = rejected ? 0.0 : 1.0;
        r.tolerance = 0.0;
        report.add(r, log);
    }

    report.write("verify");
    std::ofstream csv = report.open("verify.csv");
    csv << "name,residual,tolerance,status\n";
    for (const Record& r : report.records()) {
        csv << r.name << "," << r.residual << "," << r.tolerance << "," << (r.pass() ? "PASS" : "FAIL") << "\n";
    }
    const bool ok = report.all_pass();
    log << (ok ? "verify: all identities PASS" : "verify: FAIL") << "\n";
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_futaki(const RunConfig& run, bool sweep_ell, std::ostream& log) {
    Report report(run, sweep_ell ? "futaki --sweep ell" : "futaki");
    FutakiOptions opts;
    opts.invariance_tol = run.tolerance("futaki_invariance");
    const VortexConfig& c = run.config;
    const SphereGrid grid = make_grid(run);

    if (!sweep_ell) {
        const FutakiReport rep = invariance_report(c, grid, run.seeds, opts);
        report.add(futaki_record(rep, "futaki_invariance"), log);
        report.write("futaki");
        std::ofstream csv = report.open("futaki_samples.csv");
        csv << "index,sample,re,im\n";
        for (std::size_t i = 0; i < rep.samples.size(); ++i) {
            const auto& s = rep.samples[i];
            csv << i << "," << s.descriptor << "," << s.value.real() << "," << s.value.imag() << "\n";
        }
        log << "F = " << rep.value.real() << " + " << rep.value.imag() << "i (closed form "
            << rep.closed_form.imag() << "i)\n";
        log << (rep.obstructed ? "OBSTRUCTED" : "UNOBSTRUCTED") << "\n";
        return report.all_pass() ? kExitOk : kExitCheckFailed;
    }

    std::ofstream csv = report.open("futaki_sweep.csv");
    csv << "ell,re,im,closed_im,n_minus_2ell,verdict\n";
    for (int ell = 0; ell <= c.N; ++ell) {
        const VortexConfig ce = VortexConfig::make(c.N, ell, c.tau, c.volume);
        const FutakiReport rep = invariance_report(ce, grid, run.seeds, opts);
        Record r = futaki_record(rep, "futaki_sweep[ell=" + std::to_string(ell) + "]");
        r.extra["ell"] = ell;
        report.add(r, log);
        const char* verdict = rep.obstructed ? "OBSTRUCTED" : "UNOBSTRUCTED";
        csv << ell << "," << rep.value.real() << "," << rep.value.imag() << "," << rep.closed_form.imag() << ","
            << (c.N - 2 * ell) << "," << verdict << "\n";
        log << "ell=" << ell << "  Im F = " << rep.value.imag() << "  " << verdict << "\n";
    }
    report.write("futaki");
    return report.all_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_solve(const RunConfig& run, std::ostream& log) {
    const VortexConfig& c = run.config;
    const SphereGrid grid = make_grid(run);
    Report report(run, "solve");

    SolveResult result;
    try {
        result = solve_coupled(c, grid, run.solver);
    } catch (const BradlowRefusal& e) {
        Record r{"bradlow", "volume must exceed 4 pi N / tau^2", e.margin(), "> 0"};
        r.residual = 1.0;
        r.tolerance = 0.0;
        r.extra = {{"margin", e.margin()}};
        report.add(r, log);
        report.write("solve");
        log << "Bradlow refusal: margin tau^2 V - 4 pi N = " << e.margin() << "\n";
        return kExitBradlow;
    }

    {
        std::ofstream trace = report.open("trace.csv");
        trace << "iteration,volume,residual_1,residual_2,merit,step_length,krylov_iterations,krylov_residual\n";
        for (const auto& h : result.history) {
            trace << h.iteration << "," << h.volume << "," << h.residual_1 << "," << h.residual_2 << ","
                  << h.merit << "," << h.step_length << "," << h.krylov_iterations << ","
                  << h.krylov_residual << "\n";
        }
        std::ofstream fields = report.open("fields.csv");
        fields << "theta,phi,f,eta\n";
        for (std::size_t k = 0; k < grid.size(); ++k) {
            fields << grid.theta()[k] << "," << grid.phi()[k] << "," << result.f.values[k] << ","
                   << result.eta.values[k] << "\n";
        }
    }
    for (const auto& h : result.history) {
        log << "iter " << h.iteration << "  residual_1=" << std::scientific << std::setprecision(3)
            << h.residual_1 << "  residual_2=" << h.residual_2 << "  step=" << std::defaultfloat
            << h.step_length << "\n";
    }

    const json certificate = to_json(result.certificate);
    if (result.obstructed) {
        Record r{"certificate", "closed-form Futaki value i a (V - 4 pi N / tau^2)(N - 2 ell)", certificate,
                 to_json(emh_futaki_closed(c))};
        r.residual = result.converged ? 1.0 : 0.0;
        r.tolerance = 0.0;
        r.extra = {{"converged", result.converged}, {"verdict", "OBSTRUCTED"}, {"message", result.message},
                   {"certificate", certificate}};
        report.add(r, log);
        report.write("solve");
        log << "OBSTRUCTED: certificate F = " << result.certificate.real() << " + " << result.certificate.imag()
            << "i; Newton: " << result.message << "\n";
        return result.converged ? kExitCheckFailed : kExitObstructed;
    }

    const json solver_info = {{"converged", result.converged}, {"iterations", result.iterations},
                              {"message", result.message}, {"certificate", certificate}};
    {
        Record r{"residual_1", "first equation, nodal sup-norm", result.residual_1, 0.0};
        r.residual = result.residual_1;
        r.tolerance = run.solver.newton_tol;
        r.extra = solver_info;
        report.add(r, log);
    }
    {
        Record r{"residual_2", "second equation, nodal sup-norm", result.residual_2, 0.0};
        r.residual = result.residual_2;
        r.tolerance = run.solver.newton_tol;
        report.add(r, log);
    }
    {
        Record r{"conserved_integral", "integral of e^(eta+f) Phi omega_0 = tau^2 V - 4 pi N",
                 result.conserved_integral, result.conserved_target};
        r.residual = std::abs(result.conserved_integral - result.conserved_target);
        r.tolerance = run.tolerance("conserved_integral");
        report.add(r, log);
    }
    {
        Record r{"futaki_at_solution", "Futaki invariant evaluated at the solution", to_json(result.futaki_at_solution),
                 to_json(cdouble(0.0, 0.0))};
        r.residual = result.converged ? std::abs(result.futaki_at_solution) : INFINITY;
        r.tolerance = run.tolerance("futaki_at_solution");
        report.add(r, log);
    }
    {
        const int nodes = std::max(32, run.n_theta / 2);
        const RadialProfile profile = radial_oracle(c, nodes);
        double diff = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double th = grid.theta()[k];
            diff = std::max({diff, std::abs(profile.f_at(th) - result.f.values[k]),
                             std::abs(profile.eta_at(th) - result.eta.values[k])});
        }
        Record r{"radial_match", "sup-norm distance to the independent axisymmetric solution", diff, 0.0};
        r.residual = profile.converged ? diff : INFINITY;
        r.tolerance = run.tolerance("radial_match");
        r.extra = {{"radial_nodes", nodes}, {"radial_residual", profile.residual}};
        report.add(r, log);
    }
    report.write("solve");
    const bool ok = result.converged && report.all_pass();
    log << (ok ? "solve: converged" : "solve: FAIL (" + result.message + ")") << "\n";
    return ok ? kExitOk : kExitCheckFailed;
}

} // namespace vortex
