#include "vortex/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vortex/errors.hpp"
#include "vortex/futaki.hpp"
#include "vortex/gmres.hpp"
#include "vortex/radial.hpp"

namespace vortex {

InitStrategy parse_init_strategy(const std::string& name) {
    if (name == "flat") return InitStrategy::Flat;
    if (name == "radial_seed") return InitStrategy::RadialSeed;
    throw InvalidArgument("unknown init strategy '" + name + "' (expected flat or radial_seed)");
}

std::string to_string(InitStrategy s) { return s == InitStrategy::Flat ? "flat" : "radial_seed"; }

void SolveOptions::validate() const {
    if (max_newton_iters < 1) throw InvalidArgument("max_newton_iters must be >= 1");
    if (!(newton_tol > 0.0)) throw InvalidArgument("newton_tol must be positive");
    if (!(linear_tol > 0.0)) throw InvalidArgument("linear_tol must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw InvalidArgument("damping must lie in (0, 1]");
    if (continuation_steps < 0) throw InvalidArgument("continuation_steps must be >= 0");
    if (krylov_restart < 1 || krylov_max_iters < 1) throw InvalidArgument("Krylov limits must be >= 1");
    if (radial_nodes != 0 && radial_nodes < 8) throw InvalidArgument("radial_nodes must be 0 or >= 8");
}

double bradlow_check(const VortexConfig& config) {
    return config.tau * config.tau * config.volume - 4.0 * pi * config.N;
}

Residuals residuals(const ScalarField& f, const ScalarField& eta, const VortexConfig& config,
                    const SphereGrid& grid) {
    require_matching_volume(config, grid);
    const double tau2 = config.tau * config.tau;
    const double V = grid.volume();
    const Eigen::ArrayXd w = eta.values.exp();
    const Eigen::ArrayXd e = f.values.exp() * higgs_density(config, grid).values;
    const Eigen::ArrayXd source = w * (e - tau2);

    Residuals r;
    r.r1 = ScalarField(laplacian_g0(f, grid).values - source - 4.0 * pi * config.N / V);
    const ScalarField coupled(eta.values + (config.a / tau2) * e);
    r.r2 = ScalarField(laplacian_g0(coupled, grid).values - 8.0 * pi / V - config.a * source);
    return r;
}

Residuals linearized_residuals(const ScalarField& f, const ScalarField& eta, const ScalarField& df,
                               const ScalarField& deta, const VortexConfig& config,
                               const SphereGrid& grid) {
    require_matching_volume(config, grid);
    const double tau2 = config.tau * config.tau;
    const Eigen::ArrayXd w = eta.values.exp();
    const Eigen::ArrayXd e = f.values.exp() * higgs_density(config, grid).values;
    // d[e^eta (e^f Phi - tau^2)] = W E df + W (E - tau^2) deta
    const Eigen::ArrayXd dsource = w * e * df.values + w * (e - tau2) * deta.values;

    Residuals j;
    j.r1 = ScalarField(laplacian_g0(df, grid).values - dsource);
    const ScalarField dcoupled(deta.values + (config.a / tau2) * e * df.values);
    j.r2 = ScalarField(laplacian_g0(dcoupled, grid).values - config.a * dsource);
    return j;
}

namespace {

double sup(const ScalarField& x) { return x.values.abs().maxCoeff(); }

ScalarField symmetrize(const ScalarField& x, const SphereGrid& grid) {
    return ScalarField(0.5 * (x.values + reflect(x, grid).values));
}

// Newton state: band-limited f and eta plus the bordering multiplier.
struct State {
    ScalarField f;
    ScalarField eta;
    double mu = 0.0;
};

struct Evaluation {
    Residuals nodal;
    ScalarField p1; // band-projected first residual
    ScalarField p2; // band-projected second residual plus mu
    double r3 = 0.0; // relative volume defect
    double merit = 0.0;
    bool finite = false;
};

Evaluation evaluate(const State& s, const VortexConfig& config, const SphereGrid& grid) {
    Evaluation ev;
    ev.nodal = residuals(s.f, s.eta, config, grid);
    ev.p1 = band_project(ev.nodal.r1, grid);
    ev.p2 = ScalarField(band_project(ev.nodal.r2, grid).values + s.mu);
    const Eigen::ArrayXd& q = grid.weights();
    ev.r3 = (q * s.eta.values.exp()).sum() - 1.0;
    ev.merit = std::sqrt((q * ev.p1.values.square()).sum() + (q * ev.p2.values.square()).sum() +
                         ev.r3 * ev.r3);
    ev.finite = std::isfinite(ev.merit) && ev.nodal.r1.all_finite() && ev.nodal.r2.all_finite();
    return ev;
}

ScalarField initial_f(const VortexConfig& config, const SphereGrid& grid) {
    const double mean_phi = (grid.weights() * higgs_density(config, grid).values).sum();
    return ScalarField::constant(grid.size(), std::log(config.tau * config.tau) - std::log(mean_phi));
}

State initial_state(const VortexConfig& config, const SphereGrid& grid, const SolveOptions& opts) {
    State s;
    if (opts.init_strategy == InitStrategy::Flat) {
        s.f = initial_f(config, grid);
        s.eta = ScalarField::constant(grid.size(), 0.0);
        return s;
    }
    if (!config.balanced()) throw InvalidArgument("radial_seed initialization requires N == 2 ell");
    const int nodes = opts.radial_nodes > 0 ? opts.radial_nodes : std::max(16, grid.n_theta() / 2);
    const RadialProfile profile = radial_oracle(config, nodes);
    Eigen::ArrayXd f(grid.size()), eta(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        f[k] = profile.f_at(grid.theta()[k]);
        eta[k] = profile.eta_at(grid.theta()[k]);
    }
    s.f = band_project(ScalarField(f), grid);
    s.eta = normalize_volume(band_project(ScalarField(eta), grid), grid);
    return s;
}

class NewtonStage {
public:
    NewtonStage(const VortexConfig& config, const SphereGrid& grid, const SolveOptions& opts)
        : config_(config), grid_(grid), opts_(opts), n_(static_cast<Eigen::Index>(grid.size())),
          tau2_(config.tau * config.tau), phi_(higgs_density(config, grid).values) {}

    // Returns true once both nodal residuals are within tolerance.
    bool run(State& s, std::vector<IterationRecord>& history, int& iterations, std::string& message) {
        Evaluation ev = evaluate(s, config_, grid_);
        for (int it = 0;; ++it) {
            if (!ev.finite) {
                message = "non-finite residual";
                return false;
            }
            if (sup(ev.nodal.r1) <= opts_.newton_tol && sup(ev.nodal.r2) <= opts_.newton_tol) {
                message = "converged";
                return true;
            }
            if (it >= opts_.max_newton_iters) {
                message = "Newton iteration limit reached";
                return false;
            }

            linearize_at(s);
            Eigen::VectorXd rhs(2 * n_ + 1);
            rhs.head(n_) = -ev.p1.values.matrix();
            rhs.segment(n_, n_) = -ev.p2.values.matrix();
            rhs[2 * n_] = -ev.r3;
            Eigen::VectorXd delta;
            const LinearOperator op = [this](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
                apply(v, out);
            };
            const LinearOperator pc = [this](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
                precondition(v, out);
            };
            const KrylovStats ks = gmres(op, pc, rhs, delta, opts_.linear_tol, opts_.krylov_restart,
                                         opts_.krylov_max_iters);

            ScalarField df(delta.head(n_).array());
            ScalarField deta(delta.segment(n_, n_).array());
            if (config_.balanced()) {
                df = symmetrize(df, grid_);
                deta = symmetrize(deta, grid_);
            }
            const double dmu = delta[2 * n_];

            double lambda = opts_.damping;
            bool accepted = false;
            State trial;
            Evaluation trial_ev;
            for (int k = 0; k < 20; ++k) {
                trial.f = ScalarField(s.f.values + lambda * df.values);
                trial.eta = ScalarField(s.eta.values + lambda * deta.values);
                trial.mu = s.mu + lambda * dmu;
                trial_ev = evaluate(trial, config_, grid_);
                if (trial_ev.finite && trial_ev.merit < ev.merit) {
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!accepted) {
                message = "line search stagnated";
                return false;
            }
            trial.eta = normalize_volume(trial.eta, grid_);
            s = std::move(trial);
            ev = evaluate(s, config_, grid_);
            ++iterations;

            IterationRecord rec;
            rec.iteration = iterations;
            rec.volume = grid_.volume();
            rec.residual_1 = sup(ev.nodal.r1);
            rec.residual_2 = sup(ev.nodal.r2);
            rec.merit = ev.merit;
            rec.step_length = lambda;
            rec.krylov_iterations = ks.iterations;
            rec.krylov_residual = ks.relative_residual;
            history.push_back(rec);
        }
    }

private:
    void linearize_at(const State& s) {
        f_ = s.f;
        eta_ = s.eta;
        w_ = s.eta.values.exp();
        e_ = s.f.values.exp() * phi_;
        const Eigen::ArrayXd& q = grid_.weights();
        shift_ = std::max((q * w_ * e_).sum(), 1e-12);
    }

    double mean(const Eigen::ArrayXd& x) const { return (grid_.weights() * x).sum(); }

    void apply(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
        const ScalarField df(v.head(n_).array());
        const ScalarField deta(v.segment(n_, n_).array());
        const Residuals j = linearized_residuals(f_, eta_, df, deta, config_, grid_);
        out.resize(2 * n_ + 1);
        out.head(n_) = band_project(j.r1, grid_).values.matrix();
        out.segment(n_, n_) = (band_project(j.r2, grid_).values + v[2 * n_]).matrix();
        out[2 * n_] = mean(w_ * deta.values);
    }

    // Block-triangular approximation of the inverse Jacobian: the first
    // equation is inverted with the mean source coefficient, the second
    // with the Poisson pseudo-inverse; the constant part of deta is fixed by
    // the volume row and the mean of the second equation by the multiplier.
    void precondition(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
        const Eigen::ArrayXd b1 = v.head(n_).array();
        const Eigen::ArrayXd b2 = v.segment(n_, n_).array();
        const double b3 = v[2 * n_];

        const ScalarField df = shifted_poisson_solve(ScalarField(b1), shift_, grid_);
        const double dmu = mean(b2);
        const ScalarField lifted = poisson_solve_g0(ScalarField(b2 - dmu), grid_, 1.0);
        const Eigen::ArrayXd coupling = band_project(ScalarField(e_ * df.values), grid_).values;
        Eigen::ArrayXd deta = lifted.values - (config_.a / tau2_) * (coupling - mean(coupling));
        deta -= mean(deta);
        deta += (b3 - mean(w_ * deta)) / mean(w_);

        out.resize(2 * n_ + 1);
        out.head(n_) = df.values.matrix();
        out.segment(n_, n_) = deta.matrix();
        out[2 * n_] = dmu;
    }

    const VortexConfig& config_;
    const SphereGrid& grid_;
    const SolveOptions& opts_;
    Eigen::Index n_;
    double tau2_;
    Eigen::ArrayXd phi_;
    ScalarField f_, eta_;
    Eigen::ArrayXd w_, e_;
    double shift_ = 1.0;
};

} // namespace

SolveResult solve_coupled(const VortexConfig& config, const SphereGrid& grid, const SolveOptions& opts) {
    opts.validate();
    require_matching_volume(config, grid);
    const double margin = bradlow_check(config);
    if (margin <= 1e-12 * 4.0 * pi * config.N) {
        std::ostringstream msg;
        msg << "Bradlow bound violated: tau^2 V - 4 pi N = " << margin << " must be positive";
        throw BradlowRefusal(msg.str(), margin);
    }

    SolveResult result;
    result.certificate = emh_futaki_closed(config);
    result.obstructed = std::abs(result.certificate) > obstruction_threshold(config);
    result.conserved_target = margin;

    const int stages = opts.continuation_steps;
    State state;
    bool converged = false;
    for (int k = 0; k <= stages; ++k) {
        const double vk = stages == 0 ? config.volume
                                      : config.volume * (1.0 + double(stages - k) / double(stages));
        const VortexConfig ck = VortexConfig::make(config.N, config.ell, config.tau, vk);
        const SphereGrid gk = grid.with_volume(vk);
        if (k == 0) state = initial_state(ck, gk, opts);
        NewtonStage stage(ck, gk, opts);
        converged = stage.run(state, result.history, result.iterations, result.message);
        if (!converged && k < stages && result.message != "Newton iteration limit reached") break;
    }

    result.f = state.f;
    result.eta = state.eta;
    result.multiplier = state.mu;
    result.converged = converged;
    const Residuals r = residuals(state.f, state.eta, config, grid);
    result.residual_1 = sup(r.r1);
    result.residual_2 = sup(r.r2);
    const Eigen::ArrayXd& q = grid.weights();
    const double V = grid.volume();
    result.volume = V * (q * state.eta.values.exp()).sum();
    result.conserved_integral =
        V * (q * (state.eta.values + state.f.values).exp() * higgs_density(config, grid).values).sum();
    if (converged) result.futaki_at_solution = emh_futaki(state.eta, state.f, config, grid, 1e-8);
    return result;
}

} // namespace vortex
