#ifndef ENTLAB_CLI_EXPERIMENTS_HPP
#define ENTLAB_CLI_EXPERIMENTS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "entlab/dmrg.hpp"
#include "entlab/harmonic_chain.hpp"
#include "entlab/quantum_state.hpp"
#include "entlab/random.hpp"
#include "entlab/rindler.hpp"
#include "entlab_cli/config.hpp"
#include "entlab_cli/report.hpp"

namespace entlab::cli {

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index must
/// write only its own output slot.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body)
{
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads)
          body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool)
    t.join();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

struct Experiment {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
  std::function<Table(const Params&, std::uint64_t seed, unsigned threads)> run;
  /// Recomputes the pass/fail flags from the emitted rows.
  std::function<std::vector<Check>(const Params&, const Table&)> check;
};

namespace detail {

inline std::int64_t as_int(Eigen::Index v) { return static_cast<std::int64_t>(v); }

inline Check upper(std::string name, double value, double bound) { return {std::move(name), value <= bound, value, bound}; }
inline Check lower(std::string name, double value, double bound) { return {std::move(name), value >= bound, value, bound}; }

inline QuadraticPotential fixed_chain(std::size_t n, double mass)
{
  ChainSpec spec;
  spec.n_sites = n;
  spec.mass = mass;
  return build_potential(spec);
}

// --- symmetry -------------------------------------------------------------

inline Experiment symmetry()
{
  Experiment e;
  e.name = "symmetry";
  e.summary = "entropies of the two halves of random pure states";
  e.params = {{"trials", "200", "number of random states"},
              {"max_dim", "10", "factor dimensions drawn uniformly from [2, max_dim]"},
              {"tol", "1e-9", "bound on |S_L - S_R|"}};
  e.run = [](const Params& p, std::uint64_t seed, unsigned threads) {
    const auto trials = static_cast<std::size_t>(p.integer("trials", 1));
    const auto max_dim = p.integer("max_dim", 2);
    std::vector<std::vector<Cell>> rows(trials);
    parallel_for(trials, threads, [&](std::size_t i) {
      auto rng = trial_rng(seed, i);
      std::uniform_int_distribution<std::int64_t> dim(2, max_dim);
      const auto dl = dim(rng);
      const auto dr = dim(rng);
      const auto state = random_state(dl, dr, rng);
      const double sl = von_neumann_entropy(reduced_density_left(state));
      const double sr = von_neumann_entropy(reduced_density_right(state));
      rows[i] = {static_cast<std::int64_t>(i), dl, dr, sl, sr, std::abs(sl - sr)};
    });
    Table t;
    t.columns = {"trial", "dim_left", "dim_right", "entropy_left", "entropy_right", "abs_diff"};
    for (auto& r : rows)
      t.add(std::move(r));
    return t;
  };
  e.check = [](const Params& p, const Table& t) {
    double worst = 0.0;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      worst = std::max(worst, std::abs(t.number(i, "entropy_left") - t.number(i, "entropy_right")));
    return std::vector<Check>{upper("max_abs_entropy_difference", worst, p.real("tol"))};
  };
  return e;
}

// --- growth ---------------------------------------------------------------

inline Experiment growth()
{
  Experiment e;
  e.name = "growth";
  e.summary = "S'_L + S'_R >= S_L + S_R for random mixed product states under random unitaries";
  e.params = {{"trials", "200", "number of trials"},
              {"dim_left", "3", "left factor dimension"},
              {"dim_right", "3", "right factor dimension"},
              {"tol", "1e-9", "allowed negative slack"}};
  e.run = [](const Params& p, std::uint64_t seed, unsigned threads) {
    const auto trials = static_cast<std::size_t>(p.integer("trials", 1));
    const auto dl = p.integer("dim_left", 1);
    const auto dr = p.integer("dim_right", 1);
    std::vector<std::vector<Cell>> rows(trials);
    parallel_for(trials, threads, [&](std::size_t i) {
      auto rng = trial_rng(seed, i);
      const auto rho_l = random_density(dl, rng);
      const auto rho_r = random_density(dr, rng);
      const auto u = random_unitary(dl * dr, rng);
      const auto after = evolve_product(rho_l, rho_r, u);
      const double sl = von_neumann_entropy(rho_l);
      const double sr = von_neumann_entropy(rho_r);
      const double sl2 = von_neumann_entropy(after.left);
      const double sr2 = von_neumann_entropy(after.right);
      rows[i] = {static_cast<std::int64_t>(i), sl, sr, sl2, sr2, (sl2 + sr2) - (sl + sr)};
    });
    Table t;
    t.columns = {"trial", "entropy_left", "entropy_right", "entropy_left_after", "entropy_right_after", "slack"};
    for (auto& r : rows)
      t.add(std::move(r));
    return t;
  };
  e.check = [](const Params& p, const Table& t) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      worst = std::min(worst, (t.number(i, "entropy_left_after") + t.number(i, "entropy_right_after")) -
                                  (t.number(i, "entropy_left") + t.number(i, "entropy_right")));
    return std::vector<Check>{lower("min_slack", worst, -p.real("tol"))};
  };
  return e;
}

// --- truncation -----------------------------------------------------------

inline Experiment truncation()
{
  Experiment e;
  e.name = "truncation";
  e.summary = "keep-m truncation against the Schmidt tail and random rank-m projections";
  e.params = {{"trials", "50", "number of random states"},
              {"dim_left", "6", "left factor dimension"},
              {"dim_right", "6", "right factor dimension"},
              {"kept", "3", "kept dimension m"},
              {"projections", "200", "random rank-m projections per state"},
              {"tol", "1e-10", "bound on |distance - Schmidt tail|"}};
  e.run = [](const Params& p, std::uint64_t seed, unsigned threads) {
    const auto trials = static_cast<std::size_t>(p.integer("trials", 1));
    const auto dl = p.integer("dim_left", 1);
    const auto dr = p.integer("dim_right", 1);
    const auto m = p.integer("kept", 1);
    const auto projections = p.integer("projections", 1);
    if (m > dl)
      throw UsageError("kept must not exceed dim_left");
    std::vector<std::vector<Cell>> rows(trials);
    parallel_for(trials, threads, [&](std::size_t i) {
      auto rng = trial_rng(seed, i);
      const auto state = random_state(dl, dr, rng);
      const auto t = truncate(state, m);
      const double distance = truncation_distance(state.coeff(), t.projection);
      const auto c = schmidt(state).coefficients;
      double tail = 0.0;
      for (Eigen::Index k = m; k < c.size(); ++k)
        tail += c(k) * c(k);
      double best_random = std::numeric_limits<double>::infinity();
      for (std::int64_t j = 0; j < projections; ++j) {
        const CMatrix q = random_isometry(dl, m, rng);
        best_random = std::min(best_random, truncation_distance(state.coeff(), q * (q.adjoint() * state.coeff())));
      }
      rows[i] = {static_cast<std::int64_t>(i), distance, tail, best_random};
    });
    Table t;
    t.columns = {"trial", "distance", "schmidt_tail", "min_random_distance"};
    for (auto& r : rows)
      t.add(std::move(r));
    return t;
  };
  e.check = [](const Params& p, const Table& t) {
    double worst = 0.0;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      worst = std::max(worst, std::abs(t.number(i, "distance") - t.number(i, "schmidt_tail")));
      margin = std::min(margin, t.number(i, "min_random_distance") - t.number(i, "distance"));
    }
    return std::vector<Check>{upper("max_abs_distance_minus_tail", worst, p.real("tol")),
                              lower("min_random_minus_optimal", margin, 0.0)};
  };
  return e;
}

// --- oracle ---------------------------------------------------------------

inline Experiment oracle()
{
  Experiment e;
  e.name = "oracle";
  e.summary = "single-site entropy and spectrum: Fock brute force against the Gaussian covariance oracle";
  e.params = {{"sites", "2", "chain length (fixed ends)"},
              {"mass", "1", "field mass"},
              {"cutoff", "20", "Fock levels per site d; convergence is checked against 2d"},
              {"levels", "10", "number of top spectrum levels compared"},
              {"tol", "1e-4", "entropy tolerance (agreement and d -> 2d convergence)"},
              {"spectrum_tol", "1e-3", "tolerance on each spectrum level"}};
  e.run = [](const Params& p, std::uint64_t, unsigned) {
    const auto n = static_cast<std::size_t>(p.integer("sites", 2));
    const auto d = p.integer("cutoff", 2);
    const auto levels = static_cast<std::size_t>(p.integer("levels", 1));
    const auto pot = fixed_chain(n, p.positive("mass"));
    const auto gs = ground_state_covariance(pot);
    const double gaussian = block_entropy(gs, BlockRegion{0, 1});
    const auto fock_d = fock_ground_state(pot, d, 1);
    const auto fock_2d = fock_ground_state(pot, 2 * d, 1);
    Table t;
    t.columns = {"quantity", "index", "fock", "gaussian", "abs_diff"};
    for (const auto& [cut, fock] : {std::pair{d, &fock_d}, std::pair{2 * d, &fock_2d}}) {
      const double s = von_neumann_entropy(reduced_density_left(fock->state));
      t.add({std::string("entropy"), as_int(cut), s, gaussian, std::abs(s - gaussian)});
    }
    const auto predicted = entanglement_spectrum(gs, BlockRegion{0, 1}, levels);
    const auto spectrum = reduced_density_left(fock_d.state).eigenvalues(); // ascending
    for (std::size_t k = 0; k < predicted.size() && k < static_cast<std::size_t>(spectrum.size()); ++k) {
      const double f = spectrum(spectrum.size() - 1 - static_cast<Eigen::Index>(k));
      t.add({std::string("level"), static_cast<std::int64_t>(k), f, predicted[k], std::abs(f - predicted[k])});
    }
    return t;
  };
  e.check = [](const Params& p, const Table& t) {
    std::vector<double> entropies;
    double gaussian = 0.0;
    double worst_level = 0.0;
    std::size_t level_rows = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (t.text(i, "quantity") == "entropy") {
        entropies.push_back(t.number(i, "fock"));
        gaussian = t.number(i, "gaussian");
      } else {
        worst_level = std::max(worst_level, std::abs(t.number(i, "fock") - t.number(i, "gaussian")));
        ++level_rows;
      }
    }
    const double tol = p.real("tol");
    return std::vector<Check>{
        upper("cutoff_convergence", std::abs(entropies.at(0) - entropies.at(1)), tol),
        upper("entropy_vs_gaussian", std::abs(entropies.at(0) - gaussian), tol),
        upper("max_spectrum_level_diff", worst_level, p.real("spectrum_tol")),
        lower("spectrum_levels_compared", static_cast<double>(level_rows), static_cast<double>(p.integer("levels", 1)))};
  };
  return e;
}

// --- dmrg -----------------------------------------------------------------

inline Experiment dmrg_experiment()
{
  Experiment e;
  e.name = "dmrg";
  e.summary = "infinite-system DMRG on the oscillator chain against the covariance oracle";
  e.params = {{"length", "20", "target chain length (even)"},
              {"mass", "1", "field mass"},
              {"local_dim", "8", "Fock levels per site d"},
              {"kept", "16", "kept block states m"},
              {"compare_kept", "32", "second m for the truncation-weight comparison (0 disables)"},
              {"energy_tol", "0.01", "relative tolerance on energy per site"},
              {"entropy_tol", "0.05", "relative tolerance on half-chain entropy"},
              {"gs_tol", "1e-9", "superblock eigensolver residual tolerance"}};
  e.run = [](const Params& p, std::uint64_t, unsigned threads) {
    dmrg::DmrgConfig base;
    base.target_length = static_cast<std::size_t>(p.integer("length", 2));
    base.mass = p.positive("mass");
    base.local_dim = p.integer("local_dim", 2);
    base.gs_tolerance = p.positive("gs_tol");
    std::vector<Eigen::Index> ms{p.integer("kept", 1)};
    if (const auto c = p.integer("compare_kept", 0); c > 0)
      ms.push_back(c);
    std::vector<std::vector<dmrg::DmrgIterate>> runs(ms.size());
    parallel_for(ms.size(), threads, [&](std::size_t i) {
      auto c = base;
      c.kept_states = ms[i];
      runs[i] = dmrg::run(c);
    });
    Table t;
    t.columns = {"kept_states", "chain_length", "energy_per_site", "oracle_energy_per_site", "entropy",
                 "oracle_entropy", "truncation_weight", "kept", "solver_iterations"};
    for (std::size_t i = 0; i < ms.size(); ++i)
      for (const auto& it : runs[i]) {
        const auto pot = fixed_chain(it.chain_length, base.mass);
        const double e_oracle = ground_energy(pot) / static_cast<double>(it.chain_length);
        const double s_oracle = block_entropy(ground_state_covariance(pot), BlockRegion::prefix(it.chain_length / 2));
        t.add({as_int(ms[i]), static_cast<std::int64_t>(it.chain_length),
               it.ground_energy / static_cast<double>(it.chain_length), e_oracle, it.half_chain_entropy, s_oracle,
               it.truncation_weight, as_int(it.kept), static_cast<std::int64_t>(it.solver_iterations)});
      }
    return t;
  };
  e.check = [](const Params& p, const Table& t) {
    const double kept = static_cast<double>(p.integer("kept", 1));
    const double compare = static_cast<double>(p.integer("compare_kept", 0));
    const double length = static_cast<double>(p.integer("length", 2));
    auto final_row = [&](double m) -> std::optional<std::size_t> {
      for (std::size_t i = 0; i < t.rows.size(); ++i)
        if (t.number(i, "kept_states") == m && t.number(i, "chain_length") == length)
          return i;
      return std::nullopt;
    };
    std::vector<Check> out;
    const auto r = final_row(kept);
    out.push_back(lower("reached_target_length", r ? length : 0.0, length));
    if (!r)
      return out;
    const double e = t.number(*r, "energy_per_site"), eo = t.number(*r, "oracle_energy_per_site");
    const double s = t.number(*r, "entropy"), so = t.number(*r, "oracle_entropy");
    out.push_back(upper("energy_per_site_rel_err", std::abs(e - eo) / std::abs(eo), p.real("energy_tol")));
    out.push_back(upper("half_chain_entropy_rel_err", std::abs(s - so) / std::abs(so), p.real("entropy_tol")));
    if (compare > 0) {
      const auto rc = final_row(compare);
      const double w = t.number(*r, "truncation_weight");
      out.push_back(upper("weight_at_compare_kept", rc ? t.number(*rc, "truncation_weight") : INFINITY, w));
    }
    return out;
  };
  return e;
}

// --- modes ----------------------------------------------------------------

inline Experiment modes()
{
  Experiment e;
  e.name = "modes";
  e.summary = "angular-wave profile K_{i ell}(m x) sampled for plotting";
  e.params = {{"ell", "8", "angular frequency"},
              {"mass", "1", "field mass"},
              {"x_min", "0.05", "first sample point"},
              {"x_max", "30", "last sample point"},
              {"samples", "1000", "number of sample points"},
              {"grid", "log", "sample spacing: log or linear"}};
  e.run = [](const Params& p, std::uint64_t, unsigned) {
    const rindler::AngularMode mode(p.real("ell"), p.positive("mass"));
    const double lo = p.positive("x_min");
    const double hi = p.positive("x_max");
    const auto n = p.integer("samples", 2);
    const std::string grid = p.text("grid");
    if (!(hi > lo))
      throw UsageError("x_max must exceed x_min");
    if (grid != "log" && grid != "linear")
      throw UsageError("grid must be log or linear");
    Table t;
    t.columns = {"x", "K", "region"};
    for (std::int64_t i = 0; i < n; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(n - 1);
      const double x = grid == "log" ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
      t.add({x, rindler::angular_wave(mode, x),
             std::string(x < mode.turning_point() ? "oscillatory" : "decay")});
    }
    return t;
  };
  e.check = [](const Params& p, const Table& t) {
    const double x_star = p.real("ell") / p.positive("mass");
    double osc = 0.0, decay = 0.0;
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      const bool flip = std::signbit(t.number(i, "K")) != std::signbit(t.number(i - 1, "K"));
      if (!flip)
        continue;
      (t.number(i, "x") <= x_star ? osc : decay) += 1.0;
    }
    std::vector<Check> out;
    if (p.real("ell") >= 2.0 && t.number(0, "x") < x_star)
      out.push_back(lower("oscillatory_sign_changes", osc, 1.0));
    out.push_back(upper("decay_sign_changes", decay, 0.0));
    return out;
  };
  return e;
}

// --- spectrum -------------------------------------------------------------

inline Experiment spectrum()
{
  Experiment e;
  e.name = "spectrum";
  e.summary = "discrete angular spectrum under a Dirichlet wall and its Boltzmann weights at beta = 2 pi";
  e.params = {{"mass", "1", "field mass"},
              {"epsilon", "0.1", "wall position"},
              {"ell_max", "20", "upper end of the frequency range"},
              {"n_max", "5", "highest occupation tabulated per mode"},
              {"residual_tol", "1e-8", "bound on |K_{i ell_n}(m epsilon)|"},
              {"ratio_tol", "1e-12", "relative tolerance on p(n+1)/p(n) = exp(-2 pi ell_n)"}};
  e.run = [](const Params& p, std::uint64_t, unsigned) {
    const double mass = p.positive("mass");
    const double eps = p.positive("epsilon");
    const auto s = rindler::discrete_spectrum(mass, eps, p.positive("ell_max"));
    Table t;
    t.columns = {"mode", "ell", "residual", "occupation", "weight"};
    if (s.empty)
      return t;
    const auto tables = rindler::thermal_weights(s, static_cast<std::size_t>(p.integer("n_max", 1)));
    for (std::size_t k = 0; k < tables.size(); ++k) {
      const double residual = numerics::bessel_K_imag(tables[k].ell, mass * eps);
      for (Eigen::Index n = 0; n < tables[k].p.size(); ++n)
        t.add({static_cast<std::int64_t>(k), tables[k].ell, residual, as_int(n), tables[k].p(n)});
    }
    return t;
  };
  e.check = [](const Params& p, const Table& t) {
    double residual = 0.0, ratio = 0.0, modes = 0.0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      residual = std::max(residual, std::abs(t.number(i, "residual")));
      if (t.number(i, "occupation") == 0.0)
        modes += 1.0;
      // Ratios are exact only between normal (non-subnormal) weights.
      if (i > 0 && t.number(i, "mode") == t.number(i - 1, "mode") &&
          t.number(i, "weight") >= std::numeric_limits<double>::min()) {
        const double q = std::exp(-2.0 * std::numbers::pi * t.number(i, "ell"));
        ratio = std::max(ratio, std::abs(t.number(i, "weight") / t.number(i - 1, "weight") / q - 1.0));
      }
    }
    return std::vector<Check>{lower("modes_found", modes, 1.0), upper("max_abs_residual", residual, p.real("residual_tol")),
                              upper("max_weight_ratio_rel_err", ratio, p.real("ratio_tol"))};
  };
  return e;
}

// --- geom-entropy ---------------------------------------------------------

inline Experiment geometric_entropy()
{
  Experiment e;
  e.name = "geom-entropy";
  e.summary = "entropy of the 2 pi thermal state over the discrete spectrum as the wall approaches the horizon";
  e.params = {{"mass", "1", "field mass"},
              {"ell_max", "20", "upper end of the frequency range"},
              {"epsilons", "0.1,0.05,0.025", "strictly decreasing wall positions"},
              {"increment_tol", "0.3", "allowed relative spread of successive entropy increments"}};
  e.run = [](const Params& p, std::uint64_t, unsigned threads) {
    const double mass = p.positive("mass");
    const double ell_max = p.positive("ell_max");
    const auto eps = p.list("epsilons");
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] < eps[i - 1])))
        throw UsageError("epsilons must be positive and strictly decreasing");
    std::vector<rindler::AngularSpectrum> spectra(eps.size());
    parallel_for(eps.size(), threads, [&](std::size_t i) { spectra[i] = rindler::discrete_spectrum(mass, eps[i], ell_max); });
    Table t;
    t.columns = {"epsilon", "modes", "entropy"};
    for (std::size_t i = 0; i < eps.size(); ++i)
      t.add({eps[i], static_cast<std::int64_t>(spectra[i].ell_values.size()), rindler::geometric_entropy(spectra[i])});
    return t;
  };
  e.check = [](const Params& p, const Table& t) {
    double min_step = std::numeric_limits<double>::infinity();
    double spread = 0.0;
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      const double d = t.number(i, "entropy") - t.number(i - 1, "entropy");
      min_step = std::min(min_step, d);
      if (i > 1) {
        const double prev = t.number(i - 1, "entropy") - t.number(i - 2, "entropy");
        spread = std::max(spread, std::abs(d / prev - 1.0));
      }
    }
    std::vector<Check> out;
    if (t.rows.size() >= 2)
      out.push_back({"strictly_increasing", min_step > 0.0, min_step, 0.0});
    if (t.rows.size() >= 3)
      out.push_back(upper("max_increment_ratio_deviation", spread, p.real("increment_tol")));
    return out;
  };
  return e;
}

// --- kruskal --------------------------------------------------------------

inline Experiment kruskal()
{
  Experiment e;
  e.name = "kruskal";
  e.summary = "Schwarzschild to Kruskal round trips, horizon probe and boundary rejection";
  e.params = {{"points", "1000", "random exterior points, cycled over the masses"},
              {"masses", "0.5,1,2", "black-hole masses M"},
              {"r_max", "10", "outer radius in units of M (r drawn from (2M, r_max M])"},
              {"t_max", "10", "time range in units of M (t drawn from [-t_max M, t_max M])"},
              {"probes", "8", "horizon probes r = 2M (1 + 10^-k), k = 1..probes"},
              {"tol", "1e-10", "relative round-trip tolerance"}};
  e.run = [](const Params& p, std::uint64_t seed, unsigned threads) {
    const auto points = static_cast<std::size_t>(p.integer("points", 0));
    const auto masses = p.list("masses");
    const double r_max = p.positive("r_max");
    const double t_max = p.real("t_max");
    const auto probes = p.integer("probes", 1);
    if (!(r_max > 2.0))
      throw UsageError("r_max must exceed 2");
    for (double m : masses)
      if (!(m > 0.0))
        throw UsageError("masses must be positive");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<Cell>> rows(points);
    parallel_for(points, threads, [&](std::size_t i) {
      auto rng = trial_rng(seed, i);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double M = masses[i % masses.size()];
      const double r = M * (r_max - (r_max - 2.0) * unit(rng)); // (2M, r_max M]
      const double t = M * t_max * (2.0 * unit(rng) - 1.0);
      const auto k = rindler::to_kruskal({r, t, M});
      const auto back = rindler::from_kruskal(k, M);
      rows[i] = {std::string("sample"), M, r, t, k.u, k.v, back.r, back.t, std::string("ok")};
    });
    Table t;
    t.columns = {"kind", "M", "r", "t", "u", "v", "r_back", "t_back", "status"};
    for (auto& r : rows)
      t.add(std::move(r));
    for (double M : masses) {
      for (std::int64_t k = 1; k <= probes; ++k) {
        const double r = 2.0 * M * (1.0 + std::pow(10.0, -static_cast<double>(k)));
        const auto kp = rindler::to_kruskal({r, 0.0, M});
        const auto back = rindler::from_kruskal(kp, M);
        t.add({std::string("probe"), M, r, 0.0, kp.u, kp.v, back.r, back.t, std::string("ok")});
      }
      std::string status = "accepted";
      try {
        (void)rindler::to_kruskal({2.0 * M, 0.0, M});
      } catch (const numerics::InvalidInput&) {
        status = "rejected";
      }
      t.add({std::string("boundary"), M, 2.0 * M, 0.0, nan, nan, nan, nan, status});
    }
    return t;
  };
  e.check = [](const Params& p, const Table& t) {
    double worst = 0.0;
    double horizon = 0.0;
    bool monotone = true;
    bool rejected = true;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const std::string& kind = t.text(i, "kind");
      const double M = t.number(i, "M");
      if (kind == "boundary") {
        rejected = rejected && t.text(i, "status") == "rejected";
        continue;
      }
      const double r = t.number(i, "r"), tt = t.number(i, "t");
      worst = std::max({worst, std::abs(t.number(i, "r_back") - r) / r,
                        std::abs(t.number(i, "t_back") - tt) / std::max(std::abs(tt), 2.0 * M)});
      if (kind == "probe") {
        auto scaled_uv = [&](std::size_t j) { return t.number(j, "u") * t.number(j, "v") / (16.0 * M * M); };
        auto same_series = [&](std::size_t j) { return t.text(j, "kind") == "probe" && t.number(j, "M") == M; };
        if (i > 0 && same_series(i - 1))
          monotone = monotone && scaled_uv(i) < scaled_uv(i - 1);
        // The last probe of each mass is the one closest to the horizon.
        if (i + 1 == t.rows.size() || !same_series(i + 1))
          horizon = std::max(horizon, scaled_uv(i));
      }
    }
    const double probes = static_cast<double>(p.integer("probes", 1));
    return std::vector<Check>{upper("max_round_trip_rel_err", worst, p.real("tol")),
                              {"probe_uv_decreasing", monotone, monotone ? 1.0 : 0.0, 1.0},
                              upper("closest_probe_uv_over_16M2", horizon, 2.0 * std::pow(10.0, -probes)),
                              {"horizon_rejected", rejected, rejected ? 1.0 : 0.0, 1.0}};
  };
  return e;
}

} // namespace detail

inline const std::vector<Experiment>& experiments()
{
  static const std::vector<Experiment> all = {detail::symmetry(),        detail::growth(),  detail::truncation(),
                                              detail::oracle(),          detail::dmrg_experiment(), detail::modes(),
                                              detail::spectrum(),        detail::geometric_entropy(), detail::kruskal()};
  return all;
}

inline const Experiment& find_experiment(const std::string& name)
{
  for (const auto& e : experiments())
    if (e.name == name)
      return e;
  std::string known;
  for (const auto& e : experiments())
    known += (known.empty() ? "" : ", ") + e.name;
  throw UsageError("unknown experiment '" + name + "' (known: " + known + ")");
}

/// Validates the configuration, runs the experiment and evaluates its checks
/// from the produced rows. Library precondition failures surface as UsageError.
inline RunReport run_experiment(const ExperimentConfig& cfg)
{
  if (cfg.experiment.empty())
    throw UsageError("no experiment given");
  const Experiment& e = find_experiment(cfg.experiment);
  const Params params(e.params, cfg.params, e.name);
  RunReport report;
  report.experiment = e.name;
  report.seed = cfg.seed;
  report.config = params.values();
  const auto start = std::chrono::steady_clock::now();
  try {
    report.table = e.run(params, cfg.seed, cfg.threads);
  } catch (const numerics::InvalidInput& err) {
    throw UsageError(std::string("precondition failed: ") + err.what());
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.checks = e.check(params, report.table);
  return report;
}

} // namespace entlab::cli

#endif // ENTLAB_CLI_EXPERIMENTS_HPP
