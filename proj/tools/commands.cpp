// commands.cpp — subcommand execution and deterministic file output
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbec/error.hpp"
#include "cbec/finite_size.hpp"
#include "cbec/moments.hpp"
#include "cbec/semiclassical.hpp"
#include "cbec/stability.hpp"
#include "cbec/third_quantization.hpp"
#include "cli.hpp"

#ifndef CBEC_VERSION
#define CBEC_VERSION "unknown"
#endif

namespace cbec::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kModule = "cli";
constexpr const char* kUnits = "frequencies and rates in angular kHz (rad/ms), time in ms, hbar = 1";

std::string hash_hex(const RunConfig& cfg) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(canonical_form(cfg))));
  return buf;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Json num_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json cplx_json(cplx z) { return Json::array({num_json(z.real()), num_json(z.imag())}); }

Json metadata(const RunConfig& cfg) {
  Json m;
  m["tool"] = "cbec";
  m["version"] = CBEC_VERSION;
  m["command"] = to_string(cfg.command);
  m["config_hash"] = hash_hex(cfg);
  m["units"] = kUnits;
  return m;
}

Json params_json(const ModelParams& p) {
  Json j;
  j["omega_khz"] = p.omega;
  j["omega0_khz"] = p.omega0;
  j["lambda_d_khz"] = p.lambda_d;
  j["lambda_s_khz"] = p.lambda_s;
  j["kappa_khz"] = p.kappa;
  j["n_atoms"] = p.n_atoms;
  return j;
}

class Writer {
 public:
  explicit Writer(const RunConfig& cfg) : cfg_(cfg) { std::filesystem::create_directories(cfg.out_dir); }

  std::ofstream open(const std::string& name, std::ostream& log) const {
    const std::filesystem::path path = std::filesystem::path(cfg_.out_dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, kModule, "cannot write " + path.string());
    log << "wrote " << path.string() << "\n";
    return f;
  }

  void csv(const std::string& name, const std::string& columns, const std::vector<std::string>& rows,
           std::ostream& log) const {
    std::ofstream f = open(name, log);
    f << "# tool: cbec " << CBEC_VERSION << "\n"
      << "# command: " << to_string(cfg_.command) << "\n"
      << "# config_hash: " << hash_hex(cfg_) << "\n"
      << "# units: " << kUnits << "\n"
      << columns << "\n";
    for (const auto& r : rows) f << r << "\n";
  }

  void json(const std::string& name, Json body, std::ostream& log) const {
    Json doc;
    doc["metadata"] = metadata(cfg_);
    for (auto& [k, v] : body.items()) doc[k] = v;
    open(name, log) << doc.dump(2) << "\n";
  }

 private:
  const RunConfig& cfg_;
};

std::string row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) out += (out.empty() ? "" : ",") + c;
  return out;
}

int run_spectrum(const RunConfig& cfg, const Writer& w, std::ostream& log) {
  std::vector<MeanFieldBranch> branches{MeanFieldBranch::normal()};
  if (cfg.all_branches) branches = filter_physical_branches(cfg.params, solve_shift_equations(cfg.params));
  Json out;
  out["params"] = params_json(cfg.params);
  out["branches"] = Json::array();
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const auto& b = branches[i];
    const QuadraticLiouvillian l = build_liouvillian(cfg.params, b);
    const SpectralData sd = spectral_data(l);
    const CMatrix drift = drift_and_diffusion(l).drift;
    Json jb;
    jb["index"] = i;
    jb["kind"] = to_string(b.kind);
    jb["alpha"] = cplx_json(b.alpha);
    jb["root_beta"] = Json::array({cplx_json(b.root_beta1), cplx_json(b.root_beta2)});
    jb["rapidities"] = Json::array();
    for (const cplx& r : sd.rapidities) jb["rapidities"].push_back(cplx_json(r));
    jb["diagonalizable"] = sd.diagonalizable;
    jb["stable"] = sd.stable();
    const char* status[] = {"available", "singular_pencil", "not_diagonalizable"};
    jb["covariance"] = status[static_cast<int>(sd.covariance_status)];
    const auto one = one_point_stability(drift);
    jb["one_point_max_re"] = one.max_re;
    jb["one_point_im_at_max"] = one.im_at_max;
    jb["two_point_max_re"] = two_point_stability(drift);
    out["branches"].push_back(jb);
    if (!sd.diagonalizable) continue;
    for (const auto& e : eigenvalue_lattice(sd, cfg.max_occupation).entries) {
      std::string occ;
      for (int n : e.occupation) occ += (occ.empty() ? "" : ",") + std::to_string(n);
      rows.push_back(row({std::to_string(i), occ, num(e.value.real()), num(e.value.imag())}));
    }
  }
  w.json("spectrum.json", out, log);
  w.csv("lattice.csv", "branch,n_a,n_b1,n_b2,n_a_dag,n_b1_dag,n_b2_dag,re,im", rows, log);
  return 0;
}

MeanFieldBranch evolve_branch(const RunConfig& cfg) {
  if (cfg.branch == EvolveBranch::Normal) return MeanFieldBranch::normal();
  MeanFieldBranch best = MeanFieldBranch::normal();
  double best_re = INFINITY;
  for (const auto& b : filter_physical_branches(cfg.params, solve_shift_equations(cfg.params))) {
    const double re = one_point_stability(drift_and_diffusion(build_liouvillian(cfg.params, b)).drift).max_re;
    if (re < best_re) {
      best_re = re;
      best = b;
    }
  }
  return best;
}

int run_evolve(const RunConfig& cfg, const Writer& w, std::ostream& log) {
  const MeanFieldBranch b = evolve_branch(cfg);
  const QuadraticLiouvillian l = build_liouvillian(cfg.params, b);
  const DriftDiffusion dd = drift_and_diffusion(l);
  const MomentState init =
      cfg.seed_pairing ? MomentState::cavity_seed(cfg.seed_amplitude, cfg.a_squared) : MomentState::vacuum(cfg.seed_amplitude);
  const MomentTrajectory tr = evolve_moments(dd, init, cfg.t_end_ms, cfg.dt_ms);
  std::vector<std::string> rows;
  for (const auto& s : tr.samples) {
    const SpinObservables o = spin_observables(s, cfg.params, b);
    rows.push_back(row({num(s.time), num(o.jx[0]), num(o.jx[1]), num(o.jy[0]), num(o.jy[1]), num(o.jz[0]),
                        num(o.jz[1]), num(o.xx_connected), num(o.xy_connected), num(o.xi_y[0]), num(o.xi_y[1]),
                        num(s.first[0].real()), num(s.first[0].imag())}));
  }
  w.csv("evolve.csv", "t_ms,jx_plus,jx_minus,jy_plus,jy_minus,jz_plus,jz_minus,xx_connected,xy_connected,xi_y_plus,"
                      "xi_y_minus,re_a,im_a",
        rows, log);
  const auto one = one_point_stability(dd.drift);
  Json out;
  out["params"] = params_json(cfg.params);
  out["branch"] = to_string(b.kind);
  out["one_point_max_re"] = one.max_re;
  out["one_point_im_at_max"] = one.im_at_max;
  out["two_point_max_re"] = two_point_stability(dd.drift);
  out["samples"] = tr.samples.size();
  out["diverged"] = tr.diverged;
  w.json("evolve.json", out, log);
  return 0;
}

int run_phase_diagram(const RunConfig& cfg, const Writer& w, std::ostream& log) {
  const auto records = sweep_phase_diagram(cfg.grid, cfg.params, cfg.threads);
  std::vector<std::string> rows;
  int failed = 0;
  for (const auto& r : records) {
    if (!r.error.empty()) ++failed;
    const double phi = r.phi_deg * std::numbers::pi / 180.0, v = cfg.params.coupling_strength();
    std::string err = r.error;
    for (char& c : err)
      if (c == ',' || c == '\n') c = ';';
    rows.push_back(row({num(r.phi_deg), num(r.omega), num(v * std::cos(phi)), num(v * std::sin(phi)),
                        to_string(r.branch_kind), num(r.max_re_one_point), num(r.im_at_max_one_point),
                        num(r.max_re_two_point), num(r.normal_one_point.max_re), num(r.normal_one_point.im_at_max),
                        num(r.normal_two_point), std::to_string(r.branches.size()), err}));
  }
  w.csv("phase_diagram.csv",
        "phi_deg,omega_khz,lambda_d_khz,lambda_s_khz,branch,max_re_one_point,im_at_max_one_point,max_re_two_point,"
        "normal_max_re_one_point,normal_im_at_max,normal_max_re_two_point,physical_branches,error",
        rows, log);
  if (failed > 0) log << failed << " of " << records.size() << " cells failed\n";
  return failed > 0 ? 2 : 0;
}

int run_closed(const RunConfig& cfg, const Writer& w, std::ostream& log) {
  const SweepGrid& g = cfg.grid;
  if (g.phi_steps < 1 || g.omega_steps < 1) throw Error(ErrorKind::InvalidArgument, kModule, "grid needs at least one step per axis");
  const int cells = g.phi_steps * g.omega_steps;
  std::vector<std::string> rows(cells);
  std::vector<char> failed(cells, 0);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int c = next++; c < cells; c = next++) {
      const int i = c / g.omega_steps, j = c % g.omega_steps;
      const double phi = g.phi_steps == 1 ? g.phi_min_deg
                                          : g.phi_min_deg + (g.phi_max_deg - g.phi_min_deg) * i / (g.phi_steps - 1);
      const double omega =
          g.omega_steps == 1 ? g.omega_min : g.omega_min + (g.omega_max - g.omega_min) * j / (g.omega_steps - 1);
      ModelParams p = ModelParams::from_polar(cfg.params.coupling_strength(), phi, omega, cfg.params.omega0, 0.0,
                                              cfg.params.n_atoms);
      std::string phase, err, roots;
      try {
        for (const cplx& f : closed_frequencies(p)) roots += "," + num(f.real()) + "," + num(f.imag());
        phase = to_string(classify_closed_phase(p, {}, cfg.criterion));
      } catch (const std::exception& e) {
        failed[c] = 1;
        err = e.what();
        for (char& ch : err)
          if (ch == ',' || ch == '\n') ch = ';';
        if (roots.empty()) roots = ",nan,nan,nan,nan,nan,nan";
      }
      rows[c] = num(phi) + "," + num(omega) + roots + "," + phase + "," + err;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::max(1u, cfg.threads); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  w.csv("closed.csv", "phi_deg,omega_khz,re_f1,im_f1,re_f2,im_f2,re_f3,im_f3,phase,error", rows, log);
  int n_failed = 0;
  for (char f : failed) n_failed += f;
  if (n_failed > 0) log << n_failed << " of " << cells << " cells failed\n";
  return n_failed > 0 ? 2 : 0;
}

int run_finite(const RunConfig& cfg, const Writer& w, std::ostream& log) {
  FiniteModel fm;
  fm.params = cfg.params;
  fm.n_atoms = cfg.finite_atoms;
  fm.fock_cutoff = cfg.fock_cutoff;
  fm.spin_levels = cfg.spin_levels;
  fm.validate();
  Json out;
  if (cfg.converge_cutoff) {
    const CutoffConvergence c = converge_fock_cutoff(fm, cfg.cutoff_tol);
    fm.fock_cutoff = c.fock_cutoff;
    out["cutoff_converged"] = c.converged;
  }
  const std::vector<cplx> spec = finite_spectrum(fm);
  std::vector<std::string> rows;
  for (const cplx& z : spec) rows.push_back(row({num(z.real()), num(z.imag())}));
  w.csv("finite_spectrum.csv", "re,im", rows, log);

  std::vector<Occupation> modes;
  const int top = std::min(fm.levels() - 1, fm.n_atoms);
  for (int np = 0; np <= std::min(1, top); ++np)
    for (int nm = 0; nm <= std::min(1, top) - np; ++nm)
      for (int mp = 0; mp <= std::min(1, top); ++mp)
        for (int mm = 0; mm <= std::min(1, top) - mp; ++mm) modes.push_back({np, nm, mp, mm});
  rows.clear();
  for (const auto& m : perturbative_splitting(fm, modes)) {
    const cplx exact = *std::min_element(spec.begin(), spec.end(), [&](const cplx& a, const cplx& b) {
      return std::abs(a - m.lambda1) < std::abs(b - m.lambda1);
    });
    rows.push_back(row({std::to_string(m.occupation.n_plus), std::to_string(m.occupation.n_minus),
                        std::to_string(m.occupation.m_plus), std::to_string(m.occupation.m_minus),
                        num(m.lambda1.imag()), num(exact.real()), num(exact.imag()), num(std::abs(exact - m.lambda1)),
                        m.degenerate ? "true" : "false"}));
  }
  w.csv("perturbative.csv", "n_plus,n_minus,m_plus,m_minus,im_lambda1,re_nearest,im_nearest,gap,degenerate", rows, log);

  const CMatrix rho = stationary_state(fm);
  const FiniteOperators ops = finite_operators(fm);
  out["params"] = params_json(cfg.params);
  out["n_atoms_per_condensate"] = fm.n_atoms;
  out["fock_cutoff"] = fm.fock_cutoff;
  out["dims"] = fm.dims();
  out["eigenvalues"] = spec.size();
  out["stationary_photon_number"] = expectation(rho, SparseCMatrix(ops.a.adjoint() * ops.a)).real();
  out["photon_current"] = photon_current(fm);
  w.json("finite.json", out, log);
  return 0;
}

int run_semiclassical(const RunConfig& cfg, const Writer& w, std::ostream& log) {
  SemiclassicalState init;
  init.alpha = cfg.seed_amplitude;
  const auto tr = integrate_semiclassical(cfg.params, init, cfg.t_end_ms, cfg.dt_ms, cfg.variant);
  std::vector<std::string> rows;
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const auto& s = tr.states[k];
    rows.push_back(row({num(tr.times[k]), num(s.alpha.real()), num(s.alpha.imag()), num(s.beta1.real()),
                        num(s.beta1.imag()), num(s.beta2.real()), num(s.beta2.imag()), num(s.w1), num(s.w2)}));
  }
  w.csv("semiclassical.csv", "t_ms,re_alpha,im_alpha,re_beta1,im_beta1,re_beta2,im_beta2,w1,w2", rows, log);
  if (tr.diverged) log << "semiclassical trajectory diverged at t = " << tr.times.back() << " ms\n";
  return 0;
}

}  // namespace

int execute(const RunConfig& cfg, std::ostream& log) {
  cfg.params.validate();
  if (cfg.threads < 1) throw Error(ErrorKind::InvalidArgument, kModule, "threads must be at least 1");
  if ((cfg.command == Command::Evolve || cfg.command == Command::Semiclassical) &&
      !(cfg.t_end_ms > 0.0 && cfg.dt_ms > 0.0))
    throw Error(ErrorKind::InvalidArgument, kModule, "t_end_ms and dt_ms must be positive");
  const Writer w(cfg);
  switch (cfg.command) {
    case Command::Spectrum: return run_spectrum(cfg, w, log);
    case Command::Evolve: return run_evolve(cfg, w, log);
    case Command::PhaseDiagram: return run_phase_diagram(cfg, w, log);
    case Command::Closed: return run_closed(cfg, w, log);
    case Command::Finite: return run_finite(cfg, w, log);
    case Command::Semiclassical: return run_semiclassical(cfg, w, log);
  }
  return 1;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dissipative two-component BEC-cavity toolkit", "cbec"};
  app.set_version_flag("--version", CBEC_VERSION);
  app.require_subcommand(1);
  std::string config_path, out_dir = ".", variant;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::optional<double> seed;
  app.add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed-amplitude", seed, "initial cavity amplitude <a(0)>");
  app.add_option("--variant", variant, "semiclassical equations")->check(CLI::IsMember({"printed", "corrected"}));
  const std::vector<std::pair<Command, const char*>> commands{
      {Command::Spectrum, "rapidities and eigenvalue lattice of every physical branch"},
      {Command::Evolve, "Gaussian moment dynamics and spin observables"},
      {Command::PhaseDiagram, "one- and two-point stability over the (phi, omega) plane"},
      {Command::Closed, "closed-system cubic roots and phase classification"},
      {Command::Finite, "exact finite-size Liouvillian spectrum and perturbative splittings"},
      {Command::Semiclassical, "factorized mean-field trajectories"}};
  for (const auto& [c, help] : commands) app.add_subcommand(to_string(c), help)->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  try {
    RunConfig cfg;
    cfg.command = parse_command(app.get_subcommands().front()->get_name());
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      std::stringstream text;
      text << f.rdbuf();
      apply_config_text(cfg, text.str(), config_path);
    }
    cfg.out_dir = out_dir;
    cfg.threads = threads;
    if (seed) cfg.seed_amplitude = *seed;
    if (!variant.empty())
      cfg.variant = variant == "printed" ? SemiclassicalVariant::Printed : SemiclassicalVariant::Corrected;
    return execute(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace cbec::cli
