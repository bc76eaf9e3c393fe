#include "qcopier/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <locale>
#include <sstream>

#include <CLI11.hpp>

#include "qcopier/kernels.hpp"
#include "qcopier/serialize.hpp"

namespace qcopier {

namespace {

struct Globals {
  std::string out_path;
  bool check = false;
  bool degrees = false;
  bool serial = false;

  AngleUnit unit() const { return degrees ? AngleUnit::degrees() : AngleUnit::radians(); }
  Exec exec() const { return serial ? Exec::serial : Exec::parallel; }
};

class JsonSyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw JsonSyntaxError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::string csv_number(double x) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(17) << x;
  return s.str();
}

/// 4-sigma band with sigma = sqrt(r (1 - r) / n); zero variance requires equality.
bool in_band(double measured, double expected, double n) {
  if (n <= 0) return true;
  const double s = std::sqrt(expected * (1.0 - expected) / n);
  if (s == 0.0) return std::abs(measured - expected) <= 1e-15;
  return std::abs(measured - expected) < 4.0 * s;
}

void require_finite(const json& j, const std::string& where = "results") {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) throw NumericError("non-finite value in " + where);
  if (j.is_structured()) {
    for (auto it = j.begin(); it != j.end(); ++it) require_finite(*it, where);
  }
}

CVec state_from_label(const std::string& s) {
  const double h = 1.0 / std::sqrt(2.0);
  if (s == "0") return CVec::basis(2, 0);
  if (s == "1") return CVec::basis(2, 1);
  if (s == "+") return CVec{h, h};
  if (s == "-") return CVec{h, -h};
  if (s == "+i") return CVec{h, cplx(0, h)};
  if (s == "-i") return CVec{h, cplx(0, -h)};
  json j;
  try {
    j = json::parse(s);
  } catch (const json::parse_error&) {
    throw ValidationError("state '" + s + "' is neither a label (0, 1, +, -, +i, -i) nor a JSON vector");
  }
  const CVec v = vec_from_json(j);
  if (v.dim() != 2 || !v.is_normalized(1e-10)) throw ValidationError("state must be a normalized qubit vector");
  return v;
}

double max_channel_diff(const AffineChannel& x, const AffineChannel& y) {
  return std::max((x.m - y.m).cwiseAbs().maxCoeff(), (x.d - y.d).cwiseAbs().maxCoeff());
}

using Runner = std::function<void(RunReport&)>;

int execute(const std::string& name, const Globals& g, const Runner& body, std::ostream& out) {
  RunReport rep;
  rep.command = name;
  rep.check.enabled = g.check;
  const auto t0 = std::chrono::steady_clock::now();
  body(rep);
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require_finite(rep.results);
  const std::string text = to_json(rep).dump(2) + "\n";
  if (!g.out_path.empty()) write_text(g.out_path, text);
  out << text;
  return g.check && !rep.check.passed() ? kExitAcceptance : kExitOk;
}

// ---- subcommands ----

void run_decompose(RunReport& rep, const std::string& file, const std::string& b_label, bool b_given) {
  const json j = read_json_file(file);
  json uj = j;
  CVec b = state_from_label(b_label);
  if (j.is_object()) {
    if (!j.contains("unitary")) throw ValidationError(file + ": expected a matrix or {unitary, b}");
    uj = j["unitary"];
    if (j.contains("b") && !b_given) {
      b = vec_from_json(j["b"]);
      if (b.dim() != 2 || !b.is_normalized(1e-10)) throw ValidationError(file + ": 'b' must be a normalized qubit state");
    }
  }
  const COp u = op_from_json(uj);
  if (u.dim() != 4) throw DimensionError(file + ": unitary must be 4x4");
  const Isometry v = isometry_from_unitary(u, b);
  const CanonicalizeDetail det = canonicalize_detailed(v);
  const double recon = phase_residual(reconstruct(det.decomposition).matrix(), v.matrix());
  const bool region = det.decomposition.params.in_fundamental_region();

  rep.config = {{"unitary", to_json(u)}, {"b", to_json(b)}};
  static constexpr const char* kMethods[] = {"partial_trace", "product_states", "continuum"};
  rep.results = {{"zeta", det.decomposition.params.zeta},
                 {"eta", det.decomposition.params.eta},
                 {"decomposition", to_json(det.decomposition)},
                 {"method", kMethods[static_cast<int>(det.method)]},
                 {"fit_residual", det.residual},
                 {"reconstruction_residual", recon},
                 {"in_fundamental_region", region}};
  if (recon > 1e-6) throw NumericError("decomposition does not reconstruct the input (residual " + csv_number(recon) + ")");
  if (recon > 1e-9) rep.check.failures.push_back("reconstruction residual above 1e-9");
  if (!region) rep.check.failures.push_back("parameters outside the fundamental region");
}

void require_finite_angles(double gamma, double delta) {
  if (!std::isfinite(gamma) || !std::isfinite(delta)) throw ValidationError("angles must be finite");
}

void run_channel(RunReport& rep, double gamma, double delta) {
  require_finite_angles(gamma, delta);
  const GammaDelta gd{gamma, delta};
  const Isometry v = canonical_isometry(gd.params());
  rep.config = {{"gamma", gamma}, {"delta", delta}};
  double worst = 0.0;
  for (const Qubit q : {Qubit::a, Qubit::b}) {
    const AffineChannel probed = channel_of_isometry(v, q);
    const AffineChannel closed = canonical_channel(gd, q);
    worst = std::max(worst, max_channel_diff(probed, closed));
    rep.results[q == Qubit::a ? "a" : "b"] = {{"probed", to_json(probed)}, {"closed_form", to_json(closed)}};
  }
  rep.results["zeta"] = gd.params().zeta;
  rep.results["eta"] = gd.params().eta;
  rep.results["max_deviation"] = worst;
  if (worst > 1e-10) rep.check.failures.push_back("probed and closed-form channels differ by more than 1e-10");
}

void run_ellipsoid(RunReport& rep, double gamma, double delta) {
  require_finite_angles(gamma, delta);
  const GammaDelta gd{gamma, delta};
  const Isometry v = canonical_isometry(gd.params());
  const EllipsoidReport a = ellipsoid_report(channel_of_isometry(v, Qubit::a));
  const EllipsoidReport b = ellipsoid_report(channel_of_isometry(v, Qubit::b));
  rep.config = {{"gamma", gamma}, {"delta", delta}};
  const json ids = {
      {"product_a", std::abs(a.semi_axes(2) - a.semi_axes(0) * a.semi_axes(1))},
      {"product_b", std::abs(b.semi_axes(2) - b.semi_axes(0) * b.semi_axes(1))},
      {"cross_displacement_a", std::abs(a.center.norm() - b.semi_axes(2))},
      {"cross_displacement_b", std::abs(b.center.norm() - a.semi_axes(2))},
      {"complementarity_ab", std::abs(a.semi_axes(0) * a.semi_axes(0) + b.semi_axes(1) * b.semi_axes(1) - 1.0)},
      {"complementarity_ba", std::abs(b.semi_axes(0) * b.semi_axes(0) + a.semi_axes(1) * a.semi_axes(1) - 1.0)}};
  rep.results = {{"a", to_json(a)}, {"b", to_json(b)}, {"identity_residuals", ids}};
  for (auto it = ids.begin(); it != ids.end(); ++it) {
    if (it->get<double>() > 1e-10) rep.check.failures.push_back("ellipsoid identity '" + it.key() + "' off by more than 1e-10");
  }
}

void run_verify(RunReport& rep, const Globals& g, const std::string& f1, const std::string& f2) {
  const Circuit c1 = circuit_from_json(unwrap_config(read_json_file(f1)), g.unit());
  const Circuit c2 = circuit_from_json(unwrap_config(read_json_file(f2)), g.unit());
  const Isometry v1 = circuit_isometry(c1), v2 = circuit_isometry(c2);
  const bool eq = equivalent(c1, c2);
  rep.config = {{"circuit_1", to_json(c1)}, {"circuit_2", to_json(c2)}};
  rep.results = {{"equivalent", eq},
                 {"phase_residual", phase_residual(v1.matrix(), v2.matrix())},
                 {"isometry_1", to_json(v1)},
                 {"isometry_2", to_json(v2)}};
  if (!eq) rep.check.failures.push_back("circuits are not equivalent up to global phase");
}

void run_bb84(RunReport& rep, const Globals& g, const std::string& file, const std::string& ledger) {
  Bb84Spec spec = bb84_from_json(unwrap_config(read_json_file(file)), g.unit());
  if (!ledger.empty()) spec.cfg.keep_records = true;
  const StochasticCopier sc = spec.copier ? spec.copier->copier()
                                          : StochasticCopier::single(canonical_isometry(GammaDelta{spec.cfg.gamma, spec.cfg.delta}.params()));
  const Bb84Result res = spec.copier ? simulate_bb84(spec.cfg, sc, g.exec()) : simulate_bb84(spec.cfg, g.exec());

  rep.config = to_json(spec);
  rep.seed = spec.cfg.seed;
  json modes = json::object();
  for (const Mode m : spec.cfg.modes) {
    const ModeCounters& c = res.ledger[m];
    const ModeRates exact = analytic_mode_rates(sc, m);
    json jm = to_json(c);
    jm["exact_p"] = exact.p;
    jm["exact_q"] = exact.q;
    modes[std::string(to_string(m))] = jm;
    const auto n = static_cast<double>(c.total_sent());
    if (!in_band(c.p(), exact.p, n)) rep.check.failures.push_back(std::string(to_string(m)) + "-mode p outside the 4-sigma band");
    if (!in_band(c.q(), exact.q, n)) rep.check.failures.push_back(std::string(to_string(m)) + "-mode q outside the 4-sigma band");
  }
  rep.results = {{"analytic", to_json(res.analytic)}, {"empirical", to_json(res.empirical)}, {"modes", modes}};

  if (!ledger.empty()) {
    std::string csv = "trial,mode,bit,bob,eve,branch\n";
    static constexpr const char* kModes[] = {"x", "y", "z"};
    for (std::size_t i = 0; i < res.ledger.records.size(); ++i) {
      const TrialRecord& r = res.ledger.records[i];
      csv += std::to_string(i) + "," + kModes[r.mode] + "," + std::to_string(r.bit) + "," + std::to_string(r.bob) +
             "," + std::to_string(r.eve) + "," + std::to_string(r.branch) + "\n";
    }
    write_text(ledger, csv);
    rep.results["ledger_csv"] = ledger;
  }
}

void run_b92(RunReport& rep, const Globals& g, const std::string& file) {
  const B92Config cfg = b92_from_json(unwrap_config(read_json_file(file)), g.unit());
  const B92Stats st = simulate_b92(cfg, g.exec());
  rep.config = to_json(cfg);
  rep.seed = cfg.seed;
  rep.results = to_json(st);
  if (!in_band(st.eve_success, st.exact_eve_success, static_cast<double>(st.n_trials))) {
    rep.check.failures.push_back("eve_success outside the 4-sigma band");
  }
  if (!in_band(st.bob_disturbance, st.exact_disturbance, static_cast<double>(st.n_disturbance_trials))) {
    rep.check.failures.push_back("bob_disturbance outside the 4-sigma band");
  }
}

void run_stochastic(RunReport& rep, const Globals& g, const std::string& file) {
  const CopierSpec spec = copier_from_json(unwrap_config(read_json_file(file)), g.unit());
  const StochasticCopier sc = spec.copier();
  rep.config = to_json(spec);
  json avg = json::object(), ell = json::object();
  std::array<AffineChannel, 2> chans;
  for (const Qubit q : {Qubit::a, Qubit::b}) {
    const char* key = q == Qubit::a ? "a" : "b";
    chans[q == Qubit::a ? 0 : 1] = averaged_channel(sc, q);
    avg[key] = to_json(chans[q == Qubit::a ? 0 : 1]);
    ell[key] = to_json(ellipsoid_report(chans[q == Qubit::a ? 0 : 1]));
  }
  rep.results = {{"branches", sc.size()}, {"averaged", avg}, {"ellipsoids", ell}};
  const auto ub = spec.unitary_branches();
  if (ub && ub->u.size() == 2) {
    const CoinEmbedding ce = coin_embedding(*ub);
    const AffineChannel ea = embedded_channel(ce, Qubit::a), eb = embedded_channel(ce, Qubit::b);
    const double dev = std::max(max_channel_diff(ea, chans[0]), max_channel_diff(eb, chans[1]));
    rep.results["coin_embedding"] = {{"a", to_json(ea)}, {"b", to_json(eb)}, {"max_deviation", dev}};
    if (dev > 1e-10) rep.check.failures.push_back("coin embedding deviates from the averaged channel by more than 1e-10");
  }
}

Axis parse_axis(const std::string& s, AngleUnit unit, const char* name) {
  double lo = 0, hi = 0;
  long steps = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  if (!(in >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
    throw ValidationError(std::string("--") + name + " expects min:max:steps, got '" + s + "'");
  }
  if (steps < 0 || steps > 100000) throw ValidationError(std::string("--") + name + " steps must lie in [0, 100000]");
  return {unit.scale * lo, unit.scale * hi, static_cast<int>(steps)};
}

void run_sweep(RunReport& rep, const Globals& g, const std::string& gs, const std::string& ds, const std::string& csv_path) {
  const GridSpec grid{parse_axis(gs, g.unit(), "gamma"), parse_axis(ds, g.unit(), "delta")};
  const auto pts = grid_points(grid);
  const auto rows = sweep(pts, g.exec());
  std::string csv =
      "gamma_rad,delta_rad,axis_a1,axis_a2,axis_a3,axis_b1,axis_b2,axis_b3,d_a_z,d_b_z,p_x,q_x,p_y,q_y\n";
  double circle = 0.0;
  for (const SweepRow& r : rows) {
    const double vals[] = {r.gamma,     r.delta,     r.axes_a(0),    r.axes_a(1),    r.axes_a(2),
                           r.axes_b(0), r.axes_b(1), r.axes_b(2),    r.center_a.z(), r.center_b.z(),
                           r.rates.p_x, r.rates.q_x, r.rates.p_y,    r.rates.q_y};
    for (std::size_t k = 0; k < std::size(vals); ++k) {
      if (!std::isfinite(vals[k])) throw NumericError("non-finite sweep value");
      csv += (k ? "," : "") + csv_number(vals[k]);
    }
    csv += "\n";
    circle = std::max(circle, std::abs(std::pow(0.5 - r.rates.q_x, 2) + std::pow(0.5 - r.rates.p_y, 2) - 0.25));
    circle = std::max(circle, std::abs(std::pow(0.5 - r.rates.q_y, 2) + std::pow(0.5 - r.rates.p_x, 2) - 0.25));
  }
  write_text(csv_path, csv);
  auto axis_json = [](const Axis& a) { return json{{"min", a.min}, {"max", a.max}, {"steps", a.steps}}; };
  rep.config = {{"gamma", axis_json(grid.gamma)}, {"delta", axis_json(grid.delta)}, {"csv", csv_path}};
  rep.results = {{"rows", rows.size()}, {"csv", csv_path}, {"max_circle_residual", circle}};
  if (circle > 1e-12) rep.check.failures.push_back("error-rate circle residual above 1e-12");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analysis of two-qubit quantum copying machines"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kSchema));
  Globals g;
  app.add_option("--out", g.out_path, "Also write the JSON report to this file");
  app.add_flag("--check", g.check, "Exit with status 5 when an acceptance band is violated");
  app.add_flag("--degrees", g.degrees, "Read angles in degrees (reports are always radians)");
  app.add_flag("--serial", g.serial, "Use the serial reference kernels");

  Runner runner;

  auto* dec = app.add_subcommand("decompose", "Canonical decomposition of a unitary with a fixed |b>");
  std::string dec_file, dec_b = "0";
  dec->add_option("unitary_file", dec_file, "JSON 4x4 matrix or {unitary, b}")->required();
  auto* b_opt = dec->add_option("--b", dec_b, "Initial state of b: 0, 1, +, -, +i, -i or a JSON vector");
  dec->callback([&] { runner = [&, b_opt](RunReport& r) { run_decompose(r, dec_file, dec_b, b_opt->count() > 0); }; });

  double gamma = 0, delta = 0;
  auto* ch = app.add_subcommand("channel", "Probed and closed-form Bloch channels of V_c(gamma, delta)");
  ch->add_option("--gamma", gamma)->required();
  ch->add_option("--delta", delta)->required();
  ch->callback([&] {
    runner = [&](RunReport& r) { run_channel(r, g.unit().scale * gamma, g.unit().scale * delta); };
  });

  auto* el = app.add_subcommand("ellipsoid", "Ellipsoid reports for both outputs of V_c(gamma, delta)");
  el->add_option("--gamma", gamma)->required();
  el->add_option("--delta", delta)->required();
  el->callback([&] {
    runner = [&](RunReport& r) { run_ellipsoid(r, g.unit().scale * gamma, g.unit().scale * delta); };
  });

  auto* vc = app.add_subcommand("verify-circuit", "Equivalence of two circuits up to global phase");
  std::string c1, c2;
  vc->add_option("file1", c1)->required();
  vc->add_option("file2", c2)->required();
  vc->callback([&] { runner = [&](RunReport& r) { run_verify(r, g, c1, c2); }; });

  auto* bb = app.add_subcommand("bb84", "BB84 eavesdropping Monte Carlo");
  std::string bb_file, bb_ledger;
  bb->add_option("config_file", bb_file)->required();
  bb->add_option("--ledger", bb_ledger, "Write the per-trial ledger as CSV");
  bb->callback([&] { runner = [&](RunReport& r) { run_bb84(r, g, bb_file, bb_ledger); }; });

  auto* b9 = app.add_subcommand("b92", "B92 eavesdropping Monte Carlo");
  std::string b9_file;
  b9->add_option("config_file", b9_file)->required();
  b9->callback([&] { runner = [&](RunReport& r) { run_b92(r, g, b9_file); }; });

  auto* st = app.add_subcommand("stochastic", "Averaged channels of a stochastic copier");
  std::string st_file;
  st->add_option("copier_file", st_file)->required();
  st->callback([&] { runner = [&](RunReport& r) { run_stochastic(r, g, st_file); }; });

  auto* sw = app.add_subcommand("sweep", "Channel and error-rate sweep over a (gamma, delta) grid");
  std::string sw_gamma, sw_delta, sw_csv;
  sw->add_option("--gamma", sw_gamma, "min:max:steps")->required();
  sw->add_option("--delta", sw_delta, "min:max:steps")->required();
  sw->add_option("--csv", sw_csv, "Output CSV path")->required();
  sw->callback([&] { runner = [&](RunReport& r) { run_sweep(r, g, sw_gamma, sw_delta, sw_csv); }; });

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return execute(name, g, runner, out);
  } catch (const JsonSyntaxError& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kExitParse;
  } catch (const json::parse_error& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kExitParse;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace qcopier
