#include "tdvp/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "tdvp/disk.hpp"
#include "tdvp/errors.hpp"
#include "tdvp/husimi.hpp"
#include "tdvp/su11.hpp"

#ifndef TDVP_VERSION
#define TDVP_VERSION "0.0.0"
#endif

namespace tdvp::scenario {

std::string_view tool_version() noexcept { return TDVP_VERSION; }

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::expect: return "expect";
    case Command::husimi: return "husimi";
    case Command::evolve: return "evolve";
    case Command::equilibria: return "equilibria";
    case Command::stability: return "stability";
    case Command::quasienergy: return "quasienergy";
  }
  return "unknown";
}

Command parse_command(std::string_view text) {
  for (Command c : {Command::expect, Command::husimi, Command::evolve, Command::equilibria,
                    Command::stability, Command::quasienergy}) {
    if (text == to_string(c)) return c;
  }
  throw Error(ErrorKind::invalid_argument, "unknown subcommand '" + std::string(text) + "'");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

// Thrown by value parsers; parse_config adds the location.
struct BadValue : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_real(std::string_view v) {
  double x = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw BadValue("expected a real number");
  }
  return x;
}

int parse_int(std::string_view v) {
  int x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw BadValue("expected an integer");
  }
  return x;
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw BadValue("expected true or false");
}

template <class F>
auto parse_enum(F&& f, std::string_view v) {
  try {
    return f(v);
  } catch (const Error& e) {
    throw BadValue(e.what());
  }
}

struct Field {
  std::string key;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
  bool fixed_when_dimensionless = false;
};

template <class Access>
Field real_field(std::string key, Access acc, bool fixed = false) {
  return {std::move(key), [acc](ScenarioConfig& c, std::string_view v) { acc(c) = parse_real(v); },
          [acc](const ScenarioConfig& c) { return format_double(acc(c)); }, fixed};
}

template <class Access>
Field int_field(std::string key, Access acc) {
  return {std::move(key), [acc](ScenarioConfig& c, std::string_view v) { acc(c) = parse_int(v); },
          [acc](const ScenarioConfig& c) { return std::to_string(acc(c)); }};
}

// std::complex is layout-compatible with double[2].
template <class C>
auto& part(C& z, int i) {
  using D = std::conditional_t<std::is_const_v<C>, const double, double>;
  return reinterpret_cast<D(&)[2]>(z)[i];
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = [] {
    std::vector<Field> v;
    v.push_back(real_field("trap.charge", [](auto& c) -> auto& { return c.trap.charge; }));
    v.push_back(real_field("trap.mass", [](auto& c) -> auto& { return c.trap.mass; }, true));
    v.push_back(real_field("trap.hbar", [](auto& c) -> auto& { return c.trap.hbar; }, true));
    v.push_back(real_field("trap.b0", [](auto& c) -> auto& { return c.trap.b0; }));
    v.push_back(real_field("trap.u0", [](auto& c) -> auto& { return c.trap.u0; }));
    v.push_back(real_field("trap.v0", [](auto& c) -> auto& { return c.trap.v0; }));
    v.push_back(
        real_field("trap.omega_rf", [](auto& c) -> auto& { return c.trap.omega_rf; }, true));
    v.push_back(real_field("trap.r0", [](auto& c) -> auto& { return c.trap.r0; }));
    v.push_back(real_field("trap.z0", [](auto& c) -> auto& { return c.trap.z0; }));
    v.push_back(real_field("trap.c_oct", [](auto& c) -> auto& { return c.trap.c_oct; }));
    v.push_back(real_field("trap.c_hex", [](auto& c) -> auto& { return c.trap.c_hex; }));
    v.push_back(
        real_field("trap.omega_a_ref", [](auto& c) -> auto& { return c.trap.omega_a_ref; }));
    v.push_back(
        real_field("trap.omega_r_ref", [](auto& c) -> auto& { return c.trap.omega_r_ref; }));
    v.push_back(int_field("trap.l", [](auto& c) -> auto& { return c.trap.l; }));
    v.push_back(int_field("trap.m_a", [](auto& c) -> auto& { return c.trap.m_a; }));
    v.push_back(int_field("trap.m_r", [](auto& c) -> auto& { return c.trap.m_r; }));
    v.push_back(
        real_field("trap.axial_sector", [](auto& c) -> auto& { return c.trap.axial_sector; }));
    v.push_back({"trap.drive_mode",
                 [](ScenarioConfig& c, std::string_view s) {
                   c.trap.drive_mode = parse_enum(trap::parse_drive_mode, s);
                 },
                 [](const ScenarioConfig& c) { return std::string(to_string(c.trap.drive_mode)); }});

    v.push_back(real_field("run.z_a_re", [](auto& c) -> auto& { return part(c.run.z_a, 0); }));
    v.push_back(real_field("run.z_a_im", [](auto& c) -> auto& { return part(c.run.z_a, 1); }));
    v.push_back(real_field("run.z_r_re", [](auto& c) -> auto& { return part(c.run.z_r, 0); }));
    v.push_back(real_field("run.z_r_im", [](auto& c) -> auto& { return part(c.run.z_r, 1); }));

    v.push_back({"run.grid_mode",
                 [](ScenarioConfig& c, std::string_view s) {
                   c.run.grid_mode = parse_enum(trap::parse_mode, s);
                 },
                 [](const ScenarioConfig& c) { return std::string(to_string(c.run.grid_mode)); }});
    v.push_back(real_field("run.grid_re_min", [](auto& c) -> auto& { return c.run.grid_re_min; }));
    v.push_back(real_field("run.grid_re_max", [](auto& c) -> auto& { return c.run.grid_re_max; }));
    v.push_back(real_field("run.grid_im_min", [](auto& c) -> auto& { return c.run.grid_im_min; }));
    v.push_back(real_field("run.grid_im_max", [](auto& c) -> auto& { return c.run.grid_im_max; }));
    v.push_back(int_field("run.grid_n_re", [](auto& c) -> auto& { return c.run.grid_n_re; }));
    v.push_back(int_field("run.grid_n_im", [](auto& c) -> auto& { return c.run.grid_n_im; }));
    v.push_back(real_field("run.time", [](auto& c) -> auto& { return c.run.time; }));

    v.push_back(real_field("run.t_start", [](auto& c) -> auto& { return c.run.t_start; }));
    v.push_back(real_field("run.t_end", [](auto& c) -> auto& { return c.run.t_end; }));
    v.push_back(real_field("run.tol", [](auto& c) -> auto& { return c.run.tol; }));
    v.push_back(int_field("run.samples", [](auto& c) -> auto& { return c.run.samples; }));

    v.push_back({"run.scan_axes",
                 [](ScenarioConfig& c, std::string_view s) {
                   c.run.scan_axes = parse_enum(dynamics::parse_scan_axes, s);
                 },
                 [](const ScenarioConfig& c) {
                   return std::string(dynamics::to_string(c.run.scan_axes));
                 }});
    v.push_back(real_field("run.x_min", [](auto& c) -> auto& { return c.run.first.lo; }));
    v.push_back(real_field("run.x_max", [](auto& c) -> auto& { return c.run.first.hi; }));
    v.push_back(int_field("run.x_count", [](auto& c) -> auto& { return c.run.first.count; }));
    v.push_back(real_field("run.y_min", [](auto& c) -> auto& { return c.run.second.lo; }));
    v.push_back(real_field("run.y_max", [](auto& c) -> auto& { return c.run.second.hi; }));
    v.push_back(int_field("run.y_count", [](auto& c) -> auto& { return c.run.second.count; }));
    v.push_back({"run.refine_edges",
                 [](ScenarioConfig& c, std::string_view s) { c.run.refine_edges = parse_bool(s); },
                 [](const ScenarioConfig& c) {
                   return std::string(c.run.refine_edges ? "true" : "false");
                 }});

    v.push_back({"run.mode",
                 [](ScenarioConfig& c, std::string_view s) {
                   c.run.mode = parse_enum(trap::parse_mode, s);
                 },
                 [](const ScenarioConfig& c) { return std::string(to_string(c.run.mode)); }});
    v.push_back(int_field("run.n_levels", [](auto& c) -> auto& { return c.run.n_levels; }));
    return v;
  }();
  return f;
}

std::vector<std::string> required_keys(Command command, Units units, trap::DriveMode drive) {
  std::vector<std::string> keys{"trap.r0", "trap.z0", "trap.omega_a_ref", "trap.omega_r_ref"};
  if (units == Units::si) {
    keys.insert(keys.end(), {"trap.charge", "trap.mass"});
    if (drive != trap::DriveMode::static_field) keys.push_back("trap.omega_rf");
  }
  switch (command) {
    case Command::expect:
    case Command::equilibria:
      break;
    case Command::husimi:
      keys.insert(keys.end(), {"run.grid_re_min", "run.grid_re_max", "run.grid_im_min",
                               "run.grid_im_max", "run.grid_n_re", "run.grid_n_im"});
      break;
    case Command::evolve:
      keys.push_back("run.t_end");
      break;
    case Command::stability:
      keys.insert(keys.end(), {"run.scan_axes", "run.x_min", "run.x_max", "run.x_count",
                               "run.y_min", "run.y_max", "run.y_count"});
      break;
    case Command::quasienergy:
      keys.insert(keys.end(), {"run.mode", "run.n_levels"});
      break;
  }
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::config, where + ": " + what);
}

void check_run_settings(const ScenarioConfig& c, const std::string& src) {
  const RunSettings& r = c.run;
  switch (c.command) {
    case Command::husimi:
      if (r.grid_n_re < 1 || r.grid_n_im < 1) {
        config_error(src, "run.grid_n_re and run.grid_n_im must be at least 1");
      }
      break;
    case Command::evolve:
      if (!(r.t_end > r.t_start)) config_error(src, "run.t_end must exceed run.t_start");
      if (!(r.tol > 0.0)) config_error(src, "run.tol must be positive");
      if (r.samples < 0) config_error(src, "run.samples must be non-negative");
      break;
    case Command::stability:
      if (r.first.count < 1 || r.second.count < 1) {
        config_error(src, "run.x_count and run.y_count must be at least 1");
      }
      break;
    case Command::quasienergy:
      if (r.n_levels < 1) config_error(src, "run.n_levels must be at least 1");
      break;
    case Command::expect:
    case Command::equilibria:
      break;
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> ScenarioConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("units", units == Units::si ? "si" : "dimensionless");
  for (const Field& f : fields()) {
    if (units == Units::dimensionless && f.fixed_when_dimensionless) continue;
    out.emplace_back(f.key, f.get(*this));
  }
  return out;
}

ScenarioConfig parse_config(std::istream& in, Command command, const std::string& source) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> entries;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) config_error(where, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) config_error(where, "missing key before '='");
    if (value.empty()) config_error(where, "missing value for key '" + key + "'");
    const bool known = key == "units" || std::any_of(fields().begin(), fields().end(),
                                                     [&](const Field& f) { return f.key == key; });
    if (!known) config_error(where, "unknown key '" + key + "'");
    if (const auto it = entries.find(key); it != entries.end()) {
      config_error(where, "key '" + key + "' repeats line " + std::to_string(it->second.line));
    }
    entries.emplace(key, Entry{value, lineno});
  }

  ScenarioConfig cfg;
  cfg.command = command;
  if (const auto it = entries.find("units"); it != entries.end()) {
    if (it->second.value == "dimensionless") {
      cfg.units = Units::dimensionless;
    } else if (it->second.value != "si") {
      config_error(source + ":" + std::to_string(it->second.line),
                   "units must be 'si' or 'dimensionless'");
    }
  }
  if (cfg.units == Units::dimensionless) cfg.trap = trap::dimensionless_defaults();

  for (const Field& f : fields()) {
    const auto it = entries.find(f.key);
    if (it == entries.end()) continue;
    const std::string where = source + ":" + std::to_string(it->second.line);
    if (cfg.units == Units::dimensionless && f.fixed_when_dimensionless) {
      config_error(where, "key '" + f.key + "' is fixed to 1 in dimensionless units");
    }
    try {
      f.set(cfg, it->second.value);
    } catch (const BadValue& e) {
      config_error(where, "invalid value '" + it->second.value + "' for key '" + f.key +
                              "': " + e.what());
    }
  }

  for (const std::string& key : required_keys(command, cfg.units, cfg.trap.drive_mode)) {
    if (!entries.count(key)) {
      config_error(source, "missing required key '" + key + "' for subcommand " +
                               std::string(to_string(command)));
    }
  }
  try {
    cfg.trap.validate();
  } catch (const Error& e) {
    config_error(source, e.what());
  }
  check_run_settings(cfg, source);
  return cfg;
}

ScenarioConfig load_config(const std::string& path, Command command) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open config file '" + path + "'");
  return parse_config(in, command, path);
}

namespace {

using trap::Mode;

double rel_delta(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double rel_delta(cplx a, cplx b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

struct OracleState {
  su11::TruncatedRep rep;
  Eigen::VectorXcd v;
};

OracleState oracle_state(cplx z, const su11::BargmannWeight& w) {
  for (int cutoff = 300;; cutoff *= 2) {
    try {
      su11::DisplacedState d = su11::displacement_numeric(z, w, cutoff);
      return {su11::build_truncated_rep(w, cutoff), std::move(d.amplitudes)};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::truncation_insufficient || cutoff >= 9600) throw;
    }
  }
}

Outcome run_expect(const ScenarioConfig& cfg, const RunOptions& opt) {
  Outcome o;
  Table& t = o.table;
  t.columns = {"mode", "k", "m", "z_re", "z_im", "K0", "Kplus_re", "Kplus_im", "Kminus_re",
               "Kminus_im", "S1", "S2", "S3"};
  if (opt.verify) {
    t.columns.insert(t.columns.end(), {"delta_K0", "delta_Kplus", "delta_Kminus", "delta_S1",
                                       "delta_S2", "delta_S3", "delta_omega", "max_delta"});
  }
  const disk::CoherentProductState s = husimi::make_state(cfg.trap, cfg.run.z_a, cfg.run.z_r);
  double worst = 0.0;
  for (Mode mode : {Mode::axial, Mode::radial}) {
    const disk::ModeState& ms = mode == Mode::axial ? s.axial() : s.radial();
    const cplx z = ms.point.z();
    const su11::BargmannWeight& w = ms.weight;
    const su11::GeneratorExpectations e = su11::coherent_expectation_K(z, w);
    const double s1 = su11::s_moment(1, z, w);
    const double s2 = su11::s_moment(2, z, w);
    const double s3 = su11::s_moment(3, z, w);
    std::vector<Cell> row{std::string(to_string(mode)), w.k(), std::int64_t{w.m()}, z.real(),
                          z.imag(), e.k0, e.kplus.real(), e.kplus.imag(), e.kminus.real(),
                          e.kminus.imag(), s1, s2, s3};
    if (opt.verify) {
      const OracleState os = oracle_state(z, w);
      const Eigen::VectorXcd& v = os.v;
      auto expval = [&](const Eigen::MatrixXcd& op) { return v.dot(op * v); };
      const double d_k0 = rel_delta(e.k0, expval(os.rep.k0).real());
      const double d_kp = rel_delta(e.kplus, expval(os.rep.kplus));
      const double d_km = rel_delta(e.kminus, expval(os.rep.kminus));
      const Eigen::MatrixXcd x = 2.0 * (os.rep.k0 + os.rep.k1());
      Eigen::VectorXcd xv = v;
      std::array<double, 3> ds{};
      for (int j = 0; j < 3; ++j) {
        xv = x * xv;
        ds[j] = rel_delta(su11::s_moment(j + 1, z, w), v.dot(xv).real());
      }
      double d_omega = 0.0;
      for (int eps : {-1, 1}) {
        const Eigen::MatrixXcd om = os.rep.k0 + static_cast<double>(eps) * os.rep.k1();
        Eigen::VectorXcd ov = v;
        for (int n = 1; n <= 3; ++n) {
          ov = om * ov;
          d_omega = std::max(d_omega, rel_delta(su11::omega_moment(eps, n, z, w),
                                                v.dot(ov).real()));
        }
      }
      const double m = std::max({d_k0, d_kp, d_km, ds[0], ds[1], ds[2], d_omega});
      worst = std::max(worst, m);
      row.insert(row.end(), {d_k0, d_kp, d_km, ds[0], ds[1], ds[2], d_omega, m});
    }
    t.rows.push_back(std::move(row));
  }
  if (opt.verify) {
    t.meta.emplace_back("max_oracle_delta", format_double(worst));
    o.messages.push_back("max oracle delta: " + format_double(worst));
  }
  return o;
}

Outcome run_husimi(const ScenarioConfig& cfg) {
  const RunSettings& r = cfg.run;
  const dynamics::Axis re{r.grid_re_min, r.grid_re_max, r.grid_n_re};
  const dynamics::Axis im{r.grid_im_min, r.grid_im_max, r.grid_n_im};
  for (int j = 0; j < im.count; ++j) {
    for (int i = 0; i < re.count; ++i) {
      const cplx z(re.value(i), im.value(j));
      if (!(std::abs(z) < 1.0 - disk::kBoundaryGuard)) {
        throw Error(ErrorKind::out_of_domain,
                    "grid point (" + format_double(z.real()) + ", " + format_double(z.imag()) +
                        ") violates |z| < 1 - 1e-12");
      }
    }
  }
  const husimi::HusimiCoefficients h = husimi::assemble(cfg.trap, r.time);
  const disk::CoherentProductState base = husimi::make_state(cfg.trap, r.z_a, r.z_r);
  Outcome o;
  o.table.columns = {"re", "im", "H"};
  for (int j = 0; j < im.count; ++j) {
    for (int i = 0; i < re.count; ++i) {
      const cplx z(re.value(i), im.value(j));
      const disk::CoherentProductState s = r.grid_mode == Mode::axial
                                               ? base.moved_to(z, r.z_r)
                                               : base.moved_to(r.z_a, z);
      o.table.rows.push_back({z.real(), z.imag(), husimi::evaluate(h, s)});
    }
  }
  o.table.meta.emplace_back("grid_mode", std::string(to_string(r.grid_mode)));
  return o;
}

Outcome run_evolve(const ScenarioConfig& cfg) {
  const RunSettings& r = cfg.run;
  dynamics::IntegrateOptions io;
  io.tol = r.tol;
  for (int i = 1; i <= r.samples; ++i) {
    io.sample_times.push_back(i == r.samples ? r.t_end
                                             : r.t_start + (r.t_end - r.t_start) * i / r.samples);
  }
  const disk::CoherentProductState s0 = husimi::make_state(cfg.trap, r.z_a, r.z_r);
  const dynamics::Trajectory tr = dynamics::integrate(cfg.trap, s0, r.t_start, r.t_end, io);

  Outcome o;
  Table& t = o.table;
  t.columns = {"t",     "za_re", "za_im", "zr_re", "zr_im", "xi_a",
               "eta_a", "xi_r",  "eta_r", "z2",    "rho2",  "energy"};
  double drift = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const disk::CoherentProductState& s = tr.states[i];
    const disk::XiEta a = disk::xi_eta(s.axial().point);
    const disk::XiEta rr = disk::xi_eta(s.radial().point);
    t.rows.push_back({tr.times[i], s.axial().point.z().real(), s.axial().point.z().imag(),
                      s.radial().point.z().real(), s.radial().point.z().imag(), a.xi, a.eta,
                      rr.xi, rr.eta, dynamics::axial_second_moment(cfg.trap, s),
                      dynamics::radial_second_moment(cfg.trap, s), tr.energy[i]});
    drift = std::max(drift, std::abs(tr.energy[i] - tr.energy[0]));
  }
  t.meta.emplace_back("accepted_steps", std::to_string(tr.step_stats.accepted));
  t.meta.emplace_back("rejected_steps", std::to_string(tr.step_stats.rejected));
  if (tr.energy[0] != 0.0) {
    t.meta.emplace_back("max_relative_energy_drift",
                        format_double(drift / std::abs(tr.energy[0])));
  }
  return o;
}

Outcome run_equilibria(const ScenarioConfig& cfg) {
  const husimi::EquilibriumSearch search = husimi::find_equilibria(cfg.trap);
  Outcome o;
  Table& t = o.table;
  t.columns = {"index", "classification", "za_re", "za_im", "zr_re", "zr_im", "energy",
               "hess_ev0", "hess_ev1", "hess_ev2", "hess_ev3", "scaled_gradient_norm"};
  std::int64_t idx = 0;
  for (const husimi::Equilibrium& e : search.points) {
    const cplx za = e.state.axial().point.z();
    const cplx zr = e.state.radial().point.z();
    t.rows.push_back({idx++, std::string(husimi::to_string(e.classification)), za.real(),
                      za.imag(), zr.real(), zr.imag(), e.energy, e.hessian_eigenvalues[0],
                      e.hessian_eigenvalues[1], e.hessian_eigenvalues[2],
                      e.hessian_eigenvalues[3], e.scaled_gradient_norm});
  }
  t.meta.emplace_back("diagnostic", search.diagnostic);
  o.messages.push_back(search.diagnostic);
  o.total_failure = search.points.empty();
  return o;
}

void append_floquet(std::vector<Cell>& row, const dynamics::FloquetData& f) {
  row.insert(row.end(), {f.trace, f.determinant, std::int64_t{f.stable}, std::int64_t{f.marginal},
                         f.exponent, f.growth_rate});
}

Outcome run_stability(const ScenarioConfig& cfg, const RunOptions& opt) {
  const RunSettings& r = cfg.run;
  const dynamics::Grid grid{r.scan_axes, r.first, r.second};
  const std::vector<dynamics::StabilityRecord> recs =
      dynamics::stability_scan(cfg.trap, grid, opt.threads);
  const bool mathieu = r.scan_axes == dynamics::ScanAxes::mathieu;

  Outcome o;
  Table& t = o.table;
  t.columns = {mathieu ? "a_z" : "U0", mathieu ? "q_z" : "V0"};
  for (const char* m : {"a", "r"}) {
    for (const char* c : {"trace_", "det_", "stable_", "marginal_", "exponent_", "growth_"}) {
      t.columns.push_back(std::string(c) + m);
    }
  }
  t.columns.push_back("diagnostic");

  std::size_t failures = 0;
  for (const auto& rec : recs) {
    std::vector<Cell> row{rec.x, rec.y};
    append_floquet(row, rec.axial);
    append_floquet(row, rec.radial);
    row.emplace_back(rec.diagnostic);
    t.rows.push_back(std::move(row));
    if (!rec.ok()) ++failures;
  }

  // Stable/unstable transitions along each row, optionally refined.
  const int ny = r.second.count;
  for (Mode mode : {Mode::axial, Mode::radial}) {
    int edge = 0;
    for (int i = 0; i < r.first.count; ++i) {
      for (int j = 0; j + 1 < ny; ++j) {
        const auto& p = recs[static_cast<std::size_t>(i) * ny + j];
        const auto& q = recs[static_cast<std::size_t>(i) * ny + j + 1];
        if (!p.ok() || !q.ok()) continue;
        const bool sp = mode == Mode::axial ? p.axial.stable : p.radial.stable;
        const bool sq = mode == Mode::axial ? q.axial.stable : q.radial.stable;
        if (sp == sq) continue;
        dynamics::EdgeBracket b{sp ? p.y : q.y, sp ? q.y : p.y};
        if (r.refine_edges) {
          try {
            b = dynamics::refine_stability_edge(cfg.trap, r.scan_axes, mode, p.x, b.stable_side,
                                                b.unstable_side);
          } catch (const std::exception& e) {
            o.messages.push_back("edge refinement failed at x = " + format_double(p.x) + ": " +
                                 e.what());
          }
        }
        t.meta.emplace_back("edge." + std::string(to_string(mode)) + "." + std::to_string(edge++),
                            "x=" + format_double(p.x) + " stable=" +
                                format_double(b.stable_side) +
                                " unstable=" + format_double(b.unstable_side));
      }
    }
  }
  t.meta.emplace_back("failed_points", std::to_string(failures));
  o.total_failure = failures == recs.size();
  if (failures) {
    o.messages.push_back(std::to_string(failures) + " of " + std::to_string(recs.size()) +
                         " scan points failed; see the diagnostic column");
  }
  return o;
}

Outcome run_quasienergy(const ScenarioConfig& cfg) {
  const dynamics::QuasienergySpectrum q =
      dynamics::quasienergy_spectrum(cfg.trap, cfg.run.mode, cfg.run.n_levels);
  Outcome o;
  Table& t = o.table;
  t.columns = {"m", "k_plus_m", "level", "level_over_hbar"};
  for (int m = 0; m < cfg.run.n_levels; ++m) {
    t.rows.push_back({std::int64_t{m}, q.k + m, q.levels[m], q.levels[m] / cfg.trap.hbar});
  }
  t.meta.emplace_back("mode", std::string(to_string(cfg.run.mode)));
  t.meta.emplace_back("nu", format_double(q.nu));
  t.meta.emplace_back("theta", format_double(q.theta));
  t.meta.emplace_back("period", format_double(q.period));
  t.meta.emplace_back("trace", format_double(q.trace));
  t.meta.emplace_back("fixed_point_re", format_double(q.fixed_point.real()));
  t.meta.emplace_back("fixed_point_im", format_double(q.fixed_point.imag()));
  return o;
}

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const std::int64_t* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

std::string single_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

Outcome run(const ScenarioConfig& cfg, const RunOptions& opt) {
  switch (cfg.command) {
    case Command::expect: return run_expect(cfg, opt);
    case Command::husimi: return run_husimi(cfg);
    case Command::evolve: return run_evolve(cfg);
    case Command::equilibria: return run_equilibria(cfg);
    case Command::stability: return run_stability(cfg, opt);
    case Command::quasienergy: return run_quasienergy(cfg);
  }
  throw Error(ErrorKind::internal_consistency, "unhandled subcommand");
}

void write_csv(std::ostream& out, const ScenarioConfig& cfg, const Table& table) {
  out << "# tool: tdvp " << tool_version() << '\n';
  out << "# command: " << to_string(cfg.command) << '\n';
  for (const auto& [k, v] : cfg.echo()) out << "# config: " << k << " = " << v << '\n';
  for (const auto& [k, v] : table.meta) out << "# meta: " << k << " = " << single_line(v) << '\n';
  out << "# columns: " << table.columns.size() << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << csv_escape(cell_text(row[i]));
    }
    out << '\n';
  }
}

void write_json(std::ostream& out, const ScenarioConfig& cfg, const Table& table) {
  nlohmann::ordered_json j;
  j["tool"] = "tdvp";
  j["version"] = std::string(tool_version());
  j["command"] = std::string(to_string(cfg.command));
  nlohmann::ordered_json conf = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.echo()) conf[k] = v;
  j["config"] = conf;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.meta) meta[k] = v;
  j["meta"] = meta;
  j["columns"] = table.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const Cell& c : row) {
      if (const double* d = std::get_if<double>(&c)) {
        // JSON has no NaN or infinity; keep them as text.
        if (std::isfinite(*d)) {
          r.push_back(*d);
        } else {
          r.push_back(format_double(*d));
        }
      } else if (const std::int64_t* i = std::get_if<std::int64_t>(&c)) {
        r.push_back(*i);
      } else {
        r.push_back(std::get<std::string>(c));
      }
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  out << j.dump(2) << '\n';
}

}  // namespace tdvp::scenario
