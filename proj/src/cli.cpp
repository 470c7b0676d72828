#include "casimir/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"
#include "casimir/materials.hpp"
#include "casimir/mie.hpp"
#include "casimir/pfa.hpp"
#include "casimir/roundtrip.hpp"
#include "casimir/wkb.hpp"

namespace casimir::cli {

namespace {

using Cell = std::variant<double, long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << v;
  return os.str();
}

void write_csv(std::ostream& os, const Table& t) {
  for (size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>)
              os << format_double(v);
            else
              os << v;
          },
          row[i]);
    }
    os << '\n';
  }
}

// one object per line
void write_json(std::ostream& os, const Table& t) {
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (size_t i = 0; i < row.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) {
              if (std::isfinite(v))
                obj[t.columns[i]] = v;
              else
                obj[t.columns[i]] = format_double(v);
            } else {
              obj[t.columns[i]] = v;
            }
          },
          row[i]);
    }
    os << obj.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict) << '\n';
  }
}

struct OutputOptions {
  std::string format = "csv";
  std::string path;
};

void add_output_options(CLI::App* sub, OutputOptions& o) {
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--output,-o", o.path, "Output file (default stdout)");
}

void emit(const Table& t, const OutputOptions& o, std::ostream& out) {
  std::ofstream file;
  std::ostream* os = &out;
  if (!o.path.empty()) {
    file.open(o.path);
    if (!file) throw_domain("cannot open output file " + o.path);
    os = &file;
  }
  if (o.format == "json")
    write_json(*os, t);
  else
    write_csv(*os, t);
}

// "a:b:n" -> n equally spaced values from a to b inclusive
std::vector<double> parse_sweep(const std::string& spec, bool logarithmic) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw_domain("sweep must be <start>:<stop>:<count>, got '" + spec + "'");
  double a = 0.0;
  double b = 0.0;
  long n = 0;
  try {
    size_t pos = 0;
    a = std::stod(parts[0], &pos);
    if (pos != parts[0].size()) throw std::invalid_argument(parts[0]);
    b = std::stod(parts[1], &pos);
    if (pos != parts[1].size()) throw std::invalid_argument(parts[1]);
    n = std::stol(parts[2], &pos);
    if (pos != parts[2].size()) throw std::invalid_argument(parts[2]);
  } catch (const std::logic_error&) {
    throw_domain("cannot parse sweep '" + spec + "'");
  }
  if (n < 1) throw_domain("sweep count must be >= 1");
  if (logarithmic && !(a > 0.0 && b > 0.0)) throw_domain("logarithmic sweep needs positive endpoints");
  std::vector<double> v(n);
  for (long i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    v[i] = logarithmic ? a * std::pow(b / a, f) : a + (b - a) * f;
  }
  return v;
}

DielectricModel material_or_throw(const std::string& spec) { return parse_material(spec); }

// ---------------------------------------------------------------------------

struct PfaConfig {
  double r1 = 50e-6;
  double r2 = std::numeric_limits<double>::infinity();
  bool plane = false;
  double gap = 1e-6;
  std::string sweep_gap;
  double temperature = 300.0;
  std::string material1 = "perfect";
  std::string material2 = "perfect";
  OutputOptions output;
};

Table run_pfa(const PfaConfig& c) {
  const MaterialPair mats{material_or_throw(c.material1), material_or_throw(c.material2)};
  const std::vector<double> gaps = c.sweep_gap.empty() ? std::vector<double>{c.gap} : parse_sweep(c.sweep_gap, false);
  const double r2 = c.plane ? std::numeric_limits<double>::infinity() : c.r2;
  const ThermalSpec th{c.temperature};
  if (!(c.temperature >= 0.0)) throw_domain("temperature must be >= 0");
  for (double L : gaps) validate(Geometry{c.r1, r2, L});

  Table t;
  t.columns = {"L",        "T",        "R1",          "R2",          "material1",       "material2",
               "free_energy_J", "force_N", "n_max_used", "est_error", "force_est_error"};
  for (double L : gaps) {
    const Geometry g{c.r1, r2, L};
    const PfaValue e = c.temperature == 0.0 ? free_energy_zero_T(g, mats) : free_energy(g, mats, th);
    const PfaValue f = force(g, mats, th);
    t.rows.push_back({L, c.temperature, c.r1, r2, to_string(mats.first), to_string(mats.second), e.value, f.value,
                      static_cast<long>(std::max(e.n_max_used, f.n_max_used)), e.est_error, f.est_error});
  }
  return t;
}

struct RoundtripConfig {
  std::vector<double> ratios{100.0, 300.0, 1000.0};
  double mu = 0.0;
  double gap = 1e-6;
  int r = 1;
  double t = 0.0;
  std::string material1 = "perfect";
  std::string material2 = "perfect";
  std::string amplitude = "exact";
  int n_k = 0;
  int n_phi = 0;
  double budget = kDefaultTraceBudget;
  OutputOptions output;
};

Table run_roundtrip(const RoundtripConfig& c) {
  const MaterialPair mats{material_or_throw(c.material1), material_or_throw(c.material2)};
  if (!(c.mu >= 0.0 && c.mu <= 0.5)) throw_domain("mu must lie in [0, 1/2]");
  if (!(c.gap > 0.0)) throw_domain("gap must be positive");
  if (c.r < 1) throw_domain("r must be >= 1");
  if (!(c.t >= 0.0)) throw_domain("t must be >= 0");
  const AmplitudeKind kind = c.amplitude == "wkb" ? AmplitudeKind::Wkb : AmplitudeKind::Exact;
  const double xi = c.t * constants::c / c.gap;

  Table t;
  t.columns = {"geometry", "R_eff_over_L", "mu", "r", "t", "trace", "trace_pfa", "ratio", "est_error"};
  for (double ratio : c.ratios) {
    if (!(ratio > 0.0)) throw_domain("R_eff/L ratios must be positive");
    const double r_eff = ratio * c.gap;
    Geometry g = Geometry::plane_sphere(r_eff, c.gap);
    if (c.mu > 0.0) g = Geometry{r_eff / (1.0 - c.mu), r_eff / c.mu, c.gap};
    QuadratureSpec q = QuadratureSpec::for_geometry(g);
    if (c.n_k > 0) q.n_k = c.n_k;
    if (c.n_phi > 0) q.n_phi = c.n_phi;
    const TraceResult tr = trace_m_r(c.r, xi, g, mats, q, kind, c.budget);
    const double pfa = tr_m_r_pfa(c.r, xi, c.gap, r_eff, mats);
    t.rows.push_back({std::string(c.mu > 0.0 ? "sphere-sphere" : "plane-sphere"), ratio, c.mu,
                      static_cast<long>(c.r), c.t, tr.value, pfa, tr.value / pfa, tr.est_error / std::abs(pfa)});
  }
  return t;
}

struct WkbCheckConfig {
  std::vector<double> x{50.0, 100.0, 200.0, 400.0};
  std::vector<double> cos_theta{-1.0};
  std::string material = "perfect";
  double radius = 1e-6;
  OutputOptions output;
};

Table run_wkb_check(const WkbCheckConfig& c) {
  const DielectricModel model = material_or_throw(c.material);
  if (!(c.radius > 0.0)) throw_domain("radius must be positive");
  Table t;
  t.columns = {"x", "cos_theta", "polarization", "log_abs_s_exact", "log_abs_s_wkb", "rel_error", "est_error"};
  for (double x : c.x) {
    if (!(x > 0.0)) throw_domain("size parameter x must be positive");
    const double xi = x * constants::c / c.radius;
    const double eps = permittivity(model, xi);
    MieSphere sphere(x, eps);
    for (double ct : c.cos_theta) {
      // the specular limit holds only on the round-trip branch cos(Theta) <= -1
      if (!(ct <= -1.0))
        throw_domain("cos_theta = " + format_double(ct) +
                     " is outside the backward round-trip domain (cos_theta <= -1 required)");
      const auto kin = kinematics_from_cosine(ct);
      const auto amp = sphere.amplitudes(kin);
      for (Polarization p : {Polarization::TE, Polarization::TM}) {
        const LogScaled exact = p == Polarization::TE ? amp.s1 : amp.s2;
        const LogScaled wkb = wkb_amplitude(p, kin, x, eps);
        double rel = std::numeric_limits<double>::infinity();
        if (!wkb.is_zero() && !exact.is_zero())
          rel = std::abs(exact.sign * wkb.sign * std::exp(exact.log_magnitude - wkb.log_magnitude) - 1.0);
        t.rows.push_back({x, ct, std::string(p == Polarization::TE ? "TE" : "TM"), exact.log_magnitude,
                          wkb.log_magnitude, rel, kDefaultMieTolerance * (1.0 + rel)});
      }
    }
  }
  return t;
}

struct MaterialsConfig {
  std::string material = "perfect";
  std::vector<double> xi;
  std::string xi_sweep = "1e13:1e17:9";
  std::vector<double> cos_theta{1.0};
  OutputOptions output;
};

Table run_materials(const MaterialsConfig& c) {
  const DielectricModel model = material_or_throw(c.material);
  const std::vector<double> xis = c.xi.empty() ? parse_sweep(c.xi_sweep, true) : c.xi;
  Table t;
  t.columns = {"material", "xi", "cos_theta", "eps", "r_te", "r_tm", "est_error"};
  for (double xi : xis) {
    if (!(xi > 0.0)) throw_domain("xi must be positive");
    for (double ct : c.cos_theta) {
      if (!(ct >= 1.0)) throw_domain("cos_theta = c kappa / xi must be >= 1 on the imaginary axis");
      const auto r = fresnel(model, xi, ct * xi / constants::c);
      t.rows.push_back({to_string(model), xi, ct, permittivity(model, xi), r.r_te, r.r_tm, 0.0});
    }
  }
  return t;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case Error::Kind::Domain:
      return kParseError;
    case Error::Kind::Budget:
      return kBudgetExceeded;
    case Error::Kind::NonConvergence:
    case Error::Kind::Singularity:
    case Error::Kind::MissingData:
      return kNonConvergence;
  }
  return kFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Casimir free energy and force in the plane-wave basis"};
  app.require_subcommand(1);

  PfaConfig pfa;
  auto* s_pfa = app.add_subcommand("pfa", "PFA free energy and force");
  s_pfa->add_option("--r1", pfa.r1, "Radius of sphere 1 (m)");
  auto* o_r2 = s_pfa->add_option("--r2", pfa.r2, "Radius of sphere 2 (m)");
  s_pfa->add_flag("--plane", pfa.plane, "Sphere 2 is a plane")->excludes(o_r2);
  auto* o_gap = s_pfa->add_option("--gap", pfa.gap, "Surface separation L (m)");
  s_pfa->add_option("--sweep-gap", pfa.sweep_gap, "start:stop:count, linear in L")->excludes(o_gap);
  s_pfa->add_option("--temp", pfa.temperature, "Temperature (K); 0 selects the T = 0 integral");
  s_pfa->add_option("--material1", pfa.material1, "Material of body 1");
  s_pfa->add_option("--material2", pfa.material2, "Material of body 2");
  add_output_options(s_pfa, pfa.output);

  RoundtripConfig rt;
  auto* s_rt = app.add_subcommand("roundtrip", "Numerical round-trip trace against its PFA limit");
  s_rt->add_option("--ratios", rt.ratios, "R_eff/L values")->delimiter(',');
  s_rt->add_option("--mu", rt.mu, "R_min/(R1+R2); 0 selects plane-sphere");
  s_rt->add_option("--gap", rt.gap, "Surface separation L (m)");
  s_rt->add_option("--r", rt.r, "Number of round trips");
  s_rt->add_option("--t", rt.t, "Dimensionless frequency xi L / c");
  s_rt->add_option("--material1", rt.material1, "Material of sphere 1");
  s_rt->add_option("--material2", rt.material2, "Material of sphere 2 or plane");
  s_rt->add_option("--amplitude", rt.amplitude, "Scattering kernel")->check(CLI::IsMember({"exact", "wkb"}));
  s_rt->add_option("--nk", rt.n_k, "Radial nodes (0 = automatic)");
  s_rt->add_option("--nphi", rt.n_phi, "Azimuthal nodes (0 = automatic)");
  s_rt->add_option("--budget", rt.budget, "Maximum estimated kernel evaluations");
  add_output_options(s_rt, rt.output);

  WkbCheckConfig wk;
  auto* s_wk = app.add_subcommand("wkb-check", "Exact Mie amplitudes against the specular limit");
  s_wk->add_option("--x", wk.x, "Size parameters xi R / c")->delimiter(',');
  s_wk->add_option("--cos", wk.cos_theta, "cos(Theta) values, <= -1")->delimiter(',');
  s_wk->add_option("--material", wk.material, "Sphere material");
  s_wk->add_option("--radius", wk.radius, "Sphere radius (m), fixes xi for dispersive materials");
  add_output_options(s_wk, wk.output);

  MaterialsConfig mt;
  auto* s_mt = app.add_subcommand("materials", "Permittivity and Fresnel coefficients on the imaginary axis");
  s_mt->add_option("--material", mt.material, "Material");
  auto* o_xi = s_mt->add_option("--xi", mt.xi, "Frequencies (rad/s)")->delimiter(',');
  s_mt->add_option("--xi-sweep", mt.xi_sweep, "start:stop:count, logarithmic")->excludes(o_xi);
  s_mt->add_option("--cos", mt.cos_theta, "c kappa / xi values, >= 1")->delimiter(',');
  add_output_options(s_mt, mt.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kParseError;
  }

  try {
    if (*s_pfa) emit(run_pfa(pfa), pfa.output, out);
    if (*s_rt) emit(run_roundtrip(rt), rt.output, out);
    if (*s_wk) emit(run_wkb_check(wk), wk.output, out);
    if (*s_mt) emit(run_materials(mt), mt.output, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kSuccess;
}

}  // namespace casimir::cli
