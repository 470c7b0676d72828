#include "casimir/materials.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double parse_number(const std::string& s, const std::string& spec) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw_domain("material '" + spec + "': cannot parse number '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

DielectricModel make_perfect_reflector() { return PerfectReflector{}; }

DielectricModel make_plasma(double plasma_frequency) {
  DielectricModel m = Plasma{plasma_frequency};
  validate(m);
  return m;
}

DielectricModel make_drude(double plasma_frequency, double relaxation_rate) {
  DielectricModel m = Drude{plasma_frequency, relaxation_rate};
  validate(m);
  return m;
}

DielectricModel make_dielectric(double eps0) {
  DielectricModel m = Dielectric{eps0};
  validate(m);
  return m;
}

void validate(const DielectricModel& model) {
  std::visit(overloaded{
                 [](const PerfectReflector&) {},
                 [](const Plasma& p) {
                   if (!(p.plasma_frequency > 0.0) || !std::isfinite(p.plasma_frequency))
                     throw_domain("plasma frequency must be positive");
                 },
                 [](const Drude& d) {
                   if (!(d.plasma_frequency > 0.0) || !std::isfinite(d.plasma_frequency))
                     throw_domain("plasma frequency must be positive");
                   if (!(d.relaxation_rate > 0.0) || !std::isfinite(d.relaxation_rate))
                     throw_domain("relaxation rate must be positive");
                 },
                 [](const Dielectric& d) {
                   if (!(d.eps0 >= 1.0) || !std::isfinite(d.eps0))
                     throw_domain("dielectric constant must be >= 1");
                 },
             },
             model);
}

bool is_perfect_reflector(const DielectricModel& model) {
  return std::holds_alternative<PerfectReflector>(model);
}

DielectricModel parse_material(const std::string& spec) {
  const auto parts = split(spec, ':');
  const std::string& name = parts.front();
  auto expect = [&](std::size_t n) {
    if (parts.size() != n) throw_domain("material '" + spec + "': wrong number of parameters");
  };
  if (name == "perfect") {
    expect(1);
    return make_perfect_reflector();
  }
  if (name == "plasma") {
    expect(2);
    return make_plasma(parse_number(parts[1], spec));
  }
  if (name == "drude") {
    expect(3);
    return make_drude(parse_number(parts[1], spec), parse_number(parts[2], spec));
  }
  if (name == "dielectric") {
    expect(2);
    return make_dielectric(parse_number(parts[1], spec));
  }
  throw_domain("unknown material '" + spec + "'");
}

std::string to_string(const DielectricModel& model) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const PerfectReflector&) { os << "perfect"; },
                 [&](const Plasma& p) { os << "plasma:" << p.plasma_frequency; },
                 [&](const Drude& d) {
                   os << "drude:" << d.plasma_frequency << ':' << d.relaxation_rate;
                 },
                 [&](const Dielectric& d) { os << "dielectric:" << d.eps0; },
             },
             model);
  return os.str();
}

double permittivity(const DielectricModel& model, double xi) {
  if (!(xi > 0.0)) throw_domain("permittivity: xi must be positive");
  return std::visit(overloaded{
                        [](const PerfectReflector&) { return std::numeric_limits<double>::infinity(); },
                        [&](const Plasma& p) {
                          const double w = p.plasma_frequency / xi;
                          return 1.0 + w * w;
                        },
                        [&](const Drude& d) {
                          return 1.0 + d.plasma_frequency * d.plasma_frequency /
                                           (xi * (xi + d.relaxation_rate));
                        },
                        [](const Dielectric& d) { return d.eps0; },
                    },
                    model);
}

FresnelPair fresnel_from_cosine(double eps, double cos_theta) {
  if (std::isinf(eps)) return {-1.0, 1.0};
  // With a = (eps - 1) / cos^2 and s = sqrt(1 + a) = sqrt(eps - sin^2) / cos:
  //   r_TE = -a / (1 + s)^2
  //   r_TM = (eps - 1)(eps + 1 - 1/cos^2) / (eps + s)^2
  // Both forms are free of cancellation and overflow.
  const double em1 = eps - 1.0;
  const double inv_c2 = 1.0 / (cos_theta * cos_theta);
  const double a = em1 / cos_theta / cos_theta;
  const double s = std::sqrt(1.0 + a);
  const double te = -a / ((1.0 + s) * (1.0 + s));
  const double tm = (em1 / (eps + s)) * ((eps + 1.0 - inv_c2) / (eps + s));
  return {te, tm};
}

FresnelPair fresnel(const DielectricModel& model, double xi, double kappa) {
  if (!(xi > 0.0)) throw_domain("fresnel: xi must be positive (use fresnel_zero_freq)");
  const double cos_theta = constants::c * kappa / xi;
  if (!(cos_theta >= 1.0 - 1e-12)) throw_domain("fresnel: kappa must satisfy kappa >= xi / c");
  return fresnel_from_cosine(permittivity(model, xi), std::max(cos_theta, 1.0));
}

FresnelPair fresnel_zero_freq(const DielectricModel& model, double kappa) {
  if (!(kappa > 0.0)) throw_domain("fresnel_zero_freq: kappa must be positive");
  return std::visit(overloaded{
                        [](const PerfectReflector&) { return FresnelPair{-1.0, 1.0}; },
                        [&](const Plasma& p) {
                          const double q = p.plasma_frequency / constants::c;
                          const double root = std::hypot(kappa, q);
                          return FresnelPair{-(q * q) / ((kappa + root) * (kappa + root)), 1.0};
                        },
                        [](const Drude&) { return FresnelPair{0.0, 1.0}; },
                        [](const Dielectric& d) {
                          return FresnelPair{0.0, (d.eps0 - 1.0) / (d.eps0 + 1.0)};
                        },
                    },
                    model);
}

}  // namespace casimir
