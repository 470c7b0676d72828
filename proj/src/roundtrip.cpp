#include "casimir/roundtrip.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"
#include "casimir/materials.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

namespace {

constexpr int kTE = static_cast<int>(Polarization::TE);
constexpr int kTM = static_cast<int>(Polarization::TM);

// entries with total exponent beyond this are dropped
constexpr double kNegligibleExponent = 45.0;

double finite_radius_max(const Geometry& g) {
  double r = 0.0;
  if (std::isfinite(g.r1)) r = std::max(r, g.r1);
  if (std::isfinite(g.r2)) r = std::max(r, g.r2);
  return r;
}

void fill_from_combos(ReflectionElement& e, const PolarizationCoefficients& c, double pref, double s1, double s2) {
  e.m[kTM][kTM] = pref * (c.a * s2 + c.b * s1);
  e.m[kTE][kTE] = pref * (c.a * s1 + c.b * s2);
  e.m[kTM][kTE] = -pref * (c.c * s1 + c.d * s2);
  e.m[kTE][kTM] = pref * (c.c * s2 + c.d * s1);
}

struct Grid {
  std::vector<double> k;       // 1/m
  std::vector<double> weight;  // w_k k (2 pi / n_phi) / (2 pi)^2
  int n_phi;
};

Grid make_grid(int n_k, int n_phi, double alpha, double gap) {
  if (n_k < 1 || n_phi < 1) throw_domain("trace: node counts must be positive");
  const auto& rule = gauss_legendre(n_k);
  Grid g;
  g.n_phi = n_phi;
  g.k.resize(n_k);
  g.weight.resize(n_k);
  for (int i = 0; i < n_k; ++i) {
    const double v = 0.5 * (rule.nodes[i] + 1.0);
    const double kl = alpha * v / (1.0 - v);
    const double dk = alpha / ((1.0 - v) * (1.0 - v)) * 0.5 * rule.weights[i] / gap;
    g.k[i] = kl / gap;
    g.weight[i] = dk * g.k[i] / (2.0 * constants::pi * n_phi);
  }
  return g;
}

double resolve_alpha(const QuadratureSpec& q, double xi, double gap) {
  if (q.alpha > 0.0) return q.alpha;
  const double t = xi * gap / constants::c;
  return 0.5 * std::max(1.0, std::sqrt(t));
}

// One sphere's reflection elements for in.s = s_in, out.s = -s_in.
class SphereKernel {
 public:
  SphereKernel(double xi, double radius, const DielectricModel& model, AmplitudeKind kind)
      : xi_(xi), radius_(radius), model_(model), kind_(kind) {
    if (kind_ == AmplitudeKind::Exact) exact_ = std::make_unique<ExactReflector>(xi, radius, model);
  }

  ReflectionElement element(const PlaneWaveMode& in, const PlaneWaveMode& out) {
    if (kind_ == AmplitudeKind::Exact) return exact_->element(in, out);
    return to_element(wkb_reflection(in, out, radius_, model_));
  }

  double radius() const { return radius_; }

 private:
  double xi_;
  double radius_;
  DielectricModel model_;
  AmplitudeKind kind_;
  std::unique_ptr<ExactReflector> exact_;
};

// Every combined exponent is a decay; a positive argument means the
// bookkeeping is broken.
double decay(double shift) {
  if (!(shift >= 0.0)) throw Error(Error::Kind::Singularity, "trace: combined exponent is not a decay");
  return std::exp(-shift);
}

// Kahan-Babuska summation in a fixed order.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

// Kernel entries c_i F_{oi}(delta) e^{-shift} with
// shift = (kappa_o + kappa_i) l_share + R eta.
double kernel_scale(const Grid& grid, int i, double kappa_o, double kappa_i, double l_share, double r_eta) {
  return grid.weight[i] * decay((kappa_o + kappa_i) * l_share + r_eta);
}

// Azimuthal Fourier blocks of a kernel that is circulant in phi, for
// m = 0..n_phi/2. With A, B even and C, D odd in dphi, the similarity
// diag(1, i) on (TE, TM) makes every block real:
//   same polarization:  sum_delta F(delta) cos(m delta)
//   TE <- TM:          +sum_delta F(delta) sin(m delta)
//   TM <- TE:          -sum_delta F(delta) sin(m delta)
// Blocks m and -m give equal traces.
struct FourierKernel {
  int n_k = 0;
  bool coupled = false;  // TE <-> TM entries present
  std::vector<Eigen::MatrixXd> blocks;
  std::vector<double> norm;  // max |entry| per block
};

FourierKernel fourier_blocks(SphereKernel& sphere, const Grid& grid, double xi, int s_in, double l_share,
                             bool diagonal_only) {
  const int n_k = static_cast<int>(grid.k.size());
  const int n_phi = grid.n_phi;
  const int n_m = n_phi / 2 + 1;
  const double dphi = 2.0 * constants::pi / n_phi;
  FourierKernel fk;
  fk.n_k = n_k;
  fk.coupled = !diagonal_only && xi > 0.0;
  const int dim = fk.coupled ? 2 * n_k : n_k;
  // uncoupled kernels stack the TE and TM blocks side by side
  const int cols = fk.coupled ? dim : 2 * n_k;
  fk.blocks.assign(n_m, Eigen::MatrixXd::Zero(dim, cols));
  std::vector<double> cos_t(n_phi), sin_t(n_phi);
  for (int j = 0; j < n_phi; ++j) {
    cos_t[j] = std::cos(dphi * j);
    sin_t[j] = std::sin(dphi * j);
  }

  std::vector<double> kappa(n_k);
  for (int a = 0; a < n_k; ++a) kappa[a] = PlaneWaveMode{xi, grid.k[a], 0.0, 1}.kappa();

  for (int o = 0; o < n_k; ++o) {
    for (int i = 0; i < n_k; ++i) {
      const PlaneWaveMode in{xi, grid.k[i], 0.0, s_in};
      for (int d = 0; d < n_phi; ++d) {
        const PlaneWaveMode out{xi, grid.k[o], dphi * d, -s_in};
        const double r_eta = sphere.radius() * eta(in, out);
        if ((kappa[o] + kappa[i]) * l_share + r_eta > kNegligibleExponent) continue;
        const auto e = sphere.element(in, out);
        const double scale = kernel_scale(grid, i, kappa[o], kappa[i], l_share, r_eta);
        const double te = scale * e.m[kTE][kTE];
        const double tm = scale * e.m[kTM][kTM];
        const double te_tm = scale * e.m[kTE][kTM];
        const double tm_te = scale * e.m[kTM][kTE];
        for (int m = 0; m < n_m; ++m) {
          const long idx = (static_cast<long>(m) * d) % n_phi;
          const double c = cos_t[idx];
          auto& b = fk.blocks[m];
          if (fk.coupled) {
            const double sn = sin_t[idx];
            b(o, i) += c * te;
            b(n_k + o, n_k + i) += c * tm;
            b(o, n_k + i) += sn * te_tm;
            b(n_k + o, i) -= sn * tm_te;
          } else {
            b(o, i) += c * te;
            b(o, n_k + i) += c * tm;
          }
        }
      }
    }
  }
  fk.norm.resize(n_m);
  for (int m = 0; m < n_m; ++m) fk.norm[m] = fk.blocks[m].cwiseAbs().maxCoeff();
  return fk;
}

std::vector<double> plane_reflection(const Grid& grid, double xi, const DielectricModel& plane, int p) {
  std::vector<double> r(grid.k.size());
  for (size_t a = 0; a < grid.k.size(); ++a) {
    const double kappa = PlaneWaveMode{xi, grid.k[a], 0.0, 1}.kappa();
    const auto f = xi == 0.0 ? fresnel_zero_freq(plane, kappa) : fresnel(plane, xi, kappa);
    r[a] = p == kTE ? f.r_te : f.r_tm;
  }
  return r;
}

// tr A^r from A^ceil(r/2) and A^floor(r/2): tr(X Y) = sum X o Y^T
double matrix_power_trace(const Eigen::MatrixXd& a, int r) {
  if (r == 1) return a.trace();
  Eigen::MatrixXd lo = a;
  for (int j = 1; j < r / 2; ++j) lo = lo * a;
  const Eigen::MatrixXd hi = (r % 2 == 0) ? lo : Eigen::MatrixXd(lo * a);
  return hi.cwiseProduct(lo.transpose()).sum();
}

double fourier_weight(int m, int n_phi) { return (m == 0 || 2 * m == n_phi) ? 1.0 : 2.0; }

// blocks whose entries are this small relative to m = 0 are skipped
constexpr double kNegligibleBlock = 1e-15;

void check_budget(double cost, double budget) {
  if (cost > budget) {
    std::ostringstream msg;
    msg << std::scientific << std::setprecision(2) << "trace: estimated cost " << cost << " exceeds budget " << budget;
    throw Error(Error::Kind::Budget, msg.str());
  }
}

double trace_cost(int r, int n_k, int n_phi, int spheres, bool fourier) {
  const double elements = spheres * static_cast<double>(n_k) * n_k * n_phi;
  if (r == 1 && !fourier) return elements;
  const double n_m = n_phi / 2 + 1.0;
  const double dim = 2.0 * n_k;
  const double products = (spheres - 1) + (r + 1) / 2 - 1;
  return elements * n_m + n_m * std::max(products, 0.0) * dim * dim * dim + n_m * dim * dim;
}

void validate_trace_args(int r, double xi, const Geometry& g) {
  if (r < 1) throw_domain("trace: r must be >= 1");
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw_domain("trace: xi must be finite and >= 0");
  validate(g);
}

double sphere_sphere_once(int r, double xi, const Geometry& g, const MaterialPair& mats, int n_k, int n_phi,
                          double alpha, AmplitudeKind kind, bool fourier, bool diagonal_only) {
  const Grid grid = make_grid(n_k, n_phi, alpha, g.gap);
  const double l_share = 0.5 * g.gap;
  SphereKernel s1(xi, g.r1, mats.first, kind);
  SphereKernel s2(xi, g.r2, mats.second, kind);
  const double dphi = 2.0 * constants::pi / n_phi;

  if (r == 1 && !fourier) {
    // tr(K1 K2) = n_phi sum_{a,b,delta} K1_{ba}(-delta) K2_{ab}(delta)
    std::vector<double> kappa(n_k);
    for (int a = 0; a < n_k; ++a) kappa[a] = PlaneWaveMode{xi, grid.k[a], 0.0, 1}.kappa();
    CompensatedSum sum;
    for (int a = 0; a < n_k; ++a) {
      for (int b = 0; b < n_k; ++b) {
        for (int d = 0; d < n_phi; ++d) {
          const PlaneWaveMode mb{xi, grid.k[b], 0.0, -1};
          const PlaneWaveMode ma{xi, grid.k[a], dphi * d, 1};
          const double et = eta(mb, ma);
          const double shift = (kappa[a] + kappa[b]) * g.gap + (g.r1 + g.r2) * et;
          if (shift > kNegligibleExponent) continue;
          const auto e2 = s2.element(mb, ma);  // b(-) -> a(+)
          const auto e1 = s1.element(ma, mb);  // a(+) -> b(-)
          const double w = n_phi * grid.weight[a] * grid.weight[b] * decay(shift);
          double local = 0.0;
          for (int p = 0; p < 2; ++p)
            for (int pp = 0; pp < 2; ++pp)
              if (!diagonal_only || p == pp) local += e1.m[p][pp] * e2.m[pp][p];
          sum.add(w * local);
        }
      }
    }
    return sum.value();
  }

  const auto k2 = fourier_blocks(s2, grid, xi, -1, l_share, diagonal_only);
  const auto k1 = fourier_blocks(s1, grid, xi, 1, l_share, diagonal_only);
  const double ref = k1.norm[0] * k2.norm[0];
  CompensatedSum sum;
  for (size_t m = 0; m < k1.blocks.size(); ++m) {
    if (k1.norm[m] * k2.norm[m] <= kNegligibleBlock * ref) continue;
    const double w = fourier_weight(static_cast<int>(m), n_phi);
    if (k1.coupled) {
      sum.add(w * matrix_power_trace(k1.blocks[m] * k2.blocks[m], r));
    } else {
      for (int p = 0; p < 2; ++p) {
        const Eigen::MatrixXd prod = k1.blocks[m].middleCols(p * n_k, n_k) * k2.blocks[m].middleCols(p * n_k, n_k);
        sum.add(w * matrix_power_trace(prod, r));
      }
    }
  }
  return sum.value();
}

double plane_sphere_once(int r, double xi, const Geometry& g, const MaterialPair& mats, int n_k, int n_phi,
                         double alpha, AmplitudeKind kind, bool fourier, bool diagonal_only) {
  const double radius = std::isfinite(g.r1) ? g.r1 : g.r2;
  const Grid grid = make_grid(n_k, n_phi, alpha, g.gap);
  SphereKernel sphere(xi, radius, mats.first, kind);
  std::vector<double> rp[2] = {plane_reflection(grid, xi, mats.second, kTE),
                               plane_reflection(grid, xi, mats.second, kTM)};

  if (r == 1 && !fourier) {
    CompensatedSum sum;
    for (int a = 0; a < n_k; ++a) {
      const PlaneWaveMode in{xi, grid.k[a], 0.0, 1};
      const PlaneWaveMode out{xi, grid.k[a], 0.0, -1};
      const double kappa = in.kappa();
      if (2.0 * kappa * g.gap > kNegligibleExponent) continue;
      const auto e = sphere.element(in, out);
      const double w = n_phi * grid.weight[a] * decay(2.0 * kappa * g.gap);
      sum.add(w * (e.m[kTE][kTE] * rp[kTE][a] + e.m[kTM][kTM] * rp[kTM][a]));
    }
    return sum.value();
  }

  const auto ks = fourier_blocks(sphere, grid, xi, 1, g.gap, diagonal_only);
  CompensatedSum sum;
  for (size_t m = 0; m < ks.blocks.size(); ++m) {
    if (ks.norm[m] <= kNegligibleBlock * ks.norm[0]) continue;
    const double w = fourier_weight(static_cast<int>(m), n_phi);
    if (ks.coupled) {
      Eigen::VectorXd diag(2 * n_k);
      for (int p = 0; p < 2; ++p)
        for (int a = 0; a < n_k; ++a) diag(p * n_k + a) = rp[p][a];
      sum.add(w * matrix_power_trace(ks.blocks[m] * diag.asDiagonal(), r));
    } else {
      for (int p = 0; p < 2; ++p) {
        Eigen::VectorXd diag(n_k);
        for (int a = 0; a < n_k; ++a) diag(a) = rp[p][a];
        sum.add(w * matrix_power_trace(ks.blocks[m].middleCols(p * n_k, n_k) * diag.asDiagonal(), r));
      }
    }
  }
  return sum.value();
}

int half_even(int n) { return std::max(2, 2 * ((n / 2 + 1) / 2)); }

}  // namespace

QuadratureSpec QuadratureSpec::for_geometry(const Geometry& g) {
  validate(g);
  const double s = std::sqrt(finite_radius_max(g) / g.gap);
  QuadratureSpec q;
  q.n_k = std::max(32, static_cast<int>(std::ceil(12.0 * s)));
  const int n_phi = std::max(16, static_cast<int>(std::ceil(10.0 * s)));
  q.n_phi = n_phi + (n_phi % 2);
  return q;
}

double eta(const PlaneWaveMode& in, const PlaneWaveMode& out) {
  const double ki = in.k;
  const double kj = out.k;
  const double dphi = out.phi - in.phi;
  // |k_i - k_j|^2 = (k_i - k_j)^2 + 4 k_i k_j sin^2(dphi/2)
  const double sh = std::sin(0.5 * dphi);
  const double dk2 = (ki - kj) * (ki - kj) + 4.0 * ki * kj * sh * sh;
  const double kap_i = in.kappa();
  const double kap_j = out.kappa();
  const double denom = kap_i + kap_j + 2.0 * effective_kappa(in, out);
  if (denom == 0.0) return 0.0;
  return dk2 / denom;
}

ExactReflector::ExactReflector(double xi, double radius, const DielectricModel& model) : xi_(xi), radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw_domain("ExactReflector: radius must be finite and positive");
  if (!(xi >= 0.0)) throw_domain("ExactReflector: xi must be >= 0");
  if (xi == 0.0)
    zero_ = std::make_unique<ZeroFrequencySphere>(radius, model);
  else
    mie_ = std::make_unique<MieSphere>(xi, radius, model);
}

ReflectionElement ExactReflector::element(const PlaneWaveMode& in, const PlaneWaveMode& out) {
  if (in.xi != xi_ || out.xi != xi_) throw_domain("ExactReflector: mode frequency differs from the sphere's");
  if (in.s != -out.s) throw_domain("ExactReflector: reflection needs opposite propagation signs");
  const double kappa_eff = effective_kappa(in, out);
  const double y = 2.0 * radius_ * kappa_eff;
  const auto coeff = abcd(in, out);
  ReflectionElement e;
  e.exponent = y;
  if (xi_ == 0.0) {
    const auto amp = zero_->amplitudes_over_xi(std::max(kappa_eff, std::numeric_limits<double>::min()));
    const double pref = 2.0 * constants::pi * constants::c / out.kappa();
    fill_from_combos(e, coeff, pref, amp.s1.scaled(y), amp.s2.scaled(y));
    return e;
  }
  const double sin_half = std::max(1.0, constants::c * kappa_eff / xi_);
  const ScatteringKinematics kin{1.0 - 2.0 * sin_half * sin_half, sin_half};
  const auto amp = mie_->amplitudes(kin);
  const double pref = 2.0 * constants::pi * constants::c / (xi_ * out.kappa());
  fill_from_combos(e, coeff, pref, amp.s1.scaled(y), amp.s2.scaled(y));
  return e;
}

ReflectionElement reflection_element_exact(const PlaneWaveMode& in, const PlaneWaveMode& out, double radius,
                                           const DielectricModel& model) {
  ExactReflector r(in.xi, radius, model);
  return r.element(in, out);
}

ReciprocityResult check_reciprocity(const PlaneWaveMode& mode_i, const PlaneWaveMode& mode_j,
                                    const ElementFunction& element) {
  const auto forward = element(mode_j, mode_i);
  const auto backward = element(reversed(mode_i), reversed(mode_j));
  const double ki = mode_i.kappa();
  const double kj = mode_j.kappa();
  double lhs[2][2];
  double rhs[2][2];
  double scale = 0.0;
  for (int pi = 0; pi < 2; ++pi) {
    for (int pj = 0; pj < 2; ++pj) {
      const double sign = pi == pj ? 1.0 : -1.0;
      // both elements carry the same exponent; compare in the scaled frame
      lhs[pi][pj] = ki * forward.m[pi][pj];
      rhs[pi][pj] = kj * sign * backward.m[pj][pi] * std::exp(backward.exponent - forward.exponent);
      scale = std::max({scale, std::abs(lhs[pi][pj]), std::abs(rhs[pi][pj])});
    }
  }
  double residual = 0.0;
  if (scale > 0.0)
    for (int pi = 0; pi < 2; ++pi)
      for (int pj = 0; pj < 2; ++pj) residual = std::max(residual, std::abs(lhs[pi][pj] - rhs[pi][pj]) / scale);
  return {residual < 1e-10, residual};
}

TraceResult trace_m_r(int r, double xi, const Geometry& g, const MaterialPair& mats, const QuadratureSpec& q,
                      AmplitudeKind kind, double budget) {
  validate_trace_args(r, xi, g);
  if (g.is_plane_sphere()) return trace_m_r_plane_sphere(r, xi, g, mats, q, kind, budget);
  const int nk2 = std::max(1, q.n_k / 2);
  const int np2 = half_even(q.n_phi);
  check_budget(trace_cost(r, q.n_k, q.n_phi, 2, q.use_fourier_blocks) + trace_cost(r, nk2, np2, 2, q.use_fourier_blocks), budget);
  const double alpha = resolve_alpha(q, xi, g.gap);
  const double full = sphere_sphere_once(r, xi, g, mats, q.n_k, q.n_phi, alpha, kind, q.use_fourier_blocks, q.diagonal_polarizations_only);
  const double half = sphere_sphere_once(r, xi, g, mats, nk2, np2, alpha, kind, q.use_fourier_blocks, q.diagonal_polarizations_only);
  return {full, std::abs(full - half)};
}

TraceResult trace_m_r_plane_sphere(int r, double xi, const Geometry& g, const MaterialPair& mats,
                                   const QuadratureSpec& q, AmplitudeKind kind, double budget) {
  validate_trace_args(r, xi, g);
  if (!g.is_plane_sphere()) throw_domain("trace_m_r_plane_sphere: geometry has no plane");
  const int nk2 = std::max(1, q.n_k / 2);
  const int np2 = half_even(q.n_phi);
  check_budget(trace_cost(r, q.n_k, q.n_phi, 1, q.use_fourier_blocks) + trace_cost(r, nk2, np2, 1, q.use_fourier_blocks), budget);
  const double alpha = resolve_alpha(q, xi, g.gap);
  const double full = plane_sphere_once(r, xi, g, mats, q.n_k, q.n_phi, alpha, kind, q.use_fourier_blocks, q.diagonal_polarizations_only);
  const double half = plane_sphere_once(r, xi, g, mats, nk2, np2, alpha, kind, q.use_fourier_blocks, q.diagonal_polarizations_only);
  return {full, std::abs(full - half)};
}

namespace {

// Remainder of sum_{r > r_max} from the last two terms, fitted to C r^{-p}
// (tail ~ last r / (p - 1)); |last| when only one term is known.
double tail_estimate(double prev, double last, int r_max) {
  if (r_max < 2 || last == 0.0) return std::abs(last);
  if (prev == 0.0 || (prev > 0.0) != (last > 0.0) || std::abs(last) >= std::abs(prev))
    return std::numeric_limits<double>::infinity();
  const double p = std::log(prev / last) / std::log(static_cast<double>(r_max) / (r_max - 1));
  if (p <= 1.0) return std::numeric_limits<double>::infinity();
  return std::abs(last) * std::max(1.0, r_max / (p - 1.0));
}

}  // namespace

FreeEnergyEstimate free_energy_from_traces(const TraceTable& table, double temperature, int r_max, int n_max) {
  if (!(temperature > 0.0)) throw_domain("free_energy_from_traces: temperature must be positive");
  if (r_max < 1 || n_max < 0) throw_domain("free_energy_from_traces: r_max >= 1 and n_max >= 0 required");
  double sum = 0.0;
  double err = 0.0;
  double last = 0.0;
  double prev = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const double w = n == 0 ? 0.5 : 1.0;
    for (int r = 1; r <= r_max; ++r) {
      const auto it = table.find({n, r});
      if (it == table.end())
        throw Error(Error::Kind::MissingData,
                    "free_energy_from_traces: missing trace n=" + std::to_string(n) + " r=" + std::to_string(r));
      sum += w * it->second.value / r;
      err += w * it->second.est_error / r;
      if (r == r_max) last += w * it->second.value / r;
      if (r == r_max - 1) prev += w * it->second.value / r;
    }
  }
  const double kt = constants::k_B * temperature;
  FreeEnergyEstimate out;
  out.value = -kt * sum;
  out.est_error = kt * (err + tail_estimate(prev, last, r_max));
  out.converged = std::abs(last) <= 1e-3 * std::abs(sum);
  return out;
}

FreeEnergyEstimate free_energy_zero_T_from_traces(const std::function<TraceResult(double xi, int r)>& trace,
                                                  double gap, int r_max) {
  if (!(gap > 0.0)) throw_domain("free_energy_zero_T_from_traces: gap must be positive");
  if (r_max < 1) throw_domain("free_energy_zero_T_from_traces: r_max must be >= 1");
  // t = xi L / c = v / (1 - v), Gauss-Legendre in v; error from half the nodes
  auto integrate = [&](int n, double* quad_err, double* last, double* prev) {
    const auto& rule = gauss_legendre(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = 0.5 * (rule.nodes[i] + 1.0);
      const double t = v / (1.0 - v);
      const double jac = 0.5 * rule.weights[i] / ((1.0 - v) * (1.0 - v));
      const double xi = t * constants::c / gap;
      for (int r = 1; r <= r_max; ++r) {
        const auto tr = trace(xi, r);
        total += jac * tr.value / r;
        if (quad_err) *quad_err += jac * tr.est_error / r;
        if (last && r == r_max) *last += jac * tr.value / r;
        if (prev && r == r_max - 1) *prev += jac * tr.value / r;
      }
    }
    return total;
  };
  double quad_err = 0.0;
  double last = 0.0;
  double prev = 0.0;
  const double fine = integrate(24, &quad_err, &last, &prev);
  const double coarse = integrate(12, nullptr, nullptr, nullptr);
  const double pref = constants::hbar * constants::c / (2.0 * constants::pi * gap);
  FreeEnergyEstimate out;
  out.value = -pref * fine;
  out.est_error = pref * (std::abs(fine - coarse) + quad_err + tail_estimate(prev, last, r_max));
  out.converged = std::abs(last) <= 1e-3 * std::abs(fine);
  return out;
}

void write_trace_csv(std::ostream& os, const TraceTable& table) {
  os << "n,r,trace,est_error\n";
  os << std::setprecision(17);
  for (const auto& [key, tr] : table) os << key.first << ',' << key.second << ',' << tr.value << ',' << tr.est_error << '\n';
}

}  // namespace casimir
