#pragma once

#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <utility>

#include "casimir/geometry.hpp"
#include "casimir/mie.hpp"
#include "casimir/polarization.hpp"
#include "casimir/wkb.hpp"

namespace casimir {

enum class AmplitudeKind { Exact, Wkb };

// Tensor-product rule for the transverse wave vectors: Gauss-Legendre in
// v in (0, 1) with k L = alpha v / (1 - v), and n_phi equally spaced azimuths.
struct QuadratureSpec {
  int n_k = 64;
  int n_phi = 32;
  double alpha = 0.0;  // 0 selects 0.5 max(1, sqrt(xi L / c))
  bool use_fourier_blocks = false;  // also for r = 1 (normally a direct sum)
  bool diagonal_polarizations_only = false;  // drop TE<->TM elements

  // Node counts resolving the Gaussian ridge of width sqrt(2 kappa / R)
  // around the saddle-point manifold.
  static QuadratureSpec for_geometry(const Geometry& g);
};

struct TraceResult {
  double value = 0.0;
  double est_error = 0.0;  // |value - value at half resolution|
};

// Largest number of kernel evaluations accepted by trace_m_r.
inline constexpr double kDefaultTraceBudget = 2e10;

// eta = kappa_i + kappa_j - sqrt(2 (q^2 + kappa_i kappa_j + k_i k_j cos(dphi)))
// in the rationalized form |k_i - k_j|^2 / (kappa_i + kappa_j + sqrt(...)).
double eta(const PlaneWaveMode& in, const PlaneWaveMode& out);

// Exact reflection elements of one sphere at one frequency; keeps the Mie
// tables between calls.
class ExactReflector {
 public:
  ExactReflector(double xi, double radius, const DielectricModel& model);
  ReflectionElement element(const PlaneWaveMode& in, const PlaneWaveMode& out);

 private:
  double xi_;
  double radius_;
  std::unique_ptr<MieSphere> mie_;
  std::unique_ptr<ZeroFrequencySphere> zero_;
};

ReflectionElement reflection_element_exact(const PlaneWaveMode& in, const PlaneWaveMode& out, double radius,
                                           const DielectricModel& model);

using ElementFunction = std::function<ReflectionElement(const PlaneWaveMode& in, const PlaneWaveMode& out)>;

struct ReciprocityResult {
  bool ok;          // residual < 1e-10
  double residual;  // max over polarizations, relative to the largest entry
};

// kappa_i <K_i,p_i|R|K_j,p_j> = kappa_j (-1)^{p_i+p_j} <-K_j,p_j|R|-K_i,p_i>
ReciprocityResult check_reciprocity(const PlaneWaveMode& mode_i, const PlaneWaveMode& mode_j,
                                    const ElementFunction& element);

// tr M^r. For a plane-sphere geometry (r2 infinite) mats.first is the sphere
// and mats.second the plane.
TraceResult trace_m_r(int r, double xi, const Geometry& g, const MaterialPair& mats, const QuadratureSpec& q,
                      AmplitudeKind kind, double budget = kDefaultTraceBudget);
TraceResult trace_m_r_plane_sphere(int r, double xi, const Geometry& g, const MaterialPair& mats,
                                   const QuadratureSpec& q, AmplitudeKind kind,
                                   double budget = kDefaultTraceBudget);

// Traces keyed by (n, r).
using TraceTable = std::map<std::pair<int, int>, TraceResult>;

struct FreeEnergyEstimate {
  double value;
  double est_error;  // quadrature errors plus |last r term|
  bool converged;    // |last r term| <= 1e-3 |sum|
};

// -(k_B T / 2) sum_{n in Z} sum_{r <= r_max} tr M^r(|xi_n|) / r, n up to n_max.
FreeEnergyEstimate free_energy_from_traces(const TraceTable& table, double temperature, int r_max, int n_max);

// T = 0: -(hbar / 2 pi) int_0^inf dxi sum_r tr M^r(xi) / r.
FreeEnergyEstimate free_energy_zero_T_from_traces(const std::function<TraceResult(double xi, int r)>& trace,
                                                  double gap, int r_max);

void write_trace_csv(std::ostream& os, const TraceTable& table);

}  // namespace casimir
