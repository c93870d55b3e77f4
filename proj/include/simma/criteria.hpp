#pragma once

#include <string>
#include <vector>

#include "simma/kernels.hpp"
#include "simma/noise_models.hpp"
#include "simma/numerics.hpp"

namespace simma {

using numerics::Assessment;
using numerics::Status;

/// Noise components paired one-to-one with kernel sections.
struct MixedModel {
  MixedNoise noise;
  std::vector<KernelPair> kernels;
  numerics::Interval interval{0.0, 1.0};

  void validate() const;
  std::size_t size() const { return kernels.size(); }
};

/// Weighted aggregate of a per-component integral.
struct Aggregate {
  Assessment total;
  std::vector<Assessment> parts;  // per component, without the weight
};

/// sum_v w_v sigma2_v int |f'(s, v)|^2 ds.
Aggregate compute_Cf(const MixedModel& model);
/// sum_v w_v int xi_v(f'(s, v)) ds.
Aggregate compute_Df(const MixedModel& model, Evaluation mode = Evaluation::Auto);

struct NecessaryIntegrals {
  std::vector<Assessment> weighted;    // int int (|f'x| ^ |f'x|^2)(1 ^ x^-2) rho(dx) ds
  std::vector<Assessment> unweighted;  // int int (|f'x|^2 ^ |f'x|) rho(dx) ds
};

NecessaryIntegrals necessary_integral(const MixedModel& model, Evaluation mode = Evaluation::Auto);

/// int (|f'(s) x|^2 ^ |f'(s) x|) ds for f(s) = s_+^alpha, alpha in (0, 1/2).
/// Auto uses |x|^{1/(1-alpha)} alpha^{1/(1-alpha)} (1/alpha + 1/(1-2alpha)).
double supflp_section_integral(double alpha, double x, Evaluation mode = Evaluation::Auto);

/// Constants c1 <= c2 with c1 <= (bracket) (1/2 - alpha) <= c2 on (0, 1/2).
struct BracketConstants {
  double c1 = 0.125;
  double c2 = 0.5;
};

struct IdentityCheck {
  double alpha = 0.0;
  double x = 0.0;
  double closed_form = 0.0;
  double quadrature = 0.0;
  double rel_error = 0.0;
};

struct FractionalReport {
  bool admissible = false;     // every kernel pair is f = f0 = s_+^alpha, alpha in [0, 1/2)
  std::vector<std::string> evidence;
  Assessment sufficient;       // sum_v w_v int |x|^{1/(1-alpha)} rho_v(dx) / (1/2 - alpha)
  std::vector<Moment> necessary;  // int |x|^{1/(1-alpha)} rho_v(dx)
  std::vector<Moment> weighted;   // int |x|^{1/(1-alpha)} (1 v x^2)^{-1} rho_v(dx)
  std::vector<IdentityCheck> identities;
};

FractionalReport fractional_condition(const MixedModel& model);

enum class ExistenceStatus { Exists, FailsK, FailsB, Indeterminate };
const char* to_string(ExistenceStatus s);

struct ExistenceReport {
  ExistenceStatus status = ExistenceStatus::Indeterminate;
  Assessment k;  // sum_v w_v int K(phi(s, v), v) ds
  Assessment b;  // sum_v w_v int |B(phi(s, v), v)| ds
  std::vector<Assessment> k_parts;
  std::vector<Assessment> b_parts;
};

/// phi(s, v) = f(1 - s, v) - f0(-s, v) against the K and B functionals.
ExistenceReport existence_check(const MixedModel& model);

struct ComponentCriteria {
  bool kernel_ac = false;
  bool kernel_bv = false;
  Truth inf_var = Truth::Unknown;
  Assessment cf;          // sigma2 int |f'|^2
  Assessment fdot;        // int xi(f')
  Assessment weighted;    // int xi_weighted(f')
};

struct CriteriaReport {
  std::vector<ComponentCriteria> components;
  Assessment cf;
  Assessment df;
  RatioReport ratios;
  ExistenceReport existence;
};

CriteriaReport evaluate_criteria(const MixedModel& model);

enum class VerdictStatus { FiniteVariation, InfiniteVariation, Indeterminate };
const char* to_string(VerdictStatus s);

enum class TheoremTag {
  Sufficiency,        // C_f and D_f finite with absolutely continuous sections
  NecessityAC,        // infinite-variation noise forces absolutely continuous sections
  NecessityBase,      // ... and finite C_f and weighted integral, unconditionally
  NecessityUniform,   // ... and finite D_f under a bounded moment ratio
  NecessityRatio,     // ... and finite unweighted integral under the limsup ratio condition
  Existence,          // the integral defining the process does not exist
  None,
};
const char* to_string(TheoremTag t);

struct Verdict {
  VerdictStatus status = VerdictStatus::Indeterminate;
  TheoremTag theorem = TheoremTag::None;
  std::vector<std::string> justification;
  std::vector<std::string> caveats;
  std::vector<std::string> notes;
  CriteriaReport report;
};

Verdict verdict(const MixedModel& model);
Verdict verdict(const MixedModel& model, const CriteriaReport& report);

/// sqrt(2/pi) C_f^{1/2} + (5/4) max(D_f, D_f^{1/2}).
double corollary_bound(double cf, double df);

struct BoundResult {
  bool ok = false;
  double value = kInf;
  double cf = kInf;
  double df = kInf;
  std::string reason;  // why the bound was refused
};

/// Whether theta_v = -int (x - [[x]]) rho_v(dx) with a finite first tail moment.
bool is_mean_zero(const NoiseComponent& comp, std::string* why = nullptr);

/// The expected BV bound; refused unless the noise is centred and the
/// verdict is finite variation.
BoundResult expected_bv_bound(const MixedModel& model);

enum class GlobalLaw { ProbabilityZero, ZeroOneHolds };
enum class LocalLaw { HoldsBV, HoldsInfiniteActivity, NotCovered };
const char* to_string(GlobalLaw g);
const char* to_string(LocalLaw l);

struct ZeroOneReport {
  GlobalLaw global_law = GlobalLaw::ZeroOneHolds;
  LocalLaw local_law = LocalLaw::NotCovered;
  bool kernels_bv = false;
  bool infinite_activity = false;
  std::vector<std::string> notes;
};

ZeroOneReport zero_one_classify(const MixedModel& model);

}  // namespace simma
