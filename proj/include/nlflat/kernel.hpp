#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace nlflat {

/// J(z) = A |z|^{-1-2s}.
struct PureFractional {
  double amplitude = 1.0;
};

/// J(z) = A |z|^{-1-2s} for |z| <= cutoff, 0 beyond.
struct TruncatedFractional {
  double amplitude = 1.0;
  double cutoff = 1.0;
};

enum class NearProfile {
  bump,     // near_amplitude * exp(1 - 1/(1 - z^2)) on |z| < 1
  uniform,  // near_amplitude on |z| < 1
};

/// J(z) = P(z) + B (1 + z^2)^{-(1+2s)/2}: a compactly supported near-field
/// profile on (-1, 1) plus an integrable algebraic tail.
struct CompactPlusTail {
  NearProfile profile = NearProfile::bump;
  double near_amplitude = 1.0;
  double tail_amplitude = 1.0;
};

using KernelFamily = std::variant<PureFractional, TruncatedFractional, CompactPlusTail>;

/// User-declared constants of the kernel hypothesis:
///   J0 / |z|^{1+2s} >= J(z) for |z| > 1,
///   J(z) >= J0^{-1} / |z|^{1+2s} for |z| >= R0,
///   int_{|z|<=1} z^2 J(z) dz <= 2 J1.
struct HypothesisConstants {
  double J0 = 1.0;
  double J1 = 1.0;
  double R0 = 2.0;
};

/// Immutable description of a symmetric jump kernel with tail exponent s.
class KernelSpec {
 public:
  KernelSpec(KernelFamily family, double s, HypothesisConstants declared, std::string id = {});

  const KernelFamily& family() const { return family_; }
  double s() const { return s_; }
  const HypothesisConstants& declared() const { return declared_; }
  const std::string& id() const { return id_; }

  /// Fractional families have closed-form cell, tail and moment integrals.
  bool has_closed_form() const;

  /// Positive radii where J is not smooth; quadrature splits there.
  std::vector<double> breakpoints() const;

  std::string family_name() const;

 private:
  KernelFamily family_;
  double s_;
  HypothesisConstants declared_;
  std::string id_;
};

/// A/pi |z|^{-2}: the kernel of -(-Laplacian)^{1/2}, whose heat kernel is the Cauchy density.
KernelSpec cauchy_kernel();

double eval_kernel(const KernelSpec& spec, double z);

/// int_r^inf J(z) dz for r > 0 (one side only).
double one_sided_tail(const KernelSpec& spec, double r);

/// int_{|z| >= R} J(z) dz, R >= 1.
double tail_mass(const KernelSpec& spec, double R);

/// Same quantity as tail_mass, always through quadrature of the density.
double tail_mass_by_quadrature(const KernelSpec& spec, double R);

/// int_lo^hi J(z) dz for 0 < lo < hi.
double cell_integral(const KernelSpec& spec, double lo, double hi);

/// int_{|z| <= r} z^2 J(z) dz. Throws HypothesisViolation when it diverges.
double near_moment(const KernelSpec& spec, double r);

/// int_{|z| <= 1} z^2 J(z) dz.
double near_second_moment(const KernelSpec& spec);

struct HypothesisCertificate {
  std::string spec_id;
  bool verified = false;
  double upper_margin = 0.0;  // min over sampled |z| > 1 of J0/|z|^{1+2s} - J(z)
  double lower_margin = 0.0;  // min over sampled |z| >= R0 of J(z) - J0^{-1}/|z|^{1+2s}
  double near_moment = 0.0;
  std::size_t sample_count = 0;
};

inline constexpr std::size_t kMinHypothesisSamples = 100;
inline constexpr double kSamplesPerDecade = 100.0;

/// Dense log-uniform sampling of the pointwise bounds on (1, 100 R0] together
/// with the near-field moment. A failing kernel yields verified == false.
HypothesisCertificate validate_hypothesis(const KernelSpec& spec, std::size_t sample_count);

}  // namespace nlflat
