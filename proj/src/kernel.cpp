#include "nlflat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nlflat/errors.hpp"
#include "nlflat/quadrature.hpp"

namespace nlflat {

namespace {

constexpr double kQuadRelTol = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double near_profile_value(const CompactPlusTail& k, double az) {
  if (az >= 1.0) return 0.0;
  switch (k.profile) {
    case NearProfile::bump:
      return k.near_amplitude * std::exp(1.0 - 1.0 / (1.0 - az * az));
    case NearProfile::uniform:
      return k.near_amplitude;
  }
  return 0.0;
}

double smooth_tail_value(const CompactPlusTail& k, double az, double s) {
  return k.tail_amplitude * std::pow(1.0 + az * az, -0.5 - s);
}

// lo^{-2s} - hi^{-2s} without cancellation for adjacent radii.
double power_difference(double lo, double hi, double s) {
  return -std::pow(lo, -2.0 * s) * std::expm1(-2.0 * s * std::log1p((hi - lo) / lo));
}

// Quadrature of J over [lo, hi] (0 < lo < hi), split at the family's breakpoints.
double density_integral(const KernelSpec& spec, double lo, double hi) {
  std::vector<double> cuts{lo};
  for (double bp : spec.breakpoints())
    if (bp > lo && bp < hi) cuts.push_back(bp);
  cuts.push_back(hi);
  auto f = [&](double z) { return eval_kernel(spec, z); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += quad::integrate(f, cuts[i], cuts[i + 1], kQuadRelTol).value;
  return total;
}

double density_tail(const KernelSpec& spec, double r) {
  auto f = [&](double z) { return eval_kernel(spec, z); };
  // Finite part up to the last breakpoint, then the algebraic tail.
  double start = r;
  double total = 0.0;
  for (double bp : spec.breakpoints()) {
    if (bp > start) {
      total += density_integral(spec, start, bp);
      start = bp;
    }
  }
  total += quad::integrate_tail(f, start, kQuadRelTol).value;
  return total;
}

}  // namespace

KernelSpec::KernelSpec(KernelFamily family, double s, HypothesisConstants declared, std::string id)
    : family_(std::move(family)), s_(s), declared_(declared), id_(std::move(id)) {
  if (!(s_ > 0.0) || !std::isfinite(s_)) throw std::invalid_argument("kernel: s must be positive");
  if (!(declared_.J0 > 0.0)) throw std::invalid_argument("kernel: J0 must be positive");
  if (!(declared_.J1 > 0.0)) throw std::invalid_argument("kernel: J1 must be positive");
  if (!(declared_.R0 > 1.0)) throw std::invalid_argument("kernel: R0 must exceed 1");
  std::visit(overloaded{
                 [](const PureFractional& k) {
                   if (!(k.amplitude >= 0.0)) throw std::invalid_argument("kernel: amplitude must be >= 0");
                 },
                 [](const TruncatedFractional& k) {
                   if (!(k.amplitude >= 0.0)) throw std::invalid_argument("kernel: amplitude must be >= 0");
                   if (!(k.cutoff > 0.0)) throw std::invalid_argument("kernel: cutoff must be positive");
                 },
                 [](const CompactPlusTail& k) {
                   if (!(k.near_amplitude >= 0.0) || !(k.tail_amplitude >= 0.0))
                     throw std::invalid_argument("kernel: amplitudes must be >= 0");
                 },
             },
             family_);
  if (id_.empty()) {
    std::ostringstream os;
    os << family_name() << "(s=" << s_ << ")";
    id_ = os.str();
  }
}

bool KernelSpec::has_closed_form() const { return !std::holds_alternative<CompactPlusTail>(family_); }

std::vector<double> KernelSpec::breakpoints() const {
  return std::visit(overloaded{
                        [](const PureFractional&) { return std::vector<double>{}; },
                        [](const TruncatedFractional& k) { return std::vector<double>{k.cutoff}; },
                        [](const CompactPlusTail&) { return std::vector<double>{1.0}; },
                    },
                    family_);
}

std::string KernelSpec::family_name() const {
  return std::visit(overloaded{
                        [](const PureFractional&) { return std::string("pure_fractional"); },
                        [](const TruncatedFractional&) { return std::string("truncated_fractional"); },
                        [](const CompactPlusTail&) { return std::string("compact_plus_tail"); },
                    },
                    family_);
}

KernelSpec cauchy_kernel() {
  return KernelSpec(PureFractional{1.0 / std::numbers::pi}, 0.5,
                    HypothesisConstants{std::numbers::pi, 1.0, 2.0}, "cauchy");
}

double eval_kernel(const KernelSpec& spec, double z) {
  if (z == 0.0) throw DomainError("eval_kernel: J is singular at z = 0");
  const double az = std::abs(z);
  const double s = spec.s();
  return std::visit(overloaded{
                        [&](const PureFractional& k) { return k.amplitude * std::pow(az, -1.0 - 2.0 * s); },
                        [&](const TruncatedFractional& k) {
                          return az <= k.cutoff ? k.amplitude * std::pow(az, -1.0 - 2.0 * s) : 0.0;
                        },
                        [&](const CompactPlusTail& k) {
                          return near_profile_value(k, az) + smooth_tail_value(k, az, s);
                        },
                    },
                    spec.family());
}

double one_sided_tail(const KernelSpec& spec, double r) {
  if (!(r > 0.0)) throw DomainError("one_sided_tail: radius must be positive");
  if (std::isinf(r)) return 0.0;
  const double s = spec.s();
  return std::visit(overloaded{
                        [&](const PureFractional& k) { return k.amplitude * std::pow(r, -2.0 * s) / (2.0 * s); },
                        [&](const TruncatedFractional& k) {
                          if (r >= k.cutoff) return 0.0;
                          return k.amplitude * power_difference(r, k.cutoff, s) / (2.0 * s);
                        },
                        [&](const CompactPlusTail&) { return density_tail(spec, r); },
                    },
                    spec.family());
}

double tail_mass(const KernelSpec& spec, double R) {
  if (!(R >= 1.0)) throw std::invalid_argument("tail_mass: R must be >= 1");
  return 2.0 * one_sided_tail(spec, R);
}

double tail_mass_by_quadrature(const KernelSpec& spec, double R) {
  if (!(R >= 1.0)) throw std::invalid_argument("tail_mass: R must be >= 1");
  return 2.0 * density_tail(spec, R);
}

double cell_integral(const KernelSpec& spec, double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("cell_integral: need 0 < lo < hi");
  const double s = spec.s();
  return std::visit(overloaded{
                        [&](const PureFractional& k) { return k.amplitude * power_difference(lo, hi, s) / (2.0 * s); },
                        [&](const TruncatedFractional& k) {
                          if (lo >= k.cutoff) return 0.0;
                          return k.amplitude * power_difference(lo, std::min(hi, k.cutoff), s) / (2.0 * s);
                        },
                        [&](const CompactPlusTail&) { return density_integral(spec, lo, hi); },
                    },
                    spec.family());
}

double near_moment(const KernelSpec& spec, double r) {
  if (!(r > 0.0)) throw DomainError("near_moment: radius must be positive");
  const double s = spec.s();
  auto fractional = [&](double amplitude, double radius) {
    if (s >= 1.0) {
      std::ostringstream os;
      os << "near-field moment of " << spec.id() << " diverges (|z|^{1-2s} not integrable at 0 for s=" << s << ")";
      throw HypothesisViolation(os.str());
    }
    return 2.0 * amplitude * std::pow(radius, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
  };
  return std::visit(overloaded{
                        [&](const PureFractional& k) { return fractional(k.amplitude, r); },
                        [&](const TruncatedFractional& k) { return fractional(k.amplitude, std::min(r, k.cutoff)); },
                        [&](const CompactPlusTail&) {
                          auto f = [&](double z) { return z == 0.0 ? 0.0 : z * z * eval_kernel(spec, z); };
                          const double split = std::min(r, 1.0);
                          double total = quad::integrate(f, 0.0, split, kQuadRelTol).value;
                          if (r > 1.0) total += quad::integrate(f, 1.0, r, kQuadRelTol).value;
                          return 2.0 * total;
                        },
                    },
                    spec.family());
}

double near_second_moment(const KernelSpec& spec) { return near_moment(spec, 1.0); }

HypothesisCertificate validate_hypothesis(const KernelSpec& spec, std::size_t sample_count) {
  if (sample_count < kMinHypothesisSamples)
    throw std::invalid_argument("validate_hypothesis: sample_count must be >= 100");
  const auto& c = spec.declared();
  const double s = spec.s();
  const double z_max = 100.0 * c.R0;
  const double decades = std::log10(z_max);
  const auto n = std::max<std::size_t>(sample_count, static_cast<std::size_t>(std::ceil(kSamplesPerDecade * decades)));

  HypothesisCertificate cert;
  cert.spec_id = spec.id();
  cert.sample_count = n;
  cert.upper_margin = std::numeric_limits<double>::infinity();
  cert.lower_margin = std::numeric_limits<double>::infinity();

  const double inv_j0 = 1.0 / c.J0;
  auto visit_point = [&](double z) {
    const double decay = std::pow(z, -1.0 - 2.0 * s);
    const double j = eval_kernel(spec, z);
    // Symmetry is part of the hypothesis; the families are symmetric by
    // construction but the evaluation path must agree too.
    if (eval_kernel(spec, -z) != j) cert.upper_margin = -std::numeric_limits<double>::infinity();
    cert.upper_margin = std::min(cert.upper_margin, c.J0 * decay - j);
    if (z >= c.R0) cert.lower_margin = std::min(cert.lower_margin, j - inv_j0 * decay);
  };
  const double log_max = std::log(z_max);
  for (std::size_t i = 1; i <= n; ++i) visit_point(std::exp(log_max * static_cast<double>(i) / static_cast<double>(n)));
  visit_point(c.R0);
  for (double bp : spec.breakpoints()) {
    if (bp > 1.0) {
      visit_point(bp);
      visit_point(std::nextafter(bp, std::numeric_limits<double>::infinity()));
    }
  }

  try {
    cert.near_moment = near_second_moment(spec);
  } catch (const HypothesisViolation&) {
    cert.near_moment = std::numeric_limits<double>::infinity();
  }
  cert.verified = cert.upper_margin >= 0.0 && cert.lower_margin >= 0.0 && cert.near_moment <= 2.0 * c.J1;
  return cert;
}

}  // namespace nlflat
