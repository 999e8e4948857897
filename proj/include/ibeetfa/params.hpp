#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ibeetfa {

// Public scheme parameters. Presets are sized for desk-scale verification and
// provide no cryptographic security.
struct ParamSet {
  uint64_t lambda = 0;   // tag length in bits
  uint64_t n = 0;        // lattice dimension
  uint64_t m = 0;        // lattice width
  uint64_t q = 0;        // modulus
  uint64_t t = 0;        // message length in bits
  uint64_t ell = 0;      // identity length
  double sigma = 0.0;    // Gaussian parameter
  double alpha = 0.0;    // noise rate
  uint64_t q_bound = 0;  // maximum number of identity queries

  friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

enum class Constraint {
  kWellFormed,        // field ranges, q an odd prime
  kTrapGenWidth,      // m > 6 n ceil(log2 q)
  kSigmaLarge,        // sigma above both sampling thresholds
  kRegevReduction,    // q > 2 sqrt(n) / alpha
  kQueryBound,        // q > 2 Q
  kDecryptionMargin,  // q >= K sigma m^{3/2} and alpha < 1 / (sigma ell m slack(m))
};

const char* constraint_name(Constraint c);

struct Violation {
  Constraint constraint;
  std::string detail;
};

// Bound C in s_{R_ID} <= C ell sqrt(m) for a sum of ell random sign matrices.
inline constexpr double kSignMatrixNormConstant = 2.0;
// K in q >= K sigma m^{3/2}. Calibrated so that the measured decryption error
// of the presets stays well inside q/5.
inline constexpr double kDecryptionMarginK = 32.0;

std::vector<Violation> validate_params(const ParamSet& p);

ParamSet preset(std::string_view name);
std::vector<std::string> preset_names();

std::string describe(const ParamSet& p);

}  // namespace ibeetfa
