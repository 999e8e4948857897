#include "ibeetfa/params.hpp"

#include <cmath>
#include <sstream>

#include "ibeetfa/error.hpp"
#include "ibeetfa/samplers.hpp"
#include "ibeetfa/trapdoor.hpp"
#include "ibeetfa/zq.hpp"

namespace ibeetfa {

const char* constraint_name(Constraint c) {
  switch (c) {
    case Constraint::kWellFormed: return "well-formed";
    case Constraint::kTrapGenWidth: return "trapgen-width";
    case Constraint::kSigmaLarge: return "sigma-large";
    case Constraint::kRegevReduction: return "regev-reduction";
    case Constraint::kQueryBound: return "query-bound";
    case Constraint::kDecryptionMargin: return "decryption-margin";
  }
  return "unknown";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::vector<Violation> validate_params(const ParamSet& p) {
  std::vector<Violation> out;
  auto fail = [&](Constraint c, std::string detail) { out.push_back({c, std::move(detail)}); };

  if (p.n == 0 || p.m == 0 || p.t == 0 || p.ell == 0 || p.lambda == 0) {
    fail(Constraint::kWellFormed, "n, m, t, ell and lambda must all be positive");
  }
  if (!(p.q >= 3 && (p.q & 1) && p.q < (1ULL << 62) && is_prime(p.q))) {
    fail(Constraint::kWellFormed, "q = " + std::to_string(p.q) + " is not an odd prime below 2^62");
  }
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) fail(Constraint::kWellFormed, "sigma must be positive");
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) fail(Constraint::kWellFormed, "alpha must lie in (0, 1)");
  if (!out.empty()) return out;

  const Modulus q(p.q);
  const double qd = static_cast<double>(p.q);
  const double m = static_cast<double>(p.m);
  const double ell = static_cast<double>(p.ell);
  const uint64_t width = 6 * p.n * q.bits();

  if (!(p.m > width)) {
    fail(Constraint::kTrapGenWidth,
         "m = " + std::to_string(p.m) + " must exceed 6 n ceil(log2 q) = " + std::to_string(width));
  }

  if (p.m > p.n * q.bits()) {
    const double gs = bound_gs(p.n, q, p.m);
    const double left = gs * slack(2 * p.m);
    const double right = gs * kSignMatrixNormConstant * ell * std::sqrt(m) * slack(p.m);
    const double need = std::max(left, right);
    if (!(p.sigma > need)) {
      fail(Constraint::kSigmaLarge, "sigma = " + fmt(p.sigma) + " must exceed " + fmt(need));
    }
  }

  const double regev = 2.0 * std::sqrt(static_cast<double>(p.n)) / p.alpha;
  if (!(qd > regev)) {
    fail(Constraint::kRegevReduction, "q = " + std::to_string(p.q) + " must exceed 2 sqrt(n) / alpha = " + fmt(regev));
  }

  if (!(static_cast<long double>(p.q) > 2.0L * static_cast<long double>(p.q_bound))) {
    fail(Constraint::kQueryBound, "q must exceed 2 Q = " + std::to_string(2 * p.q_bound));
  }

  const double q_need = kDecryptionMarginK * p.sigma * std::pow(m, 1.5);
  if (!(qd >= q_need)) {
    fail(Constraint::kDecryptionMargin, "q = " + std::to_string(p.q) + " must be at least K sigma m^1.5 = " + fmt(q_need));
  }
  const double alpha_max = 1.0 / (p.sigma * ell * m * slack(p.m));
  if (!(p.alpha < alpha_max)) {
    fail(Constraint::kDecryptionMargin, "alpha = " + fmt(p.alpha) + " must be below " + fmt(alpha_max));
  }
  return out;
}

ParamSet preset(std::string_view name) {
  if (name == "toy") {
    return ParamSet{.lambda = 128, .n = 2, .m = 421, .q = 18593824439ULL, .t = 64, .ell = 8,
                    .sigma = 67266.0, .alpha = 1.9e-10, .q_bound = 1ULL << 20};
  }
  if (name == "small") {
    return ParamSet{.lambda = 128, .n = 4, .m = 913, .q = 158711056817ULL, .t = 64, .ell = 8,
                    .sigma = 179784.0, .alpha = 3.15e-11, .q_bound = 1ULL << 20};
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"toy", "small"}; }

std::string describe(const ParamSet& p) {
  std::ostringstream os;
  os.precision(10);
  os << "lambda=" << p.lambda << " n=" << p.n << " m=" << p.m << " q=" << p.q << " t=" << p.t
     << " ell=" << p.ell << " sigma=" << p.sigma << " alpha=" << p.alpha << " Q=" << p.q_bound;
  return os.str();
}

}  // namespace ibeetfa
