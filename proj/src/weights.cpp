#include "bpm/weights.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "bpm/errors.hpp"

namespace bpm::weights {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

FaceWeights FaceWeights::explicit_q(std::map<long, Rational> q) {
  FaceWeights fw;
  fw.family = Family::Explicit;
  fw.table = std::move(q);
  return fw;
}

FaceWeights FaceWeights::finite_w(std::map<long, Rational> w) {
  FaceWeights fw;
  fw.family = Family::FiniteSupport;
  fw.table = std::move(w);
  return fw;
}

FaceWeights FaceWeights::power_law(double c, double beta) {
  FaceWeights fw;
  fw.family = Family::PowerLaw;
  fw.c = c;
  fw.beta = beta;
  return fw;
}

FaceWeights FaceWeights::geometric(double a, double b) {
  if (b <= 0) throw ConfigError("geometric family needs b > 0");
  FaceWeights fw;
  fw.family = Family::Geometric;
  fw.a = a;
  fw.b = b;
  return fw;
}

FaceWeights FaceWeights::degenerate_zero_radius() {
  FaceWeights fw;
  fw.family = Family::Explicit;
  fw.zero_radius = true;
  return fw;
}

void FaceWeights::validate(bool require_nondegenerate) const {
  for (const auto& [i, v] : table) {
    if (i < 1) throw ConfigError("weight index must be >= 1");
    if (v < 0) throw ConfigError("weights must be non-negative");
  }
  if (family == Family::PowerLaw && (c < 0 || !(beta == beta))) {
    throw ConfigError("power law needs c >= 0 and finite beta");
  }
  if (family == Family::Geometric && (a < 0 || b <= 0)) {
    throw ConfigError("geometric needs a >= 0, b > 0");
  }
  if (require_nondegenerate && !zero_radius) {
    bool ok = false;
    switch (family) {
      case Family::PowerLaw:
        ok = c > 0;
        break;
      case Family::Geometric:
        ok = a > 0;
        break;
      default:
        for (const auto& [i, v] : table) ok = ok || (i >= 2 && v > 0);
        break;
    }
    if (!ok) throw ConfigError("need some q_i > 0 with i >= 2");
  }
}

double FaceWeights::declared_radius() const {
  if (zero_radius) return 0.0;
  switch (family) {
    case Family::PowerLaw:
      return 1.0;
    case Family::Geometric:
      return 1.0 / b;
    default:
      return kInf;
  }
}

FaceWeights FaceWeights::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("weights: bad JSON: ") + e.what());
  }
  const std::string fam = j.value("family", "");
  auto parse_table = [&](const char* key) {
    std::map<long, Rational> out;
    if (!j.contains(key)) throw ConfigError(std::string("weights: missing /") + key);
    for (const auto& [k, v] : j.at(key).items()) {
      out[std::stol(k)] = Rational(v.get<double>());
    }
    return out;
  };
  FaceWeights fw;
  if (fam == "explicit") {
    fw = explicit_q(parse_table("q"));
  } else if (fam == "finite_support") {
    fw = finite_w(parse_table("w"));
  } else if (fam == "power_law") {
    if (!j.contains("c") || !j.contains("beta")) throw ConfigError("power_law: need c, beta");
    fw = power_law(j.at("c").get<double>(), j.at("beta").get<double>());
  } else if (fam == "geometric") {
    if (!j.contains("a") || !j.contains("b")) throw ConfigError("geometric: need a, b");
    fw = geometric(j.at("a").get<double>(), j.at("b").get<double>());
  } else {
    throw ConfigError("weights: unknown family '" + fam + "'");
  }
  if (j.value("radius", -1.0) == 0.0) {
    if (fam != "explicit") throw ConfigError("radius 0 only supported for explicit weights");
    fw.zero_radius = true;
  } else if (j.contains("radius")) {
    throw ConfigError("custom radius declarations are not supported (only 0)");
  }
  fw.validate(false);
  return fw;
}

std::string FaceWeights::to_json() const {
  nlohmann::json j;
  switch (family) {
    case Family::Explicit: {
      j["family"] = "explicit";
      nlohmann::json q;
      for (const auto& [i, v] : table) q[std::to_string(i)] = to_double(v);
      j["q"] = q;
      if (zero_radius) j["radius"] = 0.0;
      break;
    }
    case Family::FiniteSupport: {
      j["family"] = "finite_support";
      nlohmann::json w;
      for (const auto& [i, v] : table) w[std::to_string(i)] = to_double(v);
      j["w"] = w;
      break;
    }
    case Family::PowerLaw:
      j["family"] = "power_law";
      j["c"] = c;
      j["beta"] = beta;
      break;
    case Family::Geometric:
      j["family"] = "geometric";
      j["a"] = a;
      j["b"] = b;
      break;
  }
  return j.dump();
}

// ---------------------------------------------------------------------------

TreeWeights::TreeWeights(FaceWeights fw) : fw_(std::move(fw)) {
  fw_.validate(false);
  switch (fw_.family) {
    case Family::PowerLaw:
      exact_family_ = (fw_.beta == std::floor(fw_.beta));
      break;
    default:
      exact_family_ = true;
      break;
  }
}

double TreeWeights::value(long i) const {
  if (i == 0) return 1.0;
  if (i < 0) return 0.0;
  switch (fw_.family) {
    case Family::FiniteSupport: {
      auto it = fw_.table.find(i);
      return it == fw_.table.end() ? 0.0 : to_double(it->second);
    }
    case Family::Explicit: {
      auto it = fw_.table.find(i);
      if (it == fw_.table.end()) return 0.0;
      return to_double(Rational(binomial(2 * i - 1, i - 1)) * it->second);
    }
    case Family::PowerLaw:
      return fw_.c * std::pow(static_cast<double>(i), -fw_.beta);
    case Family::Geometric:
      return fw_.a * std::pow(fw_.b, static_cast<double>(i));
  }
  return 0.0;
}

std::optional<Rational> TreeWeights::exact(long i) const {
  if (i < 0) return Rational(0);
  if (i == 0) return Rational(1);
  if (i > kExactIndexCap) throw CapacityError("tree weight index beyond exact cap");
  switch (fw_.family) {
    case Family::FiniteSupport: {
      auto it = fw_.table.find(i);
      return it == fw_.table.end() ? Rational(0) : it->second;
    }
    case Family::Explicit: {
      auto it = fw_.table.find(i);
      if (it == fw_.table.end()) return Rational(0);
      return Rational(binomial(2 * i - 1, i - 1)) * it->second;
    }
    case Family::Geometric:
      return Rational(fw_.a) * rational_pow(Rational(fw_.b), i);
    case Family::PowerLaw: {
      if (!exact_family_) return std::nullopt;
      const long e = static_cast<long>(fw_.beta);
      return Rational(fw_.c) / rational_pow(Rational(i), e);
    }
  }
  return std::nullopt;
}

Rational TreeWeights::exact_or_throw(long i) const {
  auto v = exact(i);
  if (!v) throw NumericError("tree weights not exactly representable for this family");
  return *v;
}

std::optional<long> TreeWeights::max_support() const {
  switch (fw_.family) {
    case Family::FiniteSupport:
    case Family::Explicit: {
      long m = 0;
      for (const auto& [i, v] : fw_.table) {
        if (v > 0) m = std::max(m, i);
      }
      return m;
    }
    case Family::PowerLaw:
      return fw_.c > 0 ? std::nullopt : std::optional<long>(0);
    case Family::Geometric:
      return fw_.a > 0 ? std::nullopt : std::optional<long>(0);
  }
  return 0;
}

double TreeWeights::q_value(long i) const {
  if (i < 1) return 0.0;
  switch (fw_.family) {
    case Family::Explicit: {
      auto it = fw_.table.find(i);
      return it == fw_.table.end() ? 0.0 : to_double(it->second);
    }
    default: {
      const double w = value(i);
      if (w == 0.0) return 0.0;
      // q_i = w_i / C(2i-1, i-1); compute in logs beyond the exact cap.
      if (i <= 60) return w / binomial(2 * i - 1, i - 1).get_d();
      const double logbin = std::lgamma(2.0 * i) - std::lgamma(static_cast<double>(i) + 1) -
                            std::lgamma(static_cast<double>(i)) - std::log(2.0 * i - 1) +
                            std::log(static_cast<double>(i));
      return std::exp(std::log(w) - logbin);
    }
  }
}

// ---------------------------------------------------------------------------
// Generating function evaluation with certified tails.

double eval_g(const TreeWeights& tw, double t) {
  const auto& fw = tw.face();
  if (fw.zero_radius) return 1.0;
  switch (fw.family) {
    case Family::FiniteSupport:
    case Family::Explicit: {
      double acc = 1.0;
      for (const auto& [i, v] : fw.table) acc += tw.value(i) * std::pow(t, i);
      return acc;
    }
    case Family::Geometric: {
      const double bt = fw.b * t;
      if (bt >= 1.0) return kInf;
      return 1.0 + fw.a * bt / (1.0 - bt);
    }
    case Family::PowerLaw: {
      if (t > 1.0) return kInf;
      if (t == 1.0) {
        if (fw.beta <= 1.0) return kInf;
        return 1.0 + fw.c * std::riemann_zeta(fw.beta);
      }
      double acc = 1.0;
      for (long i = 1;; ++i) {
        acc += tw.value(i) * std::pow(t, i);
        const double tail = fw.c * std::pow(t, i + 1) / (1.0 - t);
        if (tail <= 1e-17 * acc) break;
        if (i > 200'000'000) throw NumericError("series for g did not certify");
      }
      return acc;
    }
  }
  return 1.0;
}

double eval_g_prime(const TreeWeights& tw, double t) {
  const auto& fw = tw.face();
  if (fw.zero_radius) return 0.0;
  switch (fw.family) {
    case Family::FiniteSupport:
    case Family::Explicit: {
      double acc = 0.0;
      for (const auto& [i, v] : fw.table) acc += i * tw.value(i) * std::pow(t, i - 1);
      return acc;
    }
    case Family::Geometric: {
      const double bt = fw.b * t;
      if (bt >= 1.0) return kInf;
      return fw.a * fw.b / ((1.0 - bt) * (1.0 - bt));
    }
    case Family::PowerLaw: {
      if (t > 1.0) return kInf;
      if (t == 1.0) {
        if (fw.beta <= 2.0) return kInf;
        return fw.c * std::riemann_zeta(fw.beta - 1.0);
      }
      double acc = 0.0;
      for (long i = 1;; ++i) {
        acc += i * tw.value(i) * std::pow(t, i - 1);
        // sum_{j>i} j t^(j-1) = d/dt t^(i+1)/(1-t) bound
        const double tail =
            fw.c * std::pow(t, i) * ((i + 1) * (1.0 - t) + t) / ((1.0 - t) * (1.0 - t));
        if (tail <= 1e-17 * (acc + 1.0)) break;
        if (i > 200'000'000) throw NumericError("series for g' did not certify");
      }
      return acc;
    }
  }
  return 0.0;
}

namespace {

double ratio(const TreeWeights& tw, double t) {
  const double g = eval_g(tw, t);
  const double gp = eval_g_prime(tw, t);
  if (std::isinf(g) || std::isinf(gp)) return kInf;
  return t * gp / g;
}

double bisect_tau(const TreeWeights& tw, double lo, double hi, double tol) {
  // ratio is continuous and increasing; ratio(lo) < 1 <= ratio(hi).
  for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (ratio(tw, mid) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

GenFnAnalysis analyze(const TreeWeights& tw) {
  const auto& fw = tw.face();
  fw.validate(false);
  GenFnAnalysis a;
  a.radius = fw.declared_radius();
  if (fw.zero_radius) {
    a.gamma = 0.0;
    a.tau = 0.0;
    a.g_of_tau = 1.0;
    a.g_prime_of_tau = 0.0;
    return a;
  }
  const auto support = tw.max_support();
  if (support && *support == 0) {
    // No internal weight at all: g == 1.
    a.gamma = 0.0;
    a.tau = 0.0;
    a.g_of_tau = 1.0;
    a.g_prime_of_tau = 0.0;
    return a;
  }
  if (support && *support == 1) {
    throw ConfigError("need some q_i > 0 with i >= 2");
  }

  switch (fw.family) {
    case Family::FiniteSupport:
    case Family::Explicit: {
      a.gamma = static_cast<double>(*support);  // limit of the ratio at infinity
      double hi = 1.0;
      while (ratio(tw, hi) < 1.0) {
        hi *= 2.0;
        if (hi > 1e300) throw NumericError("tau bracket failed");
      }
      double lo = hi / 2.0;
      while (ratio(tw, lo) >= 1.0) lo /= 2.0;
      a.tau = bisect_tau(tw, lo, hi, a.solver_tolerance);
      break;
    }
    case Family::Geometric: {
      a.gamma = kInf;
      double hi = a.radius;
      double lo = 0.0;
      while (std::isinf(ratio(tw, hi)) || ratio(tw, hi) < 1.0) {
        // step just inside the radius
        hi = a.radius * (1.0 - 1e-9);
        if (ratio(tw, hi) < 1.0) throw NumericError("tau bracket failed near radius");
        break;
      }
      a.tau = bisect_tau(tw, lo, hi, a.solver_tolerance);
      break;
    }
    case Family::PowerLaw: {
      if (fw.beta > 2.0) {
        const double g1 = 1.0 + fw.c * std::riemann_zeta(fw.beta);
        const double gp1 = fw.c * std::riemann_zeta(fw.beta - 1.0);
        a.gamma = gp1 / g1;
      } else {
        a.gamma = kInf;
      }
      if (a.gamma < 1.0) {
        a.tau = a.radius;  // condensation: tau = R
      } else {
        a.tau = bisect_tau(tw, 0.0, 1.0, a.solver_tolerance);
      }
      break;
    }
  }
  a.g_of_tau = eval_g(tw, a.tau);
  a.g_prime_of_tau = eval_g_prime(tw, a.tau);
  return a;
}

// ---------------------------------------------------------------------------

OffspringLaws::OffspringLaws(const TreeWeights& tw, const GenFnAnalysis& a)
    : tw_(tw), analysis_(a) {
  kappa_ = std::min(a.gamma, 1.0);
  const double p0 = pi(0);
  kappa_tilde_ = (p0 >= 1.0) ? 0.0 : (kappa_ + p0 - 1.0) / p0;
  if (p0 >= 1.0) kappa_tilde_ = 0.0;
}

double OffspringLaws::pi(long i) const {
  if (i < 0) return 0.0;
  if (analysis_.tau == 0.0) return i == 0 ? 1.0 : 0.0;
  return std::pow(analysis_.tau, static_cast<double>(i)) * tw_.value(i) / analysis_.g_of_tau;
}

double OffspringLaws::pi_partial_sum(long n) const {
  double acc = 0.0;
  for (long i = 0; i <= n; ++i) acc += pi(i);
  return acc;
}

double OffspringLaws::xi_white_pmf(long i) const {
  if (i < 0) return 0.0;
  const double p0 = pi0();
  return p0 * std::pow(1.0 - p0, static_cast<double>(i));
}

double OffspringLaws::xi_black_pmf(long i) const {
  const double p0 = pi0();
  if (p0 >= 1.0) throw PhaseError("xi_black undefined: pi_0 = 1 (UIPTree-degenerate regime)");
  if (i < 0) return 0.0;
  return pi(i + 1) / (1.0 - p0);
}

double OffspringLaws::xi_white_hat_pmf(long i) const {
  if (i < 1) return 0.0;
  const double p0 = pi0();
  return p0 * p0 * i * std::pow(1.0 - p0, static_cast<double>(i - 1));
}

double OffspringLaws::xi_black_hat_pmf(long i) const {
  const double p0 = pi0();
  if (p0 >= 1.0) throw PhaseError("xi_black_hat undefined: pi_0 = 1 (UIPTree-degenerate regime)");
  if (i < 1) return 0.0;
  return i * pi(i + 1) / p0;
}

double OffspringLaws::xi_black_hat_infinity() const {
  const double p0 = pi0();
  if (p0 >= 1.0) throw PhaseError("xi_black_hat undefined: pi_0 = 1 (UIPTree-degenerate regime)");
  return (1.0 - kappa_) / p0;
}

double OffspringLaws::xi_hat_pmf(long k) const {
  if (k < 1) return 0.0;
  return k * pi(k);
}

double OffspringLaws::xi_tilde_pmf(long k) const {
  if (k < 0 || kappa_ <= 0.0) return 0.0;
  return (k + 1) * pi(k + 1) / kappa_;
}

std::optional<double> OffspringLaws::moment(int r) const {
  const auto& fw = tw_.face();
  if (analysis_.tau == 0.0) return 0.0;
  const auto support = tw_.max_support();
  if (support) {
    double acc = 0.0;
    for (long i = 1; i <= *support; ++i) acc += std::pow(static_cast<double>(i), r) * pi(i);
    return acc;
  }
  if (fw.family == Family::PowerLaw && analysis_.tau == 1.0) {
    // Closed form through the zeta function; divergent when beta - r <= 1.
    if (fw.beta - r <= 1.0) return std::nullopt;
    return fw.c * std::riemann_zeta(fw.beta - r) / analysis_.g_of_tau;
  }
  // Strictly inside the radius: certified geometric tail.
  const double rho_base = (fw.family == Family::Geometric) ? fw.b * analysis_.tau
                                                           : analysis_.tau;
  if (rho_base >= 1.0) return std::nullopt;
  double acc = 0.0;
  for (long i = 1; i < 100'000'000; ++i) {
    const double term = std::pow(static_cast<double>(i), r) * pi(i);
    acc += term;
    const double rho = rho_base * std::pow((i + 1.0) / i, r);
    if (rho < 1.0 && term * rho / (1.0 - rho) <= 1e-16 * (acc + 1e-300)) return acc;
  }
  throw NumericError("moment series did not certify");
}

long OffspringLaws::walk_inversion(RngStream& rng,
                                   double (OffspringLaws::*pmf)(long) const,
                                   double total) const {
  double u = rng.uniform01() * total;
  long last_pos = 0;
  for (long i = 0; i <= kSampleIndexCap; ++i) {
    const double p = (this->*pmf)(i);
    u -= p;
    if (u < 0) return i;
    if (p > 0) {
      last_pos = i;
    } else if (i - last_pos > 4096) {
      return last_pos;  // float slack at the top of a finite-support cdf
    }
  }
  throw CapacityError("pmf inversion walked past the index cap");
}

long OffspringLaws::sample_xi(RngStream& rng) const {
  if (analysis_.tau == 0.0) return 0;
  return walk_inversion(rng, &OffspringLaws::pi, 1.0);
}

long OffspringLaws::sample_xi_white(RngStream& rng) const {
  const double p0 = pi0();
  if (p0 >= 1.0) return 0;
  return rng.geometric_from_one(p0) - 1;
}

long OffspringLaws::sample_xi_black(RngStream& rng) const {
  const double p0 = pi0();
  if (p0 >= 1.0) throw PhaseError("xi_black undefined: pi_0 = 1 (UIPTree-degenerate regime)");
  return walk_inversion(rng, &OffspringLaws::xi_black_pmf, 1.0);
}

long OffspringLaws::sample_xi_white_hat(RngStream& rng) const {
  const double p0 = pi0();
  if (p0 >= 1.0) return 1;
  return rng.geometric_from_one(p0) + rng.geometric_from_one(p0) - 1;
}

std::optional<long> OffspringLaws::sample_xi_black_hat(RngStream& rng) const {
  const double p0 = pi0();
  if (p0 >= 1.0) throw PhaseError("xi_black_hat undefined: pi_0 = 1 (UIPTree-degenerate regime)");
  double u = rng.uniform01();
  if (u < xi_black_hat_infinity()) return std::nullopt;
  u -= xi_black_hat_infinity();
  for (long k = 1; k <= kSampleIndexCap; ++k) {
    u -= xi_black_hat_pmf(k);
    if (u < 0) return k;
  }
  // Numerical slack at the top of the cdf: fall back to the finite mean.
  return 1;
}

std::optional<long> OffspringLaws::sample_xi_hat(RngStream& rng) const {
  const double u = rng.uniform01();
  if (u >= kappa_) return std::nullopt;
  double acc = u;
  for (long k = 1; k <= kSampleIndexCap; ++k) {
    acc -= xi_hat_pmf(k);
    if (acc < 0) return k;
  }
  throw CapacityError("xi_hat inversion walked past the index cap");
}

long OffspringLaws::sample_xi_tilde(RngStream& rng) const {
  if (kappa_ <= 0.0) throw PhaseError("xi_tilde undefined when kappa = 0");
  return walk_inversion(rng, &OffspringLaws::xi_tilde_pmf, 1.0);
}

WeightPackage make_package(const FaceWeights& fw) {
  TreeWeights tw(fw);
  GenFnAnalysis a = analyze(tw);
  OffspringLaws laws(tw, a);
  return WeightPackage{std::move(tw), a, std::move(laws)};
}

}  // namespace bpm::weights
