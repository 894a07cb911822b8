#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracdim/covering.hpp"
#include "fracdim/dimension.hpp"
#include "fracdim/qc.hpp"

namespace fracdim {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += !c.passed;
    return n;
  }
};

inline const double kSnowflakeDim = std::log(4.0) / std::log(3.0);

// ---------------------------------------------------------------------------

inline SuiteReport verify_formulas() {
  SuiteReport rep{"formulas", {}};
  const std::vector<double> ps = {0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 9.0};
  std::vector<double> thetas;
  for (int i = 1; i <= 10; ++i) thetas.push_back((i - 0.5) / 10.0);
  constexpr double eps = 1e-12;

  for (int d : {2, 3}) {
    std::size_t chain_bad = 0, dom_bad = 0, strict_bad = 0, cont_bad = 0, reg_bad = 0;
    for (double p : ps) {
      const double box = formula_box_dim(p, d);
      for (double t : thetas) {
        const double a = formula_assouad_spectrum(p, d, t);
        if (!(box <= a + eps && a <= d + eps)) ++chain_bad;
        const double ub = formula_spectrum_upper_bound(box, d, t);
        if (!(a <= ub + eps)) ++dom_bad;
        if (p * (d - 1) > 1.0 && t < p / (p + 1.0) && !(a < ub - eps)) ++strict_bad;
      }
      const double tc = p / (p + 1.0);
      const double at = formula_assouad_spectrum(p, d, tc);
      const double left = formula_assouad_spectrum(p, d, tc - 1e-9);
      const double right = formula_assouad_spectrum(p, d, tc + 1e-9);
      if (std::abs(at - d) > 1e-9 || std::abs(left - d) > 1e-6 || std::abs(right - d) > 1e-6) ++cont_bad;

      const auto curve = closed_form_curve(p, d, thetas);
      const auto once = regularize(curve);
      const auto twice = regularize(once);
      if (once.values != curve.values || twice.values != once.values) ++reg_bad;
    }
    const std::string suffix = " (d=" + std::to_string(d) + ", 100-point grid)";
    rep.checks.push_back({"box <= spectrum <= d" + suffix, chain_bad == 0, std::to_string(chain_bad) + " violations"});
    rep.checks.push_back({"spectrum <= upper-bound lemma" + suffix, dom_bad == 0, std::to_string(dom_bad) + " violations"});
    rep.checks.push_back({"strict below the lemma when p(d-1) > 1" + suffix, strict_bad == 0,
                          std::to_string(strict_bad) + " violations"});
    rep.checks.push_back({"continuity at p/(p+1)" + suffix, cont_bad == 0, std::to_string(cont_bad) + " violations"});
    rep.checks.push_back({"closed-form curves fixed by regularize" + suffix, reg_bad == 0,
                          std::to_string(reg_bad) + " violations"});
  }

  // regularize on a non-monotone input
  {
    SpectrumCurve c;
    c.thetas = {0.1, 0.2, 0.3};
    c.values = {1.5, 1.2, 1.8};
    const auto r = regularize(c);
    const auto rr = regularize(r);
    bool ok = r.values == std::vector<double>{1.5, 1.5, 1.8} && rr.values == r.values;
    for (std::size_t i = 0; i < c.values.size(); ++i) ok = ok && r.values[i] >= c.values[i];
    rep.checks.push_back({"regularize is a running max and idempotent", ok, ""});
  }

  for (double p : {0.5, 1.0, 2.0}) {
    const auto w = impossibility_window(p, 2, kSnowflakeDim);
    const double mid = w.bound(w.midpoint());
    std::ostringstream os;
    os.precision(10);
    os << "window (" << w.lo << ", " << w.hi << "), bound(mid) = " << mid;
    const bool ok = w.nonempty() && w.hi == p / (p + 1.0) && mid > 2.0;
    rep.checks.push_back({"impossibility window p=" + num_text(p), ok, os.str()});
  }
  return rep;
}

// ---------------------------------------------------------------------------

struct OracleInstance {
  SampleSet sample;
  double r;
};

/// Random small instances whose bounding boxes span at most max_cells cells.
/// Some instances put points exactly on cell boundaries.
inline std::vector<OracleInstance> oracle_instances(std::size_t count, std::uint64_t seed,
                                                    double max_cells = 1e4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<OracleInstance> out;
  for (std::size_t i = 0; i < count; ++i) {
    const int d = 1 + static_cast<int>(rng() % 3);
    const double r = std::ldexp(1.0, -static_cast<int>(rng() % 8)) * (0.5 + unit(rng));
    const auto per_axis = static_cast<long long>(std::floor(std::pow(max_cells, 1.0 / d))) - 1;
    const double extent = r * static_cast<double>(std::max(1LL, per_axis - 1)) * (0.2 + 0.8 * unit(rng));
    const std::size_t n = 1 + rng() % 2000;
    const bool on_grid = i % 5 == 0;
    std::vector<double> origin(d);
    for (auto& o : origin) o = (unit(rng) - 0.5) * 100.0 * r;
    std::vector<double> c;
    for (std::size_t j = 0; j < n; ++j)
      for (int k = 0; k < d; ++k) {
        double v = origin[k] + extent * unit(rng);
        if (on_grid) v = std::floor(v / r) * r;
        c.push_back(v);
      }
    out.push_back({SampleSet(d, r / 16.0, std::move(c), "random"), r});
  }
  return out;
}

inline SuiteReport verify_covering_oracle(std::size_t count = 50, std::uint64_t seed = kDefaultSeed) {
  SuiteReport rep{"covering-oracle", {}};
  std::size_t mismatches = 0;
  std::ostringstream detail;
  for (const auto& inst : oracle_instances(count, seed)) {
    const auto hashed = covering_number(inst.sample, inst.r).count;
    const auto brute = brute_force_covering(inst.sample, inst.r, bounding_box(inst.sample));
    if (hashed != brute) {
      ++mismatches;
      detail << "d=" << inst.sample.dim() << " r=" << inst.r << " hash=" << hashed << " brute=" << brute << "; ";
    }
  }
  rep.checks.push_back({std::to_string(count) + " random instances, hash count == brute force", mismatches == 0,
                        mismatches ? detail.str() : "all equal"});
  return rep;
}

// ---------------------------------------------------------------------------

inline SuiteReport verify_classification() {
  SuiteReport rep{"classification", {}};
  // exponents in quarters so the expected verdict is integer arithmetic
  const std::vector<long long> quarters = {1, 2, 4, 6, 8, 12};
  std::size_t cases = 0, mismatches = 0, skipped = 0, witness_bad = 0, swap_bad = 0;
  std::ostringstream detail;
  for (long long P : quarters)
    for (long long Q : quarters) {
      if (P < Q) continue;
      const double p = P / 4.0, q = Q / 4.0;
      struct Case {
        double K;
        bool expected;
      };
      const std::vector<Case> grid = {
          {1.0, Q >= P},
          {1.01, 101 * Q >= 100 * P},
          {p / q - 0.01, false},
          {p / q, true},
          {p / q + 0.01, true},
          {10.0, 10 * Q >= P},
      };
      for (const auto& c : grid) {
        if (c.K < 1.0) {
          ++skipped;
          continue;
        }
        ++cases;
        const auto v = classify(ShellPair::normalized(p, q), c.K);
        if (v.admissible != c.expected) {
          ++mismatches;
          detail << "(p=" << p << ",q=" << q << ",K=" << c.K << ") ";
        }
        if (!v.witness_holds) ++witness_bad;
        if (classify(ShellPair::normalized(q, p), c.K).admissible != v.admissible) ++swap_bad;
      }
    }
  rep.checks.push_back({"admissible iff K >= p/q over " + std::to_string(cases) + " cases (" +
                            std::to_string(skipped) + " with K < 1 skipped)",
                        mismatches == 0, mismatches ? detail.str() : "zero mismatches"});
  rep.checks.push_back({"impossible verdicts carry a valid witness", witness_bad == 0,
                        std::to_string(witness_bad) + " bad witnesses"});
  rep.checks.push_back({"verdict invariant under swapping p and q", swap_bad == 0,
                        std::to_string(swap_bad) + " differences"});
  return rep;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"formulas", "covering-oracle", "classification"};
  return names;
}

/// Runs a suite by name; throws InvalidArgument for an unknown name.
inline SuiteReport run_suite(const std::string& name) {
  if (name == "formulas") return verify_formulas();
  if (name == "covering-oracle") return verify_covering_oracle();
  if (name == "classification") return verify_classification();
  throw InvalidArgument("unknown suite '" + name + "'");
}

}  // namespace fracdim
