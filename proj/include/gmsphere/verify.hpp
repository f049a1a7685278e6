#pragma once

// The property suite behind `gmsphere verify`: metric identities, bracket
// criteria, the horizontality lemmas and the classifier/minimizer agreement.

#include <cstdint>
#include <string>
#include <vector>

#include "gmsphere/search.hpp"

namespace gmsphere {

struct Check {
  std::string name;
  std::string subject;  // lemma or identity under test
  bool pass = false;
  double value = 0.0;      // worst observed residual or statistic
  double tolerance = 0.0;
  std::string relation;    // how value is compared with tolerance: "<", ">", ">=" or "=="
  std::string detail;
  bool informational = false;  // reported, never fails the suite
};

struct VerifyOptions {
  MetricParams metric = MetricParams::make(0.5, 0.5);
  std::uint64_t seed = 42;
  int samples = 200;  // Haar points in the agreement scan
  int per_piece = 10;  // constructed points of each Z_i
  int starts = 64;
  int workers = 1;
  double tol_zero = kDefaultZTol;
};

struct VerifyReport {
  std::vector<Check> checks;
  Calibration calibration;
  bool calibrated = false;

  bool passed() const;
  std::vector<std::string> failed() const;
};

VerifyReport run_verify(const VerifyOptions& opt);

}  // namespace gmsphere
