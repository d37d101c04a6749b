#pragma once
#include <string>
#include <vector>

#include "rknav/manifold.hpp"

// Property suite behind the verify command.  Each property sweeps seeded
// samples and counts hard failures separately from tolerance-bound
// defects: when the requested tolerance drops below a property's numerical
// floor (quadrature order, integrator monitor), defects between the two are
// attributed to the floor, reported, and do not fail the run.
//
// The fixture hook injects negative controls; "perturbed-monotonicity"
// multiplies the regularized metric by an eps-oscillating factor so the
// monotonicity sweep must produce a counterexample.

namespace rknav {

struct PropertyResult {
  std::string name;
  long checked = 0;
  long failures = 0;         // defects beyond the effective tolerance
  long tolerance_bound = 0;  // defects within the floor when tol < floor
  double worst = 0.0;        // largest defect witnessed
  double floor_used = 0.0;
  bool skipped = false;      // property does not apply to this chart
  std::string counterexample;  // first hard failure, serialized
  std::string note;

  bool pass() const { return failures == 0; }
};

struct VerifyReport {
  bool ok = false;  // no property recorded a hard failure
  std::vector<PropertyResult> properties;
};

struct VerifyOptions {
  unsigned seed = 1;
  int samples = 256;   // sweep size; expensive properties scale it down
  double tol = 1e-9;   // requested comparison tolerance
  std::string fixture;  // "" or "perturbed-monotonicity"
};

VerifyReport run_verify(const ChartManifold& m, const VerifyOptions& opt = {});

// JSON document ("rknav.verify.v1") with per-property counts and the first
// counterexample, if any.
std::string verify_document(const VerifyReport& r);

}  // namespace rknav
