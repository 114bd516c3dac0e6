"""Running the smeared-identity check suite and reading its reports.

Formal statements about the continuum (eigenvalue equations, delta
normalization of the eigenfunctions, canonical commutators, stability of
the test space) cannot be checked pointwise, but every one of them has a
finite smeared form: integrate against test functions and compare numbers.
The suite bundles those checks with sensible default probes; each report
carries the worst residual, its tolerance, and named witnesses.
"""

import json

from barrierkets import BarrierModel, QuadratureSpec, run_default_suite

model = BarrierModel()
spec = QuadratureSpec()

reports = run_default_suite(model, spec)
print(f"{'check':<32} {'residual':>12} {'tolerance':>11}  verdict")
for report in reports:
    verdict = "pass" if report.passed else "FAIL"
    if report.inconclusive:
        verdict = "inconclusive"
    print(f"{report.check_name:<32} {report.residual:12.3e}"
          f" {report.tolerance:11.0e}  {verdict}")
print()

# Each report names its witnesses, so a failure points at the packet or
# probe that produced it.  Show the commutator breakdown: the [H, P]
# residual vanishes because every test function is flat at the steps,
# which kills the boundary terms the step potential would produce.
commutators = next(r for r in reports if r.check_name == "commutators")
for name, value in commutators.witnesses:
    print(f"  {name:<18} {value:.3e}")
print()

# Reports serialize for logging or regression tracking.
record = reports[0].to_dict()
record["witnesses"] = record["witnesses"][:2] + ["..."]
print(json.dumps(record, indent=2))
