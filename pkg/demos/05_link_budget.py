"""Photonic insertion-loss budget for a chip-to-fiber collection path.

Builds the three-element chain (emitter-chip taper, on-chip waveguide
propagation, chip-to-fiber edge coupler), propagates the edge coupler's
measured spread as a 1-sigma uncertainty, and compares the modeled total
with a measured ~10% end-to-end figure; the leftover appears as a
residual/unexplained row.
"""

import json

from cavitykit import LinkChain, LinkElement, budget_report, format_budget_table
from cavitykit.linkbudget import chain_from_json_obj

chain = LinkChain((
    LinkElement("diamond-SiN taper", efficiency=0.80),
    LinkElement("SiN waveguide", loss_db_per_cm=1.9, length_cm=0.35),
    LinkElement("SiN-fiber edge coupler", efficiency=0.197,
                efficiency_err=0.045),
))

report = budget_report(chain, measured_total=0.10)
print(format_budget_table(report))
print()
print("the ~1.3 dB residual is loss the element model does not attribute")
print()

# the edge coupler itself decomposes into three mechanisms
sub = LinkChain((
    LinkElement("short SSC section", efficiency=0.60),
    LinkElement("index mismatch at adhesive", efficiency=0.60),
    LinkElement("fiber-waveguide misalignment", efficiency=0.70),
))
print("edge-coupler sub-budget:")
print(format_budget_table(budget_report(sub)))
print()

# chains round-trip through a JSON spec (the CLI uses the same format)
spec = [{"name": el.name, "efficiency": el.resolved_efficiency}
        for el in sub.elements]
again = chain_from_json_obj(json.loads(json.dumps(spec)))
print("re-built from JSON: total = %.3f (same as %.3f)" %
      (again.total_efficiency, sub.total_efficiency))
