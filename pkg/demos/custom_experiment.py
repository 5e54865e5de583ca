"""Load an experiment from the text format, run both engines, write it back."""
from pathlib import Path

from whichway import compare_engines, dsl

here = Path(__file__).resolve().parent
g = dsl.load(here / "triangle.oxp")
report = compare_engines(g)
print(f"{len(report.rows)} outcomes, engines agree to {report.max_diff:.1e}")
for row in sorted(report.rows, key=lambda r: -r.p_path_integral)[:5]:
    print(f"  {row.outcome}  {row.p_path_integral:.6f}")
print("\ncanonical form begins:")
print("\n".join(dsl.serialize(g).splitlines()[:6]))
