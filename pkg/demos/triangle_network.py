"""Three pairs on a triangle, each corner measuring two photons jointly.

Prints the permitted outcomes for one value of u, how many histories lead
to each, and the outcomes no history reaches.
"""
import sys

from whichway import enumerate_histories, group_by_outcome, joint_distribution, triangle

u = float(sys.argv[1]) if len(sys.argv) > 1 else 0.8
g = triangle(u)
buckets = group_by_outcome(g, enumerate_histories(g))
d = joint_distribution(g)

print(f"u = {u}")
for oc in sorted(buckets, key=lambda oc: -d[oc]):
    print(f"  {''.join(oc)}  histories={len(buckets[oc])}  P={d[oc]:.6f}")
unreached = [oc for oc in d.outcomes() if oc not in buckets]
print(f"{len(unreached)} outcomes have no history, e.g. {', '.join(''.join(oc) for oc in unreached[:6])}")
print(f"total probability {d.total():.12f}")
