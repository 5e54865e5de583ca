"""Entanglement swapping, and the same optics with the wings measured first.

Conditioning on the centre's Phi+ result makes the wing photons correlated
although they never met.  Reordering the detections leaves every joint
probability unchanged.
"""
import math

from whichway import collapse_tree, condition, dces, entanglement_swapping, joint_distribution, marginalize
from whichway.probability import correlation_report

alpha, beta = 0.3, math.pi - 0.3 - 0.4

es = joint_distribution(entanglement_swapping(alpha, beta))
print("wings alone:", {oc: round(p, 4) for oc, p in marginalize(es, ("A", "B")).items()})

given = condition(es, {"C": "Phi+"})
print("wings given C=Phi+:", {oc[1:]: round(p, 4) for oc, p in given.items() if oc[0] == "Phi+"})
print(f"correlation after conditioning: {correlation_report(given, ('A', 'B')).max_deviation:.4f}")

dc = joint_distribution(dces(alpha, beta))
print(f"\nmax |P_ES - P_DCES| = {max(abs(es[oc] - dc[oc]) for oc in es.outcomes()):.1e}")

centre_first = collapse_tree(entanglement_swapping(alpha, beta)).leaf_joints()
wings_first = collapse_tree(dces(alpha, beta)).leaf_joints()
print(f"collapse order effect  = {max(abs(centre_first[k] - wings_first[k]) for k in centre_first):.1e}")
