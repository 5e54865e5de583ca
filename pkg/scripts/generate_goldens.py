"""Regenerate src/whichway/data/goldens.jsonl.

Expected values are either the stored closed form evaluated at the listed
parameters, or (for a few hand-substituted cases) the literal value written
below.  Run from the repository root: ``python3 scripts/generate_goldens.py``.
"""
from __future__ import annotations

import math
from pathlib import Path

from whichway.goldens import GoldenCase, dump_goldens, evaluate_expression

OUT = Path(__file__).resolve().parent.parent / "src" / "whichway" / "data" / "goldens.jsonl"

FIG1 = {"R1": 0.3, "R2": 0.65, "alpha": 0.4, "gamma": 1.1, "delta": -0.7}
SWAP_MINUS = "(1/32)*abs(exp(1j*(alpha+beta))-1)**2"
SWAP_PLUS = "(1/32)*abs(exp(1j*(alpha+beta))+1)**2"
SWAP_HISTORIES = "abs(0.5*(exp(1j*alpha)/sqrt(2))*(1j/sqrt(2))*(exp(1j*beta)/sqrt(2)) + 0.5*(1j/sqrt(2))**3)**2"

# triangle outcomes as (A, B, C); each tuple maps to (closed form, provenance, note)
TRIANGLE = {
    "WWZ": ("(1/8)*abs(1j*u*v**2 + 1j*u**2*v)**2", "PAPER", "two histories: all solid, all dashed"),
    "WWW": ("(1/8)*abs((1j**2*v)*(1j**2*v)*(1j**2*v) + u*u*u)**2", "PAPER", ""),
    "ZZZ": ("(1/8)*abs((1j*u)*(1j*u)*(1j*u) + (1j*v)*(1j*v)*(1j*v))**2", "PAPER", ""),
    "WZZ": ("(1/8)*abs((1j**2*v)*(1j*u)*(1j*u) + u*(1j*v)*(1j*v))**2", "PAPER", "unsimplified two-history amplitude"),
    "WXY": ("(1/8)*abs(1j**2*v)**2", "PAPER", "single history"),
    "WYX": ("(1/8)*abs(u)**2", "PAPER", "single history"),
    "ZXY": ("(1/8)*abs(1j*u)**2", "PAPER", "single history"),
    "ZYX": ("(1/8)*abs(1j*v)**2", "PAPER", "single history"),
}
TRIANGLE_SIMPLIFIED = {
    "WWZ": "(1/8)*u**2*v**2*(u+v)**2",
    "WWW": "(1/8)*(u**3-v**3)**2",
    "ZZZ": "(1/8)*(u**3+v**3)**2",
    "WZZ": "(1/8)*u**2*v**2*(u-v)**2",
    "WXY": "v**2/8",
    "WYX": "u**2/8",
    "ZXY": "u**2/8",
    "ZYX": "v**2/8",
}


def rotate(word: str, k: int) -> str:
    """Outcome word after moving every label k stations forward (A->B->C->A)."""
    return word[-k:] + word[:-k] if k else word


def cases() -> list[GoldenCase]:
    out = []

    def add(id_, scenario, params, outcome, expr, provenance, note="", expected=None):
        value = evaluate_expression(expr, params) if expected is None else expected
        tag = ",".join(f"{k}={params[k]:.6g}" for k in sorted(params))
        out.append(GoldenCase(f"{id_}@{tag}", scenario, params, outcome, expr, value, provenance, note))

    add("figure1.ad", "figure1", FIG1, {"left": "a", "right": "d"},
        "abs((1/sqrt(2))*(1j*sqrt(R1))*(exp(1j*alpha)*1j*sqrt(R2)) + (1/sqrt(2))*(exp(1j*delta)*sqrt(T1))*(exp(1j*gamma)*sqrt(T2)))**2",
        "PAPER", "sum of the solid and dashed histories")

    for scenario in ("swap", "dces"):
        for alpha, beta in ((0.3, 1.2), (2.0, -0.5)):
            params = {"alpha": alpha, "beta": beta}
            for (a, b), expr in ((("0", "0"), SWAP_MINUS), (("0", "1"), SWAP_PLUS),
                                 (("1", "0"), SWAP_PLUS), (("1", "1"), SWAP_MINUS)):
                add(f"{scenario}.phi_plus.{a}{b}", scenario, params, {"C": "Phi+", "A": a, "B": b}, expr, "PAPER")
        add(f"{scenario}.phi_plus.00.histories", scenario, {"alpha": 0.3, "beta": 1.2},
            {"C": "Phi+", "A": "0", "B": "0"}, SWAP_HISTORIES, "PAPER", "all-dashed plus all-solid amplitude")
        half = {"alpha": math.pi / 2, "beta": math.pi / 2}
        add(f"{scenario}.phi_plus.00.half_pi", scenario, half, {"C": "Phi+", "A": "0", "B": "0"},
            SWAP_MINUS, "DERIVED", "|e^(i pi) - 1|^2 / 32", expected=0.125)

    for u in (0.6, 0.8):
        for word, (expr, prov, note) in TRIANGLE.items():
            for k in range(3):
                w = rotate(word, k)
                outcome = dict(zip("ABC", w))
                suffix = "" if k == 0 else f".rot{k}"
                add(f"triangle.{word}{suffix}", "triangle", {"u": u}, outcome, expr, prov, note)
            add(f"triangle.{word}.simplified", "triangle", {"u": u}, dict(zip("ABC", word)),
                TRIANGLE_SIMPLIFIED[word], "DERIVED", "simplified closed form")
    add("triangle.WWZ.substituted", "triangle", {"u": 0.6}, dict(zip("ABC", "WWZ")),
        TRIANGLE["WWZ"][0], "DERIVED", "(1/8)(0.36)(0.64)(1.4)^2", expected=0.056448)
    for word in ("WZY", "XXX", "WXX", "XYX"):
        add(f"triangle.forbidden.{word}", "triangle", {"u": 0.6}, dict(zip("ABC", word)), "0", "PAPER",
            "no consistent history")
    ids = [c.id for c in out]
    assert len(ids) == len(set(ids)), "golden ids must be unique"
    return out


if __name__ == "__main__":
    dump_goldens(cases(), OUT)
    print(f"wrote {len(cases())} cases to {OUT}")
