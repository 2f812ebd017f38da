"""Default empirical-constant ceilings for the ratio-tracking checks.

The underlying bounds assert finite constants without giving values, so
pass/fail ceilings are configuration rather than mathematics.  Each default
was set to 4x the maximum ratio observed in a seeded calibration run of this
package (run sizes noted per entry; see tools/calibrate.py for the exact
procedure).  A config file's ``ceiling`` key overrides the default.
"""

from __future__ import annotations

__all__ = ["DEFAULT_CEILINGS", "ceiling_for"]

# calibration: seed 20240801; sizes: bilinear_maximal_sq 10000 trials,
# sweep entries 200 paired trials per grid in {64,128,256}, others 1000 trials
# (ergodic_vq 200); each ceiling is 4x the observed max, noted alongside
DEFAULT_CEILINGS: dict[str, float] = {
    # integral of the squared bilinear neighbor-maximal against |h1 h2|^2
    "bilinear_maximal_sq": 2028.03,  # max 507.008
    # weighted Carleson level sum over ||f||_2^2 ||b||_bmo^2
    "carleson_weighted": 10.5926,  # max 2.64816
    # levelwise product-variation L2 ratio
    "martingale_product_variation": 5.11372,  # max 1.27843
    # square-function L2 ratio against ||f1||_inf ||f2||_2
    "square_l2": 3.85912,  # max 0.964781
    # rotation-average variation ratio on the torus
    "ergodic_vq": 0.104625,  # max 0.0261563
    # full variation sweeps, keyed by (norm, p1, p2, p, q)
    "sweep:strong:2,2,1,3": 4.52981,  # max 1.13245
    "sweep:strong:4,4,2,3": 3.77979,  # max 0.944947
    "sweep:weak:1,2,0.6666666666666666,3": 2.56953,  # max 0.642384
    "sweep:bmo:inf,inf,inf,3": 1.56044,  # max 0.39011
}


def sweep_key(norm: str, p1: float, p2: float, p: float, q: float) -> str:
    def fmt(v: float) -> str:
        if v == float("inf"):
            return "inf"
        return repr(int(v)) if float(v).is_integer() else repr(v)

    return f"sweep:{norm}:{fmt(p1)},{fmt(p2)},{fmt(p)},{fmt(q)}"


def ceiling_for(key: str, override: float | None = None) -> float:
    if override is not None:
        return override
    if key in DEFAULT_CEILINGS:
        return DEFAULT_CEILINGS[key]
    return DEFAULT_CEILINGS.get(key.split(":", 1)[0], 1e6)
