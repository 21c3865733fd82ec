"""
Point-level geometry of the symmetrized bidisc.

Every inequality ``|expr| <= c`` is tested as ``<= c + BAND`` and every
equality as ``|difference| <= BAND`` so that points built from unimodular
fibers land on the distinguished boundary despite rounding.
"""

import cmath
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

import numpy as np

from .models import (
    BoundaryMethod,
    GammaMethod,
    MembershipReport,
    PointPair,
    Region,
)

BAND = 1e-9

AXES = ("s_re", "s_im", "p_re", "p_im")

SLICE_PRESETS = {
    "real": "s_re=-2:2,p_re=-1:1",
    "imag-p": "s_re=-2:2,p_im=-1:1",
    "complex-s": "s_re=-2:2,s_im=-2:2",
}


class SliceSpecError(ValueError):
    """Raised for a malformed region slice specification."""

    pass


def symmetrize_point(z1: complex, z2: complex) -> PointPair:
    """π(z1, z2) = (z1 + z2, z1 z2)."""
    return PointPair(z1 + z2, z1 * z2)


def _roots(s: complex, p: complex) -> Tuple[complex, complex]:
    """Roots of z^2 - s z + p, larger-magnitude root first (no cancellation)."""
    sq = cmath.sqrt(s * s - 4 * p)
    plus, minus = s + sq, s - sq
    q = plus / 2 if abs(plus) >= abs(minus) else minus / 2
    if q == 0:
        return 0j, 0j
    return q, p / q


def fibers(pt: PointPair) -> Tuple[Tuple[complex, complex], Tuple[complex, complex]]:
    """Both ordered preimages of pt under π."""
    z1, z2 = _roots(pt.s, pt.p)
    return (z1, z2), (z2, z1)


def root_moduli(pt: PointPair) -> Tuple[float, float]:
    z1, z2 = _roots(pt.s, pt.p)
    return abs(z1), abs(z2)


def moebius_defect(pt: PointPair) -> complex:
    """s - conj(s) p, the quantity every characterization turns on."""
    return pt.s - pt.s.conjugate() * pt.p


def beta_witness(pt: PointPair) -> complex | None:
    """β = (s - s̄p) / (1 - |p|^2) with s = β + β̄p, defined when |p| < 1."""
    gap = 1 - abs(pt.p) ** 2
    if gap <= BAND:
        return None
    return moebius_defect(pt) / gap


def _beta_test(pt: PointPair) -> bool:
    if abs(pt.p) > 1 + BAND:
        return False
    beta = beta_witness(pt)
    if beta is None:
        # |p| = 1: the witness degenerates to s = s̄p with |s| <= 2.
        return abs(moebius_defect(pt)) <= BAND and abs(pt.s) <= 2 + BAND
    rebuilt = beta + beta.conjugate() * pt.p
    return abs(beta) <= 1 + BAND and abs(rebuilt - pt.s) <= BAND * (1 + abs(pt.s))


def in_gamma(pt: PointPair, method: GammaMethod = GammaMethod.ROOTS) -> bool:
    """Membership in the closed symmetrized bidisc by the named characterization."""
    s, p = pt.s, pt.p
    method = GammaMethod(method)
    if method == GammaMethod.ROOTS:
        return max(root_moduli(pt)) <= 1 + BAND
    if method == GammaMethod.MOEBIUS_II:
        return abs(moebius_defect(pt)) + abs(p) ** 2 <= 1 + BAND and abs(s) <= 2 + BAND
    if method == GammaMethod.SUM_III:
        total = 2 * abs(moebius_defect(pt)) + abs(s * s - 4 * p) + abs(s) ** 2
        return total <= 4 + BAND
    return _beta_test(pt)


def in_b_gamma(pt: PointPair, method: BoundaryMethod = BoundaryMethod.MODULUS) -> bool:
    """Membership in the distinguished boundary bΓ."""
    method = BoundaryMethod(method)
    if method == BoundaryMethod.MODULUS:
        return in_gamma(pt) and abs(abs(pt.p) - 1) <= BAND
    s, p = pt.s, pt.p
    return (
        abs(moebius_defect(pt)) <= BAND
        and abs(abs(s * s - 4 * p) + abs(s) ** 2 - 4) <= BAND
    )


def in_gamma_minus_b(pt: PointPair) -> bool:
    """Γ minus its distinguished boundary: |p| != 1 and |s - s̄p| + |p|^2 <= 1."""
    return (
        abs(abs(pt.p) - 1) > BAND
        and abs(moebius_defect(pt)) + abs(pt.p) ** 2 <= 1 + BAND
    )


def in_open_g(pt: PointPair) -> bool:
    """Open symmetrized bidisc: both roots strictly inside the unit disc."""
    return max(root_moduli(pt)) < 1 - BAND


def in_half_gamma(pt: PointPair) -> bool:
    """Closed symmetrized half-bidisc: (2s, 4p) in Γ."""
    return in_gamma(PointPair(2 * pt.s, 4 * pt.p), GammaMethod.ROOTS)


def in_half_g(pt: PointPair) -> bool:
    """Open symmetrized half-bidisc: (2s, 4p) in G."""
    return in_open_g(PointPair(2 * pt.s, 4 * pt.p))


def classify(pt: PointPair) -> MembershipReport:
    """Assign a region and record every characterization's verdict."""
    moduli = root_moduli(pt)
    verdicts: Dict[str, bool] = {m.value: in_gamma(pt, m) for m in GammaMethod}
    for m in BoundaryMethod:
        verdicts[f"B_GAMMA_{m.value}"] = in_b_gamma(pt, m)
    verdicts["GAMMA_MINUS_B"] = in_gamma_minus_b(pt)
    verdicts["OPEN_G"] = in_open_g(pt)
    verdicts["HALF_GAMMA"] = in_half_gamma(pt)

    if not verdicts[GammaMethod.ROOTS.value]:
        region = Region.OUTSIDE
    elif max(moduli) < 1 - BAND:
        region = Region.OPEN_G
    elif verdicts[f"B_GAMMA_{BoundaryMethod.MODULUS.value}"]:
        region = Region.DIST_BOUNDARY
    else:
        region = Region.GAMMA_NOT_B

    witness = beta_witness(pt) if region != Region.OUTSIDE else None
    if witness is not None and abs(witness) > 1 + BAND:
        witness = None
    return MembershipReport(
        point=pt,
        region=region,
        beta_witness=witness,
        root_moduli=moduli,
        per_method_verdicts=verdicts,
    )


def random_points(
    rng: np.random.Generator, count: int, s_radius: float = 3.2, p_radius: float = 1.6
) -> List[PointPair]:
    """Points with s, p uniform in discs of the given radii."""

    def disc(radius: float) -> np.ndarray:
        r = radius * np.sqrt(rng.random(count))
        return r * np.exp(2j * np.pi * rng.random(count))

    return [PointPair(s, p) for s, p in zip(disc(s_radius), disc(p_radius))]


def random_gamma_point(rng: np.random.Generator) -> PointPair:
    """π of a point drawn uniformly from the closed bidisc."""
    r = np.sqrt(rng.random(2))
    z = r * np.exp(2j * np.pi * rng.random(2))
    return symmetrize_point(complex(z[0]), complex(z[1]))


def boundary_point(z1: complex, z2: complex) -> PointPair:
    """π of the radial projection of (z1, z2) onto the torus; lands in bΓ."""
    if z1 == 0 or z2 == 0:
        raise ValueError("boundary_point needs two nonzero coordinates")
    return symmetrize_point(z1 / abs(z1), z2 / abs(z2))


def torus_points(rng: np.random.Generator, count: int) -> List[PointPair]:
    """Images under π of uniform points on the torus (all in bΓ)."""
    angles = 2 * np.pi * rng.random((count, 2))
    return [boundary_point(np.exp(1j * a), np.exp(1j * b)) for a, b in angles]


@dataclass
class RegionSlice:
    """A 2-D affine slice of C^2 = R^4: two ranged axes, the other two fixed."""

    ranges: List[Tuple[str, float, float]]
    fixed: Dict[str, float]

    @classmethod
    def parse(cls, spec: str) -> "RegionSlice":
        """Parse ``axis=lo:hi`` / ``axis=value`` items, or a preset name."""
        spec = SLICE_PRESETS.get(spec, spec)
        ranges: List[Tuple[str, float, float]] = []
        fixed: Dict[str, float] = {}
        for item in filter(None, (part.strip() for part in spec.split(","))):
            if "=" not in item:
                raise SliceSpecError(f"Slice item '{item}' is not of the form axis=...")
            axis, value = (x.strip() for x in item.split("=", 1))
            if axis not in AXES:
                raise SliceSpecError(
                    f"Unknown axis '{axis}'. Valid axes: {', '.join(AXES)}"
                )
            if axis in fixed or any(axis == r[0] for r in ranges):
                raise SliceSpecError(f"Axis '{axis}' given twice")
            try:
                if ":" in value:
                    lo, hi = (float(v) for v in value.split(":", 1))
                    ranges.append((axis, lo, hi))
                else:
                    fixed[axis] = float(value)
            except ValueError:
                raise SliceSpecError(f"Bad number in slice item '{item}'") from None
        if len(ranges) != 2:
            raise SliceSpecError(
                f"A slice needs exactly two ranged axes, got {len(ranges)}"
            )
        ranged = {r[0] for r in ranges}
        for axis in AXES:
            if axis not in ranged:
                fixed.setdefault(axis, 0.0)
        return cls(ranges=ranges, fixed=fixed)

    def points(self, grid: int) -> Iterator[PointPair]:
        """Grid points in row-major order (first ranged axis outermost)."""
        if grid < 2:
            raise SliceSpecError(f"Grid size must be at least 2, got {grid}")
        (ax1, lo1, hi1), (ax2, lo2, hi2) = self.ranges
        for v1 in np.linspace(lo1, hi1, grid):
            for v2 in np.linspace(lo2, hi2, grid):
                coords = dict(self.fixed)
                coords[ax1] = float(v1)
                coords[ax2] = float(v2)
                yield PointPair(
                    complex(coords["s_re"], coords["s_im"]),
                    complex(coords["p_re"], coords["p_im"]),
                )


def region_label(pt: PointPair, half: bool = False) -> Region:
    """Region of pt in Γ, or of (2s, 4p) when classifying against Γ̂."""
    if half:
        pt = PointPair(2 * pt.s, 4 * pt.p)
    return classify(pt).region
