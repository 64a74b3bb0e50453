"""Seeded randomness and measurement-direction sets.

Haar-random 2x2 unitaries (Ginibre + QR with phase correction), uniform
Bloch-sphere directions, and the octahedron/icosahedron direction sets
whose averages reproduce uniform sphere integrals for low-degree
polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

_UINT64_MAX = 2**64 - 1

DESIGN_VALIDATION_ATOL = 1e-12


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by (seed, stream_id).

    Backed by the counter-based Philox generator keyed with both fields,
    so equal inputs reproduce identical draw sequences and distinct
    stream ids give statistically independent streams.  Parallel
    consumers should derive one stream per work unit, e.g.
    ``RngStream(seed, block_index)``.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name, value in (("seed", self.seed), ("stream_id", self.stream_id)):
            if not 0 <= int(value) <= _UINT64_MAX:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def _generator(rng) -> np.random.Generator:
    """Accept either an RngStream (fresh generator) or a live Generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng)!r}")


# ---------------------------------------------------------------------------
# Haar unitaries and uniform directions
# ---------------------------------------------------------------------------

def haar_unitaries(rng, count: int) -> np.ndarray:
    """Draw ``count`` Haar-distributed 2x2 unitaries, shape (count, 2, 2).

    Ginibre matrices are QR-decomposed and the Q factor is rephased by
    the unit-modulus diagonal of R, which makes the distribution exactly
    Haar rather than merely unitary.
    """
    gen = _generator(rng)
    z = gen.standard_normal((count, 2, 2)) + 1j * gen.standard_normal((count, 2, 2))
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.stack([r[:, 0, 0], r[:, 1, 1]], axis=1)
    phases = diag / np.abs(diag)
    return q * phases[:, None, :]


def haar_unitary_2(rng) -> np.ndarray:
    """Draw one Haar-distributed 2x2 unitary."""
    return haar_unitaries(rng, 1)[0]


def uniform_directions(rng, count: int) -> np.ndarray:
    """Draw ``count`` uniform points on the unit sphere, shape (count, 3).

    z is uniform on [-1, 1] and the azimuth uniform on [0, 2*pi), which
    is the pushforward of the Haar measure through U sigma_z U^dagger.
    """
    gen = _generator(rng)
    z = gen.uniform(-1.0, 1.0, size=count)
    azimuth = gen.uniform(0.0, 2.0 * np.pi, size=count)
    radial = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([radial * np.cos(azimuth), radial * np.sin(azimuth), z], axis=1)


def uniform_direction(rng) -> "Direction":
    """Draw one uniform direction."""
    x, y, z = uniform_directions(rng, 1)[0]
    return Direction(float(x), float(y), float(z))


# ---------------------------------------------------------------------------
# Directions and spherical designs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Direction:
    """A unit vector on the Bloch sphere (norm 1 within 1e-12)."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = np.sqrt(self.x**2 + self.y**2 + self.z**2)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"direction norm {norm!r} deviates from 1 beyond 1e-12")

    @classmethod
    def from_array(cls, vec) -> "Direction":
        v = np.asarray(vec, dtype=float).ravel()
        if v.shape != (3,):
            raise ValueError(f"expected 3 components, got shape {v.shape}")
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @classmethod
    def from_spherical(cls, theta: float, phi: float) -> "Direction":
        s = np.sin(theta)
        return cls(float(s * np.cos(phi)), float(s * np.sin(phi)), float(np.cos(theta)))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __neg__(self) -> "Direction":
        return Direction(-self.x, -self.y, -self.z)


E_X = Direction(1.0, 0.0, 0.0)
E_Y = Direction(0.0, 1.0, 0.0)
E_Z = Direction(0.0, 0.0, 1.0)


def as_direction_array(d) -> np.ndarray:
    """Coerce a Direction or 3-sequence to a unit ndarray."""
    if isinstance(d, Direction):
        return d.as_array()
    v = np.asarray(d, dtype=float).ravel()
    if v.shape != (3,):
        raise ValueError(f"expected a direction with 3 components, got shape {v.shape}")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"direction norm {norm!r} deviates from 1 beyond 1e-12")
    return v


@dataclass(frozen=True)
class SphericalDesign:
    """A finite direction set whose average matches uniform sphere
    integrals for all polynomials of degree <= ``degree``."""

    degree: int
    points: tuple

    def as_array(self) -> np.ndarray:
        return np.array([p.as_array() for p in self.points])

    def __len__(self) -> int:
        return len(self.points)


_SUPPORTED_DESIGN_DEGREES = (3, 5)


def design_points(t: int) -> SphericalDesign:
    """The degree-3 octahedron (6 points) or degree-5 icosahedron (12 points).

    The icosahedron uses the golden-ratio vertices (0, +-1, +-g)/sqrt(1+g^2)
    and their cyclic coordinate permutations; any rotation would serve
    equally, this one is fixed for byte-reproducible output.
    """
    if t == 3:
        pts = []
        for axis in range(3):
            for sign in (1.0, -1.0):
                vec = [0.0, 0.0, 0.0]
                vec[axis] = sign
                pts.append(Direction(*vec))
        return SphericalDesign(3, tuple(pts))
    if t == 5:
        g = (1.0 + np.sqrt(5.0)) / 2.0
        scale = 1.0 / np.sqrt(1.0 + g * g)
        pts = []
        for shift in range(3):
            for s1 in (1.0, -1.0):
                for s2 in (1.0, -1.0):
                    base = [0.0, s1 * scale, s2 * g * scale]
                    vec = [base[(k - shift) % 3] for k in range(3)]
                    pts.append(Direction(*vec))
        return SphericalDesign(5, tuple(pts))
    raise ValueError(
        f"unsupported design degree {t}; supported degrees: "
        + ", ".join(str(d) for d in _SUPPORTED_DESIGN_DEGREES)
    )


def _double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def sphere_monomial_integral(a: int, b: int, c: int) -> float:
    """Uniform average of x^a y^b z^c over the unit sphere.

    Zero unless all exponents are even, in which case it equals
    (a-1)!!(b-1)!!(c-1)!! / (a+b+c+1)!!.
    """
    if a % 2 or b % 2 or c % 2:
        return 0.0
    num = (
        _double_factorial(a - 1)
        * _double_factorial(b - 1)
        * _double_factorial(c - 1)
    )
    return num / _double_factorial(a + b + c + 1)


@dataclass(frozen=True)
class DesignValidation:
    """Outcome of checking a point set against sphere integrals."""

    degree_tested: int
    n_points: int
    entries: tuple  # rows (a, b, c, design_average, exact_integral, deviation)
    passed: bool
    max_abs_deviation: float

    def to_dict(self) -> dict:
        return {
            "degree_tested": self.degree_tested,
            "n_points": self.n_points,
            "passed": self.passed,
            "max_abs_deviation": self.max_abs_deviation,
            "monomials": [
                {
                    "a": a,
                    "b": b,
                    "c": c,
                    "design_average": avg,
                    "exact_integral": exact,
                    "deviation": dev,
                }
                for (a, b, c, avg, exact, dev) in self.entries
            ],
        }


def validate_design(design: SphericalDesign, t: int) -> DesignValidation:
    """Compare design averages of all monomials of degree <= t against the
    closed-form sphere integrals.  Failure is reported, not raised."""
    pts = design.as_array()
    entries = []
    max_dev = 0.0
    for degree in range(t + 1):
        for exponents in _monomial_exponents(degree):
            a, b, c = exponents
            values = pts[:, 0] ** a * pts[:, 1] ** b * pts[:, 2] ** c
            avg = float(np.sum(values) / len(pts))
            exact = sphere_monomial_integral(a, b, c)
            dev = abs(avg - exact)
            max_dev = max(max_dev, dev)
            entries.append((a, b, c, avg, exact, dev))
    passed = max_dev < DESIGN_VALIDATION_ATOL
    return DesignValidation(t, len(pts), tuple(entries), passed, max_dev)


def _monomial_exponents(degree: int):
    seen = set()
    for combo in combinations_with_replacement(range(3), degree):
        exps = [0, 0, 0]
        for axis in combo:
            exps[axis] += 1
        key = tuple(exps)
        if key not in seen:
            seen.add(key)
            yield key


def half_design(design: SphericalDesign) -> tuple:
    """One representative per antipodal pair (the one whose first nonzero
    component is positive).  Averages of even-degree polynomials are
    unchanged; odd ones are no longer reproduced."""
    pts = design.as_array()
    n = len(pts)
    used = np.zeros(n, dtype=bool)
    kept = []
    for i in range(n):
        if used[i]:
            continue
        partner = None
        for j in range(i + 1, n):
            if not used[j] and np.max(np.abs(pts[i] + pts[j])) < 1e-12:
                partner = j
                break
        if partner is None:
            raise ValueError(
                f"point set is not antipodally symmetric: no partner for point {i}"
            )
        used[i] = used[partner] = True
        rep = pts[i]
        for component in rep:
            if component != 0.0:
                if component < 0.0:
                    rep = pts[partner]
                break
        kept.append(Direction.from_array(rep))
    return tuple(kept)


def design_to_csv(design: SphericalDesign, path) -> None:
    """Write the design points as x,y,z rows with 17 significant digits."""
    with open(path, "w") as fh:
        fh.write("x,y,z\n")
        for p in design.points:
            fh.write(f"{p.x:.17g},{p.y:.17g},{p.z:.17g}\n")
