"""Benchmark coupling matrices and closed-form circulant-graph analytics.

Graph families
--------------
mobius_ladder
    Even ring with nearest-neighbour couplings -1 and cross-diameter
    couplings -J.  The ground state switches from the alternating state S0
    to the two-defect state S1 at J_crit = 4/N.
jg_cyclic
    Möbius ladder plus distance-k couplings -G (5-regular circulant).
sk_instance
    Fully connected Gaussian couplings (Sherrington-Kirkpatrick).
three_regular_instance
    Uniform random simple 3-regular graph with Gaussian edge weights.

All generators are pure functions of (parameters, seed) and return exactly
symmetric matrices with zero diagonal.  Randomness uses numpy's Philox
counter-based generator so instances are bit-reproducible across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

SQRT2 = math.sqrt(2.0)


@dataclass
class CouplingMatrix:
    """Symmetric spin-spin interaction matrix J plus optional field vector h.

    The Ising energy convention is the pair sum: each unordered pair (i, j)
    contributes -J_ij * s_i * s_j exactly once (see ising.ising_energy).
    """

    weights: np.ndarray
    field: np.ndarray | None = None

    def __post_init__(self):
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 2 or self.weights.shape[0] != self.weights.shape[1]:
            raise ValidationError("weights must be a square matrix")
        if self.field is None:
            self.field = np.zeros(self.n)
        else:
            self.field = np.asarray(self.field, dtype=np.float64)
            if self.field.shape != (self.n,):
                raise ValidationError("field length must match matrix size")
        if not np.array_equal(self.weights, self.weights.T):
            raise ValidationError("weights must be exactly symmetric")
        if np.any(np.diag(self.weights) != 0.0):
            raise ValidationError("weights must have zero diagonal")

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def lambda_max(self) -> float:
        """Largest eigenvalue of the coupling matrix."""
        return float(np.linalg.eigvalsh(self.weights)[-1])

    def edges(self):
        """Yield (i, j, weight) for every nonzero upper-triangle entry."""
        iu, ju = np.nonzero(np.triu(self.weights, k=1))
        for i, j in zip(iu.tolist(), ju.tolist()):
            yield i, j, float(self.weights[i, j])


@dataclass
class CirculantSpec:
    """Parameters of the two-parameter circulant family.

    n even; ring weight is fixed at -1, the cross-diameter weight is -J and,
    when k is given, the distance-k weight is -G with 1 < k < n/2.
    """

    n: int
    J: float
    G: float = 0.0
    k: int | None = None

    def __post_init__(self):
        if self.n < 4 or self.n % 2 != 0:
            raise ValidationError(f"n must be even and >= 4, got {self.n}")
        if self.k is not None and not (1 < self.k < self.n // 2):
            raise ValidationError(f"k must satisfy 1 < k < n/2, got k={self.k}, n={self.n}")

    def first_row(self) -> np.ndarray:
        return self.build().weights[0].copy()

    def build(self) -> CouplingMatrix:
        if self.k is None:
            return mobius_ladder(self.n, self.J)
        return jg_cyclic(self.n, self.J, self.G, self.k)


def mobius_ladder(n: int, J: float) -> CouplingMatrix:
    """Ring couplings -1 between neighbours, -J across the diameter."""
    if n < 4 or n % 2 != 0:
        raise ValidationError(f"mobius_ladder requires even n >= 4, got {n}")
    W = np.zeros((n, n))
    for i in range(n):
        j = (i + 1) % n
        W[i, j] = W[j, i] = -1.0
    for i in range(n // 2):
        j = i + n // 2
        W[i, j] = W[j, i] = -float(J)
    return CouplingMatrix(W)


def jg_cyclic(n: int, J: float, G: float, k: int) -> CouplingMatrix:
    """Möbius ladder plus weight -G on the distance-k chords (5-regular)."""
    if n < 8 or n % 2 != 0:
        raise ValidationError(f"jg_cyclic requires even n >= 8, got {n}")
    if not (1 < k < n // 2):
        raise ValidationError(f"jg_cyclic requires 1 < k < n/2, got k={k}, n={n}")
    cm = mobius_ladder(n, J)
    W = cm.weights
    for i in range(n):
        j = (i + k) % n
        W[i, j] = W[j, i] = -float(G)
    return CouplingMatrix(W)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def sk_instance(n: int, seed: int) -> CouplingMatrix:
    """Fully connected couplings drawn i.i.d. from the standard normal."""
    if n < 2:
        raise ValidationError(f"sk_instance requires n >= 2, got {n}")
    rng = _rng(seed)
    W = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    vals = rng.standard_normal(len(iu[0]))
    W[iu] = vals
    W = W + W.T
    return CouplingMatrix(W)


def three_regular_instance(n: int, seed: int, max_retries: int = 1000) -> CouplingMatrix:
    """Uniform simple 3-regular graph with standard-normal edge weights.

    Sampling uses the pairing (configuration) model: three stubs per vertex
    are matched uniformly and the whole sample is rejected if any self-loop
    or parallel edge appears.
    """
    if n < 4 or n % 2 != 0:
        raise ValidationError(f"three_regular_instance requires even n >= 4, got {n}")
    rng = _rng(seed)
    stubs = np.repeat(np.arange(n), 3)
    for _ in range(max_retries):
        perm = rng.permutation(stubs)
        a, b = perm[0::2], perm[1::2]
        if np.any(a == b):
            continue
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        keys = lo * n + hi
        if len(np.unique(keys)) != len(keys):
            continue
        order = np.argsort(keys)
        lo, hi = lo[order], hi[order]
        W = np.zeros((n, n))
        vals = rng.standard_normal(len(lo))
        W[lo, hi] = vals
        W = W + W.T
        return CouplingMatrix(W)
    raise ValidationError(f"no simple 3-regular graph found in {max_retries} pairing attempts")


def circulant_eigenvalues(first_row: np.ndarray) -> np.ndarray:
    """Spectrum of a circulant matrix from its first row.

    Returns lambda_m = sum_j row[j] * cos(2 pi m j / n) for modes m = 1..n
    (entry index m-1).  For the J-G family this equals
    -2 cos(2 pi m / n) - J (-1)^m - 2 G cos(2 pi k m / n).
    """
    row = np.asarray(first_row, dtype=np.float64)
    n = row.shape[0]
    m = np.arange(1, n + 1)
    j = np.arange(n)
    return np.cos(2.0 * np.pi * np.outer(m, j) / n) @ row


def mobius_thresholds(n: int) -> dict:
    """Ground-state and leading-eigenvalue crossings of the J-Möbius ladder.

    J_crit = 4/n is where the S0 and S1 energies cross, J_e = 1 - cos(2 pi/n)
    where the leading eigenvalue changes.  Both formulas hold for n/2 even.
    """
    if n < 4 or n % 4 != 0:
        raise ValidationError(f"threshold formulas require n/2 even, got n={n}")
    return {"J_e": 1.0 - math.cos(2.0 * math.pi / n), "J_crit": 4.0 / n}


def eigenvalue_gap(n: int, J: float) -> float:
    """Leading-eigenvalue gap 2 cos(2 pi/n) + 2J - 2 of the J-Möbius ladder.

    Positive exactly when J exceeds J_e; it is the spectral separation pulling
    scalar gain-based solvers toward the excited state S1.
    """
    if n < 4 or n % 4 != 0:
        raise ValidationError(f"gap formula requires n/2 even, got n={n}")
    return 2.0 * math.cos(2.0 * math.pi / n) + 2.0 * float(J) - 2.0


def jg_reference_energies(n: int, J: float, G: float, k: int) -> dict:
    """Closed-form Ising energies of the reference states S0..S3 (n/2 even)."""
    if n < 4 or n % 4 != 0:
        raise ValidationError(f"reference energies require n/2 even, got n={n}")
    if not (1 < k < n // 2):
        raise ValidationError(f"requires 1 < k < n/2, got k={k}, n={n}")
    d = k // 2 if k % 2 == 0 else 0
    sk = (-1.0) ** k
    return {
        "E0": (J - 2.0 - 2.0 * G * (-1.0) ** (k + 1)) * n / 2.0,
        "E1": 4.0 - (J + 2.0) * n / 2.0 + sk * (n - 4.0 * k) * G,
        "E2": ((-1.0) ** (n // 4) * J + (1.0 + sk) * (-1.0) ** d * G) * n / 2.0,
        "E3": 4.0 - n + (2.0 - n / 2.0) * J + sk * (n - 4.0 * k) * G,
    }


@dataclass(frozen=True)
class BoundaryLine:
    """Line a*J + b*G = c in coupling space where two closed forms cross."""

    kind: str  # "energy" or "eigenvalue"
    label: str
    a: float
    b: float
    c: float

    def residual(self, J: float, G: float) -> float:
        return self.a * J + self.b * G - self.c


def jg_boundaries(k: int) -> list[BoundaryLine]:
    """Hardness-region boundary lines of the n=8 J-G cyclic family.

    Energy lines separate regions with different ground states; eigenvalue
    lines separate regions with different leading eigenvectors.  Only k=2 and
    k=3 have derived closed forms.
    """
    if k == 2:
        return [
            BoundaryLine("energy", "E0=E1", 1.0, 1.0, 0.5),
            BoundaryLine("energy", "E1=E2", 1.0, -1.0, -0.5),
            BoundaryLine("energy", "E0=E2", 0.0, 1.0, 0.5),
            BoundaryLine("eigenvalue", "l4=l5", 1.0, 1.0, 1.0 - SQRT2 / 2.0),
            BoundaryLine("eigenvalue", "l5=l6", 1.0, -1.0, -1.0 / SQRT2),
            BoundaryLine("eigenvalue", "l4=l6", 0.0, 1.0, 0.5),
        ]
    if k == 3:
        return [
            BoundaryLine("energy", "E0=E1", 1.0, -1.5, 0.5),
            BoundaryLine("energy", "E0=E3", 1.0, -2.0, 2.0 / 3.0),
            BoundaryLine("energy", "E1=E3", 1.0, 0.0, 0.0),
            BoundaryLine("eigenvalue", "l4=l5", 1.0, -(1.0 + 1.0 / SQRT2), 1.0 - SQRT2 / 2.0),
        ]
    raise ValidationError(f"boundaries are derived only for k in {{2, 3}}, got {k}")


def save_coupling(path, cm: CouplingMatrix) -> None:
    """Write the text matrix format: 'N n', then 'i j w' per upper-triangle
    edge (0-based, full-precision), then optional 'H i v' field lines."""
    lines = [f"N {cm.n}"]
    for i, j, w in cm.edges():
        lines.append(f"{i} {j} {w!r}")
    for i, v in enumerate(cm.field):
        if v != 0.0:
            lines.append(f"H {i} {float(v)!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_coupling(path) -> CouplingMatrix:
    """Read the text matrix format written by save_coupling."""
    with open(path) as fh:
        tokens = [line.split() for line in fh if line.strip()]
    if not tokens or tokens[0][0] != "N":
        raise ValidationError("matrix file must start with 'N <n>'")
    n = int(tokens[0][1])
    if n < 1:
        raise ValidationError(f"invalid spin count {n}")
    W = np.zeros((n, n))
    h = np.zeros(n)
    for parts in tokens[1:]:
        if parts[0] == "H":
            i, v = int(parts[1]), float(parts[2])
            if not 0 <= i < n:
                raise ValidationError(f"field index {i} out of range")
            h[i] = v
            continue
        i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        if not (0 <= i < j < n):
            raise ValidationError(f"edge ({i}, {j}) must satisfy 0 <= i < j < n")
        if W[i, j] != 0.0:
            raise ValidationError(f"duplicate edge ({i}, {j})")
        W[i, j] = W[j, i] = w
    return CouplingMatrix(W, h)
