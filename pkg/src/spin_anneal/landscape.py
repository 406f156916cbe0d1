"""Energy-landscape analysis of the vector annealer (and its scalar analogue).

Critical points of the frozen-schedule Hamiltonian (uniform gain gamma,
fixed penalty P) are located by Newton iteration on the gradient, classified
by Hessian spectrum, and labelled by reading out their spin configuration
against the S0/S1 reference orbits.  The same machinery runs on the scalar
pump landscape (1/4) sum (p - x^2)^2 - (alpha/2) x.W.x for the side-by-side
saddle-path comparison, with p = gamma.

Rotational symmetry makes exact zero modes common (global spin rotations at
any P, per-spin rotations at P = 0); Newton steps therefore use a
pseudo-inverse with a zero-mode cutoff.

The default stiffness here is alpha = 1: the S0/S1 equal-energy boundary of
the n=8, J=0.4 ladder then passes through gamma = -0.087 for every P, the
reference juncture of the frozen-landscape analysis.  (The annealing runs
themselves default to alpha = 4, where gamma(0) = -0.5 leaves the origin as
the only critical point; pass alpha explicitly to study that regime.)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coupling import CouplingMatrix
from .errors import ValidationError
from .ising import in_orbit, reference_states, vector_readout, signs
from .solvers import make_rng, visa_energy, visa_rhs

GRAD_TOL = 1e-10
ZERO_MODE_TOL = 1e-8
DEDUP_TOL = 1e-6


@dataclass
class CriticalPoint:
    """A converged stationary point of the frozen-schedule landscape."""

    coordinates: np.ndarray
    energy: float
    hessian_index: int         # count of negative Hessian eigenvalues
    n_zero_modes: int
    distance: float            # ||x||_2 / n (soft-spin count normalization)
    label: str                 # S0_min | S1_min | other_min | saddle | maximum

    @property
    def is_minimum(self) -> bool:
        return self.hessian_index == 0


def visa_hessian(x: np.ndarray, gamma, P: float, alpha: float,
                 cm: CouplingMatrix) -> np.ndarray:
    """Analytic 3n x 3n Hessian of visa_energy at a state.

    At the origin with uniform gain it reduces to (-alpha*gamma) I - W per
    component, so its eigenvalues are -alpha*gamma - lambda_k(W), each with
    multiplicity 3.
    """
    X = np.asarray(x, dtype=np.float64)
    n = X.shape[0]
    gam = np.broadcast_to(np.asarray(gamma, dtype=np.float64), (n,))
    sq = np.einsum("ij,ij->i", X, X)
    S = sq.sum()
    O = X.T @ X
    I3 = np.eye(3)
    H = np.kron(-cm.weights, I3)
    outer = np.einsum("ip,iq->ipq", X, X)
    for i in range(n):
        block = alpha * ((sq[i] - gam[i]) * I3 + 2.0 * outer[i])
        block += 2.0 * P * ((S - sq[i]) * I3 + outer[i] - O)
        H[3 * i:3 * i + 3, 3 * i:3 * i + 3] += block
    if P != 0.0:
        C = X @ X.T
        off = 2.0 * P * (2.0 * np.einsum("ip,jq->ipjq", X, X)
                         - np.einsum("jp,iq->ipjq", X, X)
                         - np.einsum("ij,pq->ipjq", C, I3))
        # zero out the diagonal blocks handled above
        for i in range(n):
            off[i, :, i, :] = 0.0
        H += off.reshape(3 * n, 3 * n)
    return 0.5 * (H + H.T)


def _pinv_step(H: np.ndarray, g: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(H)
    inv = np.where(np.abs(w) > ZERO_MODE_TOL, 1.0 / np.where(np.abs(w) > ZERO_MODE_TOL, w, 1.0), 0.0)
    return V @ (inv * (V.T @ g))


class _Landscape:
    """Gradient/Hessian/energy bundle for one frozen-parameter landscape."""

    def __init__(self, dim, energy, grad, hess, label):
        self.dim = dim
        self.energy = energy
        self.grad = grad
        self.hess = hess
        self.label = label


def _visa_landscape(cm: CouplingMatrix, gamma: float, P: float, alpha: float) -> _Landscape:
    n = cm.n

    def energy(z):
        return visa_energy(z.reshape(n, 3), gamma, P, alpha, cm)

    def grad(z):
        return -visa_rhs(z.reshape(n, 3), gamma, P, alpha, cm).ravel()

    def hess(z):
        return visa_hessian(z.reshape(n, 3), gamma, P, alpha, cm)

    def label(z):
        X = z.reshape(n, 3)
        if np.max(np.abs(X)) < 1e-6:
            return "other"
        spins, _ = vector_readout(X)
        return _orbit_label(spins, n)

    return _Landscape(3 * n, energy, grad, hess, label)


def _cim_landscape(cm: CouplingMatrix, p: float, alpha: float) -> _Landscape:
    n = cm.n
    W = cm.weights

    def energy(z):
        return float(0.25 * np.sum((p - z * z) ** 2) - 0.5 * alpha * z @ (W @ z))

    def grad(z):
        return z ** 3 - p * z - alpha * (W @ z)

    def hess(z):
        return np.diag(3.0 * z * z - p) - alpha * W

    def label(z):
        if np.max(np.abs(z)) < 1e-6:
            return "other"
        return _orbit_label(signs(z), n)

    return _Landscape(n, energy, grad, hess, label)


def _orbit_label(spins: np.ndarray, n: int) -> str:
    if in_orbit(spins, reference_states(n, "S0")):
        return "S0"
    if in_orbit(spins, reference_states(n, "S1")):
        return "S1"
    return "other"


def _newton_polish(ls: _Landscape, z0: np.ndarray, max_iter: int = 100):
    z = z0.copy()
    for _ in range(max_iter):
        g = ls.grad(z)
        gn = float(np.linalg.norm(g))
        if gn < GRAD_TOL:
            return z, True
        step = _pinv_step(ls.hess(z), g)
        norm = float(np.linalg.norm(step))
        if norm > 2.0:
            step *= 2.0 / norm
        z = z - step
    return z, float(np.linalg.norm(ls.grad(z))) < GRAD_TOL


def _classify(ls: _Landscape, z: np.ndarray) -> CriticalPoint:
    H = ls.hess(z)
    w = np.linalg.eigvalsh(H)
    idx = int(np.sum(w < -ZERO_MODE_TOL))
    nz = int(np.sum(np.abs(w) <= ZERO_MODE_TOL))
    n_spins = len(z) // 3 if ls.dim % 3 == 0 else len(z)
    if idx == 0:
        name = ls.label(z)
        label = {"S0": "S0_min", "S1": "S1_min", "other": "other_min"}[name]
    elif idx == ls.dim:
        label = "maximum"
    else:
        label = "saddle"
    return CriticalPoint(z.copy(), float(ls.energy(z)), idx, nz,
                         float(np.linalg.norm(z)) / n_spins, label)


def _dedup(points: list[CriticalPoint], tol: float) -> list[CriticalPoint]:
    kept: list[CriticalPoint] = []
    for p in points:
        if all(np.linalg.norm(p.coordinates - q.coordinates) >= tol for q in kept):
            kept.append(p)
    return kept


def _search(ls: _Landscape, n_starts: int, seed: int, extra_starts, dedup_tol: float):
    rng = make_rng(seed)
    starts = [np.zeros(ls.dim)]
    if extra_starts is not None:
        starts.extend(np.asarray(s, dtype=np.float64).ravel() for s in extra_starts)
    starts.extend(rng.uniform(-1.0, 1.0, ls.dim) for _ in range(n_starts))
    found: list[CriticalPoint] = []
    dropped = 0
    for z0 in starts:
        z, ok = _newton_polish(ls, z0)
        if not ok:
            dropped += 1
            continue
        found.append(_classify(ls, z))
    points = _dedup(sorted(found, key=lambda p: p.energy), dedup_tol)
    return points, dropped


def _collinear_embeddings(cm: CouplingMatrix,
                          scales=(0.3, 0.6, 0.9, 1.2, 1.6, 2.0)) -> list[np.ndarray]:
    """Seed states at the S0/S1 corners and the chiral spin texture of the
    degenerate leading modes, at several amplitudes."""
    n = cm.n
    seeds = []
    for fam in ("S0", "S1"):
        s = reference_states(n, fam).astype(np.float64)
        for c in scales:
            X = np.zeros((n, 3))
            X[:, 2] = c * s
            seeds.append(X)
    q = n // 2 - 1
    ang = 2.0 * np.pi * q * np.arange(n) / n
    for c in (0.6, 1.0):
        X = np.column_stack([c * np.cos(ang), c * np.sin(ang), np.zeros(n)])
        seeds.append(X)
    return seeds


def find_critical_points(cm: CouplingMatrix, gamma: float, P: float, alpha: float = 1.0,
                         n_starts: int = 200, seed: int = 0, extra_starts=None,
                         include_seeded: bool = False, dedup_tol: float = DEDUP_TOL):
    """Locate critical points of the frozen vector landscape by multistart
    Newton iteration.

    Starts are uniform in [-1, 1]^{3n} (plus the origin); include_seeded adds
    deterministic spin-texture embeddings that reliably capture the S0/S1
    minima at modest start counts.  Converged points (gradient norm below
    1e-10) are deduplicated by coordinate distance and classified by Hessian
    spectrum; non-convergent starts are dropped and counted in the second
    return value.
    """
    if n_starts < 0:
        raise ValidationError("n_starts must be >= 0")
    ls = _visa_landscape(cm, gamma, P, alpha)
    extras = list(extra_starts) if extra_starts is not None else []
    if include_seeded:
        extras.extend(_collinear_embeddings(cm))
    return _search(ls, n_starts, seed, extras or None, dedup_tol)


def find_critical_points_cim(cm: CouplingMatrix, p: float, alpha: float = 1.0,
                             n_starts: int = 200, seed: int = 0,
                             include_seeded: bool = False, dedup_tol: float = DEDUP_TOL):
    """Critical points of the scalar pump landscape at frozen p (= gamma)."""
    ls = _cim_landscape(cm, p, alpha)
    extras = None
    if include_seeded:
        n = cm.n
        extras = [c * reference_states(n, fam).astype(np.float64)
                  for fam in ("S0", "S1") for c in (0.3, 0.6, 0.9, 1.2)]
    return _search(ls, n_starts, seed, extras, dedup_tol)


def saddle_path_distance(points: list[CriticalPoint], norm_divisor: int | None = None) -> float:
    """Shortest S1 -> saddle -> S0 path length through an index-1 saddle.

    Distances are Euclidean in the flattened state space, normalized by the
    soft-spin count (the same divisor as CriticalPoint.distance).
    """
    s1s = [p for p in points if p.label == "S1_min"]
    s0s = [p for p in points if p.label == "S0_min"]
    sps = [p for p in points if p.label == "saddle" and p.hessian_index == 1]
    if not s1s or not s0s:
        raise ValidationError("need both an S1 minimum and an S0 minimum")
    if not sps:
        raise ValidationError("no index-1 saddle present")
    if norm_divisor is None:
        dim = len(s0s[0].coordinates)
        norm_divisor = dim // 3 if dim % 3 == 0 else dim
    best = np.inf
    for a in s1s:
        for b in s0s:
            for sp in sps:
                d = (np.linalg.norm(a.coordinates - sp.coordinates)
                     + np.linalg.norm(sp.coordinates - b.coordinates))
                best = min(best, d)
    return float(best) / norm_divisor


@dataclass
class BasinRecord:
    start_index: int
    label: str
    energy: float
    m_mag: float
    x_corr_mag: float


def _basin_stats(X: np.ndarray):
    n = X.shape[0]
    m = X.mean(axis=0)
    dev = X - m
    denom = np.einsum("ip,ip->p", dev, dev)
    shifted = np.roll(dev, -1, axis=0)
    num = np.einsum("ip,ip->p", dev, shifted)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.where(denom > 0.0, num / np.where(denom > 0.0, denom, 1.0), np.nan)
    m_mag = float(np.linalg.norm(m))
    x_mag = float(np.sqrt(np.sum(corr ** 2))) if np.all(np.isfinite(corr)) else float("nan")
    return m_mag, x_mag


def _descend(ls: _Landscape, z0: np.ndarray, max_iter: int = 500):
    """Newton descent with a gradient-step safeguard and backtracking.

    Backtracking keeps the iterate inside the starting basin; once the
    gradient is small the finishing Newton polish takes over (energy
    differences fall below float resolution before the gradient tolerance
    is reached, so a pure line-search loop would stall).
    """
    z = z0.copy()
    e = ls.energy(z)
    for _ in range(max_iter):
        g = ls.grad(z)
        gn = float(np.linalg.norm(g))
        if gn < 1e-5:
            z, ok = _newton_polish(ls, z)
            return z, ok
        d = -_pinv_step(ls.hess(z), g)
        if g @ d > -1e-14:
            d = -g
        dn = float(np.linalg.norm(d))
        if dn > 2.0:
            d *= 2.0 / dn
        t = 1.0
        for _ in range(50):
            zt = z + t * d
            et = ls.energy(zt)
            if et < e:
                z, e = zt, et
                break
            t *= 0.5
        else:
            d = -g
            t = 0.1 / max(1.0, gn)
            for _ in range(60):
                zt = z + t * d
                et = ls.energy(zt)
                if et < e:
                    z, e = zt, et
                    break
                t *= 0.5
            else:
                z, ok = _newton_polish(ls, z)
                return z, ok
    z, ok = _newton_polish(ls, z)
    return z, ok


def basins(cm: CouplingMatrix, gamma: float, P: float, alpha: float = 1.0,
           n_starts: int = 4000, seed: int = 0):
    """Basin-of-attraction survey from uniform starts in [-1, 1]^{3n}.

    Each start descends (safeguarded Newton) to a minimum, which is labelled
    by readout orbit and characterized by the magnetization magnitude |m| and
    the cyclic lag-1 correlation magnitude |X_corr| along each component
    axis.  A component with zero variance leaves |X_corr| as the NaN
    sentinel.  Descents that fail to converge (or end on a saddle) are
    counted and excluded.
    """
    if n_starts < 1:
        raise ValidationError("n_starts must be >= 1")
    ls = _visa_landscape(cm, gamma, P, alpha)
    rng = make_rng(seed)
    n = cm.n
    records: list[BasinRecord] = []
    failures = 0
    for k in range(n_starts):
        z0 = rng.uniform(-1.0, 1.0, ls.dim)
        z, cp = _descend_to_minimum(ls, z0)
        if cp is None:
            failures += 1
            continue
        X = z.reshape(n, 3)
        m_mag, x_mag = _basin_stats(X)
        records.append(BasinRecord(k, cp.label, cp.energy, m_mag, x_mag))
    return records, failures


def _descend_to_minimum(ls: _Landscape, z0: np.ndarray, max_escapes: int = 12):
    """Descend to a genuine minimum; descents that stall on a saddle resume
    along its most negative eigenvector (downhill side)."""
    z = z0.copy()
    for _ in range(max_escapes):
        z, ok = _descend(ls, z)
        if not ok:
            return z, None
        cp = _classify(ls, z)
        if cp.hessian_index == 0:
            return z, cp
        w, V = np.linalg.eigh(ls.hess(z))
        d = V[:, 0]
        e = ls.energy(z)
        step = 1e-3 * max(1.0, float(np.linalg.norm(z)))
        za, zb = z + step * d, z - step * d
        z = za if ls.energy(za) < ls.energy(zb) else zb
        if ls.energy(z) >= e + 1e-12:
            # escape failed to go downhill at this scale; widen once
            z = z + 10 * step * d
    return z, None


@dataclass
class PhaseMap:
    gammas: np.ndarray
    Ps: np.ndarray
    labels: list            # labels[i][j] for (gammas[i], Ps[j])
    energies: dict          # (i, j) -> {label: energy of lowest minimum with that label}
    boundary: list = field(default_factory=list)  # (gamma, P) points where S0/S1 swap


def phase_map(cm: CouplingMatrix, gammas, Ps, alpha: float = 1.0,
              n_starts: int = 16, seed: int = 0) -> PhaseMap:
    """Label each (gamma, P) cell by the lowest-energy minimum of the frozen
    landscape and trace the S0/S1 global-minimum boundary.

    Each cell runs find_critical_points with the deterministic spin-texture
    seeds plus a few uniform starts; the boundary is interpolated wherever
    the winning label flips between S0 and S1 along a grid row or column.
    """
    gammas = np.asarray(gammas, dtype=np.float64)
    Ps = np.asarray(Ps, dtype=np.float64)
    if gammas.size == 0 or Ps.size == 0:
        raise ValidationError("phase_map needs a non-empty grid")
    labels = [[None] * len(Ps) for _ in gammas]
    energies = {}
    for i, g in enumerate(gammas):
        for j, P in enumerate(Ps):
            pts, _ = find_critical_points(cm, g, P, alpha, n_starts=n_starts,
                                          seed=seed, include_seeded=True)
            minima = [p for p in pts if p.is_minimum]
            per_label = {}
            for p in minima:
                key = p.label.replace("_min", "")
                if key not in per_label or p.energy < per_label[key]:
                    per_label[key] = p.energy
            energies[(i, j)] = per_label
            labels[i][j] = (min(per_label, key=per_label.get) if per_label else "none")
    boundary = []

    def cross(ij_a, ij_b, x_a, x_b, axis):
        ea, eb = energies[ij_a], energies[ij_b]
        if "S0" in ea and "S1" in ea and "S0" in eb and "S1" in eb:
            da = ea["S0"] - ea["S1"]
            db = eb["S0"] - eb["S1"]
            if da == db:
                t = 0.5
            else:
                t = float(np.clip(da / (da - db), 0.0, 1.0))
        else:
            t = 0.5
        return x_a + t * (x_b - x_a)

    for i in range(len(gammas)):
        for j in range(len(Ps)):
            a = labels[i][j]
            if i + 1 < len(gammas):
                b = labels[i + 1][j]
                if {a, b} == {"S0", "S1"}:
                    boundary.append((cross((i, j), (i + 1, j), gammas[i], gammas[i + 1], 0),
                                     float(Ps[j])))
            if j + 1 < len(Ps):
                b = labels[i][j + 1]
                if {a, b} == {"S0", "S1"}:
                    boundary.append((float(gammas[i]),
                                     cross((i, j), (i, j + 1), Ps[j], Ps[j + 1], 1)))
    return PhaseMap(gammas, Ps, labels, energies, boundary)
