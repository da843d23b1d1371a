"""Noiseless single-objective benchmark suite.

Twenty-four continuous test functions in five landscape groups (separable,
low/moderate conditioning, high conditioning unimodal, multimodal with strong
global structure, multimodal with weak global structure). Every function has
optimum value 0. Instances are seeded shift+rotation transformations; the
separable group is shifted only, so it stays separable. Instance 0 is always
the untransformed function, which gives analytic anchors for tests.

Search domain is [-5, 5]^d, but evaluation is defined on all of R^d and every
function is nonnegative everywhere, so precision == raw value.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

BOUNDS = (-5.0, 5.0)

GROUP_NAMES = (
    "separable",
    "low_moderate_conditioning",
    "high_conditioning_unimodal",
    "multimodal_strong_structure",
    "multimodal_weak_structure",
)

FUNCTION_NAMES = {
    1: "sphere",
    2: "separable_ellipsoid",
    3: "separable_rastrigin",
    4: "bueche_rastrigin",
    5: "linear_slope",
    6: "attractive_sector",
    7: "step_ellipsoid",
    8: "rosenbrock",
    9: "rosenbrock_rotated",
    10: "ellipsoid",
    11: "discus",
    12: "bent_cigar",
    13: "sharp_ridge",
    14: "different_powers",
    15: "rastrigin",
    16: "weierstrass",
    17: "schaffer_f7",
    18: "schaffer_f7_ill_conditioned",
    19: "griewank_rosenbrock",
    20: "schwefel",
    21: "gallagher_101_peaks",
    22: "gallagher_21_peaks",
    23: "katsuura",
    24: "lunacek_bi_rastrigin",
}

FUNCTION_IDS = tuple(sorted(FUNCTION_NAMES))


class DomainError(ValueError):
    """Bad argument outside a contract (unknown fid, wrong shape, NaN input)."""


class BudgetExhausted(RuntimeError):
    """Raised on an evaluation attempt past the budget; normal termination."""


def group_of(fid: int) -> int:
    """Landscape group (1..5) of a function id."""
    _check_fid(fid)
    if fid <= 5:
        return 1
    if fid <= 9:
        return 2
    if fid <= 14:
        return 3
    if fid <= 19:
        return 4
    return 5


def group_name(fid: int) -> str:
    return GROUP_NAMES[group_of(fid) - 1]


def _check_fid(fid: int) -> None:
    if fid not in FUNCTION_NAMES:
        raise DomainError(f"unknown function id {fid!r}; expected 1..24")


# ---------------------------------------------------------------------------
# base functions, all defined on the transformed variable z with optimum z = 0
# (except f5, whose optimum sits past the +5 box edge by design)
# ---------------------------------------------------------------------------


def _scale(alpha: float, d: int) -> np.ndarray:
    """Diagonal conditioning profile 10^(alpha * i/(d-1)), i = 0..d-1."""
    if d == 1:
        return np.ones(1)
    return 10.0 ** (alpha * np.arange(d) / (d - 1))


def _rastrigin(w: np.ndarray) -> float:
    return float(10.0 * (w.size - np.sum(np.cos(2.0 * np.pi * w))) + np.sum(w * w))


def _f1(z, c):
    return float(np.sum(z * z))


def _f2(z, c):
    return float(np.sum(_scale(6.0, z.size) * z * z))


def _f3(z, c):
    return _rastrigin(z)


def _f4(z, c):
    s = _scale(0.5, z.size).copy()
    odd = np.arange(z.size) % 2 == 0  # odd positions, 1-based
    s[odd & (z > 0)] *= 10.0
    return _rastrigin(s * z)


def _f5(z, c):
    s = _scale(1.0, z.size)
    return float(np.sum(s * (5.0 - np.minimum(z, 5.0))))


def _f6(z, c):
    s = np.where(z > 0, 100.0, 1.0)
    return float(np.sum((s * z) ** 2) ** 0.9)


def _f7(z, c):
    zt = np.where(np.abs(z) > 0.5, np.floor(0.5 + z), np.floor(0.5 + 10.0 * z) / 10.0)
    quad = np.sum(_scale(2.0, z.size) * zt * zt)
    return float(0.1 * max(np.abs(z[0]) / 1e4, quad))


def _rosen(w: np.ndarray) -> float:
    if w.size == 1:
        return float((w[0] - 1.0) ** 2)
    return float(np.sum(100.0 * (w[:-1] ** 2 - w[1:]) ** 2 + (w[:-1] - 1.0) ** 2))


def _f8(z, c):
    return _rosen(z + 1.0)


def _f9(z, c):
    return _rosen(c["rotation"] @ z + 1.0)


def _f10(z, c):
    return float(np.sum(_scale(6.0, z.size) * z * z))


def _f11(z, c):
    return float(1e6 * z[0] * z[0] + np.sum(z[1:] * z[1:]))


def _f12(z, c):
    return float(z[0] * z[0] + 1e6 * np.sum(z[1:] * z[1:]))


def _f13(z, c):
    return float(z[0] * z[0] + 100.0 * np.sqrt(np.sum(z[1:] * z[1:])))


def _f14(z, c):
    expo = 2.0 + (4.0 * np.arange(z.size) / max(z.size - 1, 1))
    return float(np.sqrt(np.sum(np.abs(z) ** expo)))


def _f15(z, c):
    return _rastrigin(_scale(0.5, z.size) * z)


_WEIER_A = 0.5 ** np.arange(12)
_WEIER_B = 3.0 ** np.arange(12)
_WEIER_C = float(np.sum(_WEIER_A))


def _f16(z, c):
    inner = np.cos(2.0 * np.pi * np.outer(z + 0.5, _WEIER_B)) @ _WEIER_A
    return float(np.sum(inner) + z.size * _WEIER_C)


def _schaffer(w: np.ndarray) -> float:
    if w.size == 1:
        return float(w[0] * w[0])
    s = np.sqrt(w[:-1] ** 2 + w[1:] ** 2)
    v = np.mean(np.sqrt(s) * (1.0 + np.sin(50.0 * s**0.2) ** 2))
    return float(v * v)


def _f17(z, c):
    return _schaffer(z)


def _f18(z, c):
    return _schaffer(_scale(1.5, z.size) * z)


def _f19(z, c):
    if z.size == 1:
        return float(z[0] * z[0])
    w = z + 1.0
    r = 100.0 * (w[:-1] ** 2 - w[1:]) ** 2 + (w[:-1] - 1.0) ** 2
    return float(10.0 / (z.size - 1) * np.sum(r / 4000.0 - np.cos(r)) + 10.0)


_SCHWEFEL_PEAK = 420.9687462275036
_SCHWEFEL_BEST = _SCHWEFEL_PEAK * np.sin(np.sqrt(_SCHWEFEL_PEAK))


def _f20(z, c):
    u = 100.0 * z + _SCHWEFEL_PEAK
    pen = np.maximum(np.abs(u) - 500.0, 0.0) ** 2
    h = u * np.sin(np.sqrt(np.abs(u))) - pen
    return float(z.size * _SCHWEFEL_BEST - np.sum(h))


def _gallagher(z: np.ndarray, c: dict) -> float:
    diff = z[None, :] - c["centers"]
    q = c["weights"] * np.exp(-0.5 / z.size * np.sum(c["scales"] * diff * diff, axis=1))
    return float(10.0 - np.max(q))


_f21 = _gallagher
_f22 = _gallagher

_KATSUURA_POW = 2.0 ** np.arange(1, 33)


def _f23(z, c):
    d = z.size
    g = np.outer(z, _KATSUURA_POW)
    term = np.sum(np.abs(g - np.round(g)) / _KATSUURA_POW, axis=1)
    factors = (1.0 + (np.arange(d) + 1.0) * term) ** (10.0 / d**1.2)
    return float(10.0 / d**2 * (np.prod(factors) - 1.0))


def _f24(z, c):
    d = z.size
    mu0 = 2.5
    s = max(1.0 - 1.0 / (2.0 * np.sqrt(d + 20.0) - 8.2), 0.1)
    mu1 = -np.sqrt((mu0 * mu0 - 1.0) / s)
    a = np.sum(z * z)
    b = d + s * np.sum((z + mu0 - mu1) ** 2)
    return float(min(a, b) + 10.0 * (d - np.sum(np.cos(2.0 * np.pi * z))))


_BASE = {
    1: _f1, 2: _f2, 3: _f3, 4: _f4, 5: _f5, 6: _f6, 7: _f7, 8: _f8,
    9: _f9, 10: _f10, 11: _f11, 12: _f12, 13: _f13, 14: _f14, 15: _f15,
    16: _f16, 17: _f17, 18: _f18, 19: _f19, 20: _f20, 21: _f21, 22: _f22,
    23: _f23, 24: _f24,
}


# ---------------------------------------------------------------------------
# instance construction
# ---------------------------------------------------------------------------


def _orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


@functools.lru_cache(maxsize=None)
def _internals(fid: int, d: int) -> dict:
    """Per-function fixed constants, independent of instance seeding."""
    rng = np.random.default_rng(np.random.SeedSequence([0xB0B, fid, d]))
    if fid == 9:
        return {"rotation": _orthogonal(rng, d)}
    if fid in (21, 22):
        n = 101 if fid == 21 else 21
        centers = rng.uniform(-4.8, 4.8, size=(n, d))
        centers[0] = 0.0
        weights = np.empty(n)
        weights[0] = 10.0
        weights[1:] = np.linspace(1.1, 9.1, n - 1)[::-1]
        spread = 1.0 if fid == 21 else 1.5
        scales = 10.0 ** rng.uniform(-spread, spread, size=(n, d))
        return {"centers": centers, "weights": weights, "scales": scales}
    return {}


@dataclass(frozen=True)
class ProblemInstance:
    """One seeded transformation of a base function; immutable and shareable."""

    fid: int
    iid: int
    dimension: int
    shift: np.ndarray
    rotation: np.ndarray
    f_opt: float = 0.0
    rotated: bool = False

    @property
    def name(self) -> str:
        return FUNCTION_NAMES[self.fid]

    @property
    def group(self) -> int:
        return group_of(self.fid)


def make_instance(fid: int, iid: int, d: int, master_seed: int = 0) -> ProblemInstance:
    """Build instance `iid` of function `fid` in dimension `d`.

    Instance 0 is the raw function (zero shift, identity rotation). Higher
    instances draw a uniform shift in [-4, 4]^d and, outside the separable
    group, an orthogonal rotation from a QR factorization of a seeded
    Gaussian matrix. Same (fid, iid, d, master_seed) is bit-reproducible.
    """
    _check_fid(fid)
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    if iid < 0:
        raise DomainError(f"instance index must be >= 0, got {iid}")
    if iid == 0:
        shift = np.zeros(d)
        rotation = np.eye(d)
        rotated = False
    else:
        rng = np.random.default_rng(np.random.SeedSequence([master_seed, fid, iid, d]))
        shift = rng.uniform(-4.0, 4.0, d)
        if group_of(fid) == 1:
            rotation = np.eye(d)
            rotated = False
        else:
            rotation = _orthogonal(rng, d)
            rotated = True
    shift.setflags(write=False)
    rotation.setflags(write=False)
    return ProblemInstance(fid, iid, d, shift, rotation, 0.0, rotated)


def optimum_point(instance: ProblemInstance) -> np.ndarray:
    """Location of the constructed optimum (the shift), where one exists in-box."""
    return instance.shift.copy()


def evaluate(instance: ProblemInstance, x) -> float:
    """Raw objective value at x. Precision is value - f_opt, and f_opt is 0."""
    x = np.asarray(x, dtype=float)
    if x.shape != (instance.dimension,):
        raise DomainError(
            f"point has shape {x.shape}, expected ({instance.dimension},)"
        )
    if not np.all(np.isfinite(x)):
        raise DomainError("point has non-finite components")
    z = x - instance.shift
    if instance.rotated:
        z = instance.rotation @ z
    return _BASE[instance.fid](z, _internals(instance.fid, instance.dimension))


# ---------------------------------------------------------------------------
# budget enforcement
# ---------------------------------------------------------------------------


@dataclass
class BudgetedEvaluator:
    """Counts evaluations against a budget and tracks the best-so-far precision.

    Single-owner mutable state: one evaluator per run. The trace holds the
    best precision after each evaluation, so it is non-increasing and never
    longer than the budget.
    """

    instance: ProblemInstance
    budget: int
    used: int = 0
    best_precision: float = np.inf
    best_precision_trace: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.budget <= 0:
            raise DomainError(f"budget must be positive, got {self.budget}")

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    def spend(self, x) -> float:
        if self.used >= self.budget:
            raise BudgetExhausted(f"budget of {self.budget} evaluations used up")
        value = evaluate(self.instance, x)
        self.used += 1
        precision = value - self.instance.f_opt
        if precision < self.best_precision:
            self.best_precision = precision
        self.best_precision_trace.append(self.best_precision)
        return value

    __call__ = spend


def spend(evaluator: BudgetedEvaluator, x) -> float:
    return evaluator.spend(x)
