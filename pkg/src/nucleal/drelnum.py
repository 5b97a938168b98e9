"""Grid-sampled smooth kernels on real intervals with quadrature composition.

Morphisms are two-variable kernels sampled on uniform grids; composition
integrates out the middle variable with composite Simpson weights, and
the trace integrates the diagonal.  The category has no unit object, no
identities, and no tensor here: every representable morphism is already
in the distinguished ideal, and the Dirac identity is demonstrably not
representable on a grid.  The instance adapters declare those gaps so
the generic harness runs only the laws that make sense.

Pairing, associativity, and trace symmetry are exact reassociations of
one discrete triple sum, so they hold to rounding error at any
resolution; the genuinely approximate statements (refinement
convergence, the Dirac obstruction) get their own checks on a pinned
Gaussian fixture family.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from nucleal.core import scalars
from nucleal.core.errors import (
    InvariantViolation,
    ParseError,
    ShapeMismatch,
    TraceClassError,
    UnsupportedCheck,
)
from nucleal.core.instance import (
    CategoryInstance,
    NuclearStructure,
    TraceStructure,
)
from nucleal.core.report import AxiomReport

DEFAULT_TOL = 1e-6
FIXTURE_N = 201
BOUNDARY_WARN = 1e-6


class SupportWarning(UserWarning):
    """Samples are not negligible at the interval boundary."""


@dataclass(frozen=True)
class Interval:
    """Uniform grid on a real interval; node count odd for Simpson weights."""

    lower: float
    upper: float
    n: int

    def __post_init__(self):
        if not self.lower < self.upper:
            raise InvariantViolation("interval endpoints out of order")
        if self.n < 3 or self.n % 2 == 0:
            raise InvariantViolation("node count must be odd and at least 3")

    @property
    def step(self) -> float:
        return (self.upper - self.lower) / (self.n - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.lower, self.upper, self.n)

    def weights(self) -> np.ndarray:
        w = np.ones(self.n)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return w * (self.step / 3.0)

    def refined(self) -> "Interval":
        """Same interval with halved spacing; shares every original node."""
        return Interval(self.lower, self.upper, 2 * self.n - 1)

    def __repr__(self):
        return f"[{self.lower:g},{self.upper:g}]@{self.n}"


def quad(values, interval: Interval) -> float:
    """Composite Simpson approximation of the integral over the interval."""
    v = np.asarray(values, dtype=float)
    if v.shape != (interval.n,):
        raise ShapeMismatch(f"expected {interval.n} samples, got {v.shape}")
    return float(interval.weights() @ v)


def _boundary_defect(samples: np.ndarray) -> float:
    peak = float(np.max(np.abs(samples)))
    if peak == 0.0:
        return 0.0
    if samples.ndim == 1:
        edge = max(abs(float(samples[0])), abs(float(samples[-1])))
    else:
        edge = max(
            float(np.max(np.abs(samples[0]))),
            float(np.max(np.abs(samples[-1]))),
            float(np.max(np.abs(samples[:, 0]))),
            float(np.max(np.abs(samples[:, -1]))),
        )
    return edge / peak


@dataclass(frozen=True, eq=False)
class GridKernel:
    """Two-variable kernel sampled at source x target grid nodes."""

    source: Interval
    target: Interval
    samples: np.ndarray

    def __repr__(self):
        peak = float(np.max(np.abs(self.samples))) if self.samples.size else 0.0
        return f"GridKernel({self.source!r}->{self.target!r}, peak={peak:.3g})"


@dataclass(frozen=True, eq=False)
class TestFn:
    """Smooth compactly supported function sampled on one grid."""

    domain: Interval
    samples: np.ndarray

    def __repr__(self):
        peak = float(np.max(np.abs(self.samples))) if self.samples.size else 0.0
        return f"TestFn({self.domain!r}, peak={peak:.3g})"


def grid_kernel(source: Interval, target: Interval, samples) -> GridKernel:
    s = np.asarray(samples, dtype=float)
    if s.shape != (source.n, target.n):
        raise ShapeMismatch(
            f"kernel shape {s.shape} does not match grids "
            f"({source.n}, {target.n})"
        )
    if not np.all(np.isfinite(s)):
        raise InvariantViolation("kernel samples must be finite")
    if _boundary_defect(s) > BOUNDARY_WARN:
        warnings.warn(
            "kernel is not negligible at the boundary; compact support "
            "is assumed by every integral identity",
            SupportWarning,
            stacklevel=2,
        )
    s.setflags(write=False)
    return GridKernel(source, target, s)


def test_fn(domain: Interval, samples) -> TestFn:
    s = np.asarray(samples, dtype=float)
    if s.shape != (domain.n,):
        raise ShapeMismatch(f"expected {domain.n} samples, got {s.shape}")
    if not np.all(np.isfinite(s)):
        raise InvariantViolation("samples must be finite")
    if _boundary_defect(s) > BOUNDARY_WARN:
        warnings.warn(
            "test function is not negligible at the boundary",
            SupportWarning,
            stacklevel=2,
        )
    s.setflags(write=False)
    return TestFn(domain, s)


def zero_kernel(source: Interval, target: Interval) -> GridKernel:
    return grid_kernel(source, target, np.zeros((source.n, target.n)))


def apply_left(k: GridKernel, phi: TestFn) -> TestFn:
    """Integrate the kernel against a function of its source variable."""
    if phi.domain != k.source:
        raise ShapeMismatch("function lives on the wrong grid")
    out = (k.source.weights() * phi.samples) @ k.samples
    return TestFn(k.target, out)


def apply_right(k: GridKernel, psi: TestFn) -> TestFn:
    """Integrate the kernel against a function of its target variable."""
    if psi.domain != k.target:
        raise ShapeMismatch("function lives on the wrong grid")
    out = k.samples @ (k.target.weights() * psi.samples)
    return TestFn(k.source, out)


def pair_with(k: GridKernel, phi: TestFn, psi: TestFn) -> float:
    """Evaluate the kernel on a product of test functions."""
    return quad(apply_left(k, phi).samples * psi.samples, k.target)


def compose(f: GridKernel, g: GridKernel) -> GridKernel:
    """Integrate out the middle variable: first f, then g."""
    if f.target != g.source:
        raise ShapeMismatch(
            f"middle grids differ: {f.target!r} vs {g.source!r}"
        )
    mid_w = f.target.weights()
    alpha = f.samples @ (mid_w[:, None] * g.samples)
    return GridKernel(f.source, g.target, alpha)


def star(k: GridKernel) -> GridKernel:
    """Swap the two variables; kernels are real, so no conjugation."""
    return GridKernel(k.target, k.source, k.samples.T)


def scale(k: GridKernel, c: float) -> GridKernel:
    return GridKernel(k.source, k.target, c * k.samples)


def add(k1: GridKernel, k2: GridKernel) -> GridKernel:
    if k1.source != k2.source or k1.target != k2.target:
        raise ShapeMismatch("kernels live on different grids")
    return GridKernel(k1.source, k1.target, k1.samples + k2.samples)


def kernel_distance(k1: GridKernel, k2: GridKernel) -> float:
    if k1.source != k2.source or k1.target != k2.target:
        raise ShapeMismatch("kernels live on different grids")
    return float(np.max(np.abs(k1.samples - k2.samples)))


def trace(h: GridKernel) -> float:
    """Integral of the diagonal; needs equal source and target grids."""
    if h.source != h.target:
        raise ShapeMismatch("trace needs an endomorphism on one grid")
    return quad(np.diagonal(h.samples).copy(), h.source)


# -- smooth fixtures --------------------------------------------------------


def bump_window(interval: Interval) -> np.ndarray:
    """Smooth window equal to 1 at the midpoint and exactly 0 at the ends."""
    t = (2.0 * interval.nodes() - (interval.lower + interval.upper)) / (
        interval.upper - interval.lower
    )
    w = np.zeros(interval.n)
    inside = np.abs(t) < 1.0
    w[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return w


def gaussian_kernel(
    source: Interval,
    target: Interval,
    x0: float,
    y0: float,
    width: float,
    amp: float = 1.0,
) -> GridKernel:
    """Windowed Gaussian bump centered at (x0, y0)."""
    xs = source.nodes()[:, None]
    ys = target.nodes()[None, :]
    g = amp * np.exp(-(((xs - x0) ** 2) + ((ys - y0) ** 2)) / width**2)
    g = g * bump_window(source)[:, None] * bump_window(target)[None, :]
    return grid_kernel(source, target, g)


def gaussian_test_fn(
    domain: Interval, x0: float, width: float, amp: float = 1.0
) -> TestFn:
    xs = domain.nodes()
    g = amp * np.exp(-((xs - x0) ** 2) / width**2) * bump_window(domain)
    return test_fn(domain, g)


# Pinned fixture family on [-1, 1]: centers, widths, amplitudes.
FIXTURE_KERNEL_PARAMS = (
    (-0.3, 0.2, 0.35, 1.0),
    (0.25, -0.1, 0.3, 0.8),
    (0.0, 0.0, 0.45, -0.6),
    (0.4, 0.35, 0.25, 1.2),
)
FIXTURE_TESTFN_PARAMS = (
    (-0.2, 0.3, 1.0),
    (0.3, 0.25, -0.7),
    (0.0, 0.4, 0.9),
)


def fixture_interval(n: int = FIXTURE_N) -> Interval:
    return Interval(-1.0, 1.0, n)


def fixture_kernels(n: int = FIXTURE_N, params=None) -> list[GridKernel]:
    box = fixture_interval(n)
    return [
        gaussian_kernel(box, box, x0, y0, w, a)
        for x0, y0, w, a in (FIXTURE_KERNEL_PARAMS if params is None else params)
    ]


def fixture_test_fns(n: int = FIXTURE_N, params=None) -> list[TestFn]:
    box = fixture_interval(n)
    return [
        gaussian_test_fn(box, x0, w, a)
        for x0, w, a in (FIXTURE_TESTFN_PARAMS if params is None else params)
    ]


# -- fixture-family checks --------------------------------------------------


def check_pairing(n: int = FIXTURE_N, tol: float = DEFAULT_TOL,
                  kparams=None, fparams=None) -> AxiomReport:
    """Composite kernels pair with products the way iterated integrals do."""
    t0 = time.perf_counter()
    rep = AxiomReport("drel-pairing", 0)
    box = fixture_interval(n)
    kers = fixture_kernels(n, kparams)
    fns = fixture_test_fns(n, fparams)
    for f in kers:
        for g in kers:
            for phi in fns:
                for psi in fns:
                    rep.cases += 1
                    iterated = quad(
                        apply_left(f, phi).samples * apply_right(g, psi).samples,
                        box,
                    )
                    direct = pair_with(compose(f, g), phi, psi)
                    if abs(iterated - direct) > tol:
                        rep.add_failure(
                            f"pairing gap {abs(iterated - direct):.3g} for "
                            f"{f!r};{g!r}"
                        )
    for f in kers:
        for phi in fns:
            for psi in fns:
                rep.cases += 1
                lhs = quad(apply_left(f, phi).samples * psi.samples, box)
                rhs = quad(phi.samples * apply_right(f, psi).samples, box)
                if abs(lhs - rhs) > tol:
                    rep.add_failure(
                        f"left/right application disagree by {abs(lhs - rhs):.3g}"
                    )
    rep.elapsed = time.perf_counter() - t0
    return rep


def check_associativity(n: int = FIXTURE_N, tol: float = DEFAULT_TOL,
                        kparams=None) -> AxiomReport:
    t0 = time.perf_counter()
    rep = AxiomReport("drel-associativity", 0)
    kers = fixture_kernels(n, kparams)
    for f in kers:
        for g in kers:
            for h in kers:
                rep.cases += 1
                d = kernel_distance(
                    compose(compose(f, g), h), compose(f, compose(g, h))
                )
                if d > tol:
                    rep.add_failure(f"associativity gap {d:.3g}")
    rep.elapsed = time.perf_counter() - t0
    return rep


def check_trace_symmetry(n: int = FIXTURE_N, tol: float = DEFAULT_TOL,
                         kparams=None) -> AxiomReport:
    t0 = time.perf_counter()
    rep = AxiomReport("drel-trace-symmetry", 0)
    kers = fixture_kernels(n, kparams)
    for f in kers:
        for g in kers:
            rep.cases += 1
            d = abs(trace(compose(f, g)) - trace(compose(g, f)))
            if d > tol:
                rep.add_failure(f"trace asymmetry {d:.3g} for {f!r},{g!r}")
    rep.elapsed = time.perf_counter() - t0
    return rep


def check_refinement(n: int = FIXTURE_N, tol: float = DEFAULT_TOL,
                     kparams=None, fparams=None) -> AxiomReport:
    """Halving the grid spacing moves composites and traces below tolerance."""
    t0 = time.perf_counter()
    rep = AxiomReport("drel-refinement", 0)
    coarse = fixture_kernels(n, kparams)
    fine = fixture_kernels(2 * n - 1, kparams)
    for fc, ff in zip(fixture_test_fns(n, fparams), fixture_test_fns(2 * n - 1, fparams)):
        rep.cases += 1
        d = abs(quad(fc.samples, fc.domain) - quad(ff.samples, ff.domain))
        if d > tol:
            rep.add_failure(f"test-function integral moved by {d:.3g}")
    for kc1, kf1 in zip(coarse, fine):
        for kc2, kf2 in zip(coarse, fine):
            rep.cases += 1
            ac = compose(kc1, kc2).samples
            af = compose(kf1, kf2).samples[::2, ::2]
            d = float(np.max(np.abs(ac - af)))
            if d > tol:
                rep.add_failure(f"composite moved by {d:.3g} under refinement")
            rep.cases += 1
            dt = abs(trace(compose(kc1, kc2)) - trace(compose(kf1, kf2)))
            if dt > tol:
                rep.add_failure(f"trace moved by {dt:.3g} under refinement")
    rep.elapsed = time.perf_counter() - t0
    return rep


DIRAC_FLOOR = 1e-2


def check_dirac_obstruction(n: int = FIXTURE_N, kparams=None) -> AxiomReport:
    """No windowed Gaussian ridge acts as the identity on the fixtures.

    Sweeps diagonal-ridge candidates over widths from two grid steps up
    to a quarter interval, each with its least-squares optimal
    amplitude, and requires the best relative error to stay above a
    fixed floor.  The identity would need a delta ridge, which no grid
    function supplies.
    """
    t0 = time.perf_counter()
    rep = AxiomReport("drel-dirac-obstruction", 0)
    box = fixture_interval(n)
    kers = fixture_kernels(n, kparams)
    xs = box.nodes()
    window = bump_window(box)
    best = math.inf
    widths = np.geomspace(2 * box.step, (box.upper - box.lower) / 4, 12)
    for s in widths:
        rep.cases += 1
        ridge = np.exp(-((xs[:, None] - xs[None, :]) ** 2) / s**2)
        ridge = ridge * window[:, None] * window[None, :]
        cand = GridKernel(box, box, ridge)
        num = 0.0
        den = 0.0
        images = []
        for f in kers:
            u = compose(cand, f).samples
            images.append(u)
            num += float(np.sum(u * f.samples))
            den += float(np.sum(u * u))
        amp = num / den if den > 0 else 0.0
        defect = max(
            float(np.max(np.abs(amp * u - f.samples)))
            / float(np.max(np.abs(f.samples)))
            for u, f in zip(images, kers)
        )
        best = min(best, defect)
    if best < DIRAC_FLOOR:
        rep.add_failure(
            f"a ridge candidate imitates the identity to {best:.3g}; "
            f"expected at least {DIRAC_FLOOR:g}"
        )
    else:
        rep.flags.append(f"best-candidate-defect:{best:.3g}")
    rep.elapsed = time.perf_counter() - t0
    return rep


def fixture_reports(n: int = FIXTURE_N, tol: float = DEFAULT_TOL,
                    kparams=None, fparams=None) -> list[AxiomReport]:
    return [
        check_pairing(n, tol, kparams, fparams),
        check_associativity(n, tol, kparams),
        check_trace_symmetry(n, tol, kparams),
        check_refinement(n, tol, kparams, fparams),
        check_dirac_obstruction(n, kparams),
    ]


# -- serialization ----------------------------------------------------------


def interval_to_json(i: Interval) -> dict:
    return {"lo": i.lower, "hi": i.upper, "n": i.n}


def interval_from_json(data) -> Interval:
    if not isinstance(data, dict) or not {"lo", "hi", "n"} <= set(data):
        raise ParseError("interval document needs lo, hi, n")
    try:
        return Interval(float(data["lo"]), float(data["hi"]), int(data["n"]))
    except (InvariantViolation, TypeError, ValueError) as exc:
        raise ParseError(f"invalid interval: {exc}") from exc


def to_json(k: GridKernel) -> dict:
    return {
        "source": interval_to_json(k.source),
        "target": interval_to_json(k.target),
        "samples": [[float(v) for v in row] for row in k.samples],
    }


def from_json(data) -> GridKernel:
    if not isinstance(data, dict) or "samples" not in data:
        raise ParseError("kernel document needs samples and grid data")
    if "interval" in data:
        src = tgt = interval_from_json(data["interval"])
    elif "source" in data and "target" in data:
        src = interval_from_json(data["source"])
        tgt = interval_from_json(data["target"])
    else:
        raise ParseError("kernel document needs interval, or source and target")
    try:
        return grid_kernel(src, tgt, data["samples"])
    except (InvariantViolation, ShapeMismatch, TypeError, ValueError) as exc:
        raise ParseError(f"invalid kernel: {exc}") from exc


# -- instance adapters ------------------------------------------------------


class DRelInstance(CategoryInstance):
    """Kernel category without unit, identities, or tensor; real scalars."""

    name = "drelnum"
    scalar_kind = scalars.REAL
    has_tensor = False
    has_unit = False
    has_identity = False
    tol = DEFAULT_TOL

    def __init__(self, sample_n: int = 61):
        if sample_n < 3 or sample_n % 2 == 0:
            raise InvariantViolation("sampling grid size must be odd, at least 3")
        self._pool = [
            Interval(-1.0, 1.0, sample_n),
            Interval(0.0, 2.0, sample_n),
            Interval(-2.0, 1.0, sample_n),
        ]

    def source(self, f):
        return f.source

    def target(self, f):
        return f.target

    def compose(self, g, f):
        return compose(f, g)

    def identity(self, a):
        raise UnsupportedCheck("identity is too singular for a grid kernel")

    def star(self, f):
        return star(f)

    def tensor(self, f, g):
        raise UnsupportedCheck("products of intervals are out of scope")

    def tensor_obj(self, a, b):
        raise UnsupportedCheck("products of intervals are out of scope")

    def unit(self):
        raise UnsupportedCheck("no unit object on grids")

    def reindex(self, a, b, index_map):
        raise UnsupportedCheck("no structural regroupings without a tensor")

    def scalar_of(self, s):
        raise UnsupportedCheck("no unit object on grids")

    def scalar_eq(self, x, y, tol: Optional[float] = None) -> bool:
        return abs(x - y) <= (self.tol if tol is None else tol)

    def mor_eq(self, f, g, tol: Optional[float] = None) -> bool:
        if f.source != g.source or f.target != g.target:
            return False
        return kernel_distance(f, g) <= (self.tol if tol is None else tol)

    def obj_size(self, a) -> int:
        return a.n

    def describe_obj(self, a) -> str:
        return repr(a)

    def describe(self, f) -> str:
        return repr(f)

    def sample_object(self, rng):
        return rng.choice(self._pool)

    def sample_hom(self, rng, a, b):
        total = np.zeros((a.n, b.n))
        for _ in range(1 + rng.below(2)):
            x0 = a.lower + (0.1 + 0.8 * rng.unit()) * (a.upper - a.lower)
            y0 = b.lower + (0.1 + 0.8 * rng.unit()) * (b.upper - b.lower)
            w = (0.15 + 0.25 * rng.unit()) * min(
                a.upper - a.lower, b.upper - b.lower
            )
            amp = rng.uniform(-1.5, 1.5)
            total = total + gaussian_kernel(a, b, x0, y0, w, amp).samples
        return GridKernel(a, b, total)


class DRelNuclear(NuclearStructure):
    """Every grid kernel is distinguished; the pairing is computed directly."""

    has_theta = False

    def is_nuclear(self, f) -> bool:
        return True

    def theta(self, f):
        raise UnsupportedCheck("no unit object to transpose into")

    def theta_inv(self, m, a, b):
        raise UnsupportedCheck("no unit object to transpose into")

    def derived_trace(self, f, g):
        return trace(compose(f, g))

    def sample_nuclear(self, rng, a, b):
        return self.inst.sample_hom(rng, a, b)


class DRelTrace(TraceStructure):
    def in_trace_class(self, h) -> bool:
        return h.source == h.target

    def trace(self, h):
        if h.source != h.target:
            raise TraceClassError("only endomorphisms carry a trace")
        return trace(h)

    def sample_member(self, rng, a):
        return self.inst.sample_hom(rng, a, a)

    def sample_dinat_pair(self, rng, a, b):
        return self.inst.sample_hom(rng, a, b), self.inst.sample_hom(rng, b, a)

    def sample_equal_factorizations(self, rng):
        a = self.inst.sample_object(rng)
        b = self.inst.sample_object(rng)
        f = self.inst.sample_hom(rng, a, b)
        g = self.inst.sample_hom(rng, b, a)
        c = 0.5 + rng.unit()
        return (f, g), (scale(f, c), scale(g, 1.0 / c))


def instance(sample_n: int = 61) -> DRelInstance:
    return DRelInstance(sample_n)


def structures(sample_n: int = 61):
    inst = instance(sample_n)
    nuc = DRelNuclear(inst)
    return inst, nuc, DRelTrace(inst, nuc)
