"""Contracts every model family implements for the law harness.

A `CategoryInstance` packages one model family's objects and morphisms
as opaque values plus the operations the harness composes: composition,
identities, tensor, symmetry, star, conjugation, and a `reindex`
primitive that builds the structural isomorphism induced by a bijection
of element slots.  Element slots of a tensor product are always ordered
row-major (index of the pair (i, j) in A (x) B is i * size(B) + j), so
the harness can compute every permutation it needs purely from factor
sizes and hand it to `reindex`.

Capability flags (`has_tensor`, `has_unit`, `has_identity`) let partial
models participate: the quadrature-kernel family has none of the three,
and every check skips the laws it cannot state there, flagging the skip
in its report.

`NuclearStructure` adds the distinguished class of morphisms that admit
a transpose to a state (a morphism out of the unit), and
`TraceStructure` adds the induced trace operator, optionally in a
parametrized form.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from nucleal.core import scalars
from nucleal.core.errors import UnsupportedCheck
from nucleal.core.rng import Lcg


class CategoryInstance:
    """Operation bundle for one model family.

    Subclasses override the raising methods they support and set the
    capability flags to match.  `compose(g, f)` means "f then g".
    """

    name: str = "abstract"
    scalar_kind: str = scalars.BOOL
    tol: float = 0.0
    has_tensor: bool = True
    has_unit: bool = True
    has_identity: bool = True

    # -- morphism structure -------------------------------------------------

    def source(self, f):
        raise NotImplementedError

    def target(self, f):
        raise NotImplementedError

    def compose(self, g, f):
        raise NotImplementedError

    def identity(self, a):
        raise UnsupportedCheck(f"{self.name}: no identities")

    def star(self, f):
        raise NotImplementedError

    def conj(self, f):
        # Identity conjugation is the common case; matrix models override.
        return f

    def conj_obj(self, a):
        return a

    def tensor(self, f, g):
        raise UnsupportedCheck(f"{self.name}: no tensor")

    def tensor_obj(self, a, b):
        raise UnsupportedCheck(f"{self.name}: no tensor")

    def unit(self):
        raise UnsupportedCheck(f"{self.name}: no unit object")

    def iota(self):
        """Unit isomorphism I -> conj(I); default: identity on the unit."""
        return self.identity(self.unit())

    def symmetry(self, a, b):
        """Braiding A (x) B -> B (x) A, built from `reindex`."""
        na, nb = self.obj_size(a), self.obj_size(b)
        idx = [0] * (na * nb)
        for i in range(na):
            for j in range(nb):
                idx[i * nb + j] = j * na + i
        return self.reindex(self.tensor_obj(a, b), self.tensor_obj(b, a), idx)

    def reindex(self, a, b, index_map: Sequence[int]):
        """Structural iso a -> b sending element slot i to index_map[i]."""
        raise UnsupportedCheck(f"{self.name}: no reindex")

    # -- objects ------------------------------------------------------------

    def obj_size(self, a) -> int:
        raise NotImplementedError

    def obj_eq(self, a, b) -> bool:
        return a == b

    def describe_obj(self, a) -> str:
        return repr(a)

    # -- comparison and rendering ------------------------------------------

    def mor_eq(self, f, g, tol: Optional[float] = None) -> bool:
        """Slot-level equality of morphism data, up to the tolerance."""
        raise NotImplementedError

    def describe(self, f) -> str:
        return repr(f)

    def scalar_of(self, f):
        """Scalar value of a morphism between unit-sized objects."""
        raise UnsupportedCheck(f"{self.name}: no scalar extraction")

    def scalar_eq(self, x, y, tol: Optional[float] = None) -> bool:
        return scalars.eq(self.scalar_kind, x, y, self.tol if tol is None else tol)

    # -- sampling and enumeration ------------------------------------------

    def sample_object(self, rng: Lcg):
        raise NotImplementedError

    def sample_hom(self, rng: Lcg, a, b):
        raise NotImplementedError

    def sample_scalar(self, rng: Lcg):
        """Random morphism on the unit object."""
        i = self.unit()
        return self.sample_hom(rng, i, i)

    def objects(self, max_size: Optional[int] = None) -> Optional[list]:
        """Canonical object universe for exhaustive runs, or None."""
        return None

    def enum_hom(self, a, b) -> Optional[Iterable]:
        return None

    def count_hom(self, a, b) -> Optional[int]:
        return None


class FactorizationResult:
    """Outcome of a nuclear-factorization search.

    `found` with (`left`, `right`, `middle`) exhibits h = right o left
    through `middle`; when nothing was found, `conclusive` says whether
    absence was proved or the search merely hit its bound.
    """

    __slots__ = ("found", "left", "right", "middle", "conclusive")

    def __init__(self, found, left=None, right=None, middle=None, conclusive=True):
        self.found = found
        self.left = left
        self.right = right
        self.middle = middle
        self.conclusive = conclusive

    def __repr__(self):
        if self.found:
            return f"FactorizationResult(found=True, middle={self.middle!r})"
        tag = "absent" if self.conclusive else "inconclusive"
        return f"FactorizationResult(found=False, {tag})"


class NuclearStructure:
    """The distinguished morphism class with its transpose bijection."""

    #: whether `theta` lands bijectively in Hom(I, conj(A) (x) B); model
    #: families where this is only an audit question set it False.
    theta_onto: bool = True
    has_theta: bool = True

    def __init__(self, inst: CategoryInstance):
        self.inst = inst

    def is_nuclear(self, f) -> bool:
        raise NotImplementedError

    def theta(self, f):
        """Transpose of a distinguished morphism: a state I -> conj(A) (x) B."""
        raise UnsupportedCheck(f"{self.inst.name}: no transpose map")

    def theta_inv(self, m, a, b):
        raise UnsupportedCheck(f"{self.inst.name}: no transpose map")

    def derived_trace(self, f, g):
        """Scalar of theta(g*)* o theta(f) for f: A -> B, g: B -> A.

        This is the trace the transpose structure induces on the
        composite g o f; families without a representable unit override
        it with a direct formula.
        """
        inst = self.inst
        left = inst.star(self.theta(inst.star(g)))
        return inst.scalar_of(inst.compose(left, self.theta(f)))

    def sample_nuclear(self, rng: Lcg, a, b):
        raise NotImplementedError

    def enum_nuclear(self, a, b) -> Optional[Iterable]:
        return None

    def count_nuclear(self, a, b) -> Optional[int]:
        return None

    def enum_states(self, a, b) -> Optional[Iterable]:
        """All of Hom(I, conj(A) (x) B) when enumerable; used for
        round-trip and surjectivity checks."""
        return None

    def sample_state(self, rng: Lcg, a, b):
        """Random element of Hom(I, conj(A) (x) B), or None."""
        return None

    def factorize(self, h, bound: int) -> FactorizationResult:
        """Search for h = g o f with both factors distinguished."""
        return FactorizationResult(False, conclusive=False)


class TraceStructure:
    """Trace operator on the two-sided ideal generated by nuclear maps."""

    has_param: bool = False

    def __init__(self, inst: CategoryInstance, nuclear: NuclearStructure):
        self.inst = inst
        self.nuclear = nuclear

    def in_trace_class(self, h) -> bool:
        raise NotImplementedError

    def trace(self, h):
        """Scalar trace of an endomorphism in the trace class."""
        raise NotImplementedError

    def sample_member(self, rng: Lcg, a):
        """Random endomorphism of `a` inside the trace class, or None."""
        return None

    def enum_members(self, a) -> Optional[Iterable]:
        """All trace-class endomorphisms of `a`, or None when infeasible."""
        return None

    def sample_dinat_pair(self, rng: Lcg, a, b):
        """Random (f: a -> b, g: b -> a) with g o f in the trace class."""
        return None

    def sample_equal_factorizations(self, rng: Lcg):
        """Two nuclear factorizations of one morphism, or None.

        Returns ((f, g), (f2, g2)) with g o f = g2 o f2, both factors
        nuclear on each side, for factorization-independence checks.
        """
        return None

    # -- parametrized form --------------------------------------------------

    def in_param_class(self, f, a, u, b) -> bool:
        raise UnsupportedCheck(f"{self.inst.name}: no parametrized trace")

    def param_trace(self, f, a, u, b):
        """Partial trace over u of f: a (x) u -> b (x) u."""
        raise UnsupportedCheck(f"{self.inst.name}: no parametrized trace")

    def sample_param_member(self, rng: Lcg, a, u, b):
        return None

    def enum_param_members(self, a, u, b) -> Optional[Iterable]:
        return None
