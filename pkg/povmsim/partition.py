r"""
Partition-based probabilistic simulation of POVMs.

A partition ``S`` of the outcomes of a POVM ``M`` defines for every block
``S_β`` the sub-POVM that reports ``i ∈ S_β`` with effect ``M_i/λ_β`` and
fails otherwise, where ``λ_β = ‖Σ_{i∈S_β} M_i‖``. Choosing block ``β`` with
probability proportional to ``λ_β`` simulates ``M`` with postselection
probability ``q = 1/Σ_β λ_β``.

EXAMPLES:

The trine POVM simulated with blocks of at most two outcomes::

    >>> from povmsim.povm import Povm
    >>> M = Povm.create_example("trine")
    >>> S = Partition(3, [[0, 1], [2]])
    >>> ensemble = build_ensemble(M, S)
    >>> ensemble.lambdas.round(12).tolist(), round(ensemble.q, 12)
    ([1.0, 0.666666666667], 0.6)
    >>> max(ensemble.verify().values()) < 1e-12
    True

"""
# ********************************************************************
#  This file is part of povmsim.
#
#        Copyright (C) 2026 the povmsim authors
#
#  povmsim is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  povmsim is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with povmsim. If not, see <https://www.gnu.org/licenses/>.
# ********************************************************************
import logging
import math
from dataclasses import dataclass

import numpy as np

from povmsim.errors import CertificationError, FormatError, InfeasibleError, ValidationError
from povmsim.linalg import eig_hermitian, op_norm
from povmsim.povm import FAILURE_LABEL, TOL_ZERO, Povm
from povmsim.seeding import generator

logger = logging.getLogger("povmsim")

EXHAUSTIVE_LIMIT = 12


class Partition:
    r"""
    A partition of the outcomes ``0, …, n-1`` into nonempty disjoint blocks.

    Indices are 0-based in Python and 1-based in documents and printed
    output.

    EXAMPLES::

        >>> Partition(4, [[2, 0], [1, 3]])
        Partition(n=4, subsets=[[1, 3], [2, 4]])

        >>> Partition(3, [[0, 1], [1, 2]])
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Subsets of a partition of 3 outcomes must be disjoint and cover all outcomes.

        >>> Partition(2, [[0, 1], []])
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Subset 2 of the partition is empty.

    """

    def __init__(self, n, subsets):
        n = int(n)
        subsets = tuple(tuple(sorted(int(i) for i in subset)) for subset in subsets)

        if n < 1:
            raise ValidationError(f"A partition needs at least one outcome but got n={n}.")

        for beta, subset in enumerate(subsets):
            if not subset:
                raise ValidationError(f"Subset {beta + 1} of the partition is empty.")

        elements = np.concatenate([np.array(subset, dtype=int) for subset in subsets]) if subsets else np.array([], dtype=int)
        if len(elements) != n or len(np.unique(elements)) != n or elements.min() < 0 or elements.max() >= n:
            raise ValidationError(
                f"Subsets of a partition of {n} outcomes must be disjoint and cover all outcomes."
            )

        self._n = n
        self._subsets = subsets

    @classmethod
    def trivial(cls, n):
        r"""
        Return the partition with a single block.

        EXAMPLES::

            >>> Partition.trivial(3)
            Partition(n=3, subsets=[[1, 2, 3]])

        """
        return cls(n, [range(n)])

    @classmethod
    def singletons(cls, n):
        r"""
        Return the partition into single outcomes.

        EXAMPLES::

            >>> Partition.singletons(2)
            Partition(n=2, subsets=[[1], [2]])

        """
        return cls(n, [[i] for i in range(n)])

    @classmethod
    def from_assignment(cls, assignment):
        r"""
        Return the partition whose blocks are the outcomes with equal
        ``assignment``, ordered by block label; labels that are not used
        produce no block.

        EXAMPLES::

            >>> Partition.from_assignment([2, 0, 2, 2])
            Partition(n=4, subsets=[[2], [1, 3, 4]])

        """
        assignment = np.asarray(assignment, dtype=int)
        return cls(len(assignment), [np.flatnonzero(assignment == label) for label in np.unique(assignment)])

    @property
    def n(self):
        return self._n

    @property
    def subsets(self):
        r"""
        Return the blocks as tuples of 0-based outcome indices.

        EXAMPLES::

            >>> Partition(2, [[1], [0]]).subsets
            ((1,), (0,))

        """
        return self._subsets

    @property
    def r(self):
        r"""
        Return the number of blocks.

        EXAMPLES::

            >>> Partition.singletons(5).r
            5

        """
        return len(self._subsets)

    def sizes(self):
        r"""
        Return the block sizes.

        EXAMPLES::

            >>> Partition(4, [[0, 1, 2], [3]]).sizes()
            [3, 1]

        """
        return [len(subset) for subset in self._subsets]

    def assignment(self):
        r"""
        Return the block index of every outcome.

        EXAMPLES::

            >>> Partition(3, [[2], [0, 1]]).assignment().tolist()
            [1, 1, 0]

        """
        assignment = np.zeros(self._n, dtype=int)
        for beta, subset in enumerate(self._subsets):
            assignment[list(subset)] = beta
        return assignment

    def __len__(self):
        return self.r

    def __iter__(self):
        return iter(self._subsets)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self._n == other._n and self._subsets == other._subsets

    def __repr__(self):
        return f"Partition(n={self._n}, subsets={self.to_dict()['subsets']})"

    def to_dict(self):
        r"""
        Return this partition as a document with 1-based indices.

        EXAMPLES::

            >>> Partition(3, [[0, 1], [2]]).to_dict()
            {'n': 3, 'subsets': [[1, 2], [3]]}

        """
        return {"n": self._n, "subsets": [[i + 1 for i in subset] for subset in self._subsets]}

    @classmethod
    def from_dict(cls, document):
        r"""
        Return the partition described by ``document``, see :meth:`to_dict`.

        EXAMPLES::

            >>> Partition.from_dict({"n": 2, "subsets": [[2], [1]]})
            Partition(n=2, subsets=[[2], [1]])

            >>> Partition.from_dict({"subsets": [[1]]})
            Traceback (most recent call last):
            ...
            povmsim.errors.FormatError: Partition document is missing the field 'n'.

        """
        for key in ["n", "subsets"]:
            if key not in document:
                raise FormatError(f"Partition document is missing the field '{key}'.")

        return cls(document["n"], [[i - 1 for i in subset] for subset in document["subsets"]])


def _subset_sum(M, subset):
    return M.effects[list(subset)].sum(axis=0)


def block_norms(M, S):
    r"""
    Return ``λ_β = ‖Σ_{i∈S_β} M_i‖`` for every block of ``S``.

    EXAMPLES::

        >>> block_norms(Povm.create_example("basis"), Partition.singletons(2)).tolist()
        [1.0, 1.0]

    λ of a subset of a block never exceeds λ of the block::

        >>> M = Povm.random(3, 6, seed=0)
        >>> lam = block_norms(M, Partition(6, [[0, 1, 2, 3], [4, 5]]))
        >>> bool(op_norm(M.effects[[0, 2]].sum(axis=0)) <= lam[0] + 1e-12)
        True
        >>> bool(0 < lam.min() and lam.max() <= 1 + 1e-12)
        True

    """
    _check_arity(M, S)
    return np.array([op_norm(_subset_sum(M, subset)) for subset in S])


def _check_arity(M, S):
    if S.n != len(M):
        raise ValidationError(f"Partition of {S.n} outcomes does not match a POVM with {len(M)} outcomes.")


def success_prob(M, S):
    r"""
    Return the postselection probability ``q(M, S) = 1/Σ_β λ_β``.

    EXAMPLES::

        >>> M = Povm.create_example("trine")
        >>> round(success_prob(M, Partition.singletons(3)), 12)
        0.5
        >>> round(success_prob(M, Partition.trivial(3)), 12)
        1.0
        >>> round(success_prob(M, Partition(3, [[0, 1], [2]])), 12)
        0.6

    """
    return float(1 / block_norms(M, S).sum())


@dataclass(frozen=True)
class SimulationEnsemble:
    r"""
    Sub-POVMs ``subs[β]`` with an extra failure outcome, chosen with
    probabilities ``weights[β]``, that simulate ``target`` with
    postselection probability ``q``.

    EXAMPLES::

        >>> ensemble = build_ensemble(Povm.create_example("basis"), Partition.trivial(2))
        >>> ensemble.q, ensemble.subs[0].labels
        (1.0, ('1', '2', '∅'))

    """

    target: Povm
    partition: Partition
    weights: np.ndarray
    subs: tuple
    q: float
    lambdas: np.ndarray

    def postselected(self):
        r"""
        Return the simulated POVM ``(q M_1, …, q M_n, (1 − q) I)``.

        EXAMPLES::

            >>> ensemble = build_ensemble(Povm.create_example("basis"), Partition.singletons(2))
            >>> [effect.real.diagonal().tolist() for effect in ensemble.postselected().effects]
            [[0.5, 0.0], [0.0, 0.5], [0.5, 0.5]]

        """
        d = self.target.dim
        effects = np.concatenate([self.q * self.target.effects, [(1 - self.q) * np.eye(d)]])
        return Povm(effects, labels=self.target.labels + (FAILURE_LABEL,), check=False)

    def mixture(self):
        r"""
        Return Σ_β p_β N^(β).

        EXAMPLES::

            >>> ensemble = build_ensemble(Povm.create_example("trine"), Partition.singletons(3))
            >>> from povmsim.povm import effect_distance
            >>> effect_distance(ensemble.mixture(), ensemble.postselected()) < 1e-12
            True

        """
        effects = np.einsum("b,bnij->nij", self.weights, np.array([sub.effects for sub in self.subs]))
        return Povm(effects, labels=self.subs[0].labels, check=False)

    def verify(self, tol=None):
        r"""
        Return the largest Frobenius deviations of Σ_β p_β N^(β) from
        ``q M_i`` over the outcomes and from ``(1 − q) I`` for the failure
        outcome, rounded to three significant digits.

        If ``tol`` is given, raise a :class:`CertificationError` when a
        deviation exceeds it.

        EXAMPLES::

            >>> ensemble = build_ensemble(Povm.create_example("basis"), Partition.singletons(2))
            >>> ensemble.verify(tol=1e-9)
            {'outcomes': 0.0, 'failure': 0.0}

        """
        deviations = np.linalg.norm(self.mixture().effects - self.postselected().effects, axis=(1, 2))
        report = {
            "outcomes": float(f"{deviations[:-1].max():.3g}"),
            "failure": float(f"{deviations[-1]:.3g}"),
        }

        if tol is not None and max(report.values()) > tol:
            raise CertificationError(
                f"Simulation ensemble deviates from (qM, (1 − q)I) by {max(report.values()):.3g} which exceeds {tol:.3g}."
            )

        return report


def build_ensemble(M, S):
    r"""
    Return the :class:`SimulationEnsemble` of ``M`` for the partition ``S``.

    EXAMPLES:

    The trivial partition reproduces the POVM with a zero failure effect::

        >>> M = Povm.create_example("basis")
        >>> ensemble = build_ensemble(M, Partition.trivial(2))
        >>> float(np.abs(ensemble.subs[0].effects[-1]).max()), ensemble.q
        (0.0, 1.0)

    Singletons of the basis measurement::

        >>> ensemble = build_ensemble(M, Partition.singletons(2))
        >>> ensemble.lambdas.tolist(), ensemble.q
        ([1.0, 1.0], 0.5)

    The postselection identity holds on random instances::

        >>> def deviation(d, seed):
        ...     M = Povm.random_flat(d, 2 * d, seed)
        ...     S = random_partition(len(M), r=d, seed=seed)
        ...     return max(build_ensemble(M, S).verify().values())
        >>> max(deviation(d, seed) for d in range(2, 6) for seed in range(3)) <= 1e-9
        True

    Blocks of zero effects are rejected::

        >>> build_ensemble(Povm([np.eye(2), np.zeros((2, 2))]), Partition.singletons(2))
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Subset 2 has only zero effects. Compact the POVM first.

    """
    lambdas = block_norms(M, S)

    for beta, lam in enumerate(lambdas):
        if lam <= TOL_ZERO:
            raise ValidationError(f"Subset {beta + 1} has only zero effects. Compact the POVM first.")

    d = M.dim
    subs = []
    for subset, lam in zip(S, lambdas):
        effects = np.zeros((len(M) + 1, d, d), dtype=complex)
        effects[list(subset)] = M.effects[list(subset)] / lam
        effects[-1] = np.eye(d) - effects[:-1].sum(axis=0)
        subs.append(Povm(effects, labels=M.labels + (FAILURE_LABEL,), check=False))

    total = float(lambdas.sum())
    logger.debug(f"Built a simulation ensemble with {S.r} blocks and q={1 / total:.6g}.")

    return SimulationEnsemble(
        target=M,
        partition=S,
        weights=lambdas / total,
        subs=tuple(subs),
        q=1 / total,
        lambdas=lambdas,
    )


@dataclass(frozen=True)
class KsReport:
    r"""
    Comparison of ``λ_β`` with ``(1/r)(1 + √(rε))²`` for every block.

    EXAMPLES::

        >>> M = Povm.create_example("trine")
        >>> report = ks_bound_check(M, Partition.trivial(3), eps=2 / 3)
        >>> report.passed
        True
        >>> report.to_frame()
           subset  size  lambda       rhs  passed
        0       1     3     1.0  3.299663    True

    """

    lambdas: np.ndarray
    sizes: tuple
    r: int
    eps: float

    @property
    def rhs(self):
        return (1 + math.sqrt(self.r * self.eps)) ** 2 / self.r

    @property
    def passed(self):
        return bool(np.all(self.lambdas <= self.rhs + 1e-12))

    def to_frame(self):
        r"""
        Return the report as a data frame with one row per block.

        EXAMPLES::

            >>> M = Povm.create_example("basis")
            >>> ks_bound_check(M, Partition.singletons(2), eps=1).to_frame()
               subset  size  lambda       rhs  passed
            0       1     1     1.0  2.914214    True
            1       2     1     1.0  2.914214    True

        """
        import pandas as pd

        return pd.DataFrame(
            {
                "subset": np.arange(1, self.r + 1),
                "size": list(self.sizes),
                "lambda": self.lambdas.round(12),
                "rhs": np.full(self.r, round(self.rhs, 12)),
                "passed": self.lambdas <= self.rhs + 1e-12,
            }
        )

    def to_dict(self):
        r"""
        Return the report as a document of checks.

        EXAMPLES::

            >>> ks_bound_check(Povm.create_example("basis"), Partition.trivial(2), eps=1).to_dict()
            {'r': 1, 'eps': 1.0, 'max_lambda': {'value': 1.0, 'threshold': 4.0}, 'passed': True}

        """
        return {
            "r": self.r,
            "eps": self.eps,
            "max_lambda": {"value": round(float(self.lambdas.max()), 12), "threshold": float(self.rhs)},
            "passed": self.passed,
        }


def ks_bound_check(M, S, eps, tol=1e-12):
    r"""
    Return whether every block of the rank-one POVM ``M`` with ``‖M_i‖ ≤ eps``
    satisfies ``λ_β ≤ (1/r)(1 + √(rε))²``.

    EXAMPLES:

    A single block always passes::

        >>> M = Povm.random_flat(3, 4, seed=0)
        >>> ks_bound_check(M, Partition.trivial(12), eps=1 / 4).passed
        True

    Singletons of a flat POVM pass::

        >>> ks_bound_check(M, Partition.singletons(12), eps=1 / 4).passed
        True

    A block that collects a whole basis among many blocks is flagged::

        >>> N = Povm(np.repeat(Povm.create_example("basis").effects / 4, 4, axis=0))
        >>> report = ks_bound_check(N, Partition(8, [range(4), [4], [5], [6], [7]]), eps=1 / 4)
        >>> report.passed, report.to_frame()["passed"].tolist()
        (False, [False, True, True, True, True])

    Effects must be rank-one and bounded by ``eps``::

        >>> ks_bound_check(Povm.create_example("trivial"), Partition.trivial(1), eps=1)
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Effect 1 has rank 2 but the Kadison–Singer bound needs rank-one effects.
        >>> ks_bound_check(M, Partition.trivial(12), eps=0.2)
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Effect 1 has norm 0.25 which exceeds eps=0.2.

    """
    _check_arity(M, S)

    for i, effect in enumerate(M.effects):
        spectrum = eig_hermitian(effect)
        if spectrum.rank() > 1:
            raise ValidationError(
                f"Effect {i + 1} has rank {spectrum.rank()} but the Kadison–Singer bound needs rank-one effects."
            )
        if spectrum.eigenvalues[-1] > eps + tol:
            raise ValidationError(f"Effect {i + 1} has norm {spectrum.eigenvalues[-1]:.3g} which exceeds eps={eps:.3g}.")

    return KsReport(lambdas=block_norms(M, S), sizes=tuple(S.sizes()), r=S.r, eps=float(eps))


def predicted_bounds(eps, eps_tilde, C, d):
    r"""
    Return the lower bound on q and the upper bound on block sizes of a
    partition satisfying the Kadison–Singer bound with ``C = rε``.

    EXAMPLES::

        >>> bounds = predicted_bounds(eps=0.1, eps_tilde=0.1, C=5, d=1)
        >>> round(bounds["q_lower"], 4), round(bounds["size_upper"], 4)
        (0.0955, 2.0944)

        >>> predicted_bounds(eps=0.1, eps_tilde=0.1, C=1, d=3)
        {'q_lower': 0.25, 'size_upper': 12.0}

        >>> predicted_bounds(eps=0.1, eps_tilde=0.2, C=1, d=3)
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Expected 0 < eps_tilde ≤ eps but got eps=0.1 and eps_tilde=0.2.

    """
    if not 0 < eps_tilde <= eps:
        raise ValidationError(f"Expected 0 < eps_tilde ≤ eps but got eps={eps} and eps_tilde={eps_tilde}.")
    if C <= 0:
        raise ValidationError(f"C must be positive but got {C}.")

    return {
        "q_lower": 1 / (1 + math.sqrt(C)) ** 2,
        "size_upper": d * (eps / eps_tilde) * (1 + 1 / math.sqrt(C)) ** 2,
    }


def improved_bound(C, ratio, kappa):
    r"""
    Return the lower bound ``1/((1 + √C)²(ratio/(κC) + 1))`` on the success
    probability after splitting blocks to at most κd outcomes, where
    ``ratio`` is ε/ε̃.

    EXAMPLES::

        >>> round(improved_bound(C=5, ratio=1, kappa=1 / 2), 4)
        0.0682
        >>> improved_bound(C=1, ratio=1, kappa=1)
        0.125

    """
    return 1 / ((1 + math.sqrt(C)) ** 2 * (ratio / (kappa * C) + 1))


def randomized_bounds(C, d):
    r"""
    Return the thresholds met with probability at least 1/4 by a uniformly
    random partition into ``r = Cd`` blocks of a flat rank-one POVM with
    magnitudes at most 1/d: the success probability ``1/(3.44 + 2C log d)``
    and the block size ``(2/C)(1 + δ)d`` where ``δ³ = (3C/(2d))(1 + log(4Cd))``.

    EXAMPLES::

        >>> bounds = randomized_bounds(C=1, d=16)
        >>> round(bounds["q_lower"], 6), round(bounds["delta"], 6), round(bounds["size_upper"], 4)
        (0.11188, 0.651613, 52.8516)

    """
    delta = (3 * C / (2 * d) * (1 + math.log(4 * C * d))) ** (1 / 3)
    return {
        "q_lower": 1 / (3.44 + 2 * C * math.log(d)),
        "delta": delta,
        "size_upper": 2 / C * (1 + delta) * d,
    }


def random_partition(n, r, seed):
    r"""
    Return the partition obtained by assigning each of the ``n`` outcomes to
    one of ``r`` blocks uniformly at random; empty blocks are dropped.

    EXAMPLES::

        >>> random_partition(4, r=1, seed=0)
        Partition(n=4, subsets=[[1, 2, 3, 4]])
        >>> random_partition(10, r=3, seed=7) == random_partition(10, r=3, seed=7)
        True

    Block sizes concentrate::

        >>> sizes = np.concatenate([random_partition(10 ** 4, r=100, seed=seed).sizes() for seed in range(200)])
        >>> bool(np.mean((60 <= sizes) & (sizes <= 140)) >= 0.99)
        True

    """
    if r < 1:
        raise ValidationError(f"A random partition needs r ≥ 1 blocks but got {r}.")

    return Partition.from_assignment(generator(seed).integers(r, size=n))


@dataclass(frozen=True)
class Subpartition:
    r"""
    The result of :func:`improved_subpartition`.

    EXAMPLES::

        >>> M = Povm.create_example("basis")
        >>> improved_subpartition(M, Partition.trivial(2), kappa=1)
        Subpartition(partition=Partition(n=2, subsets=[[1, 2]]), q=1, bound=0.125)

    """

    partition: Partition
    q: float
    bound: float
    C: float
    ratio: float
    kappa: float

    def __repr__(self):
        return f"Subpartition(partition={self.partition!r}, q={self.q:.6g}, bound={self.bound:.6g})"


def improved_subpartition(M, S, kappa, d=None):
    r"""
    Return the partition obtained by splitting every block ``S_β`` of more
    than ``m = ⌊κd⌋`` outcomes, with ``jm ≤ |S_β| < (j+1)m``, into j + 1
    contiguous chunks of at most m outcomes, together with its success
    probability and the guaranteed lower bound.

    The bound uses ``C = rε`` with ``ε`` and ``ε̃`` the largest and smallest
    magnitude of ``M`` and the effective ``κ = m/d``, which is ``kappa``
    whenever ``κd`` is an integer.

    EXAMPLES::

        >>> M = Povm.random_flat(2, 4, seed=1)
        >>> result = improved_subpartition(M, Partition.trivial(8), kappa=1)
        >>> result.partition.sizes(), result.q >= result.bound
        ([2, 2, 2, 1, 1], True)

    Blocks that are small enough are kept::

        >>> S = Partition(8, [[0, 1], [2, 3], [4, 5], [6, 7]])
        >>> improved_subpartition(M, S, kappa=1).partition == S
        True

    The achieved probability beats the bound whenever the Kadison–Singer
    bound holds::

        >>> def check(d, seed):
        ...     M = Povm.random_flat(d, 2 * d, seed)
        ...     S = random_partition(len(M), r=2, seed=seed)
        ...     result = improved_subpartition(M, S, kappa=1 / 2)
        ...     return not ks_bound_check(M, S, eps=1 / (2 * d)).passed or result.q >= result.bound - 1e-12
        >>> all(check(d, seed) for d in [2, 3, 4, 5, 6] for seed in range(5))
        True

    """
    d = M.dim if d is None else d
    cap = math.floor(kappa * d + 1e-12)
    if cap < 1:
        raise InfeasibleError(f"Blocks of at most κd = {kappa * d:.3g} outcomes cannot be formed.")

    subsets = []
    for subset in S:
        if len(subset) <= cap:
            subsets.append(subset)
            continue
        subsets.extend(np.array_split(np.array(subset), len(subset) // cap + 1))

    refined = Partition(S.n, subsets)

    traces = M.traces()
    eps = float(traces.max())
    eps_tilde = float(traces[traces > TOL_ZERO].min())
    C = S.r * eps

    return Subpartition(
        partition=refined,
        q=success_prob(M, refined),
        bound=improved_bound(C, eps / eps_tilde, cap / d),
        C=C,
        ratio=eps / eps_tilde,
        kappa=cap / d,
    )


class _BlockNorms:
    r"""
    Memoized ``λ`` of sets of outcomes encoded as bit masks.

    EXAMPLES::

        >>> norms = _BlockNorms(Povm.create_example("basis"))
        >>> norms(0b11), norms(0b01), norms(0)
        (1.0, 1.0, 0.0)

    """

    def __init__(self, M):
        self._M = M
        self._cache = {0: 0.0}

    def __call__(self, mask):
        if mask not in self._cache:
            indices = [i for i in range(len(self._M)) if mask >> i & 1]
            self._cache[mask] = op_norm(_subset_sum(self._M, indices))
        return self._cache[mask]


def _masks_to_partition(n, masks):
    subsets = [[i for i in range(n) if mask >> i & 1] for mask in masks if mask]
    return Partition(n, sorted(subsets))


def optimize_partition(M, r, max_size, budget=None, seed=0, mode="auto"):
    r"""
    Return a partition of the outcomes of ``M`` into at most ``r`` blocks of
    at most ``max_size`` outcomes with small ``Σ_β λ_β``, i.e., large
    success probability.

    With ``mode="exhaustive"`` (the default for at most 12 outcomes) all set
    partitions are searched with branch and bound. Otherwise a seeded local
    search moves single outcomes between blocks whenever this strictly
    decreases ``Σ_β λ_β``, for ``budget`` proposals (200 n by default).

    EXAMPLES::

        >>> M = Povm.create_example("trine")
        >>> S = optimize_partition(M, r=2, max_size=2)
        >>> sorted(S.sizes()), round(success_prob(M, S), 12)
        ([1, 2], 0.6)

        >>> optimize_partition(Povm.create_example("basis", dim=3), r=1, max_size=3)
        Partition(n=3, subsets=[[1, 2, 3]])

    The search beats random partitions with the same block structure::

        >>> M = Povm.random_flat(4, 2, seed=3)
        >>> best = success_prob(M, optimize_partition(M, r=4, max_size=2))
        >>> random_q = [success_prob(M, Partition(8, np.split(generator(seed).permutation(8), 4))) for seed in range(50)]
        >>> bool(best >= np.median(random_q))
        True

    Local search for larger POVMs is deterministic per seed::

        >>> M = Povm.random_flat(2, 8, seed=0)
        >>> S = optimize_partition(M, r=8, max_size=2, seed=1)
        >>> S == optimize_partition(M, r=8, max_size=2, seed=1), max(S.sizes()) <= 2
        (True, True)

    Infeasible constraints are rejected::

        >>> optimize_partition(M, r=2, max_size=2)
        Traceback (most recent call last):
        ...
        povmsim.errors.InfeasibleError: Cannot partition 16 outcomes into at most 2 blocks of at most 2 outcomes. Use the randomized mode instead.

    """
    n = len(M)
    r = min(int(r), n)
    max_size = min(int(max_size), n)

    if r < 1 or max_size < 1 or r * max_size < n:
        raise InfeasibleError(
            f"Cannot partition {n} outcomes into at most {r} blocks of at most {max_size} outcomes. Use the randomized mode instead."
        )

    if mode == "auto":
        mode = "exhaustive" if n <= EXHAUSTIVE_LIMIT else "greedy"
    if mode == "exhaustive" and n > EXHAUSTIVE_LIMIT:
        logger.warning(f"Exhaustive partition search is limited to {EXHAUSTIVE_LIMIT} outcomes; using local search for {n} outcomes.")
        mode = "greedy"
    if mode not in ["exhaustive", "greedy"]:
        raise ValidationError(f"Unknown partition search mode {mode!r}.")

    norms = _BlockNorms(M)
    budget = 200 * n if budget is None else budget

    masks = _local_search(n, r, max_size, norms, budget, seed)

    if mode == "exhaustive":
        masks = _exhaustive_search(n, r, max_size, norms, masks)

    S = _masks_to_partition(n, masks)
    logger.debug(f"Partition search ({mode}) found {S.r} blocks with Σλ={sum(norms(mask) for mask in masks):.6g}.")
    return S


def _local_search(n, r, max_size, norms, budget, seed):
    rng = generator(seed)
    blocks = -(-n // max_size)

    masks = [0] * r
    owner = np.zeros(n, dtype=int)
    for position, i in enumerate(rng.permutation(n)):
        owner[i] = position % blocks
        masks[owner[i]] |= 1 << int(i)
    sizes = [bin(mask).count("1") for mask in masks]

    accepted = 0
    for _ in range(budget):
        i = int(rng.integers(n))
        b = int(rng.integers(r))
        a = int(owner[i])
        if a == b or sizes[b] >= max_size:
            continue

        source, target = masks[a] & ~(1 << i), masks[b] | (1 << i)
        change = norms(source) + norms(target) - norms(masks[a]) - norms(masks[b])
        if change < -1e-12:
            masks[a], masks[b] = source, target
            sizes[a] -= 1
            sizes[b] += 1
            owner[i] = b
            accepted += 1

    logger.debug(f"Local partition search accepted {accepted} of {budget} proposed moves.")
    return masks


def _exhaustive_search(n, r, max_size, norms, initial):
    best = {"cost": sum(norms(mask) for mask in initial), "masks": list(initial)}
    masks, sizes = [], []

    def descend(i, cost):
        if cost >= best["cost"] - 1e-12:
            return
        if i == n:
            best["cost"], best["masks"] = cost, list(masks)
            return
        if n - i > sum(max_size - size for size in sizes) + (r - len(masks)) * max_size:
            return

        for b, mask in enumerate(masks):
            if sizes[b] < max_size:
                masks[b] = mask | (1 << i)
                sizes[b] += 1
                descend(i + 1, cost + norms(masks[b]) - norms(mask))
                masks[b] = mask
                sizes[b] -= 1

        if len(masks) < r:
            masks.append(1 << i)
            sizes.append(1)
            descend(i + 1, cost + norms(1 << i))
            masks.pop()
            sizes.pop()

    descend(0, 0.0)
    return best["masks"]
