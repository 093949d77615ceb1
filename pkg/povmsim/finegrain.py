r"""
Fine-graining of POVMs into rank-one POVMs with nearly equal magnitudes.

Every refinement comes with the coarse-graining :class:`StochasticMap` that
recovers the original POVM exactly.

EXAMPLES:

The computational basis measurement refined into 20 rank-one effects of
magnitude 0.1::

    >>> from povmsim.povm import Povm, effect_distance
    >>> refinement = flat_refine(Povm.create_example("basis"), delta=0.1, eps=0.5)
    >>> refinement
    Refinement(outcomes=20, flatness=1)
    >>> set(refinement.alphas.round(12).tolist())
    {0.1}
    >>> effect_distance(refinement.recover(refinement.refined), Povm.create_example("basis")) < 1e-10
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

from povmsim.errors import ValidationError
from povmsim.linalg import eig_hermitian
from povmsim.povm import TOL_ZERO, Povm, StochasticMap, effect_distance

logger = logging.getLogger("povmsim")

# Relative slack when counting parts so that x/u = 5.000000000000001 gives 5.
CEIL_SLACK = 1e-12


def _ceil(ratio):
    return max(1, math.ceil(ratio * (1 - CEIL_SLACK)))


@dataclass(frozen=True)
class Refinement:
    r"""
    A rank-one POVM ``refined`` with effects ``alphas[j] ψ_j ψ_j†`` and the
    map ``recover`` with ``recover(refined)`` equal to the original POVM.

    ``parents[j]`` is the outcome of the original POVM that ``j`` refines.

    EXAMPLES::

        >>> refinement = spectral_refine(Povm.create_example("trivial"))
        >>> refinement
        Refinement(outcomes=2, flatness=1)
        >>> refinement.parents.tolist()
        [0, 0]

    """

    refined: Povm
    recover: StochasticMap
    alphas: np.ndarray
    vectors: np.ndarray
    parents: np.ndarray

    @property
    def flatness(self):
        r"""
        Return max α / min α.

        EXAMPLES::

            >>> flat_refine(Povm.create_example("trine"), delta=0.5, eps=1).flatness
            1.0

        """
        return float(self.alphas.max() / self.alphas.min())

    def recovery_error(self, M):
        r"""
        Return the largest deviation of ``recover(refined)`` from ``M``.

        EXAMPLES::

            >>> M = Povm.create_example("trine")
            >>> extremal_refine(M).recovery_error(M) < 1e-12
            True

        """
        return effect_distance(self.recover(self.refined), M)

    def to_dict(self):
        r"""
        Return this refinement as a document.

        EXAMPLES::

            >>> document = extremal_refine(Povm.create_example("basis")).to_dict()
            >>> document["alphas"], document["recover"]
            ([0.5, 0.5, 0.5, 0.5], [[1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0]])

        """
        return {
            "refined": self.refined.to_dict(),
            "recover": self.recover.matrix.tolist(),
            "alphas": self.alphas.tolist(),
            "flatness": self.flatness,
        }

    def __repr__(self):
        return f"Refinement(outcomes={len(self.refined)}, flatness={self.flatness:.6g})"


def subdivide_weights(x, delta, eps):
    r"""
    Return, for every entry of ``x``, a list of equal parts that sum to it,
    such that every part is at most ``eps`` and the ratio of the largest to
    the smallest part over all entries is at most ``1 + delta``.

    Every entry ``x_i`` is split into ``⌈x_i/u⌉`` parts where
    ``u = min(eps, delta · min x)``.

    EXAMPLES::

        >>> subdivide_weights([1, 1], delta=0.5, eps=0.5)
        [[0.5, 0.5], [0.5, 0.5]]

        >>> parts = subdivide_weights([0.9, 1.1], delta=0.2, eps=0.25)
        >>> [len(p) for p in parts]
        [5, 7]
        >>> all_parts = sum(parts, [])
        >>> round(max(all_parts) / min(all_parts), 4)
        1.1455

    A single entry is split uniformly::

        >>> parts = subdivide_weights([10], delta=0.01, eps=0.1)
        >>> len(parts[0]), set(parts[0])
        (100, {0.1})

        >>> subdivide_weights([1, 0], delta=0.5, eps=1)
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Weights must be positive but entry 2 is 0.

    """
    x = [float(value) for value in x]

    for i, value in enumerate(x):
        if value <= 0:
            raise ValidationError(f"Weights must be positive but entry {i + 1} is {value:.3g}.")
    if not 0 < delta < 1:
        raise ValidationError(f"delta must be in (0, 1) but got {delta}.")
    if eps <= 0:
        raise ValidationError(f"eps must be positive but got {eps}.")

    u = min(eps, delta * min(x))

    return [[value / _ceil(value / u)] * _ceil(value / u) for value in x]


def rank_one_decomposition(M, tol=TOL_ZERO):
    r"""
    Return the spectral pieces ``(i, λ, ψ)`` of the effects of ``M`` with
    ``λ ≥ tol``, largest eigenvalue first within every effect.

    EXAMPLES::

        >>> [(i, round(l, 12)) for i, l, _ in rank_one_decomposition(Povm.create_example("trine"))]
        [(0, 0.666666666667), (1, 0.666666666667), (2, 0.666666666667)]

    """
    pieces = []
    dropped = 0.0

    for i, effect in enumerate(M.effects):
        spectrum = eig_hermitian(effect)
        for k in reversed(range(M.dim)):
            eigenvalue = float(spectrum.eigenvalues[k])
            if eigenvalue >= tol:
                pieces.append((i, eigenvalue, spectrum.eigenvectors[:, k]))
            elif eigenvalue > 0:
                dropped += eigenvalue

    if dropped > tol:
        logger.warning(f"Dropped spectral pieces of total weight {dropped:.3g} while fine-graining.")

    return pieces


def _refinement(M, pieces, parts):
    r"""
    Return the :class:`Refinement` splitting each spectral piece into the
    given parts.
    """
    parents, alphas, vectors = [], [], []
    for (i, _, psi), split in zip(pieces, parts):
        for part in split:
            parents.append(i)
            alphas.append(part)
            vectors.append(psi)

    alphas = np.array(alphas)
    vectors = np.array(vectors)
    effects = alphas[:, None, None] * np.einsum("ja,jb->jab", vectors, vectors.conj())

    logger.debug(f"Refined {len(M)} outcomes into {len(alphas)} rank-one outcomes.")

    return Refinement(
        refined=Povm(effects, check=False),
        recover=StochasticMap.from_assignment(parents, rows=len(M)),
        alphas=alphas,
        vectors=vectors,
        parents=np.array(parents),
    )


def _validated(M):
    report = M.validate()
    if not report.ok:
        raise ValidationError(report.violations[0])
    return M


def spectral_refine(M):
    r"""
    Return the rank-one fine-graining of ``M`` into the spectral pieces of
    its effects.

    EXAMPLES::

        >>> refinement = spectral_refine(Povm([np.diag([1, 0.5]), np.diag([0, 0.5])]))
        >>> refinement.alphas.tolist(), refinement.parents.tolist()
        ([1.0, 0.5, 0.5], [0, 0, 1])

    The recovery is exact for POVMs with effects of any rank::

        >>> def recovery_error(d, n, seed):
        ...     M = Povm.random(d, n, seed)
        ...     return spectral_refine(M).recovery_error(M)
        >>> max(recovery_error(d, n, seed) for seed, (d, n) in enumerate([(2, 3), (3, 5), (5, 8), (8, 12)])) < 1e-10
        True

    """
    pieces = rank_one_decomposition(_validated(M))
    return _refinement(M, pieces, [[eigenvalue] for _, eigenvalue, _ in pieces])


def flat_refine(M, delta, eps):
    r"""
    Return a rank-one fine-graining of ``M`` whose magnitudes are at most
    ``eps`` with flatness at most ``1 + delta``.

    The effects are decomposed spectrally (dropping pieces below 1e-12) and
    the eigenvalues are split with :func:`subdivide_weights`.

    EXAMPLES::

        >>> import numpy as np
        >>> M = Povm([np.eye(2) / 2, np.eye(2) / 2])
        >>> refinement = flat_refine(M, delta=0.5, eps=0.25)
        >>> len(refinement.refined), refinement.alphas.tolist()
        (8, [0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25])
        >>> refinement.recovery_error(M) < 1e-10
        True

    The cap u = min(ε, δ·min x) stays below every magnitude x, so even an
    already flat POVM has each effect split in two::

        >>> M = Povm.create_example("trine")
        >>> refinement = flat_refine(M, delta=0.5, eps=2 / 3)
        >>> len(refinement.refined), refinement.flatness
        (6, 1.0)

    Recovery, flatness and the cap hold on random POVMs::

        >>> def check(d, n, rank, seed, delta=0.5, eps=0.2):
        ...     M = Povm.random(d, n, seed, rank=rank)
        ...     refinement = flat_refine(M, delta, eps)
        ...     return (refinement.recovery_error(M) <= 1e-10
        ...         and refinement.flatness <= 1 + delta + 1e-12
        ...         and refinement.alphas.max() <= eps + 1e-12
        ...         and refinement.refined.is_rank_one())
        >>> all(check(d, n, 1, seed) for seed, (d, n) in enumerate([(2, 3), (3, 4), (4, 6), (8, 12)]))
        True

    """
    pieces = rank_one_decomposition(_validated(M))
    parts = subdivide_weights([eigenvalue for _, eigenvalue, _ in pieces], delta=delta, eps=eps)
    return _refinement(M, pieces, parts)


def extremal_refine(M, kappa=1):
    r"""
    Return the fine-graining of the rank-one POVM ``M`` that splits every
    magnitude α_i into ``⌈α_i d/κ⌉`` equal parts.

    All parts are at most κ/d and, if ``M`` has at most d² outcomes, the
    refinement has at most d²(1 + 1/κ) outcomes.

    EXAMPLES::

        >>> refinement = extremal_refine(Povm.create_example("basis"))
        >>> len(refinement.refined), refinement.alphas.tolist()
        (4, [0.5, 0.5, 0.5, 0.5])

        >>> refinement = extremal_refine(Povm.create_example("trine"))
        >>> len(refinement.refined), refinement.alphas.round(12).tolist()
        (6, [0.333333333333, 0.333333333333, 0.333333333333, 0.333333333333, 0.333333333333, 0.333333333333])

    A POVM with small magnitudes is unchanged::

        >>> M = Povm.create_example("tetrahedron")
        >>> extremal_refine(M).recovery_error(M) < 1e-15, len(extremal_refine(M).refined)
        (True, 4)

    The outcome count and cap on random rank-one POVMs::

        >>> def check(d, n, seed):
        ...     M = Povm.random(d, n, seed, rank=1)
        ...     refinement = extremal_refine(M)
        ...     traces = M.traces()
        ...     parts_ok = all(alpha <= 1 / d + 1e-12 and (alpha > 1 / (2 * d) or abs(alpha - traces[i]) < 1e-15)
        ...         for alpha, i in zip(refinement.alphas, refinement.parents))
        ...     return parts_ok and len(refinement.refined) <= 2 * d * d and refinement.recovery_error(M) < 1e-12
        >>> all(check(d, d * d, seed) for seed, d in enumerate([2, 3, 4]))
        True

    Effects must have rank one::

        >>> extremal_refine(Povm.create_example("trivial"))
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Effect 1 has rank 2 but extremal fine-graining needs rank-one effects.

    """
    if kappa <= 0:
        raise ValidationError(f"kappa must be positive but got {kappa}.")

    d = M.dim
    if len(M) > d * d:
        raise ValidationError(f"An extremal rank-one POVM on C^{d} has at most {d * d} outcomes but got {len(M)}.")

    parents, alphas, vectors, effects = [], [], [], []
    for i, effect in enumerate(_validated(M).effects):
        spectrum = eig_hermitian(effect)
        rank = spectrum.rank()
        if rank > 1:
            raise ValidationError(f"Effect {i + 1} has rank {rank} but extremal fine-graining needs rank-one effects.")

        alpha = float(np.trace(effect).real)
        if alpha < TOL_ZERO:
            continue

        k = _ceil(alpha * d / kappa)
        for _ in range(k):
            parents.append(i)
            alphas.append(alpha / k)
            vectors.append(spectrum.eigenvectors[:, -1])
            effects.append(effect / k)

    logger.debug(f"Refined {len(M)} outcomes into {len(alphas)} outcomes of magnitude at most {kappa / d:.3g}.")

    return Refinement(
        refined=Povm(effects, check=False),
        recover=StochasticMap.from_assignment(parents, rows=len(M)),
        alphas=np.array(alphas),
        vectors=np.array(vectors),
        parents=np.array(parents),
    )
