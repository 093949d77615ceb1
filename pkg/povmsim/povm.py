r"""
Finite-outcome quantum measurements (POVMs), classical operations on them,
and certificates of projective simulability.

A :class:`Povm` is an ordered list of positive semidefinite effects on C^d
that sum to the identity. Classical post-processing is described by a
column-stochastic :class:`StochasticMap` and a finite convex decomposition
into post-processed projective measurements is an :class:`SpWitness`.

EXAMPLES:

The trine POVM on a qubit::

    >>> import numpy as np
    >>> M = Povm.create_example("trine")
    >>> M
    Povm(dim=2, outcomes=3)
    >>> M.validate()
    ok

Outcome probabilities for the maximally mixed state::

    >>> M.born(np.eye(2) / 2).round(12).tolist()
    [0.333333333333, 0.333333333333, 0.333333333333]

Depolarizing noise commutes with post-processing::

    >>> Q = StochasticMap([[1, 1, 0], [0, 0, 1]])
    >>> effect_distance(Q(M.depolarize(0.3)), Q(M).depolarize(0.3)) < 1e-10
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
from dataclasses import dataclass, field

import numpy as np

from povmsim.errors import FormatError, ValidationError
from povmsim.linalg import (
    TOL_HERM,
    TOL_RANK,
    dagger,
    eig_hermitian,
    eigvals_hermitian,
    haar_unitary,
    hermitian,
    hermiticity_deviation,
)
from povmsim.seeding import as_generator

logger = logging.getLogger("povmsim")

FAILURE_LABEL = "∅"

TOL_PSD = 1e-9
# Normalization tolerance per dimension, i.e., ‖Σ M_i − I‖_F ≤ TOL_NORM · d.
TOL_NORM = 1e-8
TOL_STOCH = 1e-10
TOL_WITNESS = 1e-8
TOL_PROJ = 1e-9
TOL_ZERO = 1e-12
TOL_PRUNE = 1e-14


@dataclass(frozen=True)
class ValidationReport:
    r"""
    The violated invariants of a POVM, empty if the POVM is valid.

    EXAMPLES::

        >>> ValidationReport()
        ok
        >>> ValidationReport(("Effect 2 is broken.",))
        Effect 2 is broken.

    """

    violations: tuple = ()

    @property
    def ok(self):
        r"""
        Return whether no invariant is violated.

        EXAMPLES::

            >>> ValidationReport().ok
            True

        """
        return not self.violations

    def __repr__(self):
        if self.ok:
            return "ok"
        return "\n".join(self.violations)


class StochasticMap:
    r"""
    A column-stochastic matrix ``q[i, j]``, the probability to report outcome
    ``i`` when outcome ``j`` was observed.

    EXAMPLES::

        >>> Q = StochasticMap([[1, 0.5], [0, 0.5]])
        >>> Q
        StochasticMap(2×2)

    Columns must be probability vectors::

        >>> StochasticMap([[1, 0.5], [0, 0.4]])
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Column 2 of the stochastic map sums to 0.9 instead of 1.

    """

    def __init__(self, matrix, tol=TOL_STOCH):
        matrix = np.array(matrix, dtype=float)

        if matrix.ndim != 2:
            raise ValidationError(f"A stochastic map must be a matrix but got shape {matrix.shape}.")

        if matrix.size and matrix.min() < -tol:
            i, j = np.unravel_index(int(np.argmin(matrix)), matrix.shape)
            raise ValidationError(
                f"Entry ({i + 1}, {j + 1}) of the stochastic map is negative: {matrix[i, j]:.3g}."
            )

        for j, total in enumerate(matrix.sum(axis=0)):
            if abs(total - 1) > tol:
                raise ValidationError(
                    f"Column {j + 1} of the stochastic map sums to {total:.12g} instead of 1."
                )

        matrix = np.clip(matrix, 0, None)
        matrix.flags.writeable = False
        self._matrix = matrix

    @classmethod
    def identity(cls, n):
        r"""
        Return the map that reports every outcome unchanged.

        EXAMPLES::

            >>> StochasticMap.identity(3).matrix.tolist()
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]

        """
        return cls(np.eye(n))

    @classmethod
    def from_assignment(cls, assignment, rows):
        r"""
        Return the deterministic map sending input outcome ``j`` to output
        outcome ``assignment[j]`` (0-based).

        EXAMPLES::

            >>> StochasticMap.from_assignment([0, 0, 1], rows=2).matrix.tolist()
            [[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]

        """
        matrix = np.zeros((rows, len(assignment)))
        matrix[list(assignment), np.arange(len(assignment))] = 1
        return cls(matrix)

    @property
    def matrix(self):
        r"""
        Return the (read-only) matrix of this map.

        EXAMPLES::

            >>> StochasticMap([[1]]).matrix.flags.writeable
            False

        """
        return self._matrix

    @property
    def rows(self):
        r"""
        Return the number of output outcomes.

        EXAMPLES::

            >>> StochasticMap([[1, 1]]).rows
            1

        """
        return self._matrix.shape[0]

    @property
    def cols(self):
        r"""
        Return the number of input outcomes.

        EXAMPLES::

            >>> StochasticMap([[1, 1]]).cols
            2

        """
        return self._matrix.shape[1]

    def compose(self, other):
        r"""
        Return the map that first applies ``other`` and then this map.

        EXAMPLES::

            >>> merge = StochasticMap([[1, 1]])
            >>> merge.compose(StochasticMap.identity(2)).matrix.tolist()
            [[1.0, 1.0]]

        """
        if other.rows != self.cols:
            raise ValidationError(
                f"Cannot compose a map with {self.cols} inputs after a map with {other.rows} outputs."
            )
        return StochasticMap(self._matrix @ other._matrix)

    def direct_sum(self, other):
        r"""
        Return the block-diagonal map acting as this map on the first inputs
        and as ``other`` on the remaining inputs.

        EXAMPLES::

            >>> StochasticMap([[1, 1]]).direct_sum(StochasticMap.identity(1)).matrix.tolist()
            [[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]

        """
        matrix = np.zeros((self.rows + other.rows, self.cols + other.cols))
        matrix[: self.rows, : self.cols] = self._matrix
        matrix[self.rows :, self.cols :] = other._matrix
        return StochasticMap(matrix)

    def apply(self, distribution):
        r"""
        Return the image of the probability vector ``distribution``.

        EXAMPLES::

            >>> StochasticMap([[1, 1, 0], [0, 0, 1]]).apply([0.2, 0.3, 0.5]).tolist()
            [0.5, 0.5]

        """
        distribution = np.asarray(distribution, dtype=float)
        if distribution.shape != (self.cols,):
            raise ValidationError(
                f"Expected a distribution over {self.cols} outcomes but got shape {distribution.shape}."
            )
        return self._matrix @ distribution

    def __call__(self, povm):
        r"""
        Return the post-processing of ``povm`` by this map.

        EXAMPLES::

            >>> StochasticMap([[1, 1]])(Povm.create_example("basis")).effects[0].real.tolist()
            [[1.0, 0.0], [0.0, 1.0]]

        """
        return post_process(self, povm)

    def __eq__(self, other):
        r"""
        Return whether both maps have the same matrix.

        EXAMPLES::

            >>> StochasticMap.identity(2) == StochasticMap([[1, 0], [0, 1]])
            True

        """
        if not isinstance(other, StochasticMap):
            return NotImplemented
        return np.array_equal(self._matrix, other._matrix)

    def __repr__(self):
        return f"StochasticMap({self.rows}×{self.cols})"


class Povm:
    r"""
    A POVM on C^d given by its effects.

    Effects must be Hermitian. Unless ``check`` is disabled, they must also
    be positive semidefinite and sum to the identity.

    EXAMPLES::

        >>> Povm([np.eye(2)])
        Povm(dim=2, outcomes=1)

    Violations are reported with the offending magnitude::

        >>> Povm([np.diag([1.5, 0]), np.diag([-0.5, 1])])
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Effect 2 is not positive semidefinite, minimum eigenvalue -0.5 is below -1e-09.

    Use ``check=False`` to inspect invalid measurements::

        >>> Povm([np.diag([1.5, 0]), np.diag([-0.5, 1])], check=False).validate()
        Effect 2 is not positive semidefinite, minimum eigenvalue -0.5 is below -1e-09.

    """

    def __init__(self, effects, labels=None, check=True, tol_psd=TOL_PSD, tol_norm=TOL_NORM):
        effects = [np.array(effect, dtype=complex) for effect in effects]

        if not effects:
            raise ValidationError("A POVM needs at least one effect.")

        shape = effects[0].shape
        if len(shape) != 2 or shape[0] != shape[1] or shape[0] == 0:
            raise ValidationError(f"Effects must be square matrices but got shape {shape}.")

        for i, effect in enumerate(effects):
            if effect.shape != shape:
                raise ValidationError(
                    f"Effect {i + 1} has shape {effect.shape} but effect 1 has shape {shape}."
                )
            deviation = hermiticity_deviation(effect)
            if deviation > TOL_HERM:
                raise ValidationError(
                    f"Effect {i + 1} is not Hermitian, deviation {deviation:.3g} exceeds {TOL_HERM:.3g}."
                )

        effects = np.array(effects)
        effects = (effects + dagger(effects)) / 2
        effects.flags.writeable = False
        self._effects = effects

        labels = tuple(str(i + 1) for i in range(len(effects))) if labels is None else tuple(map(str, labels))
        if len(labels) != len(effects):
            raise ValidationError(f"Got {len(labels)} labels for {len(effects)} effects.")
        self._labels = labels

        if check:
            report = self.validate(tol_psd=tol_psd, tol_norm=tol_norm)
            if not report.ok:
                raise ValidationError(report.violations[0])

    @classmethod
    def create_example(cls, name, dim=2):
        r"""
        Return one of the named example POVMs.

        ``basis`` and ``anti-basis`` are the computational basis measurement
        on C^dim and its reversal, ``trine`` and ``tetrahedron`` are the
        qubit trine and SIC POVMs, ``trivial`` is the single-outcome POVM.

        EXAMPLES::

            >>> Povm.create_example("basis", dim=3)
            Povm(dim=3, outcomes=3)
            >>> Povm.create_example("tetrahedron").traces().round(12).tolist()
            [0.5, 0.5, 0.5, 0.5]
            >>> Povm.create_example("trivial", dim=4)
            Povm(dim=4, outcomes=1)

            >>> Povm.create_example("sic")
            Traceback (most recent call last):
            ...
            KeyError: "No example POVM 'sic'. Use one of basis, anti-basis, trine, tetrahedron, trivial."

        """
        if name == "basis":
            return cls([np.diag(row) for row in np.eye(dim)])
        if name == "anti-basis":
            return cls([np.diag(row) for row in np.eye(dim)[::-1]])
        if name == "trivial":
            return cls([np.eye(dim)])
        if name in ["trine", "tetrahedron"] and dim != 2:
            raise ValidationError(f"The {name} POVM is only defined for dim=2.")
        if name == "trine":
            angles = 2 * np.pi * np.arange(3) / 3
            vectors = [np.array([np.cos(angle), np.sin(angle)]) for angle in angles]
            return cls([2 / 3 * np.outer(v, v) for v in vectors])
        if name == "tetrahedron":
            paulis = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
            bloch = [
                (0, 0, 1),
                (2 * np.sqrt(2) / 3, 0, -1 / 3),
                (-np.sqrt(2) / 3, np.sqrt(2 / 3), -1 / 3),
                (-np.sqrt(2) / 3, -np.sqrt(2 / 3), -1 / 3),
            ]
            return cls(
                [(np.eye(2) + sum(n * sigma for n, sigma in zip(vector, paulis))) / 4 for vector in bloch]
            )

        raise KeyError(
            f"No example POVM '{name}'. Use one of basis, anti-basis, trine, tetrahedron, trivial."
        )

    @classmethod
    def random(cls, d, n, seed, rank=None):
        r"""
        Return a random POVM with ``n`` effects on C^d.

        Each effect is ``S^{-1/2} G G† S^{-1/2}`` for a Ginibre matrix ``G``
        with ``rank`` columns (a random rank per effect if not given) and
        ``S = Σ G G†``.

        EXAMPLES::

            >>> M = Povm.random(3, 5, seed=0)
            >>> M.validate()
            ok
            >>> Povm.random(3, 5, seed=0, rank=1).is_rank_one()
            True

        """
        rng = as_generator(seed)

        if rank is None:
            ranks = rng.integers(1, d + 1, size=n)
            if ranks.sum() < d:
                ranks[0] = d
        else:
            ranks = np.full(n, rank)

        if ranks.sum() < d:
            raise ValidationError(f"{n} effects of rank {rank} cannot sum to the identity on C^{d}.")

        factors = [rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r)) for r in ranks]
        positives = [G @ dagger(G) for G in factors]
        return cls(_normalize(positives), check=False)

    @classmethod
    def random_flat(cls, d, bases, seed):
        r"""
        Return the rank-one POVM formed by the columns of ``bases``
        Haar-random unitaries, each effect of magnitude ``1/bases``.

        EXAMPLES::

            >>> M = Povm.random_flat(2, 3, seed=0)
            >>> len(M), M.traces().round(12).tolist()
            (6, [0.333333333333, 0.333333333333, 0.333333333333, 0.333333333333, 0.333333333333, 0.333333333333])
            >>> M.validate()
            ok

        """
        rng = as_generator(seed)
        effects = []
        for _ in range(bases):
            U = haar_unitary(d, rng)
            effects.extend(np.outer(U[:, j], U[:, j].conj()) / bases for j in range(d))
        return cls(effects, check=False)

    @property
    def dim(self):
        r"""
        Return the dimension d of the Hilbert space.

        EXAMPLES::

            >>> Povm.create_example("basis", dim=5).dim
            5

        """
        return self._effects.shape[1]

    @property
    def effects(self):
        r"""
        Return the effects as a read-only array of shape (n, d, d).

        EXAMPLES::

            >>> Povm.create_example("basis").effects.shape
            (2, 2, 2)

        """
        return self._effects

    @property
    def labels(self):
        r"""
        Return the outcome labels.

        EXAMPLES::

            >>> Povm.create_example("trine").labels
            ('1', '2', '3')

        """
        return self._labels

    def __len__(self):
        return len(self._effects)

    def __repr__(self):
        return f"Povm(dim={self.dim}, outcomes={len(self)})"

    def traces(self):
        r"""
        Return the traces tr(M_i), i.e., the magnitudes of rank-one effects.

        EXAMPLES::

            >>> Povm.create_example("trine").traces().round(12).tolist()
            [0.666666666667, 0.666666666667, 0.666666666667]

        """
        return np.trace(self._effects, axis1=1, axis2=2).real

    def validate(self, tol_psd=TOL_PSD, tol_norm=TOL_NORM):
        r"""
        Return a :class:`ValidationReport` listing every violated invariant.

        EXAMPLES::

            >>> Povm.create_example("basis").validate()
            ok
            >>> Povm([np.eye(2), np.eye(2)], check=False).validate()
            Effects do not sum to the identity, ‖Σ M_i − I‖_F = 1.41 exceeds 2e-08.

        """
        return validate(self, tol_psd=tol_psd, tol_norm=tol_norm)

    def born(self, rho, tol_psd=TOL_PSD, tol_norm=TOL_NORM):
        r"""
        Return the outcome probabilities tr(ρ M_i).

        EXAMPLES::

            >>> Povm.create_example("basis").born(np.diag([1, 0])).tolist()
            [1.0, 0.0]
            >>> Povm.create_example("trine").born(np.diag([1, 0])).round(12).tolist()
            [0.666666666667, 0.166666666667, 0.166666666667]

        Invalid states are rejected::

            >>> Povm.create_example("basis").born(np.diag([1, 1]))
            Traceback (most recent call last):
            ...
            povmsim.errors.ValidationError: State has trace 2 instead of 1.

        """
        rho = state(rho, dim=self.dim, tol_psd=tol_psd, tol_norm=tol_norm)
        probabilities = np.einsum("ij,nji->n", rho, self._effects).real
        probabilities = np.clip(probabilities, 0, None)
        return probabilities / probabilities.sum()

    def depolarize(self, t):
        r"""
        Return the POVM with effects ``t M_i + (1 − t) tr(M_i)/d I``.

        EXAMPLES::

            >>> M = Povm.create_example("basis").depolarize(0.5)
            >>> [effect.real.diagonal().tolist() for effect in M.effects]
            [[0.75, 0.25], [0.25, 0.75]]
            >>> effect_distance(Povm.create_example("trine").depolarize(1), Povm.create_example("trine"))
            0.0

        The depolarizing maps form a semigroup::

            >>> M = Povm.random(3, 4, seed=1)
            >>> effect_distance(M.depolarize(0.5).depolarize(0.4), M.depolarize(0.2)) < 1e-10
            True

        """
        t = float(t)
        if not 0 <= t <= 1:
            raise ValidationError(f"Visibility must be in [0, 1] but got {t}.")

        d = self.dim
        identities = self.traces()[:, None, None] / d * np.eye(d)
        return Povm(t * self._effects + (1 - t) * identities, labels=self._labels, check=False)

    def is_projective(self, tol=TOL_PROJ):
        r"""
        Return whether the effects satisfy ``M_i M_j = δ_ij M_i``.

        EXAMPLES::

            >>> Povm.create_example("basis").is_projective()
            True
            >>> Povm.create_example("trine").is_projective()
            False

        Zero effects are allowed::

            >>> Povm([np.eye(2), np.zeros((2, 2))]).is_projective()
            True

        """
        for i, effect in enumerate(self._effects):
            products = np.einsum("ab,jbc->jac", effect, self._effects)
            products[i] -= effect
            if np.abs(products).max() > tol:
                return False
        return True

    def is_rank_one(self, tol=TOL_RANK):
        r"""
        Return whether every nonzero effect has rank one.

        EXAMPLES::

            >>> Povm.create_example("trine").is_rank_one()
            True
            >>> Povm.create_example("trivial").is_rank_one()
            False

        """
        return all(eig_hermitian(effect).rank(tol) <= 1 for effect in self._effects)

    def compact(self, tol=TOL_ZERO):
        r"""
        Return this POVM without its effects of trace below ``tol`` and the
        :class:`StochasticMap` that recovers this POVM from the compacted one.

        EXAMPLES::

            >>> M = Povm([np.eye(2), np.zeros((2, 2))])
            >>> compacted, recover = M.compact()
            >>> compacted, recover.matrix.tolist()
            (Povm(dim=2, outcomes=1), [[1.0], [0.0]])

        """
        keep = np.flatnonzero(self.traces() >= tol)
        if len(keep) == 0:
            raise ValidationError("A POVM with only zero effects cannot be compacted.")

        recover = np.zeros((len(self), len(keep)))
        recover[keep, np.arange(len(keep))] = 1

        compacted = Povm(self._effects[keep], labels=[self._labels[i] for i in keep], check=False)
        return compacted, StochasticMap(recover)

    def to_dict(self):
        r"""
        Return this POVM as a document with fields ``dim``, ``labels`` and
        ``effects``.

        EXAMPLES::

            >>> Povm.create_example("trivial", dim=1).to_dict()
            {'dim': 1, 'labels': ['1'], 'effects': [[[[1.0, 0.0]]]]}

        """
        from povmsim.local import encode_matrix

        return {
            "dim": self.dim,
            "labels": list(self._labels),
            "effects": [encode_matrix(effect) for effect in self._effects],
        }

    @classmethod
    def from_dict(cls, document, check=True):
        r"""
        Return the POVM described by ``document``, see :meth:`to_dict`.

        EXAMPLES::

            >>> M = Povm.create_example("trine")
            >>> effect_distance(Povm.from_dict(M.to_dict()), M)
            0.0

            >>> Povm.from_dict({"dim": 2})
            Traceback (most recent call last):
            ...
            povmsim.errors.FormatError: POVM document is missing the field 'effects'.

        """
        from povmsim.local import decode_matrix

        for key in ["dim", "effects"]:
            if key not in document:
                raise FormatError(f"POVM document is missing the field '{key}'.")

        effects = [decode_matrix(effect) for effect in document["effects"]]
        if any(effect.shape != (document["dim"], document["dim"]) for effect in effects):
            raise FormatError(f"POVM document has effects that are not {document['dim']}×{document['dim']}.")

        return cls(effects, labels=document.get("labels"), check=check)


def _normalize(positives):
    r"""
    Return ``S^{-1/2} P S^{-1/2}`` for every ``P`` where ``S = Σ P``.

    EXAMPLES::

        >>> np.allclose(sum(_normalize([np.eye(2), 3 * np.eye(2)])), np.eye(2))
        True

    """
    spectrum = eig_hermitian(sum(positives))
    if spectrum.eigenvalues[0] <= 0:
        raise ValidationError("Cannot normalize operators whose sum is singular.")

    V = spectrum.eigenvectors
    inverse_sqrt = (V / np.sqrt(spectrum.eigenvalues)) @ dagger(V)
    return [inverse_sqrt @ P @ inverse_sqrt for P in positives]


def validate(M, tol_psd=TOL_PSD, tol_norm=TOL_NORM):
    r"""
    Return a :class:`ValidationReport` of positivity and normalization of
    the effects of ``M``.

    EXAMPLES::

        >>> validate(Povm.create_example("basis"))
        ok

    The trine POVM sums to the identity::

        >>> validate(Povm.create_example("trine"))
        ok

    All violations are listed::

        >>> validate(Povm([-np.eye(2), -np.eye(2)], check=False))  # doctest: +NORMALIZE_WHITESPACE
        Effect 1 is not positive semidefinite, minimum eigenvalue -1 is below -1e-09.
        Effect 2 is not positive semidefinite, minimum eigenvalue -1 is below -1e-09.
        Effects do not sum to the identity, ‖Σ M_i − I‖_F = 4.24 exceeds 2e-08.

    """
    violations = []

    for i, effect in enumerate(M.effects):
        smallest = eigvals_hermitian(effect)[0]
        if smallest < -tol_psd:
            violations.append(
                f"Effect {i + 1} is not positive semidefinite, minimum eigenvalue {smallest:.3g} is below {-tol_psd:.3g}."
            )

    deviation = float(np.linalg.norm(M.effects.sum(axis=0) - np.eye(M.dim)))
    if deviation > tol_norm * M.dim:
        violations.append(
            f"Effects do not sum to the identity, ‖Σ M_i − I‖_F = {deviation:.3g} exceeds {tol_norm * M.dim:.3g}."
        )

    return ValidationReport(tuple(violations))


def state(rho, dim=None, tol_psd=TOL_PSD, tol_norm=TOL_NORM):
    r"""
    Return ``rho`` as a validated density matrix.

    EXAMPLES::

        >>> state(np.eye(2) / 2).real.tolist()
        [[0.5, 0.0], [0.0, 0.5]]

        >>> state(np.diag([1.5, -0.5]))
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: State is not positive semidefinite, minimum eigenvalue -0.5 is below -1e-09.

        >>> state(np.eye(3) / 3, dim=2)
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Expected a state on C^2 but got a 3×3 matrix.

    """
    rho = hermitian(rho)
    d = rho.shape[0]

    if dim is not None and d != dim:
        raise ValidationError(f"Expected a state on C^{dim} but got a {d}×{d} matrix.")

    smallest = eigvals_hermitian(rho)[0]
    if smallest < -tol_psd:
        raise ValidationError(
            f"State is not positive semidefinite, minimum eigenvalue {smallest:.3g} is below {-tol_psd:.3g}."
        )

    trace = np.trace(rho).real
    if abs(trace - 1) > tol_norm * d:
        raise ValidationError(f"State has trace {trace:.12g} instead of 1.")

    return rho


def depolarize_state(rho, t):
    r"""
    Return Φ_t(ρ) = tρ + (1 − t) tr(ρ)/d I.

    EXAMPLES::

        >>> depolarize_state(np.diag([1, 0]), 0.5).real.tolist()
        [[0.75, 0.0], [0.0, 0.25]]

    Depolarizing the state gives the statistics of the depolarized POVM::

        >>> from povmsim.linalg import random_state
        >>> def duality_error(seed):
        ...     M, rho = Povm.random(3, 4, seed), random_state(3, seed)
        ...     return np.abs(M.depolarize(0.3).born(rho) - M.born(depolarize_state(rho, 0.3))).max()
        >>> max(duality_error(seed) for seed in range(20)) < 1e-10
        True

    """
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    return t * rho + (1 - t) * np.trace(rho) / d * np.eye(d)


def post_process(Q, M):
    r"""
    Return the POVM with effects ``Σ_j q[i, j] M_j``.

    EXAMPLES::

        >>> M = Povm.create_example("trine")
        >>> effect_distance(post_process(StochasticMap.identity(3), M), M)
        0.0

    Merging the first two trine outcomes gives (I − M_3, M_3)::

        >>> merged = post_process(StochasticMap([[1, 1, 0], [0, 0, 1]]), M)
        >>> np.allclose(merged.effects[0], np.eye(2) - M.effects[2])
        True

    Merging everything gives the trivial POVM::

        >>> np.allclose(post_process(StochasticMap([[1, 1, 1]]), M).effects[0], np.eye(2))
        True

    """
    if Q.cols != len(M):
        raise ValidationError(
            f"Cannot post-process a POVM with {len(M)} outcomes by a map with {Q.cols} inputs."
        )
    return Povm(np.einsum("ij,jab->iab", Q.matrix, M.effects), check=False)


def mix(weights, povms, tol=TOL_STOCH):
    r"""
    Return the convex combination Σ_k p_k M^(k), effect by effect.

    POVMs with fewer outcomes are padded with zero effects.

    EXAMPLES::

        >>> basis = Povm.create_example("basis")
        >>> effect_distance(mix([1], [basis]), basis)
        0.0
        >>> [effect.real.tolist() for effect in mix([0.5, 0.5], [basis, Povm.create_example("anti-basis")]).effects]
        [[[0.5, 0.0], [0.0, 0.5]], [[0.5, 0.0], [0.0, 0.5]]]

    Mixtures of valid POVMs are valid::

        >>> mix([0.3, 0.7], [Povm.random(3, 4, 0), Povm.random(3, 6, 1)]).validate()
        ok

    """
    weights = np.asarray(weights, dtype=float)

    if len(weights) != len(povms) or not povms:
        raise ValidationError(f"Got {len(weights)} weights for {len(povms)} POVMs.")
    if weights.min() < -tol or abs(weights.sum() - 1) > tol:
        raise ValidationError(f"Weights {weights.tolist()} are not a probability vector.")
    if len({M.dim for M in povms}) != 1:
        raise ValidationError(f"Cannot mix POVMs of dimensions {sorted({M.dim for M in povms})}.")

    longest = max(povms, key=len)
    effects = np.zeros_like(longest.effects)
    for weight, M in zip(weights, povms):
        effects[: len(M)] += weight * M.effects

    return Povm(effects, labels=longest.labels, check=False)


def effect_distance(M, N):
    r"""
    Return max_i ‖M_i − N_i‖_F.

    EXAMPLES::

        >>> round(effect_distance(Povm.create_example("basis"), Povm.create_example("anti-basis")), 12)
        1.414213562373

    """
    if M.dim != N.dim or len(M) != len(N):
        raise ValidationError(
            f"Cannot compare a POVM with {len(M)} outcomes on C^{M.dim} to one with {len(N)} outcomes on C^{N.dim}."
        )
    return float(np.linalg.norm(M.effects - N.effects, axis=(1, 2)).max())


@dataclass(frozen=True)
class WitnessComponent:
    r"""
    A weighted, post-processed projective measurement.

    EXAMPLES::

        >>> basis = Povm.create_example("basis")
        >>> WitnessComponent(1.0, basis, StochasticMap.identity(2)).realize().effects.shape
        (2, 2, 2)

    """

    weight: float
    projective: Povm
    postproc: StochasticMap

    def realize(self):
        r"""
        Return the post-processed projective measurement (without weight).

        EXAMPLES::

            >>> basis = Povm.create_example("basis")
            >>> WitnessComponent(0.5, basis, StochasticMap([[1, 1]])).realize()
            Povm(dim=2, outcomes=1)

        """
        return post_process(self.postproc, self.projective)


@dataclass(frozen=True)
class WitnessReport:
    r"""
    The result of :func:`verify_sp_witness`.

    EXAMPLES::

        >>> M = Povm.create_example("basis")
        >>> verify_sp_witness(SpWitness.from_projective(M), M)
        WitnessReport(max_deviation=0, threshold=1e-08, passed=True)

    """

    max_deviation: float
    threshold: float
    deviations: tuple = field(repr=False, default=())
    projective: bool = field(repr=False, default=True)
    convex: bool = field(repr=False, default=True)

    @property
    def passed(self):
        return self.projective and self.convex and self.max_deviation <= self.threshold

    def __repr__(self):
        return f"WitnessReport(max_deviation={self.max_deviation:.3g}, threshold={self.threshold:.3g}, passed={self.passed})"

    def to_dict(self):
        r"""
        Return this report as a document of checks.

        EXAMPLES::

            >>> WitnessReport(0.5, 1e-8).to_dict()
            {'max_deviation': {'value': 0.5, 'threshold': 1e-08}, 'projective': True, 'convex': True, 'passed': False}

        """
        return {
            "max_deviation": {"value": self.max_deviation, "threshold": self.threshold},
            "projective": self.projective,
            "convex": self.convex,
            "passed": self.passed,
        }


class SpWitness:
    r"""
    A finite convex decomposition into post-processed projective
    measurements, i.e., a certificate that the POVM it realizes is
    projectively simulable.

    EXAMPLES::

        >>> basis = Povm.create_example("basis")
        >>> witness = SpWitness([(0.5, basis, StochasticMap.identity(2)), (0.5, Povm.create_example("anti-basis"), StochasticMap.identity(2))])
        >>> witness
        SpWitness(target_dim=2, components=2)
        >>> [effect.real.tolist() for effect in witness.realize().effects]
        [[[0.5, 0.0], [0.0, 0.5]], [[0.5, 0.0], [0.0, 0.5]]]

    Components must be projective::

        >>> SpWitness([(1, Povm.create_example("trine"), StochasticMap.identity(3))])
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Component 1 of the witness is not a projective measurement.

    """

    def __init__(self, components, target_dim=None, check=True, tol=TOL_STOCH):
        components = [
            component if isinstance(component, WitnessComponent) else WitnessComponent(float(component[0]), component[1], component[2])
            for component in components
        ]

        if not components:
            raise ValidationError("A witness needs at least one component.")

        target_dim = components[0].projective.dim if target_dim is None else target_dim
        arity = components[0].postproc.rows

        for k, component in enumerate(components):
            if component.projective.dim != target_dim:
                raise ValidationError(
                    f"Component {k + 1} of the witness acts on C^{component.projective.dim} instead of C^{target_dim}."
                )
            if component.postproc.cols != len(component.projective):
                raise ValidationError(
                    f"Component {k + 1} of the witness post-processes {component.postproc.cols} outcomes but measures {len(component.projective)}."
                )
            if component.postproc.rows != arity:
                raise ValidationError(
                    f"Component {k + 1} of the witness has {component.postproc.rows} outcomes but component 1 has {arity}."
                )

        if check:
            for k, component in enumerate(components):
                if component.weight <= 0:
                    raise ValidationError(f"Component {k + 1} of the witness has nonpositive weight {component.weight:.3g}.")
                if not component.projective.is_projective():
                    raise ValidationError(f"Component {k + 1} of the witness is not a projective measurement.")

            total = sum(component.weight for component in components)
            if abs(total - 1) > tol:
                raise ValidationError(f"Witness weights sum to {total:.12g} instead of 1.")

        self._components = tuple(components)
        self._target_dim = target_dim

    @classmethod
    def from_projective(cls, P):
        r"""
        Return the single-component witness of the projective measurement ``P``.

        EXAMPLES::

            >>> SpWitness.from_projective(Povm.create_example("basis"))
            SpWitness(target_dim=2, components=1)

        """
        return cls([(1.0, P, StochasticMap.identity(len(P)))])

    @classmethod
    def mixture(cls, weights, witnesses):
        r"""
        Return the witness realizing the convex combination of the POVMs
        realized by ``witnesses``.

        EXAMPLES::

            >>> basis = SpWitness.from_projective(Povm.create_example("basis"))
            >>> anti = SpWitness.from_projective(Povm.create_example("anti-basis"))
            >>> SpWitness.mixture([0.25, 0.75], [basis, anti]).weights.tolist()
            [0.25, 0.75]

        """
        components = [
            WitnessComponent(weight * component.weight, component.projective, component.postproc)
            for weight, witness in zip(weights, witnesses)
            for component in witness.components
        ]
        return cls(components, check=False).prune()

    @property
    def components(self):
        return self._components

    @property
    def target_dim(self):
        return self._target_dim

    @property
    def arity(self):
        r"""
        Return the number of outcomes of the realized POVM.

        EXAMPLES::

            >>> SpWitness.from_projective(Povm.create_example("basis", dim=3)).arity
            3

        """
        return self._components[0].postproc.rows

    @property
    def weights(self):
        return np.array([component.weight for component in self._components])

    def __len__(self):
        return len(self._components)

    def __repr__(self):
        return f"SpWitness(target_dim={self._target_dim}, components={len(self)})"

    def realize(self):
        r"""
        Return the POVM Σ_k p_k Q_k(P_k).

        EXAMPLES::

            >>> SpWitness.from_projective(Povm.create_example("basis")).realize()
            Povm(dim=2, outcomes=2)

        """
        effects = sum(component.weight * component.realize().effects for component in self._components)
        return Povm(effects, check=False)

    def post_process(self, Q):
        r"""
        Return the witness of ``Q`` applied to the POVM realized by this
        witness.

        EXAMPLES::

            >>> witness = SpWitness.from_projective(Povm.create_example("basis"))
            >>> witness.post_process(StochasticMap([[1, 1]])).arity
            1

        """
        return SpWitness(
            [WitnessComponent(component.weight, component.projective, Q.compose(component.postproc)) for component in self._components],
            target_dim=self._target_dim,
            check=False,
        )

    def prune(self, tol=TOL_PRUNE):
        r"""
        Return this witness without components of weight below ``tol``,
        renormalized.

        EXAMPLES::

            >>> basis = Povm.create_example("basis")
            >>> witness = SpWitness([(1 - 1e-16, basis, StochasticMap.identity(2)), (1e-16, basis, StochasticMap.identity(2))], check=False)
            >>> len(witness.prune())
            1

        """
        kept = [component for component in self._components if component.weight >= tol]
        if len(kept) < len(self._components):
            logger.warning(f"Pruned {len(self._components) - len(kept)} witness components of weight below {tol:.3g}.")

        total = sum(component.weight for component in kept)
        return SpWitness(
            [WitnessComponent(component.weight / total, component.projective, component.postproc) for component in kept],
            target_dim=self._target_dim,
            check=False,
        )

    def to_dict(self):
        r"""
        Return this witness as a document with fields ``target_dim`` and
        ``components``.

        EXAMPLES::

            >>> document = SpWitness.from_projective(Povm.create_example("trivial", dim=1)).to_dict()
            >>> document["components"][0]["postproc"]
            [[1.0]]

        """
        return {
            "target_dim": self._target_dim,
            "components": [
                {
                    "weight": component.weight,
                    "projective": component.projective.to_dict(),
                    "postproc": component.postproc.matrix.tolist(),
                }
                for component in self._components
            ],
        }

    @classmethod
    def from_dict(cls, document):
        r"""
        Return the witness described by ``document``, see :meth:`to_dict`.

        Weights are not required to be positive or to sum to one so that
        tampered witnesses can be loaded and rejected by
        :func:`verify_sp_witness`.

        EXAMPLES::

            >>> witness = SpWitness.from_projective(Povm.create_example("basis"))
            >>> SpWitness.from_dict(witness.to_dict())
            SpWitness(target_dim=2, components=1)

        """
        try:
            components = [
                WitnessComponent(
                    float(component["weight"]),
                    Povm.from_dict(component["projective"], check=False),
                    StochasticMap(component["postproc"]),
                )
                for component in document["components"]
            ]
            target_dim = document["target_dim"]
        except KeyError as e:
            raise FormatError(f"Witness document is missing the field {e}.") from e

        return cls(components, target_dim=target_dim, check=False)


def verify_sp_witness(w, target, tol=TOL_WITNESS, tol_proj=TOL_PROJ, tol_stoch=TOL_STOCH):
    r"""
    Return a :class:`WitnessReport` comparing the POVM realized by ``w`` to
    ``target``, effect by effect in Frobenius norm.

    The witness must be a convex decomposition: weights are positive and sum
    to one up to ``tol_stoch``. The projectivity of every component is
    checked again so that witnesses read from files are verified
    independently of their construction.

    EXAMPLES::

        >>> M = Povm.create_example("basis")
        >>> verify_sp_witness(SpWitness.from_projective(M), M).passed
        True

    A witness with weights that do not sum to one fails::

        >>> component = SpWitness.from_projective(M).components[0]
        >>> tampered = SpWitness([(1.01, component.projective, component.postproc)], check=False)
        >>> verify_sp_witness(tampered, M)
        WitnessReport(max_deviation=0.01, threshold=1e-08, passed=False)

    An affine combination that reproduces the target is not a convex
    decomposition and fails as well::

        >>> affine = SpWitness([(2.0, component.projective, component.postproc), (-1.0, component.projective, component.postproc)], check=False)
        >>> report = verify_sp_witness(affine, M)
        >>> report
        WitnessReport(max_deviation=0, threshold=1e-08, passed=False)
        >>> report.convex
        False

    """
    if w.target_dim != target.dim:
        raise ValidationError(f"Witness acts on C^{w.target_dim} but the target acts on C^{target.dim}.")
    if w.arity != len(target):
        raise ValidationError(f"Witness has {w.arity} outcomes but the target has {len(target)}.")

    realized = sum(component.weight * component.realize().effects for component in w.components)
    deviations = np.linalg.norm(realized - target.effects, axis=(1, 2))
    projective = all(component.projective.is_projective(tol=tol_proj) for component in w.components)
    convex = bool((w.weights > 0).all()) and abs(w.weights.sum() - 1) <= tol_stoch

    return WitnessReport(
        max_deviation=float(deviations.max()),
        threshold=tol,
        deviations=tuple(deviations.tolist()),
        projective=projective,
        convex=convex,
    )
