r"""
Naimark dilations of POVMs.

A rank-one POVM with n outcomes on C^d is realized by a projective
measurement on C^n after embedding C^d into the first d coordinates. A POVM
of higher rank is first fine-grained into its spectral pieces; when the
total rank fits into C^d ⊗ C^k it is realized on the system together with a
k-dimensional ancilla prepared in ``|0⟩``.

POVMs that are nearly projective, i.e., l ≤ d/2 rank-one effects
``A_i ψ_i ψ_i†`` and a remainder, can be dilated inside C^d itself up to a
leakage into the complement of ``W = span{ψ_i}``. Twirling that dilation
gives an exact finite convex decomposition into projective measurements.

EXAMPLES:

The trine POVM is realized by a projective measurement on C^3::

    >>> from povmsim.povm import Povm, effect_distance
    >>> M = Povm.create_example("trine")
    >>> dilation = dilate_rank_one(M)
    >>> dilation
    NaimarkDilation(base_dim=2, ambient_dim=3, layout='block')
    >>> dilation.projective.is_projective(), effect_distance(dilation.realized(), M) < 1e-12
    (True, True)

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
from dataclasses import dataclass

import numpy as np

from povmsim.errors import CertificationError, FormatError, InfeasibleError, ValidationError
from povmsim.linalg import (
    TOL_RANK,
    complement_basis,
    complete_isometry,
    dagger,
    eig_hermitian,
    heisenberg_weyl,
    random_state,
    span_basis,
)
from povmsim.povm import (
    TOL_NORM,
    TOL_WITNESS,
    TOL_ZERO,
    Povm,
    SpWitness,
    StochasticMap,
    WitnessComponent,
    verify_sp_witness,
)
from povmsim.seeding import generator

logger = logging.getLogger("povmsim")

DISCARDED_LABEL = "discarded"


@dataclass(frozen=True)
class NaimarkDilation:
    r"""
    A projective measurement on C^D and a post-processing ``coarse`` that
    together realize a POVM on C^d for states embedded into C^D.

    With ``layout="block"`` a state ρ is embedded as ``ρ ⊕ 0``. With
    ``layout="tensor"`` the ambient space is C^d ⊗ C^k with the index of
    ``|j⟩|a⟩`` being ``j + d·a`` and ρ is embedded as ``ρ ⊗ |0⟩⟨0|``, which
    is again the upper left block.

    EXAMPLES::

        >>> dilation = dilate_with_ancilla(Povm.create_example("trine"), k=2)
        >>> dilation
        NaimarkDilation(base_dim=2, ambient_dim=4, layout='tensor')
        >>> dilation.embed(np.eye(2) / 2).real.diagonal().tolist()
        [0.5, 0.5, 0.0, 0.0]

    """

    base_dim: int
    ambient_dim: int
    projective: Povm
    coarse: StochasticMap
    layout: str = "block"
    ancilla_dim: int = None

    def __repr__(self):
        return f"NaimarkDilation(base_dim={self.base_dim}, ambient_dim={self.ambient_dim}, layout={self.layout!r})"

    def embed(self, rho):
        r"""
        Return the state ``rho`` on C^d embedded into C^D.

        EXAMPLES::

            >>> dilate_rank_one(Povm.create_example("basis"), ambient=3).embed(np.diag([1, 0])).real.tolist()
            [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]

        """
        embedded = np.zeros((self.ambient_dim, self.ambient_dim), dtype=complex)
        embedded[: self.base_dim, : self.base_dim] = rho
        return embedded

    def simulate(self, rho):
        r"""
        Return the outcome distribution of the realized POVM on ``rho``,
        computed by measuring the embedded state and post-processing.

        EXAMPLES::

            >>> dilation = dilate_rank_one(Povm.create_example("trine"))
            >>> dilation.simulate(np.eye(2) / 2).round(12).tolist()
            [0.333333333333, 0.333333333333, 0.333333333333]

        """
        return self.coarse.apply(self.projective.born(self.embed(rho)))

    def realized(self):
        r"""
        Return the POVM on C^d realized by this dilation, i.e., the
        compressions of the projectors to C^d post-processed by ``coarse``.

        EXAMPLES::

            >>> basis = Povm.create_example("basis")
            >>> from povmsim.povm import effect_distance
            >>> effect_distance(dilate_rank_one(basis).realized(), basis) < 1e-12
            True

        """
        d = self.base_dim
        compressed = self.projective.effects[:, :d, :d]
        return Povm(np.einsum("ij,jab->iab", self.coarse.matrix, compressed), check=False)

    def max_born_deviation(self, M, states=100, seed=0):
        r"""
        Return the largest deviation between the Born probabilities of ``M``
        and :meth:`simulate` over ``states`` random density matrices.

        EXAMPLES::

            >>> M = Povm.create_example("trine")
            >>> dilate_rank_one(M).max_born_deviation(M) < 1e-11
            True

        """
        deviation = 0.0
        for k in range(states):
            rho = random_state(self.base_dim, generator(seed, k))
            deviation = max(deviation, float(np.abs(M.born(rho) - self.simulate(rho)).max()))
        return deviation

    def to_dict(self):
        r"""
        Return this dilation as a document.

        EXAMPLES::

            >>> document = dilate_with_ancilla(Povm.create_example("basis"), k=1).to_dict()
            >>> document["base_dim"], document["ambient_dim"], document["layout"], document["ancilla_dim"]
            (2, 2, 'tensor', 1)
            >>> document["coarse"]
            [[1.0, 0.0], [0.0, 1.0]]

        """
        document = {
            "base_dim": self.base_dim,
            "ambient_dim": self.ambient_dim,
            "layout": self.layout,
        }
        if self.layout == "tensor":
            document["ancilla_dim"] = self.ancilla_dim
        document["projective"] = self.projective.to_dict()
        document["coarse"] = self.coarse.matrix.tolist()
        return document

    @classmethod
    def from_dict(cls, document):
        r"""
        Return the dilation described by ``document``, see :meth:`to_dict`.

        EXAMPLES::

            >>> M = Povm.create_example("trine")
            >>> dilation = NaimarkDilation.from_dict(dilate_with_ancilla(M, k=2).to_dict())
            >>> dilation.max_born_deviation(M) < 1e-10
            True

        """
        try:
            return cls(
                base_dim=int(document["base_dim"]),
                ambient_dim=int(document["ambient_dim"]),
                projective=Povm.from_dict(document["projective"], check=False),
                coarse=StochasticMap(document["coarse"]),
                layout=document["layout"],
                ancilla_dim=document.get("ancilla_dim"),
            )
        except KeyError as e:
            raise FormatError(f"Dilation document is missing the field {e}.") from e


def _validated(M):
    report = M.validate()
    if not report.ok:
        raise ValidationError(report.violations[0])
    return M


def dilate_rank_one(M, ambient=None, tol=TOL_RANK):
    r"""
    Return the Naimark dilation of the rank-one POVM ``M`` with ``n``
    outcomes on C^ambient (C^n by default).

    The rows ``√α_i ψ_i†`` form an n×d isometry that is completed to an
    n×n unitary whose conjugated rows are the vectors ``φ_i`` of the
    projective measurement. Ambient dimensions beyond n form an additional
    outcome that is merged into the last outcome; it never occurs for
    embedded states.

    EXAMPLES:

    A basis measurement is its own dilation::

        >>> basis = Povm.create_example("basis")
        >>> from povmsim.povm import effect_distance
        >>> effect_distance(dilate_rank_one(basis).projective, basis) < 1e-12
        True

    The scalar POVM (1/2, 1/2) on C^1::

        >>> dilation = dilate_rank_one(Povm([[[0.5]], [[0.5]]]))
        >>> np.round(dilation.projective.effects.real, 12).tolist()
        [[[0.5, 0.5], [0.5, 0.5]], [[0.5, -0.5], [-0.5, 0.5]]]

    Extra ambient dimensions::

        >>> dilation = dilate_rank_one(Povm.create_example("trine"), ambient=5)
        >>> dilation.projective.labels, dilation.coarse.matrix.tolist()
        (('1', '2', '3', 'discarded'), [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0]])

    Random rank-one POVMs::

        >>> def check(d, n, seed):
        ...     M = Povm.random(d, n, seed, rank=1)
        ...     dilation = dilate_rank_one(M)
        ...     return dilation.projective.is_projective() and dilation.max_born_deviation(M, states=20) < 1e-10
        >>> all(check(d, n, seed) for seed, (d, n) in enumerate([(2, 2), (2, 5), (3, 7), (4, 9)]))
        True

    Effects must be rank-one and fit into the ambient space::

        >>> dilate_rank_one(Povm.create_example("trivial"))
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Effect 1 has rank 2 but a Naimark dilation needs rank-one effects. Fine-grain the POVM first.
        >>> dilate_rank_one(Povm.create_example("trine"), ambient=2)
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Ambient dimension 2 is smaller than the number of outcomes 3.

    """
    n, d = len(M), M.dim
    ambient = n if ambient is None else int(ambient)

    if ambient < n:
        raise ValidationError(f"Ambient dimension {ambient} is smaller than the number of outcomes {n}.")

    _validated(M)

    rows = np.zeros((n, d), dtype=complex)
    for i, effect in enumerate(M.effects):
        spectrum = eig_hermitian(effect)
        rank = spectrum.rank(tol)
        if rank > 1:
            raise ValidationError(
                f"Effect {i + 1} has rank {rank} but a Naimark dilation needs rank-one effects. Fine-grain the POVM first."
            )
        alpha = max(float(spectrum.eigenvalues[-1]), 0.0)
        rows[i] = np.sqrt(alpha) * spectrum.eigenvectors[:, -1].conj()

    U = complete_isometry(rows, tol=TOL_NORM * d)

    vectors = np.zeros((n, ambient), dtype=complex)
    vectors[:, :n] = U.conj()
    effects = list(np.einsum("ia,ib->iab", vectors, vectors.conj()))
    labels = list(M.labels)

    coarse = np.eye(n)
    if ambient > n:
        rest = np.zeros((ambient, ambient), dtype=complex)
        rest[n:, n:] = np.eye(ambient - n)
        effects.append(rest)
        labels.append(DISCARDED_LABEL)
        coarse = np.column_stack([coarse, np.eye(n)[:, -1]])

    logger.debug(f"Dilated a rank-one POVM with {n} outcomes on C^{d} into C^{ambient}.")

    return NaimarkDilation(
        base_dim=d,
        ambient_dim=ambient,
        projective=Povm(effects, labels=labels, check=False),
        coarse=StochasticMap(coarse),
    )


def dilate_with_ancilla(N, k):
    r"""
    Return a projective realization of ``N`` on C^d ⊗ C^k with the ancilla
    prepared in ``|0⟩``.

    ``N`` is fine-grained into the spectral pieces of its effects which are
    then dilated with :func:`dilate_rank_one`; the post-processing merges the
    pieces again.

    EXAMPLES:

    With a trivial ancilla a basis measurement is realized by itself::

        >>> basis = Povm.create_example("basis")
        >>> from povmsim.povm import effect_distance
        >>> effect_distance(dilate_with_ancilla(basis, k=1).projective, basis) < 1e-12
        True

    The trine POVM with a qubit ancilla::

        >>> trine = Povm.create_example("trine")
        >>> dilation = dilate_with_ancilla(trine, k=2)
        >>> len(dilation.projective), dilation.projective.is_projective(), dilation.max_born_deviation(trine) < 1e-10
        (4, True, True)

    The sub-POVMs of a partition simulation with blocks of at most d
    outcomes need a single qubit ancilla::

        >>> from povmsim.partition import Partition, build_ensemble
        >>> M = Povm.random_flat(3, 2, seed=4)
        >>> ensemble = build_ensemble(M, Partition(6, [[0, 3, 4], [1, 2, 5]]))
        >>> all(dilate_with_ancilla(sub, k=2).max_born_deviation(sub, states=20) < 1e-10 for sub in ensemble.subs)
        True

    The total rank must fit::

        >>> dilate_with_ancilla(Povm.create_example("trine"), k=1)
        Traceback (most recent call last):
        ...
        povmsim.errors.InfeasibleError: Effects of total rank 3 do not fit into C^2 ⊗ C^1.

    """
    from povmsim.finegrain import spectral_refine

    d = N.dim
    k = int(k)
    if k < 1:
        raise ValidationError(f"The ancilla dimension must be positive but got {k}.")

    refinement = spectral_refine(N)
    pieces = len(refinement.refined)
    if pieces > d * k:
        raise InfeasibleError(f"Effects of total rank {pieces} do not fit into C^{d} ⊗ C^{k}.")

    dilation = dilate_rank_one(refinement.refined, ambient=d * k)

    return NaimarkDilation(
        base_dim=d,
        ambient_dim=d * k,
        projective=dilation.projective,
        coarse=refinement.recover.compose(dilation.coarse),
        layout="tensor",
        ancilla_dim=k,
    )


def nearly_projective(amplitudes, vectors):
    r"""
    Return the POVM with effects ``A_i ψ_i ψ_i†`` for the given amplitudes
    and (normalized) vectors, followed by the remainder effect.

    EXAMPLES::

        >>> N = nearly_projective([0.5], [[1, 0]])
        >>> [effect.real.diagonal().tolist() for effect in N.effects]
        [[0.5, 0.0], [0.5, 1.0]]

    """
    vectors = [np.asarray(v, dtype=complex) / np.linalg.norm(v) for v in vectors]
    d = len(vectors[0])
    effects = [A * np.outer(v, v.conj()) for A, v in zip(amplitudes, vectors)]
    return Povm(effects + [np.eye(d) - sum(effects)])


def nearly_projective_form(N, tol=TOL_RANK):
    r"""
    Return the amplitudes ``A_i`` and unit vectors ``ψ_i`` of the first
    l = |N| − 1 effects ``A_i ψ_i ψ_i†`` of the nearly projective POVM ``N``.

    EXAMPLES::

        >>> amplitudes, vectors = nearly_projective_form(nearly_projective([0.25], [[0, 1j]]))
        >>> amplitudes.tolist(), np.abs(vectors).round(12).tolist()
        ([0.25], [[0.0, 1.0]])

    Only l ≤ d/2 rank-one effects are supported::

        >>> nearly_projective_form(Povm.create_example("trine"))
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: A nearly projective POVM on C^2 has at most 1 rank-one outcomes but got 2.

        >>> nearly_projective_form(Povm([np.zeros((2, 2)), np.eye(2)]))
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Effect 1 of a nearly projective POVM is zero. Compact the POVM first.

    """
    d, l = N.dim, len(N) - 1

    if l < 1:
        raise ValidationError("A nearly projective POVM needs at least one rank-one outcome and the remainder.")
    if 2 * l > d:
        raise ValidationError(f"A nearly projective POVM on C^{d} has at most {d // 2} rank-one outcomes but got {l}.")

    _validated(N)

    amplitudes = np.zeros(l)
    vectors = np.zeros((l, d), dtype=complex)
    for i in range(l):
        spectrum = eig_hermitian(N.effects[i])
        if spectrum.eigenvalues[-1] <= TOL_ZERO:
            raise ValidationError(f"Effect {i + 1} of a nearly projective POVM is zero. Compact the POVM first.")
        if spectrum.rank(tol) > 1:
            raise ValidationError(
                f"Effect {i + 1} of a nearly projective POVM has rank {spectrum.rank(tol)} instead of 1."
            )
        amplitudes[i] = min(float(spectrum.eigenvalues[-1]), 1.0)
        vectors[i] = spectrum.eigenvectors[:, -1]

    return amplitudes, vectors


def twirl_average(B, W_basis):
    r"""
    Return ``P_W B P_W + tr(B P_W⊥)/|W⊥| · P_W⊥``, the average of ``U B U†``
    over unitaries ``e^{iφ} P_W ⊕ V`` with a uniform phase and a Haar random
    unitary V on the complement of ``W = span(W_basis)``.

    EXAMPLES::

        >>> np.allclose(twirl_average(np.eye(2), [[1, 0]]), np.eye(2))
        True
        >>> np.allclose(twirl_average([[0, 1], [0, 0]], [[1, 0]]), 0)
        True
        >>> twirl_average(np.diag([0, 1, 0]), [[1, 0, 0]]).real.diagonal().tolist()
        [0.0, 0.5, 0.5]

    ``W`` must be a proper subspace::

        >>> twirl_average(np.eye(2), [[1, 0], [0, 1]])
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Cannot twirl over the complement of a subspace of full dimension 2.

    """
    B = np.asarray(B, dtype=complex)
    d = B.shape[0]

    W = span_basis(W_basis)
    k = d - W.shape[1]
    if k == 0:
        raise ValidationError(f"Cannot twirl over the complement of a subspace of full dimension {d}.")

    P = W @ dagger(W)
    perp = np.eye(d) - P
    return P @ B @ P + np.trace(B @ perp) / k * perp


@dataclass(frozen=True)
class DeficientNaimarkResult:
    r"""
    The projectively simulable POVM ``F`` attached to a nearly projective
    POVM, the projective measurement ``PW`` on C^d whose compression to W
    realizes the nearly projective POVM, and a witness for ``F``.

    EXAMPLES::

        >>> result = deficient_naimark(nearly_projective([0.5], [[1, 0]]))
        >>> result
        DeficientNaimarkResult(W_dim=1, Wperp_dim=1, components=2)
        >>> [effect.real.tolist() for effect in result.F.effects]
        [[[0.5, 0.0], [0.0, 0.5]], [[0.5, 0.0], [0.0, 0.5]]]

    """

    F: Povm
    PW: Povm
    witness: SpWitness
    W_dim: int
    Wperp_dim: int
    amplitudes: np.ndarray
    vectors: np.ndarray
    W_basis: np.ndarray

    def __repr__(self):
        return f"DeficientNaimarkResult(W_dim={self.W_dim}, Wperp_dim={self.Wperp_dim}, components={len(self.witness)})"

    def leakage(self):
        r"""
        Return ``tr(φ_i φ_i† P_W)`` for the rank-one projectors of ``PW``;
        they agree with the amplitudes ``A_i``.

        EXAMPLES::

            >>> result = deficient_naimark(nearly_projective([0.6, 0.5], np.eye(4)[:2]))
            >>> result.leakage().round(12).tolist()
            [0.6, 0.5]

        """
        P = self.W_basis @ dagger(self.W_basis)
        l = len(self.amplitudes)
        return np.einsum("iab,ba->i", self.PW.effects[:l], P).real

    def purification_error(self):
        r"""
        Return the largest ``‖P_W φ_i φ_i† P_W − A_i ψ_i ψ_i†‖_F``.

        EXAMPLES::

            >>> deficient_naimark(nearly_projective([0.3], [[1, 1, 1]])).purification_error() < 1e-10
            True

        """
        P = self.W_basis @ dagger(self.W_basis)
        l = len(self.amplitudes)
        target = self.amplitudes[:, None, None] * np.einsum("ia,ib->iab", self.vectors, self.vectors.conj())
        return float(np.linalg.norm(P @ self.PW.effects[:l] @ P - target, axis=(1, 2)).max())


def deficient_naimark(N, tol=TOL_WITNESS):
    r"""
    Return the :class:`DeficientNaimarkResult` of the nearly projective
    POVM ``N``.

    The POVM ``N`` compressed to W is fine-grained to rank one and dilated
    inside C^d in a basis adapted to W ⊕ W⊥. The witness is the uniform
    mixture of ``U PW U†`` over ``U = ±P_W ⊕ V`` with V ranging over the
    Heisenberg–Weyl group of W⊥.

    Raises a :class:`~povmsim.errors.CertificationError` when the witness
    deviates from F by more than ``tol``.

    EXAMPLES:

    A single effect ``|0⟩⟨0|/2`` on a qubit::

        >>> from povmsim.povm import verify_sp_witness, effect_distance
        >>> result = deficient_naimark(nearly_projective([0.5], [[1, 0]]))
        >>> verify_sp_witness(result.witness, result.F).passed
        True

    Projective inputs need no twirl::

        >>> result = deficient_naimark(nearly_projective([1, 1], np.eye(4)[:2]))
        >>> effect_distance(result.F, nearly_projective([1, 1], np.eye(4)[:2])) < 1e-12
        True
        >>> all(effect_distance(component.projective, result.PW) < 1e-12 for component in result.witness.components)
        True

    Random orthonormal vectors in C^4::

        >>> from povmsim.linalg import haar_unitary
        >>> psi = haar_unitary(4, 3).T[:2]
        >>> result = deficient_naimark(nearly_projective([0.6, 0.5], psi))
        >>> len(result.witness), verify_sp_witness(result.witness, result.F, tol=1e-9).passed
        (8, True)

    The remainder follows its closed form and the projectors leak exactly
    ``1 − A_i`` into W⊥::

        >>> def check(d, l, seed):
        ...     rng = generator(seed)
        ...     psi = rng.normal(size=(l, d)) + 1j * rng.normal(size=(l, d))
        ...     psi /= np.linalg.norm(psi, axis=1)[:, None]
        ...     G = sum(np.outer(v, v.conj()) for v in psi)
        ...     amplitudes = rng.uniform(0.2, 1, size=l) / max(1.0, float(np.linalg.eigvalsh(G).max()))
        ...     result = deficient_naimark(nearly_projective(amplitudes, psi))
        ...     k = result.Wperp_dim
        ...     perp = np.eye(d) - result.W_basis @ result.W_basis.conj().T
        ...     remainder = (np.eye(d) - perp - sum(A * np.outer(v, v.conj()) for A, v in zip(result.amplitudes, result.vectors))
        ...         + (1 - np.sum(1 - result.amplitudes) / k) * perp)
        ...     return (np.linalg.norm(result.F.effects[-1] - remainder) < 1e-10
        ...         and np.abs(result.leakage() - result.amplitudes).max() < 1e-10
        ...         and result.purification_error() < 1e-10
        ...         and verify_sp_witness(result.witness, result.F).passed)
        >>> all(check(d, l, seed) for seed, (d, l) in enumerate([(2, 1), (4, 2), (5, 2), (6, 3), (8, 4), (10, 3)]))
        True

    The witness is verified against ``tol``::

        >>> deficient_naimark(nearly_projective([0.5], [[1, 0]]), tol=-1)  # doctest: +ELLIPSIS
        Traceback (most recent call last):
        ...
        povmsim.errors.CertificationError: Witness of the dimension-deficient dilation deviates by ... which exceeds -1.

    """
    amplitudes, vectors = nearly_projective_form(N)
    d, l = N.dim, len(amplitudes)

    W = span_basis(vectors)
    perp = complement_basis(W)
    w, k = W.shape[1], perp.shape[1]
    adapted = np.column_stack([W, perp])

    # N compressed to W in the coordinates of W
    local = np.einsum("ia,ib->iab", vectors @ W.conj(), (vectors @ W.conj()).conj()) * amplitudes[:, None, None]
    remainder = eig_hermitian(np.eye(w) - local.sum(axis=0))
    pieces = [
        eigenvalue * np.outer(v, v.conj())
        for eigenvalue, v in zip(remainder.eigenvalues, remainder.eigenvectors.T)
        if eigenvalue > TOL_ZERO
    ]
    inner = Povm(list(local) + pieces, check=False)

    dilation = dilate_rank_one(inner, ambient=d)
    rank_one = adapted @ dilation.projective.effects[:l] @ dagger(adapted)
    PW = Povm(list(rank_one) + [np.eye(d) - rank_one.sum(axis=0)], labels=N.labels, check=False)

    P_perp = perp @ dagger(perp)
    psi = np.einsum("ia,ib->iab", vectors, vectors.conj())
    F_effects = amplitudes[:, None, None] * psi + ((1 - amplitudes) / k)[:, None, None] * P_perp
    F = Povm(list(F_effects) + [np.eye(d) - F_effects.sum(axis=0)], labels=N.labels, check=False)

    P_W = W @ dagger(W)
    identity = StochasticMap.identity(l + 1)
    weight = 1 / (2 * k * k)
    components = []
    for sign in [1, -1]:
        for V in heisenberg_weyl(k):
            U = sign * P_W + perp @ V @ dagger(perp)
            twirled = U @ PW.effects @ dagger(U)
            components.append(WitnessComponent(weight, Povm(twirled, labels=N.labels, check=False), identity))

    witness = SpWitness(components, target_dim=d)

    report = verify_sp_witness(witness, F, tol=tol)
    if not report.passed:
        raise CertificationError(
            f"Witness of the dimension-deficient dilation deviates by {report.max_deviation:.3g} which exceeds {tol:.3g}."
        )

    logger.debug(f"Dimension-deficient dilation with |W|={w} and |W⊥|={k} has {len(components)} witness components.")

    return DeficientNaimarkResult(
        F=F,
        PW=PW,
        witness=witness,
        W_dim=w,
        Wperp_dim=k,
        amplitudes=amplitudes,
        vectors=vectors,
        W_basis=W,
    )
