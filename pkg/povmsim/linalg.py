r"""
Dense complex linear algebra used throughout povmsim.

Matrices are plain numpy arrays. Hermitian inputs are validated with
:func:`hermitian`. Spectral decompositions (ranks, projectors, rank-one
pieces) come from the cyclic Jacobi solver :func:`eig_hermitian` which is
exact enough and fully deterministic at the dimensions povmsim works with.
Norms and positivity checks only need eigenvalues and use
:func:`eigvals_hermitian`.

EXAMPLES:

The spectrum of a Pauli matrix::

    >>> import numpy as np
    >>> spectrum = eig_hermitian([[0, 1], [1, 0]])
    >>> spectrum.eigenvalues.round(12).tolist()
    [-1.0, 1.0]
    >>> np.allclose(spectrum.eigenvectors[:, 0], np.array([1, -1]) / np.sqrt(2))
    True

The operator norm of a Hermitian matrix::

    >>> op_norm(np.diag([0.5, -2.0]))
    2.0

A unitary completing a single column::

    >>> U = complete_isometry(np.array([1, 1]) / np.sqrt(2))
    >>> np.allclose(U[:, 1], np.array([1, -1]) / np.sqrt(2))
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
from dataclasses import dataclass

import numpy as np

from povmsim.errors import ValidationError
from povmsim.seeding import as_generator

logger = logging.getLogger("povmsim")

TOL_HERM = 1e-10
TOL_ORTH = 1e-10
TOL_RECON = 1e-9
TOL_RANK = 1e-9

# Jacobi sweeps stop once the off-diagonal Frobenius mass drops below this
# (relative to max(1, ‖H‖_F)).
JACOBI_OFF_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


def dagger(A):
    r"""
    Return the conjugate transpose of ``A`` (of the last two axes).

    EXAMPLES::

        >>> A = np.array([[1, 1j], [0, 2]])
        >>> np.array_equal(dagger(A), A.conj().T)
        True

    """
    return np.conjugate(np.swapaxes(np.asarray(A), -1, -2))


def hermitian(H, tol=TOL_HERM):
    r"""
    Return ``H`` as a read-only complex Hermitian matrix.

    The input is symmetrized after checking that it deviates from its
    conjugate transpose by at most ``tol`` in every entry.

    EXAMPLES::

        >>> hermitian([[1, 2j], [-2j, 0]]).dtype
        dtype('complex128')

        >>> hermitian([[1, 2], [0, 1]])
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Matrix is not Hermitian, deviation 2 exceeds 1e-10.

        >>> hermitian([1, 2])
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Expected a square matrix but got shape (2,).

    """
    H = np.array(H, dtype=complex)

    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValidationError(f"Expected a square matrix but got shape {H.shape}.")

    deviation = hermiticity_deviation(H)
    if deviation > tol:
        raise ValidationError(
            f"Matrix is not Hermitian, deviation {deviation:.3g} exceeds {tol:.3g}."
        )

    H = (H + H.conj().T) / 2
    H.flags.writeable = False
    return H


def hermiticity_deviation(H):
    r"""
    Return the largest entrywise deviation of ``H`` from ``H†``.

    EXAMPLES::

        >>> hermiticity_deviation(np.array([[0, 1], [0, 0]]))
        1.0

    """
    H = np.asarray(H)
    if H.size == 0:
        return 0.0
    return float(np.max(np.abs(H - H.conj().T)))


def normalize_phase(v):
    r"""
    Return ``v`` multiplied by a phase so that its first component of
    largest modulus is real and nonnegative.

    EXAMPLES::

        >>> normalize_phase(np.array([0.5j, -1j])).tolist()
        [(-0.5+0j), (1+0j)]

    The zero vector is returned unchanged::

        >>> normalize_phase(np.zeros(2)).tolist()
        [0.0, 0.0]

    """
    v = np.asarray(v)
    moduli = np.abs(v)
    largest = moduli.max(initial=0.0)
    if largest == 0:
        return v

    k = int(np.flatnonzero(moduli >= largest * (1 - 1e-9))[0])
    return v * (np.conj(v[k]) / moduli[k])


@dataclass(frozen=True)
class Spectrum:
    r"""
    Eigenvalues in ascending order and the corresponding orthonormal
    eigenvectors as columns.

    EXAMPLES::

        >>> spectrum = eig_hermitian(np.diag([2.0, -1.0]))
        >>> spectrum.eigenvalues.tolist()
        [-1.0, 2.0]
        >>> np.allclose(spectrum.reconstruct(), np.diag([2.0, -1.0]))
        True

    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        r"""
        Return Σ λ_k v_k v_k†.

        EXAMPLES::

            >>> np.allclose(eig_hermitian(np.eye(3)).reconstruct(), np.eye(3))
            True

        """
        return (self.eigenvectors * self.eigenvalues) @ dagger(self.eigenvectors)

    def cutoff(self, tol=TOL_RANK):
        r"""
        Return the eigenvalue threshold below which eigenvalues count as zero,
        i.e., ``tol`` times the largest eigenvalue magnitude (or ``tol`` for the
        zero matrix).

        EXAMPLES::

            >>> eig_hermitian(np.diag([4.0, 0.0])).cutoff()
            4e-09

        """
        largest = np.abs(self.eigenvalues).max(initial=0.0)
        return tol * (largest if largest > 0 else 1.0)

    def rank(self, tol=TOL_RANK):
        r"""
        Return the number of eigenvalues above :meth:`cutoff`.

        EXAMPLES::

            >>> eig_hermitian(np.diag([1.0, 1e-14, 0.5])).rank()
            2

        """
        return int(np.count_nonzero(np.abs(self.eigenvalues) > self.cutoff(tol)))


def eig_hermitian(H, tol=TOL_HERM):
    r"""
    Return the :class:`Spectrum` of the Hermitian matrix ``H``.

    The spectrum is computed with cyclic Jacobi rotations. Eigenvalues are
    sorted ascending (stably, so the order inside a degenerate cluster is the
    deterministic order of the sweeps) and every eigenvector is phase
    normalized with :func:`normalize_phase`.

    EXAMPLES::

        >>> eig_hermitian(np.eye(3)).eigenvalues.tolist()
        [1.0, 1.0, 1.0]

    A complex Hermitian matrix::

        >>> spectrum = eig_hermitian([[2, 1j], [-1j, 2]])
        >>> spectrum.eigenvalues.round(12).tolist()
        [1.0, 3.0]
        >>> np.allclose(dagger(spectrum.eigenvectors) @ spectrum.eigenvectors, np.eye(2))
        True

    Reconstruction and orthonormality hold on random inputs::

        >>> def check(d, seed):
        ...     H = random_hermitian(d, seed)
        ...     spectrum = eig_hermitian(H)
        ...     V = spectrum.eigenvectors
        ...     return (np.linalg.norm(spectrum.reconstruct() - H) <= TOL_RECON * np.linalg.norm(H)
        ...         and np.linalg.norm(dagger(V) @ V - np.eye(d)) <= TOL_ORTH * d)
        >>> all(check(d, seed) for d in range(1, 17) for seed in range(3))
        True

    Identical inputs give identical outputs::

        >>> H = random_hermitian(5, 1)
        >>> np.array_equal(eig_hermitian(H).eigenvectors, eig_hermitian(H).eigenvectors)
        True

    Non-Hermitian input is rejected::

        >>> eig_hermitian([[0, 1], [0, 0]])
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Matrix is not Hermitian, deviation 1 exceeds 1e-10.

    """
    A = np.array(hermitian(H, tol=tol))
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(A)))

    for _ in range(JACOBI_MAX_SWEEPS):
        if np.linalg.norm(A - np.diag(np.diag(A))) < JACOBI_OFF_TOL * scale:
            break

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                b = abs(apq)
                if b < 1e-300:
                    continue

                phase = apq / b
                theta = (A[q, q].real - A[p, p].real) / (2 * b)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1))
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                J = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])

                A[:, [p, q]] = A[:, [p, q]] @ J
                A[[p, q], :] = J.conj().T @ A[[p, q], :]
                A[p, q] = A[q, p] = 0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, [p, q]] = V[:, [p, q]] @ J
    else:
        logger.warning(
            f"Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps on a {n}×{n} matrix."
        )

    eigenvalues = np.diag(A).real
    order = np.argsort(eigenvalues, kind="stable")
    eigenvectors = np.column_stack([normalize_phase(V[:, k]) for k in order]) if n else V

    eigenvalues = eigenvalues[order]
    eigenvalues.flags.writeable = False
    eigenvectors.flags.writeable = False
    return Spectrum(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def eigvals_hermitian(H, tol=TOL_HERM):
    r"""
    Return the eigenvalues of the Hermitian matrix ``H`` in ascending order.

    Only the eigenvalues are computed (with LAPACK), which is what norms and
    positivity checks need. Use :func:`eig_hermitian` for eigenvectors.

    EXAMPLES::

        >>> eigvals_hermitian([[2, 1j], [-1j, 2]]).round(12).tolist()
        [1.0, 3.0]

    The values agree with the Jacobi solver::

        >>> H = random_hermitian(6, 2)
        >>> bool(np.abs(eigvals_hermitian(H) - eig_hermitian(H).eigenvalues).max() < 1e-10)
        True

    """
    from scipy.linalg import eigvalsh

    A = hermitian(H, tol=tol)
    if A.size == 0:
        return np.zeros(0)
    return eigvalsh(A)


def op_norm(H, tol=TOL_HERM):
    r"""
    Return the operator norm, i.e., the largest eigenvalue modulus, of the
    Hermitian matrix ``H``.

    EXAMPLES::

        >>> op_norm(np.eye(4))
        1.0
        >>> op_norm(np.zeros((2, 2)))
        0.0

    For the trine POVM, ``‖I − M_3‖ = 1``::

        >>> psi = np.array([1, 0])
        >>> phi = np.array([-1 / 2, np.sqrt(3) / 2])
        >>> round(op_norm(2 / 3 * (np.outer(psi, psi) + np.outer(phi, phi))), 12)
        1.0

    """
    eigenvalues = eigvals_hermitian(H, tol=tol)
    if eigenvalues.size == 0:
        return 0.0
    return float(max(abs(eigenvalues[0]), abs(eigenvalues[-1])))


def complete_isometry(V, tol=TOL_ORTH):
    r"""
    Return an n×n unitary whose first d columns are the orthonormal columns
    of the n×d matrix ``V``.

    Missing columns are obtained by Gram–Schmidt on the standard basis
    vector with the largest component outside the current span.

    EXAMPLES::

        >>> complete_isometry(np.eye(2)).tolist()
        [[(1+0j), 0j], [0j, (1+0j)]]

    The isometry of the trine POVM::

        >>> angles = [0, 2 * np.pi / 3, 4 * np.pi / 3]
        >>> V = np.array([np.sqrt(2 / 3) * np.array([np.cos(a), np.sin(a)]) for a in angles])
        >>> U = complete_isometry(V)
        >>> np.linalg.norm(dagger(U) @ U - np.eye(3)) < 1e-12
        True
        >>> np.array_equal(U[:, :2], V)
        True

    Completion of random isometries::

        >>> def check(n, d, seed):
        ...     V = haar_unitary(n, seed)[:, :d]
        ...     U = complete_isometry(V)
        ...     return np.linalg.norm(dagger(U) @ U - np.eye(n)) <= 1e-10 and np.array_equal(U[:, :d], V)
        >>> all(check(n, d, seed) for seed, (n, d) in enumerate([(2, 1), (5, 3), (16, 16), (40, 7), (64, 16)]))
        True

    Columns must be orthonormal::

        >>> complete_isometry(np.array([[1, 1], [0, 1]]))
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Columns are not orthonormal, ‖V†V − I‖_F = 1.41 exceeds 1e-10.

    """
    V = np.array(V, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    n, d = V.shape

    if n < d:
        raise ValidationError(f"Cannot complete {d} columns in dimension {n}.")

    deviation = float(np.linalg.norm(dagger(V) @ V - np.eye(d)))
    if deviation > tol:
        raise ValidationError(
            f"Columns are not orthonormal, ‖V†V − I‖_F = {deviation:.3g} exceeds {tol:.3g}."
        )

    U = np.zeros((n, n), dtype=complex)
    U[:, :d] = V

    for k in range(d, n):
        span = U[:, :k]
        residuals = np.eye(n) - span @ dagger(span)
        w = residuals[:, int(np.argmax(np.linalg.norm(residuals, axis=0)))]
        # second pass of Gram–Schmidt
        w = w - span @ (dagger(span) @ w)
        U[:, k] = normalize_phase(w / np.linalg.norm(w))

    return U


def heisenberg_weyl(k):
    r"""
    Return the k² clock-and-shift unitaries ``X^a Z^b`` on C^k, ordered by
    ``a`` and then ``b``.

    They form a unitary 1-design: averaging ``W B W†`` over them gives
    ``tr(B)/k · I``.

    EXAMPLES::

        >>> heisenberg_weyl(1)
        [array([[1.+0.j]])]

    For a qubit these are the Pauli matrices up to phase::

        >>> I, Z, X, XZ = heisenberg_weyl(2)
        >>> np.allclose(Z, np.diag([1, -1])), np.allclose(X, [[0, 1], [1, 0]]), np.allclose(XZ, X @ Z)
        (True, True, True)

    The twirl identity::

        >>> def twirl_error(k, seed):
        ...     B = random_hermitian(k, seed)
        ...     return np.linalg.norm(twirl(B, heisenberg_weyl(k)) - np.trace(B) / k * np.eye(k))
        >>> max(twirl_error(k, seed) for k in range(1, 9) for seed in range(100)) <= 1e-10
        True

    """
    k = int(k)
    if k < 1:
        raise ValidationError(f"Heisenberg–Weyl group needs k ≥ 1 but got {k}.")

    X = np.roll(np.eye(k, dtype=complex), 1, axis=0)
    Z = np.diag(np.exp(2j * np.pi * np.arange(k) / k))

    return [
        np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b)
        for a in range(k)
        for b in range(k)
    ]


def twirl(B, unitaries):
    r"""
    Return the uniform average of ``U B U†`` over ``unitaries``.

    EXAMPLES::

        >>> np.allclose(twirl(np.diag([1, 0]), heisenberg_weyl(2)), np.eye(2) / 2)
        True

    """
    B = np.asarray(B)
    return sum(U @ B @ dagger(U) for U in unitaries) / len(unitaries)


def span_basis(vectors, tol=TOL_RANK):
    r"""
    Return an orthonormal basis (as columns) of the span of ``vectors``.

    The basis vectors are eigenvectors of ``Σ v v†`` whose eigenvalues
    exceed the rank cutoff, in order of decreasing eigenvalue.

    EXAMPLES::

        >>> span_basis([np.array([1, 1, 0]), np.array([2, 2, 0])]).shape
        (3, 1)

    """
    A = np.column_stack([np.asarray(v, dtype=complex).ravel() for v in vectors])
    spectrum = eig_hermitian(A @ dagger(A))
    keep = spectrum.eigenvalues > spectrum.cutoff(tol)
    return spectrum.eigenvectors[:, keep][:, ::-1]


def complement_basis(basis):
    r"""
    Return an orthonormal basis (as columns) of the orthogonal complement of
    the span of the orthonormal columns ``basis``.

    EXAMPLES::

        >>> complement_basis(np.array([[1], [0], [0]])).shape
        (3, 2)

    """
    basis = np.asarray(basis, dtype=complex)
    spectrum = eig_hermitian(basis @ dagger(basis))
    return spectrum.eigenvectors[:, spectrum.eigenvalues < 0.5]


def projector_onto(vectors, dim=None, tol=TOL_RANK):
    r"""
    Return the orthogonal projector onto the span of ``vectors``.

    EXAMPLES::

        >>> projector_onto([np.array([1, 0])]).real.tolist()
        [[1.0, 0.0], [0.0, 0.0]]

    A spanning set gives the identity::

        >>> np.allclose(projector_onto([np.array([1, 0]), np.array([1, 1]) / np.sqrt(2)]), np.eye(2))
        True

    A rank-one projector in C^3::

        >>> P = projector_onto([np.array([1, 1, 0]) / np.sqrt(2)])
        >>> np.allclose(P, [[0.5, 0.5, 0], [0.5, 0.5, 0], [0, 0, 0]])
        True
        >>> np.allclose(P @ P, P), eig_hermitian(P).rank()
        (True, 1)

    The span of no vectors::

        >>> projector_onto([], dim=2).tolist()
        [[0j, 0j], [0j, 0j]]

    """
    vectors = [np.asarray(v, dtype=complex).ravel() for v in vectors]

    if not vectors:
        if dim is None:
            raise ValidationError("The dimension of a projector onto no vectors must be given explicitly.")
        return np.zeros((dim, dim), dtype=complex)

    if any(np.linalg.norm(v) == 0 for v in vectors):
        raise ValidationError("Cannot project onto the span of a zero vector.")

    basis = span_basis(vectors, tol=tol)
    P = basis @ dagger(basis)
    return (P + dagger(P)) / 2


def haar_unitary(d, seed):
    r"""
    Return a Haar-random d×d unitary for ``seed`` (an integer or a numpy
    generator).

    EXAMPLES::

        >>> U = haar_unitary(3, 0)
        >>> np.allclose(dagger(U) @ U, np.eye(3))
        True
        >>> np.array_equal(U, haar_unitary(3, 0))
        True

    """
    rng = as_generator(seed)

    if d == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))

    from scipy.stats import unitary_group

    return unitary_group.rvs(d, random_state=rng)


def random_hermitian(d, seed):
    r"""
    Return a random Hermitian d×d matrix with Gaussian entries.

    EXAMPLES::

        >>> H = random_hermitian(4, 0)
        >>> hermiticity_deviation(H)
        0.0

    """
    rng = as_generator(seed)
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (G + dagger(G)) / 2


def random_state(d, seed, rank=None):
    r"""
    Return a random density matrix on C^d of the given ``rank`` (full rank by
    default) drawn from the induced Ginibre ensemble.

    EXAMPLES::

        >>> rho = random_state(3, 0)
        >>> round(np.trace(rho).real, 12), eig_hermitian(rho).eigenvalues.min() > 0
        (1.0, True)
        >>> eig_hermitian(random_state(3, 0, rank=1)).rank()
        1

    """
    rng = as_generator(seed)
    rank = d if rank is None else rank
    G = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = G @ dagger(G)
    return rho / np.trace(rho).real

