r"""
Projective simulation of depolarized nearly projective POVMs.

For a nearly projective POVM N with effects ``A_i ψ_i ψ_i†`` (i ≤ l ≤ d/2)
and a remainder, the depolarized POVM ``Φ_τ(N)`` splits as
``τ F + (1 − τ) C`` where F is the twirled dimension-deficient dilation of
N and C has effects ``a_i P_W + b_i P_W⊥`` with

    a_i = A_i/(|W| + |W⊥|),    b_i = a_i + τ/(1 − τ) · (A_i − 1)/|W⊥|.

Both parts are projectively simulable as long as all b_i are nonnegative,
i.e., up to the critical visibility t_N.

EXAMPLES::

    >>> from povmsim.naimark import nearly_projective
    >>> from povmsim.povm import verify_sp_witness
    >>> N = nearly_projective([0.5], [[1, 0]])
    >>> round(critical_visibility(N), 12)
    0.333333333333
    >>> plan = build_plan(N, tau=0.25)
    >>> plan
    NoisySimPlan(t_crit=0.333333, tau=0.25, components=3)
    >>> verify_sp_witness(plan.full_witness, N.depolarize(0.25)).passed
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

from povmsim.errors import CertificationError, InfeasibleError, ValidationError
from povmsim.linalg import complement_basis, dagger, span_basis
from povmsim.naimark import DeficientNaimarkResult, deficient_naimark, nearly_projective_form
from povmsim.povm import TOL_WITNESS, Povm, SpWitness, StochasticMap, verify_sp_witness

logger = logging.getLogger("povmsim")

# Slack below zero tolerated for (1 − τ) b_i at the critical visibility.
TOL_COEFF = 1e-12


def _subspace_dims(vectors):
    W = span_basis(vectors)
    return W, complement_basis(W)


def critical_visibility(N):
    r"""
    Return ``t_N = min_i |W⊥| A_i / (|W|(1 − A_i) + |W⊥|)`` of the nearly
    projective POVM ``N``.

    EXAMPLES::

        >>> from povmsim.naimark import nearly_projective
        >>> critical_visibility(nearly_projective([1], [[1, 0]]))
        1.0
        >>> round(critical_visibility(nearly_projective([0.5, 0.5], np.eye(4)[:2])), 12)
        0.333333333333

    The visibility is limited by the smallest amplitude::

        >>> round(critical_visibility(nearly_projective([0.9, 0.2], np.eye(6)[:2])), 12)
        0.142857142857

    Malformed POVMs are rejected::

        >>> from povmsim.povm import Povm
        >>> critical_visibility(Povm.create_example("trivial"))
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: A nearly projective POVM needs at least one rank-one outcome and the remainder.

    """
    amplitudes, vectors = nearly_projective_form(N)
    W, perp = _subspace_dims(vectors)
    w, k = W.shape[1], perp.shape[1]
    return float(np.min(k * amplitudes / (w * (1 - amplitudes) + k)))


def nearly_projective_bounds(C, ratio, d):
    r"""
    Return the guarantees for the nearly projective sub-POVMs obtained from
    a partition satisfying the Kadison–Singer bound with ``C = rε`` of a
    rank-one POVM with ``ratio = ε/ε̃``: the amplitudes are at least
    ``(1 + 1/√C)⁻²/ratio``, the critical visibility is at least its value
    for ``|W| = ⌊d/2⌋`` at that amplitude, and the product ``c = q·t`` with
    the success probability bound for blocks of at most ⌊d/2⌋ outcomes.

    EXAMPLES::

        >>> bounds = nearly_projective_bounds(C=5, ratio=1, d=8)
        >>> {key: round(value, 4) for key, value in bounds.items()}
        {'amplitude_lower': 0.4775, 'visibility_lower': 0.3136, 'q_lower': 0.0682, 'c_lower': 0.0214}

    The visibility bound degrades with the flatness::

        >>> nearly_projective_bounds(C=5, ratio=1.5, d=8)["visibility_lower"] < bounds["visibility_lower"]
        True

    """
    from povmsim.partition import improved_bound

    if C <= 0 or ratio < 1 or d < 2:
        raise ValidationError(f"Expected C > 0, ratio ≥ 1 and d ≥ 2 but got C={C}, ratio={ratio} and d={d}.")

    amplitude = 1 / (ratio * (1 + 1 / math.sqrt(C)) ** 2)
    w = d // 2
    k = d - w
    visibility = k * amplitude / (w * (1 - amplitude) + k)
    q = improved_bound(C, ratio, kappa=w / d)

    return {
        "amplitude_lower": amplitude,
        "visibility_lower": visibility,
        "q_lower": q,
        "c_lower": q * visibility,
    }


@dataclass(frozen=True)
class NoisySimPlan:
    r"""
    The decomposition ``Φ_τ(N) = τ F + (1 − τ) C`` and its witness.

    EXAMPLES::

        >>> from povmsim.naimark import nearly_projective
        >>> plan = build_plan(nearly_projective([0.5], [[1, 0]]), tau=0)
        >>> plan.a.tolist(), plan.b.tolist()
        ([0.25], [0.25])
        >>> len(plan.full_witness)
        1

    """

    t_crit: float
    tau: float
    a: np.ndarray
    b: np.ndarray
    classical: Povm
    classical_witness: SpWitness
    full_witness: SpWitness
    deficient: DeficientNaimarkResult
    target: Povm

    def __repr__(self):
        return f"NoisySimPlan(t_crit={self.t_crit:.6g}, tau={self.tau:.6g}, components={len(self.full_witness)})"

    def decomposition_error(self):
        r"""
        Return the largest ``‖τ F_i + (1 − τ) C_i − Φ_τ(N)_i‖_F``.

        EXAMPLES::

            >>> from povmsim.naimark import nearly_projective
            >>> build_plan(nearly_projective([0.7, 0.6], np.eye(5)[:2]), tau=0.2).decomposition_error() < 1e-12
            True

        """
        mixture = self.tau * self.deficient.F.effects + (1 - self.tau) * self.classical.effects
        return float(np.linalg.norm(mixture - self.target.effects, axis=(1, 2)).max())

    def to_dict(self):
        r"""
        Return this plan as a document.

        EXAMPLES::

            >>> from povmsim.naimark import nearly_projective
            >>> document = build_plan(nearly_projective([1], [[1, 0]]), tau=1).to_dict()
            >>> document["t_crit"], document["tau"], document["a"], document["b"]
            (1.0, 1.0, [0.5], [0.5])

        """
        return {
            "t_crit": self.t_crit,
            "tau": self.tau,
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "classical": self.classical.to_dict(),
            "witness": self.full_witness.to_dict(),
        }


def _coefficients(amplitudes, w, k, tau):
    a = amplitudes / (w + k)
    # (1 − τ) b_i, free of the division by 1 − τ
    slack = (1 - tau) * a - tau * (1 - amplitudes) / k
    if tau < 1:
        b = slack / (1 - tau)
    else:
        b = np.where(slack >= -TOL_COEFF, a, -np.inf)
    return a, b, slack


def build_plan(N, tau, tol=TOL_WITNESS):
    r"""
    Return the :class:`NoisySimPlan` of the nearly projective POVM ``N`` at
    visibility ``tau``, which must not exceed :func:`critical_visibility`.

    EXAMPLES:

    Without visibility the simulation is purely classical::

        >>> from povmsim.naimark import nearly_projective
        >>> N = nearly_projective([0.5], [[1, 0]])
        >>> plan = build_plan(N, tau=0)
        >>> [effect.real.tolist() for effect in plan.target.effects]
        [[[0.25, 0.0], [0.0, 0.25]], [[0.75, 0.0], [0.0, 0.75]]]

    At the critical visibility the coefficient b_1 vanishes::

        >>> plan = build_plan(N, tau=1 / 3)
        >>> abs(plan.b[0]) < 1e-12, plan.full_witness.realize().effects.shape
        (True, (2, 2, 2))

    Amplitudes close to one stay stable at the critical visibility::

        >>> almost = nearly_projective([1 - 1e-13], [[1, 0]])
        >>> build_plan(almost, tau=critical_visibility(almost)).decomposition_error() < 1e-12
        True

    Beyond it the construction fails::

        >>> build_plan(N, tau=1 / 3 + 1e-6)  # doctest: +ELLIPSIS
        Traceback (most recent call last):
        ...
        povmsim.errors.InfeasibleError: Visibility 0.333334 exceeds the critical visibility 0.333333: b_1 = -1.1...e-06 is negative.

    The decomposition is exact on random instances::

        >>> from povmsim.seeding import generator
        >>> def check(d, l, seed):
        ...     rng = generator(seed)
        ...     psi = rng.normal(size=(l, d)) + 1j * rng.normal(size=(l, d))
        ...     psi /= np.linalg.norm(psi, axis=1)[:, None]
        ...     G = sum(np.outer(v, v.conj()) for v in psi)
        ...     N = nearly_projective(rng.uniform(0.3, 1, size=l) / max(1.0, float(np.linalg.eigvalsh(G).max())), psi)
        ...     plan = build_plan(N, tau=critical_visibility(N) * rng.uniform())
        ...     return (plan.decomposition_error() <= 1e-10
        ...         and plan.b.sum() <= plan.a.sum() <= l / d + 1e-12
        ...         and verify_sp_witness(plan.full_witness, plan.target).passed)
        >>> all(check(d, l, seed) for seed, (d, l) in enumerate([(2, 1), (3, 1), (4, 2), (6, 3), (7, 2), (10, 5)]))
        True

    """
    tau = float(tau)
    if not 0 <= tau <= 1:
        raise ValidationError(f"Visibility must be in [0, 1] but got {tau}.")

    amplitudes, vectors = nearly_projective_form(N)
    d, l = N.dim, len(amplitudes)
    W, perp = _subspace_dims(vectors)
    w, k = W.shape[1], perp.shape[1]
    t_crit = float(np.min(k * amplitudes / (w * (1 - amplitudes) + k)))

    a, b, slack = _coefficients(amplitudes, w, k, tau)
    for i, coefficient in enumerate(b):
        if slack[i] < -TOL_COEFF:
            raise InfeasibleError(
                f"Visibility {tau:.6g} exceeds the critical visibility {t_crit:.6g}: b_{i + 1} = {coefficient:.3g} is negative."
            )
    b = np.maximum(b, 0)

    P_W = W @ dagger(W)
    P_perp = perp @ dagger(perp)

    effects = a[:, None, None] * P_W + b[:, None, None] * P_perp
    remainder = (1 - a.sum()) * P_W + (1 - b.sum()) * P_perp
    classical = Povm(list(effects) + [remainder], labels=N.labels, check=False)

    # the two-outcome measurement (P_W, P_W⊥) padded with zero effects
    projective = Povm([P_W, P_perp] + [np.zeros((d, d))] * (l - 1), check=False)
    postproc = np.zeros((l + 1, l + 1))
    postproc[:, 0] = np.append(a, 1 - a.sum())
    postproc[:, 1] = np.append(b, 1 - b.sum())
    postproc[l, 2:] = 1
    classical_witness = SpWitness([(1.0, projective, StochasticMap(postproc))], target_dim=d)

    deficient = deficient_naimark(N, tol=tol)

    weights, witnesses = [], []
    if tau > 0:
        weights.append(tau)
        witnesses.append(deficient.witness)
    if tau < 1:
        weights.append(1 - tau)
        witnesses.append(classical_witness)
    full_witness = SpWitness.mixture(weights, witnesses)

    target = N.depolarize(tau)
    report = verify_sp_witness(full_witness, target, tol=tol)
    if not report.passed:
        raise CertificationError(
            f"Witness of the depolarized nearly projective POVM deviates by {report.max_deviation:.3g} which exceeds {tol:.3g}."
        )

    logger.debug(f"Noisy simulation at τ={tau:.6g} (t_N={t_crit:.6g}) uses {len(full_witness)} projective measurements.")

    return NoisySimPlan(
        t_crit=t_crit,
        tau=tau,
        a=a,
        b=b,
        classical=classical,
        classical_witness=classical_witness,
        full_witness=full_witness,
        deficient=deficient,
        target=target,
    )
