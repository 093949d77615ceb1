r"""
End-to-end simulation of POVMs by projective measurements.

:func:`certify_sp` certifies that a depolarized version ``Φ_c(M)`` of a
POVM is projectively simulable: ``M`` is fine-grained into a nearly flat
rank-one POVM ``M′``, its outcomes are partitioned into blocks of at most
``⌊d/2⌋`` outcomes, the resulting nearly projective sub-POVMs are
depolarized down to their common critical visibility and simulated, and the
failure outcome is finally redistributed as ``tr(M′_i)/d``. The visibility
achieved is ``c = q·t`` with ``q`` the postselection probability of the
partition and ``t`` the critical visibility.

:func:`simulate_with_ancilla` simulates ``M`` with postselection by
projective measurements on the system and a ``k``-dimensional ancilla.

EXAMPLES:

A basis measurement is certified at visibility 1/2 since the fine-grained
outcomes must be measured one at a time::

    >>> from povmsim.povm import Povm
    >>> certificate = certify_sp(Povm.create_example("basis"))
    >>> certificate
    SpCertificate(dim=2, c_found=0.5, passed=True)
    >>> certificate.verify().passed
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
from dataclasses import dataclass, field

import numpy as np

from povmsim.errors import CertificationError, FormatError, InfeasibleError, ValidationError
from povmsim.finegrain import flat_refine, spectral_refine
from povmsim.linalg import TOL_RECON
from povmsim.naimark import NaimarkDilation, dilate_with_ancilla, nearly_projective_form
from povmsim.noisysim import build_plan, critical_visibility, nearly_projective_bounds
from povmsim.partition import (
    Partition,
    build_ensemble,
    improved_bound,
    improved_subpartition,
    ks_bound_check,
    optimize_partition,
    predicted_bounds,
    random_partition,
    randomized_bounds,
    success_prob,
)
from povmsim.povm import (
    TOL_WITNESS,
    Povm,
    SpWitness,
    StochasticMap,
    effect_distance,
    post_process,
    verify_sp_witness,
)
from povmsim.seeding import derive_seed, generator

logger = logging.getLogger("povmsim")

DEFAULT_DELTA = 0.05

# C = rε targeted by random partitions of the certification pipeline.
KS_CONSTANT = 5

TRIAL_CAP = 64

TOL_SIMULATION = 1e-8

# Slack for lower bounds that hold with equality in exact arithmetic.
TOL_BOUND = 1e-12


def default_eps(d):
    r"""
    Return the default cap ``min(0.1, 1/d)`` on the fine-grained magnitudes.

    EXAMPLES::

        >>> default_eps(2), default_eps(16)
        (0.1, 0.0625)

    """
    return min(0.1, 1 / d)


def _check(value, threshold=None, minimum=None):
    r"""
    Return a check of ``value`` against an upper ``threshold`` or a lower
    ``minimum`` as stored in certificates.

    EXAMPLES::

        >>> _check(0.5, threshold=1)
        {'value': 0.5, 'threshold': 1.0, 'passed': True}
        >>> _check(0.5, minimum=1)
        {'value': 0.5, 'minimum': 1.0, 'passed': False}

    """
    if threshold is not None:
        return {"value": float(value), "threshold": float(threshold), "passed": bool(value <= threshold)}
    return {"value": float(value), "minimum": float(minimum), "passed": bool(value >= minimum - TOL_BOUND)}


@dataclass(frozen=True)
class SpCertificate:
    r"""
    A witness that ``Φ_c(input)`` is projectively simulable for
    ``c = c_found`` together with the diagnostics of its construction.

    EXAMPLES::

        >>> certificate = certify_sp(Povm.create_example("trine"), delta=0.5, eps=1 / 3, mode="exhaustive")
        >>> round(certificate.diagnostics["q_found"], 12), certificate.diagnostics["mode"]
        (0.5, 'exhaustive')
        >>> sorted(certificate.diagnostics["checks"])
        ['amplitudes', 'c_lower', 'composition', 'witness']

    """

    input: Povm
    c_found: float
    witness: SpWitness
    diagnostics: dict = field(repr=False)

    @property
    def passed(self):
        r"""
        Return whether all checks recorded during the construction passed.

        EXAMPLES::

            >>> certify_sp(Povm.create_example("basis")).passed
            True

        """
        return all(check["passed"] for check in self.diagnostics.get("checks", {}).values())

    @property
    def checks(self):
        r"""
        Return the checks recorded during the construction.

        EXAMPLES::

            >>> certify_sp(Povm.create_example("basis")).checks.amplitudes.passed
            True

        """
        from povmsim.descriptor import Descriptor

        return Descriptor(self.diagnostics.get("checks", {}))

    def __repr__(self):
        return f"SpCertificate(dim={self.input.dim}, c_found={self.c_found:.6g}, passed={self.passed})"

    def verify(self, tol=TOL_WITNESS):
        r"""
        Return the :class:`~povmsim.povm.WitnessReport` of the witness against
        ``Φ_c(input)``, recomputed from scratch.

        EXAMPLES::

            >>> certificate = certify_sp(Povm.create_example("basis"))
            >>> certificate.verify()  # doctest: +ELLIPSIS
            WitnessReport(max_deviation=..., threshold=1e-08, passed=True)

        """
        return verify_sp_witness(self.witness, self.input.depolarize(self.c_found), tol=tol)

    def to_dict(self):
        r"""
        Return this certificate as a document with fields ``input``,
        ``c_found``, ``witness`` and ``diagnostics``.

        EXAMPLES::

            >>> document = certify_sp(Povm.create_example("basis")).to_dict()
            >>> list(document)
            ['input', 'c_found', 'witness', 'diagnostics', 'passed']

        """
        return {
            "input": self.input.to_dict(),
            "c_found": self.c_found,
            "witness": self.witness.to_dict(),
            "diagnostics": self.diagnostics,
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, document):
        r"""
        Return the certificate described by ``document``, see :meth:`to_dict`.

        EXAMPLES::

            >>> certificate = certify_sp(Povm.create_example("basis"))
            >>> restored = SpCertificate.from_dict(certificate.to_dict())
            >>> restored.c_found == certificate.c_found, restored.verify().passed
            (True, True)

            >>> SpCertificate.from_dict({"c_found": 1})
            Traceback (most recent call last):
            ...
            povmsim.errors.FormatError: Certificate document is missing the field 'input'.

        """
        for key in ["input", "c_found", "witness"]:
            if key not in document:
                raise FormatError(f"Certificate document is missing the field '{key}'.")

        return cls(
            input=Povm.from_dict(document["input"]),
            c_found=float(document["c_found"]),
            witness=SpWitness.from_dict(document["witness"]),
            diagnostics=document.get("diagnostics", {}),
        )


def _find_partition(M, max_size, kappa, mode, seed, budget):
    r"""
    Return a partition of the outcomes of the flat rank-one POVM ``M`` into
    blocks of at most ``max_size`` outcomes, the partition the Kadison–Singer
    bound is checked for, and the :class:`~povmsim.partition.Subpartition`
    of the randomized mode (or ``None``).
    """
    if mode == "random":
        eps = float(M.traces().max())
        parent = random_partition(len(M), r=math.ceil(KS_CONSTANT / eps - TOL_BOUND), seed=seed)
        subpartition = improved_subpartition(M, parent, kappa=kappa)
        return subpartition.partition, parent, subpartition

    S = optimize_partition(M, r=len(M), max_size=max_size, budget=budget, seed=seed, mode=mode)
    return S, S, None


def _guarantee(M, parent, subpartition, d):
    r"""
    Return the Kadison–Singer check of ``parent`` for the flat rank-one POVM
    ``M`` and, if it passes, the lower bounds it implies.
    """
    traces = M.traces()
    eps, eps_tilde = float(traces.max()), float(traces.min())
    ks = ks_bound_check(M, parent, eps=eps)

    if not ks.passed:
        return ks, None

    C = parent.r * eps
    bounds = nearly_projective_bounds(C, eps / eps_tilde, d)
    if subpartition is None:
        q_lower = predicted_bounds(eps, eps_tilde, C, d)["q_lower"]
    else:
        q_lower = subpartition.bound

    return ks, {
        "C": C,
        "ratio": eps / eps_tilde,
        "amplitude_lower": bounds["amplitude_lower"],
        "visibility_lower": bounds["visibility_lower"],
        "q_lower": q_lower,
        "c_lower": q_lower * bounds["visibility_lower"],
    }


def _certify_ensemble(M, refinement, ensemble, parent, subpartition, diagnostics, tol, tol_recon):
    r"""
    Return the :class:`SpCertificate` of ``M`` assembled from the simulation
    ensemble of its fine-graining.
    """
    d = M.dim
    refined = refinement.refined
    n = len(refined)

    # nearly projective sub-POVMs: the outcomes of a block and the failure
    blocks = []
    for subset, sub in zip(ensemble.partition, ensemble.subs):
        indices = list(subset) + [n]
        nearly = Povm(sub.effects[indices], labels=[sub.labels[i] for i in indices], check=False)
        blocks.append((nearly, StochasticMap.from_assignment(indices, rows=n + 1)))

    t_np = min(critical_visibility(nearly) for nearly, _ in blocks)

    # the failure outcome is reported as i with probability tr(M′_i)/d
    redistribute = StochasticMap(np.column_stack([np.eye(n), refined.traces() / refined.traces().sum()]))
    recover = refinement.recover.compose(redistribute)

    witnesses = []
    amplitudes = []
    for nearly, embed in blocks:
        plan = build_plan(nearly, t_np, tol=tol)
        witnesses.append(plan.full_witness.post_process(recover.compose(embed)))
        amplitudes.append(nearly_projective_form(nearly)[0].min())

    witness = SpWitness.mixture(ensemble.weights, witnesses)
    c = ensemble.q * t_np
    target = M.depolarize(c)

    checks = {
        "witness": _check(verify_sp_witness(witness, target, tol=tol).max_deviation, threshold=tol),
        "composition": _check(
            effect_distance(post_process(recover, ensemble.mixture().depolarize(t_np)), target), threshold=tol_recon
        ),
        "amplitudes": _check(min(amplitudes), minimum=refined.traces().min() / ensemble.lambdas.max()),
    }

    ks, guarantee = _guarantee(refined, parent, subpartition, d)
    if guarantee is not None:
        checks["c_lower"] = _check(c, minimum=guarantee["c_lower"])

    diagnostics = {
        **diagnostics,
        "refined_outcomes": n,
        "partition": ensemble.partition.to_dict(),
        "q_found": ensemble.q,
        "t_np_found": t_np,
        "ks_check": ks.to_dict(),
        "guarantee": guarantee,
        "components": len(witness),
        "checks": checks,
    }

    certificate = SpCertificate(input=M, c_found=c, witness=witness, diagnostics=diagnostics)

    if certificate.passed:
        logger.debug(f"Certified c={c:.6g} (q={ensemble.q:.6g}, t={t_np:.6g}) with {len(witness)} projective measurements.")
    else:
        failed = [name for name, check in checks.items() if not check["passed"]]
        logger.warning(f"Certificate for c={c:.6g} failed the checks {', '.join(failed)}.")

    return certificate


def certify_sp(M, delta=DEFAULT_DELTA, eps=None, mode="auto", seed=0, budget=None, tol=TOL_WITNESS, tol_recon=TOL_RECON):
    r"""
    Return an :class:`SpCertificate` for ``Φ_c(M)`` with the visibility
    ``c`` found by fine-graining ``M`` (flatness ``1 + delta``, magnitudes at
    most ``eps``, by default ``min(0.1, 1/d)``) and partitioning it into blocks
    of at most ``⌊d/2⌋`` outcomes.

    ``mode`` is one of ``auto``, ``exhaustive`` and ``greedy`` (see
    :func:`~povmsim.partition.optimize_partition`) or ``random`` which splits
    a uniformly random partition with ``rε ≈ 5`` into blocks of at most
    ``⌊d/2⌋`` outcomes.

    A certificate whose checks fail is returned marked as failed, see
    :attr:`SpCertificate.passed`.

    EXAMPLES:

    The trine POVM with outcomes split in half::

        >>> certificate = certify_sp(Povm.create_example("trine"), delta=0.5, eps=1 / 3, mode="exhaustive")
        >>> round(certificate.c_found, 12), certificate.passed
        (0.5, True)
        >>> certificate.diagnostics["checks"]["witness"]["value"] <= 1e-8
        True

    Random rank-one POVMs on C^3 and C^4::

        >>> def check(d, n, seed, mode="auto"):
        ...     certificate = certify_sp(Povm.random(d, n, seed, rank=1), delta=0.5, seed=seed, mode=mode)
        ...     return certificate.passed and certificate.c_found > 0 and certificate.verify().passed
        >>> all(check(3, 9, seed) for seed in range(3))
        True
        >>> check(4, 6, 0), check(4, 6, 1, mode="random")
        (True, True)

    Whenever the Kadison–Singer bound holds, the visibility found beats the
    guaranteed one::

        >>> certificate = certify_sp(Povm.random_flat(4, 4, seed=2), delta=0.5, eps=1 / 8, mode="random")
        >>> guarantee = certificate.diagnostics["guarantee"]
        >>> guarantee is None or certificate.c_found >= guarantee["c_lower"]
        True

    The same seed produces the same certificate::

        >>> M = Povm.random_flat(3, 2, seed=5)
        >>> certify_sp(M, delta=0.5, seed=1).to_dict() == certify_sp(M, delta=0.5, seed=1).to_dict()
        True

    POVMs on C^1 cannot be split::

        >>> certify_sp(Povm.create_example("trivial", dim=1))
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Projective simulation needs d ≥ 2 but got d=1.

    """
    d = M.dim
    if d < 2:
        raise ValidationError(f"Projective simulation needs d ≥ 2 but got d={d}.")

    eps = default_eps(d) if eps is None else float(eps)
    refinement = flat_refine(M, delta, eps)

    S, parent, subpartition = _find_partition(refinement.refined, max_size=d // 2, kappa=1 / 2, mode=mode, seed=seed, budget=budget)
    ensemble = build_ensemble(refinement.refined, S)

    diagnostics = {"delta": float(delta), "eps": eps, "mode": mode, "seed": int(seed)}
    if subpartition is not None:
        diagnostics["subpartition"] = {"bound": subpartition.bound, "kappa": subpartition.kappa}

    return _certify_ensemble(M, refinement, ensemble, parent, subpartition, diagnostics, tol, tol_recon)


@dataclass(frozen=True)
class AncillaSimulation:
    r"""
    A simulation of ``target`` with postselection: with probability
    ``weights[β]`` the projective measurement of ``dilations[β]`` is applied
    to the system and a ``k``-dimensional ancilla in ``|0⟩`` and its outcome
    is post-processed by ``postprocs[β]`` into an outcome of ``target`` or
    the failure outcome.

    EXAMPLES::

        >>> simulation = simulate_with_ancilla(Povm.create_example("trine"), k=2)
        >>> simulation
        AncillaSimulation(dim=2, k=2, blocks=1, q=1)
        >>> simulation.dilations[0].ambient_dim
        4

    """

    target: Povm
    k: int
    weights: np.ndarray
    dilations: tuple
    postprocs: tuple
    q: float
    diagnostics: dict = field(repr=False, default_factory=dict)

    def __repr__(self):
        return f"AncillaSimulation(dim={self.target.dim}, k={self.k}, blocks={len(self.dilations)}, q={self.q:.6g})"

    def simulate(self, rho):
        r"""
        Return the distribution over the outcomes of ``target`` and the
        failure outcome, recombined from the projective measurements.

        EXAMPLES::

            >>> simulation = simulate_with_ancilla(Povm.create_example("basis"), k=2)
            >>> simulation.simulate(np.diag([1, 0])).round(12).tolist()
            [1.0, 0.0, 0.0]

        """
        return sum(
            weight * postproc.apply(dilation.projective.born(dilation.embed(rho)))
            for weight, dilation, postproc in zip(self.weights, self.dilations, self.postprocs)
        )

    def max_deviation(self, states=100, seed=0):
        r"""
        Return the largest deviation of :meth:`simulate` from
        ``(q p(1|ρ), …, q p(n|ρ), 1 − q)`` over ``states`` random states.

        EXAMPLES::

            >>> M = Povm.create_example("trine")
            >>> simulate_with_ancilla(M, k=2).max_deviation(states=10) < 1e-8
            True

        """
        from povmsim.linalg import random_state

        deviation = 0.0
        for k in range(states):
            rho = random_state(self.target.dim, generator(seed, k))
            expected = np.append(self.q * self.target.born(rho), 1 - self.q)
            deviation = max(deviation, float(np.abs(self.simulate(rho) - expected).max()))
        return deviation

    def to_dict(self):
        r"""
        Return this simulation as a document.

        EXAMPLES::

            >>> document = simulate_with_ancilla(Povm.create_example("basis"), k=2).to_dict()
            >>> document["k"], document["q"], document["weights"]
            (2, 1.0, [1.0])

        """
        return {
            "target": self.target.to_dict(),
            "k": self.k,
            "q": self.q,
            "weights": [float(weight) for weight in self.weights],
            "dilations": [dilation.to_dict() for dilation in self.dilations],
            "postprocs": [postproc.matrix.tolist() for postproc in self.postprocs],
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, document):
        r"""
        Return the simulation described by ``document``, see :meth:`to_dict`.

        EXAMPLES::

            >>> simulation = simulate_with_ancilla(Povm.create_example("trine"), k=2)
            >>> AncillaSimulation.from_dict(simulation.to_dict()).max_deviation(states=5) < 1e-8
            True

        """
        try:
            return cls(
                target=Povm.from_dict(document["target"]),
                k=int(document["k"]),
                weights=np.array(document["weights"], dtype=float),
                dilations=tuple(NaimarkDilation.from_dict(dilation) for dilation in document["dilations"]),
                postprocs=tuple(StochasticMap(postproc) for postproc in document["postprocs"]),
                q=float(document["q"]),
                diagnostics=document.get("diagnostics", {}),
            )
        except KeyError as e:
            raise FormatError(f"Ancilla simulation document is missing the field {e}.") from e


def simulate_with_ancilla(M, k, delta=DEFAULT_DELTA, eps=None, mode="auto", seed=0, budget=None, tol=TOL_SIMULATION, states=20):
    r"""
    Return an :class:`AncillaSimulation` of ``M`` by projective measurements
    on C^d ⊗ C^k.

    If the effects of ``M`` have total rank at most dk, ``M`` is dilated
    directly and ``q = 1``. Otherwise ``M`` is fine-grained and partitioned
    into blocks of at most ``(k − 1)d`` outcomes so that every sub-POVM
    fits into C^d ⊗ C^k. With ``mode="random"`` a random partition is
    split with :func:`~povmsim.partition.improved_subpartition`, for k = 2
    into blocks of at most d − 1 outcomes.

    The recombined statistics are compared to ``(qM, 1 − q)`` on ``states``
    random states.

    EXAMPLES:

    A full ancilla always suffices::

        >>> M = Povm.random(3, 9, seed=0, rank=1)
        >>> round(simulate_with_ancilla(M, k=3).q, 12)
        1.0

    A flat POVM on C^4 with too many outcomes for a qubit ancilla::

        >>> M = Povm.random_flat(4, 3, seed=0)
        >>> simulation = simulate_with_ancilla(M, k=2, delta=0.5, eps=1 / 6)
        >>> 0 < simulation.q < 1, simulation.max_deviation(states=5) < 1e-8
        (True, True)
        >>> all(dilation.ambient_dim == 8 for dilation in simulation.dilations)
        True
        >>> q_lower = simulation.diagnostics["q_lower"]
        >>> q_lower is None or simulation.q >= q_lower
        True

    The randomized mode::

        >>> simulation = simulate_with_ancilla(M, k=2, delta=0.5, eps=1 / 6, mode="random", seed=3)
        >>> simulation.q >= simulation.diagnostics["subpartition"]["bound"] or not simulation.diagnostics["ks_check"]["passed"]
        True

    The ancilla must be nontrivial::

        >>> simulate_with_ancilla(M, k=1)
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: An ancilla simulation needs k ≥ 2 but got k=1.

    """
    k = int(k)
    if k < 2:
        raise ValidationError(f"An ancilla simulation needs k ≥ 2 but got k={k}.")

    d = M.dim
    spectral = spectral_refine(M)
    diagnostics = {"delta": float(delta), "mode": mode, "seed": int(seed)}

    if len(spectral.refined) <= d * k:
        recover = StochasticMap.identity(len(M))
        ensemble = build_ensemble(M, Partition.trivial(len(M)))
    else:
        eps = default_eps(d) if eps is None else float(eps)
        refinement = flat_refine(M, delta, eps)
        refined = refinement.refined
        recover = refinement.recover
        kappa = 1 - 1 / d if k == 2 else k - 1

        S, parent, subpartition = _find_partition(refined, max_size=(k - 1) * d, kappa=kappa, mode=mode, seed=seed, budget=budget)
        ensemble = build_ensemble(refined, S)

        traces = refined.traces()
        ks = ks_bound_check(refined, parent, eps=float(traces.max()))
        q_lower = None
        if ks.passed:
            if subpartition is None:
                q_lower = predicted_bounds(float(traces.max()), float(traces.min()), parent.r * float(traces.max()), d)["q_lower"]
            else:
                q_lower = subpartition.bound

        diagnostics.update({"eps": eps, "refined_outcomes": len(refined), "partition": S.to_dict(), "ks_check": ks.to_dict(), "q_lower": q_lower})
        if subpartition is not None:
            diagnostics["subpartition"] = {"bound": subpartition.bound, "kappa": subpartition.kappa}

    dilations, postprocs = [], []
    lift = recover.direct_sum(StochasticMap.identity(1))
    for sub in ensemble.subs:
        dilation = dilate_with_ancilla(sub, k)
        dilations.append(dilation)
        postprocs.append(lift.compose(dilation.coarse))

    simulation = AncillaSimulation(
        target=M,
        k=k,
        weights=ensemble.weights,
        dilations=tuple(dilations),
        postprocs=tuple(postprocs),
        q=ensemble.q,
        diagnostics=diagnostics,
    )

    deviation = simulation.max_deviation(states=states, seed=seed)
    simulation.diagnostics["max_deviation"] = {"value": deviation, "threshold": tol}
    if deviation > tol:
        raise CertificationError(
            f"Ancilla simulation deviates from (qM, 1 − q) by {deviation:.3g} which exceeds {tol:.3g}."
        )

    logger.debug(f"Simulated a POVM with {len(M)} outcomes on C^{d} ⊗ C^{k} with {len(dilations)} projective measurements and q={ensemble.q:.6g}.")

    return simulation


def ancilla_tradeoff(k, eps_ratio=1):
    r"""
    Return the constant ``C`` that a partition must achieve and the
    resulting lower bound on the success probability for a simulation with
    a ``k``-dimensional ancilla of a rank-one POVM with flatness
    ``eps_ratio``.

    For k ≥ 3, ``C`` solves ``ratio·(1 + 1/√C)² = k − 1`` and the success
    probability is at least ``(1 − (ratio/(k − 1))^{1/2})²``. For k = 2 blocks
    are split to at most d outcomes at ``C = 1``.

    EXAMPLES::

        >>> ancilla_tradeoff(5)
        {'C_required': 1.0, 'q_lower': 0.25}
        >>> ancilla_tradeoff(2)
        {'C_required': 1.0, 'q_lower': 0.125}

    The success probability approaches one for large ancillas::

        >>> ancilla_tradeoff(10 ** 6)["q_lower"] > 0.99
        True

    Too flat a POVM needs a larger ancilla::

        >>> ancilla_tradeoff(3, eps_ratio=2)
        Traceback (most recent call last):
        ...
        povmsim.errors.InfeasibleError: An ancilla of dimension 3 is too small for flatness 2: need k − 1 > 2.

    """
    k = int(k)
    if k < 2:
        raise ValidationError(f"An ancilla simulation needs k ≥ 2 but got k={k}.")
    if eps_ratio < 1:
        raise ValidationError(f"The flatness ε/ε̃ must be at least 1 but got {eps_ratio}.")

    if k == 2:
        return {"C_required": 1.0, "q_lower": improved_bound(1, eps_ratio, kappa=1)}

    x = (k - 1) / eps_ratio
    if x <= 1:
        raise InfeasibleError(
            f"An ancilla of dimension {k} is too small for flatness {eps_ratio:.6g}: need k − 1 > {eps_ratio:.6g}."
        )

    root = 1 / (math.sqrt(x) - 1)
    return {"C_required": root * root, "q_lower": (1 - 1 / math.sqrt(x)) ** 2}


@dataclass(frozen=True)
class RandomizedCertification:
    r"""
    The result of :func:`randomized_certify`: the certificate (or ``None``
    if no trial succeeded) and one row of statistics per trial.

    EXAMPLES::

        >>> from povmsim.finegrain import extremal_refine
        >>> result = randomized_certify(extremal_refine(Povm.create_example("basis")).refined, seed=0)
        >>> result
        RandomizedCertification(trials=1, certified=True)

    """

    certificate: SpCertificate
    trials: object
    partition: Partition

    def __repr__(self):
        return f"RandomizedCertification(trials={len(self.trials)}, certified={self.certificate is not None})"


def _rank_one_flat(M, tol=TOL_BOUND):
    d = M.dim
    if len(M) > 2 * d * d:
        raise ValidationError(f"Randomized certification supports at most {2 * d * d} outcomes on C^{d} but got {len(M)}.")

    refinement = spectral_refine(M)
    if len(refinement.refined) != len(M):
        raise ValidationError("Randomized certification needs nonzero rank-one effects. Apply extremal_refine first.")

    largest = float(refinement.alphas.max())
    if largest > 1 / d + tol:
        raise ValidationError(f"Randomized certification needs magnitudes at most 1/d = {1 / d:.3g} but got {largest:.3g}. Apply extremal_refine first.")

    return refinement


def randomized_trials(M, C_param=1, seed=0, trials=TRIAL_CAP):
    r"""
    Return the first partition of the flat rank-one POVM ``M`` into
    ``⌈C_param·d⌉`` uniformly random blocks that meets both thresholds of
    :func:`~povmsim.partition.randomized_bounds`, or ``None`` if ``trials``
    attempts fail, and a data frame of the attempts.

    EXAMPLES::

        >>> M = Povm.random_flat(4, 4, seed=0)
        >>> S, frame = randomized_trials(M, seed=0)
        >>> list(frame.columns)
        ['trial', 'q', 'max_size', 'q_lower', 'size_upper', 'passed']
        >>> S is not None, bool(frame["passed"].iloc[-1])
        (True, True)

    A single trial succeeds with probability at least 1/4, up to binomial
    slack over 200 seeds. Magnitudes α = 1/d summing to d force n = d² outcomes,
    so the test POVM stacks d Haar-random bases rather than 2d² effects::

        >>> def first_trial(seed, d=16):
        ...     _, frame = randomized_trials(Povm.random_flat(d, d, seed), seed=seed, trials=1)
        ...     return bool(frame["passed"].iloc[0])
        >>> np.mean([first_trial(seed) for seed in range(200)]) >= 0.16
        True

    """
    import pandas as pd

    d, n = M.dim, len(M)
    r = math.ceil(C_param * d - TOL_BOUND)
    bounds = randomized_bounds(C_param, d)

    rows = []
    found = None
    for trial in range(trials):
        S = random_partition(n, r, seed=derive_seed(seed, trial))
        q = success_prob(M, S)
        size = max(S.sizes())
        passed = q >= bounds["q_lower"] and size <= bounds["size_upper"]
        rows.append({"trial": trial + 1, "q": q, "max_size": size, "q_lower": bounds["q_lower"], "size_upper": bounds["size_upper"], "passed": passed})
        logger.debug(f"Random partition trial {trial + 1}: q={q:.6g}, largest block {size}.")
        if passed:
            found = S
            break

    return found, pd.DataFrame(rows)


def randomized_certify(M, C_param=1, seed=0, trials=TRIAL_CAP, tol=TOL_WITNESS, tol_recon=TOL_RECON):
    r"""
    Return a :class:`RandomizedCertification` of the flat rank-one POVM
    ``M`` (at most 2d² outcomes of magnitude at most 1/d) obtained from the
    first random partition found by :func:`randomized_trials`, split into
    blocks of at most ``⌊d/2⌋`` outcomes.

    EXAMPLES::

        >>> from povmsim.finegrain import extremal_refine
        >>> M = extremal_refine(Povm.random(4, 6, seed=1, rank=1)).refined
        >>> result = randomized_certify(M, seed=2)
        >>> result.certificate.passed, result.certificate.verify().passed
        (True, True)

    Identical seeds give identical certificates::

        >>> result.certificate.to_dict() == randomized_certify(M, seed=2).certificate.to_dict()
        True

    Magnitudes must be small::

        >>> randomized_certify(Povm.create_example("trine"))
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Randomized certification needs magnitudes at most 1/d = 0.5 but got 0.667. Apply extremal_refine first.

    """
    d = M.dim
    if d < 2:
        raise ValidationError(f"Projective simulation needs d ≥ 2 but got d={d}.")

    refinement = _rank_one_flat(M)
    parent, frame = randomized_trials(refinement.refined, C_param=C_param, seed=seed, trials=trials)

    if parent is None:
        logger.warning(f"No random partition met the thresholds in {trials} trials.")
        return RandomizedCertification(certificate=None, trials=frame, partition=None)

    subpartition = improved_subpartition(refinement.refined, parent, kappa=1 / 2)
    ensemble = build_ensemble(refinement.refined, subpartition.partition)

    diagnostics = {
        "C_param": float(C_param),
        "mode": "randomized",
        "seed": int(seed),
        "trials": len(frame),
        "subpartition": {"bound": subpartition.bound, "kappa": subpartition.kappa},
    }
    certificate = _certify_ensemble(M, refinement, ensemble, parent, subpartition, diagnostics, tol, tol_recon)

    return RandomizedCertification(certificate=certificate, trials=frame, partition=parent)
