r"""
Born-rule sampling from POVMs and from simulation ensembles, and the checks
of the two applications of depolarized measurements: state discrimination
and classical shadows.

Samples are drawn in shards of :data:`SHARD` shots. Every shard has its own
Philox stream ``(seed, shard)`` so that a report only depends on the seed
and the number of shots.

EXAMPLES:

Measuring the trine POVM on the maximally mixed state::

    >>> import numpy as np
    >>> from povmsim.povm import Povm
    >>> report = sample(Povm.create_example("trine"), np.eye(2) / 2, shots=10**6, seed=0)
    >>> report
    SampleReport(shots=1000000, outcomes=3)
    >>> report.tv_distance() <= 4 * np.sqrt(3 / 10**6)
    True

Sampling from the singleton ensemble of the trine POVM accepts about half of
the shots and reproduces the trine statistics on the accepted ones::

    >>> from povmsim.partition import Partition, build_ensemble
    >>> ensemble = build_ensemble(Povm.create_example("trine"), Partition.singletons(3))
    >>> report = sample_with_postselection(ensemble, np.eye(2) / 2, shots=10**6, seed=0)
    >>> abs(report.acceptance_rate - 0.5) <= 5 * np.sqrt(0.25 / 10**6)
    True
    >>> report.tv_distance() <= 4 * np.sqrt(3 / (0.5 * 10**6))
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
from povmsim.linalg import eigvals_hermitian, hermitian, random_hermitian, random_state
from povmsim.povm import TOL_STOCH, state
from povmsim.seeding import generator

logger = logging.getLogger("povmsim")

SHARD = 2**16

TOL_TRACELESS = 1e-10
TOL_SHADOW = 1e-9
TOL_INEQUALITY = 1e-12


def _inverse_cdf(probabilities, u):
    r"""
    Return the outcomes drawn for the uniform variates ``u``.

    Outcomes of probability zero are never drawn.

    EXAMPLES::

        >>> _inverse_cdf(np.array([0.5, 0, 0.5]), np.array([0, 0.49, 0.5, 0.99])).tolist()
        [0, 0, 2, 2]

    """
    cdf = np.cumsum(probabilities)
    cdf /= cdf[-1]
    return np.searchsorted(cdf, u, side="right")


@dataclass
class SampleReport:
    r"""
    Outcome counts of ``shots`` measurements together with the exact
    distribution they are drawn from.

    For postselected runs ``accepted`` counts the shots that did not end in
    the failure outcome and ``q`` is the postselection probability of the
    ensemble.

    EXAMPLES::

        >>> report = SampleReport(labels=("1", "2"), counts=np.array([1, 3]), exact=np.array([0.5, 0.5]), shots=4, seed=0)
        >>> report
        SampleReport(shots=4, outcomes=2)
        >>> report.empirical().tolist(), report.tv_distance()
        ([0.25, 0.75], 0.25)
        >>> report.acceptance_rate
        1.0

    """

    labels: tuple
    counts: np.ndarray
    exact: np.ndarray
    shots: int
    seed: int
    accepted: int = None
    q: float = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=int)
        self.exact = np.asarray(self.exact, dtype=float)

        if self.accepted is None:
            self.accepted = int(self.counts.sum())

        if int(self.counts.sum()) != self.accepted:
            raise ValidationError(
                f"Counts sum to {int(self.counts.sum())} but {self.accepted} shots were accepted."
            )
        if self.accepted > self.shots:
            raise ValidationError(f"{self.accepted} accepted shots exceed the {self.shots} shots taken.")

    def __repr__(self):
        return f"SampleReport(shots={self.shots}, outcomes={len(self.labels)})"

    @property
    def postselected(self):
        r"""
        Return whether the samples were drawn from a simulation ensemble.

        EXAMPLES::

            >>> from povmsim.povm import Povm
            >>> sample(Povm.create_example("basis"), np.diag([1, 0]), shots=3, seed=0).postselected
            False

        """
        return self.q is not None

    @property
    def acceptance_rate(self):
        return self.accepted / self.shots

    def empirical(self):
        r"""
        Return the relative frequencies of the accepted outcomes.

        EXAMPLES::

            >>> from povmsim.povm import Povm
            >>> sample(Povm.create_example("basis"), np.diag([1, 0]), shots=5, seed=0).empirical().tolist()
            [1.0, 0.0]

        """
        if self.accepted == 0:
            return np.zeros(len(self.counts))
        return self.counts / self.accepted

    def tv_distance(self):
        r"""
        Return the total variation distance of the empirical distribution
        to the exact one.
        """
        return float(np.abs(self.empirical() - self.exact).sum() / 2)

    def to_frame(self):
        r"""
        Return a data frame with one row per outcome.

        EXAMPLES::

            >>> from povmsim.povm import Povm
            >>> df = sample(Povm.create_example("basis"), np.diag([1, 0]), shots=4, seed=0).to_frame()
            >>> df.columns.tolist()
            ['outcome', 'count', 'empirical', 'exact']
            >>> df["count"].tolist()
            [4, 0]

        """
        import pandas as pd

        return pd.DataFrame(
            {
                "outcome": list(self.labels),
                "count": self.counts,
                "empirical": self.empirical(),
                "exact": self.exact,
            }
        )

    def to_dict(self):
        r"""
        Return the summary of this report without the per-outcome table.

        EXAMPLES::

            >>> from povmsim.povm import Povm
            >>> sample(Povm.create_example("basis"), np.diag([1, 0]), shots=4, seed=0).to_dict()
            {'shots': 4, 'seed': 0, 'accepted': 4, 'acceptance_rate': 1.0, 'q': None, 'tv_distance': 0.0}

        """
        return {
            "shots": self.shots,
            "seed": self.seed,
            "accepted": self.accepted,
            "acceptance_rate": self.acceptance_rate,
            "q": self.q,
            "tv_distance": self.tv_distance(),
            **self.metadata,
        }

    @classmethod
    def from_frame(cls, df, metadata):
        r"""
        Return the report stored in the data frame ``df``, see
        :meth:`to_frame`, with the summary ``metadata``, see :meth:`to_dict`.

        EXAMPLES::

            >>> from povmsim.povm import Povm
            >>> report = sample(Povm.create_example("trine"), np.eye(2) / 2, shots=100, seed=1)
            >>> restored = SampleReport.from_frame(report.to_frame(), report.to_dict())
            >>> restored.counts.tolist() == report.counts.tolist(), restored.labels
            (True, ('1', '2', '3'))

            >>> SampleReport.from_frame(report.to_frame(), {})
            Traceback (most recent call last):
            ...
            povmsim.errors.FormatError: Sampling report metadata is missing the field 'shots'.

        """
        for key in ["shots", "seed"]:
            if key not in metadata:
                raise FormatError(f"Sampling report metadata is missing the field '{key}'.")

        for column in ["outcome", "count", "exact"]:
            if column not in df.columns:
                raise FormatError(f"Sampling report table is missing the column '{column}'.")

        known = {"shots", "seed", "accepted", "acceptance_rate", "q", "tv_distance"}

        return cls(
            labels=tuple(str(label) for label in df["outcome"]),
            counts=df["count"].to_numpy(),
            exact=df["exact"].to_numpy(),
            shots=int(metadata["shots"]),
            seed=int(metadata["seed"]),
            accepted=metadata.get("accepted"),
            q=metadata.get("q"),
            metadata={key: value for (key, value) in metadata.items() if key not in known},
        )

    def save(self, outdir, basename):
        r"""
        Write this report as a data package to ``outdir``, i.e., the table
        as ``basename.csv`` and its descriptor, which carries the summary as
        metadata, as ``basename.json``.

        EXAMPLES::

            >>> import os, tempfile
            >>> from povmsim.povm import Povm
            >>> outdir = tempfile.mkdtemp()
            >>> sample(Povm.create_example("basis"), np.diag([1, 0]), shots=4, seed=0).save(outdir, "basis")
            >>> sorted(os.listdir(outdir))
            ['basis.csv', 'basis.json']

        """
        import os.path

        from frictionless import Package, Resource

        os.makedirs(outdir, exist_ok=True)

        csvname = f"{basename}.csv"
        self.to_frame().to_csv(os.path.join(outdir, csvname), index=False)

        resource = Resource(path=csvname, basepath=outdir)
        resource.infer()
        resource.custom["metadata"] = {"povmsim": self.to_dict()}

        package = Package(resources=[resource])
        package.to_json(os.path.join(outdir, f"{basename}.json"))

        logger.info(f"Wrote sampling report {basename} to {outdir}.")


def sample(M, rho, shots, seed):
    r"""
    Return a :class:`SampleReport` of ``shots`` measurements of ``M`` on
    the state ``rho``.

    EXAMPLES::

        >>> from povmsim.povm import Povm
        >>> sample(Povm.create_example("basis"), np.diag([1, 0]), shots=1000, seed=3).counts.tolist()
        [1000, 0]

    Reports are determined by the seed::

        >>> M = Povm.random(3, 4, seed=0)
        >>> rho = random_state(3, 0)
        >>> sample(M, rho, 1000, seed=5).counts.tolist() == sample(M, rho, 1000, seed=5).counts.tolist()
        True
        >>> sample(M, rho, 1000, seed=5).counts.tolist() == sample(M, rho, 1000, seed=6).counts.tolist()
        False

    Invalid states are rejected::

        >>> sample(Povm.create_example("basis"), np.diag([1, 1]), shots=1, seed=0)
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: State has trace 2 instead of 1.
        >>> sample(Povm.create_example("basis"), np.diag([1, 0]), shots=0, seed=0)
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Need at least one shot but got 0.

    """
    shots = _check_shots(shots)
    probabilities = M.born(rho)

    counts = np.zeros(len(M), dtype=int)
    for shard, start in enumerate(range(0, shots, SHARD)):
        u = generator(seed, shard).random(min(SHARD, shots - start))
        counts += np.bincount(_inverse_cdf(probabilities, u), minlength=len(M))

    logger.debug(f"Drew {shots} samples from {M!r} with seed {seed}.")

    return SampleReport(labels=M.labels, counts=counts, exact=probabilities, shots=shots, seed=int(seed))


def sample_with_postselection(E, rho, shots, seed):
    r"""
    Return a :class:`SampleReport` of ``shots`` runs of the simulation
    ensemble ``E`` on ``rho``.

    Every shot picks a block ``β`` with probability ``p_β`` and measures
    the sub-POVM ``N^(β)``. Shots ending in the failure outcome are
    rejected, the counts of the others are reported against ``born(M, ρ)``
    for the target ``M`` of ``E``.

    EXAMPLES:

    The trivial partition never fails::

        >>> from povmsim.povm import Povm
        >>> from povmsim.partition import Partition, build_ensemble
        >>> basis = Povm.create_example("basis")
        >>> report = sample_with_postselection(build_ensemble(basis, Partition.trivial(2)), np.eye(2) / 2, 1000, seed=0)
        >>> report.acceptance_rate, report.q
        (1.0, 1.0)

    Measuring the singleton blocks of the basis measurement on ``|0⟩``
    only ever accepts the first outcome::

        >>> report = sample_with_postselection(build_ensemble(basis, Partition.singletons(2)), np.diag([1, 0]), 1000, seed=0)
        >>> report.counts[1], 0 < report.accepted < 1000
        (0, True)

    """
    shots = _check_shots(shots)
    M = E.target
    n = len(M)
    rho = state(rho, dim=M.dim)

    born = np.array([sub.born(rho) for sub in E.subs])

    counts = np.zeros(n + 1, dtype=int)
    for shard, start in enumerate(range(0, shots, SHARD)):
        size = min(SHARD, shots - start)
        u = generator(seed, shard).random((2, size))
        blocks = _inverse_cdf(E.weights, u[0])
        for beta in np.unique(blocks):
            drawn = blocks == beta
            counts += np.bincount(_inverse_cdf(born[beta], u[1][drawn]), minlength=n + 1)

    accepted = int(counts[:n].sum())
    logger.debug(f"Accepted {accepted} of {shots} shots from an ensemble with q={E.q:.6g}.")

    return SampleReport(
        labels=M.labels,
        counts=counts[:n],
        exact=M.born(rho),
        shots=shots,
        seed=int(seed),
        accepted=accepted,
        q=float(E.q),
    )


def _check_shots(shots):
    shots = int(shots)
    if shots < 1:
        raise ValidationError(f"Need at least one shot but got {shots}.")
    return shots


@dataclass(frozen=True)
class DiscriminationReport:
    r"""
    Success probabilities of discriminating the states ``states`` with prior
    probabilities ``priors`` by guessing the outcome of a POVM and of its
    depolarized version.
    """

    priors: np.ndarray
    states: tuple
    p_succ_M: float
    p_succ_noisy: float
    c: float
    inequality_ok: bool

    def __repr__(self):
        return f"DiscriminationReport(states={len(self.states)}, c={self.c:g}, inequality_ok={self.inequality_ok})"

    def to_dict(self):
        return {
            "priors": [float(p) for p in self.priors],
            "p_succ_M": self.p_succ_M,
            "p_succ_noisy": self.p_succ_noisy,
            "c": self.c,
            "inequality_ok": self.inequality_ok,
        }


def disc_success(priors, states, M, c):
    r"""
    Return the :class:`DiscriminationReport` of ``M`` and its depolarized
    version ``Φ_c(M)`` for the ensemble of ``states`` with ``priors``.

    The depolarized POVM never loses more than a factor ``c`` in success
    probability.

    EXAMPLES:

    The basis measurement discriminates the basis states perfectly::

        >>> from povmsim.povm import Povm
        >>> report = disc_success([0.5, 0.5], [np.diag([1, 0]), np.diag([0, 1])], Povm.create_example("basis"), c=0.3)
        >>> report
        DiscriminationReport(states=2, c=0.3, inequality_ok=True)
        >>> report.p_succ_M, round(report.p_succ_noisy, 12)
        (1.0, 0.65)

    The trivial POVM always guesses the first state::

        >>> trivial = Povm([np.eye(2), np.zeros((2, 2))])
        >>> disc_success([0.7, 0.3], [np.eye(2) / 2, np.diag([0, 1])], trivial, c=0.1).p_succ_M
        0.7

    The inequality holds on random qutrit ensembles::

        >>> def holds(seed):
        ...     priors, states = random_discrimination(3, 4, seed)
        ...     return disc_success(priors, states, Povm.random(3, 4, seed=seed), c=0.02).inequality_ok
        >>> all(holds(seed) for seed in range(100))
        True

    Every state needs an outcome::

        >>> disc_success([1], [np.eye(2) / 2], Povm.create_example("basis"), c=0.5)
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Cannot discriminate 1 states with a POVM of 2 outcomes.

    """
    priors = np.asarray(priors, dtype=float)

    if not len(priors) == len(states) == len(M):
        raise ValidationError(f"Cannot discriminate {len(states)} states with a POVM of {len(M)} outcomes.")
    if priors.min() < 0 or abs(priors.sum() - 1) > TOL_STOCH:
        raise ValidationError(f"Priors must form a probability distribution but got {priors.tolist()}.")

    states = tuple(state(sigma, dim=M.dim) for sigma in states)

    def success(N):
        return float(sum(p * np.trace(sigma @ effect).real for (p, sigma, effect) in zip(priors, states, N.effects)))

    p_succ_M = success(M)
    p_succ_noisy = success(M.depolarize(c))

    return DiscriminationReport(
        priors=priors,
        states=states,
        p_succ_M=p_succ_M,
        p_succ_noisy=p_succ_noisy,
        c=float(c),
        inequality_ok=bool(c * p_succ_M <= p_succ_noisy + TOL_INEQUALITY),
    )


def random_discrimination(d, n, seed):
    r"""
    Return random priors and ``n`` random states on C^d.

    EXAMPLES::

        >>> priors, states = random_discrimination(3, 4, seed=0)
        >>> round(priors.sum(), 12), len(states), states[0].shape
        (1.0, 4, (3, 3))

    """
    rng = generator(seed)
    priors = rng.dirichlet(np.ones(n))
    states = [random_state(d, generator(seed, i + 1)) for i in range(n)]
    return priors, states


def _real_coordinates(operators):
    r"""
    Return the Hermitian ``operators`` as real vectors, one per column.
    """
    operators = np.asarray(operators)
    flat = operators.reshape(len(operators), -1)
    return np.concatenate([flat.real, flat.imag], axis=1).T


def unbiased_estimator(M, observables):
    r"""
    Return the minimum-norm values ``ê(i)`` with ``Σ_i ê(i) M_i = O``.

    For a list of observables, return one row of values per observable.

    EXAMPLES::

        >>> from povmsim.povm import Povm
        >>> unbiased_estimator(Povm.create_example("basis"), np.diag([1, -1])).round(12).tolist()
        [1.0, -1.0]

    The qubit SIC POVM is informationally complete::

        >>> X = np.array([[0, 1], [1, 0]])
        >>> e = unbiased_estimator(Povm.create_example("tetrahedron"), [X, np.diag([1, -1])])
        >>> e.shape
        (2, 4)

    A measurement that cannot see an observable has no unbiased estimator::

        >>> unbiased_estimator(Povm.create_example("basis"), X)
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Observable 1 has no unbiased estimator for this POVM, the residual is 1.41.

    """
    from scipy.linalg import lstsq

    observables = np.asarray(observables, dtype=complex)
    single = observables.ndim == 2
    if single:
        observables = observables[None]

    A = _real_coordinates(M.effects)
    estimators = []
    for (index, O) in enumerate(observables):
        O = hermitian(O)
        b = _real_coordinates([O])[:, 0]
        e, _, _, _ = lstsq(A, b)
        residual = np.linalg.norm(A @ e - b)
        if residual > TOL_SHADOW:
            raise ValidationError(
                f"Observable {index + 1} has no unbiased estimator for this POVM, the residual is {residual:.3g}."
            )
        estimators.append(e)

    estimators = np.array(estimators)
    return estimators[0] if single else estimators


def second_moment(M, estimator, rho):
    r"""
    Return ``Δ_M(O, ρ) = Σ_i ê(i)² tr(ρ M_i)``, the second moment of the
    estimator ``ê`` when measuring ``M`` on ``ρ``.

    EXAMPLES::

        >>> from povmsim.povm import Povm
        >>> second_moment(Povm.create_example("basis").depolarize(0.5), [2, -2], np.diag([1, 0]))
        4.0

    """
    expectations = np.einsum("ij,nji->n", np.asarray(rho), M.effects).real
    return float(np.dot(np.asarray(estimator, dtype=float) ** 2, expectations))


def _largest_second_moment(M, estimator):
    r"""
    Return ``max_ρ Δ_M(O, ρ)``, the largest eigenvalue of ``Σ_i ê(i)² M_i``.

    EXAMPLES::

        >>> from povmsim.povm import Povm
        >>> round(_largest_second_moment(Povm.create_example("trine"), [1, 0, 0]), 12)
        0.666666666667

    """
    return float(eigvals_hermitian(np.einsum("n,nij->ij", np.asarray(estimator, dtype=float) ** 2, M.effects))[-1])


@dataclass(frozen=True)
class ShadowReport:
    r"""
    The result of :func:`shadow_check`, one row per observable.

    ``bias`` is the deviation of ``Σ ê(i) M_i`` from ``O``, ``noisy_bias``
    the largest deviation of the rescaled estimator on the depolarized
    POVM from ``tr(ρ O)`` over the sampled states, ``identity_deviation``
    the largest relative deviation of the second moment from
    ``(1/c²)(c Δ_M(O, ρ) + (1 − c) Δ_M(O, I/d))`` and ``max_noisy`` and
    ``max_bound`` compare ``max_ρ Δ_N(O, ρ)`` to
    ``(1/c²)(c max_ρ Δ_M(O, ρ) + (1 − c) Δ_M(O, I/d))``.
    """

    c: float
    frame: object
    tol: float

    def __repr__(self):
        return f"ShadowReport(observables={len(self.frame)}, c={self.c:g}, passed={self.passed})"

    @property
    def passed(self):
        return bool(self.frame["passed"].all())

    def to_dict(self):
        return {"c": self.c, "tol": self.tol, "passed": self.passed, "observables": self.frame.to_dict(orient="records")}


def shadow_check(M, observables, estimator, c, states=50, seed=0, tol=TOL_SHADOW):
    r"""
    Return a :class:`ShadowReport` checking that ``ê/c`` is an unbiased
    estimator of the traceless ``observables`` for ``Φ_c(M)`` and that its
    second moment satisfies the variance identity on ``states`` random
    states.

    EXAMPLES:

    The basis measurement estimates ``Z``, after depolarization with
    ``c = 1/2`` the estimator doubles and its second moment is 4::

        >>> from povmsim.povm import Povm
        >>> report = shadow_check(Povm.create_example("basis"), [np.diag([1, -1])], [[1, -1]], c=0.5)
        >>> report
        ShadowReport(observables=1, c=0.5, passed=True)
        >>> report.frame["max_noisy"].round(12).tolist()
        [4.0]

    Without noise the identity is trivial::

        >>> shadow_check(Povm.create_example("basis"), [np.diag([1, -1])], [[1, -1]], c=1).passed
        True

    A random rank-one qutrit POVM with its least-squares estimator::

        >>> M = Povm.random(3, 9, seed=2, rank=1)
        >>> observables = [random_hermitian(3, seed) for seed in range(3)]
        >>> observables = [O - np.trace(O) / 3 * np.eye(3) for O in observables]
        >>> shadow_check(M, observables, unbiased_estimator(M, observables), c=0.02, states=50, seed=1).passed
        True

    Observables must be traceless and estimators unbiased::

        >>> shadow_check(Povm.create_example("basis"), [np.diag([1, 0])], [[1, 0]], c=0.5)
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Observable 1 is not traceless, tr(O) = 1.
        >>> shadow_check(Povm.create_example("basis"), [np.diag([1, -1])], [[1, 1]], c=0.5)
        Traceback (most recent call last):
        ...
        povmsim.errors.ValidationError: Estimator 1 is biased for the POVM, ‖Σ ê(i) M_i − O‖_F = 2.

    """
    import pandas as pd

    c = float(c)
    if not 0 < c <= 1:
        raise ValidationError(f"Visibility must be in (0, 1] but got {c}.")

    d = M.dim
    observables = [hermitian(O) for O in observables]
    estimator = np.atleast_2d(np.asarray(estimator, dtype=float))

    if len(estimator) != len(observables):
        raise ValidationError(f"Got {len(estimator)} estimators for {len(observables)} observables.")

    N = M.depolarize(c)
    samples = [random_state(d, generator(seed, i)) for i in range(states)]
    mixed = np.eye(d) / d

    rows = []
    for (index, (O, e)) in enumerate(zip(observables, estimator)):
        trace = np.trace(O).real
        if abs(trace) > TOL_TRACELESS:
            raise ValidationError(f"Observable {index + 1} is not traceless, tr(O) = {trace:.3g}.")

        bias = float(np.linalg.norm(np.einsum("n,nij->ij", e, M.effects) - O))
        if bias > tol:
            raise ValidationError(f"Estimator {index + 1} is biased for the POVM, ‖Σ ê(i) M_i − O‖_F = {bias:.3g}.")

        rescaled = e / c
        noisy_bias = 0.0
        identity_deviation = 0.0
        largest_sampled = 0.0
        baseline = second_moment(M, e, mixed)

        for rho in samples:
            estimate = np.dot(rescaled, np.einsum("ij,nji->n", rho, N.effects).real)
            noisy_bias = max(noisy_bias, abs(estimate - np.trace(rho @ O).real))

            noisy = second_moment(N, rescaled, rho)
            predicted = (c * second_moment(M, e, rho) + (1 - c) * baseline) / c**2
            identity_deviation = max(identity_deviation, abs(noisy - predicted) / max(1, abs(predicted)))
            largest_sampled = max(largest_sampled, noisy)

        max_noisy = _largest_second_moment(N, rescaled)
        max_bound = (c * _largest_second_moment(M, e) + (1 - c) * baseline) / c**2
        slack = tol * max(1, max_bound)

        rows.append(
            {
                "observable": index + 1,
                "bias": bias,
                "noisy_bias": float(noisy_bias),
                "identity_deviation": float(identity_deviation),
                "max_noisy": max_noisy,
                "max_bound": max_bound,
                "passed": bool(
                    noisy_bias <= tol * max(1, 1 / c)
                    and identity_deviation <= tol
                    and largest_sampled <= max_bound + slack
                    and abs(max_noisy - max_bound) <= slack
                ),
            }
        )

    report = ShadowReport(c=c, frame=pd.DataFrame(rows), tol=tol)
    if not report.passed:
        logger.warning(f"Shadow check failed: {report.frame.to_dict(orient='records')}")

    return report
