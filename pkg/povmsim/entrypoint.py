r"""
The povmsim command line interface.

Every command reads its inputs from JSON documents, see
:mod:`povmsim.local`, prints a human readable report and optionally writes
its result as a document that other commands can read again.

The exit code is 0 on success, 1 for invalid inputs, 2 when a certificate
or simulation fails its verification, 3 for unreadable files and 4 for
infeasible parameters or invalid usage.

EXAMPLES::

    >>> from povmsim.test.cli import invoke, example_file
    >>> invoke("validate", example_file("basis2"))
    ok

    >>> invoke("--help")  # doctest: +ELLIPSIS +NORMALIZE_WHITESPACE
    usage: povmsim [-h] [--verbose] ...
    ...

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
import argparse
import logging
import sys

from povmsim.errors import CertificationError, FormatError, InfeasibleError, ValidationError

logger = logging.getLogger("povmsim")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_UNVERIFIED = 2
EXIT_FORMAT = 3
EXIT_INFEASIBLE = 4


def _print_checks(checks):
    r"""
    Print one line per check with its value and bound.

    EXAMPLES::

        >>> _print_checks({"witness": {"value": 0.0, "threshold": 1e-08, "passed": True}})
        witness: 0 ≤ 1e-08 ✓

    """
    from povmsim.descriptor import Descriptor

    checks = Descriptor(checks)
    for name in checks:
        print(f"{name}: {checks[name]!r}")


def _write(document, output):
    if output is None:
        return

    from povmsim.local import dump_document

    dump_document(document, output)
    logger.info(f"Wrote {output}.")


def _validate(args):
    r"""
    Print the violated invariants of a POVM.

    EXAMPLES::

        >>> from povmsim.test.cli import invoke, example_file
        >>> invoke("validate", example_file("broken"))
        Effects do not sum to the identity, ‖Σ M_i − I‖_F = 1.41 exceeds 2e-08.
        exit code: 1

    """
    from povmsim.local import load_povm

    report = load_povm(args.povm, check=False).validate(tol_psd=args.tol_psd, tol_norm=args.tol_norm)
    print(report)
    return EXIT_OK if report.ok else EXIT_INVALID


def _finegrain(args):
    r"""
    Print a flat rank-one fine-graining of a POVM.

    EXAMPLES::

        >>> from povmsim.test.cli import invoke, example_file
        >>> invoke("finegrain", example_file("trine"), "--delta", "0.5", "--eps", "0.5")  # doctest: +ELLIPSIS
        Refinement(outcomes=6, flatness=1)
        recovery: ... ≤ 1e-09 ✓

    """
    from povmsim.finegrain import flat_refine
    from povmsim.local import load_povm
    from povmsim.pipeline import default_eps

    M = load_povm(args.povm)
    eps = default_eps(M.dim) if args.eps is None else args.eps
    refinement = flat_refine(M, delta=args.delta, eps=eps)

    error = refinement.recovery_error(M)
    print(refinement)
    _print_checks({"recovery": {"value": float(f"{error:.3g}"), "threshold": args.tol_recon}})

    _write(refinement.to_dict(), args.output)
    return EXIT_OK if error <= args.tol_recon else EXIT_UNVERIFIED


def _partition(args):
    r"""
    Print a partition of the outcomes of a POVM and its success probability.

    EXAMPLES::

        >>> from povmsim.test.cli import invoke, example_file
        >>> invoke("partition", example_file("trine"), "--r", "2", "--max-size", "2", "--mode", "exhaustive")  # doctest: +ELLIPSIS
        Partition(n=3, subsets=...)
        q: 0.6

    """
    from povmsim.local import load_povm
    from povmsim.partition import optimize_partition, random_partition, success_prob

    M = load_povm(args.povm)
    r = len(M) if args.r is None else args.r

    if args.mode == "random":
        S = random_partition(len(M), r=r, seed=args.seed)
    else:
        max_size = len(M) if args.max_size is None else args.max_size
        S = optimize_partition(M, r=r, max_size=max_size, budget=args.budget, seed=args.seed, mode=args.mode)

    q = success_prob(M, S)
    print(S)
    print(f"q: {q:.12g}")

    _write({**S.to_dict(), "q": q}, args.output)
    return EXIT_OK


def _certify_sp(args):
    r"""
    Print and write a certificate that a depolarized POVM is projectively
    simulable.

    EXAMPLES::

        >>> import os.path, tempfile
        >>> from povmsim.test.cli import invoke, example_file
        >>> output = os.path.join(tempfile.mkdtemp(), "trine-certificate.json")
        >>> invoke("certify-sp", example_file("trine"), "--delta", "0.5", "--eps", "0.3333333333333333", "--mode", "exhaustive", "--output", output)  # doctest: +ELLIPSIS
        SpCertificate(dim=2, c_found=..., passed=True)
        witness: ... ≤ 1e-08 ✓
        composition: ... ≤ 1e-09 ✓
        amplitudes: ... ≥ ... ✓
        c_lower: ... ≥ ... ✓

    The certificate verifies at its visibility::

        >>> invoke("check-witness", output, example_file("trine"))  # doctest: +ELLIPSIS
        WitnessReport(max_deviation=..., threshold=1e-08, passed=True)

    """
    from povmsim.local import load_povm
    from povmsim.pipeline import certify_sp

    M = load_povm(args.povm)
    certificate = certify_sp(
        M,
        delta=args.delta,
        eps=args.eps,
        mode=args.mode,
        seed=args.seed,
        budget=args.budget,
        tol=args.tol_witness,
        tol_recon=args.tol_recon,
    )

    print(certificate)
    _print_checks(certificate.diagnostics["checks"])

    _write(certificate.to_dict(), args.output)
    return EXIT_OK if certificate.passed else EXIT_UNVERIFIED


def _certify_random(args):
    r"""
    Print the trials of the randomized certification of a flat rank-one
    POVM.

    EXAMPLES::

        >>> from povmsim.test.cli import invoke, example_file
        >>> invoke("certify-random", example_file("basis2-refined"), "--trials", "4")  # doctest: +ELLIPSIS +NORMALIZE_WHITESPACE
        trial ...
        SpCertificate(dim=2, c_found=0.5, passed=True)
        ...

    """
    from povmsim.local import load_povm
    from povmsim.pipeline import randomized_certify

    M = load_povm(args.povm)
    result = randomized_certify(
        M, C_param=args.C, seed=args.seed, trials=args.trials, tol=args.tol_witness, tol_recon=args.tol_recon
    )

    print(result.trials.to_string(index=False))

    if result.certificate is None:
        print(f"No partition passed in {len(result.trials)} trials.")
        return EXIT_UNVERIFIED

    print(result.certificate)
    _print_checks(result.certificate.diagnostics["checks"])

    _write(result.certificate.to_dict(), args.output)
    return EXIT_OK if result.certificate.passed else EXIT_UNVERIFIED


def _dilate(args):
    r"""
    Print and write a simulation of a POVM with an ancilla.

    EXAMPLES::

        >>> from povmsim.test.cli import invoke, example_file
        >>> invoke("dilate", example_file("trine"), "--ancilla", "2")  # doctest: +ELLIPSIS
        AncillaSimulation(dim=2, k=2, blocks=1, q=1)
        deviation: ... ≤ 1e-08 ✓

        >>> invoke("dilate", example_file("trine"), "--ancilla", "1")
        An ancilla simulation needs k ≥ 2 but got k=1.
        exit code: 1

    The written document nests the dilations of the blocks::

        >>> import os, tempfile
        >>> from povmsim.local import load_document
        >>> output = os.path.join(tempfile.mkdtemp(), "trine-ancilla.json")
        >>> invoke("dilate", example_file("trine"), "--ancilla", "2", "--output", output)  # doctest: +ELLIPSIS
        AncillaSimulation(...)
        deviation: ...
        >>> document = load_document(output)
        >>> list(document)
        ['target', 'k', 'q', 'weights', 'dilations', 'postprocs', 'diagnostics']
        >>> {"base_dim", "ambient_dim", "layout", "projective", "coarse"} <= set(document["dilations"][0])
        True

    """
    from povmsim.local import load_povm
    from povmsim.pipeline import simulate_with_ancilla

    M = load_povm(args.povm)
    simulation = simulate_with_ancilla(
        M,
        k=args.ancilla,
        delta=args.delta,
        eps=args.eps,
        mode=args.mode,
        seed=args.seed,
        budget=args.budget,
        tol=args.tol_simulation,
    )

    print(simulation)
    _print_checks(
        {"deviation": {"value": float(f"{simulation.max_deviation():.3g}"), "threshold": args.tol_simulation}}
    )

    _write(simulation.to_dict(), args.output)
    return EXIT_OK


def _check_witness(args):
    r"""
    Verify a witness, or the witness of a certificate, against a depolarized
    POVM.

    Without ``--noise``, certificates are checked at their visibility and
    bare witnesses against the POVM itself.

    EXAMPLES::

        >>> from povmsim.test.cli import invoke, example_file
        >>> invoke("check-witness", example_file("basis2-witness"), example_file("basis2"))
        WitnessReport(max_deviation=0, threshold=1e-08, passed=True)

        >>> invoke("check-witness", example_file("trine-tampered-witness"), example_file("trine"), "--noise", "0.3")  # doctest: +ELLIPSIS
        WitnessReport(max_deviation=..., threshold=1e-08, passed=False)
        exit code: 2

    Witnesses must be convex decompositions, an affine combination that
    reproduces the POVM is rejected::

        >>> invoke("check-witness", example_file("basis2-affine-witness"), example_file("basis2"))
        WitnessReport(max_deviation=0, threshold=1e-08, passed=False)
        exit code: 2

    """
    from povmsim.local import load_document, load_povm, load_witness
    from povmsim.povm import verify_sp_witness

    M = load_povm(args.povm)
    witness = load_witness(args.witness)

    c = args.noise
    if c is None:
        c = load_document(args.witness).get("c_found", 1.0)

    report = verify_sp_witness(witness, M.depolarize(c), tol=args.tol_witness, tol_proj=args.tol_proj, tol_stoch=args.tol_stoch)
    print(report)
    return EXIT_OK if report.passed else EXIT_UNVERIFIED


def _sample(args):
    r"""
    Print the outcome counts of measuring a POVM, or a simulation ensemble
    of it, on a state.

    EXAMPLES::

        >>> from povmsim.test.cli import invoke, example_file
        >>> invoke("sample", example_file("basis2"), example_file("zero2"), "--shots", "100")  # doctest: +NORMALIZE_WHITESPACE
        outcome  count  empirical  exact
              1    100        1.0    1.0
              2      0        0.0    0.0
        SampleReport(shots=100, outcomes=2)
        tv_distance: 0 ≤ 0.566 ✓

    With a partition, the singleton ensemble of the basis measurement accepts
    about half of the shots::

        >>> invoke("sample", example_file("basis2"), example_file("zero2"), "--shots", "100", "--ensemble", example_file("singletons2"))  # doctest: +ELLIPSIS +NORMALIZE_WHITESPACE
        outcome  count  empirical  exact
        ...
        acceptance_deviation: ... ≤ 0.25 ✓

    """
    import math

    from povmsim.local import load_partition, load_povm, load_state
    from povmsim.sampling import sample, sample_with_postselection

    M = load_povm(args.povm)
    rho = load_state(args.state)

    if args.ensemble is None:
        report = sample(M, rho, shots=args.shots, seed=args.seed)
    else:
        from povmsim.partition import build_ensemble

        ensemble = build_ensemble(M, load_partition(args.ensemble))
        report = sample_with_postselection(ensemble, rho, shots=args.shots, seed=args.seed)

    print(report.to_frame().to_string(index=False))
    print(report)

    checks = {
        "tv_distance": {
            "value": float(f"{report.tv_distance():.3g}"),
            "threshold": float(f"{4 * math.sqrt(len(M) / max(report.accepted, 1)):.3g}"),
        }
    }
    if report.postselected:
        checks["acceptance_deviation"] = {
            "value": float(f"{abs(report.acceptance_rate - report.q):.3g}"),
            "threshold": float(f"{5 * math.sqrt(max(report.q * (1 - report.q), 0) / report.shots):.3g}"),
        }
    _print_checks(checks)

    if args.outdir is not None:
        import os.path

        basename = os.path.splitext(os.path.basename(args.povm))[0]
        report.save(args.outdir, basename)

    return EXIT_OK


def _demo(args):
    r"""
    Run one of the applications of depolarized measurements on random
    instances.

    EXAMPLES::

        >>> from povmsim.test.cli import invoke
        >>> invoke("demo", "discrimination", "--seed", "3")  # doctest: +ELLIPSIS
        DiscriminationReport(states=3, c=0.02, inequality_ok=True)
        p_succ_noisy: ... ≥ ... ✓

        >>> invoke("demo", "shadow", "--seed", "3")  # doctest: +ELLIPSIS
        ShadowReport(observables=3, c=0.02, passed=True)
        ...

    """
    import numpy as np

    from povmsim.povm import Povm
    from povmsim.seeding import derive_seed

    if args.application == "discrimination":
        from povmsim.sampling import disc_success, random_discrimination

        priors, states = random_discrimination(3, 3, seed=args.seed)
        M = Povm.random(3, 3, seed=derive_seed(args.seed, 1))
        report = disc_success(priors, states, M, c=args.c)

        print(report)
        _print_checks(
            {
                "p_succ_noisy": {
                    "value": report.p_succ_noisy,
                    "minimum": args.c * report.p_succ_M,
                    "passed": report.inequality_ok,
                }
            }
        )
        return EXIT_OK if report.inequality_ok else EXIT_UNVERIFIED

    from povmsim.linalg import random_hermitian
    from povmsim.sampling import shadow_check, unbiased_estimator

    M = Povm.random(3, 9, seed=derive_seed(args.seed, 1), rank=1)
    observables = [random_hermitian(3, derive_seed(args.seed, 2, i)) for i in range(3)]
    observables = [O - np.trace(O) / 3 * np.eye(3) for O in observables]
    report = shadow_check(M, observables, unbiased_estimator(M, observables), c=args.c, seed=args.seed)

    print(report)
    print(report.frame.to_string(index=False))
    return EXIT_OK if report.passed else EXIT_UNVERIFIED


def _tradeoff(args):
    r"""
    Print the partition constant and success probability of an ancilla
    simulation.

    EXAMPLES::

        >>> from povmsim.test.cli import invoke
        >>> invoke("tradeoff", "--k", "5")
        C_required: 1.0
        q_lower: 0.25

        >>> invoke("tradeoff", "--k", "3", "--ratio", "2")
        An ancilla of dimension 3 is too small for flatness 2: need k − 1 > 2.
        exit code: 4

    """
    from povmsim.descriptor import Descriptor
    from povmsim.pipeline import ancilla_tradeoff

    print(Descriptor(ancilla_tradeoff(args.k, eps_ratio=args.ratio)).yaml, end="")
    return EXIT_OK


def _parser():
    r"""
    Return the argument parser of the command line interface.
    """
    from povmsim.linalg import TOL_RECON
    from povmsim.pipeline import DEFAULT_DELTA, TOL_SIMULATION, TRIAL_CAP
    from povmsim.povm import TOL_NORM, TOL_PROJ, TOL_PSD, TOL_STOCH, TOL_WITNESS

    parser = argparse.ArgumentParser(
        prog="povmsim", description="Simulate quantum measurements by projective measurements."
    )
    parser.add_argument("--verbose", action="store_true", help="Log the progress of searches and constructions.")
    commands = parser.add_subparsers(title="commands", required=True, metavar="COMMAND")

    def command(name, handler, description):
        subparser = commands.add_parser(name, help=description, description=description)
        subparser.set_defaults(handler=handler)
        return subparser

    def search(subparser):
        subparser.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="Flatness slack of the fine-graining.")
        subparser.add_argument("--eps", type=float, default=None, help="Magnitude cap of the fine-graining, min(0.1, 1/d) by default.")
        subparser.add_argument("--mode", choices=["auto", "exhaustive", "greedy", "random"], default="auto")
        subparser.add_argument("--seed", type=int, default=0)
        subparser.add_argument("--budget", type=int, default=None, help="Proposals of the local search, 200 n by default.")

    def output(subparser):
        subparser.add_argument("--output", default=None, help="Write the result as a JSON document to this path.")

    validate = command("validate", _validate, "Check that a POVM is valid.")
    validate.add_argument("povm")
    validate.add_argument("--tol-psd", type=float, default=TOL_PSD)
    validate.add_argument("--tol-norm", type=float, default=TOL_NORM)

    finegrain = command("finegrain", _finegrain, "Fine-grain a POVM into a flat rank-one POVM.")
    finegrain.add_argument("povm")
    finegrain.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    finegrain.add_argument("--eps", type=float, default=None)
    finegrain.add_argument("--tol-recon", type=float, default=TOL_RECON)
    output(finegrain)

    partition = command("partition", _partition, "Partition the outcomes of a POVM.")
    partition.add_argument("povm")
    partition.add_argument("--r", type=int, default=None, help="Number of blocks, the number of outcomes by default.")
    partition.add_argument("--max-size", type=int, default=None)
    partition.add_argument("--mode", choices=["auto", "exhaustive", "greedy", "random"], default="auto")
    partition.add_argument("--seed", type=int, default=0)
    partition.add_argument("--budget", type=int, default=None)
    output(partition)

    certify = command("certify-sp", _certify_sp, "Certify that a depolarized POVM is projectively simulable.")
    certify.add_argument("povm")
    search(certify)
    certify.add_argument("--tol-witness", type=float, default=TOL_WITNESS)
    certify.add_argument("--tol-recon", type=float, default=TOL_RECON)
    output(certify)

    certify_random = command(
        "certify-random", _certify_random, "Certify a flat rank-one POVM with randomized partitions."
    )
    certify_random.add_argument("povm")
    certify_random.add_argument("--C", type=float, default=1.0)
    certify_random.add_argument("--seed", type=int, default=0)
    certify_random.add_argument("--trials", type=int, default=TRIAL_CAP)
    certify_random.add_argument("--tol-witness", type=float, default=TOL_WITNESS)
    certify_random.add_argument("--tol-recon", type=float, default=TOL_RECON)
    output(certify_random)

    dilate = command(
        "dilate",
        _dilate,
        "Simulate a POVM with postselection using an ancilla. The output is a simulation document"
        " with the target, the block weights and one Naimark dilation per block under 'dilations'.",
    )
    dilate.add_argument("povm")
    dilate.add_argument("--ancilla", type=int, required=True, help="Dimension k of the ancilla.")
    search(dilate)
    dilate.add_argument("--tol-simulation", type=float, default=TOL_SIMULATION)
    output(dilate)

    check = command("check-witness", _check_witness, "Verify a witness against a depolarized POVM.")
    check.add_argument("witness")
    check.add_argument("povm")
    check.add_argument("--noise", type=float, default=None, help="Visibility c of the depolarized POVM.")
    check.add_argument("--tol-witness", type=float, default=TOL_WITNESS)
    check.add_argument("--tol-proj", type=float, default=TOL_PROJ)
    check.add_argument("--tol-stoch", type=float, default=TOL_STOCH, help="Tolerance on the weights summing to one.")

    sample = command("sample", _sample, "Measure a POVM on a state.")
    sample.add_argument("povm")
    sample.add_argument("state")
    sample.add_argument("--shots", type=int, default=1000)
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--ensemble", default=None, help="Sample from the simulation ensemble of this partition.")
    sample.add_argument("--outdir", default=None, help="Write the report as a data package to this directory.")

    demo = command("demo", _demo, "Run an application of depolarized measurements on random instances.")
    demo.add_argument("application", choices=["discrimination", "shadow"])
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--c", type=float, default=0.02, help="Visibility of the depolarized measurement.")

    tradeoff = command("tradeoff", _tradeoff, "Print the ancilla size tradeoff.")
    tradeoff.add_argument("--k", type=int, required=True)
    tradeoff.add_argument("--ratio", type=float, default=1.0)

    return parser


def run(argv=None):
    r"""
    Run the command line interface with the arguments ``argv`` and return
    its exit code.

    EXAMPLES::

        >>> run(["validate"])
        4

    """
    parser = _parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if not e.code else EXIT_INFEASIBLE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s"
    )

    try:
        return args.handler(args)
    except InfeasibleError as e:
        print(e, file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValidationError as e:
        print(e, file=sys.stderr)
        return EXIT_INVALID
    except CertificationError as e:
        print(e, file=sys.stderr)
        return EXIT_UNVERIFIED
    except (FormatError, OSError) as e:
        print(e, file=sys.stderr)
        return EXIT_FORMAT


def main():
    sys.exit(run())
