r"""
Utilities to read and write povmsim's documents on disk.

POVMs, states, partitions, witnesses, dilations and certificates are stored
as JSON documents. Complex matrices are encoded row-major as arrays of
``[re, im]`` pairs. Sampling reports are stored as data packages, see
:meth:`povmsim.sampling.SampleReport.save` and :func:`collect_reports`.

EXAMPLES:

A POVM document survives a round trip through a file::

    >>> import os.path, tempfile
    >>> from povmsim.povm import Povm, effect_distance
    >>> path = os.path.join(tempfile.mkdtemp(), "trine.json")
    >>> dump_document(Povm.create_example("trine").to_dict(), path)
    >>> effect_distance(load_povm(path), Povm.create_example("trine"))
    0.0

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
import json

import numpy as np

from povmsim.errors import FormatError


def encode_matrix(A):
    r"""
    Return the complex matrix ``A`` as nested lists of ``[re, im]`` pairs.

    EXAMPLES::

        >>> encode_matrix(np.array([[1, 2j]]))
        [[[1.0, 0.0], [0.0, 2.0]]]

    """
    A = np.asarray(A, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def decode_matrix(rows):
    r"""
    Return the complex matrix encoded by :func:`encode_matrix`.

    EXAMPLES::

        >>> decode_matrix([[[1, 0], [0, 2]]]).tolist()
        [[(1+0j), 2j]]

        >>> decode_matrix([[1, 2]])
        Traceback (most recent call last):
        ...
        povmsim.errors.FormatError: Matrices must be arrays of [re, im] pairs but got shape (1, 2).

    """
    try:
        pairs = np.array(rows, dtype=float)
    except (TypeError, ValueError) as e:
        raise FormatError(f"Could not parse matrix: {e}.") from e

    if pairs.ndim != 3 or pairs.shape[2] != 2:
        raise FormatError(f"Matrices must be arrays of [re, im] pairs but got shape {pairs.shape}.")

    return pairs[..., 0] + 1j * pairs[..., 1]


def load_document(path):
    r"""
    Return the JSON document stored at ``path``.

    EXAMPLES::

        >>> import os.path, tempfile
        >>> path = os.path.join(tempfile.mkdtemp(), "broken.json")
        >>> with open(path, "w") as f:
        ...     _ = f.write("{")
        >>> load_document(path)  # doctest: +ELLIPSIS
        Traceback (most recent call last):
        ...
        povmsim.errors.FormatError: .../broken.json is not a JSON document: Expecting property name enclosed in double quotes...

    """
    with open(path, encoding="utf-8") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"{path} is not a JSON document: {e}") from e

    if not isinstance(document, dict):
        raise FormatError(f"{path} does not contain a JSON object.")

    return document


def dump_document(document, path):
    r"""
    Write ``document`` as JSON to ``path``.

    Floats are written with their shortest round-trip representation and
    keys in their insertion order so that identical documents produce
    identical files.

    EXAMPLES::

        >>> import os.path, tempfile
        >>> path = os.path.join(tempfile.mkdtemp(), "document.json")
        >>> dump_document({"b": 0.1, "a": [1, 2]}, path)
        >>> print(open(path).read())
        {
          "b": 0.1,
          "a": [
            1,
            2
          ]
        }
        <BLANKLINE>

    """
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2, ensure_ascii=False)
        f.write("\n")


def load_povm(path, check=True):
    r"""
    Return the POVM stored at ``path``.

    EXAMPLES::

        >>> from povmsim.test.cli import example_file
        >>> load_povm(example_file("trine"))
        Povm(dim=2, outcomes=3)

    """
    from povmsim.povm import Povm

    return Povm.from_dict(load_document(path), check=check)


def state_to_dict(rho):
    r"""
    Return the density matrix ``rho`` as a document with fields ``dim`` and
    ``matrix``.

    EXAMPLES::

        >>> state_to_dict(np.eye(1))
        {'dim': 1, 'matrix': [[[1.0, 0.0]]]}

    """
    rho = np.asarray(rho)
    return {"dim": int(rho.shape[0]), "matrix": encode_matrix(rho)}


def state_from_dict(document):
    r"""
    Return the validated density matrix described by ``document``.

    EXAMPLES::

        >>> state_from_dict({"dim": 2, "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}).real.tolist()
        [[0.5, 0.0], [0.0, 0.5]]

        >>> state_from_dict({"matrix": []})
        Traceback (most recent call last):
        ...
        povmsim.errors.FormatError: State document is missing the field 'dim'.

    """
    from povmsim.povm import state

    for key in ["dim", "matrix"]:
        if key not in document:
            raise FormatError(f"State document is missing the field '{key}'.")

    return state(decode_matrix(document["matrix"]), dim=document["dim"])


def load_state(path):
    r"""
    Return the density matrix stored at ``path``.

    EXAMPLES::

        >>> from povmsim.test.cli import example_file
        >>> load_state(example_file("mixed2")).real.tolist()
        [[0.5, 0.0], [0.0, 0.5]]

    """
    return state_from_dict(load_document(path))


def load_witness(path):
    r"""
    Return the witness stored at ``path``.

    The file may also be a certificate, in which case its witness is
    returned.

    EXAMPLES::

        >>> from povmsim.test.cli import example_file
        >>> load_witness(example_file("basis2-witness"))
        SpWitness(target_dim=2, components=1)

    """
    from povmsim.povm import SpWitness

    document = load_document(path)
    if "witness" in document:
        document = document["witness"]

    return SpWitness.from_dict(document)


def load_partition(path):
    r"""
    Return the partition stored at ``path``.

    EXAMPLES::

        >>> import os.path, tempfile
        >>> from povmsim.partition import Partition
        >>> path = os.path.join(tempfile.mkdtemp(), "partition.json")
        >>> dump_document(Partition(3, [[0, 1], [2]]).to_dict(), path)
        >>> load_partition(path)
        Partition(n=3, subsets=[[1, 2], [3]])

    """
    from povmsim.partition import Partition

    return Partition.from_dict(load_document(path))


def collect_reports(data):
    r"""
    Return the sampling reports stored as data packages in the directory
    ``data`` and its subdirectories.

    EXAMPLES::

        >>> import tempfile
        >>> from povmsim.povm import Povm
        >>> from povmsim.sampling import sample
        >>> outdir = tempfile.mkdtemp()
        >>> sample(Povm.create_example("basis"), np.diag([1, 0]), shots=10, seed=0).save(outdir, "basis")
        >>> collect_reports(outdir)
        [SampleReport(shots=10, outcomes=2)]

    """
    import os.path
    from glob import glob

    import pandas as pd
    from frictionless import Package

    from povmsim.sampling import SampleReport

    reports = []

    for descriptor in sorted(glob(os.path.join(data, "**", "*.json"), recursive=True)):
        package = Package(descriptor)

        if not package.resources:
            raise FormatError(f"package {descriptor} has no CSV resources")

        resource = package.resources[0]
        df = pd.read_csv(os.path.join(os.path.dirname(descriptor), resource.path))

        metadata = resource.custom.get("metadata", {}).get("povmsim")
        if metadata is None:
            raise FormatError(f"package {descriptor} has no povmsim metadata")

        reports.append(SampleReport.from_frame(df, metadata))

    return reports
