r"""
Helpers to exercise the command line interface in doctests.

EXAMPLES::

    >>> invoke("tradeoff", "--k", "2")
    C_required: 1.0
    q_lower: 0.125

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
import os.path


def invoke(*args):
    r"""
    Run the command line interface with ``args``, print its output and, if
    it is not zero, its exit code.

    EXAMPLES::

        >>> invoke("validate", "/nonexistent/basis.json")
        [Errno 2] No such file or directory: '/nonexistent/basis.json'
        exit code: 3

    """
    import io
    from contextlib import redirect_stderr, redirect_stdout

    from povmsim.entrypoint import run

    output = io.StringIO()
    with redirect_stdout(output), redirect_stderr(output):
        code = run([str(arg) for arg in args])

    print(output.getvalue(), end="")
    if code:
        print(f"exit code: {code}")


def _example_document(name):
    r"""
    Return the document of the example file ``name``.
    """
    import numpy as np

    from povmsim.finegrain import extremal_refine
    from povmsim.local import state_to_dict
    from povmsim.partition import Partition
    from povmsim.povm import Povm, SpWitness, StochasticMap

    basis = Povm.create_example("basis")

    documents = {
        "basis2": lambda: basis.to_dict(),
        "trine": lambda: Povm.create_example("trine").to_dict(),
        "broken": lambda: Povm([np.eye(2), np.eye(2)], check=False).to_dict(),
        "basis2-refined": lambda: extremal_refine(basis).refined.to_dict(),
        "mixed2": lambda: state_to_dict(np.eye(2) / 2),
        "zero2": lambda: state_to_dict(np.diag([1, 0])),
        "basis2-witness": lambda: SpWitness.from_projective(basis).to_dict(),
        "trine-tampered-witness": lambda: SpWitness.from_projective(basis)
        .post_process(StochasticMap([[1, 0], [0, 1], [0, 0]]))
        .to_dict(),
        "basis2-affine-witness": lambda: SpWitness(
            [(2.0, basis, StochasticMap.identity(2)), (-1.0, basis, StochasticMap.identity(2))], check=False
        ).to_dict(),
        "singletons2": lambda: Partition.singletons(2).to_dict(),
    }

    if name not in documents:
        raise KeyError(f"No example file {name}. Use one of {', '.join(documents)}.")

    return documents[name]()


def example_file(name):
    r"""
    Return the path of the example document ``name``, creating it in the
    temporary directory if it does not exist yet.

    EXAMPLES::

        >>> os.path.basename(example_file("trine"))
        'trine.json'

        >>> example_file("sic")
        Traceback (most recent call last):
        ...
        KeyError: 'No example file sic. Use one of basis2, trine, broken, basis2-refined, mixed2, zero2, basis2-witness, trine-tampered-witness, basis2-affine-witness, singletons2.'

    """
    import tempfile

    from filelock import FileLock

    from povmsim.local import dump_document

    directory = os.path.join(tempfile.gettempdir(), "povmsim-examples")
    path = os.path.join(directory, f"{name}.json")

    with FileLock(f"{directory}.lock"):
        if not os.path.exists(path):
            document = _example_document(name)
            os.makedirs(directory, exist_ok=True)
            dump_document(document, path)

    return path
