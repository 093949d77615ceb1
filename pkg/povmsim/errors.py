r"""
Exceptions raised by povmsim.

All exceptions derive from the builtin exceptions so that callers can keep
catching ``ValueError`` for bad input.

EXAMPLES::

    >>> from povmsim.povm import Povm
    >>> Povm([[[1, 1], [0, 1]]])
    Traceback (most recent call last):
    ...
    povmsim.errors.ValidationError: Effect 1 is not Hermitian, deviation 1 exceeds 1e-10.

    >>> issubclass(ValidationError, ValueError)
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


class ValidationError(ValueError):
    r"""
    Raised when an input violates the invariants of its type, e.g., a
    non-Hermitian matrix or a POVM whose effects do not sum to the identity.
    """


class InfeasibleError(ValueError):
    r"""
    Raised when parameters cannot be satisfied, e.g., a partition search
    whose size constraints admit no partition.
    """


class CertificationError(RuntimeError):
    r"""
    Raised when a constructed certificate fails its independent verification.
    """


class FormatError(ValueError):
    r"""
    Raised when a file cannot be parsed into one of povmsim's documents.
    """
