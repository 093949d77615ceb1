r"""
Counter-based random streams.

Every randomized operation in povmsim takes an integer ``seed``. Independent
sub-streams, e.g., one per trial or one per block of samples, are keyed by
the seed and a tuple of counters so that they can be generated in any order
and on any worker without coupling.

EXAMPLES::

    >>> a = generator(0, 3).random()
    >>> b = generator(0, 3).random()
    >>> a == b
    True
    >>> generator(0, 4).random() == a
    False

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
import numpy as np


def generator(seed, *counters):
    r"""
    Return a Philox generator for the stream ``(seed, *counters)``.

    EXAMPLES::

        >>> generator(7).integers(10, size=3).tolist() == generator(7).integers(10, size=3).tolist()
        True

    """
    entropy = [int(seed), *[int(counter) for counter in counters]]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def derive_seed(seed, *counters):
    r"""
    Return an integer seed for the sub-stream ``(seed, *counters)``.

    This is used to hand a trial its own seed so that it can again be passed
    to functions that take a ``seed``.

    EXAMPLES::

        >>> derive_seed(0, 1) == derive_seed(0, 1)
        True
        >>> derive_seed(0, 1) == derive_seed(0, 2)
        False

    """
    entropy = [int(seed), *[int(counter) for counter in counters]]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint32)[0])


def as_generator(seed):
    r"""
    Return ``seed`` if it is already a generator, otherwise the generator
    of the stream ``seed``.

    EXAMPLES::

        >>> rng = generator(0)
        >>> as_generator(rng) is rng
        True
        >>> as_generator(0).random() == generator(0).random()
        True

    """
    if isinstance(seed, np.random.Generator):
        return seed
    return generator(seed)
