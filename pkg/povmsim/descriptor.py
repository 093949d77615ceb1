r"""
Wrappers for the free-form diagnostics stored in certificates, simulations
and sampling reports.

Diagnostics are stored as JSON objects. In Python, such a nested JSON object
gets turned into a hierarchy of dictionaries and lists. The descriptors in
this module make these easier to explore in an interactive session.

EXAMPLES:

To add convenience methods to a document, run it through the
:func:`Descriptor` factory function::

    >>> descriptor = Descriptor({'ks check': {'eps': 0.5}})

It can be dumped to YAML::

    >>> print(descriptor.yaml)
    ks check:
      eps: 0.5
    <BLANKLINE>

It can be explored with attributes that are more tab-completion friendly::

    >>> descriptor.ks_check.eps
    0.5

Checks, i.e., values compared to a bound, print both together::

    >>> Descriptor({'value': 1e-15, 'threshold': 1e-08, 'passed': True})
    1e-15 ≤ 1e-08 ✓

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


class GenericDescriptor:
    r"""
    Wrapper for a document to make searching in diagnostics easier.

    EXAMPLES::

        >>> GenericDescriptor({'a': 0})
        {'a': 0}

    """

    def __init__(self, descriptor):
        self._descriptor = descriptor

    def __dir__(self):
        r"""
        Return the attributes of this descriptor.

        EXAMPLES::

            >>> descriptor = GenericDescriptor({'q found': 0})
            >>> 'q_found' in dir(descriptor)
            True

        """
        return list(key.replace(" ", "_") for key in self._descriptor.keys()) + object.__dir__(self)

    def __getattr__(self, name):
        r"""
        Return the entry ``name`` of the descriptor.

        Entries may be spelled with spaces or underscores.

        EXAMPLES::

            >>> descriptor = GenericDescriptor({'q_found': 0.5, 'ks check': {}})
            >>> descriptor.q_found, descriptor.ks_check
            (0.5, {})

            >>> descriptor.c
            Traceback (most recent call last):
            ...
            AttributeError: Descriptor has no entry c. Did you mean one of ['q_found', 'ks_check']?

        """
        if name.startswith("_"):
            raise AttributeError(name)

        for key in [name, name.replace("_", " ")]:
            if key in self._descriptor:
                return Descriptor(self._descriptor[key])

        raise AttributeError(
            f"Descriptor has no entry {name}. Did you mean one of {[key.replace(' ', '_') for key in self._descriptor.keys()]}?"
        )

    def __getitem__(self, name):
        r"""
        Return the entry ``name`` of the descriptor.

        EXAMPLES::

            >>> descriptor = GenericDescriptor({'a': 0})
            >>> descriptor["a"]
            0

            >>> descriptor["b"]
            Traceback (most recent call last):
            ...
            KeyError: "Descriptor has no entry b. Did you mean one of ['a']?"

        """
        if name in self._descriptor:
            return Descriptor(self._descriptor[name])

        raise KeyError(f"Descriptor has no entry {name}. Did you mean one of {list(self._descriptor.keys())}?")

    def __iter__(self):
        return iter(self._descriptor)

    def __repr__(self):
        r"""
        Return a printable representation of this descriptor.

        EXAMPLES::

            >>> GenericDescriptor({})
            {}

        """
        return repr(self._descriptor)

    @property
    def yaml(self):
        r"""Return a printable representation of this descriptor in yaml format.

        EXAMPLES::

            >>> descriptor = GenericDescriptor({'b': 0, 'a': [1, 2]})
            >>> print(descriptor.yaml)
            b: 0
            a:
            - 1
            - 2
            <BLANKLINE>

        """
        import yaml

        return yaml.dump(self._descriptor, sort_keys=False, allow_unicode=True)


class CheckDescriptor(GenericDescriptor):
    r"""
    Extends a descriptor with convenience methods when it is encoding a
    check, i.e., a value and an upper ``threshold`` or a lower ``minimum``.

    EXAMPLES::

        >>> from povmsim.povm import Povm
        >>> from povmsim.pipeline import certify_sp
        >>> checks = certify_sp(Povm.create_example("basis")).checks
        >>> checks.witness.passed
        True

    """

    @property
    def bound(self):
        r"""
        Return the bound the value is compared to.

        EXAMPLES::

            >>> CheckDescriptor({'value': 0.3, 'minimum': 0.25}).bound
            0.25

        """
        if "threshold" in self._descriptor:
            return self._descriptor["threshold"]
        return self._descriptor["minimum"]

    @property
    def passed(self):
        r"""
        Return whether the value satisfies its bound.

        The stored verdict is used when present since it may include a
        tolerance.

        EXAMPLES::

            >>> CheckDescriptor({'value': 2, 'threshold': 1}).passed
            False
            >>> CheckDescriptor({'value': 2, 'minimum': 1}).passed
            True

        """
        if "passed" in self._descriptor:
            return bool(self._descriptor["passed"])
        if "threshold" in self._descriptor:
            return self.value <= self.bound
        return self.value >= self.bound

    def __repr__(self):
        r"""
        Return a printable representation of this check.

        EXAMPLES::

            >>> CheckDescriptor({'value': 0.3, 'minimum': 0.25})
            0.3 ≥ 0.25 ✓
            >>> CheckDescriptor({'value': 2.5e-08, 'threshold': 1e-08})
            2.5e-08 ≤ 1e-08 ✗

        """
        relation = "≤" if "threshold" in self._descriptor else "≥"
        mark = "✓" if self.passed else "✗"
        return f"{self.value:.6g} {relation} {self.bound:.6g} {mark}"


# pylint: disable=invalid-name
def Descriptor(descriptor):
    r"""
    Return ``descriptor`` augmented with additional convenience methods.

    EXAMPLES:

    Primitive types are returned unchanged::

        >>> Descriptor("string")
        'string'

    Dictionaries are augmented with attribute access::

        >>> descriptor = Descriptor({"an attribute": 13.37})
        >>> descriptor.an_attribute
        13.37

    Lists are recursively augmented::

        >>> descriptor = Descriptor([{"an attribute": 13.37}, {}])
        >>> descriptor[0].an_attribute
        13.37

    Dictionaries encoding a check are augmented with a verdict::

        >>> Descriptor({"value": 0.1, "threshold": 1}).passed
        True

    """
    if isinstance(descriptor, GenericDescriptor):
        return descriptor

    if isinstance(descriptor, dict):
        if "value" in descriptor and ({"threshold", "minimum"} & set(descriptor.keys())):
            return CheckDescriptor(descriptor)

        return GenericDescriptor(descriptor)

    if isinstance(descriptor, list):
        return [Descriptor(item) for item in descriptor]

    return descriptor
