# Copyright 2023 by the hdrconform authors
#
# This file is part of hdrconform
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program; if not, see <http://www.gnu.org/licenses/>.

"""Markers for absent values of any type.

Signalling fields, measurement log cells and optional report entries are often absent. Absence is
a finding, never a default: an absent transfer characteristics code must not become 0 or 2.

Absent objects of type X are instances of an "Invalid X" class derived from both X and L{Invalid},
so they still type-check as X while being falsy and recognizable through L{isvalid}. NaN floats
(as produced by empty CSV cells) are also seen as absent. L{invalid_for} returns the marker of a
given type and L{jsonable} maps absent values to JSON null.

"""

from math import isnan
from typing import Any, Dict, Type


class Invalid:
    """Define Invalid classes of any type.

    An invalid object of type <T> is an instance of a class
    that inherits from both Invalid and <T>

        >>> class InvalidInt(Invalid, int):
                _invalrepr = "Invalid int"
        >>> invalidint = InvalidInt()
        >>> (invalidint, 3)
        (Invalid int, 3)
        >>> isvalid(invalidint), isvalid(3)
        (False, True)
        >>> isinstance(invalidint, int), isinstance(3,int)
        (True, True)

    _invalrepr and _invalstr shall be overriden in subclasses

    """

    _invalrepr = "Invalid Object"
    """Representation of the invalid object"""
    _invalstr = "absent"
    """String conversion of the invalid object"""

    def __bool__(self) -> bool:
        """Return False from any invalid object."""
        return False

    def __str__(self) -> str:
        """Convert invalid objects to self._invalstr."""
        return self._invalstr

    def __repr__(self) -> str:
        """Represent invalid objects by self._invalrepr."""
        return self._invalrepr

    def __eq__(self, other: Any) -> bool:
        """Absent values are only equal to absent values of the same kind."""
        return type(self) is type(other)

    def __hash__(self) -> int:
        """Hash on the marker class."""
        return hash(type(self))


def isvalid(obj: Any) -> bool:
    """Return False if the object is an instance of Invalid class, None, or a NaN float.

    @param obj: object to be tested
    @return: is the object valid?
    @rtype: bool

    """
    if obj is None or isinstance(obj, Invalid):
        return False
    if isinstance(obj, float) and isnan(obj):
        return False
    return True


class InvalidInt(Invalid, int):
    """Invalid int class."""

    _invalrepr = "Invalid int"


invalidint: InvalidInt = InvalidInt()
"""invalid int object"""


class InvalidFloat(Invalid, float):
    """Invalid float class."""

    _invalrepr = "Invalid float"

    def __new__(cls) -> "InvalidFloat":
        """Store NaN as the float payload, so that arithmetic never yields a silent number."""
        return super().__new__(cls, "nan")  # type: ignore


invalidfloat: InvalidFloat = InvalidFloat()
"""invalid float object"""


class InvalidStr(Invalid, str):
    """invalid str class."""

    _invalrepr = "Invalid string"


invalidstr: InvalidStr = InvalidStr()
"""invalid str object"""


_MARKERS: Dict[Type[Any], Invalid] = {
    int: invalidint,
    float: invalidfloat,
    str: invalidstr,
}


def invalid_for(target: Type[Any]) -> Any:
    """Return the absent marker for the given type.

    @param target: type for which an absent value is requested
    @return: the marker, or None for types without a marker

    """
    return _MARKERS.get(target)


def jsonable(value: Any) -> Any:
    """Convert absent values to None (JSON null), leave others untouched.

    @param value: value to convert
    @return: value, or None if absent

    """
    return value if isvalid(value) else None
