#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
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
"""Implentation of casters to arbitrary types.

Implement the L{Caster} class object, used for converting JSON values (and command line strings)
to the types declared in parameter dataclasses.

"""

from typing import Type, Any, List, Union

from hdrconform.inval import invalid_for, isvalid

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


class Caster:
    """Generic type-caster generator."""

    def __init__(self, target: Type[Any]):
        """Create an callable object that will try to cast any value to the given target.

        >>> caster = Caster(List[int])
        >>> caster([1, "2", 4.5])
        [1,2,4]
        >>> Caster(Optional[float])(None) is None
        True

        @param target: the target type. may be complexe types based on typing module
        @type target: Type[Any]

        """
        self.dest: Type[Any]
        """destination conversion type"""
        self.args: List[Caster]
        """destination type arguments (e.g. for list or dict)"""
        self.optional: bool = False
        """None is accepted and kept as None"""
        origin = getattr(target, "__origin__", None)
        if target is Any:
            self.dest, self.args = object, []
        elif origin is Union:
            members = [arg for arg in target.__args__ if arg is not type(None)]
            self.optional = len(members) < len(target.__args__)
            inner = Caster(members[0])
            self.dest, self.args = inner.dest, inner.args
        elif origin is not None:
            self.dest = origin
            args = target.__args__
            self.args = (
                [Caster(args[0])] if Ellipsis in args else [Caster(arg) for arg in args]
            )
        else:
            self.dest = target
            self.args = []

    def __call__(self, value: Any) -> Any:
        """Cast the value to the pre-defined target type.

        Absent values (None, NaN, invalid markers) are kept as None for optional targets, and
        converted to the absent marker of scalar targets.

        @param value: the value to be casted
        @return: the casted value

        """
        if isinstance(value, bytes):
            value = value.decode()
        if self.dest is object:
            return value
        if not isvalid(value):
            if self.optional:
                return None
            marker = invalid_for(self.dest)
            if marker is not None:
                return marker
            raise ValueError(f"absent value where {self.dest} expected")
        if self.dest is dict:
            return {
                self.args[0](key): self.args[1](val) for key, val in dict(value).items()
            }
        if self.dest is list:
            return [self.args[0](val) for val in value]
        if self.dest is tuple:
            if len(self.args) == 1:
                return tuple([self.args[0](val) for val in value])
            return tuple([conv(val) for conv, val in zip(self.args, value)])
        if self.dest is bool and isinstance(value, str):
            if value.lower() in _TRUE:
                return True
            if value.lower() in _FALSE:
                return False
            raise ValueError(f"'{value}' is not a boolean")
        if self.dest is int and isinstance(value, float) and not value.is_integer():
            raise ValueError(f"{value} is not an integer")
        if self.dest is int and isinstance(value, str):
            return int(value, 16) if value.lower().startswith("0x") else int(value)
        return self.dest(value)

    def __repr__(self) -> str:
        """Represent a caster as 'TO<destination type>'."""
        args = (
            "" if len(self.args) == 0 else " , ".join([str(arg) for arg in self.args])
        )
        opt = "?" if self.optional else ""
        return f"TO{self.dest}{opt}[{args}]"
