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

"""Seeded, portable pseudo-random generation.

Every random draw of hdrconform goes through a L{Generator}: a xoshiro256** generator whose
state is seeded by splitmix64 from a 64-bit seed. Independent streams are obtained from one
global seed through named sub-seeds (L{subseed}), so that a single seed reproduces every
pattern and simulation. The algorithms are documented in the sphinx documentation (PRNG page) so
that fixtures can be regenerated in any language.

Kernels are compiled with numba; all integer arithmetic is carried out on unsigned 64-bit
integers (wrapping).

"""

from hashlib import blake2b

import numpy as np
from numba import jit

from hdrconform.ends import ParameterError

MASK64 = 2 ** 64 - 1
"""64-bit mask"""


@jit(nopython=True, cache=True)  # type: ignore
def _splitmix64(state: np.uint64) -> np.uint64:
    """Return splitmix64 output for state (the state itself must be advanced by the caller)."""
    z = state + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@jit(nopython=True, cache=True)  # type: ignore
def _seed_state(seed: np.uint64) -> np.ndarray:
    """Initial xoshiro256** state: four successive splitmix64 outputs."""
    state = np.empty(4, dtype=np.uint64)
    counter = seed
    for i in range(4):
        state[i] = _splitmix64(counter)
        counter = counter + np.uint64(0x9E3779B97F4A7C15)
    return state


@jit(nopython=True, cache=True)  # type: ignore
def _rotl(value: np.uint64, shift: np.uint64) -> np.uint64:
    return (value << shift) | (value >> (np.uint64(64) - shift))


@jit(nopython=True, cache=True)  # type: ignore
def _next(state: np.ndarray) -> np.uint64:
    """Advance xoshiro256** state, return next 64-bit output."""
    result = _rotl(state[1] * np.uint64(5), np.uint64(7)) * np.uint64(9)
    shifted = state[1] << np.uint64(17)
    state[2] ^= state[0]
    state[3] ^= state[1]
    state[1] ^= state[2]
    state[0] ^= state[3]
    state[2] ^= shifted
    state[3] = _rotl(state[3], np.uint64(45))
    return result


@jit(nopython=True, cache=True)  # type: ignore
def _bounded(state: np.ndarray, bound: np.uint64) -> np.uint64:
    """Unbiased integer in [0, bound) by rejection of the low remainder."""
    threshold = (np.uint64(0) - bound) % bound
    while True:
        value = _next(state)
        if value >= threshold:
            return value % bound


@jit(nopython=True, cache=True)  # type: ignore
def _uniform(state: np.ndarray) -> float:
    """Float in [0,1) from the 53 upper bits."""
    return np.float64(_next(state) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@jit(nopython=True, cache=True)  # type: ignore
def _raw_array(state: np.ndarray, count: int) -> np.ndarray:
    res = np.empty(count, dtype=np.uint64)
    for i in range(count):
        res[i] = _next(state)
    return res


@jit(nopython=True, cache=True)  # type: ignore
def _uniform_array(state: np.ndarray, count: int) -> np.ndarray:
    res = np.empty(count, dtype=np.float64)
    for i in range(count):
        res[i] = _uniform(state)
    return res


@jit(nopython=True, cache=True)  # type: ignore
def _normal_array(state: np.ndarray, count: int) -> np.ndarray:
    """Standard normal draws by Box-Muller, two per pair of uniforms (cosine first)."""
    res = np.empty(count, dtype=np.float64)
    i = 0
    while i < count:
        radius = np.sqrt(-2.0 * np.log(1.0 - _uniform(state)))
        angle = 2.0 * np.pi * _uniform(state)
        res[i] = radius * np.cos(angle)
        if i + 1 < count:
            res[i + 1] = radius * np.sin(angle)
        i += 2
    return res


@jit(nopython=True, cache=True)  # type: ignore
def _partial_shuffle(state: np.ndarray, total: int, count: int) -> np.ndarray:
    """First 'count' positions of a Fisher-Yates shuffle of range(total)."""
    perm = np.arange(total)
    for i in range(count):
        j = i + np.int64(_bounded(state, np.uint64(total - i)))
        perm[i], perm[j] = perm[j], perm[i]
    return perm[:count].copy()


def subseed(seed: int, name: str) -> int:
    """Derive the seed of the stream 'name' from a global seed.

    The first 8 bytes (little endian) of the blake2b digest of the name are xored to the seed,
    then mixed by splitmix64.

    @param seed: global 64-bit seed
    @type seed: int
    @param name: stream name
    @type name: str
    @return: 64-bit sub-seed
    @rtype: int

    """
    if not 0 <= seed <= MASK64:
        raise ParameterError(f"seed {seed} does not fit in 64 unsigned bits")
    digest = int.from_bytes(blake2b(name.encode("utf-8"), digest_size=8).digest(), "little")
    return int(_splitmix64(np.uint64(seed ^ digest)))


class Generator:
    """xoshiro256** random stream."""

    def __init__(self, seed: int = 0, name: str = ""):
        """Create a random stream.

        @param seed: 64-bit seed (Default value = 0)
        @type seed: int
        @param name: if given, the stream is seeded from subseed(seed, name) (Default value = "")
        @type name: str

        """
        if not 0 <= seed <= MASK64:
            raise ParameterError(f"seed {seed} does not fit in 64 unsigned bits")
        self.seed: int = subseed(seed, name) if name else seed
        """effective seed of the stream"""
        self._state: np.ndarray = _seed_state(np.uint64(self.seed))

    def next_u64(self, count: int) -> np.ndarray:
        """Raw 64-bit outputs."""
        return _raw_array(self._state, count)

    def bounded(self, bound: int) -> int:
        """Integer uniformly drawn in [0, bound)."""
        if bound < 1:
            raise ParameterError("bound must be positive")
        return int(_bounded(self._state, np.uint64(bound)))

    def uniform(self, count: int) -> np.ndarray:
        """Floats uniformly drawn in [0,1)."""
        return _uniform_array(self._state, count)

    def normal(self, count: int) -> np.ndarray:
        """Standard normal draws."""
        return _normal_array(self._state, count)

    def sample(self, total: int, count: int) -> np.ndarray:
        """Draw 'count' distinct indices of range(total), without replacement.

        @param total: population size
        @type total: int
        @param count: sample size
        @type count: int
        @return: int64 array of indices, in draw order
        @rtype: np.ndarray

        """
        if not 0 <= count <= total:
            raise ParameterError(f"cannot draw {count} of {total} without replacement")
        return _partial_shuffle(self._state, total, count)
