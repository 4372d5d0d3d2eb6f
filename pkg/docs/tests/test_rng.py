from hashlib import blake2b

import numpy as np
import pytest

from hdrconform.ends import ParameterError
from hdrconform.rng import Generator, subseed, MASK64

GOLDEN = 0x9E3779B97F4A7C15


def _splitmix(value: int) -> int:
    z = (value + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _rotl(value: int, shift: int) -> int:
    return ((value << shift) | (value >> (64 - shift))) & MASK64


def _reference(seed: int, count: int) -> list:
    """Plain integer xoshiro256** seeded by splitmix64."""
    state = [_splitmix((seed + i * GOLDEN) & MASK64) for i in range(4)]
    res = []
    for _ in range(count):
        res.append((_rotl((state[1] * 5) & MASK64, 7) * 9) & MASK64)
        shifted = (state[1] << 17) & MASK64
        state[2] ^= state[0]
        state[3] ^= state[1]
        state[1] ^= state[2]
        state[0] ^= state[3]
        state[2] ^= shifted
        state[3] = _rotl(state[3], 45)
    return res


def test_splitmix_vector() -> None:
    assert _splitmix(0) == 0xE220A8397B1DCDAF
    assert int(Generator(0)._state[0]) == 0xE220A8397B1DCDAF


def test_stream_matches_reference() -> None:
    for seed in (0, 1, 2084, MASK64):
        assert Generator(seed).next_u64(64).tolist() == _reference(seed, 64)


def test_subseed() -> None:
    digest = int.from_bytes(blake2b(b"night-sky", digest_size=8).digest(), "little")
    assert subseed(7, "night-sky") == _splitmix(7 ^ digest)
    assert subseed(7, "night-sky") != subseed(7, "noise")
    assert Generator(7, "noise").seed == subseed(7, "noise")
    with pytest.raises(ParameterError):
        subseed(-1, "noise")
    with pytest.raises(ParameterError):
        Generator(2 ** 64)


def test_reproducible() -> None:
    first, second = Generator(42, "noise"), Generator(42, "noise")
    assert np.array_equal(first.uniform(1000), second.uniform(1000))
    assert np.array_equal(first.normal(999), second.normal(999))
    assert np.array_equal(first.sample(5000, 300), second.sample(5000, 300))
    assert not np.array_equal(Generator(43).uniform(10), Generator(42).uniform(10))


def test_distributions() -> None:
    gen = Generator(11)
    uniform = gen.uniform(100000)
    assert uniform.min() >= 0.0 and uniform.max() < 1.0
    assert uniform.mean() == pytest.approx(0.5, abs=0.01)
    normal = gen.normal(100001)
    assert normal.size == 100001
    assert normal.mean() == pytest.approx(0.0, abs=0.02)
    assert normal.std() == pytest.approx(1.0, abs=0.02)
    draws = [gen.bounded(6) for _ in range(6000)]
    assert set(draws) == set(range(6))
    with pytest.raises(ParameterError):
        gen.bounded(0)


def test_sample() -> None:
    gen = Generator(3)
    drawn = gen.sample(1000, 1000)
    assert sorted(drawn.tolist()) == list(range(1000))
    part = gen.sample(10 ** 6, 500)
    assert len(set(part.tolist())) == 500
    assert gen.sample(10, 0).size == 0
    with pytest.raises(ParameterError):
        gen.sample(10, 11)
