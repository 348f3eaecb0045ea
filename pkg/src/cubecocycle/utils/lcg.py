from typing import Iterator

LCG_MULTIPLIER = 1664525
LCG_INCREMENT = 1013904223
LCG_MODULUS = 2**32


def lcg_stream(seed: int) -> Iterator[int]:
    """Numerical Recipes linear congruential generator.

    Used wherever a family must be reproducible across platforms and
    library versions, independently of ``random``/``numpy`` internals.
    """
    state = seed % LCG_MODULUS
    while True:
        state = (LCG_MULTIPLIER * state + LCG_INCREMENT) % LCG_MODULUS
        yield state
