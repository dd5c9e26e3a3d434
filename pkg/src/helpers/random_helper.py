"""
File: random_helper.py
File-Path: src/helpers/random_helper.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    seeded random number generation and per-module seed derivation

Inputs:
    master seed

Outputs:
    numpy Generators over a fixed bit generator, derived module seeds
"""

import numpy as np

# recorded in results metadata so splits can be replayed elsewhere
PRNG_ALGORITHM = "numpy.PCG64"

SEED_OFFSETS = {
    'split': 0,
    'density': 1,
    'similarity': 2,
    'mfus_target': 11,
    'mfus_auxiliary': 12,
    'gbt': 21,
    'synthetic': 31,
    'grid': 41,
}


def make_rng(seed: int) -> np.random.Generator:
    """Generator over PCG64 seeded with a 64-bit integer"""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def derive_seed(master_seed: int, module: str) -> int:
    """master seed plus the fixed offset of one module"""
    return int(master_seed) + SEED_OFFSETS[module]
