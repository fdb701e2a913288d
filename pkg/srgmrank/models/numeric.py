"""Overflow-safe elementary functions shared by the model formulas.

Exponent arguments are clamped to [-EXP_LIMIT, EXP_LIMIT] so that no valid
parameter vector produces NaN through ``inf - inf`` or ``0 * inf``.
"""
import numpy as np

EXP_LIMIT = 700.0


def exp(x):
    return np.exp(np.clip(x, -EXP_LIMIT, EXP_LIMIT))


def expm1(x):
    return np.expm1(np.clip(x, -EXP_LIMIT, EXP_LIMIT))


def one_minus_exp(x):
    """1 - exp(-x), accurate for small x"""
    return -expm1(-x)


def decay_ratio(delta, t):
    """(1 - exp(-delta * t)) / delta for delta >= 0, with the limit t where delta == 0"""
    delta = np.asarray(delta, dtype=float)
    zero = delta == 0
    safe = np.where(zero, 1.0, delta)
    return np.where(zero, t, one_minus_exp(safe * t) / safe)


def exp_remainder(x):
    """exp(-x) - 1 + x, without the cancellation of the naive form"""
    return expm1(-x) + x
