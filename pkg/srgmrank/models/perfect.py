"""Mean value functions m(t) and intensities dm/dt of the perfect-debugging models.

Every function broadcasts: ``t`` may be a scalar or an array of times and each
parameter may be a scalar or an ``(n, 1)`` column holding ``n`` candidates.
"""
import numpy as np

from srgmrank.models.numeric import exp, expm1, one_minus_exp


def goel_okumoto_mean(t, a, b):
    return a * one_minus_exp(b * t)


def goel_okumoto_intensity(t, a, b):
    return a * b * exp(-b * t)


def generalized_goel_mean(t, a, b, c):
    return a * one_minus_exp(b * np.power(t, c))


def generalized_goel_intensity(t, a, b, c):
    return a * b * c * np.power(t, c - 1) * exp(-b * np.power(t, c))


def gompertz_mean(t, a, b, k):
    # a * k ** exp(-b t); 0 < k < 1 so the curve grows from a*k towards a
    return a * exp(np.log(k) * exp(-b * t))


def gompertz_intensity(t, a, b, k):
    decay = exp(-b * t)
    return -a * b * np.log(k) * decay * exp(np.log(k) * decay)


def inflected_s_mean(t, a, b, beta):
    return a * one_minus_exp(b * t) / (1 + beta * exp(-b * t))


def inflected_s_intensity(t, a, b, beta):
    decay = exp(-b * t)
    return a * b * decay * (1 + beta) / (1 + beta * decay) ** 2


def logistic_growth_mean(t, a, b, k):
    return a / (1 + k * exp(-b * t))


def logistic_growth_intensity(t, a, b, k):
    decay = exp(-b * t)
    return a * k * b * decay / (1 + k * decay) ** 2


def musa_okumoto_mean(t, a, b):
    return a * np.log1p(b * t)


def musa_okumoto_intensity(t, a, b):
    return a * b / (1 + b * t)


def yamada_delayed_s_mean(t, a, b):
    return a * (one_minus_exp(b * t) - b * t * exp(-b * t))


def yamada_delayed_s_intensity(t, a, b):
    return a * b * b * t * exp(-b * t)


def modified_duane_mean(t, a, b, c):
    # a * (1 - (b / (b + t)) ** c)
    return -a * expm1(-c * np.log1p(t / b))


def modified_duane_intensity(t, a, b, c):
    return a * c / (b + t) * exp(-c * np.log1p(t / b))


def pham_zhang_ifd_mean(t, a, b, d):
    return a * (one_minus_exp(b * t) - exp(-b * t) * ((b + d) * t + b * d * t * t))


def pham_zhang_ifd_intensity(t, a, b, d):
    # negative near t = 0 (value -a*d at the origin)
    return a * exp(-b * t) * (b * (b - d) * t + b * b * d * t * t - d)
