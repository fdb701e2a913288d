"""Mean value functions m(t) and intensities dm/dt of the imperfect-debugging models.

Broadcasting follows ``srgmrank.models.perfect``.
"""
import numpy as np

from srgmrank.models.numeric import decay_ratio, exp, exp_remainder, expm1, one_minus_exp


def yamada_rayleigh_mean(t, a, alpha, beta):
    growth = one_minus_exp(beta * t * t / 2)
    return a * one_minus_exp(alpha * growth)


def yamada_rayleigh_intensity(t, a, alpha, beta):
    half_square = beta * t * t / 2
    growth = one_minus_exp(half_square)
    return a * alpha * beta * t * exp(-half_square) * exp(-alpha * growth)


def yamada_imperfect_1_mean(t, a, b, alpha):
    # a*b/(alpha+b) * (exp(alpha t) - exp(-b t))
    return a * b * (expm1(alpha * t) - expm1(-b * t)) / (alpha + b)


def yamada_imperfect_1_intensity(t, a, b, alpha):
    return a * b * (alpha * exp(alpha * t) + b * exp(-b * t)) / (alpha + b)


def _fault_content(t, a, b, alpha):
    # a*(1 - exp(-b t))*(1 - alpha/b) + a*alpha*t and its derivative
    faults = a * one_minus_exp(b * t) + a * alpha * exp_remainder(b * t) / b
    faults_rate = a * b * exp(-b * t) + a * alpha * one_minus_exp(b * t)
    return faults, faults_rate


def yamada_imperfect_2_mean(t, a, b, alpha):
    return _fault_content(t, a, b, alpha)[0]


def yamada_imperfect_2_intensity(t, a, b, alpha):
    return _fault_content(t, a, b, alpha)[1]


def yamada_exponential_mean(t, a, g, beta):
    """``g`` is the product r*alpha of the published form"""
    return a * one_minus_exp(g * one_minus_exp(beta * t))


def yamada_exponential_intensity(t, a, g, beta):
    return a * g * beta * exp(-beta * t) * exp(-g * one_minus_exp(beta * t))


def _pnz_terms(t, a, b, alpha):
    faults, faults_rate = _fault_content(t, a, b, alpha)
    return exp(-b * t), faults, faults_rate


def pnz_mean(t, a, b, alpha, beta):
    decay, faults, _ = _pnz_terms(t, a, b, alpha)
    return faults / (1 + beta * decay)


def pnz_intensity(t, a, b, alpha, beta):
    decay, faults, faults_rate = _pnz_terms(t, a, b, alpha)
    denominator = 1 + beta * decay
    return (faults_rate * denominator + faults * b * beta * decay) / denominator ** 2


def _pham_zhang_terms(t, a, b, c, alpha):
    decay = exp(-b * t)
    slow, fast = np.minimum(alpha, b), np.maximum(alpha, b)
    # h(t) = (exp(-alpha t) - exp(-b t)) / (b - alpha) and its derivative, both bounded for large t
    h = exp(-slow * t) * decay_ratio(fast - slow, t)
    h_rate = exp(-fast * t) - slow * h
    faults = (c + a) * one_minus_exp(b * t) - a * b * h
    faults_rate = (c + a) * b * decay - a * b * h_rate
    return decay, faults, faults_rate


def pham_zhang_mean(t, a, b, c, alpha, beta):
    decay, faults, _ = _pham_zhang_terms(t, a, b, c, alpha)
    return faults / (1 + beta * decay)


def pham_zhang_intensity(t, a, b, c, alpha, beta):
    decay, faults, faults_rate = _pham_zhang_terms(t, a, b, c, alpha)
    denominator = 1 + beta * decay
    return (faults_rate * denominator + faults * b * beta * decay) / denominator ** 2


def _ztp_terms(t, b, c, p, alpha, beta):
    decay = exp(-b * t)
    denominator = 1 + alpha * decay
    fraction = one_minus_exp(b * t) / denominator
    shape = (c / b) * (p - beta)
    return decay, denominator, fraction, shape


def ztp_mean(t, a, b, c, p, alpha, beta):
    _, _, fraction, shape = _ztp_terms(t, b, c, p, alpha, beta)
    return a / (p - beta) * np.power(fraction, shape)


def ztp_intensity(t, a, b, c, p, alpha, beta):
    decay, denominator, fraction, shape = _ztp_terms(t, b, c, p, alpha, beta)
    return a * c * (1 + alpha) * decay * np.power(fraction, shape - 1) / denominator ** 2
