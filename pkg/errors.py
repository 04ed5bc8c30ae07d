#!/usr/bin/env python3
"""
errors.py

Shared exception hierarchy.

Two roots, so rotsurf.py can turn any failure into an exit code:
  ParameterError  -> exit 1  (bad parameters, empty domains, bad input data)
  NumericalError  -> exit 2  (quadrature / IVP / root finder gave up)
"""

from __future__ import annotations


class ParameterError(ValueError):
    exit_code = 1


class NumericalError(ArithmeticError):
    exit_code = 2


# ------------------------- parameter / domain -------------------------

class BadParams(ParameterError):
    pass


class EmptyDomain(ParameterError):
    pass


class OutOfDomain(ParameterError):
    pass


class DomainError(ParameterError):
    pass


class NoBracket(ParameterError):
    pass


class TurningPointInside(ParameterError):
    pass


class NeedsNonzeroA(ParameterError):
    pass


class GenericNotPointwise(ParameterError):
    pass


class TooFewSamples(ParameterError):
    pass


class DegenerateCurve(ParameterError):
    pass


class DegenerateGrid(ParameterError):
    pass


class AxisTouch(ParameterError):
    pass


class ImmediateExit(ParameterError):
    pass


class SignBreakdown(ParameterError):
    pass


# ------------------------- numerical -------------------------

class NonConvergence(NumericalError):
    pass


class NonFinite(NumericalError):
    pass


class EventStall(NumericalError):
    pass
