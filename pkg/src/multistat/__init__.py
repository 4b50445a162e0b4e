"""Certified lower bounds for positive steady states of mass-action
reaction networks via positively decorated simplices in regular
subdivisions of the support of the steady-state system."""

__version__ = "0.1.0"
