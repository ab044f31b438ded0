"""Numerical verification of explicit formulas for averages of Goldbach representation numbers.

Modules: ``arith`` (Lambda, psi, singular series), ``goldbach`` (R_k and its
sums), ``zeros`` (zero tables and zero sums), ``quadrature`` and ``circle``
(weighted circle-method checks), ``experiments`` (theorem pipelines, CSV),
``cli``.
"""
__version__ = "0.1.0"
