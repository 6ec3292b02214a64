"""Numerics for QuickSort comparison-count distributions and their tails.

Modules:
    specfun   - scalar special functions and constants
    exactdist - exact PMF of the comparison count by dynamic programming
    sampler   - reproducible Monte Carlo for large n
    limitmgf  - fixed-point numerics for the limiting moment generating
                function and the comparison-function integral
    bounds    - closed-form tail/MGF bound exponents and the Chernoff gain
    largedev  - finite-n large-deviation evaluators and empirical checks
    cli       - command-line front end
"""

__version__ = "0.1.0"
