"""soliton-lab

Numerical laboratory for translating solitons of mean curvature flow: exact
asymptotic series, bowl and wing profiles, radial flow solvers and stability runs.
"""

__version__ = "1.0.1"
__author__ = "soliton-lab developers"
