"""Travelling waves of generalized Burgers-type equations.

Modules
-------
model       PDE family, travelling-wave reduction, planar system, Hamiltonian case
integrate   adaptive Dormand-Prince integration, events, time-of-flight quadrature
homoclinic  manifold shooting and the homoclinic bifurcation
expseries   two-sided exponential series for the solitary wave
rational    rational-exponential waves with analytic derivatives
catalog     exact solution families and residual verification
cli         command-line front end
"""

__version__ = "0.1.0"
