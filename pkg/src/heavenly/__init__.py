"""Symbolic-numeric verification of dispersionless heavenly-type integrable systems.

The package is organized around a small exact computer-algebra core:

* :mod:`heavenly.jets` -- sparse differential polynomials in jet variables
  over the Gaussian rationals;
* :mod:`heavenly.rewrite` -- oriented rewrite systems encoding PDEs, normal
  forms modulo prolongations, and ideal-membership certificates;
* :mod:`heavenly.lam` -- rational functions and Laurent series in the
  spectral parameter;
* :mod:`heavenly.fields` -- vector fields, Lie brackets and Lax
  compatibility residuals;
* :mod:`heavenly.casimir` -- the coadjoint action on 1-forms and asymptotic
  verification of Casimir gradient expansions;
* :mod:`heavenly.catalog` -- machine-readable encodings of the equation
  catalog (Einstein-Weyl, dKP, Dunajski, Plebanski, Husain, Monge, ...);
* :mod:`heavenly.numerics` -- desk-scale numerical validation (spectral dKP
  solver, manufactured solutions, characteristic-flow commutation).

The HTTP service lives in :mod:`heavenly.service`; :mod:`heavenly.cli` is a
thin client over it.
"""

__version__ = "0.1.0"
