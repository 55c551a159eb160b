"""Plane-strain finite-strain FEM with gap-medium contact.

Contact between bodies is enforced by meshing the open gap with a very
compliant medium that stiffens asymptotically under compression, so no
contact search is needed.  The medium combines a volumetric log barrier,
a constant-stiffness linear term, and a deformation-averaging penalty
that keeps the deformation gradient nearly uniform within each element.
"""

__version__ = "0.1.0"
