"""Desk-scale large view synthesis model.

Posed input images and target cameras go in as Plücker-ray tokens; a
transformer with no 3D inductive bias produces the target images.
"""

__version__ = "0.1.0"
