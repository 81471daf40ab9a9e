"""caliber: calibration-form catalogs on flat quaternionic model spaces.

Subpackages
-----------
exterior   sparse alternating forms on R^N (wedge, contraction, Hodge star,
           evaluation, pullback), real or complex, exact or floating point
symforms   exact symbolic exterior calculus on the punctured cone R^N \\ {0}
model      constructors for the flat hyperkahler cone, the unit-sphere link
           frame, and the linear twistor model, with their form catalogs
calib      comass computation over Grassmannians and semi-calibration checks
planes     tangent-plane classification and normal-form extraction
cli        JSON-first command line front end (`caliber ...`)
"""

from caliber.exterior import AltForm, ComplexAltForm, evaluate, hodge, interior, pullback, wedge

__version__ = "0.1.0"

__all__ = [
    "AltForm",
    "ComplexAltForm",
    "wedge",
    "interior",
    "hodge",
    "evaluate",
    "pullback",
    "__version__",
]
