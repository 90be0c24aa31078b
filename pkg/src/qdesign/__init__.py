"""2-designs from the quadratic functions x^(p^l+1) over GF(p^m).

Construction of the incidence structures, brute-force verification of the
design property and of the supporting counts (rootless constants, image-set
sizes, stabilizers, 2-homogeneity, curve point bounds).
"""

from .designs import (Block, BudgetExceeded, DesignReport, IncidenceStructure,
                      NoBlocks, Spectrum, block_of, build_structure, value_spectrum,
                      verify_t_design)
from .family import (FamilySpec, bluher_bruteforce, bluher_predicted, check_case,
                     classify_case, image_set, predicted_k)
from .field import FieldCtx, field_new, gcd_delta

__version__ = "0.1.0"

__all__ = [
    "Block", "BudgetExceeded", "DesignReport", "FamilySpec", "FieldCtx",
    "IncidenceStructure", "NoBlocks", "Spectrum", "block_of", "bluher_bruteforce",
    "bluher_predicted", "build_structure", "check_case", "classify_case",
    "field_new", "gcd_delta", "image_set", "predicted_k", "value_spectrum",
    "verify_t_design",
]
