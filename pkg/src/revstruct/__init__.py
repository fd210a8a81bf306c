"""Decision procedures for reversibility of disconnected binary structures."""

from .cardinals import ALEPH_0, Aleph, CardinalSequence, Progression, decide_reversible, parse_sequence
from .errors import GuardExceeded, InputError, WitnessError
from .families import StructureFamily, Template, decide_family, parse_family
from .ordertypes import (OtpFamily, classify_csb_limit, decide_union_reversibility,
                         parse_order_type, parse_otp_family, theta_invariants)
from .ordinals import OMEGA, ONE, ZERO, Ordinal, cnf_arith
from .structures import (BinaryStructure, MorphismKind, components, find_morphisms,
                         is_reversible_bruteforce, parse_structure)
from .wellfounded import FiniteRelation, certify_by_invariant, is_well_founded, product_relation

__version__ = "0.1.0"
