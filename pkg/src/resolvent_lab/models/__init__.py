from .algebra import IdentityCheck, Monomial, ResolventGenerator, ResolventPoly, SimplifyResult, Verdict
from .lattice import GroundStateResult, LatticeModel, Potential
from .representation import OperatorMatrix, TruncatedRep
from .states import UNDETERMINED, DiracConstraintSet, QuadratureValue, QuasifreeCovariance, Undetermined
from .symplectic import FieldVector, Subspace, SymplecticSpace

__all__ = [
    "FieldVector",
    "SymplecticSpace",
    "Subspace",
    "ResolventGenerator",
    "Monomial",
    "ResolventPoly",
    "Verdict",
    "SimplifyResult",
    "IdentityCheck",
    "TruncatedRep",
    "OperatorMatrix",
    "QuasifreeCovariance",
    "DiracConstraintSet",
    "Undetermined",
    "UNDETERMINED",
    "QuadratureValue",
    "Potential",
    "LatticeModel",
    "GroundStateResult",
]
