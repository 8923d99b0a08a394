"""Resource theory of quantum measurements: coherence and entanglement of POVMs."""

from .channels import KrausChannel, UnitaryChannel
from .conversion import ConversionResult, convert, induced_coherence, verify_theorem1, verify_theorem2
from .errors import DomainError, FreeOperationError, PovmError, TheoremViolation, ValidationError
from .measurement import Povm, Separability, StochasticMap
from .monotones import (
    Bracket,
    coherence_monotone,
    entanglement_monotone_bracket,
    entanglement_relative_entropy_bracket,
    measurement_relative_entropy,
)
from .operators import HermitianOperator

__version__ = "0.1.0"
