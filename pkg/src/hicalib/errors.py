"""Semantic exception types shared across the package."""


class HicalibError(Exception):
    """Base class for all package errors."""


# -- simplex arithmetic -------------------------------------------------------

class SumMismatch(HicalibError):
    """Numerators do not sum to the denominator."""


class ZeroDenominator(HicalibError):
    """Denominator is zero or negative."""


class DimensionMismatch(HicalibError):
    """Operands live on simplices of different dimension."""


class AbsoluteContinuityViolation(HicalibError):
    """KL divergence undefined: x puts mass where p has none."""


# -- forecaster ---------------------------------------------------------------

class OutOfRange(HicalibError):
    """Day or level index outside the configured horizon."""


class OutOfOrderDay(HicalibError):
    """Days must be observed in order 1..T."""


class InconsistentCounts(HicalibError):
    """Level counts do not match the expected number of completed days."""


class BudgetExceeded(HicalibError):
    """Configured day budget exceeded; caller must opt into large T."""


# -- adversaries --------------------------------------------------------------

class MissingTauEntry(HicalibError):
    """Hard-sequence tau tree lacks an entry for a required prefix."""


# -- metrics ------------------------------------------------------------------

class MissingMixture(HicalibError):
    """A transcript day lacks the mixture needed for DCE."""


class MissingRealizedPrediction(HicalibError):
    """A transcript day lacks the realized prediction needed for ECE."""


# -- harness / CLI ------------------------------------------------------------

class ConfigInvalid(HicalibError):
    """Configuration file or parameter set violates the schema."""


class MissingTranscript(HicalibError):
    """Run directory does not contain a transcript."""


class CorruptRecord(HicalibError):
    """Transcript record failed to parse or violates its invariants."""


class InvalidForecaster(HicalibError):
    """Unknown forecaster name for the lower-bound harness."""


class AdaptiveAdversaryUnsupported(HicalibError):
    """Concentration checks require an oblivious (fixed-law) adversary."""
