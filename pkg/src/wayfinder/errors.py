"""Error taxonomy shared across the package.

Every failure a caller can act on gets its own class so batch runners and
the HTTP layer can map them to exit codes / status codes without string
matching.
"""


class WayfinderError(Exception):
    """Base class for all domain errors."""


# --- input / format problems ---------------------------------------------

class ParseError(WayfinderError):
    """Malformed input document (bad JSON, unknown field, wrong type)."""


class ValidationError(WayfinderError):
    """Structurally valid input that violates a domain constraint."""


class InvalidArgument(WayfinderError):
    """Out-of-range or nonsensical argument value."""


class EmptyInput(WayfinderError):
    """An operation that needs at least one item got none."""


# --- world lookups ---------------------------------------------------------

class UnknownViewpoint(WayfinderError):
    """Viewpoint id not present in the world (or the trained model)."""


class DegenerateHeading(WayfinderError):
    """Two points share an x-y projection; no bearing exists."""


# --- localization ----------------------------------------------------------

class MixedWorlds(WayfinderError):
    """Training examples drawn from more than one world."""


class WorldMismatch(WayfinderError):
    """Model and world disagree (trained on a different world)."""


class DegenerateBelief(WayfinderError):
    """Posterior mass underflowed to zero everywhere."""


class EmptyTrace(WayfinderError):
    """Pose trace has no entries."""


class UnorderedTimestamps(WayfinderError):
    """Token or trace timestamps are not in time order."""


# --- planning --------------------------------------------------------------

class NoPath(WayfinderError):
    """Goal unreachable under the active cost model."""


# --- instruction generation / grounding ------------------------------------

class EmptyTrajectory(WayfinderError):
    """Trajectory with no nodes."""


class NonAdjacentTrajectory(WayfinderError):
    """Consecutive trajectory nodes share no edge."""


class UnknownTemplateSet(WayfinderError):
    """Template style id not registered."""


class UnparsableSentence(WayfinderError):
    """A sentence the template grammar cannot invert.

    Carries the sentence index and the offending text.
    """

    def __init__(self, index: int, sentence: str):
        self.index = index
        self.sentence = sentence
        super().__init__(f"sentence {index}: {sentence!r}")


# --- interactive sessions ----------------------------------------------------

class IllegalTransition(WayfinderError):
    """Event not legal in the session's current phase."""


class NonAdjacentMove(WayfinderError):
    """Move target is not a neighbor of the current node."""
