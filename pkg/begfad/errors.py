from typing import Optional


class BegFadError(Exception):
    """
    Base class of every error raised by :module:`begfad`.
    """


class LatticeError(BegFadError, ValueError):
    """
    An invalid box shape or an out-of-range site.
    """


class LatticeMismatchError(BegFadError, ValueError):
    """
    Two configurations that do not live on the same box were combined.
    """


class ClusterError(BegFadError, ValueError):
    """
    A cluster flip that would leave the set of ground states.
    """


class ConfigCodecError(BegFadError, ValueError):
    """
    A serialized configuration could not be parsed.
    """


class EnumerationCapError(BegFadError):
    """
    Raised when a box is too large for exhaustive enumeration.
    """

    def __init__(self, site_count: int, cap: int, estimate: float, what: str = "site") -> None:
        """
        :param site_count: Number of sites of the refused box.
        :type site_count: int
        :param cap: The configured cap.
        :type cap: int
        :param estimate: Rough number of configurations involved.
        :type estimate: float
        :param what: What the cap counts.
        :type what: str
        """
        super().__init__(f"box with {site_count} sites exceeds the {what} cap of {cap} "
                         f"(about {estimate:.3g} configurations)")
        self.site_count = site_count
        self.cap = cap
        self.estimate = estimate


class CoalescenceError(BegFadError):
    """
    Coupling from the past did not coalesce within the allowed number of epochs.
    """


class InvariantViolation(BegFadError):
    """
    A coupled run broke one of its invariants (order, feasibility or containment).
    """

    def __init__(self, message: str, step: int, site: Optional[int] = None, dump: str = "") -> None:
        """
        :param message: What was violated.
        :type message: str
        :param step: The step at which the violation was seen.
        :type step: int
        :param site: The last updated site, when known.
        :type site: Optional[int]
        :param dump: Text dump of the local states involved.
        :type dump: str
        """
        super().__init__(f"{message} at step {step}" + ("" if site is None else f", site {site}"))
        self.step = step
        self.site = site
        self.dump = dump
