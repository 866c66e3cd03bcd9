from logging import getLogger, basicConfig, DEBUG, INFO, WARNING

__version__ = "2026.10.0"

# Identifies the pseudorandom stream family in run manifests.
STREAM_ALGORITHM = "numpy.PCG64/SeedSequence"


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    """
    Configures the root logger for :module:`begfad`. Quiet wins over verbose.

    :param verbose: If true, log at DEBUG.
    :type verbose: bool
    :param quiet: If true, only warnings and errors are logged.
    :type quiet: bool
    """
    level = INFO
    if verbose:
        level = DEBUG
    if quiet:
        level = WARNING
    basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    getLogger(__name__).debug("Logging configured at level %d", level)
