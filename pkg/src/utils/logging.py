"""Set up logging, warning, etc."""

import logging
import warnings


class RepeatedWarningFilter(logging.Filter):
    """
    A logging filter that lets each distinct warning through only once.

    Applies to WARNING records emitted by loggers under ``prefix``. Grid-coverage
    and surrogate-extrapolation warnings are raised per sample and would
    otherwise flood the console during a sample sweep.
    """

    def __init__(self, prefix: str = "src.kinetic_uq") -> None:
        super().__init__()
        self.prefix = prefix
        self._seen: set[tuple[str, str]] = set()

    def filter(self, record: logging.LogRecord) -> bool:
        """Define filter logic."""
        if record.levelno != logging.WARNING or not record.name.startswith(
            self.prefix
        ):
            return True

        key = (record.name, record.getMessage())
        if key in self._seen:
            return False

        self._seen.add(key)
        return True


def set_up_logging(level: int | str = logging.INFO) -> None:
    """Set up Logging and Warning levels."""
    root_logger = logging.getLogger()

    if not root_logger.handlers:
        logging.basicConfig(
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )

    root_logger.setLevel(level.upper() if isinstance(level, str) else level)
    for handler in root_logger.handlers:
        if not any(isinstance(_f, RepeatedWarningFilter) for _f in handler.filters):
            handler.addFilter(RepeatedWarningFilter())

    warnings.filterwarnings("ignore", category=ResourceWarning)
