import logging
import os

LOG_FOLDER = "logs"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def get_logger(name: str) -> logging.Logger:
    """Return a module logger writing DEBUG records to its own log file.

    Each module gets ``<log folder>/<module>.log`` (overwritten per run).
    The folder defaults to ``logs`` and can be moved with the
    ``CUBECOCYCLE_LOG_DIR`` environment variable.

    Args:
        name (str): Usually ``__name__`` of the calling module.

    Returns:
        logging.Logger: The configured logger.
    """
    logger = logging.getLogger(name)
    if getattr(logger, "_cubecocycle_configured", False):
        return logger

    # Create logging folder
    log_folder = os.environ.get("CUBECOCYCLE_LOG_DIR", LOG_FOLDER)
    if not os.path.exists(log_folder):
        os.makedirs(log_folder, exist_ok=True)

    # Set up logging to a file
    handler = logging.FileHandler(
        os.path.join(log_folder, f"{name.split('.')[-1]}.log"),
        mode="w",
        delay=True,
    )
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG)
    logger._cubecocycle_configured = True
    return logger
