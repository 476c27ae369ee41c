#!/usr/bin/env python3
"""
Resource manager module for nilcohom
File access for algebra/config inputs and run artifacts: retried reads,
temp-file-then-rename writes and SHA-256 digests for the manifest.
"""

import hashlib
import logging
import os
import time
from contextlib import contextmanager
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Generator, Tuple, Type, Union

PathLike = Union[str, Path]
TRANSIENT_ERRORS: Tuple[Type[BaseException], ...] = (IOError, OSError, PermissionError)


class ResourceManager:
    """Input reads and artifact writes used by the config and report layers."""

    def __init__(self, chunk_size: int = 8192):
        self.chunk_size = chunk_size

    def retry_on_failure(
        self,
        max_retries: int = 3,
        base_delay: float = 0.5,
        max_delay: float = 10.0,
        backoff_factor: float = 2.0,
        exceptions: Tuple[Type[BaseException], ...] = TRANSIENT_ERRORS,
    ) -> Callable[[Callable], Callable]:
        """
        Retry transient I/O failures with exponential backoff.

        A missing file is a usage error and propagates on the first attempt.
        """
        def decorator(func: Callable) -> Callable:
            @wraps(func)
            def wrapper(*args, **kwargs):
                attempt = 0
                while True:
                    try:
                        return func(*args, **kwargs)
                    except FileNotFoundError:
                        raise
                    except exceptions as e:
                        if attempt >= max_retries:
                            logging.error(f"{func.__name__} gave up after {attempt + 1} attempts: {e}")
                            raise
                        wait = min(base_delay * backoff_factor ** attempt, max_delay)
                        logging.warning(f"{func.__name__} failed ({e}); retry {attempt + 1} in {wait:.1f}s")
                        time.sleep(wait)
                        attempt += 1

            return wrapper
        return decorator

    @contextmanager
    def safe_file_operation(
        self, file_path: PathLike, mode: str = "r", encoding: str = "utf-8"
    ) -> Generator[Any, None, None]:
        """Open an input file and log any failure with its path before re-raising."""
        kwargs = {} if "b" in mode else {"encoding": encoding, "newline": ""}
        try:
            with open(file_path, mode, **kwargs) as handle:
                yield handle
        except FileNotFoundError:
            raise
        except Exception as e:
            logging.error(f"Cannot {mode!r}-access {file_path}: {e}")
            raise

    @contextmanager
    def atomic_file_write(self, file_path: PathLike, encoding: str = "utf-8") -> Generator[Any, None, None]:
        """
        Write to ``<name>.tmp`` and rename over the target on success.

        Args:
            file_path: Final artifact path
            encoding: Text encoding

        Yields:
            Writable text handle; newlines are written verbatim
        """
        target = Path(file_path)
        staging = target.with_name(target.name + ".tmp")
        try:
            with open(staging, "w", encoding=encoding, newline="") as handle:
                yield handle
            os.replace(staging, target)
            logging.debug(f"Artifact written: {target}")
        except Exception as e:
            staging.unlink(missing_ok=True)
            logging.error(f"Artifact {target} not written: {e}")
            raise

    def sha256(self, file_path: PathLike) -> str:
        digest = hashlib.sha256()
        with open(file_path, "rb") as handle:
            for block in iter(lambda: handle.read(self.chunk_size), b""):
                digest.update(block)
        return digest.hexdigest()


resource_manager = ResourceManager()


def safe_file_operation(file_path: PathLike, mode: str = "r", encoding: str = "utf-8"):
    return resource_manager.safe_file_operation(file_path, mode, encoding)


def atomic_file_write(file_path: PathLike, encoding: str = "utf-8"):
    return resource_manager.atomic_file_write(file_path, encoding)


def retry_on_io_error(max_retries: int = 3, base_delay: float = 0.5):
    return resource_manager.retry_on_failure(max_retries=max_retries, base_delay=base_delay)


def file_sha256(path: PathLike) -> str:
    return resource_manager.sha256(path)
